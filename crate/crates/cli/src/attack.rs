use std::collections::BTreeSet;

use anyhow::{bail, Result};
use log::{debug, info};
use rand::{Rng, RngCore};
use rayon::prelude::*;
use subtag::adversary::{
    assemble_system, count_consistent_keys, deterministic_forge, guess_forge, label_distribution, AcceptanceStats,
    AdversaryError, AttackMode, AttackReport, CoalitionView, HistogramSummary,
};
use subtag::codes::CoalitionSpec;
use subtag::network::{decode_subspace, Topology};
use subtag::rng::Streams;
use subtag::scheme::{distribute, keygen, tag_basis, verify, PublicParams, TaggedPacket, VerifierKey};

use crate::reports::AttackCampaign;
use crate::simulate::random_basis;
use crate::{check_verifier, load_params, load_topology, AttackArgs};

const DEFAULT_GUESS_TRIALS: u64 = 1000;

/// One independent deployment: keys, the source packets and a payload to
/// substitute.
struct Instance {
    keys: Vec<VerifierKey>,
    packets: Vec<TaggedPacket>,
    fake: Vec<u32>,
    streams: Streams,
}

fn instance(pp: &PublicParams, seed: u64, trial: u64) -> Result<Instance> {
    let sub = Streams::new(seed).indexed("trial", trial).next_u64();
    let streams = Streams::new(sub);
    let mk = keygen(pp, sub);
    let keys = distribute(pp, &mk);
    let basis = random_basis(pp, &mut streams.stream("basis"))?;
    let packets = tag_basis(pp, &mk, &basis)?;
    let dim = decode_subspace(pp.symbols(), pp.l(), &basis).dimension();
    let mut rng = streams.stream("fake");
    let fake = loop {
        let s: Vec<u32> = (0..pp.l()).map(|_| rng.random_range(0..pp.q())).collect();
        let mut with = basis.clone();
        with.push(s.clone());
        // when U is everything, any payload will do and the attack reports it
        if dim == pp.l() || decode_subspace(pp.symbols(), pp.l(), &with).dimension() > dim {
            break s;
        }
    };
    Ok(Instance { keys, packets, fake, streams })
}

/// The packets the coalition sees: all source packets, or what its members
/// receive in the network.
fn observed(pp: &PublicParams, inst: &Instance, coalition: &[usize], topo: Option<&Topology>) -> Result<Vec<TaggedPacket>> {
    let Some(topo) = topo else {
        return Ok(inst.packets.clone());
    };
    let net = topo.instantiate(pp.symbols(), pp.n(), &mut inst.streams.stream("network"))?;
    let sources: Vec<Vec<u32>> = inst.packets.iter().map(|p| p.to_symbols(pp)).collect();
    let tx = net.transmit(&net.compute_global_kernels(), &sources)?;
    let mut seen = Vec::new();
    for (i, node) in topo.nodes().iter().enumerate() {
        if node.verifier.is_some_and(|v| coalition.contains(&v)) {
            for s in net.received(&tx, i) {
                seen.push(TaggedPacket::from_symbols(pp, s)?);
            }
        }
    }
    Ok(seen)
}

fn accepting(pp: &PublicParams, keys: &[VerifierKey], pkt: &TaggedPacket, skip: &[usize]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for k in keys.iter().filter(|k| !skip.contains(&k.index)) {
        if verify(pp, k, &pp.column(k.index)?, pkt) {
            out.push(k.index);
        }
    }
    Ok(out)
}

/// Result of one trial: the forged packet, or why none was produced.
type Attempt = Result<TaggedPacket, AdversaryError>;

fn attempt(view: &CoalitionView, mode: AttackMode, target: usize, inst: &Instance) -> Attempt {
    match mode {
        AttackMode::Guess => guess_forge(view, target, &inst.fake, &mut inst.streams.stream("guess")),
        _ => deterministic_forge(view, target, &inst.fake, 1),
    }
}

fn validate(pp: &PublicParams, coalition: &[usize], target: usize) -> Result<()> {
    check_verifier(target, pp.verifiers())?;
    let mut seen = BTreeSet::new();
    for &j in coalition {
        check_verifier(j, pp.verifiers())?;
        if !seen.insert(j) {
            bail!("verifier {j} listed twice in a coalition");
        }
    }
    if seen.contains(&target) {
        bail!("target {target} is a coalition member");
    }
    Ok(())
}

fn attack_one(pp: &PublicParams, args: &AttackArgs, coalition: &[usize], topo: Option<&Topology>) -> Result<AttackReport> {
    let mode = AttackMode::from(args.mode);
    let target = args.target;
    let trials = match (mode, args.trials) {
        (AttackMode::Histogram, _) => 1,
        (_, Some(t)) => t.max(1),
        (AttackMode::Guess, None) => DEFAULT_GUESS_TRIALS,
        (AttackMode::Deterministic, None) => 1,
    };
    let mut members = coalition.to_vec();
    members.sort_unstable();
    let qualified = pp
        .code()
        .forgeable(&CoalitionSpec::new(pp.verifiers(), members.iter().map(|j| j - 1), target - 1)?)
        .forgeable;

    let first = instance(pp, args.seed, 0)?;
    let view = CoalitionView::new(pp, members.iter().map(|&j| first.keys[j - 1].clone()).collect(), observed(pp, &first, &members, topo)?)?;
    let sys = assemble_system(&view);
    let count = count_consistent_keys(pp, &sys)?;
    info!(
        "coalition {members:?} -> {target}: K0 = {}, r0 = {}, {} consistent keys",
        sys.k0, sys.r0, count.measured
    );

    let mut report = AttackReport {
        mode,
        coalition: members.clone(),
        target,
        k0: sys.k0,
        r0: sys.r0,
        predicted_keys: count.predicted.to_string(),
        measured_keys: count.measured.to_string(),
        qualified,
        outcome: String::new(),
        target_accepts: None,
        also_accepted_by: Vec::new(),
        acceptance: None,
        histogram: None,
    };

    if mode == AttackMode::Histogram {
        let h = label_distribution(&view, target, &first.fake)?;
        report.outcome = "histogram".into();
        report.histogram = Some(HistogramSummary::from(&h));
        return Ok(report);
    }

    let results: Vec<(Attempt, Instance)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(Attempt, Instance)> {
            let inst = instance(pp, args.seed, t)?;
            let packets = observed(pp, &inst, &members, topo)?;
            let view = CoalitionView::new(pp, members.iter().map(|&j| inst.keys[j - 1].clone()).collect(), packets)?;
            Ok((attempt(&view, mode, target, &inst), inst))
        })
        .collect::<Result<_>>()?;

    let mut accepted = 0u64;
    let mut attempts = 0u64;
    for (i, (result, inst)) in results.iter().enumerate() {
        match result {
            Ok(pkt) => {
                attempts += 1;
                let ok = verify(pp, &inst.keys[target - 1], &pp.column(target)?, pkt);
                accepted += ok as u64;
                if i == 0 {
                    report.target_accepts = Some(ok);
                    let mut skip = members.clone();
                    skip.push(target);
                    report.also_accepted_by = accepting(pp, &inst.keys, pkt, &skip)?;
                }
            }
            Err(AdversaryError::NotQualified | AdversaryError::PayloadInSubspace) => {}
            Err(e) => return Err(e.clone().into()),
        }
    }
    report.outcome = match (&results[0].0, mode) {
        (Ok(_), AttackMode::Guess) => "guessed".into(),
        (Ok(_), _) => "forged".into(),
        (Err(AdversaryError::NotQualified), _) => "not-qualified".into(),
        (Err(_), _) => "payload-in-subspace".into(),
    };
    if attempts > 0 {
        let expected_rate = match mode {
            AttackMode::Guess => 1.0 / pp.ext().order() as f64,
            _ => 1.0,
        };
        report.acceptance = Some(AcceptanceStats {
            trials: attempts,
            accepted,
            rate: accepted as f64 / attempts as f64,
            expected_rate,
        });
    }
    debug!("coalition {members:?}: {accepted}/{attempts} accepted");
    Ok(report)
}

pub fn run(args: &AttackArgs) -> Result<AttackCampaign> {
    let loaded = load_params(&args.params)?;
    let pp = &loaded.params;
    for c in &args.coalition {
        validate(pp, c, args.target)?;
    }
    let topo = args
        .topology
        .as_deref()
        .map(|t| load_topology(t, &Streams::new(args.seed)))
        .transpose()?;
    let reports = args
        .coalition
        .iter()
        .map(|c| attack_one(pp, args, c, topo.as_ref()))
        .collect::<Result<_>>()?;
    Ok(AttackCampaign { seed: args.seed, reports })
}
