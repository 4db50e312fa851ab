use std::fs::File;
use std::io::BufWriter;

use anyhow::{Context, Result};
use log::{debug, info};
use rand::Rng;
use subtag::linalg::Matrix;
use subtag::network::{decode_subspace, Role};
use subtag::rng::Streams;
use subtag::scheme::{distribute, keygen, tag_basis, verify, write_packets, PublicParams, TaggedPacket, WireMode};

use crate::reports::{NodeReport, SimulateReport};
use crate::{load_params, load_topology, SimulateArgs};

/// A uniformly random basis of an n-dimensional subspace of F_q^l.
pub(crate) fn random_basis<R: Rng + ?Sized>(pp: &PublicParams, rng: &mut R) -> Result<Vec<Vec<u32>>> {
    let m = Matrix::random_full_rank(pp.symbols(), pp.n(), pp.l(), rng)?;
    Ok(m.row_vecs()
        .iter()
        .map(|r| r.iter().map(|&e| pp.symbols().as_base(e).expect("degree one")).collect())
        .collect())
}

pub fn run(args: &SimulateArgs) -> Result<SimulateReport> {
    let loaded = load_params(&args.params)?;
    let pp = &loaded.params;
    let streams = Streams::new(args.seed);
    let topo = load_topology(&args.topology, &streams)?;
    let net = topo.instantiate(pp.symbols(), pp.n(), &mut streams.stream("network"))?;

    let mk = keygen(pp, args.seed);
    let keys = distribute(pp, &mk);
    let basis = random_basis(pp, &mut streams.stream("basis"))?;
    let sent = decode_subspace(pp.symbols(), pp.l(), &basis);
    let packets = tag_basis(pp, &mk, &basis)?;
    if let Some(path) = &args.packets {
        let mode = if args.binary { WireMode::Binary } else { WireMode::Text };
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        write_packets(pp, &packets, mode, &mut w)?;
    }
    let sources: Vec<Vec<u32>> = packets.iter().map(|p| p.to_symbols(pp)).collect();
    let gk = net.compute_global_kernels();
    let tx = match &args.inject {
        Some(node) => {
            let mut rng = streams.stream("inject");
            let junk: Vec<u32> = (0..pp.packet_len()).map(|_| rng.random_range(0..pp.q())).collect();
            info!("injecting a random packet at {node}");
            net.inject(&sources, node, &junk)?
        }
        None => net.transmit(&gk, &sources)?,
    };

    let mut nodes = Vec::new();
    for (i, node) in topo.nodes().iter().enumerate() {
        let received: Vec<TaggedPacket> = net
            .received(&tx, i)
            .into_iter()
            .map(|s| TaggedPacket::from_symbols(pp, s))
            .collect::<Result<_, _>>()?;
        let kernel_rank = net.node_kernel(&gk, i).rank();
        let (mut accepted, mut rejected) = (None, None);
        if let Some(v) = node.verifier {
            let g = pp.column(v)?;
            let ok = received.iter().filter(|p| verify(pp, &keys[v - 1], &g, p)).count();
            debug!("{}: {ok} of {} packets accepted", node.name, received.len());
            accepted = Some(ok);
            rejected = Some(received.len() - ok);
        }
        let (mut decoded_dimension, mut recovered) = (None, None);
        if node.role == Role::Sink {
            let payloads: Vec<Vec<u32>> = received.iter().map(|p| p.payload.clone()).collect();
            let got = decode_subspace(pp.symbols(), pp.l(), &payloads);
            decoded_dimension = Some(got.dimension());
            recovered = Some(got == sent);
        }
        nodes.push(NodeReport {
            name: node.name.clone(),
            role: node.role.name().into(),
            verifier: node.verifier,
            received: received.len(),
            kernel_rank,
            accepted,
            rejected,
            decoded_dimension,
            recovered,
            rank_deficient: node.role != Role::Source && kernel_rank < pp.n(),
        });
    }
    Ok(SimulateReport {
        seed: args.seed,
        topology: args.topology.clone(),
        n: pp.n(),
        injected_at: args.inject.clone(),
        all_verifiers_accept: nodes.iter().all(|n| n.rejected.unwrap_or(0) == 0),
        all_sinks_recover: nodes.iter().all(|n| n.recovered.unwrap_or(true)),
        nodes,
    })
}
