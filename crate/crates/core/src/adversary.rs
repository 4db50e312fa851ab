//! Coalition attacks: pooling verifier keys and received packets into a
//! linear system in the master key, counting the keys consistent with it,
//! deterministic and guessing forgeries, and the label histogram of a
//! target over all consistent keys.
//!
//! Verifier indices are 1-based here, as in [`crate::scheme`].

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{CodeError, CoalitionSpec};
use crate::field::{q_powers, FieldElement};
use crate::linalg::{dot, solve_all, LinalgError, Matrix};
use crate::scheme::{tag_from_label, PublicParams, SchemeError, TaggedPacket, VerifierKey};

/// Largest candidate-key space `q^{l kdim (M+1)}` that will be enumerated.
pub const KEY_ENUMERATION_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("coalition keys do not determine the target's key")]
    NotQualified,
    #[error("fake payload lies in the received subspace")]
    PayloadInSubspace,
    #[error("the pooled view admits no master key")]
    InconsistentSystem,
    #[error("{0} candidate keys exceed the enumeration limit")]
    TooLargeToEnumerate(BigUint),
    #[error("invalid view: {0}")]
    BadView(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// What a malicious coalition knows: its members' keys and the packets
/// they received.
#[derive(Debug, Clone)]
pub struct CoalitionView<'a> {
    pp: &'a PublicParams,
    keys: Vec<VerifierKey>,
    packets: Vec<TaggedPacket>,
}

impl<'a> CoalitionView<'a> {
    pub fn new(pp: &'a PublicParams, keys: Vec<VerifierKey>, packets: Vec<TaggedPacket>) -> Result<Self, AdversaryError> {
        let mut seen = BTreeSet::new();
        for k in &keys {
            pp.column(k.index)?;
            if !seen.insert(k.index) {
                return Err(AdversaryError::BadView(format!("verifier {} listed twice", k.index)));
            }
            if k.column.len() != pp.m() + 1 {
                return Err(AdversaryError::BadView(format!("key {} has the wrong length", k.index)));
            }
        }
        for p in &packets {
            if p.payload.len() != pp.l() || p.tag.len() != pp.kdim() {
                return Err(AdversaryError::BadView("packet shape does not match parameters".into()));
            }
        }
        Ok(Self { pp, keys, packets })
    }

    pub fn params(&self) -> &PublicParams {
        self.pp
    }

    pub fn keys(&self) -> &[VerifierKey] {
        &self.keys
    }

    pub fn packets(&self) -> &[TaggedPacket] {
        &self.packets
    }

    /// Member indices, sorted.
    pub fn members(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.keys.iter().map(|k| k.index).collect();
        set.into_iter().collect()
    }

    fn spec(&self, target: usize) -> Result<CoalitionSpec, AdversaryError> {
        self.pp.column(target)?;
        Ok(CoalitionSpec::new(
            self.pp.verifiers(),
            self.keys.iter().map(|k| k.index - 1),
            target - 1,
        )?)
    }

    /// Whether `s` lies in the F_q-span of the received payloads.
    fn payload_in_span(&self, s: &[u32]) -> bool {
        let f = self.pp.symbols();
        let rows: Vec<Vec<FieldElement>> = self
            .packets
            .iter()
            .map(|p| p.payload.iter().map(|&c| f.embed(c)).collect())
            .collect();
        let base = Matrix::from_rows(f, self.pp.l(), rows.clone()).expect("payload length l").rank();
        let mut with = rows;
        with.push(s.iter().map(|&c| f.embed(c)).collect());
        Matrix::from_rows(f, self.pp.l(), with).expect("payload length l").rank() == base
    }
}

/// Linear constraints on the flattened master key. Unknown `t * (M+1) + r`
/// is the entry `A[r][t]`.
#[derive(Debug, Clone)]
pub struct AttackSystem {
    pub coeffs: Matrix,
    pub constants: Vec<FieldElement>,
    /// Rank of the received packets' rows `(tracker, s, s^q, ..)`.
    pub r0: usize,
    /// Rank of the coalition's columns of G.
    pub k0: usize,
}

/// Builds the packet constraints `<row(p), A[.][t]> = tag_t` and the key
/// constraints `sum_t A[r][t] g_{t,j} = b_{r,j}`.
pub fn assemble_system(view: &CoalitionView) -> AttackSystem {
    let pp = view.pp;
    let f = pp.ext();
    let (m1, kdim) = (pp.m() + 1, pp.kdim());
    let unknowns = m1 * kdim;
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    let mut packet_rows = Vec::new();
    for p in &view.packets {
        let s = pp.embed_payload(&p.payload).expect("validated payload");
        let mut row = vec![f.embed(p.tracker)];
        row.extend(q_powers(f, s, pp.m()));
        for t in 0..kdim {
            let mut eq = vec![f.zero(); unknowns];
            eq[t * m1..(t + 1) * m1].copy_from_slice(&row);
            rows.push(eq);
            constants.push(p.tag[t]);
        }
        packet_rows.push(row);
    }
    let mut key_columns = Vec::new();
    for k in &view.keys {
        let g = pp.column(k.index).expect("validated index");
        for r in 0..m1 {
            let mut eq = vec![f.zero(); unknowns];
            for t in 0..kdim {
                eq[t * m1 + r] = g[t];
            }
            rows.push(eq);
            constants.push(k.column[r]);
        }
        key_columns.push(g);
    }
    let r0 = Matrix::from_rows(f, m1, packet_rows).expect("row length M+1").rank();
    let k0 = Matrix::from_columns(f, kdim, &key_columns).map_or(0, |m| m.rank());
    AttackSystem {
        coeffs: Matrix::from_rows(f, unknowns, rows).expect("row length kdim(M+1)"),
        constants,
        r0,
        k0,
    }
}

/// Closed-form and linear-algebra counts of consistent master keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyCount {
    /// `q^{l (M+1-r0)(kdim-K0)}`
    pub predicted: BigUint,
    /// `q^{l * nullity}`
    pub measured: BigUint,
    pub nullity: usize,
    /// K0 <= kdim - 1
    pub lemma_applies: bool,
}

fn solutions(sys: &AttackSystem) -> Result<crate::linalg::AffineSolution, AdversaryError> {
    let f = sys.coeffs.field();
    let b = Matrix::from_columns(f, sys.coeffs.rows(), std::slice::from_ref(&sys.constants))?;
    solve_all(&sys.coeffs, &b).map_err(|e| match e {
        LinalgError::NoSolution => AdversaryError::InconsistentSystem,
        other => other.into(),
    })
}

pub fn count_consistent_keys(pp: &PublicParams, sys: &AttackSystem) -> Result<KeyCount, AdversaryError> {
    let sol = solutions(sys)?;
    let ql = BigUint::from(pp.ext().order());
    let free_rows = pp.m() + 1 - sys.r0;
    let free_cols = pp.kdim() - sys.k0;
    let count = KeyCount {
        predicted: ql.pow((free_rows * free_cols) as u32),
        measured: ql.pow(sol.nullity() as u32),
        nullity: sol.nullity(),
        lemma_applies: sys.k0 < pp.kdim(),
    };
    if count.lemma_applies {
        assert_eq!(count.predicted, count.measured, "consistent-key count disagrees with closed form");
    }
    Ok(count)
}

fn check_enumerable(pp: &PublicParams) -> Result<(), AdversaryError> {
    let space = BigUint::from(pp.ext().order()).pow((pp.kdim() * (pp.m() + 1)) as u32);
    if space > BigUint::from(KEY_ENUMERATION_LIMIT) {
        return Err(AdversaryError::TooLargeToEnumerate(space));
    }
    Ok(())
}

/// Calls `visit` with every master key (as an (M+1) x kdim matrix)
/// consistent with the view.
pub fn for_each_consistent_key(view: &CoalitionView, mut visit: impl FnMut(&Matrix)) -> Result<(), AdversaryError> {
    let pp = view.pp;
    check_enumerable(pp)?;
    let sol = solutions(&assemble_system(view))?;
    let f = pp.ext();
    let m1 = pp.m() + 1;
    let base = sol.particular.column(0);
    let mut digits = vec![0u64; sol.nullity()];
    loop {
        let mut x = base.clone();
        for (d, v) in digits.iter().zip(&sol.null_basis) {
            let c = f.element(*d).expect("below order");
            for (xi, &vi) in x.iter_mut().zip(v) {
                *xi = f.add(*xi, f.mul(c, vi));
            }
        }
        let mut a = Matrix::zeros(f, m1, pp.kdim());
        for t in 0..pp.kdim() {
            for r in 0..m1 {
                a.set(r, t, x[t * m1 + r]);
            }
        }
        visit(&a);
        let Some(pos) = digits.iter().position(|&d| d + 1 < f.order()) else {
            return Ok(());
        };
        digits[pos] += 1;
        digits[..pos].iter_mut().for_each(|d| *d = 0);
    }
}

fn target_label(pp: &PublicParams, key_column: &[FieldElement], tracker: u32, s: FieldElement) -> FieldElement {
    let f = pp.ext();
    q_powers(f, s, pp.m())
        .into_iter()
        .zip(&key_column[1..])
        .fold(f.scale(tracker, key_column[0]), |acc, (sp, &b)| f.add(acc, f.mul(sp, b)))
}

/// Recovers the target's key from the span witness and tags `fake` under it.
pub fn deterministic_forge(view: &CoalitionView, target: usize, fake: &[u32], tracker: u32) -> Result<TaggedPacket, AdversaryError> {
    let pp = view.pp;
    let spec = view.spec(target)?;
    if fake.len() != pp.l() {
        return Err(AdversaryError::BadView(format!("fake payload has {} symbols", fake.len())));
    }
    if view.payload_in_span(fake) {
        return Err(AdversaryError::PayloadInSubspace);
    }
    let witness = pp.code().forgeable(&spec).witness.ok_or(AdversaryError::NotQualified)?;
    let f = pp.ext();
    // witness follows sorted member order
    let mut keys: Vec<&VerifierKey> = view.keys.iter().collect();
    keys.sort_by_key(|k| k.index);
    let recovered: Vec<FieldElement> = (0..=pp.m())
        .map(|r| {
            keys.iter()
                .zip(&witness)
                .fold(f.zero(), |acc, (k, &lambda)| f.add(acc, f.mul(lambda, k.column[r])))
        })
        .collect();
    let s = pp.embed_payload(fake)?;
    let label = target_label(pp, &recovered, tracker, s);
    Ok(TaggedPacket {
        tracker,
        payload: fake.to_vec(),
        tag: tag_from_label(pp, &pp.column(target)?, label),
    })
}

/// Tags `fake` (tracker 1) with a label drawn uniformly from F_{q^l}.
pub fn guess_forge<R: Rng + ?Sized>(view: &CoalitionView, target: usize, fake: &[u32], rng: &mut R) -> Result<TaggedPacket, AdversaryError> {
    let pp = view.pp;
    let g = pp.column(target)?;
    if fake.len() != pp.l() {
        return Err(AdversaryError::BadView(format!("fake payload has {} symbols", fake.len())));
    }
    let label = pp.ext().random(rng);
    Ok(TaggedPacket {
        tracker: 1,
        payload: fake.to_vec(),
        tag: tag_from_label(pp, &g, label),
    })
}

/// Counts of each label value, indexed by packed element value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelHistogram {
    pub counts: Vec<u64>,
}

impl LabelHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of label values that occur.
    pub fn support(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn is_uniform(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] == w[1]) && self.total() > 0
    }

    /// All mass on one value.
    pub fn concentrated(&self) -> Option<u32> {
        let mut hits = self.counts.iter().enumerate().filter(|(_, &c)| c > 0);
        match (hits.next(), hits.next()) {
            (Some((v, _)), None) => Some(v as u32),
            _ => None,
        }
    }
}

/// The target's label for `(tracker 1, fake)` under every consistent key.
pub fn label_distribution(view: &CoalitionView, target: usize, fake: &[u32]) -> Result<LabelHistogram, AdversaryError> {
    let pp = view.pp;
    let g = pp.column(target)?;
    let s = pp.embed_payload(fake)?;
    let mut counts = vec![0u64; pp.ext().order() as usize];
    for_each_consistent_key(view, |a| {
        let column: Vec<FieldElement> = (0..a.rows()).map(|r| dot(pp.ext(), a.row(r), &g)).collect();
        counts[target_label(pp, &column, 1, s).value() as usize] += 1;
    })?;
    Ok(LabelHistogram { counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum AttackMode {
    Deterministic,
    Guess,
    Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AcceptanceStats {
    pub trials: u64,
    pub accepted: u64,
    pub rate: f64,
    pub expected_rate: f64,
}

/// Machine-readable outcome of one attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AttackReport {
    pub mode: AttackMode,
    pub coalition: Vec<usize>,
    pub target: usize,
    pub k0: usize,
    pub r0: usize,
    /// Decimal strings; the counts can exceed 64 bits.
    pub predicted_keys: String,
    pub measured_keys: String,
    pub qualified: bool,
    /// "forged", "not-qualified", "payload-in-subspace", "guessed", or "histogram".
    pub outcome: String,
    pub target_accepts: Option<bool>,
    /// Other verifiers that also accept the forged packet.
    pub also_accepted_by: Vec<usize>,
    pub acceptance: Option<AcceptanceStats>,
    pub histogram: Option<HistogramSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct HistogramSummary {
    pub keys: u64,
    pub support: usize,
    pub uniform: bool,
    pub concentrated_on: Option<u32>,
    pub counts: Vec<u64>,
}

impl From<&LabelHistogram> for HistogramSummary {
    fn from(h: &LabelHistogram) -> Self {
        Self {
            keys: h.total(),
            support: h.support(),
            uniform: h.is_uniform(),
            concentrated_on: h.concentrated(),
            counts: h.counts.clone(),
        }
    }
}
