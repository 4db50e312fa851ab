//! The authentication protocol: master key generation by the trusted
//! authority, key distribution to verifiers, tagging of a subspace basis
//! at the source and per-packet verification.
//!
//! Payload vectors `s` in F_q^l are identified with F_{q^l} through the
//! polynomial-basis coordinates of the extension field.

mod wire;

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::codes::LinearCode;
use crate::field::{q_powers, ExtField, FieldElement, FieldError};
use crate::linalg::{LinalgError, Matrix};
use crate::rng::Streams;

pub use wire::{read_packets, write_packets, PacketHeader, WireMode};

/// A violated [`PublicParams`] requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    CodeField,
    DimensionPositive,
    DimensionAtMostL,
    TagRowsAtLeastN,
    CodeDistance,
    DualDistance,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::CodeField => "code must be defined over F_{q^l}",
            Constraint::DimensionPositive => "n >= 1",
            Constraint::DimensionAtMostL => "n <= l",
            Constraint::TagRowsAtLeastN => "M >= n",
            Constraint::CodeDistance => "d(C) >= 2",
            Constraint::DualDistance => "d(dual C) >= 2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("invalid parameters: {0} is violated")]
    InvalidParams(Constraint),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("expected {expected} basis vectors, got {got}")]
    BasisSize { expected: usize, got: usize },
    #[error("verifier index {0} is out of range")]
    NoSuchVerifier(usize),
    #[error("malformed packet data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Field operations performed by an instrumented routine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub ext_mul: u64,
    pub frobenius: u64,
}

/// Everything public about one deployment.
#[derive(Debug, Clone)]
pub struct PublicParams {
    ext: ExtField,
    symbols: ExtField,
    n: usize,
    m: usize,
    code: LinearCode,
}

impl PublicParams {
    /// Checks the size relations and that neither the code nor its dual
    /// has a weight-one word.
    pub fn new(ext: &ExtField, n: usize, m: usize, code: LinearCode) -> Result<Self, SchemeError> {
        let l = ext.degree() as usize;
        if code.field() != ext {
            return Err(SchemeError::InvalidParams(Constraint::CodeField));
        }
        if n == 0 {
            return Err(SchemeError::InvalidParams(Constraint::DimensionPositive));
        }
        if n > l {
            return Err(SchemeError::InvalidParams(Constraint::DimensionAtMostL));
        }
        if m < n {
            return Err(SchemeError::InvalidParams(Constraint::TagRowsAtLeastN));
        }
        // weight-one words of C are zero columns of the dual generator and
        // vice versa
        let has_zero_column = |g: &Matrix| (0..g.cols()).any(|c| g.column(c).iter().all(|e| e.is_zero()));
        if code.is_zero_code() || has_zero_column(code.generator()) {
            return Err(SchemeError::InvalidParams(Constraint::DualDistance));
        }
        if code.dimension() == code.length() || has_zero_column(code.dual_generator()) {
            return Err(SchemeError::InvalidParams(Constraint::CodeDistance));
        }
        Ok(Self {
            ext: ext.clone(),
            symbols: ExtField::degree_one(ext.base().clone()),
            n,
            m,
            code,
        })
    }

    /// F_{q^l}
    pub fn ext(&self) -> &ExtField {
        &self.ext
    }

    /// F_q as a field of its own, for vectors of symbols.
    pub fn symbols(&self) -> &ExtField {
        &self.symbols
    }

    pub fn q(&self) -> u32 {
        self.ext.base().order()
    }

    pub fn l(&self) -> usize {
        self.ext.degree() as usize
    }

    /// Subspace dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of linearized terms in each tag map.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn kdim(&self) -> usize {
        self.code.dimension()
    }

    /// Number of verifiers.
    pub fn verifiers(&self) -> usize {
        self.code.length()
    }

    /// Serialized packet length in F_q symbols.
    pub fn packet_len(&self) -> usize {
        1 + self.l() + self.kdim() * self.l()
    }

    /// Public column g_i of verifier `index` (1-based).
    pub fn column(&self, index: usize) -> Result<Vec<FieldElement>, SchemeError> {
        if index == 0 || index > self.verifiers() {
            return Err(SchemeError::NoSuchVerifier(index));
        }
        Ok(self.code.column(index - 1))
    }

    /// The isomorphism F_q^l -> F_{q^l}.
    pub fn embed_payload(&self, payload: &[u32]) -> Result<FieldElement, SchemeError> {
        Ok(self.ext.from_coords(payload)?)
    }

    pub fn header(&self) -> PacketHeader {
        PacketHeader {
            q: self.q(),
            l: self.l(),
            kdim: self.kdim(),
            m: self.m,
            v: self.verifiers(),
        }
    }
}

/// The authority's secret: an (M+1) x kdim matrix A over F_{q^l}.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterKey {
    a: Matrix,
}

impl MasterKey {
    pub fn from_matrix(pp: &PublicParams, a: Matrix) -> Result<Self, SchemeError> {
        if a.rows() != pp.m + 1 || a.cols() != pp.kdim() || a.field() != pp.ext() {
            return Err(SchemeError::Linalg(LinalgError::DimensionMismatch(format!(
                "master key must be {}x{} over F_{{q^l}}",
                pp.m + 1,
                pp.kdim()
            ))));
        }
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }
}

/// Verifier `index` (1-based) holds the column A * g_index.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifierKey {
    pub index: usize,
    pub column: Vec<FieldElement>,
}

impl VerifierKey {
    /// Extension-field elements stored by the verifier.
    pub fn storage(&self) -> usize {
        self.column.len()
    }
}

/// One network symbol vector `[tracker | payload | tag]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPacket {
    pub tracker: u32,
    pub payload: Vec<u32>,
    pub tag: Vec<FieldElement>,
}

impl TaggedPacket {
    /// Flattens to `1 + l + kdim * l` base-field symbols.
    pub fn to_symbols(&self, pp: &PublicParams) -> Vec<u32> {
        let mut out = Vec::with_capacity(pp.packet_len());
        out.push(self.tracker);
        out.extend_from_slice(&self.payload);
        for &t in &self.tag {
            out.extend(pp.ext().to_coords(t));
        }
        out
    }

    pub fn from_symbols(pp: &PublicParams, symbols: &[u32]) -> Result<Self, SchemeError> {
        if symbols.len() != pp.packet_len() {
            return Err(SchemeError::Malformed(format!(
                "packet has {} symbols, expected {}",
                symbols.len(),
                pp.packet_len()
            )));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s >= pp.q()) {
            return Err(SchemeError::Malformed(format!("symbol {bad} is not below q = {}", pp.q())));
        }
        let l = pp.l();
        let tag = symbols[1 + l..]
            .chunks(l)
            .map(|c| pp.ext().from_coords(c))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            tracker: symbols[0],
            payload: symbols[1..1 + l].to_vec(),
            tag,
        })
    }

    /// `sum_j coeffs[j] * packets[j]`, component-wise over F_q.
    pub fn combine(pp: &PublicParams, coeffs: &[u32], packets: &[TaggedPacket]) -> Result<Self, SchemeError> {
        if coeffs.len() != packets.len() {
            return Err(SchemeError::Linalg(LinalgError::DimensionMismatch(format!(
                "{} coefficients for {} packets",
                coeffs.len(),
                packets.len()
            ))));
        }
        let base = pp.ext().base();
        let mut out = TaggedPacket {
            tracker: 0,
            payload: vec![0; pp.l()],
            tag: vec![pp.ext().zero(); pp.kdim()],
        };
        for (&c, p) in coeffs.iter().zip(packets) {
            out.tracker = base.add(out.tracker, base.mul(c, p.tracker));
            for (o, &s) in out.payload.iter_mut().zip(&p.payload) {
                *o = base.add(*o, base.mul(c, s));
            }
            for (o, &t) in out.tag.iter_mut().zip(&p.tag) {
                *o = pp.ext().add(*o, pp.ext().scale(c, t));
            }
        }
        Ok(out)
    }
}

/// Uniform master key from the authority's stream of `seed`.
pub fn keygen(pp: &PublicParams, seed: u64) -> MasterKey {
    keygen_with(pp, &mut Streams::new(seed).stream("authority"))
}

pub fn keygen_with<R: Rng + ?Sized>(pp: &PublicParams, rng: &mut R) -> MasterKey {
    MasterKey {
        a: Matrix::random(pp.ext(), pp.m + 1, pp.kdim(), rng),
    }
}

/// Columns of B = A * G, one key per verifier.
pub fn distribute(pp: &PublicParams, mk: &MasterKey) -> Vec<VerifierKey> {
    distribute_counted(pp, mk).0
}

pub fn distribute_counted(pp: &PublicParams, mk: &MasterKey) -> (Vec<VerifierKey>, OpCounts) {
    let f = pp.ext();
    let g = pp.code().generator();
    let mut counts = OpCounts::default();
    let keys = (0..pp.verifiers())
        .map(|i| {
            let column = (0..=pp.m)
                .map(|r| {
                    (0..pp.kdim()).fold(f.zero(), |acc, t| {
                        counts.ext_mul += 1;
                        f.add(acc, f.mul(mk.a.get(r, t), g.get(t, i)))
                    })
                })
                .collect();
            VerifierKey { index: i + 1, column }
        })
        .collect();
    (keys, counts)
}

/// Source-side tagging of the basis `s_1..s_n` of the message subspace.
pub fn tag_basis(pp: &PublicParams, mk: &MasterKey, basis: &[Vec<u32>]) -> Result<Vec<TaggedPacket>, SchemeError> {
    if basis.len() != pp.n {
        return Err(SchemeError::BasisSize {
            expected: pp.n,
            got: basis.len(),
        });
    }
    let rows = basis
        .iter()
        .map(|s| s.iter().map(|&c| pp.symbols().embed(c)).collect())
        .collect();
    if Matrix::from_rows(pp.symbols(), pp.l(), rows)?.rank() < pp.n {
        return Err(SchemeError::DependentBasis);
    }
    let f = pp.ext();
    basis
        .iter()
        .map(|s| {
            let powers = q_powers(f, pp.embed_payload(s)?, pp.m);
            let tag = (0..pp.kdim())
                .map(|t| {
                    powers
                        .iter()
                        .enumerate()
                        .fold(mk.a.get(0, t), |acc, (j, &sp)| f.add(acc, f.mul(mk.a.get(j + 1, t), sp)))
                })
                .collect();
            Ok(TaggedPacket {
                tracker: 1,
                payload: s.clone(),
                tag,
            })
        })
        .collect()
}

/// `tracker * b_0 + sum_t phi(payload)^{q^{t-1}} * b_t` for the verifier's key.
pub fn label(pp: &PublicParams, vk: &VerifierKey, tracker: u32, payload: &[u32]) -> Result<FieldElement, SchemeError> {
    Ok(label_counted(pp, vk, tracker, pp.embed_payload(payload)?).0)
}

fn label_counted(pp: &PublicParams, vk: &VerifierKey, tracker: u32, s: FieldElement) -> (FieldElement, OpCounts) {
    let f = pp.ext();
    let mut counts = OpCounts {
        ext_mul: 1,
        frobenius: pp.m.saturating_sub(1) as u64,
    };
    let mut acc = f.mul(f.embed(tracker), vk.column[0]);
    for (sp, &b) in q_powers(f, s, pp.m).into_iter().zip(&vk.column[1..]) {
        counts.ext_mul += 1;
        acc = f.add(acc, f.mul(sp, b));
    }
    (acc, counts)
}

/// Accepts iff the packet's label equals `sum_t tag_t * g_{t,i}`.
pub fn verify(pp: &PublicParams, vk: &VerifierKey, g_i: &[FieldElement], pkt: &TaggedPacket) -> bool {
    verify_counted(pp, vk, g_i, pkt).0
}

pub fn verify_counted(pp: &PublicParams, vk: &VerifierKey, g_i: &[FieldElement], pkt: &TaggedPacket) -> (bool, OpCounts) {
    let f = pp.ext();
    let Ok(s) = pp.embed_payload(&pkt.payload) else {
        return (false, OpCounts::default());
    };
    if pkt.tag.len() != g_i.len() || vk.column.len() != pp.m + 1 {
        return (false, OpCounts::default());
    }
    let (lhs, mut counts) = label_counted(pp, vk, pkt.tracker, s);
    let rhs = pkt.tag.iter().zip(g_i).fold(f.zero(), |acc, (&v, &g)| {
        counts.ext_mul += 1;
        f.add(acc, f.mul(v, g))
    });
    (lhs == rhs, counts)
}

/// A tag `v` with `sum_t v_t g_{t,i} = label`: the label divided by the
/// first nonzero entry of g_i, placed at that coordinate.
pub fn tag_from_label(pp: &PublicParams, g_i: &[FieldElement], label: FieldElement) -> Vec<FieldElement> {
    let f = pp.ext();
    let mut tag = vec![f.zero(); g_i.len()];
    // PublicParams rules out zero columns
    let (t, &g) = g_i.iter().enumerate().find(|(_, g)| !g.is_zero()).expect("nonzero column");
    tag[t] = f.div(label, g).expect("nonzero divisor");
    tag
}
