//! Linear codes over F_{q^l}, their duals and distances, minimal codewords
//! with respect to a coordinate, and which verifier coalitions can forge
//! against a given verifier.
//!
//! Coordinates are 0-based throughout this module.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use thiserror::Error;

use crate::field::{ExtField, FieldElement};
use crate::linalg::{span_contains, LinalgError, Matrix};

/// Largest codeword count the exhaustive routines will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

/// Dual sizes up to this bound get the dual-support cross-check inside
/// [`LinearCode::forgeable`] in debug builds.
const DEBUG_CROSS_CHECK_LIMIT: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("generator has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("evaluation point {0} is repeated")]
    DuplicatePoint(usize),
    #[error("length {length} exceeds the field order {order}")]
    TooLong { length: usize, order: u64 },
    #[error("dimension {kdim} is larger than length {length}")]
    DimensionTooLarge { kdim: usize, length: usize },
    #[error("{count} codewords exceed the enumeration limit")]
    TooLargeToEnumerate { count: u128 },
    #[error("the zero code has no minimum distance")]
    ZeroCode,
    #[error("invalid coalition: {0}")]
    BadCoalition(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A malicious coalition and the verifier it tries to fool.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoalitionSpec {
    coalition: BTreeSet<usize>,
    target: usize,
}

impl CoalitionSpec {
    pub fn new(length: usize, coalition: impl IntoIterator<Item = usize>, target: usize) -> Result<Self, CodeError> {
        let coalition: BTreeSet<usize> = coalition.into_iter().collect();
        if target >= length {
            return Err(CodeError::BadCoalition(format!("target {target} out of range")));
        }
        if let Some(&bad) = coalition.iter().find(|&&c| c >= length) {
            return Err(CodeError::BadCoalition(format!("member {bad} out of range")));
        }
        if coalition.contains(&target) {
            return Err(CodeError::BadCoalition(format!("target {target} is in the coalition")));
        }
        Ok(Self { coalition, target })
    }

    pub fn coalition(&self) -> &BTreeSet<usize> {
        &self.coalition
    }

    pub fn target(&self) -> usize {
        self.target
    }
}

/// Outcome of the span test: `witness` holds the coefficients expressing the
/// target column through the coalition columns, in coalition order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forgeability {
    pub forgeable: bool,
    pub witness: Option<Vec<FieldElement>>,
}

#[derive(Debug, Clone)]
pub struct LinearCode {
    generator: Matrix,
    dual: OnceLock<Matrix>,
    distance: OnceLock<Result<usize, CodeError>>,
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.generator == other.generator
    }
}

impl LinearCode {
    /// Wraps a full-row-rank generator matrix, kept verbatim.
    pub fn from_generator(generator: Matrix) -> Result<Self, CodeError> {
        let rank = generator.rank();
        if rank != generator.rows() {
            return Err(CodeError::RankDeficient {
                rank,
                rows: generator.rows(),
            });
        }
        Ok(Self {
            generator,
            dual: OnceLock::new(),
            distance: OnceLock::new(),
        })
    }

    /// Reed-Solomon code: row t is `(a_1^t, .., a_V^t)` for `t = 0..kdim`.
    pub fn reed_solomon(field: &ExtField, points: &[FieldElement], kdim: usize) -> Result<Self, CodeError> {
        let v = points.len();
        if v as u64 > field.order() {
            return Err(CodeError::TooLong {
                length: v,
                order: field.order(),
            });
        }
        if let Some(dup) = (1..v).find(|&j| points[..j].contains(&points[j])) {
            return Err(CodeError::DuplicatePoint(dup));
        }
        if kdim > v {
            return Err(CodeError::DimensionTooLarge { kdim, length: v });
        }
        let rows = (0..kdim)
            .map(|t| points.iter().map(|&a| field.pow(a, t as u64)).collect())
            .collect();
        Self::from_generator(Matrix::from_rows(field, v, rows)?)
    }

    pub fn field(&self) -> &ExtField {
        self.generator.field()
    }

    /// V
    pub fn length(&self) -> usize {
        self.generator.cols()
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn is_zero_code(&self) -> bool {
        self.dimension() == 0
    }

    /// Column `i` of the generator.
    pub fn column(&self, i: usize) -> Vec<FieldElement> {
        self.generator.column(i)
    }

    /// Rows form a basis of the null space of the generator.
    pub fn dual_generator(&self) -> &Matrix {
        self.dual.get_or_init(|| {
            let basis = self.generator.null_space();
            Matrix::from_rows(self.field(), self.length(), basis).expect("null vectors have length V")
        })
    }

    pub fn dual(&self) -> LinearCode {
        LinearCode::from_generator(self.dual_generator().clone()).expect("null-space basis is independent")
    }

    /// Codeword count `q^(l * kdim)`.
    pub fn codeword_count(&self) -> u128 {
        (self.field().order() as u128).saturating_pow(self.dimension() as u32)
    }

    fn check_enumerable(&self) -> Result<(), CodeError> {
        let count = self.codeword_count();
        if count > ENUMERATION_LIMIT as u128 || self.length() > 64 {
            return Err(CodeError::TooLargeToEnumerate { count });
        }
        Ok(())
    }

    /// Calls `visit` with every codeword, the zero word first.
    ///
    /// Walks an odometer over F_p-coordinates of the message, so each step
    /// is a handful of vector additions.
    pub fn for_each_codeword(&self, mut visit: impl FnMut(&[FieldElement])) -> Result<(), CodeError> {
        self.check_enumerable()?;
        let f = self.field();
        let p = f.base().characteristic();
        let digits_per_symbol = f.base().degree() * f.degree();
        let mut gens: Vec<Vec<FieldElement>> = Vec::new();
        for r in 0..self.dimension() {
            for d in 0..digits_per_symbol {
                let unit = f.element((p as u64).pow(d)).expect("basis element");
                gens.push(self.generator.row(r).iter().map(|&g| f.mul(unit, g)).collect());
            }
        }
        let mut word = vec![f.zero(); self.length()];
        let mut counters = vec![0u32; gens.len()];
        visit(&word);
        loop {
            let mut i = 0;
            loop {
                if i == gens.len() {
                    return Ok(());
                }
                for (w, &g) in word.iter_mut().zip(&gens[i]) {
                    *w = f.add(*w, g);
                }
                counters[i] += 1;
                if counters[i] < p {
                    break;
                }
                counters[i] = 0;
                i += 1;
            }
            visit(&word);
        }
    }

    /// Exact minimum Hamming weight, by exhaustive enumeration.
    pub fn min_distance(&self) -> Result<usize, CodeError> {
        self.distance
            .get_or_init(|| {
                if self.is_zero_code() {
                    return Err(CodeError::ZeroCode);
                }
                let mut best = usize::MAX;
                self.for_each_codeword(|w| {
                    let wt = weight(w);
                    if wt > 0 {
                        best = best.min(wt);
                    }
                })?;
                Ok(best)
            })
            .clone()
    }

    pub fn is_mds(&self) -> Result<bool, CodeError> {
        Ok(self.min_distance()? == self.length() - self.dimension() + 1)
    }

    /// Codewords with component 1 at `i` whose support strictly contains no
    /// other such codeword's support.
    pub fn minimal_codewords_wrt(&self, i: usize) -> Result<Vec<Vec<FieldElement>>, CodeError> {
        let one = self.field().one();
        let mut found: Vec<(u64, Vec<FieldElement>)> = Vec::new();
        self.for_each_codeword(|w| {
            if w[i] == one {
                found.push((support(w), w.to_vec()));
            }
        })?;
        let supports: BTreeSet<u64> = found.iter().map(|(s, _)| *s).collect();
        let minimal: BTreeSet<u64> = supports
            .iter()
            .copied()
            .filter(|&s| !supports.iter().any(|&t| t != s && t & s == t))
            .collect();
        Ok(found
            .into_iter()
            .filter(|(s, _)| minimal.contains(s))
            .map(|(_, w)| w)
            .collect())
    }

    /// Whether the coalition's key columns determine the target's key:
    /// true iff the target column of the generator lies in the span of the
    /// coalition's columns.
    pub fn forgeable(&self, spec: &CoalitionSpec) -> Forgeability {
        let gens: Vec<Vec<FieldElement>> = spec.coalition.iter().map(|&j| self.column(j)).collect();
        let witness = span_contains(self.field(), &gens, &self.column(spec.target));
        let forgeable = witness.is_some();
        if cfg!(debug_assertions) && self.dual().codeword_count() <= DEBUG_CROSS_CHECK_LIMIT as u128 {
            if let Ok(by_dual) = self.forgeable_by_dual(spec) {
                debug_assert_eq!(forgeable, by_dual, "span and dual-support criteria disagree");
            }
        }
        Forgeability { forgeable, witness }
    }

    /// The dual-support criterion: some dual codeword has component 1 at the
    /// target and support inside coalition plus target.
    pub fn forgeable_by_dual(&self, spec: &CoalitionSpec) -> Result<bool, CodeError> {
        let allowed = spec.coalition.iter().fold(1u64 << spec.target, |m, &j| m | 1 << j);
        let mut hit = false;
        self.dual().for_each_codeword(|w| {
            if !w[spec.target].is_zero() && support(w) & !allowed == 0 {
                hit = true;
            }
        })?;
        Ok(hit)
    }

    /// Minimal coalitions able to forge against verifier `i`, read off the
    /// supports of the dual's minimal codewords with respect to `i`.
    pub fn access_structure(&self, i: usize) -> Result<Vec<BTreeSet<usize>>, CodeError> {
        let dual = self.dual();
        let sets: BTreeSet<Vec<usize>> = dual
            .minimal_codewords_wrt(i)?
            .iter()
            .map(|w| (0..w.len()).filter(|&j| j != i && !w[j].is_zero()).collect())
            .collect();
        Ok(sets.into_iter().map(|s| s.into_iter().collect()).collect())
    }
}

pub fn weight(word: &[FieldElement]) -> usize {
    word.iter().filter(|e| !e.is_zero()).count()
}

/// Support as a bitmask over at most 64 coordinates.
pub fn support(word: &[FieldElement]) -> u64 {
    word.iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .fold(0, |m, (j, _)| m | 1 << j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BaseField;

    fn field(p: u32, l: u32) -> ExtField {
        ExtField::new(BaseField::new(p, 1).unwrap(), l).unwrap()
    }

    fn even_weight() -> LinearCode {
        let f = field(2, 1);
        LinearCode::from_generator(Matrix::from_values(&f, 2, 3, &[1, 0, 1, 0, 1, 1]).unwrap()).unwrap()
    }

    fn rs(f: &ExtField, v: u64, k: usize) -> LinearCode {
        let pts: Vec<_> = (0..v).map(|x| f.element(x).unwrap()).collect();
        LinearCode::reed_solomon(f, &pts, k).unwrap()
    }

    #[test]
    fn from_generator_examples() {
        let f = field(5, 1);
        let c = LinearCode::from_generator(Matrix::identity(&f, 3)).unwrap();
        assert_eq!((c.length(), c.dimension()), (3, 3));
        let bad = Matrix::from_values(&f, 2, 2, &[1, 1, 2, 2]).unwrap();
        assert_eq!(
            LinearCode::from_generator(bad),
            Err(CodeError::RankDeficient { rank: 1, rows: 2 })
        );
    }

    #[test]
    fn rs_examples() {
        let f = field(5, 1);
        let c = rs(&f, 4, 1);
        assert!(c.generator().row(0).iter().all(|&e| e == f.one()));
        assert_eq!(rs(&f, 4, 2).min_distance(), Ok(3));
        let pts: Vec<_> = f.elements().chain([f.zero()]).collect();
        assert_eq!(
            LinearCode::reed_solomon(&f, &pts, 2),
            Err(CodeError::TooLong { length: 6, order: 5 })
        );
        let dup = [f.one(), f.zero(), f.one()];
        assert_eq!(LinearCode::reed_solomon(&f, &dup, 2), Err(CodeError::DuplicatePoint(2)));
    }

    #[test]
    fn dual_examples() {
        let f = field(5, 1);
        let full = LinearCode::from_generator(Matrix::identity(&f, 3)).unwrap();
        let d = full.dual();
        assert!(d.is_zero_code());
        assert_eq!(d.min_distance(), Err(CodeError::ZeroCode));
        let c = rs(&f, 4, 2);
        let dual = c.dual();
        assert_eq!(dual.dimension(), 2);
        assert_eq!(dual.min_distance(), Ok(3));
        assert!(c.generator().mul(&c.dual_generator().transpose()).unwrap().is_zero());
        // dual of dual spans the original code
        let dd = dual.dual();
        let stacked = Matrix::from_rows(&f, 4, [c.generator().row_vecs(), dd.generator().row_vecs()].concat()).unwrap();
        assert_eq!(stacked.rank(), 2);
    }

    #[test]
    fn distance_examples() {
        let f = field(2, 1);
        let rep = LinearCode::from_generator(Matrix::from_values(&f, 1, 3, &[1, 1, 1]).unwrap()).unwrap();
        assert_eq!(rep.min_distance(), Ok(3));
        assert_eq!(even_weight().min_distance(), Ok(2));
        let f25 = field(5, 2);
        let c = rs(&f25, 6, 3);
        assert_eq!(c.min_distance(), Ok(4));
        assert_eq!(c.is_mds(), Ok(true));
    }

    #[test]
    fn enumeration_guard() {
        let f = field(5, 3);
        let c = rs(&f, 6, 4);
        assert!(matches!(c.min_distance(), Err(CodeError::TooLargeToEnumerate { .. })));
    }

    #[test]
    fn minimal_codewords_examples() {
        let c = even_weight();
        let words: Vec<Vec<u32>> = c
            .minimal_codewords_wrt(0)
            .unwrap()
            .iter()
            .map(|w| w.iter().map(|e| e.value()).collect())
            .collect();
        assert_eq!(words, vec![vec![1, 0, 1], vec![1, 1, 0]]);
        let f = field(5, 1);
        let zero = LinearCode::from_generator(Matrix::zeros(&f, 0, 4)).unwrap();
        assert!(zero.minimal_codewords_wrt(1).unwrap().is_empty());
        let f25 = field(5, 2);
        let dual = rs(&f25, 6, 3).dual();
        for i in 0..6 {
            let words = dual.minimal_codewords_wrt(i).unwrap();
            assert!(!words.is_empty());
            assert!(words.iter().all(|w| weight(w) == 4 && w[i] == f25.one()));
        }
    }

    #[test]
    fn forgeable_examples() {
        let f25 = field(5, 2);
        let c = rs(&f25, 6, 3);
        let all_others = CoalitionSpec::new(6, [0, 1, 2, 3, 4], 5).unwrap();
        assert!(c.forgeable(&all_others).forgeable);
        let empty = CoalitionSpec::new(6, [], 5).unwrap();
        assert!(!c.forgeable(&empty).forgeable);
        for a in 0..6 {
            for b in a + 1..6 {
                for t in (0..6).filter(|&t| t != a && t != b) {
                    let spec = CoalitionSpec::new(6, [a, b], t).unwrap();
                    assert!(!c.forgeable(&spec).forgeable);
                    for d in (b + 1..6).filter(|&d| d != t) {
                        let spec = CoalitionSpec::new(6, [a, b, d], t).unwrap();
                        let res = c.forgeable(&spec);
                        assert!(res.forgeable);
                        assert_eq!(res.witness.unwrap().len(), 3);
                    }
                }
            }
        }
    }

    #[test]
    fn access_structure_examples() {
        // the even-weight code is the dual of the repetition code, so its
        // minimal codewords 110 and 101 describe coalitions against the latter
        let f2 = field(2, 1);
        let rep = LinearCode::from_generator(Matrix::from_values(&f2, 1, 3, &[1, 1, 1]).unwrap()).unwrap();
        let sets = rep.access_structure(0).unwrap();
        assert_eq!(sets, vec![BTreeSet::from([1]), BTreeSet::from([2])]);
        assert_eq!(even_weight().access_structure(0).unwrap(), vec![BTreeSet::from([1, 2])]);
        let f25 = field(5, 2);
        let sets = rs(&f25, 6, 3).access_structure(0).unwrap();
        assert_eq!(sets.len(), 10);
        assert!(sets.iter().all(|s| s.len() == 3 && !s.contains(&0)));
        let f5 = field(5, 1);
        let full = LinearCode::from_generator(Matrix::identity(&f5, 3)).unwrap();
        assert!(full.access_structure(0).unwrap().is_empty());
    }

    #[test]
    fn coalition_validation() {
        assert!(CoalitionSpec::new(4, [0, 1], 1).is_err());
        assert!(CoalitionSpec::new(4, [0, 7], 1).is_err());
        assert!(CoalitionSpec::new(4, [0], 4).is_err());
    }
}
