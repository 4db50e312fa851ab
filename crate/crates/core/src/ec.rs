//! Elliptic curves in short Weierstrass form, Riemann-Roch spaces L(mO),
//! the evaluation code C_L(D, kO), its dual (the residue code) and the
//! point-sum classification of forging coalitions.
//!
//! The curve lives over the scheme's code alphabet F_{q^l}. Coordinates of
//! the codes follow the order of the point list D.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::codes::{CodeError, LinearCode};
use crate::field::{ExtField, FieldElement};
use crate::linalg::Matrix;

/// Largest field order for exhaustive point enumeration.
pub const POINT_ENUMERATION_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EcError {
    #[error("curve is singular (4a^3 + 27b^2 = 0)")]
    Singular,
    #[error("characteristic {0} is not supported; need p > 3")]
    UnsupportedCharacteristic(u32),
    #[error("field of order {0} is too large to enumerate points")]
    TooLargeToEnumerate(u64),
    #[error("point {0} is not on the curve")]
    NotOnCurve(usize),
    #[error("evaluation set contains the point at infinity")]
    InfinityInSupport,
    #[error("point {0} appears twice in the evaluation set")]
    DuplicatePoint(usize),
    #[error("degree {deg} must satisfy 0 < deg < n = {n}")]
    BadDegree { deg: usize, n: usize },
    #[error("target {0} belongs to the coalition")]
    TargetInCoalition(usize),
    #[error("index {0} is out of range")]
    OutOfRange(usize),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EcPoint {
    Infinity,
    Affine { x: FieldElement, y: FieldElement },
}

impl EcPoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, EcPoint::Infinity)
    }
}

/// `y^2 = x^3 + a x + b` over a field of characteristic greater than 3.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticCurve {
    field: ExtField,
    a: FieldElement,
    b: FieldElement,
}

impl EllipticCurve {
    pub fn new(field: &ExtField, a: FieldElement, b: FieldElement) -> Result<Self, EcError> {
        let p = field.base().characteristic();
        if p <= 3 {
            return Err(EcError::UnsupportedCharacteristic(p));
        }
        let f = field;
        let a3 = f.mul(a, f.mul(a, a));
        let disc = f.add(f.scale(4 % p, a3), f.scale(27 % p, f.mul(b, b)));
        if disc.is_zero() {
            return Err(EcError::Singular);
        }
        Ok(Self { field: field.clone(), a, b })
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn a(&self) -> FieldElement {
        self.a
    }

    pub fn b(&self) -> FieldElement {
        self.b
    }

    fn rhs(&self, x: FieldElement) -> FieldElement {
        let f = &self.field;
        f.add(f.add(f.mul(x, f.mul(x, x)), f.mul(self.a, x)), self.b)
    }

    pub fn contains(&self, p: &EcPoint) -> bool {
        match *p {
            EcPoint::Infinity => true,
            EcPoint::Affine { x, y } => self.field.mul(y, y) == self.rhs(x),
        }
    }

    /// All rational points, `O` first, then affine points by (x, y) value.
    pub fn points(&self) -> Result<Vec<EcPoint>, EcError> {
        let f = &self.field;
        if f.order() > POINT_ENUMERATION_LIMIT {
            return Err(EcError::TooLargeToEnumerate(f.order()));
        }
        // y-values by their square
        let mut roots: Vec<Vec<FieldElement>> = vec![Vec::new(); f.order() as usize];
        for y in f.elements() {
            roots[f.mul(y, y).value() as usize].push(y);
        }
        let mut out = vec![EcPoint::Infinity];
        for x in f.elements() {
            for &y in &roots[self.rhs(x).value() as usize] {
                out.push(EcPoint::Affine { x, y });
            }
        }
        Ok(out)
    }

    pub fn neg(&self, p: EcPoint) -> EcPoint {
        match p {
            EcPoint::Infinity => EcPoint::Infinity,
            EcPoint::Affine { x, y } => EcPoint::Affine { x, y: self.field.neg(y) },
        }
    }

    /// Chord-and-tangent addition.
    pub fn add(&self, p: EcPoint, q: EcPoint) -> EcPoint {
        let f = &self.field;
        let (x1, y1, x2, y2) = match (p, q) {
            (EcPoint::Infinity, _) => return q,
            (_, EcPoint::Infinity) => return p,
            (EcPoint::Affine { x: x1, y: y1 }, EcPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let slope = if x1 == x2 {
            if f.add(y1, y2).is_zero() {
                return EcPoint::Infinity;
            }
            // (3 x^2 + a) / 2y
            let num = f.add(f.scale(3, f.mul(x1, x1)), self.a);
            f.div(num, f.scale(2, y1)).expect("y != 0 when not 2-torsion")
        } else {
            f.div(f.sub(y2, y1), f.sub(x2, x1)).expect("distinct x")
        };
        let x3 = f.sub(f.sub(f.mul(slope, slope), x1), x2);
        let y3 = f.sub(f.mul(slope, f.sub(x1, x3)), y1);
        EcPoint::Affine { x: x3, y: y3 }
    }

    pub fn sum<'a>(&self, points: impl IntoIterator<Item = &'a EcPoint>) -> EcPoint {
        points.into_iter().fold(EcPoint::Infinity, |acc, &p| self.add(acc, p))
    }

    /// `n * p` by double-and-add.
    pub fn multiply(&self, p: EcPoint, mut n: u64) -> EcPoint {
        let (mut acc, mut base) = (EcPoint::Infinity, p);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            n >>= 1;
        }
        acc
    }
}

/// `x^x_pow * y^y_pow`, with pole order `2 x_pow + 3 y_pow` at O.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub x_pow: u32,
    pub y_pow: u32,
}

impl Monomial {
    pub fn pole_order(&self) -> u32 {
        2 * self.x_pow + 3 * self.y_pow
    }

    pub fn eval(&self, field: &ExtField, p: &EcPoint) -> FieldElement {
        match *p {
            EcPoint::Infinity => panic!("monomials with poles cannot be evaluated at O"),
            EcPoint::Affine { x, y } => field.mul(field.pow(x, self.x_pow as u64), field.pow(y, self.y_pow as u64)),
        }
    }
}

/// Basis of L(mO): the monomials `x^a y^b`, `b <= 1`, with `2a + 3b <= m`,
/// ordered by pole order.
pub fn rr_basis(m: u32) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = (0..=1)
        .flat_map(|y_pow| (0..=m / 2).map(move |x_pow| Monomial { x_pow, y_pow }))
        .filter(|mono| mono.pole_order() <= m)
        .collect();
    out.sort_by_key(|mono| mono.pole_order());
    out
}

/// An evaluation set D of affine points and the divisor degree k of G = kO.
#[derive(Debug, Clone, PartialEq)]
pub struct AgCodeSpec {
    curve: EllipticCurve,
    points: Vec<EcPoint>,
    deg: usize,
}

/// How a coalition fares against one target in the residue-code scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    NotForgeable,
    /// Forgeable against this single point (the sum of D minus the coalition).
    ForgeableAgainstExactly(EcPoint),
    ForgeableAgainstAll,
}

impl AgCodeSpec {
    pub fn new(curve: EllipticCurve, points: Vec<EcPoint>, deg: usize) -> Result<Self, EcError> {
        for (i, p) in points.iter().enumerate() {
            if p.is_infinity() {
                return Err(EcError::InfinityInSupport);
            }
            if !curve.contains(p) {
                return Err(EcError::NotOnCurve(i));
            }
            if points[..i].contains(p) {
                return Err(EcError::DuplicatePoint(i));
            }
        }
        if deg == 0 || deg >= points.len() {
            return Err(EcError::BadDegree { deg, n: points.len() });
        }
        Ok(Self { curve, points, deg })
    }

    pub fn curve(&self) -> &EllipticCurve {
        &self.curve
    }

    pub fn points(&self) -> &[EcPoint] {
        &self.points
    }

    /// n = |D|
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// k, the degree of G = kO.
    pub fn degree(&self) -> usize {
        self.deg
    }

    /// C_L(D, kO): rows are the basis of L(kO) evaluated along D.
    pub fn eval_code(&self) -> Result<LinearCode, EcError> {
        let f = self.curve.field();
        let rows: Vec<Vec<FieldElement>> = rr_basis(self.deg as u32)
            .iter()
            .map(|mono| self.points.iter().map(|p| mono.eval(f, p)).collect())
            .collect();
        let g = Matrix::from_rows(f, self.len(), rows).map_err(CodeError::from)?;
        // deg(kO - D) < 0, so evaluation is injective and this cannot fail
        let code = LinearCode::from_generator(g)?;
        assert_eq!(code.dimension(), self.deg);
        Ok(code)
    }

    /// C_Omega(D, kO), obtained as the dual of the evaluation code.
    pub fn residue_code(&self) -> Result<LinearCode, EcError> {
        Ok(self.eval_code()?.dual())
    }

    /// Group-law classification of coalition `coalition` (indices into D)
    /// against `target` when the scheme runs on the residue code.
    pub fn classify_coalition(&self, coalition: &BTreeSet<usize>, target: usize) -> Result<Classification, EcError> {
        let n = self.len();
        if let Some(&bad) = coalition.iter().chain([&target]).find(|&&i| i >= n) {
            return Err(EcError::OutOfRange(bad));
        }
        if coalition.contains(&target) {
            return Err(EcError::TargetInCoalition(target));
        }
        let size = coalition.len();
        let k = self.deg;
        let rest_sum = || {
            let rest: Vec<EcPoint> = (0..n).filter(|i| !coalition.contains(i)).map(|i| self.points[i]).collect();
            self.curve.sum(&rest)
        };
        Ok(if size + 2 <= n - k {
            Classification::NotForgeable
        } else if size + 1 == n - k {
            let s = rest_sum();
            if s == self.points[target] {
                Classification::ForgeableAgainstExactly(s)
            } else {
                Classification::NotForgeable
            }
        } else if size == n - k {
            if rest_sum().is_infinity() {
                Classification::NotForgeable
            } else {
                Classification::ForgeableAgainstAll
            }
        } else {
            Classification::ForgeableAgainstAll
        })
    }
}
