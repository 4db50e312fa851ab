use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::base::{build_tables, digit_add, digit_sub, from_digits, to_digits, BaseField};
use super::poly;
use super::{FieldElement, FieldError, FieldId};

/// Extension orders up to this size get log/exp multiplication tables.
const TABLE_LIMIT: u64 = 1 << 20;

/// Binary operation selector for [`ExtField::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// The extension F_{q^l} = F_q[y]/(g), built directly over the base field.
///
/// Elements are packed as `sum_i c_i q^i` where `c_0..c_{l-1}` are their
/// coordinates in the polynomial basis `1, alpha, .., alpha^{l-1}`. This
/// coordinate map is the public isomorphism between F_q^l and F_{q^l}.
#[derive(Clone)]
pub struct ExtField {
    inner: Arc<Inner>,
}

struct Inner {
    id: FieldId,
    base: BaseField,
    l: u32,
    order: u64,
    modulus: Vec<u32>,
    /// Row-major l x l matrix over F_q of x -> x^q.
    frobenius: Vec<u32>,
    tables: Option<(Vec<u32>, Vec<u32>)>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtField")
            .field("base", &self.inner.base)
            .field("l", &self.inner.l)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.id == other.inner.id
    }
}

impl Eq for ExtField {}

impl ExtField {
    /// F_{q^l} over `base` with the canonical (smallest) monic irreducible of degree `l`.
    pub fn new(base: BaseField, l: u32) -> Result<Self, FieldError> {
        if l == 0 {
            return Err(FieldError::BadModulus("extension degree must be at least 1".into()));
        }
        check_order(base.order(), l)?;
        let modulus = poly::smallest_irreducible(&base, l as usize);
        Self::with_modulus(base, modulus)
    }

    /// F_q viewed as a degree-one extension of itself. Its element values
    /// coincide with base-field symbols.
    pub fn degree_one(base: BaseField) -> Self {
        Self::with_modulus(base, vec![0, 1]).expect("y is irreducible")
    }

    pub fn with_modulus(base: BaseField, modulus: Vec<u32>) -> Result<Self, FieldError> {
        let l = poly::degree(&modulus).unwrap_or(0) as u32;
        if l == 0
            || modulus.len() != l as usize + 1
            || modulus[l as usize] != 1
            || modulus.iter().any(|&c| c >= base.order())
        {
            return Err(FieldError::BadModulus(
                "extension modulus must be monic of degree >= 1 with base-field coefficients".into(),
            ));
        }
        let order = check_order(base.order(), l)?;
        if !poly::is_irreducible(&base, &modulus) {
            return Err(FieldError::Reducible);
        }
        let id = FieldId::derive(&base, &modulus);
        let mut inner = Inner {
            id,
            base,
            l,
            order,
            modulus,
            frobenius: Vec::new(),
            tables: None,
        };
        inner.frobenius = frobenius_matrix(&inner);
        if order <= TABLE_LIMIT {
            inner.tables = Some(build_tables(order, |a, b| inner.slow_mul(a as u32, b as u32) as u64));
        }
        let field = Self { inner: Arc::new(inner) };
        field.check_frobenius_period()?;
        Ok(field)
    }

    fn check_frobenius_period(&self) -> Result<(), FieldError> {
        let l = self.degree() as usize;
        for j in 0..l {
            let mut v = vec![0u32; l];
            v[j] = 1;
            let start = v.clone();
            for _ in 0..l {
                v = self.apply_frobenius(&v);
            }
            if v != start {
                return Err(FieldError::BadModulus("frobenius matrix does not have period l".into()));
            }
        }
        Ok(())
    }

    pub fn id(&self) -> FieldId {
        self.inner.id
    }

    pub fn base(&self) -> &BaseField {
        &self.inner.base
    }

    /// Extension degree l.
    pub fn degree(&self) -> u32 {
        self.inner.l
    }

    /// q^l
    pub fn order(&self) -> u64 {
        self.inner.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// Row-major l x l matrix over F_q of the q-power map.
    pub fn frobenius_matrix(&self) -> &[u32] {
        &self.inner.frobenius
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::new(self.inner.id, 0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::new(self.inner.id, 1)
    }

    /// Element with the given packed value.
    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if value >= self.inner.order {
            return Err(FieldError::OutOfRange(value));
        }
        Ok(FieldElement::new(self.inner.id, value as u32))
    }

    /// Embeds a base-field symbol.
    pub fn embed(&self, symbol: u32) -> FieldElement {
        assert!(symbol < self.base().order(), "symbol {symbol} outside base field");
        FieldElement::new(self.inner.id, symbol)
    }

    /// The base-field symbol of `x`, if `x` lies in F_q.
    pub fn as_base(&self, x: FieldElement) -> Option<u32> {
        self.check(x);
        (x.value < self.base().order()).then_some(x.value)
    }

    /// Coordinates of `x` in F_q^l (inverse of the public isomorphism).
    pub fn to_coords(&self, x: FieldElement) -> Vec<u32> {
        self.check(x);
        to_digits(x.value as u64, self.base().order(), self.inner.l as usize)
    }

    /// The public isomorphism F_q^l -> F_{q^l}.
    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElement, FieldError> {
        if coords.len() != self.inner.l as usize {
            return Err(FieldError::LengthMismatch {
                expected: self.inner.l as usize,
                got: coords.len(),
            });
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.base().order()) {
            return Err(FieldError::OutOfRange(bad as u64));
        }
        Ok(FieldElement::new(self.inner.id, from_digits(coords, self.base().order()) as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.inner.order).map(|v| FieldElement::new(self.inner.id, v as u32))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement::new(self.inner.id, rng.random_range(0..self.inner.order) as u32)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement::new(self.inner.id, rng.random_range(1..self.inner.order) as u32)
    }

    #[inline]
    fn check(&self, x: FieldElement) {
        assert_eq!(x.field, self.inner.id, "element belongs to a different field");
    }

    fn digits(&self) -> u32 {
        self.base().degree() * self.inner.l
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let p = self.base().characteristic();
        FieldElement::new(self.inner.id, digit_add(p, self.digits(), a.value, b.value))
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let p = self.base().characteristic();
        FieldElement::new(self.inner.id, digit_sub(p, self.digits(), a.value, b.value))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(self.zero(), a)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if a.value == 0 || b.value == 0 {
            return self.zero();
        }
        let value = match &self.inner.tables {
            Some((exp, log)) => exp[(log[a.value as usize] + log[b.value as usize]) as usize],
            None => self.inner.slow_mul(a.value, b.value),
        };
        FieldElement::new(self.inner.id, value)
    }

    /// Multiplies by a base-field scalar.
    pub fn scale(&self, c: u32, a: FieldElement) -> FieldElement {
        self.mul(self.embed(c), a)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a);
        if a.value == 0 {
            return Err(FieldError::DivisionByZero);
        }
        match &self.inner.tables {
            Some((exp, log)) => {
                let n = (self.inner.order - 1) as u32;
                let v = exp[((n - log[a.value as usize]) % n) as usize];
                Ok(FieldElement::new(self.inner.id, v))
            }
            None => Ok(self.pow(a, self.inner.order - 2)),
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Checked binary arithmetic; reports mixed-field operands instead of panicking.
    pub fn arith(&self, a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement, FieldError> {
        if a.field != self.inner.id || b.field != self.inner.id {
            return Err(FieldError::FieldMismatch);
        }
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Div => self.div(a, b)?,
        })
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let (mut base, mut acc) = (a, self.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// x^(q^t), by `t mod l` applications of the Frobenius matrix.
    pub fn frobenius(&self, x: FieldElement, t: u64) -> FieldElement {
        let mut coords = self.to_coords(x);
        for _ in 0..t % self.inner.l as u64 {
            coords = self.apply_frobenius(&coords);
        }
        self.from_coords(&coords).expect("frobenius preserves coordinate range")
    }

    fn apply_frobenius(&self, v: &[u32]) -> Vec<u32> {
        let l = self.inner.l as usize;
        let b = self.base();
        (0..l)
            .map(|r| {
                (0..l).fold(0, |acc, c| b.add(acc, b.mul(self.inner.frobenius[r * l + c], v[c])))
            })
            .collect()
    }
}

impl Inner {
    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let q = self.base.order();
        let l = self.l as usize;
        let da = to_digits(a as u64, q, l);
        let db = to_digits(b as u64, q, l);
        from_digits(&poly::mul_mod(&self.base, &da, &db, &self.modulus), q) as u32
    }
}

fn check_order(q: u32, l: u32) -> Result<u64, FieldError> {
    match (q as u64).checked_pow(l) {
        Some(order) if order <= u32::MAX as u64 => Ok(order),
        _ => Err(FieldError::TooLarge),
    }
}

fn frobenius_matrix(inner: &Inner) -> Vec<u32> {
    let l = inner.l as usize;
    let q = inner.base.order();
    let mut out = vec![0u32; l * l];
    for j in 0..l {
        // alpha^j raised to the q-th power by repeated slow multiplication
        let alpha_j = q.pow(j as u32);
        let mut acc = 1u32;
        let mut base = alpha_j;
        let mut e = q as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = inner.slow_mul(acc, base);
            }
            base = inner.slow_mul(base, base);
            e >>= 1;
        }
        for (r, c) in to_digits(acc as u64, q, l).into_iter().enumerate() {
            out[r * l + j] = c;
        }
    }
    out
}
