use std::fmt;
use std::sync::Arc;

use super::poly::{self, Coeffs, PrimeField};
use super::FieldError;

/// Largest supported base-field order.
pub const MAX_BASE_ORDER: u32 = 1 << 16;

/// The base field F_q = F_p[x]/(f), q = p^m.
///
/// Symbols are integers in `0..q` whose base-p digits are the polynomial
/// coefficients (little-endian). Multiplication goes through log/exp tables.
#[derive(Clone)]
pub struct BaseField {
    p: u32,
    m: u32,
    q: u32,
    modulus: Arc<[u32]>,
    exp: Arc<[u32]>,
    log: Arc<[u32]>,
}

impl fmt::Debug for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseField")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for BaseField {}

impl BaseField {
    /// F_{p^m} with the canonical (smallest) monic irreducible modulus.
    pub fn new(p: u32, m: u32) -> Result<Self, FieldError> {
        Self::check_sizes(p, m)?;
        let modulus = poly::smallest_irreducible(&PrimeField { p }, m as usize);
        Self::with_modulus(p, modulus)
    }

    /// F_q from its order, which must be a prime power.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, m) = poly::prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, m)
    }

    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        let m = poly::degree(&modulus).unwrap_or(0) as u32;
        Self::check_sizes(p, m)?;
        let prime = PrimeField { p };
        if modulus.len() != m as usize + 1 || modulus[m as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus("base modulus must be monic with coefficients below p".into()));
        }
        if !poly::is_irreducible(&prime, &modulus) {
            return Err(FieldError::Reducible);
        }
        let q = p.pow(m);
        let slow = SlowBase { prime, m: m as usize, modulus: &modulus };
        let (exp, log) = build_tables(q as u64, |a, b| slow.mul(a, b));
        Ok(Self {
            p,
            m,
            q,
            modulus: modulus.into(),
            exp: exp.into(),
            log: log.into(),
        })
    }

    fn check_sizes(p: u32, m: u32) -> Result<(), FieldError> {
        if !poly::is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::BadModulus("degree must be at least 1".into()));
        }
        match (p as u64).checked_pow(m) {
            Some(q) if q <= MAX_BASE_ORDER as u64 => Ok(()),
            _ => Err(FieldError::TooLarge),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        digit_add(self.p, self.m, a, b)
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        digit_sub(self.p, self.m, a, b)
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        digit_sub(self.p, self.m, 0, a)
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.q - 1;
        Ok(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Coefficients of a symbol over F_p, little-endian.
    pub fn digits(&self, a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.m as usize);
        let mut v = a;
        for _ in 0..self.m {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }
}

impl Coeffs for BaseField {
    fn size(&self) -> u32 {
        self.q
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        BaseField::add(self, a, b)
    }
    fn sub(&self, a: u32, b: u32) -> u32 {
        BaseField::sub(self, a, b)
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        BaseField::mul(self, a, b)
    }
}

struct SlowBase<'a> {
    prime: PrimeField,
    m: usize,
    modulus: &'a [u32],
}

impl SlowBase<'_> {
    fn mul(&self, a: u64, b: u64) -> u64 {
        let p = self.prime.p;
        let da = to_digits(a, p, self.m);
        let db = to_digits(b, p, self.m);
        from_digits(&poly::mul_mod(&self.prime, &da, &db, self.modulus), p)
    }
}

pub(crate) fn to_digits(mut v: u64, radix: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % radix as u64) as u32);
        v /= radix as u64;
    }
    out
}

pub(crate) fn from_digits(d: &[u32], radix: u32) -> u64 {
    d.iter().rev().fold(0u64, |acc, &c| acc * radix as u64 + c as u64)
}

/// Digit-wise addition of two packed p-adic values with `n` digits.
#[inline]
pub(crate) fn digit_add(p: u32, n: u32, a: u32, b: u32) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    if n == 1 {
        let s = a + b;
        return if s >= p { s - p } else { s };
    }
    let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
    while a > 0 || b > 0 {
        let s = a % p + b % p;
        out += if s >= p { s - p } else { s } * place;
        a /= p;
        b /= p;
        place = place.wrapping_mul(p);
    }
    out
}

#[inline]
pub(crate) fn digit_sub(p: u32, n: u32, a: u32, b: u32) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    if n == 1 {
        return if a >= b { a - b } else { a + p - b };
    }
    let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
    while a > 0 || b > 0 {
        let (x, y) = (a % p, b % p);
        out += if x >= y { x - y } else { x + p - y } * place;
        a /= p;
        b /= p;
        place = place.wrapping_mul(p);
    }
    out
}

/// Builds exp/log tables for a multiplicative group of order `size - 1`.
/// `exp` has length `2 * (size - 1)` so sums of two logs index it directly.
pub(crate) fn build_tables(size: u64, mul: impl Fn(u64, u64) -> u64) -> (Vec<u32>, Vec<u32>) {
    let n = size - 1;
    let pow = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    let factors = poly::prime_factors(n);
    let generator = if n == 1 {
        1
    } else {
        (2..size)
            .find(|&g| factors.iter().all(|&r| pow(g, n / r) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    };
    let mut exp = vec![0u32; (2 * n).max(1) as usize];
    let mut log = vec![0u32; size as usize];
    let mut acc = 1u64;
    for i in 0..n {
        exp[i as usize] = acc as u32;
        log[acc as usize] = i as u32;
        acc = mul(acc, generator);
    }
    for i in n..2 * n {
        exp[i as usize] = exp[(i - n) as usize];
    }
    (exp, log)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_mul() {
        let f5 = BaseField::new(5, 1).unwrap();
        assert_eq!(f5.mul(3, 4), 2);
        assert_eq!(f5.add(3, 4), 2);
        assert_eq!(f5.inv(2).unwrap(), 3);
        assert_eq!(f5.inv(0), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn f4_omega_squared() {
        let f4 = BaseField::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        // omega = 2 (x), omega + 1 = 3
        assert_eq!(f4.mul(2, 2), 3);
    }

    #[test]
    fn field_axioms_f9_exhaustive() {
        let f = BaseField::new(3, 2).unwrap();
        for a in 0..9 {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..9 {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(f.add(a, b), b), a);
                for c in 0..9 {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(BaseField::new(6, 1), Err(FieldError::NotPrime(6)));
        assert_eq!(BaseField::new(2, 17), Err(FieldError::TooLarge));
        assert_eq!(BaseField::with_modulus(2, vec![1, 0, 1]), Err(FieldError::Reducible));
        assert!(BaseField::of_order(12).is_err());
    }
}
