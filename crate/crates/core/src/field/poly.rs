//! Dense univariate polynomials over a small coefficient field.
//!
//! Coefficients are stored little-endian by degree. The same routines serve
//! the prime layer (F_p[x] for building F_q) and the extension layer
//! (F_q[y] for building F_{q^l}).

/// Coefficient arithmetic for polynomial routines.
pub(crate) trait Coeffs {
    fn size(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn sub(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PrimeField {
    pub p: u32,
}

impl Coeffs for PrimeField {
    fn size(&self) -> u32 {
        self.p
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }
    fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }
}

pub(crate) fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Remainder of `a` modulo the monic polynomial `m`.
pub(crate) fn rem<F: Coeffs>(f: &F, a: &[u32], m: &[u32]) -> Vec<u32> {
    let dm = m.len() - 1;
    debug_assert_eq!(m[dm], 1, "modulus must be monic");
    let mut r = a.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let lead = r[dr];
        let shift = dr - dm;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(lead, c));
        }
    }
    r.resize(dm.max(1), 0);
    r.truncate(dm.max(1));
    r
}

/// Product of two residues modulo the monic `m`; result has length deg(m).
pub(crate) fn mul_mod<F: Coeffs>(f: &F, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
    }
    let mut r = rem(f, &prod, m);
    r.resize(m.len() - 1, 0);
    r
}

/// The monic polynomial of degree `deg` whose lower coefficients are the
/// base-`size` digits of `index` (little-endian).
pub(crate) fn monic_from_index(size: u32, deg: usize, mut index: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(deg + 1);
    for _ in 0..deg {
        out.push((index % size as u64) as u32);
        index /= size as u64;
    }
    out.push(1);
    out
}

/// Irreducibility by trial division over every monic polynomial of degree
/// at most deg/2.
pub(crate) fn is_irreducible<F: Coeffs>(f: &F, m: &[u32]) -> bool {
    let Some(dm) = degree(m) else { return false };
    if dm == 0 {
        return false;
    }
    let size = f.size() as u64;
    for d in 1..=dm / 2 {
        let count = size.pow(d as u32);
        for idx in 0..count {
            let divisor = monic_from_index(f.size(), d, idx);
            if degree(&rem(f, m, &divisor)).is_none() {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree `deg`, ordering candidates by the
/// integer whose base-`size` digits are the lower coefficients.
pub(crate) fn smallest_irreducible<F: Coeffs>(f: &F, deg: usize) -> Vec<u32> {
    let mut idx = 0u64;
    loop {
        let cand = monic_from_index(f.size(), deg, idx);
        if is_irreducible(f, &cand) {
            return cand;
        }
        idx += 1;
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q` into `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let factors = prime_factors(q as u64);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0] as u32;
    let (mut rest, mut m) = (q, 0);
    while rest > 1 {
        rest /= p;
        m += 1;
    }
    Some((p, m))
}
