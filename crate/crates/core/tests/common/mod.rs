#![allow(dead_code)]

use rand::Rng;
use subtag::codes::LinearCode;
use subtag::field::{BaseField, ExtField};
use subtag::linalg::Matrix;
use subtag::network::decode_subspace;
use subtag::scheme::{PublicParams, VerifierKey};

pub fn field(q: u32, l: u32) -> ExtField {
    subtag::params::canonical_field(q, l).unwrap()
}

pub fn reed_solomon(f: &ExtField, v: usize, kdim: usize) -> LinearCode {
    let points: Vec<_> = (0..v as u64).map(|x| f.element(x).unwrap()).collect();
    LinearCode::reed_solomon(f, &points, kdim).unwrap()
}

/// q = 5, l = 3, n = M = 2, RS [6,3] over F_125.
pub fn rs63() -> PublicParams {
    let f = field(5, 3);
    PublicParams::new(&f, 2, 2, reed_solomon(&f, 6, 3)).unwrap()
}

/// The hexacode [6,3,4] over F_4 (omega = 2, omega^2 = 3), with n = 1, M = 2.
pub fn hexacode() -> PublicParams {
    let f = field(2, 2);
    let g = Matrix::from_values(
        &f,
        3,
        6,
        &[
            1, 0, 0, 1, 2, 2, //
            0, 1, 0, 2, 1, 2, //
            0, 0, 1, 2, 2, 1,
        ],
    )
    .unwrap();
    PublicParams::new(&f, 1, 2, LinearCode::from_generator(g).unwrap()).unwrap()
}

/// A small code of dimension `kdim` in {1, 2} and length 3 whose distance
/// and dual distance are both at least 2.
pub fn small_code(f: &ExtField, kdim: usize) -> LinearCode {
    let g = match kdim {
        1 => Matrix::from_values(f, 1, 3, &[1, 1, 1]),
        2 => Matrix::from_values(f, 2, 3, &[1, 0, 1, 0, 1, 1]),
        _ => panic!("kdim must be 1 or 2"),
    }
    .unwrap();
    LinearCode::from_generator(g).unwrap()
}

pub fn pick(keys: &[VerifierKey], members: &[usize]) -> Vec<VerifierKey> {
    members.iter().map(|&i| keys[i - 1].clone()).collect()
}

/// All subsets of `1..=v` as sorted member lists.
pub fn subsets(v: usize) -> Vec<Vec<usize>> {
    (0u32..1 << v)
        .map(|mask| (1..=v).filter(|i| mask >> (i - 1) & 1 == 1).collect())
        .collect()
}

pub fn random_basis<R: Rng + ?Sized>(pp: &PublicParams, rng: &mut R) -> Vec<Vec<u32>> {
    loop {
        let basis: Vec<Vec<u32>> = (0..pp.n())
            .map(|_| (0..pp.l()).map(|_| rng.random_range(0..pp.q())).collect())
            .collect();
        if decode_subspace(pp.symbols(), pp.l(), &basis).dimension() == pp.n() {
            return basis;
        }
    }
}

/// A payload outside the span of `basis`.
pub fn outside<R: Rng + ?Sized>(pp: &PublicParams, basis: &[Vec<u32>], rng: &mut R) -> Vec<u32> {
    let dim = decode_subspace(pp.symbols(), pp.l(), basis).dimension();
    assert!(dim < pp.l(), "the basis spans every payload");
    loop {
        let s: Vec<u32> = (0..pp.l()).map(|_| rng.random_range(0..pp.q())).collect();
        let mut with = basis.to_vec();
        with.push(s.clone());
        if decode_subspace(pp.symbols(), pp.l(), &with).dimension() > dim {
            return s;
        }
    }
}

pub fn base(q: u32) -> BaseField {
    BaseField::of_order(q).unwrap()
}
