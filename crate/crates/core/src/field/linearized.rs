//! q-power sequences, affine linearized polynomials and Moore matrices.

use super::{ExtField, FieldElement};
use crate::linalg::Matrix;

/// `[s, s^q, .., s^{q^{count-1}}]`, using `count - 1` Frobenius steps.
pub fn q_powers(field: &ExtField, s: FieldElement, count: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(count);
    let mut cur = s;
    for t in 0..count {
        if t > 0 {
            cur = field.frobenius(cur, 1);
        }
        out.push(cur);
    }
    out
}

/// `tracker * a_0 + sum_{t=1}^{M} a_t * s^{q^{t-1}}` for `coeffs = [a_0, .., a_M]`.
pub fn linearized_eval(field: &ExtField, coeffs: &[FieldElement], tracker: u32, s: FieldElement) -> FieldElement {
    let Some((&affine, linear)) = coeffs.split_first() else {
        return field.zero();
    };
    let powers = q_powers(field, s, linear.len());
    linear
        .iter()
        .zip(powers)
        .fold(field.scale(tracker, affine), |acc, (&a, sp)| field.add(acc, field.mul(a, sp)))
}

/// Rows `(1, s_i, s_i^q, .., s_i^{q^{M-1}})`, an `r x (M+1)` matrix.
pub fn moore_matrix(field: &ExtField, elements: &[FieldElement], m: usize) -> Matrix {
    let rows: Vec<Vec<FieldElement>> = elements
        .iter()
        .map(|&s| {
            let mut row = Vec::with_capacity(m + 1);
            row.push(field.one());
            row.extend(q_powers(field, s, m));
            row
        })
        .collect();
    Matrix::from_rows(field, m + 1, rows).expect("rows have M+1 entries")
}
