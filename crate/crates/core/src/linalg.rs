//! Dense matrices over an [`ExtField`]: reduction, rank, affine solution
//! sets, null spaces and span membership.
//!
//! Elimination always pivots on the first nonzero entry in column order,
//! so reduced forms are canonical.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::field::{ExtField, FieldElement};

/// Attempts allowed when rejection-sampling a full-rank matrix.
pub const FULL_RANK_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("system has no solution")]
    NoSolution,
    #[error("no full-rank matrix found after {0} attempts")]
    RetryCapExceeded(usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: ExtField,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Output of [`Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// The full solution set of `A X = B`: every column of `particular` plus
/// any combination of `null_basis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Matrix,
    pub null_basis: Vec<Vec<FieldElement>>,
}

impl AffineSolution {
    pub fn nullity(&self) -> usize {
        self.null_basis.len()
    }
}

impl Matrix {
    pub fn zeros(field: &ExtField, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &ExtField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows, each of which must have `cols` entries.
    pub fn from_rows(field: &ExtField, cols: usize, rows: Vec<Vec<FieldElement>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(e) = row.iter().find(|e| e.field() != field.id()) {
                panic!("entry {e} belongs to a different field");
            }
            data.extend(row);
        }
        Ok(Self {
            field: field.clone(),
            rows: n,
            cols,
            data,
        })
    }

    /// Builds a matrix from packed element values in row-major order.
    pub fn from_values(field: &ExtField, rows: usize, cols: usize, values: &[u64]) -> Result<Self, LinalgError> {
        if values.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        let data = values
            .iter()
            .map(|&v| field.element(v).map_err(|e| LinalgError::DimensionMismatch(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn from_columns(field: &ExtField, len: usize, columns: &[Vec<FieldElement>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(field, len, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != len {
                return Err(LinalgError::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {len}",
                    col.len()
                )));
            }
            for (i, &e) in col.iter().enumerate() {
                m.set(i, j, e);
            }
        }
        Ok(m)
    }

    pub fn random<R: Rng + ?Sized>(field: &ExtField, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            data: (0..rows * cols).map(|_| field.random(rng)).collect(),
        }
    }

    /// Uniform matrix of rank `min(rows, cols)`, by rejection sampling.
    pub fn random_full_rank<R: Rng + ?Sized>(
        field: &ExtField,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Result<Self, LinalgError> {
        for _ in 0..FULL_RANK_ATTEMPTS {
            let m = Self::random(field, rows, cols, rng);
            if m.rank() == rows.min(cols) {
                return Ok(m);
            }
        }
        Err(LinalgError::RetryCapExceeded(FULL_RANK_ATTEMPTS))
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        assert_eq!(v.field(), self.field.id(), "entry belongs to a different field");
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let f = &self.field;
        Ok((0..self.rows).map(|r| dot(f, self.row(r), v)).collect())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Matrix) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot join {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = Self::zeros(&self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in col..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref {
            reduced: m,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<FieldElement>> {
        let rref = self.rref();
        null_basis_from(&rref, self.cols)
    }
}

fn null_basis_from(rref: &Rref, cols: usize) -> Vec<Vec<FieldElement>> {
    let f = rref.reduced.field();
    let free: Vec<usize> = (0..cols).filter(|c| !rref.pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![f.zero(); cols];
            x[fc] = f.one();
            for (r, &pc) in rref.pivots.iter().enumerate() {
                x[pc] = f.neg(rref.reduced.get(r, fc));
            }
            x
        })
        .collect()
}

pub fn dot(field: &ExtField, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter()
        .zip(b)
        .fold(field.zero(), |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// The complete solution set of `a * X = b`.
pub fn solve_all(a: &Matrix, b: &Matrix) -> Result<AffineSolution, LinalgError> {
    if a.rows() != b.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "coefficient matrix has {} rows, right-hand side {}",
            a.rows(),
            b.rows()
        )));
    }
    let f = a.field();
    let n = a.cols();
    let rref = a.hstack(b)?.rref();
    if rref.pivots.iter().any(|&p| p >= n) {
        return Err(LinalgError::NoSolution);
    }
    let mut particular = Matrix::zeros(f, n, b.cols());
    for (r, &pc) in rref.pivots.iter().enumerate() {
        for j in 0..b.cols() {
            particular.set(pc, j, rref.reduced.get(r, n + j));
        }
    }
    let coeff_rref = Rref {
        pivots: rref.pivots.clone(),
        rank: rref.rank,
        reduced: rref.reduced.clone(),
    };
    Ok(AffineSolution {
        particular,
        null_basis: null_basis_from(&coeff_rref, n),
    })
}

/// Coefficients `lambda` with `sum_j lambda_j * generators[j] = v`, if `v`
/// lies in their span.
pub fn span_contains(field: &ExtField, generators: &[Vec<FieldElement>], v: &[FieldElement]) -> Option<Vec<FieldElement>> {
    if v.iter().all(|e| e.is_zero()) {
        return Some(vec![field.zero(); generators.len()]);
    }
    if generators.is_empty() {
        return None;
    }
    let a = Matrix::from_columns(field, v.len(), generators).ok()?;
    let b = Matrix::from_columns(field, v.len(), &[v.to_vec()]).ok()?;
    solve_all(&a, &b).ok().map(|s| s.particular.column(0))
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}{}", self.rows, self.cols, self)
    }
}

/// Rows of bracketed coordinate lists, e.g. `[[[1,0],[0,1]]]`.
impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ",")?;
                }
                let coords = self.field.to_coords(self.get(r, c));
                let parts: Vec<String> = coords.iter().map(u32::to_string).collect();
                write!(f, "[{}]", parts.join(","))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
