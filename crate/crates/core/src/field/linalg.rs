//! Dense linear algebra over `F_q`: reduced row echelon form, nullspaces and
//! affine solution spaces.

use serde::{Deserialize, Serialize};

use super::{FieldError, PrimeField};

/// Row-major dense matrix over a prime field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u64>) -> Result<Self, FieldError> {
        if data.len() != rows * cols {
            return Err(FieldError::LengthMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(FieldError::LengthMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Keeps only the listed rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix { rows: rows.len(), cols: self.cols, data }
    }

    /// Keeps only the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn mul_vec(&self, f: &PrimeField, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| f.mul_add(acc, a, b))
            })
            .collect()
    }

    pub fn mul(&self, f: &PrimeField, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimension");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.mul_add(out.get(r, c), a, other.get(k, c));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// In-place Gauss-Jordan elimination over the first `limit` columns.
    /// Returns the pivot columns in order; pivot rows are `0..pivots.len()`.
    pub fn rref_in_place(&mut self, f: &PrimeField, limit: usize) -> Vec<usize> {
        let limit = limit.min(self.cols);
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..limit {
            if prow == self.rows {
                break;
            }
            let Some(found) = (prow..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if found != prow {
                for c in col..cols {
                    self.data.swap(found * cols + c, prow * cols + c);
                }
            }
            let inv = f.inv(self.get(prow, col)).expect("pivot is nonzero");
            for c in col..cols {
                let v = f.mul(self.get(prow, c), inv);
                self.set(prow, c, v);
            }
            let (before, rest) = self.data.split_at_mut(prow * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            let eliminate = |row: &mut [u64]| {
                let factor = row[col];
                if factor == 0 {
                    return;
                }
                let neg = f.neg(factor);
                for c in col..cols {
                    row[c] = f.mul_add(row[c], neg, pivot_row[c]);
                }
            };
            before.chunks_mut(cols).for_each(eliminate);
            after.chunks_mut(cols).for_each(eliminate);
            pivots.push(col);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &PrimeField) -> usize {
        let mut m = self.clone();
        m.rref_in_place(f, self.cols).len()
    }

    /// Determinant of a square matrix.
    pub fn det(&self, f: &PrimeField) -> u64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1u64;
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| m.get(r, col) != 0) else {
                return 0;
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(p * n + c, col * n + c);
                }
                det = f.neg(det);
            }
            let pv = m.get(col, col);
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("nonzero pivot");
            for r in col + 1..n {
                let factor = f.mul(m.get(r, col), inv);
                if factor == 0 {
                    continue;
                }
                for c in col..n {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(col, c)));
                    m.set(r, c, v);
                }
            }
        }
        det
    }
}

/// `{ M b + z : b in F_q^d }` with linearly independent columns of `M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineSpace {
    basis: Matrix,
    offset: Vec<u64>,
}

impl AffineSpace {
    /// Builds a space from a possibly redundant spanning set; the basis is
    /// replaced by the reduced echelon basis of its column span.
    pub fn new(f: &PrimeField, spanning: &Matrix, offset: Vec<u64>) -> Result<Self, FieldError> {
        if spanning.rows() != offset.len() {
            return Err(FieldError::LengthMismatch { expected: spanning.rows(), got: offset.len() });
        }
        let mut t = spanning.transpose();
        let rank = t.rref_in_place(f, t.cols()).len();
        let columns: Vec<Vec<u64>> = (0..rank).map(|r| t.row(r).to_vec()).collect();
        Ok(AffineSpace {
            basis: Matrix::from_columns(offset.len(), &columns),
            offset,
        })
    }

    pub fn point(offset: Vec<u64>) -> Self {
        AffineSpace { basis: Matrix::zeros(offset.len(), 0), offset }
    }

    /// All of `F_q^k`.
    pub fn full(k: usize) -> Self {
        AffineSpace { basis: Matrix::identity(k), offset: vec![0; k] }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn offset(&self) -> &[u64] {
        &self.offset
    }

    /// `M b + z`
    pub fn at(&self, f: &PrimeField, params: &[u64]) -> Vec<u64> {
        self.basis
            .mul_vec(f, params)
            .into_iter()
            .zip(&self.offset)
            .map(|(a, &b)| f.add(a, b))
            .collect()
    }

    /// Parameters `b` with `M b + z = x`, if `x` lies in the space.
    pub fn coordinates(&self, f: &PrimeField, x: &[u64]) -> Option<Vec<u64>> {
        if x.len() != self.ambient_dim() {
            return None;
        }
        let rhs: Vec<u64> = x.iter().zip(&self.offset).map(|(&a, &b)| f.sub(a, b)).collect();
        let sol = solve_affine(f, &self.basis, &rhs).ok()??;
        // independent columns: the solution is unique
        Some(sol.offset)
    }

    pub fn contains(&self, f: &PrimeField, x: &[u64]) -> bool {
        self.coordinates(f, x).is_some()
    }

    /// Projection onto the first `n` coordinates, re-reduced.
    pub fn project_prefix(&self, f: &PrimeField, n: usize) -> AffineSpace {
        let rows: Vec<usize> = (0..n.min(self.ambient_dim())).collect();
        AffineSpace::new(f, &self.basis.select_rows(&rows), self.offset[..rows.len()].to_vec())
            .expect("consistent dimensions")
    }

    /// Enumerates every point; intended for small `q^dim`.
    pub fn points(&self, f: &PrimeField) -> Vec<Vec<u64>> {
        let d = self.dim();
        let q = f.modulus();
        let total = q.checked_pow(d as u32).expect("enumeration size overflow");
        (0..total)
            .map(|mut idx| {
                let b: Vec<u64> = (0..d)
                    .map(|_| {
                        let c = idx % q;
                        idx /= q;
                        c
                    })
                    .collect();
                self.at(f, &b)
            })
            .collect()
    }
}

/// Basis of `{ x : A x = 0 }`, one column per free variable of the RREF,
/// ordered by free column index.
pub fn nullspace(f: &PrimeField, a: &Matrix) -> Matrix {
    let mut r = a.clone();
    let pivots = r.rref_in_place(f, a.cols());
    nullspace_from_rref(f, &r, &pivots)
}

fn nullspace_from_rref(f: &PrimeField, r: &Matrix, pivots: &[usize]) -> Matrix {
    let n = r.cols();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Matrix::zeros(n, free.len());
    for (j, &fc) in free.iter().enumerate() {
        out.set(fc, j, 1);
        for (i, &pc) in pivots.iter().enumerate() {
            out.set(pc, j, f.neg(r.get(i, fc)));
        }
    }
    out
}

/// First nullspace basis vector of `A` without materialising the whole basis.
pub fn first_null_vector(f: &PrimeField, mut a: Matrix) -> Option<Vec<u64>> {
    let n = a.cols();
    let pivots = a.rref_in_place(f, n);
    let fc = (0..n).find(|c| !pivots.contains(c))?;
    let mut x = vec![0; n];
    x[fc] = 1;
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = f.neg(a.get(i, fc));
    }
    Some(x)
}

/// The affine solution space of `A x = b`, or `None` if inconsistent.
pub fn solve_affine(f: &PrimeField, a: &Matrix, b: &[u64]) -> Result<Option<AffineSpace>, FieldError> {
    if b.len() != a.rows() {
        return Err(FieldError::LengthMismatch { expected: a.rows(), got: b.len() });
    }
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + 1);
    for r in 0..a.rows() {
        for c in 0..n {
            aug.set(r, c, a.get(r, c));
        }
        aug.set(r, n, b[r]);
    }
    let pivots = aug.rref_in_place(f, n);
    if (pivots.len()..aug.rows()).any(|r| aug.get(r, n) != 0) {
        return Ok(None);
    }
    let mut offset = vec![0; n];
    for (i, &pc) in pivots.iter().enumerate() {
        offset[pc] = aug.get(i, n);
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Matrix::zeros(n, free.len());
    for (j, &fc) in free.iter().enumerate() {
        basis.set(fc, j, 1);
        for (i, &pc) in pivots.iter().enumerate() {
            basis.set(pc, j, f.neg(aug.get(i, fc)));
        }
    }
    Ok(Some(AffineSpace { basis, offset }))
}
