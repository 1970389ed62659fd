//! Explicit subspace-evasive set over `F_q^n`.
//!
//! The set is the `n / w`-fold product of the variety
//! `V = { x in F_q^w : sum_j A_ij x_j^(d_j) = 0, i = 1..v }` with `w = v^2`,
//! `A` strongly regular and `d_1 > ... > d_w`. When `v` of the degrees are
//! coprime to `q - 1`, `V` is in bijection with `F_q^(w - v)`, and every
//! affine subspace of dimension `<= v` meets the set in at most `d_1^v`
//! points.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::field::{AffineSpace, Matrix, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SesError {
    #[error("invalid subspace-evasive parameters: {0}")]
    Param(String),
    #[error("affine subspace has dimension {got}, at most {max} supported")]
    Dimension { got: usize, max: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("enumeration of {0} points exceeds the oracle cap")]
    Scale(u128),
}

#[derive(Debug, Clone, Serialize)]
pub struct SesParams {
    #[serde(serialize_with = "ser_field")]
    field: PrimeField,
    v: usize,
    w: usize,
    blocks: usize,
    /// `d_1 > ... > d_w`
    degrees: Vec<u64>,
    /// Block coordinates whose degree is invertible modulo `q - 1`.
    solved: Vec<usize>,
    /// `[w] \ solved`, ascending; these carry the input symbols verbatim.
    free: Vec<usize>,
    #[serde(skip)]
    root_exps: Vec<u64>,
    #[serde(skip)]
    a: Matrix,
    #[serde(skip)]
    solved_inv: Matrix,
    #[serde(skip)]
    pow_table: Option<Vec<Vec<u64>>>,
}

fn ser_field<S: serde::Serializer>(f: &PrimeField, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(f.modulus())
}

/// `a^-1 mod n` for `gcd(a, n) = 1`.
fn inverse_mod(a: u64, n: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(n as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(n as i128) as u64)
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Degree selection: the `v` smallest integers `>= 2` coprime to `q - 1`
/// together with the `w - v` smallest remaining integers `>= 2`, sorted in
/// descending order. Fails if no admissible set exists below `4w + v^v`.
pub fn choose_degrees(q: u64, v: usize) -> Result<(Vec<u64>, Vec<u64>), SesError> {
    let w = v * v;
    let cap = 4 * w as u64 + (v as u64).pow(v as u32);
    let coprime: Vec<u64> = (2..cap).filter(|d| d.gcd(&(q - 1)) == 1).take(v).collect();
    if coprime.len() < v {
        return Err(SesError::Param(format!(
            "fewer than {v} degrees below {cap} are coprime to q - 1 = {}",
            q - 1
        )));
    }
    let mut degrees: Vec<u64> = coprime.clone();
    degrees.extend((2..).filter(|d| !coprime.contains(d)).take(w - v));
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    Ok((degrees, coprime))
}

/// All `r x r` minors of a `v x w` matrix are nonzero for `1 <= r <= v`.
pub fn is_strongly_regular(f: &PrimeField, a: &Matrix) -> bool {
    (1..=a.rows()).all(|r| {
        let row_sets = combinations(a.rows(), r);
        combinations(a.cols(), r).iter().all(|cols| {
            let sub = a.select_columns(cols);
            row_sets.iter().all(|rows| sub.select_rows(rows).det(f) != 0)
        })
    })
}

impl SesParams {
    /// Builds the set for input length `n1 = (w - v) * blocks`.
    pub fn setup(field: PrimeField, v: usize, n1: usize) -> Result<Self, SesError> {
        if v < 2 {
            return Err(SesError::Param("v must be at least 2".into()));
        }
        let w = v * v;
        let q = field.modulus();
        if q <= w as u64 {
            return Err(SesError::Param(format!("q = {q} must exceed w = {w}")));
        }
        if n1 == 0 || !n1.is_multiple_of(w - v) {
            return Err(SesError::Param(format!("n1 = {n1} is not a positive multiple of w - v = {}", w - v)));
        }
        let blocks = n1 / (w - v);
        let (degrees, coprime) = choose_degrees(q, v)?;
        let solved: Vec<usize> = coprime
            .iter()
            .map(|c| degrees.iter().position(|d| d == c).expect("chosen degree present"))
            .collect();
        let free: Vec<usize> = (0..w).filter(|j| !solved.contains(j)).collect();
        let root_exps = solved
            .iter()
            .map(|&j| inverse_mod(degrees[j], q - 1).expect("coprime degree"))
            .collect();

        // A_ij = gamma_j^i with gamma_j = g^j and rows i = 1..v
        let g = field.generator();
        let mut a = Matrix::zeros(v, w);
        for j in 0..w {
            let gamma = field.pow(g, j as u64);
            for i in 0..v {
                a.set(i, j, field.pow(gamma, i as u64 + 1));
            }
        }
        if !is_strongly_regular(&field, &a) {
            return Err(SesError::Param("constraint matrix is not strongly regular".into()));
        }
        let solved_inv = invert(&field, &a.select_columns(&solved));
        let pow_table = (q <= 1 << 16).then(|| {
            degrees
                .iter()
                .map(|&d| (0..q).map(|x| field.pow(x, d)).collect())
                .collect()
        });
        Ok(SesParams {
            field,
            v,
            w,
            blocks,
            degrees,
            solved,
            free,
            root_exps,
            a,
            solved_inv,
            pow_table,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn solved_coords(&self) -> &[usize] {
        &self.solved
    }

    pub fn free_coords(&self) -> &[usize] {
        &self.free
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn input_len(&self) -> usize {
        (self.w - self.v) * self.blocks
    }

    pub fn output_len(&self) -> usize {
        self.w * self.blocks
    }

    /// Intersection-size bound `d_1^v`.
    pub fn list_bound(&self) -> u128 {
        (self.degrees[0] as u128).pow(self.v as u32)
    }

    #[inline]
    fn power(&self, j: usize, x: u64) -> u64 {
        match &self.pow_table {
            Some(t) => t[j][x as usize],
            None => self.field.pow(x, self.degrees[j]),
        }
    }

    /// Values of the `v` defining polynomials on one block.
    pub fn residuals(&self, block: &[u64]) -> Vec<u64> {
        let f = &self.field;
        let powers: Vec<u64> = block.iter().enumerate().map(|(j, &x)| self.power(j, x)).collect();
        (0..self.v)
            .map(|i| {
                powers
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, &p)| f.mul_add(acc, self.a.get(i, j), p))
            })
            .collect()
    }

    pub fn block_on_variety(&self, block: &[u64]) -> bool {
        let f = &self.field;
        (0..self.v).all(|i| {
            block
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &x)| f.mul_add(acc, self.a.get(i, j), self.power(j, x)))
                == 0
        })
    }

    /// Membership in the product set.
    pub fn contains(&self, x: &[u64]) -> bool {
        x.len() == self.output_len() && x.chunks(self.w).all(|b| self.block_on_variety(b))
    }

    fn encode_block(&self, input: &[u64], out: &mut [u64]) {
        let f = &self.field;
        for (&j, &val) in self.free.iter().zip(input) {
            out[j] = f.elem(val);
        }
        let rhs: Vec<u64> = (0..self.v)
            .map(|i| {
                let s = self
                    .free
                    .iter()
                    .fold(0, |acc, &j| f.mul_add(acc, self.a.get(i, j), self.power(j, out[j])));
                f.neg(s)
            })
            .collect();
        let y = self.solved_inv.mul_vec(f, &rhs);
        for ((&j, &e), &yi) in self.solved.iter().zip(&self.root_exps).zip(&y) {
            out[j] = f.pow(yi, e);
        }
    }

    /// The bijection `F_q^(n1) -> S`, block by block.
    pub fn encode(&self, input: &[u64]) -> Result<Vec<u64>, SesError> {
        if input.len() != self.input_len() {
            return Err(SesError::Length { expected: self.input_len(), got: input.len() });
        }
        let mut out = vec![0; self.output_len()];
        for (inp, blk) in input.chunks(self.w - self.v).zip(out.chunks_mut(self.w)) {
            self.encode_block(inp, blk);
        }
        Ok(out)
    }

    /// Projection of every block onto its free coordinates. Membership is
    /// not re-checked.
    pub fn inverse(&self, s: &[u64]) -> Result<Vec<u64>, SesError> {
        if s.len() != self.output_len() {
            return Err(SesError::Length { expected: self.output_len(), got: s.len() });
        }
        Ok(s.chunks(self.w)
            .flat_map(|blk| self.free.iter().map(move |&j| blk[j]))
            .collect())
    }

    /// Every point of `S` inside `h`, via block-by-block induction on the
    /// affine parametrisation. Points are returned sorted and distinct.
    pub fn intersect(&self, h: &AffineSpace) -> Result<Vec<Vec<u64>>, SesError> {
        if h.ambient_dim() != self.output_len() {
            return Err(SesError::Length { expected: self.output_len(), got: h.ambient_dim() });
        }
        if h.dim() > self.v {
            return Err(SesError::Dimension { got: h.dim(), max: self.v });
        }
        let mut found = BTreeSet::new();
        self.intersect_from(0, h.basis().clone(), h.offset().to_vec(), &mut found);
        Ok(found.into_iter().collect())
    }

    fn intersect_from(&self, block: usize, basis: Matrix, offset: Vec<u64>, found: &mut BTreeSet<Vec<u64>>) {
        let f = &self.field;
        if block == self.blocks {
            // every coordinate is pinned once all blocks are fixed
            found.insert(offset);
            return;
        }
        let rows: Vec<usize> = (block * self.w..(block + 1) * self.w).collect();
        let local_basis = basis.select_rows(&rows);
        let local_offset: Vec<u64> = rows.iter().map(|&r| offset[r]).collect();
        let local = AffineSpace::new(f, &local_basis, local_offset.clone()).expect("block dimensions");
        for point in local.points(f) {
            if !self.block_on_variety(&point) {
                continue;
            }
            let rhs: Vec<u64> = point.iter().zip(&local_offset).map(|(&a, &b)| f.sub(a, b)).collect();
            let Some(params) = crate::field::solve_affine(f, &local_basis, &rhs).expect("dimensions")
            else {
                continue;
            };
            // substitute p = P b' + p0 into x = M p + z
            let next_basis = basis.mul(f, params.basis());
            let shift = basis.mul_vec(f, params.offset());
            let next_offset: Vec<u64> = offset.iter().zip(&shift).map(|(&a, &b)| f.add(a, b)).collect();
            self.intersect_from(block + 1, next_basis, next_offset, found);
        }
    }

    /// Exhaustive oracle: enumerate all of `S` and keep the points in `h`.
    pub fn brute_force_intersect(&self, h: &AffineSpace, cap: u128) -> Result<Vec<Vec<u64>>, SesError> {
        let q = self.field.modulus() as u128;
        let n1 = self.input_len();
        let total = q
            .checked_pow(n1 as u32)
            .filter(|&t| t <= cap)
            .ok_or(SesError::Scale(q.saturating_pow(n1 as u32)))?;
        let mut out = Vec::new();
        let mut input = vec![0u64; n1];
        for mut idx in 0..total {
            for c in input.iter_mut() {
                *c = (idx % q) as u64;
                idx /= q;
            }
            let s = self.encode(&input)?;
            if h.contains(&self.field, &s) {
                out.push(s);
            }
        }
        out.sort();
        Ok(out)
    }
}

fn invert(f: &PrimeField, m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut aug = Matrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.get(r, c));
        }
        aug.set(r, n + r, 1);
    }
    let pivots = aug.rref_in_place(f, n);
    assert_eq!(pivots.len(), n, "matrix is singular");
    let cols: Vec<usize> = (n..2 * n).collect();
    aug.select_columns(&cols)
}
