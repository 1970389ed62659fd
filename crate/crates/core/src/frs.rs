//! Folded Reed-Solomon code and its linear-algebraic list decoder.
//!
//! A message polynomial `f` of degree `< k` is evaluated at
//! `gamma^0, ..., gamma^(uN - 1)` and the evaluations are grouped `u` at a
//! time into `N` symbols. Decoding interpolates
//! `Q(X, Y_1..Y_v) = A_0(X) + sum A_i(X) Y_i` through the received word and
//! then solves the triangular system `Q(X, f(X), f(gamma X), ...) = 0` for
//! the coefficients of `f`, yielding an affine space of dimension `< v`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{first_null_vector, solve_affine, AffineSpace, FieldError, Matrix, PrimeField};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrsError {
    #[error("invalid FRS parameters: {0}")]
    Param(String),
    #[error("message length {k} exceeds uN = {capacity}; no interpolation degree is feasible")]
    Infeasible { k: usize, capacity: usize },
    #[error("received word has shape {got_n}x{got_u}, expected {n}x{u}")]
    Shape { n: usize, u: usize, got_n: usize, got_u: usize },
    #[error("interpolation nullspace is trivial (counting argument violated)")]
    Internal,
    #[error("interpolation polynomial is degenerate")]
    Degenerate,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrsParams {
    field: PrimeField,
    gamma: u64,
    u: usize,
    n: usize,
    k: usize,
    v: usize,
    /// `gamma^i` for `i < uN`
    points: Vec<u64>,
}

/// `N` symbols of `u` field elements each.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrsCodeword {
    pub symbols: Vec<Vec<u64>>,
}

impl FrsCodeword {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The underlying length-`uN` Reed-Solomon evaluation vector.
    pub fn unfold(&self) -> Vec<u64> {
        self.symbols.iter().flatten().copied().collect()
    }

    /// Symbol-wise sum.
    pub fn add(&self, f: &PrimeField, other: &FrsCodeword) -> FrsCodeword {
        FrsCodeword {
            symbols: self
                .symbols
                .iter()
                .zip(&other.symbols)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect())
                .collect(),
        }
    }

    /// Number of positions where the two words carry equal symbols.
    pub fn agreement(&self, other: &FrsCodeword) -> usize {
        self.symbols.iter().zip(&other.symbols).filter(|(a, b)| a == b).count()
    }
}

/// Interpolation polynomial `A_0(X) + sum_{i=1..v} A_i(X) Y_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationPoly {
    /// `deg A_0 <= D + k - 1`, stored with `D + k` coefficients.
    pub a0: Vec<u64>,
    /// `deg A_i <= D`, each stored with `D + 1` coefficients.
    pub a: Vec<Vec<u64>>,
    pub degree_budget: usize,
}

impl InterpolationPoly {
    pub fn is_zero(&self) -> bool {
        self.a0.iter().chain(self.a.iter().flatten()).all(|&c| c == 0)
    }

    pub fn evaluate(&self, f: &PrimeField, x: u64, ys: &[u64]) -> u64 {
        let mut acc = f.eval_poly(&self.a0, x);
        for (ai, &y) in self.a.iter().zip(ys) {
            acc = f.mul_add(acc, f.eval_poly(ai, x), y);
        }
        acc
    }

    /// Coefficients of `Q(X, g(X), g(gamma X), ..., g(gamma^(v-1) X))`.
    pub fn compose(&self, f: &PrimeField, gamma: u64, g: &[u64]) -> Vec<u64> {
        let mut out = self.a0.clone();
        for (s, ai) in self.a.iter().enumerate() {
            let gs = f.pow(gamma, s as u64);
            let mut scale = 1;
            let shifted: Vec<u64> = g
                .iter()
                .map(|&c| {
                    let v = f.mul(c, scale);
                    scale = f.mul(scale, gs);
                    v
                })
                .collect();
            let prod = crate::field::poly::mul(f, ai, &shifted);
            out = crate::field::poly::add(f, &out, &prod);
        }
        crate::field::poly::trim(&mut out);
        out
    }
}

impl FrsParams {
    /// `gamma` is the smallest primitive root of `F_q`.
    pub fn new(field: PrimeField, u: usize, n: usize, k: usize, v: usize) -> Result<Self, FrsError> {
        if u == 0 || n == 0 {
            return Err(FrsError::Param("u and N must be positive".into()));
        }
        if field.modulus() <= (n * u) as u64 {
            return Err(FrsError::Param(format!(
                "q = {} must exceed Nu = {}",
                field.modulus(),
                n * u
            )));
        }
        if v == 0 || v > u {
            return Err(FrsError::Param(format!("interpolation parameter v = {v} must lie in [1, u = {u}]")));
        }
        if k == 0 {
            return Err(FrsError::Param("message length k must be positive".into()));
        }
        if k > u * n {
            return Err(FrsError::Infeasible { k, capacity: u * n });
        }
        let gamma = field.generator();
        let mut points = Vec::with_capacity(u * n);
        let mut x = 1;
        for _ in 0..u * n {
            points.push(x);
            x = field.mul(x, gamma);
        }
        Ok(FrsParams { field, gamma, u, n, k, v, points })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn v(&self) -> usize {
        self.v
    }

    /// Evaluation points `gamma^0 .. gamma^(uN-1)`.
    pub fn points(&self) -> &[u64] {
        &self.points
    }

    /// Number of interpolation constraints `N (u - v + 1)`.
    pub fn constraint_count(&self) -> usize {
        self.n * (self.u - self.v + 1)
    }

    pub fn encode(&self, coeffs: &[u64]) -> Result<FrsCodeword, FrsError> {
        if coeffs.len() != self.k {
            return Err(FieldError::LengthMismatch { expected: self.k, got: coeffs.len() }.into());
        }
        let evals: Vec<u64> = self.points.iter().map(|&x| self.field.eval_poly(coeffs, x)).collect();
        Ok(FrsCodeword {
            symbols: evals.chunks(self.u).map(<[u64]>::to_vec).collect(),
        })
    }

    /// Smallest `D >= 0` with `(v + 1) D + v + k > N (u - v + 1)`, so the
    /// interpolation system has more unknowns than constraints.
    pub fn choose_degree_budget(&self) -> Result<usize, FrsError> {
        degree_budget(self.n, self.u, self.v, self.k)
    }

    /// Agreement needed for the list-decoding guarantee,
    /// `N (1/(v+1) + v/(v+1) * (k/N)/(u-v+1))`.
    pub fn agreement_threshold(&self) -> Rational {
        crate::bounds::agreement_threshold::<Rational>(self.n as i64, self.u as i64, self.v as i64, self.k as i64)
    }

    fn check_shape(&self, y: &FrsCodeword) -> Result<(), FrsError> {
        let bad_u = y.symbols.iter().find(|s| s.len() != self.u).map(Vec::len);
        if y.len() != self.n || bad_u.is_some() {
            return Err(FrsError::Shape {
                n: self.n,
                u: self.u,
                got_n: y.len(),
                got_u: bad_u.unwrap_or(self.u),
            });
        }
        Ok(())
    }

    /// Finds a nonzero interpolation polynomial vanishing on all
    /// `(gamma^(ju+t), y_{j,t}, ..., y_{j,t+v-1})`, `t = 0..=u-v`.
    pub fn interpolate(&self, y: &FrsCodeword, budget: usize) -> Result<InterpolationPoly, FrsError> {
        self.check_shape(y)?;
        let f = &self.field;
        let (u, v, k) = (self.u, self.v, self.k);
        let a0_len = budget + k;
        let ai_len = budget + 1;
        let cols = a0_len + v * ai_len;
        let mut m = Matrix::zeros(self.constraint_count(), cols);
        let mut row = 0;
        for (j, sym) in y.symbols.iter().enumerate() {
            for t in 0..=u - v {
                let x = self.points[j * u + t];
                let mut pw = 1;
                for c in 0..a0_len {
                    m.set(row, c, pw);
                    if c < ai_len {
                        for i in 0..v {
                            m.set(row, a0_len + i * ai_len + c, f.mul(sym[t + i], pw));
                        }
                    }
                    pw = f.mul(pw, x);
                }
                row += 1;
            }
        }
        let sol = first_null_vector(f, m).ok_or(FrsError::Internal)?;
        let a0 = sol[..a0_len].to_vec();
        let a = (0..v)
            .map(|i| sol[a0_len + i * ai_len..a0_len + (i + 1) * ai_len].to_vec())
            .collect();
        Ok(InterpolationPoly { a0, a, degree_budget: budget })
    }

    /// Solves `Q(X, f(X), ..., f(gamma^(v-1) X)) = 0` on the coefficients of
    /// `X^0 .. X^(k-1)` by forward substitution. Diagonal zeros introduce
    /// free parameters and turn their row into a constraint on earlier ones.
    pub fn solve_message_space(&self, q: &InterpolationPoly) -> Result<Option<AffineSpace>, FrsError> {
        let f = &self.field;
        let (k, v) = (self.k, self.v);
        if q.is_zero() {
            return Err(FrsError::Degenerate);
        }
        // strip the common power of X shared by every A_i
        let low = |p: &[u64]| p.iter().position(|&c| c != 0);
        let shift = std::iter::once(&q.a0)
            .chain(&q.a)
            .filter_map(|p| low(p))
            .min()
            .expect("nonzero polynomial");
        let coef = |p: &[u64], j: usize| p.get(j + shift).copied().unwrap_or(0);

        // B_s(Y) = sum_i a_{i,s} Y^(i-1) evaluated at gamma^j
        let b_poly = |s: usize| -> Vec<u64> { q.a.iter().map(|ai| coef(ai, s)).collect() };
        let b_polys: Vec<Vec<u64>> = (0..k).map(b_poly).collect();
        if b_polys[0].iter().all(|&c| c == 0) {
            return Err(FrsError::Degenerate);
        }
        let diag: Vec<u64> = (0..k).map(|r| f.eval_poly(&b_polys[0], self.points[r])).collect();
        let params = diag.iter().filter(|&&d| d == 0).count();
        debug_assert!(params < v, "B_0 has at most v - 1 roots");

        // each f_j is an affine form [const, p_1, .., p_params]
        let width = params + 1;
        let mut forms: Vec<Vec<u64>> = Vec::with_capacity(k);
        let mut constraints: Vec<Vec<u64>> = Vec::new();
        let mut next_param = 0;
        for r in 0..k {
            let mut acc = vec![0u64; width];
            acc[0] = coef(&q.a0, r);
            for (j, form) in forms.iter().enumerate() {
                let c = f.eval_poly(&b_polys[r - j], self.points[j]);
                if c == 0 {
                    continue;
                }
                for (a, &b) in acc.iter_mut().zip(form) {
                    *a = f.mul_add(*a, c, b);
                }
            }
            if diag[r] != 0 {
                let scale = f.neg(f.inv(diag[r])?);
                forms.push(acc.iter().map(|&a| f.mul(a, scale)).collect());
            } else {
                next_param += 1;
                let mut form = vec![0u64; width];
                form[next_param] = 1;
                forms.push(form);
                constraints.push(acc);
            }
        }

        // constraints: C p = -c0
        let linear_part = |rows: &[Vec<u64>]| {
            let mut m = Matrix::zeros(rows.len(), params);
            for (r, form) in rows.iter().enumerate() {
                for (c, &x) in form[1..].iter().enumerate() {
                    m.set(r, c, x);
                }
            }
            m
        };
        let rhs: Vec<u64> = constraints.iter().map(|c| f.neg(c[0])).collect();
        let Some(pspace) = solve_affine(f, &linear_part(&constraints), &rhs)? else {
            return Ok(None);
        };
        let fmat = linear_part(&forms);
        let base: Vec<u64> = forms.iter().map(|c| c[0]).collect();
        let spanning = fmat.mul(f, pspace.basis());
        let shift_vec = fmat.mul_vec(f, pspace.offset());
        let offset = base.iter().zip(&shift_vec).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Some(AffineSpace::new(f, &spanning, offset)?))
    }

    /// Interpolate then solve; `None` when no polynomial satisfies the
    /// recovered identity.
    pub fn list_decode(&self, y: &FrsCodeword) -> Result<Option<AffineSpace>, FrsError> {
        let budget = self.choose_degree_budget()?;
        let q = self.interpolate(y, budget)?;
        self.solve_message_space(&q)
    }
}

/// Smallest `D >= 0` with `(v + 1) D + v + k > N (u - v + 1)`.
pub fn degree_budget(n: usize, u: usize, v: usize, k: usize) -> Result<usize, FrsError> {
    if k > u * n {
        return Err(FrsError::Infeasible { k, capacity: u * n });
    }
    let n0 = n * (u - v + 1);
    let unknowns = |d: usize| (v + 1) * d + v + k;
    let d = if unknowns(0) > n0 { 0 } else { (n0 - v - k) / (v + 1) + 1 };
    debug_assert!(unknowns(d) > n0 && (d == 0 || unknowns(d - 1) <= n0));
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn desk() -> FrsParams {
        FrsParams::new(PrimeField::new(241).unwrap(), 30, 8, 66, 3).unwrap()
    }

    #[test]
    fn encode_identity_polynomial() {
        let p = FrsParams::new(PrimeField::new(7).unwrap(), 2, 3, 2, 1).unwrap();
        assert_eq!(p.gamma(), 3);
        let c = p.encode(&[0, 1]).unwrap();
        // 3^0..3^5 mod 7 = 1,3,2,6,4,5
        assert_eq!(c.symbols, vec![vec![1, 3], vec![2, 6], vec![4, 5]]);
        assert_eq!(c.unfold(), vec![1, 3, 2, 6, 4, 5]);
    }

    #[test]
    fn encode_constant() {
        let p = FrsParams::new(PrimeField::new(13).unwrap(), 3, 4, 1, 2).unwrap();
        let c = p.encode(&[9]).unwrap();
        assert!(c.symbols.iter().flatten().all(|&x| x == 9));
    }

    #[test]
    fn rejects_small_field() {
        assert!(matches!(
            FrsParams::new(PrimeField::new(7).unwrap(), 2, 4, 2, 1),
            Err(FrsError::Param(_))
        ));
        assert!(matches!(
            FrsParams::new(PrimeField::new(241).unwrap(), 30, 8, 241, 3),
            Err(FrsError::Infeasible { .. })
        ));
    }

    #[test]
    fn degree_budget_desk() {
        // n0 = 8 * 28 = 224; 4*39 + 3 + 66 = 225 > 224 while 4*38 + 69 = 221
        assert_eq!(degree_budget(8, 30, 3, 66).unwrap(), 39);
        assert_eq!(desk().constraint_count(), 224);
        assert!(matches!(degree_budget(8, 30, 3, 241), Err(FrsError::Infeasible { .. })));
        assert_eq!(degree_budget(1, 4, 2, 4).unwrap(), 0);
    }

    #[test]
    fn interpolation_composes_to_zero_on_clean_word() {
        let p = desk();
        let f = *p.field();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let msg: Vec<u64> = (0..66).map(|_| f.random(&mut rng)).collect();
        let c = p.encode(&msg).unwrap();
        let q = p.interpolate(&c, p.choose_degree_budget().unwrap()).unwrap();
        assert!(!q.is_zero());
        assert!(q.compose(&f, p.gamma(), &msg).is_empty());
    }

    #[test]
    fn zero_word_interpolation_vanishes() {
        let p = desk();
        let f = *p.field();
        let zero = FrsCodeword { symbols: vec![vec![0; 30]; 8] };
        let q = p.interpolate(&zero, 39).unwrap();
        for j in 0..8 {
            for t in 0..=27 {
                assert_eq!(q.evaluate(&f, p.points()[j * 30 + t], &[0, 0, 0]), 0);
            }
        }
    }

    #[test]
    fn interpolation_vanishes_on_corrupted_points() {
        let p = desk();
        let f = *p.field();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = FrsCodeword {
            symbols: (0..8).map(|_| (0..30).map(|_| f.random(&mut rng)).collect()).collect(),
        };
        let q = p.interpolate(&y, 39).unwrap();
        for (j, sym) in y.symbols.iter().enumerate() {
            for t in 0..=27 {
                assert_eq!(q.evaluate(&f, p.points()[j * 30 + t], &sym[t..t + 3]), 0);
            }
        }
    }

    #[test]
    fn clean_word_decodes_to_space_containing_message() {
        let p = desk();
        let f = *p.field();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let msg: Vec<u64> = (0..66).map(|_| f.random(&mut rng)).collect();
            let space = p.list_decode(&p.encode(&msg).unwrap()).unwrap().unwrap();
            assert!(space.dim() <= 2);
            assert!(space.contains(&f, &msg));
        }
    }

    #[test]
    fn decodes_four_corrupted_symbols() {
        let p = desk();
        let f = *p.field();
        assert!(p.agreement_threshold() < Rational::from_integer(4.into()));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let msg: Vec<u64> = (0..66).map(|_| f.random(&mut rng)).collect();
            let mut y = p.encode(&msg).unwrap();
            let mut positions: Vec<usize> = (0..8).collect();
            for i in 0..4 {
                let j = rng.random_range(i..8);
                positions.swap(i, j);
            }
            for &pos in &positions[..4] {
                for x in y.symbols[pos].iter_mut() {
                    *x = f.random(&mut rng);
                }
            }
            let space = p.list_decode(&y).unwrap().unwrap();
            assert!(space.dim() <= 2);
            assert!(space.contains(&f, &msg));
        }
    }

    #[test]
    fn nonvanishing_b0_gives_unique_solution() {
        // B_0 = constant nonzero: every diagonal entry is nonzero
        let p = FrsParams::new(PrimeField::new(13).unwrap(), 3, 4, 4, 2).unwrap();
        let q = InterpolationPoly { a0: vec![1, 2, 3, 4, 0, 0], a: vec![vec![1, 0, 0], vec![0, 0, 0]], degree_budget: 2 };
        let s = p.solve_message_space(&q).unwrap().unwrap();
        assert_eq!(s.dim(), 0);
        // A_0 + f = 0  =>  f = -A_0 on the first k coefficients
        assert_eq!(s.offset(), &[12, 11, 10, 9]);
    }

    #[test]
    fn common_power_of_x_is_stripped() {
        let p = FrsParams::new(PrimeField::new(13).unwrap(), 3, 4, 3, 2).unwrap();
        // Q = X * (A_0 + Y_1) with A_0 = 5 + X: f = -(5 + X)
        let q = InterpolationPoly { a0: vec![0, 5, 1, 0, 0], a: vec![vec![0, 1, 0], vec![0, 0, 0]], degree_budget: 2 };
        let s = p.solve_message_space(&q).unwrap().unwrap();
        assert_eq!(s.offset(), &[8, 12, 0]);
        let zero = InterpolationPoly { a0: vec![0; 5], a: vec![vec![0; 3]; 2], degree_budget: 2 };
        assert_eq!(p.solve_message_space(&zero), Err(FrsError::Degenerate));
    }

    #[test]
    fn diagonal_zero_introduces_parameter() {
        // B_0(Y) = Y - 1 vanishes at gamma^0 = 1, so f_0 is free
        let p = FrsParams::new(PrimeField::new(13).unwrap(), 3, 4, 3, 2).unwrap();
        let q = InterpolationPoly {
            a0: vec![0, 0, 0, 0, 0],
            a: vec![vec![12, 0, 0], vec![1, 0, 0]],
            degree_budget: 2,
        };
        // Q = -f(X) + f(gamma X): coefficient r gives f_r (gamma^r - 1) = 0
        let s = p.solve_message_space(&q).unwrap().unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.contains(p.field(), &[7, 0, 0]));
        assert!(!s.contains(p.field(), &[7, 1, 0]));
    }
}
