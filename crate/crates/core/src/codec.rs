//! The composed code: pad, AMD-encode over `F_{q^N}`, map into the
//! subspace-evasive set, append uniform randomness and FRS-encode.
//!
//! Decoding list-decodes the FRS word into an affine space, prunes it with
//! the subspace-evasive set and keeps the unique candidate whose AMD tag
//! verifies. Anything else is reported as [`Decoded::Bottom`].

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amd::{AmdError, AmdParams};
use crate::bounds::{agreement_threshold, rate_condition};
use crate::field::{AffineSpace, ExtField, FieldError, PrimeField};
use crate::frs::{FrsCodeword, FrsError, FrsParams};
use crate::ses::{SesError, SesParams};
use crate::wire::{dec_rational, dec_u64, format_rational};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("parameter constraint violated: {0}")]
    Param(String),
    #[error("expected {what} of length {expected}, got {got}")]
    Length { what: &'static str, expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Amd(#[from] AmdError),
    #[error(transparent)]
    Ses(#[from] SesError),
    #[error(transparent)]
    Frs(#[from] FrsError),
}

/// How the write budget is validated at derivation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhoMode {
    /// `rho_w` must lie below the closed-form reliability bound.
    Strict,
    /// The agreement `N - rho_w N` must exceed the list-decoding threshold
    /// of the actual FRS code.
    #[default]
    Permissive,
}

/// User-facing parameter set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    #[serde(with = "dec_u64")]
    pub q: u64,
    #[serde(with = "dec_u64")]
    pub u: u64,
    #[serde(with = "dec_u64")]
    pub v: u64,
    #[serde(rename = "N", alias = "n", with = "dec_u64")]
    pub n: u64,
    #[serde(rename = "R", alias = "rate", with = "dec_rational")]
    pub rate: Rational,
    #[serde(with = "dec_rational")]
    pub rho_r: Rational,
    #[serde(with = "dec_rational")]
    pub rho_w: Rational,
}

impl ParamSpec {
    pub fn new(q: u64, u: u64, v: u64, n: u64, rate: Rational, rho_r: Rational, rho_w: Rational) -> Self {
        ParamSpec { q, u, v, n, rate, rho_r, rho_w }
    }

    /// `q = 241, u = 30, v = 3, N = 8, R = 1/30, rho_r = 1/8, rho_w = 1/2`.
    pub fn desk() -> Self {
        let r = |a: i64, b: i64| Rational::new(a.into(), b.into());
        ParamSpec::new(241, 30, 3, 8, r(1, 30), r(1, 8), r(1, 2))
    }
}

/// Fully derived parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AwtpParams {
    pub spec: ParamSpec,
    pub mode: RhoMode,
    /// `l = ceil(uR)`, the number of AMD message blocks.
    pub blocks: usize,
    pub w: usize,
    /// Number of SES blocks `b = ceil((lN + 2N) / (w - v))`.
    pub b: usize,
    pub n1: usize,
    /// SES output length `n = wb`.
    pub n_ses: usize,
    /// FRS message length `k = n + u rho_r N`.
    pub k: usize,
    /// `uRN`
    pub message_len: usize,
    /// `u rho_r N`
    pub random_len: usize,
    /// `rho_r N`
    pub reads: usize,
    /// `rho_w N`
    pub writes: usize,
}

fn integral(x: &Rational, what: &str) -> Result<usize, CodecError> {
    if !x.is_integer() {
        return Err(CodecError::Param(format!("{what} = {} must be an integer", format_rational(x))));
    }
    x.to_integer()
        .to_usize()
        .ok_or_else(|| CodecError::Param(format!("{what} = {} out of range", format_rational(x))))
}

fn unit_interval(x: &Rational, what: &str) -> Result<(), CodecError> {
    if x < &Rational::zero() || x > &Rational::one() {
        return Err(CodecError::Param(format!("{what} = {} must lie in [0, 1]", format_rational(x))));
    }
    Ok(())
}

impl AwtpParams {
    /// Derives and cross-checks every quantity. Errors name the violated
    /// constraint.
    pub fn derive(spec: &ParamSpec, mode: RhoMode) -> Result<Self, CodecError> {
        let ParamSpec { q, u, v, n, .. } = *spec;
        PrimeField::new(q).map_err(|_| CodecError::Param(format!("q = {q} must be prime")))?;
        if u == 0 || n == 0 {
            return Err(CodecError::Param("u and N must be positive".into()));
        }
        if v < 2 || v > u {
            return Err(CodecError::Param(format!("v = {v} must satisfy 2 <= v <= u = {u}")));
        }
        unit_interval(&spec.rate, "R")?;
        unit_interval(&spec.rho_r, "rho_r")?;
        unit_interval(&spec.rho_w, "rho_w")?;
        if spec.rate.is_zero() {
            return Err(CodecError::Param("R must be positive".into()));
        }
        let nr = Rational::from_integer(n.into());
        let ur = Rational::from_integer(u.into()) * &spec.rate;
        let message_len = integral(&(&ur * &nr), "uRN")?;
        let reads = integral(&(&spec.rho_r * &nr), "rho_r N")?;
        let writes = integral(&(&spec.rho_w * &nr), "rho_w N")?;
        let (u, v, n) = (u as usize, v as usize, n as usize);
        if q <= (n * u) as u64 {
            return Err(CodecError::Param(format!("q = {q} must exceed Nu = {}", n * u)));
        }
        let blocks = ur.ceil().to_integer().to_usize().expect("uR <= u");
        if (blocks as u64 + 2).is_multiple_of(q) {
            return Err(CodecError::Param(format!("l + 2 = {} must not be divisible by q = {q}", blocks + 2)));
        }
        let w = v * v;
        let b = (blocks * n + 2 * n).div_ceil(w - v);
        let n1 = (w - v) * b;
        let n_ses = w * b;
        let random_len = u * reads;
        let k = n_ses + random_len;
        if k > u * n {
            return Err(CodecError::Param(format!(
                "k = n + u rho_r N = {n_ses} + {random_len} = {k} exceeds uN = {}",
                u * n
            )));
        }
        match mode {
            RhoMode::Strict => {
                let max = rate_condition::<Rational>(u as i64, v as i64, &spec.rate, &spec.rho_r);
                if spec.rho_w >= max {
                    return Err(CodecError::Param(format!(
                        "rho_w = {} must be below the reliability bound {}",
                        format_rational(&spec.rho_w),
                        format_rational(&max)
                    )));
                }
            }
            RhoMode::Permissive => {
                let t: Rational = agreement_threshold(n as i64, u as i64, v as i64, k as i64);
                let agreement = Rational::from_integer((n - writes).into());
                if agreement <= t {
                    return Err(CodecError::Param(format!(
                        "agreement N - rho_w N = {} must exceed the list-decoding threshold {}",
                        n - writes,
                        format_rational(&t)
                    )));
                }
            }
        }
        Ok(AwtpParams {
            spec: spec.clone(),
            mode,
            blocks,
            w,
            b,
            n1,
            n_ses,
            k,
            message_len,
            random_len,
            reads,
            writes,
        })
    }

    pub fn q(&self) -> u64 {
        self.spec.q
    }

    pub fn u(&self) -> usize {
        self.spec.u as usize
    }

    pub fn v(&self) -> usize {
        self.spec.v as usize
    }

    pub fn n(&self) -> usize {
        self.spec.n as usize
    }

    /// `uRN / (uN)`; equals `R` by construction.
    pub fn rate(&self) -> Rational {
        crate::bounds::code_rate(self.u() as i64, self.n() as i64, self.message_len as i64)
    }

    /// Length of the AMD codeword over `F_q`: `(l + 2) N`.
    pub fn amd_len(&self) -> usize {
        (self.blocks + 2) * self.n()
    }
}

/// The encoder's randomness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingCoins {
    /// AMD key, mapped to `F_{q^N}` through `phi`.
    #[serde(with = "crate::wire::dec_vec")]
    pub r_amd: Vec<u64>,
    /// Uniform high-order FRS coefficients.
    #[serde(with = "crate::wire::dec_vec")]
    pub a: Vec<u64>,
}

impl EncodingCoins {
    pub fn random<R: rand::Rng + ?Sized>(p: &AwtpParams, rng: &mut R) -> Self {
        let f = PrimeField::new(p.q()).expect("validated");
        EncodingCoins {
            r_amd: (0..p.n()).map(|_| f.random(rng)).collect(),
            a: (0..p.random_len).map(|_| f.random(rng)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoded {
    Message(#[serde(with = "crate::wire::dec_vec")] Vec<u64>),
    Bottom,
}

impl Decoded {
    pub fn message(&self) -> Option<&[u64]> {
        match self {
            Decoded::Message(m) => Some(m),
            Decoded::Bottom => None,
        }
    }
}

/// Intermediate decoder state, exposed for experiments that re-check the
/// list-decoding guarantees per trial.
#[derive(Debug, Clone)]
pub struct DecodeTrace {
    pub outcome: Decoded,
    /// FRS output space over all `k` coefficients.
    pub space: Option<AffineSpace>,
    /// Points of the subspace-evasive set inside the projected space.
    pub candidates: Vec<Vec<u64>>,
    pub accepted: usize,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone)]
pub struct AwtpCode {
    params: AwtpParams,
    field: PrimeField,
    amd: AmdParams,
    ses: SesParams,
    frs: FrsParams,
}

/// Exactly one accepted candidate yields a message; none or several give `Bottom`.
pub fn select_unique<I: IntoIterator<Item = Vec<u64>>>(accepted: I) -> Decoded {
    let mut it = accepted.into_iter();
    match (it.next(), it.next()) {
        (Some(m), None) => Decoded::Message(m),
        _ => Decoded::Bottom,
    }
}

impl AwtpCode {
    pub fn new(params: AwtpParams) -> Result<Self, CodecError> {
        let field = PrimeField::new(params.q())?;
        let ext = ExtField::new(field, params.n())?;
        let amd = AmdParams::new(ext, params.blocks)?;
        let ses = SesParams::setup(field, params.v(), params.n1)?;
        let frs = FrsParams::new(field, params.u(), params.n(), params.k, params.v())?;
        Ok(AwtpCode { params, field, amd, ses, frs })
    }

    pub fn from_spec(spec: &ParamSpec, mode: RhoMode) -> Result<Self, CodecError> {
        Self::new(AwtpParams::derive(spec, mode)?)
    }

    pub fn params(&self) -> &AwtpParams {
        &self.params
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn amd(&self) -> &AmdParams {
        &self.amd
    }

    pub fn ses(&self) -> &SesParams {
        &self.ses
    }

    pub fn frs(&self) -> &FrsParams {
        &self.frs
    }

    /// The SES image `s` of the padded AMD codeword; the first `n` FRS
    /// message coefficients.
    pub fn inner_encode(&self, m: &[u64], r_amd: &[u64]) -> Result<Vec<u64>, CodecError> {
        let p = &self.params;
        if m.len() != p.message_len {
            return Err(CodecError::Length { what: "message", expected: p.message_len, got: m.len() });
        }
        if r_amd.len() != p.n() {
            return Err(CodecError::Length { what: "AMD coins", expected: p.n(), got: r_amd.len() });
        }
        let ext = self.amd.ext();
        let mut x: Vec<u64> = m.iter().map(|&e| self.field.elem(e)).collect();
        x.resize(p.blocks * p.n(), 0);
        let xs = x.chunks(p.n()).map(|c| ext.phi(c)).collect::<Result<Vec<_>, _>>()?;
        let c = self.amd.encode_with(xs, ext.phi(r_amd)?)?;
        let mut padded = c.to_symbols();
        padded.resize(p.n1, 0);
        Ok(self.ses.encode(&padded)?)
    }

    pub fn encode(&self, m: &[u64], coins: &EncodingCoins) -> Result<FrsCodeword, CodecError> {
        let p = &self.params;
        if coins.a.len() != p.random_len {
            return Err(CodecError::Length { what: "FRS coins", expected: p.random_len, got: coins.a.len() });
        }
        let mut coeffs = self.inner_encode(m, &coins.r_amd)?;
        coeffs.extend(coins.a.iter().map(|&e| self.field.elem(e)));
        Ok(self.frs.encode(&coeffs)?)
    }

    pub fn decode(&self, y: &FrsCodeword) -> Decoded {
        self.decode_trace(y).outcome
    }

    /// Inverts one SES candidate and returns the message if every padding
    /// position is zero and the AMD tag verifies.
    fn open_candidate(&self, s: &[u64]) -> Option<Vec<u64>> {
        let p = &self.params;
        let padded = self.ses.inverse(s).ok()?;
        let amd_len = p.amd_len();
        if padded[amd_len..].iter().any(|&x| x != 0) {
            return None;
        }
        let c = self.amd.from_symbols(&padded[..amd_len]).ok()?;
        self.amd.verify(&c)?;
        let x: Vec<u64> = padded[..p.blocks * p.n()].to_vec();
        if x[p.message_len..].iter().any(|&e| e != 0) {
            return None;
        }
        Some(x[..p.message_len].to_vec())
    }

    pub fn decode_trace(&self, y: &FrsCodeword) -> DecodeTrace {
        let bottom = |space, candidates, diag: String| DecodeTrace {
            outcome: Decoded::Bottom,
            space,
            candidates,
            accepted: 0,
            diagnostic: Some(diag),
        };
        let space = match self.frs.list_decode(y) {
            Ok(Some(s)) => s,
            Ok(None) => return bottom(None, Vec::new(), "FRS list is empty".into()),
            Err(e) => return bottom(None, Vec::new(), format!("FRS decoding failed: {e}")),
        };
        let projected = space.project_prefix(&self.field, self.params.n_ses);
        let candidates = match self.ses.intersect(&projected) {
            Ok(c) => c,
            Err(e) => return bottom(Some(space), Vec::new(), format!("SES intersection failed: {e}")),
        };
        let accepted: Vec<Vec<u64>> = candidates.iter().filter_map(|s| self.open_candidate(s)).collect();
        let count = accepted.len();
        let outcome = select_unique(accepted);
        let diagnostic = match count {
            1 => None,
            0 => Some(format!("none of {} candidates passed verification", candidates.len())),
            c => Some(format!("{c} candidates passed verification")),
        };
        DecodeTrace { outcome, space: Some(space), candidates, accepted: count, diagnostic }
    }

    /// Instance failure bound `(l + 1) d_1^v / q^N`.
    pub fn failure_bound(&self) -> Rational {
        let p = &self.params;
        crate::bounds::failure_bound(p.blocks as u64, self.ses.degrees()[0], p.v() as u32, p.q(), p.n() as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn desk_derivation() {
        let p = AwtpParams::derive(&ParamSpec::desk(), RhoMode::Permissive).unwrap();
        assert_eq!(
            (p.blocks, p.w, p.b, p.n1, p.n_ses, p.k, p.message_len, p.random_len, p.reads, p.writes),
            (1, 9, 4, 24, 36, 66, 8, 30, 1, 4)
        );
        assert_eq!(p.rate(), r(1, 30));
    }

    #[test]
    fn desk_fails_strict_mode() {
        let err = AwtpParams::derive(&ParamSpec::desk(), RhoMode::Strict).unwrap_err();
        assert!(err.to_string().contains("219/448"), "{err}");
    }

    #[test]
    fn oversized_k_is_rejected() {
        let spec = ParamSpec::new(37, 4, 2, 8, r(1, 4), r(1, 8), r(0, 1));
        let err = AwtpParams::derive(&spec, RhoMode::Permissive).unwrap_err();
        assert!(err.to_string().contains("52 exceeds uN = 32"), "{err}");
    }

    #[test]
    fn integrality_and_field_checks() {
        let mut spec = ParamSpec::desk();
        spec.rho_r = r(1, 3);
        assert!(AwtpParams::derive(&spec, RhoMode::Permissive).unwrap_err().to_string().contains("rho_r N"));
        let mut spec = ParamSpec::desk();
        spec.q = 240;
        assert!(AwtpParams::derive(&spec, RhoMode::Permissive).unwrap_err().to_string().contains("prime"));
        let mut spec = ParamSpec::desk();
        spec.q = 239;
        assert!(AwtpParams::derive(&spec, RhoMode::Permissive).unwrap_err().to_string().contains("exceed Nu"));
        let mut spec = ParamSpec::desk();
        spec.rho_w = r(5, 8);
        assert!(AwtpParams::derive(&spec, RhoMode::Permissive).unwrap_err().to_string().contains("threshold"));
    }

    #[test]
    fn params_json_uses_decimal_strings() {
        let js = serde_json::to_value(ParamSpec::desk()).unwrap();
        assert_eq!(js["q"], "241");
        assert_eq!(js["R"], "1/30");
        let back: ParamSpec = serde_json::from_value(js).unwrap();
        assert_eq!(back, ParamSpec::desk());
    }

    #[test]
    fn round_trip_and_determinism() {
        let code = AwtpCode::from_spec(&ParamSpec::desk(), RhoMode::Permissive).unwrap();
        let f = *code.field();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let m: Vec<u64> = (0..8).map(|_| f.random(&mut rng)).collect();
            let coins = EncodingCoins::random(code.params(), &mut rng);
            let c = code.encode(&m, &coins).unwrap();
            assert_eq!(c.len(), 8);
            assert!(c.symbols.iter().all(|s| s.len() == 30));
            assert_eq!(code.encode(&m, &coins).unwrap(), c);
            assert_eq!(code.decode(&c), Decoded::Message(m));
        }
    }

    #[test]
    fn corrupted_word_still_decodes() {
        let code = AwtpCode::from_spec(&ParamSpec::desk(), RhoMode::Permissive).unwrap();
        let f = *code.field();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m: Vec<u64> = (0..8).map(|_| f.random(&mut rng)).collect();
        let coins = EncodingCoins::random(code.params(), &mut rng);
        let mut y = code.encode(&m, &coins).unwrap();
        for pos in [1, 3, 4, 6] {
            for x in y.symbols[pos].iter_mut() {
                *x = f.add(*x, f.random_nonzero(&mut rng));
            }
        }
        let t = code.decode_trace(&y);
        assert_eq!(t.outcome, Decoded::Message(m));
        let s = code.inner_encode(t.outcome.message().unwrap(), &coins.r_amd).unwrap();
        assert!(t.candidates.contains(&s));
    }

    #[test]
    fn ambiguity_yields_bottom() {
        assert_eq!(select_unique(vec![vec![1, 2], vec![3, 4]]), Decoded::Bottom);
        assert_eq!(select_unique(Vec::<Vec<u64>>::new()), Decoded::Bottom);
        assert_eq!(select_unique(vec![vec![5]]), Decoded::Message(vec![5]));
    }

    #[test]
    fn two_valid_forged_candidates_give_bottom() {
        // both SES points open to valid AMD codewords, so the decoder must abstain
        let code = AwtpCode::from_spec(&ParamSpec::desk(), RhoMode::Permissive).unwrap();
        let s1 = code.inner_encode(&[1; 8], &[2; 8]).unwrap();
        let s2 = code.inner_encode(&[3; 8], &[4; 8]).unwrap();
        let accepted: Vec<Vec<u64>> = [s1, s2].iter().filter_map(|s| code.open_candidate(s)).collect();
        assert_eq!(accepted.len(), 2);
        assert_eq!(select_unique(accepted), Decoded::Bottom);
    }

    #[test]
    fn nonzero_padding_is_rejected() {
        let code = AwtpCode::from_spec(&ParamSpec::desk(), RhoMode::Permissive).unwrap();
        let s = code.inner_encode(&[7; 8], &[1; 8]).unwrap();
        assert_eq!(code.open_candidate(&s), Some(vec![7; 8]));
        // desk: amd_len = 24 = n1, so padding lives only inside x when uR < l
        let spec = ParamSpec::new(241, 30, 3, 8, r(1, 60), r(1, 8), r(1, 2));
        let code = AwtpCode::from_spec(&spec, RhoMode::Permissive).unwrap();
        assert_eq!(code.params().message_len, 4);
        let ext = code.amd().ext();
        let x = ext.phi(&[1, 1, 1, 1, 0, 0, 0, 9]).unwrap();
        let c = code.amd().encode_with(vec![x], ext.phi(&[5; 8]).unwrap()).unwrap();
        let mut padded = c.to_symbols();
        padded.resize(code.params().n1, 0);
        let s = code.ses().encode(&padded).unwrap();
        assert!(code.open_candidate(&s).is_none());
    }

    #[test]
    fn failure_bound_is_tiny() {
        let code = AwtpCode::from_spec(&ParamSpec::desk(), RhoMode::Permissive).unwrap();
        assert_eq!(code.ses().degrees()[0], 13);
        assert!(code.failure_bound() < r(1, 1_000_000_000_000_000));
    }
}
