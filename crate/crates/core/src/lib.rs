//! Efficient perfectly secure codes for the `(rho_r, rho_w)` adversarial
//! wiretap channel.
//!
//! A message is protected by three nested layers:
//!
//! 1. a systematic algebraic manipulation detection code over `F_{q^N}`
//!    ([`amd`]),
//! 2. an explicit subspace-evasive set that prunes list-decoder output
//!    ([`ses`]),
//! 3. a folded Reed-Solomon code with a linear-algebraic list decoder
//!    ([`frs`]).
//!
//! [`codec`] composes them, [`channel`] simulates the adaptive read/write
//! adversary, [`bounds`] evaluates the closed-form rate and capacity bounds
//! and [`experiment`] runs the verification suites exposed by the `awtp`
//! binary.

pub mod amd;
pub mod bounds;
pub mod channel;
pub mod codec;
pub mod experiment;
pub mod field;
pub mod frs;
pub mod scalar;
pub mod ses;
pub mod wire;

pub use codec::{AwtpCode, AwtpParams, Decoded, EncodingCoins, ParamSpec, RhoMode};
pub use field::{AffineSpace, ExtElement, ExtField, Matrix, PrimeField};
pub use scalar::BoundScalar;

/// Exact rational used by every bound formula that is asserted on.
pub type Rational = num_rational::BigRational;

/// Floating-point scalar for human-readable report columns.
pub type Real = f64;
