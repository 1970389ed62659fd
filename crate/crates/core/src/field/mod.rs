//! Finite-field primitives shared by every layer of the code.

mod ext;
mod linalg;
pub mod poly;
mod prime;

pub use ext::{ext_arith, find_irreducible, ExtElement, ExtField, ExtOp};
pub use linalg::{first_null_vector, nullspace, solve_affine, AffineSpace, Matrix};
pub use prime::{is_prime, prime_factors, PrimeField};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^63")]
    ModulusTooLarge(u64),
    #[error("modulus polynomial is not monic irreducible")]
    Reducible,
    #[error("operands belong to different extension fields")]
    ContextMismatch,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}
