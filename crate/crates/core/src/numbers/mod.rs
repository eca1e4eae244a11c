//! Exact arithmetic for the ring ℚ + ℚα and for countable affine groups
//! Γ ⊂ Aff(ℝⁿ).
//!
//! α is a formal irrational symbol. Ring values are never multiplied by
//! each other, only added and scaled by rationals, so ℚ + ℚα is closed under
//! everything this crate does with it. Equality is exact: since α is
//! irrational, `p + qα = 0` iff `p = q = 0`. Order comparisons need a numeric
//! value of α and go through an [`AlphaWitness`].

mod affine;
mod group;
mod qalpha;
mod witness;

pub use affine::AffineElement;
pub use group::{
    EnumerationLimits, GroupKind, GroupPresentation, Membership, OrbitSearch, DEFAULT_BOUND_CAP,
};
pub use qalpha::{parse_rational, rational, QAlpha, Rational};
pub use witness::{AlphaWitness, GOLDEN_CONJUGATE_DIGITS};

use thiserror::Error;

/// Errors raised by exact arithmetic and group enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("dimension-mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("precision-insufficient: value is within the safety margin of zero")]
    PrecisionInsufficient,
    #[error("unbounded-request: bound {bound} exceeds cap {cap}")]
    UnboundedRequest { bound: u64, cap: u64 },
    #[error("singular linear part: affine elements need det(A) != 0")]
    Singular,
    #[error("finite group is not closed: {0}")]
    NotClosed(String),
    #[error("witness precision ({digits} digits) does not exceed the safety margin")]
    WitnessTooCoarse { digits: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
