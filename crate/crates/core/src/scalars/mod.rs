//! Exact coefficient arithmetic.
//!
//! The coefficient tower is built in three layers: arbitrary-precision
//! rationals ([`Rational`]), Gaussian rationals ([`GaussRational`], carrying
//! the imaginary unit `i`), and sparse Laurent polynomials over those in a set
//! of named parameters with adjoined square roots ([`Scalar`] over a
//! [`ParameterRing`]).
//!
//! Every value is kept in a reduced normal form, so structural equality is
//! mathematical equality. Nothing in here uses floating point.

mod gauss;
mod modp;
mod ring;
mod scalar;

pub use gauss::GaussRational;
pub use modp::{inv_mod, pow_mod, rational_mod_p, FieldSpec};
pub use ring::{ParameterRing, RootRelation};
pub use scalar::{Monomial, Scalar};

use thiserror::Error;

/// Arbitrary-precision rational number with positive, reduced denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("scalars live over different parameter rings")]
    RingMismatch,
    #[error("symbol `{0}` is not declared in the parameter ring")]
    UnknownSymbol(String),
    #[error("invalid parameter ring: {0}")]
    InvalidRing(String),
    #[error("value substituted for root `{symbol}` does not square to its relation target")]
    InconsistentRoot { symbol: String },
    #[error("`{0}` is not invertible")]
    NotInvertible(String),
    #[error("denominator divisible by the characteristic {prime}")]
    Characteristic { prime: u64 },
    #[error("{residue} is not a square root of -1 modulo {prime}")]
    InvalidI { residue: u64, prime: u64 },
    #[error("no residue for i was supplied for F_{prime}")]
    MissingI { prime: u64 },
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("symbol `{0}` has no assigned residue")]
    IncompleteAssignment(String),
    #[error("residue assigned to root `{symbol}` does not square to its relation target")]
    InvalidRootResidue { symbol: String },
    #[error("{0}")]
    Parse(String),
}
