use std::fmt;

use thiserror::Error;

use crate::birth::Verdict;

/// Where a coin's +1-eigenvector has a vanishing component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteRef {
    Site(i64),
    MinusInfinity,
    PlusInfinity,
}

impl fmt::Display for SiteRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteRef::Site(x) => write!(f, "site {x}"),
            SiteRef::MinusInfinity => f.write_str("the limit coin at -infinity"),
            SiteRef::PlusInfinity => f.write_str("the limit coin at +infinity"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shift parameters: {0}")]
    InvalidShift(String),

    #[error("invalid coin: {0}")]
    InvalidCoin(String),

    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: i64, hi: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("chi_1 * chi_2 vanishes at {0}")]
    ChiComponentVanishes(SiteRef),

    #[error("non-unitary truncation: the evolution operator only supports a periodic boundary")]
    NonUnitaryTruncation,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("wrong operator kind: expected {expected}")]
    WrongKind { expected: &'static str },

    #[error("square root of nonpositive weight: E = {energy} does not exceed sup|V| = {sup_v}")]
    NonPositiveWeight { energy: f64, sup_v: f64 },

    #[error("birth space trivial or inconclusive (verdict {0:?})")]
    BirthNotNontrivial(Verdict),

    #[error("window too small: estimated truncated mass {0:e} exceeds tolerance; use a larger window")]
    WindowTooSmall(f64),

    #[error("decay fit needs at least 8 points per tail, got {0}")]
    TooFewPoints(usize),

    #[error("vanishing amplitude at site {0}; cannot take a logarithm")]
    ZeroAmplitude(i64),

    #[error("not a vanishing perturbation: declared limit coins differ")]
    NotVanishingPerturbation,

    #[error("boundary case: {0}")]
    BoundaryCase(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
