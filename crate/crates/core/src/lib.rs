//! Greedy β-expansions with deleted digits for the golden ratio and digit
//! set `{0, 2, 3}`.
//!
//! The crate provides exact arithmetic in `Q(β)` ([`qbeta`]), the greedy
//! maps and digit generation ([`greedy`]), fundamental intervals of the
//! golden map ([`cylinders`]), the two natural-extension models
//! ([`natext`]) and the invariant density together with its independent
//! checks ([`measure`]). [`verify`] bundles everything into a named check
//! suite and [`plotdata`] renders plain-text columns for plotting.

#![forbid(unsafe_code)]

pub mod cylinders;
pub mod greedy;
pub mod interval;
pub mod measure;
pub mod natext;
pub mod plotdata;
pub mod qbeta;
pub mod verify;

pub use cylinders::{Cylinder, Family, SubblockDecomposition};
pub use greedy::{DigitSet, GoldenDigit, GreedyOrbit};
pub use interval::Interval;
pub use measure::PiecewiseDensity;
pub use natext::{RState, Rect, Row, TowerPoint};
pub use qbeta::QBeta;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse {0:?} as an element of Q(beta)")]
    Parse(String),

    #[error("point {point} is outside the domain {domain}")]
    Domain { point: String, domain: String },

    #[error("invalid digit {0}; the alphabet is {{0, 2, 3}}")]
    InvalidDigit(u8),

    #[error("fundamental interval of block {0:?} is empty")]
    EmptyCylinder(String),

    #[error("fundamental interval of block {0:?} is not full")]
    NotFull(String),

    #[error("invalid rectangle index ({tag}, {level})")]
    InvalidIndex { tag: u8, level: u32 },

    #[error("state violates the rectangle invariants: {0}")]
    InvalidState(String),

    #[error("point {0} collides with a density breakpoint; resample")]
    BreakpointCollision(String),

    #[error("invalid digit set: {0}")]
    InvalidDigitSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable short name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "division_by_zero",
            Error::Parse(_) => "parse",
            Error::Domain { .. } => "domain",
            Error::InvalidDigit(_) => "invalid_digit",
            Error::EmptyCylinder(_) => "empty_cylinder",
            Error::NotFull(_) => "not_full",
            Error::InvalidIndex { .. } => "invalid_index",
            Error::InvalidState(_) => "invalid_state",
            Error::BreakpointCollision(_) => "breakpoint_collision",
            Error::InvalidDigitSet(_) => "invalid_digit_set",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
