use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by instance construction, solvers, and oracles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A facility or user index is outside the instance dimensions.
    IndexOutOfRange,
    /// Instance data violates a structural invariant (negative cost,
    /// nonpositive requirement, negative contribution, shape mismatch).
    InvalidData(&'static str),
    /// Opening every facility does not cover some user, so the instance
    /// cannot be represented.
    InfeasibleInstance,
    /// A single user cannot be covered even by opening every facility.
    InfeasibleUser,
    /// A dual solution violates a facility constraint beyond tolerance, so
    /// it cannot induce core cost shares.
    InfeasibleDual,
    /// Recovery ratio requested against a zero-cost selection.
    ZeroCostSolution,
    /// A zero-cost facility carries positive dual load; no finite scaling
    /// can make the dual feasible.
    ZeroCostOverload,
    /// The LP subroutine reported an unbounded or infeasible program. The
    /// programs built internally are always feasible and bounded, so this
    /// signals a bug or corrupted input.
    UnboundedOrInfeasibleLP,
    /// The scaled requirement exceeds the separation DP table bound.
    ScaleOverflow,
    /// An exact oracle was asked to run above its size cap.
    SizeCapExceeded,
    /// Distance at or below zero with clamping disabled.
    NonpositiveDistance,
    /// A reception rate of 1 yields an infinite contribution.
    RateAtOne,
    /// Generator configuration is invalid or exceeds its scale caps.
    InfeasibleConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfRange => write!(f, "facility or user index out of range"),
            Error::InvalidData(msg) => write!(f, "invalid instance data: {msg}"),
            Error::InfeasibleInstance => write!(f, "instance infeasible even with all facilities open"),
            Error::InfeasibleUser => write!(f, "user cannot be covered by any facility set"),
            Error::InfeasibleDual => write!(f, "dual solution violates a facility constraint"),
            Error::ZeroCostSolution => write!(f, "recovery ratio undefined for a zero-cost selection"),
            Error::ZeroCostOverload => write!(f, "zero-cost facility carries positive dual load"),
            Error::UnboundedOrInfeasibleLP => write!(f, "LP subroutine reported unbounded or infeasible"),
            Error::ScaleOverflow => write!(f, "scaled requirement exceeds separation DP bound"),
            Error::SizeCapExceeded => write!(f, "instance exceeds the exact-oracle size cap"),
            Error::NonpositiveDistance => write!(f, "nonpositive distance with clamping disabled"),
            Error::RateAtOne => write!(f, "reception rate of 1 has no finite log-reliability"),
            Error::InfeasibleConfig(msg) => write!(f, "invalid generator config: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
