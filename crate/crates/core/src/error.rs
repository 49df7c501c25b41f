use thiserror::Error;

use crate::stone::UnitSpace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unit space mismatch: {0} vs {1}")]
    SpaceMismatch(UnitSpace, UnitSpace),
    #[error("cell {cell} is out of range for {space}")]
    CellOutOfRange { cell: String, space: UnitSpace },
    #[error("invalid unit space: {0}")]
    InvalidSpace(String),
    #[error("malformed generator g{index}: {reason}")]
    MalformedGenerator { index: usize, reason: String },
    #[error("invalid bisection: {0}")]
    InvalidBisection(String),
    #[error("not a subset: {0}")]
    NotSubset(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input does not verify: {0}")]
    Unverified(String),
    #[error("working depth {depth} exceeds cap {cap}")]
    DepthOverflow { depth: usize, cap: usize },
    #[error("not expressible at depth {depth}: {what}")]
    NotExpressible { depth: usize, what: String },
    #[error("operation requires a finite unit space")]
    NotFinite,
    #[error("groupoid is not principal: {0}")]
    NotPrincipal(String),
    #[error("arrow set is infinite or exceeds cap: {0}")]
    Infinite(String),
    #[error("{0}")]
    Parse(String),
}
