use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the nonlinearity degree n must be at least 1")]
    ZeroDegree,
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },
    #[error("mollifier width {width} is below four grid spacings ({min})")]
    UnresolvedMollifier { width: f64, min: f64 },
    #[error("target distance {target} is below the reachable floor {floor}")]
    TargetBelowFloor { target: f64, floor: f64 },
    #[error("coefficient table for n = {0} failed its recurrence self-check")]
    SelfCheck(u32),
    #[error("quadrature tolerance not met: error estimate {estimate:e} after {subdivisions} subdivisions")]
    Quadrature { estimate: f64, subdivisions: usize },
    #[error("precondition violated: {what} (worst value {worst:e})")]
    Precondition { what: &'static str, worst: f64 },
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("point {x} lies outside the resolved window")]
    OutsideDomain { x: f64 },
}
