use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("negative power of sinh evaluated at x = 0")]
    SingularPoint,

    #[error("point x = {x} lies outside the domain of a fractional sinh power")]
    OutsideDomain { x: f64 },

    #[error("operator order {order} exceeds the supported maximum {max}")]
    OrderExceeded { order: u32, max: u32 },

    #[error("symbolic and numeric equality tests disagree (symbolic: {symbolic}, numeric: {numeric})")]
    OracleInconclusive { symbolic: bool, numeric: bool },

    #[error("identity `{identity}` leaves a nonzero residual with {terms} terms:\n{dump}")]
    ResidualNonzero { identity: String, terms: usize, dump: String },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("Delta^2 = {radicand} is negative; the structure function has complex roots")]
    ComplexDelta { radicand: String },

    #[error("nu = {nu} and N = {level} have different parity or nu > N")]
    ParityMismatch { nu: u32, level: u32 },

    #[error("R eigenvalues {first} and {second} collide in the degenerate block")]
    DegenerateRSpectrum { first: f64, second: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
