use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A derivative of a singular solution was requested exactly at its singular point.
    #[error("derivative of order {order} is unbounded at the singular point x = {x}")]
    SingularPointEvaluation { x: f64, order: u32 },

    #[error("point x = {x} lies outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("a side (left or right limit) is required at mesh node x = {x}")]
    AmbiguousNode { x: f64 },

    #[error("function does not belong to the requested space: {0}")]
    NotInSpace(String),

    #[error("fractional derivative undefined: {0}")]
    FractionalDomain(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("non-finite coefficient after step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error("the space-time q error is undefined for the hyperbolic case d = 0")]
    InvalidForHyperbolic,

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}
