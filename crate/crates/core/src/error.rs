use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("slot {slot} out of range for {parties} particles")]
    SlotOutOfRange { slot: usize, parties: usize },

    #[error("a transposition needs two distinct slots, got ({0}, {0})")]
    DegenerateTransposition(usize),

    #[error("singular kinematics at relative momentum {k}: {detail}")]
    SingularKinematics { k: Complex64, detail: String },

    #[error("unsupported boundary family: {0}")]
    UnsupportedFamily(&'static str),

    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),

    #[error("particles {0} and {1} sit at the same position")]
    DegeneratePositions(usize, usize),

    #[error("{0}")]
    Usage(String),
}
