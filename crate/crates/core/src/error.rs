use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Validation,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible domains: {0}")]
    IncompatibleDomain(String),

    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shift rejected: {0}")]
    ShiftRejected(String),

    #[error("shift does not match a zero: {0}")]
    ShiftMismatch(String),

    #[error("overflow in cell {cell} at z = {z}")]
    Overflow { cell: usize, z: String },

    #[error("range error: {0}")]
    Range(String),

    #[error("division by vanishing Jost function at z = {0}")]
    Division(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("undersampled: {0}")]
    Undersampled(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("zero on contour: {0}")]
    BoundaryZero(String),

    #[error("contour integral not resolved: {0}")]
    Contour(String),

    #[error("unresolved cell: {0}")]
    UnresolvedCell(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("series did not converge: {0}")]
    Convergence(String),

    #[error("coverage: {0}")]
    Coverage(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) | Error::Format(_) => ErrorClass::Io,
            Error::IncompatibleDomain(_)
            | Error::IncompatibleGrid(_)
            | Error::InvalidInput(_)
            | Error::Domain(_)
            | Error::ShiftRejected(_)
            | Error::ShiftMismatch(_)
            | Error::Coverage(_) => ErrorClass::Validation,
            _ => ErrorClass::Numerical,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
