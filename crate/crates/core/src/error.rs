use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument fell outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    NotHermitian { row: usize, col: usize, deviation: f64 },
    DimensionMismatch { expected: usize, found: usize },
    /// The Jacobi sweep cap was reached before the off-diagonal norm converged.
    NoConvergence { sweeps: usize, off_norm: f64 },
    NotPositive { eigenvalue: f64 },
    TraceNotUnit { trace: f64 },
    /// A structural invariant of a value was violated; `field` names the part.
    Invalid { field: String, reason: String },
    BoundNotApplicable { noise: f64 },
    NoPositiveRate,
    NoSignChange { limit: f64 },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid { field: field.into(), reason: reason.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of range: {value}"),
            Error::NotHermitian { row, col, deviation } => {
                write!(f, "matrix is not Hermitian at ({row}, {col}): deviation {deviation:e}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NoConvergence { sweeps, off_norm } => {
                write!(f, "eigenvalue iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")
            }
            Error::NotPositive { eigenvalue } => {
                write!(f, "operator is not positive semidefinite: eigenvalue {eigenvalue:e}")
            }
            Error::TraceNotUnit { trace } => write!(f, "trace {trace} differs from 1"),
            Error::Invalid { field, reason } => write!(f, "invalid {field}: {reason}"),
            Error::BoundNotApplicable { noise } => {
                write!(f, "bound not applicable at noise {noise}")
            }
            Error::NoPositiveRate => write!(f, "key rate is not positive at zero noise"),
            Error::NoSignChange { limit } => {
                write!(f, "key rate has no sign change below the noise limit {limit}")
            }
        }
    }
}

impl core::error::Error for Error {}
