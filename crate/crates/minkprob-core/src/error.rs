use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point or vector is outside the domain of the operation.
    Domain(String),
    /// Malformed or inconsistent input data.
    Validation(String),
    /// An iterative method stopped before reaching its tolerance.
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },
    /// The input function is not convex and must be convexified first.
    NotConvex,
    /// The operation does not apply to the given input.
    Inapplicable(String),
    /// Orbit depth too small to close a fundamental polygon.
    IncreaseDepth(usize),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Validation(m) => write!(f, "invalid input: {m}"),
            Error::NonConvergence {
                what,
                iterations,
                residual,
            } => write!(
                f,
                "{what} did not converge after {iterations} iterations (residual {residual:.3e})"
            ),
            Error::NotConvex => write!(f, "function is not convex; convexify it first"),
            Error::Inapplicable(m) => write!(f, "inapplicable: {m}"),
            Error::IncreaseDepth(d) => {
                write!(f, "fundamental polygon not closed at depth {d}; increase depth")
            }
        }
    }
}
