use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A multi-index or matrix was requested with zero arity.
    InvalidArity,
    /// Operand shapes do not agree.
    Dimension {
        expected: usize,
        found: usize,
        what: &'static str,
    },
    /// `|k| - |q|` is negative or odd.
    Parity { k_degree: u32, q_degree: u32 },
    /// Input exceeds a desk-scale cap.
    TooLarge {
        what: &'static str,
        limit: usize,
        requested: usize,
    },
    /// Argument outside the domain of the operation.
    Domain(&'static str),
    NotSymmetric { row: usize, col: usize },
    NotPositiveDefinite { pivot: usize },
    Singular,
    /// Coordinate or index outside its valid range.
    OutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArity => write!(f, "arity must be at least 1"),
            Error::Dimension {
                expected,
                found,
                what,
            } => write!(
                f,
                "dimension mismatch in {what}: expected {expected}, found {found}"
            ),
            Error::Parity { k_degree, q_degree } => write!(
                f,
                "|k| = {k_degree} and |q| = {q_degree} must satisfy |q| <= |k| with even difference"
            ),
            Error::TooLarge {
                what,
                limit,
                requested,
            } => write!(f, "{what} too large: {requested} exceeds limit {limit}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NotSymmetric { row, col } => {
                write!(f, "matrix is not symmetric at ({row}, {col})")
            }
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            Error::Singular => write!(f, "matrix is singular"),
            Error::OutOfRange { what, index, bound } => {
                write!(f, "{what} {index} out of range (bound {bound})")
            }
        }
    }
}

impl core::error::Error for Error {}
