use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two classes: contract errors (bad input, wrong
/// dimensions) and assertion failures (a numerical check that should hold
/// did not). The CLI maps the former to exit code 1 and the latter to 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site count n = {n} is below the minimum of {min}")]
    TooFewSites { n: usize, min: usize },

    #[error("site count n = {n} exceeds the cap of {cap}")]
    AboveCap { n: usize, cap: usize },

    #[error("leader site {leader} is outside 1..={n}")]
    LeaderOutOfRange { leader: usize, n: usize },

    #[error("sign must be +1 or -1, got {0}")]
    InvalidSign(i32),

    #[error("dimension mismatch: expected n = {expected}, got n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Bloch vector ({0}, {1}, {2}) does not have unit norm")]
    NonUnitVector(f64, f64, f64),

    #[error("outcome values must be +1 or -1, got {0}")]
    NonDichotomic(i32),

    #[error("structure unknown: expression does not have the paired-CHSH shape")]
    StructureUnknown,

    #[error("malformed expression: {0}")]
    MalformedExpression(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("n-tangle requires an even qubit count, got n = {0}")]
    OddTangle(usize),

    #[error("empty grid")]
    EmptyGrid,

    #[error("restarts must be at least 1")]
    NoRestarts,

    #[error("operator is not Hermitian (max imaginary coefficient {0:e})")]
    NonHermitian(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("correlator imaginary residue {0:e} exceeds 1e-10")]
    ImaginaryResidue(f64),

    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("state is not an eigenvector (residual {0:e})")]
    NotEigenvector(f64),

    #[error(
        "sign calibration failed for n = {n}: +1 gives {plus}, -1 gives {minus}, expected {target}"
    )]
    CalibrationFailed {
        n: usize,
        plus: f64,
        minus: f64,
        target: f64,
    },
}

impl Error {
    /// True for failures of internal numerical checks, as opposed to bad input.
    pub fn is_assertion(&self) -> bool {
        matches!(
            self,
            Error::ImaginaryResidue(_)
                | Error::NoConvergence(_)
                | Error::NotEigenvector(_)
                | Error::CalibrationFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
