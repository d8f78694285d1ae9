use thiserror::Error;

/// Every failure the engine can report.
///
/// Variants are grouped by how the command-line front end maps them onto
/// exit codes; see [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("quasideterminant minor is not invertible")]
    SingularSubmatrix,
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("leading coefficient is not invertible")]
    SingularLeadingCoefficient,
    #[error("operator coefficients are not polynomial")]
    NonPolynomialCoefficients,
    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),
    #[error("internal consistency check failed: {0}")]
    InternalMismatch(String),
    #[error("nonzero remainder: the kernel is not contained in the kernel of L")]
    NonzeroRemainder,
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("characteristic polynomial has non-rational roots (remaining factor {0})")]
    IrrationalSpectrum(String),
    #[error("{0} is not an eigenvalue")]
    NotAnEigenvalue(String),
    #[error("kernel element is not annihilated by q(M): {0}")]
    KernelMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for malformed input, 3 for violated
    /// mathematical preconditions, 1 for internal consistency failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Schema(_)
            | Error::UnknownVariable(_)
            | Error::NotSquare { .. }
            | Error::DimensionMismatch(_)
            | Error::ContextMismatch(_)
            | Error::InvalidOperator(_)
            | Error::ZeroDenominator => 2,
            Error::InternalMismatch(_) => 1,
            Error::SingularMatrix
            | Error::SingularSubmatrix
            | Error::SingularLeadingCoefficient
            | Error::NonPolynomialCoefficients
            | Error::DegenerateKernel(_)
            | Error::NonzeroRemainder
            | Error::IrrationalSpectrum(_)
            | Error::NotAnEigenvalue(_)
            | Error::KernelMismatch(_) => 3,
        }
    }

    /// Stable machine-readable tag used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroDenominator => "ZeroDenominator",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::NotSquare { .. } => "NotSquare",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularMatrix => "SingularMatrix",
            Error::SingularSubmatrix => "SingularSubmatrix",
            Error::ContextMismatch(_) => "ContextMismatch",
            Error::SingularLeadingCoefficient => "SingularLeadingCoefficient",
            Error::NonPolynomialCoefficients => "NonPolynomialCoefficients",
            Error::DegenerateKernel(_) => "DegenerateKernel",
            Error::InternalMismatch(_) => "InternalMismatch",
            Error::NonzeroRemainder => "NonzeroRemainder",
            Error::InvalidOperator(_) => "InvalidOperator",
            Error::IrrationalSpectrum(_) => "IrrationalSpectrum",
            Error::NotAnEigenvalue(_) => "NotAnEigenvalue",
            Error::KernelMismatch(_) => "KernelMismatch",
            Error::Parse(_) => "Parse",
            Error::Schema(_) => "Schema",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
