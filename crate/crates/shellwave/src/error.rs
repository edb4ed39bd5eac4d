use thiserror::Error;

/// Every failure the library can report. Variants carry enough context to
/// print a useful diagnostic; the CLI maps them onto exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {0} lies within tolerance of a pole")]
    Pole(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("frame is not a rotation: {0}")]
    Frame(String),
    #[error("matrix square is not scalar (defect {0:e})")]
    SquareNotScalar(f64),
    #[error("degenerate fiber: {0}")]
    DegenerateFiber(String),
    #[error("scaling map singular at d = {0}")]
    ScalingSingular(f64),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("critical target coupling (|d~| = 4): {0}")]
    CriticalTarget(String),
    #[error("Green's function evaluated at the origin")]
    Origin,
    #[error("fiber kernel evaluated at zero displacement")]
    ZeroDisplacement,
    #[error("operator numerically singular (condition estimate {0:e})")]
    Singular(f64),
    #[error("Schur integral diverges (value {0:e})")]
    DivergentBound(f64),
    #[error("transverse truncation too short: {0}")]
    Truncation(String),
    #[error("rate fit degenerate: {0}")]
    DegenerateFit(String),
    #[error("eps too large for the bracketing argument: {0}")]
    EpsTooLarge(String),
    #[error("zero-mode condition not met (residual {0:e})")]
    ConditionNotMet(f64),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::Singular(_) | Error::DivergentBound(_) | Error::DegenerateFit(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
