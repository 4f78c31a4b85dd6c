use thiserror::Error;

use crate::hopf::Branch;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no Hopf bifurcation: {0}")]
    NoHopf(String),

    #[error("series diverges on the {branch} branch: |eps*omega| = {eps_omega} >= 1")]
    SeriesDivergence { branch: Branch, eps_omega: f64 },

    #[error("polar slow flow is singular at R = {radius}")]
    PolarSingularity { radius: f64 },

    #[error("Newton did not converge after {iterations} iterations (omega = {omega}, T = {delay}, |r| = {residual_norm:e})")]
    Divergence {
        omega: f64,
        delay: f64,
        residual_norm: f64,
        iterations: usize,
    },

    #[error("singular Jacobian at omega = {omega}, T = {delay} (det = {det:e})")]
    SingularJacobian { omega: f64, delay: f64, det: f64 },

    #[error("continuation could not start: {0}")]
    SeedFailure(Box<Error>),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no stability change between T = {t_lo} and T = {t_hi}")]
    NoCrossing { t_lo: f64, t_hi: f64 },

    #[error("ambiguous classification at T = {delay}: {reason}")]
    AmbiguousClassification { delay: f64, reason: String },

    #[error("empty comparison: {0}")]
    EmptyReport(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        Error::Parse {
            line,
            message: err.to_string(),
        }
    }
}
