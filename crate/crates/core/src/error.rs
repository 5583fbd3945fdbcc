use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} is not a power of two (need N + 1 samples with N = 2^k, N >= 2)")]
    Sizing(usize),

    #[error("parity mismatch: {0}")]
    Parity(&'static str),

    #[error("blow-up at t = {t}: |v| exceeded {threshold:e} at x = {x}")]
    BlowUp { t: f64, x: f64, threshold: f64 },

    #[error("decay-rate estimation failed: {0}")]
    EstimationFailed(String),

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("no branch: alpha = {alpha} >= 2/j^2 = {threshold} for j = {j}")]
    NoBranch { alpha: f64, j: u32, threshold: f64 },

    #[error("accuracy check failed: {what} = {value:e} at x = {x} (limit {limit:e})")]
    Accuracy {
        what: &'static str,
        value: f64,
        x: f64,
        limit: f64,
    },

    #[error("unresolved spectrum: negative counts {coarse} (n = {n_coarse}) vs {fine} (n = {n_fine})")]
    UnresolvedSpectrum {
        coarse: usize,
        fine: usize,
        n_coarse: usize,
        n_fine: usize,
    },

    #[error("property violation: {0}")]
    PropertyViolation(String),

    #[error("identity violation: {what} residual {value:e} at x = {x}")]
    IdentityViolation { what: &'static str, value: f64, x: f64 },

    #[error("truncation error: tail mass {tail:e} beyond |q| = {q_max} (increase the charge cutoff)")]
    Truncation { tail: f64, q_max: usize },

    #[error("Poisson resummation mismatch {0:e} (insufficient terms)")]
    Resummation(f64),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
