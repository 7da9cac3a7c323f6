use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("size mismatch: expected {expected} samples, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("{what} must be non-negative, got {value}")]
    NegativeArgument { what: &'static str, value: f64 },

    #[error("non-positive density {value} at sample {index}")]
    NonPositiveDensity { index: usize, value: f64 },

    #[error("non-positive specific volume {value} at sample {index}")]
    NonPositiveVolume { index: usize, value: f64 },

    #[error("CFL number {courant:.4} exceeds limit {limit}")]
    Cfl { courant: f64, limit: f64 },

    #[error("degenerate flow map: Jacobian {min_jacobian:e} below {threshold:e}")]
    DegenerateMap { min_jacobian: f64, threshold: f64 },

    #[error("momentum solve did not converge in {iterations} inner iterations (update {update:e})")]
    InnerNotConverged { iterations: usize, update: f64 },

    #[error("Picard iteration diverged after {iterations} iterations; reduce dt")]
    PicardDiverged { iterations: usize, ratios: Vec<f64> },

    #[error("Picard iteration did not reach tolerance in {iterations} iterations (last update {update:e})")]
    PicardNotConverged { iterations: usize, update: f64 },

    #[error("invariant violated: {what} = {value:e}")]
    InvariantViolated { what: &'static str, value: f64 },

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),
}
