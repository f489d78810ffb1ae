use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("grid mismatch: {left} cells vs {right} cells")]
    GridMismatch { left: usize, right: usize },
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("contraction index {index} out of range for orders {left} and {right}")]
    ContractionRange {
        index: usize,
        left: usize,
        right: usize,
    },
    #[error("kernel of order {order} on {cells} cells exceeds the dense size limit")]
    KernelTooLarge { order: usize, cells: usize },
    #[error("chaos order {order} exceeds the limit {limit}")]
    OrderTooLarge { order: usize, limit: usize },
    #[error("value array has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value")]
    NonFinite,
    #[error("kernel is not symmetric (deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },
    #[error("expansion is not centered (expectation slot {mean})")]
    NotCentered { mean: f64 },
    #[error("expansion is not concentrated in a single chaos")]
    NotSingleChaos,
    #[error("zero variance")]
    ZeroVariance,
    #[error("argument {value} outside the numeric guard {limit}")]
    OutOfGuard { value: f64, limit: f64 },
    #[error("empty sample")]
    EmptySample,
    #[error("samples are degenerate (all equal)")]
    DegenerateSample,
}
