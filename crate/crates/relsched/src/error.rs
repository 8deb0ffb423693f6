use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("infinite load: job {job} has positive size on dimension {dim} but machine {machine} has zero speed there")]
    InfiniteLoad { job: usize, machine: usize, dim: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty machine list")]
    EmptyMachines,

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("job {0} is unassigned")]
    UnassignedJob(usize),

    #[error("assignment references machine {0} outside the smoothed groups (leftover machines are unusable)")]
    LeftoverMachine(usize),

    #[error("instance too large for exhaustive search: {combinations:.3e} assignments exceed the {guard:.1e} guard")]
    TooLarge { combinations: f64, guard: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NoConvergence { iterations: usize, residual: f64, tolerance: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
