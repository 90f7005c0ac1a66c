use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("step size too large: {0}")]
    StepSize(String),

    #[error("stability condition violated: h*max(M[A], M[F]) = {value} exceeds {limit}")]
    Stability { value: f64, limit: f64 },

    #[error("nonlinear solve failed at grid point ({i}, {j}): {detail}")]
    PointSolve { i: usize, j: usize, detail: String },

    #[error("iteration did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("non-finite value detected: {0}")]
    NonFinite(String),

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate measurement: {0}")]
    Degenerate(String),

    #[error("oracle restricted to grids with n <= {max}, got n = {n}")]
    OracleScale { n: usize, max: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
