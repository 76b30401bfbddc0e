use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point ({0}, {1}) lies outside the mesh")]
    OutOfDomain(f64, f64),

    #[error("time {t} lies outside the slab [{start}, {end}]")]
    OutsideSlab { t: f64, start: f64, end: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("linear solver failed: {message} (relative residual {residual:e})")]
    SolverFailure { message: String, residual: f64 },

    #[error("slab {slab}: {source}")]
    Slab {
        slab: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
