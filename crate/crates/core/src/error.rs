use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("malformed field: {0}")]
    InvalidField(String),

    #[error("infinite gradient energy: {0}")]
    InfiniteEnergy(String),

    /// A layer density with a k = 0 component has no decaying potential.
    #[error("density has a nonzero mean component ({0}); no decaying solution exists")]
    NonzeroMean(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular or ill-conditioned system (condition estimate {condition:.3e}, limit {limit:.1e})")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("truncation at order {order} leaves a tail bound of {tail:.3e}, above tolerance {tolerance:.1e}")]
    Truncation { order: usize, tail: f64, tolerance: f64 },

    #[error("quadrature did not self-converge: {0}")]
    NotConverged(String),
}
