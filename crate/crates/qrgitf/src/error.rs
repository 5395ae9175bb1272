use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation requiring a Hermitian matrix received one that is not.
    #[error("matrix is not Hermitian: max |m - m\u{2020}| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// A matrix failed the density-matrix checks (trace one, Hermitian, positive).
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A run parameter (grid, resolution, step list) is unusable.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A structural assumption failed; signals a wrong operator build.
    #[error("structural error: {0}")]
    Structure(String),

    /// Input data cannot be processed (e.g. a non-positive value where a log is taken).
    #[error("data error: {0}")]
    Data(String),

    /// The derivative extremum sits on the grid edge; widen the grid.
    #[error("extremum at grid boundary (grid too narrow): {0}")]
    BoundaryExtremum(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
