use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace {trace} differs from 1 by more than {tol:.1e}")]
    BadTrace { trace: f64, tol: f64 },

    #[error("operator is not positive (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("non-finite entry in operator")]
    NonFinite,

    #[error("invalid observable decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("degenerate spectrum: eigenvalues {0} and {1} coincide")]
    DegenerateSpectrum(f64, f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("conditioning event has probability {0:.3e}, below the floor")]
    UndefinedConditional(f64),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("grid too small for evolution time: edge mass {edge_mass:.3e} on axis {axis} exceeds {tolerance:.1e}")]
    GridTooSmallForTime { axis: usize, edge_mass: f64, tolerance: f64 },

    #[error("post-selection is empty: pass probability {0:.3e} below floor")]
    EmptyPostSelection(f64),

    #[error("density has zero mass")]
    ZeroMass,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
