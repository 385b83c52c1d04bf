use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not a positive contraction (eigenvalue {eigenvalue:.6e} outside [0, 1])")]
    NotContraction { eigenvalue: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("eigensolver did not converge (reconstruction residual {residual:.3e})")]
    EigenFailed { residual: f64 },

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("minimizer did not converge after {iterations} iterations (best value {best:.6e}, gradient norm {gradient_norm:.3e})")]
    MinimizerFailed {
        iterations: usize,
        best: f64,
        gradient_norm: f64,
    },

    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),

    #[error("basis mismatch between forms")]
    BasisMismatch,

    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),

    #[error("algebra mismatch: blocks {left:?} vs {right:?}")]
    AlgebraMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
}

impl Error {
    /// Errors caused by bad inputs, as opposed to a numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NonFinite { .. }
                | Error::EigenFailed { .. }
                | Error::SvdFailed
                | Error::MinimizerFailed { .. }
        )
    }
}
