use thiserror::Error;

/// Errors raised by curve continuation, quadrature, the period solver and meshing.
///
/// Numeric payloads are reported in `f64` regardless of the working scalar.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("path passes within {clearance:e} of a singular point at ({re}, {im})")]
    PathTooClose { re: f64, im: f64, clearance: f64 },

    #[error("sheet continuation failed: {0}")]
    ContinuationFailed(String),

    #[error("period lattice is degenerate (|det| = {det:e})")]
    DegenerateBasis { det: f64 },

    #[error("flat-coordinate flow could not reach its target: {0}")]
    RerouteFailed(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "quadrature did not reach tolerance: best = ({best_re}, {best_im}), error bound = {bound:e}"
    )]
    QuadratureFailure {
        best_re: f64,
        best_im: f64,
        bound: f64,
    },

    #[error("residue contour is not isolated: {0}")]
    BadContour(String),

    #[error("no root found: {reason}")]
    NoRoot {
        reason: String,
        /// Scanned `(argument, residual)` pairs, when a scan was performed.
        table: Vec<(f64, f64)>,
    },

    #[error("solution left the real axis: |Im| = {imag:e}")]
    RealityViolation { imag: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("mesh error: {0}")]
    Mesh(String),
}

impl Error {
    /// Wraps the error with the solver stage that produced it.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for the root-finding failures the CLI maps to exit code 2.
    pub fn is_no_root(&self) -> bool {
        match self {
            Error::NoRoot { .. } | Error::RealityViolation { .. } => true,
            Error::Stage { source, .. } => source.is_no_root(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
