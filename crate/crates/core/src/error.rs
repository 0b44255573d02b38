use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: argument outside domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    Dimension {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("null space has dimension {found}, expected {expected}")]
    NumericalRank { expected: usize, found: usize },

    #[error("effective channel is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("quadrature did not converge: partial value {partial:.6e}, error estimate {error_estimate:.3e}")]
    Quadrature { partial: f64, error_estimate: f64 },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// True for the per-draw numerical failures the simulator resamples.
    pub fn is_degenerate_draw(&self) -> bool {
        matches!(
            self,
            Error::NumericalRank { .. } | Error::IllConditioned { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
