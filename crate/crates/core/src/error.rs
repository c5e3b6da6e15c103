//! Crate-wide error type.
//!
//! Variants are grouped by how a front end should treat them: everything up
//! to `Guard` is a problem with the inputs, while `Convergence`,
//! `Infeasible`, and `Degenerate` mean the inputs were well-formed but the
//! requested solve has no usable answer.

use crate::model::FitResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value or record violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// An input file is structurally unusable (missing columns, bad JSON).
    #[error("schema error: {0}")]
    Schema(String),

    /// Duplicate identifiers within one dataset.
    #[error("conflict: {0}")]
    Conflict(String),

    /// The data cannot identify the model (too few points, degenerate span).
    #[error("ill-posed fit: {0}")]
    IllPosed(String),

    /// No multi-start seed converged; carries the best attempt found.
    #[error("optimizer failed to converge: {message}")]
    Convergence { message: String, best: Box<FitResult> },

    /// A numeric evaluation left the representable domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The constraint set admits no feasible point.
    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    /// The requested solve is degenerate (e.g. a zero exponent leaves the
    /// compute frontier without an interior optimum).
    #[error("degenerate problem: {0}")]
    Degenerate(String),

    /// A name was not found in a registry of known entries.
    #[error("unknown name {name:?}; available: {}", available.join(", "))]
    Lookup { name: String, available: Vec<String> },

    /// Arguments are mutually inconsistent (mismatched lengths, wrong records).
    #[error("argument error: {0}")]
    Argument(String),

    /// Synergy input observed targets with no usable baseline.
    #[error("incomplete data: no baseline for target(s) {}", targets.join(", "))]
    IncompleteData { targets: Vec<String> },

    /// A combinatorial guard refused to enumerate an oversized search space.
    #[error("guard: {0}")]
    Guard(String),

    /// A conversion is undefined for these parameters.
    #[error("unrepresentable: {0}")]
    Unrepresentable(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a failed solve.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Convergence { .. } | Error::Infeasible(_) | Error::Degenerate(_)
        )
    }
}
