use thiserror::Error;

/// Error type shared by all workbench modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid sizes, unknown names, exceeded caps, malformed inputs.
    #[error("configuration: {0}")]
    Config(String),

    /// Mathematically invalid input: out-of-domain parameter, element not in
    /// the algebra span, non-unit vector, broken invariant.
    #[error("domain: {0}")]
    Domain(String),

    /// A numerical rank decision fell inside the ambiguity window; the
    /// singular values are carried so the caller can inspect the gap.
    #[error("ambiguous rank decision: {context} (singular values {singular_values:?})")]
    AmbiguousRank {
        context: String,
        singular_values: Vec<f64>,
    },

    /// Conjugator requested for matrices with mismatched characteristic
    /// polynomials.
    #[error("not conjugate: characteristic polynomials differ by {coeff_residual:.3e}")]
    NotConjugate { coeff_residual: f64 },

    /// Flow integration exceeded the invariant drift budget.
    #[error("flow drift {drift:.3e} exceeds budget {budget:.3e} at step {step}")]
    DriftExceeded {
        drift: f64,
        budget: f64,
        step: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
