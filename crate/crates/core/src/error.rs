use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the routine.
    #[error("domain error in {routine}: {detail}")]
    Domain { routine: &'static str, detail: String },

    /// An iterative method hit its iteration or subdivision cap.
    #[error("accuracy error in {routine}: no convergence after {iterations} iterations")]
    Accuracy { routine: &'static str, iterations: usize },

    /// A series expansion was asked to evaluate outside its regime.
    #[error("regime error in {routine}: a = {a}, z = {z} ({detail})")]
    Regime {
        routine: &'static str,
        a: f64,
        z: f64,
        detail: &'static str,
    },

    #[error("truncation order {order} exceeds the maximum {max}")]
    Order { order: usize, max: usize },

    /// The linear-argument Φ recurrence is singular at z = a.
    #[error("singular argument: z = a = {a}; use the transition expansion")]
    Singular { a: f64 },

    /// The likelihood-ratio test has no threshold when both hypotheses coincide.
    #[error("degenerate test: theta = 0 makes both hypotheses identical")]
    Degenerate,

    /// A root bracket that must exist by construction did not.
    #[error("internal consistency error: {0}")]
    Bracket(String),

    #[error("fit error: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn domain(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            routine,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Accuracy { .. } | Error::Bracket(_))
    }
}
