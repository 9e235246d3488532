use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    Domain(String),

    /// Root-multiset construction received an unusable location list.
    #[error("invalid root multiset: {0}")]
    InvalidRoots(String),

    /// A gap of the logarithmic derivative did not show a sign change.
    #[error("no sign change of the logarithmic derivative on gap ({lo}, {hi})")]
    NoBracket { lo: f64, hi: f64 },

    /// Empirical and limit measures are not in the same mass regime.
    #[error("total masses {empirical} and {limit} differ by more than {allowed}")]
    MassMismatch {
        empirical: f64,
        limit: f64,
        allowed: f64,
    },

    /// A refinement loop ran out of budget before meeting its tolerance.
    #[error("{what} did not converge: last two estimates {previous} and {last}")]
    NoConvergence {
        what: &'static str,
        previous: f64,
        last: f64,
    },

    /// Two independent evaluations of the same quantity disagree.
    #[error("{what}: closed form {closed_form} and quadrature {quadrature} disagree")]
    Disagreement {
        what: &'static str,
        closed_form: f64,
        quadrature: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoBracket { .. } | Error::NoConvergence { .. } | Error::Disagreement { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
