use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("{what} = {value} is outside the admissible domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("the density is singular at x = {0}")]
    Singularity(f64),

    #[error("weight `{0}` is not even; only even weights are supported by the scaling solver")]
    NonEvenWeight(String),

    #[error("could not bracket the MRS equation for n = {n} (last a = {last_a})")]
    NoBracket { n: usize, last_a: f64 },

    #[error("discretization too coarse: orthogonality residual {residual:.3e} after {nodes} nodes")]
    DiscretizationTooCoarse { residual: f64, nodes: usize },

    #[error("degree {requested} exceeds the table limit {n_max}")]
    Index { requested: usize, n_max: usize },

    #[error("{what} exceeded its budget: {detail}")]
    BudgetExceeded { what: &'static str, detail: String },

    #[error("all coefficients of the sample are zero")]
    DegenerateSample,

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("table cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures caused by a numerical budget rather than bad input.
    pub fn is_budget_failure(&self) -> bool {
        matches!(
            self,
            Error::NoBracket { .. }
                | Error::DiscretizationTooCoarse { .. }
                | Error::BudgetExceeded { .. }
                | Error::NonFinite(_)
        )
    }
}
