use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("metric is not symmetric positive definite at {point:?}")]
    MetricDegenerate { point: Vec<f64> },

    #[error("geodesic left the chart box on axis {axis} at {point:?}")]
    ChartExit { axis: usize, point: Vec<f64> },

    #[error("missing parameter: {0}")]
    MissingParameter(String),

    #[error("Reeb system is singular at {point:?}")]
    ReebDegenerate { point: Vec<f64> },

    #[error("finite-difference stencil leaves the chart at {point:?}")]
    FiniteDifference { point: Vec<f64> },

    #[error("budget exceeded: {what} needs {requested} > {limit}")]
    BudgetExceeded {
        what: String,
        requested: u128,
        limit: u128,
    },

    #[error("window tensor violates the eigenvalue floor at {point:?} (min eigenvalue {min_eigenvalue})")]
    WindowDegenerate {
        point: Vec<f64>,
        min_eigenvalue: f64,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("lattice frame is degenerate")]
    DegenerateLattice,

    #[error("power iteration did not converge within {iterations} iterations")]
    IterationLimit {
        iterations: usize,
        /// Lower-bound estimates gathered before the failure, one per truncation.
        partial_trace: Vec<(usize, f64)>,
    },

    #[error("constraint has zero mass")]
    DegenerateConstraint,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable tag, used by the JSON error report and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MetricDegenerate { .. } => "metric-degenerate",
            Error::ChartExit { .. } => "chart-exit",
            Error::MissingParameter(_) => "missing-parameter",
            Error::ReebDegenerate { .. } => "reeb-degenerate",
            Error::FiniteDifference { .. } => "finite-difference",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::WindowDegenerate { .. } => "window-degenerate",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::DegenerateLattice => "degenerate-lattice",
            Error::IterationLimit { .. } => "iteration-limit",
            Error::DegenerateConstraint => "degenerate-constraint",
            Error::InvalidInput(_) => "invalid-input",
        }
    }

    pub(crate) fn budget(what: impl Into<String>, requested: u128, limit: u128) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            requested,
            limit,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
