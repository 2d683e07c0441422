use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A violated parameter invariant. The message names the invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("alpha must exceed 2 (got {0})")]
    PathLossExponent(f64),
    #[error("r0 must be positive (got {0})")]
    ExclusionRadius(f64),
    #[error("r0 < r1 violated (r0 = {r0}, r1 = {r1})")]
    RadiusOrder { r0: f64, r1: f64 },
    #[error("lambda_r must be positive (got {0})")]
    RrhDensity(f64),
    #[error("lambda_u must be positive (got {0})")]
    UserDensity(f64),
    #[error("antennas must be at least 1")]
    Antennas,
    #[error("noise power must be non-negative (got {0})")]
    Noise(f64),
    #[error("tail_mass_eps must lie in (0, 1e-3) (got {0})")]
    TailMass(f64),
    #[error("max_terms must be at least 1")]
    MaxTerms,
    #[error("quad_rel_tol must lie in [1e-14, 1) (got {0})")]
    QuadTolerance(f64),
    #[error("t_max_heuristic must lie in (0, 1) (got {0})")]
    CfFloor(f64),
    #[error("simulation window radius {radius} is smaller than r1 = {r1}")]
    Window { radius: f64, r1: f64 },
    #[error("{name} must be finite (got {value})")]
    NotFinite { name: &'static str, value: f64 },
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Params(#[from] ParamError),

    /// An argument outside the support of a distribution or function.
    #[error("{0}")]
    Domain(String),

    /// Adaptive quadrature hit its subdivision budget before reaching the
    /// requested tolerance.
    #[error("quadrature did not converge in {context}: estimate {estimate:.6e}, residual {residual:.3e} > tolerance {tolerance:.3e}")]
    Quadrature {
        context: String,
        estimate: f64,
        residual: f64,
        tolerance: f64,
    },

    /// A series cut by `max_terms` before its tail fell under the budget.
    #[error("truncation in {context} leaves mass {neglected:.3e} > tail_mass_eps {budget:.3e}; raise max_terms")]
    Truncation { context: String, neglected: f64, budget: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Attaches a location (stratum, grid point) to a numerical failure.
    pub fn in_context(self, ctx: impl AsRef<str>) -> Self {
        match self {
            Error::Quadrature {
                context,
                estimate,
                residual,
                tolerance,
            } => Error::Quadrature {
                context: format!("{} / {}", ctx.as_ref(), context),
                estimate,
                residual,
                tolerance,
            },
            Error::Truncation {
                context,
                neglected,
                budget,
            } => Error::Truncation {
                context: format!("{} / {}", ctx.as_ref(), context),
                neglected,
                budget,
            },
            Error::Domain(msg) => Error::Domain(format!("{}: {}", ctx.as_ref(), msg)),
            other => other,
        }
    }
}
