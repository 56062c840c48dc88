use thiserror::Error;

/// Failures raised by the state algebra and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate state: {reason}")]
    DegenerateState { reason: String },

    #[error("unrecoverable vacuum in element {element}: mean pressure {mean_pressure:e}")]
    UnrecoverableVacuum { element: usize, mean_pressure: f64 },

    #[error("invalid radial state (a = {a:e}, b = {b:e}); require |b| < a")]
    InvalidRadialState { a: f64, b: f64 },

    #[error("sonic point: ODE denominator vanished at theta = {theta}")]
    SonicDenominator { theta: f64 },

    #[error("no shock found for theta up to {theta_cap}")]
    NoShockFound { theta_cap: f64 },

    #[error("velocity direction undefined at the origin")]
    OriginUndefined,

    #[error("time step collapsed to {dt:e} at t = {t}")]
    StepCollapse { t: f64, dt: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn degenerate(reason: impl Into<String>) -> Self {
        Error::DegenerateState {
            reason: reason.into(),
        }
    }
}
