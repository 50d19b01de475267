//! Error types shared across the crate.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by model evaluation, simulation, and identification.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// An argument violated a documented precondition (non-finite input,
    /// value outside its admissible range, invalid parameter set, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// A textual document could not be parsed. `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse {
        /// 1-based line number of the offending line.
        line: usize,
        /// Description of what was expected and what was found.
        message: String,
    },

    /// The damped fixed-point iteration for the self-consistent break-away
    /// velocity exhausted its budget. Carries the last iterate and the
    /// fixed-point equation residual so callers can judge how close it got.
    #[error(
        "fixed-point iteration did not converge within the budget: \
         last iterate v = {last_iterate}, equation residual = {residual}"
    )]
    FixedPointDiverged {
        /// Velocity iterate after the final iteration.
        last_iterate: f64,
        /// Absolute residual of `v·|F_ss(v)|·|ln z_th| − k` at the last iterate.
        residual: f64,
    },

    /// A quasi-static hysteresis cycle failed to settle onto a closed loop
    /// within the cycle budget.
    #[error(
        "hysteresis loop failed to close: residual {residual} exceeds \
         tolerance {tolerance}"
    )]
    NonClosedLoop {
        /// Friction mismatch between successive cycle ends.
        residual: f64,
        /// Closure tolerance that was not met.
        tolerance: f64,
    },

    /// A single integrator step moved farther than the presliding resolution
    /// guard allows. The time step is too large for the chosen scaling.
    #[error(
        "step rejected at t = {t}: displacement {dx} exceeds the presliding \
         resolution guard {limit} (= 0.1/s); reduce dt"
    )]
    StepRejected {
        /// Simulation time at which the step was attempted.
        t: f64,
        /// Total path length the step tried to cover.
        dx: f64,
        /// Maximum admissible path length per step.
        limit: f64,
    },

    /// The integrator state became non-finite.
    #[error(
        "numerical blow-up at t = {t}: state is non-finite; \
         last valid state was at t = {t_last}"
    )]
    Blowup {
        /// Time at which the non-finite value appeared.
        t: f64,
        /// Time of the last finite state.
        t_last: f64,
    },

    /// The data set cannot determine the requested parameters
    /// (too few points, no spread, …).
    #[error("identifiability error: {0}")]
    Identifiability(String),

    /// A linear-algebra or line-search failure inside the optimizer.
    #[error("numerical error: {0}")]
    Numerical(String),
}
