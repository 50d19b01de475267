//! Stribeck friction with presliding hysteresis: break-away force
//! prediction, ramp-driven stick-slip simulation, and parameter
//! identification.
//!
//! # The model
//!
//! Dry friction in actuated motion systems shows two regimes. In **gross
//! sliding** the friction force follows the steady-state (Stribeck) curve:
//! a velocity-weakening decay from the stiction level `F_s` down to the
//! Coulomb level `F_c` over a characteristic velocity scale `V`, plus an
//! optional linear viscous term ([`stribeck`]). In **presliding** — the
//! small-displacement regime before gross sliding — friction behaves
//! instead as a hysteretic function of displacement: the force rises along
//! a curve `z(1 − ln z)` of the normalized presliding distance `z`
//! ([`presliding_shape`]), and every motion reversal re-anchors the curve at
//! the current force and restarts `z` ([`advance_state`]). The handful of
//! constants involved live in [`FrictionParams`], the reversal bookkeeping
//! in [`PreslidingState`].
//!
//! # Break-away prediction
//!
//! The question the crate is built around: if a sticking mass is pushed by
//! a force ramp `u = k·t`, at what force does it break away into gross
//! sliding — and how does that force depend on the rate `k`? Treating the
//! presliding phase quasi-statically gives an analytic answer
//! ([`breakaway_force`], [`breakaway_sweep`]): the break-away force decays
//! monotonically from `F_s` at slow ramps to `F_c` at fast ramps. The
//! prediction involves a closure choice for the steady-state level
//! ([`SteadyStateChoice`]), including an exact self-consistent fixed point.
//!
//! # Simulation as an independent check
//!
//! [`run`] integrates the full second-order dynamics `m·ẍ + f(ẋ, z) = k·t`
//! from rest with an RK4 scheme, reversal event localization, and
//! threshold-based break-away detection — no quasi-static assumption. The
//! simulated break-away force can be compared directly with the analytic
//! curve. A caution for interpreting such comparisons: the velocity-
//! weakening branch of the steady-state curve acts as negative damping
//! during presliding, so the quasi-static creep solution can be
//! self-excited into micro stick-slip oscillations; see the [`sim`] module
//! docs for the details. [`reversal_cycle`] drives pure kinematic
//! hysteresis loops, and [`loop_area_diagnostic`] measures dissipated
//! energy per cycle.
//!
//! # Identification
//!
//! [`fit_stribeck`] and [`fit_breakaway_curve`] recover the parameters from
//! measured `(v, F)` or `(k, F_ba)` data by damped Gauss–Newton least
//! squares.
//!
//! # Example
//!
//! ```
//! use stickslip::{breakaway_sweep, default_k_grid, FrictionParams, SteadyStateChoice};
//!
//! let params = FrictionParams::default();
//! let sweep = breakaway_sweep(&params, SteadyStateChoice::Average, &default_k_grid(), 0.95)?;
//! // Slow ramps break away near the stiction level, fast ramps near the
//! // Coulomb level, monotonically in between.
//! assert!(sweep.points.first().unwrap().f_ba > sweep.points.last().unwrap().f_ba);
//! # Ok::<(), stickslip::Error>(())
//! ```
//!
//! The `serde` feature derives `Serialize`/`Deserialize` for the public
//! data types.

#![warn(missing_docs)]
#![warn(clippy::pedantic)]
#![allow(
    clippy::must_use_candidate,
    clippy::missing_errors_doc,
    clippy::similar_names,
    clippy::many_single_char_names,
    clippy::doc_markdown,
    clippy::cast_precision_loss,
    clippy::cast_possible_truncation,
    clippy::cast_sign_loss,
    clippy::float_cmp,
    clippy::suboptimal_flops
)]

mod breakaway;
mod error;
mod fit;
mod friction;
mod params;
pub mod sim;

pub use breakaway::{
    breakaway_force, breakaway_sweep, default_k_grid, loop_area_diagnostic, phase_diagram,
    presliding_velocity, BreakawayPoint, BreakawaySweep, LoopAreaDiagnostic, LoopAreaPoint,
    PhasePoint, SteadyStateChoice, DEFAULT_Z_TH,
};
pub use error::{Error, Result};
pub use fit::{
    breakaway_model, fit_breakaway_curve, fit_stribeck, FitBounds, FitOptions, FitResult,
};
pub use friction::{
    advance_state, friction_force, presliding_shape, stribeck, MotionDirection, PreslidingState,
};
pub use params::FrictionParams;
pub use sim::{
    reversal_cycle, run, step, BreakawayEvent, SimState, SimulationConfig, Trajectory,
    TrajectorySample, DEFAULT_MASS,
};
