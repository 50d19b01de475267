//! Steady-state friction curve, presliding hysteresis shape, and the
//! reversal state machine that together produce the instantaneous friction
//! force.
//!
//! # Model
//!
//! During **gross sliding** friction follows the steady-state (Stribeck)
//! curve, evaluated by [`stribeck`]:
//!
//! ```text
//! F_ss(v) = sign(v) · (F_c + (F_s − F_c) · exp(−(|v|/V)^delta_exp)) + sigma·v
//! ```
//!
//! For `sigma = 0` its magnitude decays monotonically from the stiction
//! level `F_s` (as `v → 0`) to the Coulomb level `F_c` (as `|v| → ∞`).
//!
//! During **presliding** — small displacements after a motion reversal —
//! friction is a hysteretic function of the normalized presliding distance
//! `z ∈ [0, 1]`, which accumulates as `s·|dx|` since the last reversal and
//! resets there. The transition curve between the reversal value `F_r` and
//! the steady-state target is shaped by [`presliding_shape`]:
//!
//! ```text
//! f(z) = z · (1 − ln z),    f(0) = 0,  f(1) = 1,
//! ```
//!
//! a strictly increasing map with zero slope at `z = 1`, so branches merge
//! smoothly into the steady-state curve. The instantaneous force, from
//! [`friction_force`], interpolates
//!
//! ```text
//! F = F_r + (F_target − F_r) · f(z)
//! ```
//!
//! where `F_target` is the signed steady-state value the branch converges
//! to: `F_ss(v)` while moving, and `±F_s` in the quasi-static limit
//! `v → 0`. Starting from the idle state (`F_r = 0`) this reduces to
//! `F = F_ss(v)·f(z)`; after a reversal it reproduces the classical
//! hysteresis branches, converging to the correct signed steady state in
//! either direction.
//!
//! [`PreslidingState`] carries `(z, F_r, dir)`; [`advance_state`] accumulates
//! displacement and performs the reversal bookkeeping: on a direction change
//! the current friction value (evaluated in the `v → 0` limit) becomes the
//! new anchor `F_r`, and `z` restarts from the fresh displacement. Because
//! the anchor equals the force at the reversal point, the force trace is
//! continuous across reversals. Once `z` saturates at 1 the model is in pure
//! gross sliding (`F = F_ss(v)`) until the next reversal.

use crate::error::{Error, Result};
use crate::params::FrictionParams;

/// Direction of the current motion segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MotionDirection {
    /// Moving towards negative displacement.
    Negative,
    /// No motion since initialization (only valid in the idle state).
    #[default]
    Idle,
    /// Moving towards positive displacement.
    Positive,
}

impl MotionDirection {
    /// Numeric sign: `−1`, `0`, or `+1`.
    #[must_use]
    pub fn sign(self) -> f64 {
        match self {
            Self::Negative => -1.0,
            Self::Idle => 0.0,
            Self::Positive => 1.0,
        }
    }

    /// Direction of a nonzero displacement increment.
    fn of_dx(dx: f64) -> Self {
        if dx > 0.0 {
            Self::Positive
        } else {
            Self::Negative
        }
    }
}

/// Reversal bookkeeping for the presliding hysteresis.
///
/// Invariants, checked by [`PreslidingState::validate`]:
/// * `0 ≤ z ≤ 1`,
/// * `|f_r| ≤ F_s` — the anchor never exceeds the stiction level,
/// * `dir == Idle` only in the initial state (`z = 0`, `f_r = 0`).
///
/// The model's signed presliding distance on `[−1, 1]` is stored here as the
/// nonnegative distance-since-reversal `z` plus the separate direction flag —
/// equivalent information that keeps the logarithm in the shape function
/// acting on a nonnegative argument.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PreslidingState {
    /// Normalized presliding distance accumulated since the last reversal.
    pub z: f64,
    /// Friction value captured at the last reversal (branch anchor).
    pub f_r: f64,
    /// Direction of the current motion segment.
    pub dir: MotionDirection,
}

impl PreslidingState {
    /// The idle state: no accumulated distance, zero anchor, no direction.
    #[must_use]
    pub fn idle() -> Self {
        Self::default()
    }

    /// Checks the state invariants against the given parameters.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] describing the violated invariant.
    pub fn validate(&self, params: &FrictionParams) -> Result<()> {
        if !self.z.is_finite() || !(0.0..=1.0).contains(&self.z) {
            return Err(Error::Domain(format!(
                "presliding state: z must lie in [0, 1], got {}",
                self.z
            )));
        }
        // Tolerate one part in 1e12 of accumulated round-off on the anchor.
        if !self.f_r.is_finite() || self.f_r.abs() > params.f_s * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "presliding state: |F_r| must not exceed F_s = {}, got {}",
                params.f_s, self.f_r
            )));
        }
        if self.dir == MotionDirection::Idle && (self.z != 0.0 || self.f_r != 0.0) {
            return Err(Error::Domain(format!(
                "presliding state: dir = 0 requires the idle state, got z = {}, F_r = {}",
                self.z, self.f_r
            )));
        }
        Ok(())
    }
}

/// Magnitude of the steady-state curve without the viscous term:
/// `F_c + (F_s − F_c)·exp(−(|v|/V)^delta_exp)`.
#[inline]
pub(crate) fn stribeck_magnitude(params: &FrictionParams, v: f64) -> f64 {
    let ratio = v.abs() / params.v;
    let arg = if params.delta_exp == 1.0 {
        ratio
    } else {
        ratio.powf(params.delta_exp)
    };
    params.f_c + (params.f_s - params.f_c) * (-arg).exp()
}

/// Unchecked steady-state curve evaluation (callers guarantee finiteness).
#[inline]
pub(crate) fn stribeck_unchecked(params: &FrictionParams, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    v.signum() * stribeck_magnitude(params, v) + params.sigma * v
}

/// Evaluates the steady-state (Stribeck) friction curve at velocity `v`.
///
/// Returns `sign(v)·(F_c + (F_s − F_c)·exp(−(|v|/V)^delta_exp)) + sigma·v`,
/// with the convention `sign(0) = 0` so the curve passes through the origin.
/// The curve is odd for all parameter values, and for `sigma = 0` its
/// magnitude is bounded: `F_c ≤ |F_ss(v)| ≤ F_s` for every `v ≠ 0`.
///
/// # Errors
///
/// [`Error::Domain`] if `params` is invalid or `v` is not finite.
///
/// ```
/// use stickslip::{stribeck, FrictionParams};
/// let p = FrictionParams::default(); // F_c = 1, F_s = 1.5, V = 0.1
/// let f = stribeck(&p, 0.1).unwrap(); // 1 + 0.5·exp(−1)
/// assert!((f - 1.18394).abs() < 1e-5);
/// ```
pub fn stribeck(params: &FrictionParams, v: f64) -> Result<f64> {
    params.validate()?;
    if !v.is_finite() {
        return Err(Error::Domain(format!("velocity must be finite, got {v}")));
    }
    Ok(stribeck_unchecked(params, v))
}

/// Unchecked hysteresis shape (callers guarantee `z ∈ [0, 1]`).
#[inline]
pub(crate) fn shape_unchecked(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        z * (1.0 - z.ln())
    }
}

/// Evaluates the presliding hysteresis shape `f(z) = z·(1 − ln z)`.
///
/// Defined on `[0, 1]` with `f(0) = 0` by continuous extension
/// (`z·ln z → 0`), `f(1) = 1`, strictly increasing in between
/// (derivative `−ln z > 0`), with range `[0, 1]`.
///
/// # Errors
///
/// [`Error::Domain`] if `z` lies outside `[0, 1]` or is not finite.
pub fn presliding_shape(z: f64) -> Result<f64> {
    if !z.is_finite() || !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "presliding distance must lie in [0, 1], got {z}"
        )));
    }
    Ok(shape_unchecked(z))
}

/// Signed steady-state target of the current hysteresis branch.
///
/// While moving (`v ≠ 0`) the branch converges to the full steady-state
/// curve `F_ss(v)`. In the quasi-static limit `v = 0` the target is the
/// signed stiction level `±F_s` for the current direction, and `0` in the
/// idle state (where `z = 0` makes the target irrelevant).
#[inline]
pub(crate) fn branch_target(params: &FrictionParams, dir: MotionDirection, v: f64) -> f64 {
    if v == 0.0 {
        dir.sign() * params.f_s
    } else {
        stribeck_unchecked(params, v)
    }
}

/// Unchecked friction force (callers guarantee valid state and finite `v`).
#[inline]
pub(crate) fn friction_force_unchecked(
    params: &FrictionParams,
    state: &PreslidingState,
    v: f64,
) -> f64 {
    let target = branch_target(params, state.dir, v);
    state.f_r + (target - state.f_r) * shape_unchecked(state.z)
}

/// Instantaneous friction force in presliding.
///
/// Returns `F_r + (F_target − F_r)·f(z)` where `F_target` is the signed
/// steady-state value of the current branch (see module docs): `F_ss(v)` for
/// `v ≠ 0`, `sign(dir)·F_s` for `v = 0` with `dir ≠ 0`. The boundary
/// contract is exact: the force equals `F_r` at `z = 0` and `F_target` at
/// `z = 1`.
///
/// # Errors
///
/// [`Error::Domain`] if `params` or `state` is invalid or `v` is not finite.
///
/// ```
/// use stickslip::{friction_force, FrictionParams, MotionDirection, PreslidingState};
/// let p = FrictionParams::default();
/// // Fresh branch from the idle anchor, 1/e of the way through presliding:
/// let state = PreslidingState { z: (-1.0f64).exp(), f_r: 0.0, dir: MotionDirection::Positive };
/// let f = friction_force(&p, &state, 0.1).unwrap();
/// assert!((f - 0.8710941655794973).abs() < 1e-12); // stribeck(0.1) · f(1/e)
/// ```
pub fn friction_force(params: &FrictionParams, state: &PreslidingState, v: f64) -> Result<f64> {
    params.validate()?;
    state.validate(params)?;
    if !v.is_finite() {
        return Err(Error::Domain(format!("velocity must be finite, got {v}")));
    }
    Ok(friction_force_unchecked(params, state, v))
}

/// Friction value of the current branch in the quasi-static limit `v → 0`.
///
/// This is the value captured as the new anchor `F_r` at a reversal, and the
/// force reported by kinematic (quasi-static) cycle drivers.
#[inline]
pub(crate) fn quasi_static_force(params: &FrictionParams, state: &PreslidingState) -> f64 {
    friction_force_unchecked(params, state, 0.0)
}

/// Unchecked state transition (callers guarantee valid state, finite `dx`).
#[inline]
pub(crate) fn advance_state_unchecked(
    params: &FrictionParams,
    state: &PreslidingState,
    dx: f64,
) -> PreslidingState {
    if dx == 0.0 {
        return *state;
    }
    let dir_new = MotionDirection::of_dx(dx);
    let dz = params.s * dx.abs();
    if state.dir == MotionDirection::Idle || state.dir == dir_new {
        PreslidingState {
            z: (state.z + dz).min(1.0),
            f_r: state.f_r,
            dir: dir_new,
        }
    } else {
        // Reversal: the friction value at the turning point (the v → 0 limit
        // of the old branch) anchors the new branch, and the presliding
        // distance restarts from the fresh displacement.
        PreslidingState {
            z: dz.min(1.0),
            f_r: quasi_static_force(params, state),
            dir: dir_new,
        }
    }
}

/// Advances the presliding state by a signed displacement increment `dx`.
///
/// * `dx = 0` returns the state unchanged.
/// * Motion continuing in the current direction (or from idle) accumulates
///   `z` by `s·|dx|`, saturating at 1.
/// * Motion opposing the current direction is a **reversal**: the friction
///   value at the turning point becomes the new anchor `F_r`, `z` restarts
///   from `s·|dx|`, and the direction flips.
///
/// The result never leaves the invariant set: `z` stays in `[0, 1]` and the
/// captured anchor satisfies `|F_r| ≤ F_s` (it is a convex combination of
/// the previous anchor and `±F_s`).
///
/// # Errors
///
/// [`Error::Domain`] if `params` or `state` is invalid or `dx` is not finite.
pub fn advance_state(
    params: &FrictionParams,
    state: &PreslidingState,
    dx: f64,
) -> Result<PreslidingState> {
    params.validate()?;
    state.validate(params)?;
    if !dx.is_finite() {
        return Err(Error::Domain(format!(
            "displacement increment must be finite, got {dx}"
        )));
    }
    Ok(advance_state_unchecked(params, state, dx))
}
