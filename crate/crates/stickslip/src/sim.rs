//! Time-domain integration of the ramp-driven motion dynamics
//! `m·ẍ + f(ẋ, z) = k·t`.
//!
//! This module is the independent check on the analytic break-away
//! prediction: instead of assuming the quasi-static force balance, it
//! integrates the full second-order dynamics from rest under a linearly
//! increasing actuation force and reports the applied force at the instant
//! the presliding threshold is crossed.
//!
//! # Numerical scheme
//!
//! The friction force is discontinuous in `v` at zero; integrating through
//! reversals therefore needs two ingredients:
//!
//! * **Regularization inside the integrator.** Within a step the sign of
//!   the velocity is smoothed as `v/√(v² + eps_v²)` (scale `eps_v`,
//!   default `10⁻⁸·V`), and the hysteresis bookkeeping (`z`, `F_r`,
//!   direction) is frozen, so the right-hand side seen by the classical
//!   fourth-order Runge–Kutta step is smooth.
//! * **Event localization between steps.** A velocity sign change inside a
//!   step is localized by bisection to within `dt·10⁻³` of the turning
//!   point; the step is split there and the presliding state is advanced
//!   segment by segment with the realized displacement, so reversal capture
//!   (`F_r`, `z` restart) happens at the turning point rather than a full
//!   step late.
//!
//! A step-rejection guard bounds the displacement per step to `0.1/s` —
//! about a tenth of the presliding range — since a coarser step cannot
//! resolve the hysteresis state machine at all.
//!
//! # A caution on the presliding creep regime
//!
//! The quasi-static creep solution that the analytic prediction is built on
//! is not always dynamically stable. During presliding the hysteresis
//! behaves as an elastic spring, while the velocity-weakening branch of the
//! steady-state curve contributes *negative* damping of slope
//! `(F_s − F_c)/V` near `v = 0`. Whenever that negative damping outweighs
//! the (here absent) positive viscous damping, the mass-spring pair is
//! self-excited: the integrated trajectory rings around the creep solution,
//! spawns micro stick-slip reversal cascades, and the realized break-away
//! force can deviate substantially from the quasi-static prediction.
//! Reducing the mass does not help — the linear growth rate scales like
//! `1/m`. This is a property of the model, not of the integrator: the run
//! still detects break-away and reports what actually happened, which is
//! exactly what an independent oracle is for. See the trajectory's
//! [`Trajectory::reversals`] and [`Trajectory::force_residual_max`] fields
//! for how quiet (or not) a given run was.

use crate::breakaway::DEFAULT_Z_TH;
use crate::error::{Error, Result};
use crate::friction::{
    advance_state_unchecked, shape_unchecked, stribeck_magnitude, MotionDirection, PreslidingState,
};
use crate::params::FrictionParams;

/// Integrator settings for one ramp-driven run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationConfig {
    /// Moving mass.
    pub m: f64,
    /// Actuation force rate: the input is `u = k·t`. `k = 0` is allowed
    /// (the system stays at rest).
    pub k: f64,
    /// Fixed integration step.
    pub dt: f64,
    /// End of the integration window.
    pub t_end: f64,
    /// Velocity scale of the sign regularization inside the integrator.
    pub eps_v: f64,
    /// Presliding threshold for the primary break-away detector.
    pub z_th: f64,
    /// Optional secondary detector: fires when `v` first reaches this value.
    pub v_th_detect: Option<f64>,
    /// Stop integrating once every enabled detector has fired (default);
    /// otherwise run to `t_end` regardless.
    pub stop_at_breakaway: bool,
    /// Record every n-th step into the trajectory (the initial and final
    /// states are always recorded). Detection and residual tracking are
    /// unaffected by sampling.
    pub sample_every: usize,
}

/// Default mass: small enough for the quasi-static regime the analytic
/// derivation assumes, large enough to avoid degenerate stiffness.
pub const DEFAULT_MASS: f64 = 1e-4;

impl SimulationConfig {
    /// A configuration with recommended defaults for mass `m` and rate `k`.
    ///
    /// The step size resolves both time scales of the problem:
    /// `dt = min(m·V / (2(F_s − F_c)), F_c / (1000·k))` — the first term is
    /// half the negative-damping time constant of the velocity-weakening
    /// branch, the second puts at least ~10³ steps into the presliding zone
    /// of the ramp. The window `t_end = 3·F_s/k` comfortably covers
    /// break-away for any threshold choice.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] for invalid `params`, `m ≤ 0`, or `k < 0`.
    pub fn recommended(params: &FrictionParams, m: f64, k: f64) -> Result<Self> {
        params.validate()?;
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::Domain(format!("mass must be positive, got {m}")));
        }
        if !k.is_finite() || k < 0.0 {
            return Err(Error::Domain(format!(
                "force rate must be nonnegative, got {k}"
            )));
        }
        let t_end = if k > 0.0 { 3.0 * params.f_s / k } else { 1.0 };
        let dt_damping = if params.f_s > params.f_c {
            m * params.v / (2.0 * (params.f_s - params.f_c))
        } else {
            f64::INFINITY
        };
        let dt_ramp = if k > 0.0 {
            params.f_c / (1000.0 * k)
        } else {
            f64::INFINITY
        };
        let dt = dt_damping.min(dt_ramp).min(t_end / 1000.0);
        Ok(Self {
            m,
            k,
            dt,
            t_end,
            eps_v: 1e-8 * params.v,
            z_th: DEFAULT_Z_TH,
            v_th_detect: None,
            stop_at_breakaway: true,
            sample_every: 1,
        })
    }

    /// Checks the configuration invariants.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] naming the offending field.
    pub fn validate(&self) -> Result<()> {
        let all = [self.m, self.k, self.dt, self.t_end, self.eps_v, self.z_th];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(
                "simulation config fields must be finite".into(),
            ));
        }
        if self.m <= 0.0 {
            return Err(Error::Domain(format!("mass must be positive, got {}", self.m)));
        }
        if self.k < 0.0 {
            return Err(Error::Domain(format!(
                "force rate must be nonnegative, got {}",
                self.k
            )));
        }
        if self.dt <= 0.0 {
            return Err(Error::Domain(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if self.t_end <= self.dt {
            return Err(Error::Domain(format!(
                "t_end ({}) must exceed the time step ({})",
                self.t_end, self.dt
            )));
        }
        if self.eps_v <= 0.0 {
            return Err(Error::Domain(format!(
                "regularization scale must be positive, got {}",
                self.eps_v
            )));
        }
        if !(0.0 < self.z_th && self.z_th < 1.0) {
            return Err(Error::Domain(format!(
                "z_th must lie strictly inside (0, 1), got {}",
                self.z_th
            )));
        }
        if let Some(v_th) = self.v_th_detect {
            if !v_th.is_finite() || v_th <= 0.0 {
                return Err(Error::Domain(format!(
                    "velocity detector threshold must be positive, got {v_th}"
                )));
            }
        }
        if self.sample_every == 0 {
            return Err(Error::Domain("sample_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Full mechanical state at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimState {
    /// Time.
    pub t: f64,
    /// Position.
    pub x: f64,
    /// Velocity.
    pub v: f64,
    /// Hysteresis bookkeeping.
    pub friction: PreslidingState,
}

impl SimState {
    /// The rest state at `t = 0` (idle friction, everything zero).
    #[must_use]
    pub fn at_rest() -> Self {
        Self {
            t: 0.0,
            x: 0.0,
            v: 0.0,
            friction: PreslidingState::idle(),
        }
    }
}

/// One recorded instant of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectorySample {
    /// Time (ramp runs) or accumulated path length (kinematic cycles).
    pub t: f64,
    /// Position.
    pub x: f64,
    /// Velocity (identically zero for kinematic cycles).
    pub v: f64,
    /// Normalized presliding distance, in `[0, 1]`.
    pub z: f64,
    /// Friction force.
    pub f: f64,
    /// Applied force: `k·t` for ramp runs, equal to `f` for quasi-static
    /// kinematic cycles.
    pub u: f64,
}

/// A detector firing: instant and the applied force at that instant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BreakawayEvent {
    /// Detection time, interpolated within the crossing step.
    pub t_ba: f64,
    /// Applied force at detection, `k·t_ba`.
    pub f_ba_sim: f64,
}

/// A time-sampled record of one run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    /// Samples in strictly increasing `t`.
    pub samples: Vec<TrajectorySample>,
    /// Primary break-away detection (`z` crossing `z_th`), if it fired.
    pub breakaway: Option<BreakawayEvent>,
    /// Secondary velocity-based detection, if enabled and fired.
    pub velocity_detection: Option<BreakawayEvent>,
    /// Largest force-balance residual `|u − F|` observed at a step boundary
    /// up to (and including) the detection step — the measure of how
    /// quasi-static the presliding phase actually was.
    pub force_residual_max: f64,
    /// Number of motion reversals encountered.
    pub reversals: usize,
}

/// Friction force with the regularized sign, used inside integration steps.
///
/// The branch target blends the steady-state magnitude with the smoothed
/// sign `v/√(v² + eps_v²)` plus the viscous term, so the right-hand side is
/// smooth through `v = 0` while the frozen hysteresis state supplies the
/// branch anchor.
#[inline]
fn regularized_force(
    params: &FrictionParams,
    state: &PreslidingState,
    eps_v: f64,
    v: f64,
) -> f64 {
    let sg = v / (v * v + eps_v * eps_v).sqrt();
    let target = sg * stribeck_magnitude(params, v) + params.sigma * v;
    state.f_r + (target - state.f_r) * shape_unchecked(state.z)
}

/// One classical RK4 advance of `(x, v)` over `h` with frozen friction state.
#[inline]
#[allow(clippy::too_many_arguments)]
fn rk4(
    params: &FrictionParams,
    config: &SimulationConfig,
    state: &PreslidingState,
    t: f64,
    x: f64,
    v: f64,
    h: f64,
) -> (f64, f64) {
    let accel = |tt: f64, vv: f64| {
        (config.k * tt - regularized_force(params, state, config.eps_v, vv)) / config.m
    };
    let k1x = v;
    let k1v = accel(t, v);
    let k2x = v + 0.5 * h * k1v;
    let k2v = accel(t + 0.5 * h, k2x);
    let k3x = v + 0.5 * h * k2v;
    let k3v = accel(t + 0.5 * h, k3x);
    let k4x = v + h * k3v;
    let k4v = accel(t + h, k4x);
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Segment cap per step (each velocity sign change consumes one segment).
const MAX_SEGMENTS: usize = 12;
/// Bisection iterations for sign-change localization (2⁻²⁴ ≪ 10⁻³).
const BISECTIONS: usize = 24;

/// Advances the presliding state by a realized segment displacement,
/// enforcing the resolution guard and counting reversals.
fn advance_guarded(
    params: &FrictionParams,
    state: &PreslidingState,
    t: f64,
    dx: f64,
) -> Result<(PreslidingState, usize)> {
    let limit = 0.1 / params.s;
    if !dx.is_finite() || dx.abs() > limit {
        return Err(Error::StepRejected { t, dx, limit });
    }
    let next = advance_state_unchecked(params, state, dx);
    let reversed =
        state.dir != MotionDirection::Idle && next.dir != state.dir && dx != 0.0;
    Ok((next, usize::from(reversed)))
}

/// One full step of size `dt`, splitting at velocity sign changes.
///
/// Returns the advanced state and the number of reversals encountered.
fn step_segments(
    params: &FrictionParams,
    config: &SimulationConfig,
    state: &SimState,
) -> Result<(SimState, usize)> {
    let mut t = state.t;
    let mut x = state.x;
    let mut v = state.v;
    let mut friction = state.friction;
    let mut reversals = 0;
    let mut remaining = config.dt;
    for depth in 0..MAX_SEGMENTS {
        let (xn, vn) = rk4(params, config, &friction, t, x, v, remaining);
        let sign_change = v != 0.0 && vn != 0.0 && (v > 0.0) != (vn > 0.0);
        let may_split =
            sign_change && remaining > 1e-3 * config.dt && depth + 1 < MAX_SEGMENTS;
        if may_split {
            // Earliest sign change within [0, remaining]: `lo` keeps the old
            // sign, `hi` has flipped.
            let (mut lo, mut hi) = (0.0_f64, remaining);
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (lo + hi);
                let (_, vm) = rk4(params, config, &friction, t, x, v, mid);
                if vm == 0.0 || (vm > 0.0) == (v > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let tau = hi;
            let (xc, vc) = rk4(params, config, &friction, t, x, v, tau);
            let (next, r) = advance_guarded(params, &friction, t, xc - x)?;
            friction = next;
            reversals += r;
            t += tau;
            x = xc;
            v = vc;
            remaining -= tau;
        } else {
            let (next, r) = advance_guarded(params, &friction, t, xn - x)?;
            reversals += r;
            return Ok((
                SimState {
                    t: state.t + config.dt,
                    x: xn,
                    v: vn,
                    friction: next,
                },
                reversals,
            ));
        }
    }
    unreachable!("final segment depth always takes the non-splitting branch")
}

/// Advances the mechanical state by one integrator step `dt`.
///
/// One explicit fourth-order Runge–Kutta step of
/// `ẍ = (k·t − F(v, z))/m` with the friction direction regularized as
/// `v/√(v² + eps_v²)`; velocity sign changes inside the step are localized
/// by bisection (to within `dt·10⁻³`) and the presliding state is advanced
/// with the realized displacement of each segment, so reversals are
/// captured at the turning point.
///
/// # Errors
///
/// [`Error::Domain`] for invalid inputs; [`Error::StepRejected`] if the
/// displacement in any segment exceeds the presliding resolution guard
/// `0.1/s` (reduce `dt`).
pub fn step(
    params: &FrictionParams,
    config: &SimulationConfig,
    state: &SimState,
) -> Result<SimState> {
    params.validate()?;
    config.validate()?;
    state.friction.validate(params)?;
    if !state.t.is_finite() || state.t < 0.0 || !state.x.is_finite() || !state.v.is_finite() {
        return Err(Error::Domain(format!(
            "state must be finite with t ≥ 0, got t = {}, x = {}, v = {}",
            state.t, state.x, state.v
        )));
    }
    step_segments(params, config, state).map(|(next, _)| next)
}

/// Integrates the ramp-driven dynamics from rest and reports detections.
///
/// Starts at the idle rest state and steps until `t_end`, or — with
/// [`SimulationConfig::stop_at_breakaway`] set — until every enabled
/// detector has fired. The primary detector is the presliding threshold:
/// the first step where `z ≥ z_th` fires it, with the crossing instant
/// interpolated inside the step and `F_ba_sim = k·t_ba`. The optional
/// secondary detector fires when `v` first reaches `v_th_detect`; both
/// instants are reported when both are enabled.
///
/// The returned trajectory also carries the peak force-balance residual
/// `max |u − F|` over step boundaries up to detection (the quasi-static
/// quality measure) and the number of motion reversals.
///
/// # Errors
///
/// [`Error::Domain`] / [`Error::StepRejected`] as for [`step`];
/// [`Error::Blowup`] if the state leaves the finite range, carrying the
/// time of the last valid state.
pub fn run(params: &FrictionParams, config: &SimulationConfig) -> Result<Trajectory> {
    params.validate()?;
    config.validate()?;
    let mut state = SimState::at_rest();
    let mut samples = vec![TrajectorySample {
        t: 0.0,
        x: 0.0,
        v: 0.0,
        z: 0.0,
        f: 0.0,
        u: 0.0,
    }];
    let mut breakaway: Option<BreakawayEvent> = None;
    let mut velocity_detection: Option<BreakawayEvent> = None;
    let mut force_residual_max = 0.0_f64;
    let mut reversals = 0usize;
    let n_steps = (config.t_end / config.dt).ceil() as u64;
    for i in 0..n_steps {
        let (next, nrev) = step_segments(params, config, &state)?;
        reversals += nrev;
        if !next.x.is_finite() || !next.v.is_finite() {
            return Err(Error::Blowup {
                t: next.t,
                t_last: state.t,
            });
        }
        let f = regularized_force(params, &next.friction, config.eps_v, next.v);
        let u = config.k * next.t;
        if breakaway.is_none() {
            force_residual_max = force_residual_max.max((u - f).abs());
            if next.friction.z >= config.z_th {
                // z rises by at most s·|dx| per step, so linear interpolation
                // locates the crossing to within the step resolution.
                let dz = next.friction.z - state.friction.z;
                let frac = if dz > 0.0 {
                    ((config.z_th - state.friction.z) / dz).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                let t_ba = state.t + frac * config.dt;
                breakaway = Some(BreakawayEvent {
                    t_ba,
                    f_ba_sim: config.k * t_ba,
                });
            }
        }
        if velocity_detection.is_none() {
            if let Some(v_th) = config.v_th_detect {
                if next.v >= v_th {
                    let dv = next.v - state.v;
                    let frac = if dv > 0.0 {
                        ((v_th - state.v) / dv).clamp(0.0, 1.0)
                    } else {
                        1.0
                    };
                    let t_det = state.t + frac * config.dt;
                    velocity_detection = Some(BreakawayEvent {
                        t_ba: t_det,
                        f_ba_sim: config.k * t_det,
                    });
                }
            }
        }
        state = next;
        let all_fired = breakaway.is_some()
            && (config.v_th_detect.is_none() || velocity_detection.is_some());
        let stopping = config.stop_at_breakaway && all_fired;
        let last = i + 1 == n_steps;
        if (i + 1) % config.sample_every as u64 == 0 || stopping || last {
            samples.push(TrajectorySample {
                t: state.t,
                x: state.x,
                v: state.v,
                z: state.friction.z,
                f,
                u,
            });
        }
        if stopping {
            break;
        }
    }
    Ok(Trajectory {
        samples,
        breakaway,
        velocity_detection,
        force_residual_max,
        reversals,
    })
}

/// Kinematic steps per stroke-length unit of amplitude.
const CYCLE_RESOLUTION: usize = 4000;

/// Drives a quasi-static symmetric displacement cycle and records the
/// friction–displacement curve.
///
/// The position follows a triangle wave: a lead-in stroke from rest to
/// `+amplitude`, then `cycles` full cycles `+amplitude → −amplitude →
/// +amplitude`. Velocity is treated as infinitesimally small throughout
/// (the `v → 0` limit of the friction law), so the record is the pure
/// hysteresis response: the sample columns carry the accumulated path
/// length as `t`, zero `v`, and the friction force as both `f` and `u`.
///
/// With `s·amplitude ≥ 1/2` the loop closes exactly after one cycle (the
/// strokes saturate the presliding range); smaller loops creep towards
/// their settled shape over a few cycles.
///
/// # Errors
///
/// [`Error::Domain`] for invalid parameters, `amplitude ≤ 0`, or
/// `cycles = 0`; [`Error::StepRejected`] if the amplitude is so large that
/// a kinematic step exceeds the resolution guard.
pub fn reversal_cycle(
    params: &FrictionParams,
    amplitude: f64,
    cycles: usize,
) -> Result<Trajectory> {
    params.validate()?;
    if !amplitude.is_finite() || amplitude <= 0.0 {
        return Err(Error::Domain(format!(
            "amplitude must be positive and finite, got {amplitude}"
        )));
    }
    if cycles == 0 {
        return Err(Error::Domain("at least one cycle is required".into()));
    }
    let h = amplitude / CYCLE_RESOLUTION as f64;
    let mut state = PreslidingState::idle();
    let mut x = 0.0_f64;
    let mut arc = 0.0_f64;
    let mut reversals = 0usize;
    let mut samples = Vec::with_capacity(1 + CYCLE_RESOLUTION * (1 + 4 * cycles));
    samples.push(TrajectorySample {
        t: 0.0,
        x: 0.0,
        v: 0.0,
        z: 0.0,
        f: 0.0,
        u: 0.0,
    });
    let mut push_stroke = |n: usize,
                           dx: f64,
                           x: &mut f64,
                           arc: &mut f64,
                           state: &mut PreslidingState,
                           reversals: &mut usize|
     -> Result<()> {
        for _ in 0..n {
            let (next, r) = advance_guarded(params, state, *arc, dx)?;
            *state = next;
            *reversals += r;
            *x += dx;
            *arc += dx.abs();
            let f = crate::friction::quasi_static_force(params, state);
            samples.push(TrajectorySample {
                t: *arc,
                x: *x,
                v: 0.0,
                z: state.z,
                f,
                u: f,
            });
        }
        Ok(())
    };
    // Lead-in from rest, then full symmetric cycles.
    push_stroke(CYCLE_RESOLUTION, h, &mut x, &mut arc, &mut state, &mut reversals)?;
    for _ in 0..cycles {
        push_stroke(
            2 * CYCLE_RESOLUTION,
            -h,
            &mut x,
            &mut arc,
            &mut state,
            &mut reversals,
        )?;
        push_stroke(
            2 * CYCLE_RESOLUTION,
            h,
            &mut x,
            &mut arc,
            &mut state,
            &mut reversals,
        )?;
    }
    Ok(Trajectory {
        samples,
        breakaway: None,
        velocity_detection: None,
        force_residual_max: 0.0,
        reversals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p() -> FrictionParams {
        FrictionParams::default()
    }

    fn cfg(m: f64, k: f64) -> SimulationConfig {
        SimulationConfig::recommended(&p(), m, k).unwrap()
    }

    #[test]
    fn zero_rate_stays_at_rest() {
        let mut config = cfg(1e-4, 0.0);
        config.t_end = 0.1;
        let traj = run(&p(), &config).unwrap();
        assert!(traj.breakaway.is_none());
        assert_eq!(traj.reversals, 0);
        for s in &traj.samples {
            assert_eq!((s.x, s.v, s.z, s.f, s.u), (0.0, 0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn single_step_from_rest_is_quasi_static() {
        let config = cfg(1e-4, 0.01);
        let next = step(&p(), &config, &SimState::at_rest()).unwrap();
        // With u = k·t ≪ F_c the response is bounded by the free-mass
        // estimate and the presliding distance stays negligible.
        assert!(next.v.abs() < config.k * config.dt * config.dt / config.m);
        assert!(next.friction.z < 1e-6);
        assert_relative_eq!(next.t, config.dt);
    }

    #[test]
    fn oversized_step_trips_the_resolution_guard() {
        let mut config = cfg(1e-6, 10.0);
        config.dt = 0.1;
        config.t_end = 10.0;
        match run(&p(), &config) {
            Err(Error::StepRejected { limit, .. }) => {
                assert_relative_eq!(limit, 0.1 / p().s);
            }
            other => panic!("expected step rejection, got {other:?}"),
        }
    }

    #[test]
    fn fast_ramp_detects_near_the_known_level() {
        // k = 10 with the default mass is ring-free: the detection force is
        // reproducible and sits a little above the Coulomb level because the
        // run is inertial rather than quasi-static.
        let traj = run(&p(), &cfg(1e-4, 10.0)).unwrap();
        let ba = traj.breakaway.expect("detector fires");
        assert_relative_eq!(ba.f_ba_sim, 1.1270, max_relative = 5e-3);
        assert_eq!(traj.reversals, 0);
        assert!(traj.samples.iter().all(|s| (0.0..=1.0).contains(&s.z)));
    }

    #[test]
    fn detection_force_increases_with_threshold() {
        let mut prev = 0.0;
        for z_th in [0.5, 0.7, 0.9, 0.95] {
            let mut config = cfg(1e-4, 10.0);
            config.z_th = z_th;
            let ba = run(&p(), &config).unwrap().breakaway.expect("fires");
            assert!(
                ba.f_ba_sim > prev,
                "z_th = {z_th}: {} not above {prev}",
                ba.f_ba_sim
            );
            prev = ba.f_ba_sim;
        }
    }

    #[test]
    fn velocity_detector_reports_a_second_instant() {
        let mut config = cfg(1e-4, 10.0);
        config.v_th_detect = Some(1.0);
        let traj = run(&p(), &config).unwrap();
        let ba = traj.breakaway.expect("primary fires");
        let vd = traj.velocity_detection.expect("secondary fires");
        assert!(vd.t_ba > 0.0 && ba.t_ba > 0.0);
        assert_ne!(vd.t_ba, ba.t_ba);
    }

    #[test]
    fn short_window_reports_no_detection() {
        let mut config = cfg(1e-4, 10.0);
        config.t_end = 100.0 * config.dt;
        let traj = run(&p(), &config).unwrap();
        assert!(traj.breakaway.is_none());
        assert_eq!(traj.samples.len(), 101);
    }

    #[test]
    fn trajectory_invariants_hold() {
        let mut config = cfg(1e-4, 2.0);
        config.sample_every = 7;
        let traj = run(&p(), &config).unwrap();
        assert!(traj
            .samples
            .windows(2)
            .all(|w| w[0].t < w[1].t));
        for s in &traj.samples {
            assert_eq!(s.u, config.k * s.t);
            assert!((0.0..=1.0).contains(&s.z));
        }
        assert_eq!(traj.samples[0].t, 0.0);
    }

    #[test]
    fn config_validation_names_offenders() {
        let mut c = cfg(1e-4, 1.0);
        c.m = 0.0;
        assert!(matches!(c.validate(), Err(Error::Domain(m)) if m.contains("mass")));
        let mut c = cfg(1e-4, 1.0);
        c.z_th = 1.0;
        assert!(matches!(c.validate(), Err(Error::Domain(m)) if m.contains("z_th")));
        let mut c = cfg(1e-4, 1.0);
        c.t_end = c.dt;
        assert!(c.validate().is_err());
        let mut c = cfg(1e-4, 1.0);
        c.sample_every = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn cycle_closes_and_saturates() {
        let params = p();
        let amplitude = 0.5 / params.s;
        let traj = reversal_cycle(&params, amplitude, 2).unwrap();
        // At this amplitude each stroke saturates the presliding range, so
        // the loop is periodic from the first full cycle on: the force at
        // the positive turning point repeats exactly one cycle later. (The
        // lead-in point itself sits on the virgin curve, not on the loop.)
        assert_eq!(traj.samples.len(), 1 + 4000 + 2 * 16_000);
        let end_cycle_1 = traj.samples[1 + 4000 + 16_000 - 1].f;
        let end_cycle_2 = traj.samples.last().unwrap().f;
        assert!((end_cycle_2 - end_cycle_1).abs() <= 1e-6 * params.f_s);
        assert_relative_eq!(end_cycle_1, params.f_s, max_relative = 1e-9);
        assert_eq!(traj.reversals, 4);

        // An amplitude beyond the presliding range saturates at ±F_s.
        let sat = reversal_cycle(&params, 2.0 / params.s, 1).unwrap();
        let max_f = sat.samples.iter().fold(0.0_f64, |m, s| m.max(s.f));
        let min_f = sat.samples.iter().fold(0.0_f64, |m, s| m.min(s.f));
        assert_relative_eq!(max_f, params.f_s, max_relative = 1e-12);
        assert_relative_eq!(min_f, -params.f_s, max_relative = 1e-12);
    }

    #[test]
    fn tiny_cycle_stays_flat() {
        let traj = reversal_cycle(&p(), 1e-6, 1).unwrap();
        let peak = traj.samples.iter().fold(0.0_f64, |m, s| m.max(s.f.abs()));
        assert!(peak < 0.05 * p().f_s);
    }

    #[test]
    fn cycle_rejects_bad_arguments() {
        assert!(reversal_cycle(&p(), 0.0, 1).is_err());
        assert!(reversal_cycle(&p(), -1.0, 1).is_err());
        assert!(reversal_cycle(&p(), 0.5, 0).is_err());
    }

    #[test]
    fn cycle_area_is_nonnegative_dissipation() {
        let traj = reversal_cycle(&p(), 0.3, 2).unwrap();
        // ∮ F dx over the recorded cycles (skip the lead-in stroke).
        let start = traj
            .samples
            .iter()
            .position(|s| s.t >= 0.3 * (1.0 - 1e-12))
            .unwrap();
        let mut area = 0.0;
        for w in traj.samples[start..].windows(2) {
            area += 0.5 * (w[0].f + w[1].f) * (w[1].x - w[0].x);
        }
        assert!(area >= 0.0);
    }
}
