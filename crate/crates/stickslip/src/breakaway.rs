//! Analytic break-away prediction from the quasi-static presliding balance.
//!
//! # Derivation
//!
//! Under a force ramp `u = k·t` applied to a sticking mass, inertia is
//! negligible while the motion is presliding creep, so the applied force is
//! balanced by the hysteretic friction force at every instant. Inverting
//! that balance along the fresh branch from rest gives the creep velocity as
//! a function of the normalized presliding distance `z`, evaluated by
//! [`presliding_velocity`]:
//!
//! ```text
//! v(z) = −k / (F_ss · ln z),        0 < z < 1,
//! ```
//!
//! where `F_ss` stands in for the (velocity-dependent) steady-state friction
//! level. The velocity grows monotonically with `z` and diverges as
//! `z → 1` — the presliding-to-sliding transition is not abrupt, so a
//! conventional threshold `z_th` (default 0.95, i.e. 95% of the presliding
//! distance) defines the break-away instant. The predicted break-away force
//! is then the steady-state curve evaluated at the threshold velocity:
//!
//! ```text
//! F_ba(k) = |F_ss(v(z_th))|,
//! ```
//!
//! computed by [`breakaway_force`]. Because `F_ss` appears on both sides of
//! the balance, a closure is needed; [`SteadyStateChoice`] selects it —
//! either one of the constant levels `F_c`, `F_s`, their midpoint average,
//! or the self-consistent fixed point that resolves the circular dependency
//! exactly.
//!
//! [`breakaway_sweep`] maps the prediction over a grid of force rates, and
//! [`phase_diagram`] tabulates the full `v(z)` profiles. Both reproduce the
//! qualitative facts used as acceptance anchors: `F_ba` decays from `F_s`
//! (slow ramps give stiction enough time) to `F_c` (fast ramps break away at
//! speed), monotonically in `k`.
//!
//! [`loop_area_diagnostic`] is an independent check on the hysteresis
//! construction: it drives a closed symmetric presliding cycle
//! quasi-statically, integrates the enclosed friction–displacement area
//! (the energy dissipated per cycle), and reports the log–log exponent of
//! area versus amplitude.

use crate::error::{Error, Result};
use crate::friction::{
    advance_state_unchecked, quasi_static_force, stribeck_magnitude, PreslidingState,
};
use crate::params::FrictionParams;

/// Closure for the steady-state friction level appearing in the presliding
/// velocity profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SteadyStateChoice {
    /// Use the Coulomb level `F_c` (lower bound of the curve).
    CoulombLevel,
    /// Use the stiction level `F_s` (upper bound of the curve).
    StictionLevel,
    /// Use the midpoint `F̂_ss = F_c + (F_s − F_c)/2`.
    #[default]
    Average,
    /// Resolve the velocity dependence exactly: solve the fixed point
    /// `v = k / (|F_ss(v)|·|ln z_th|)` by damped iteration.
    SelfConsistent,
}

impl SteadyStateChoice {
    /// The constant level this choice substitutes for `F_ss`, or `None` for
    /// the self-consistent closure.
    #[must_use]
    pub fn constant_level(self, params: &FrictionParams) -> Option<f64> {
        match self {
            Self::CoulombLevel => Some(params.f_c),
            Self::StictionLevel => Some(params.f_s),
            Self::Average => Some(params.average_steady_state()),
            Self::SelfConsistent => None,
        }
    }
}

impl std::fmt::Display for SteadyStateChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Self::CoulombLevel => "coulomb",
            Self::StictionLevel => "stiction",
            Self::Average => "average",
            Self::SelfConsistent => "self-consistent",
        };
        f.write_str(name)
    }
}

/// One break-away prediction: rate, threshold velocity, break-away force.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BreakawayPoint {
    /// Actuation force rate `k` (force/time).
    pub k: f64,
    /// Creep velocity at the presliding threshold `z_th`.
    pub v_th: f64,
    /// Predicted break-away force `|F_ss(v_th)|`.
    pub f_ba: f64,
}

/// A break-away curve over a rate grid, with its threshold.
///
/// Invariant: `points` is strictly increasing in `k` (enforced by
/// [`breakaway_sweep`], which sorts its input and rejects duplicates).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BreakawaySweep {
    /// Presliding threshold defining break-away, in `(0, 1)`.
    pub z_th: f64,
    /// Predictions ordered by increasing `k`.
    pub points: Vec<BreakawayPoint>,
}

/// One row of a phase diagram: creep velocity at `(k, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhasePoint {
    /// Actuation force rate.
    pub k: f64,
    /// Normalized presliding distance.
    pub z: f64,
    /// Creep velocity `v(k, z)`.
    pub v: f64,
}

/// Presliding threshold conventionally defining break-away (95%).
pub const DEFAULT_Z_TH: f64 = 0.95;

/// The default rate grid: `0.01, 2.01, 4.01, …` up to 30.
///
/// Start 0.01, increment 2, last value not exceeding 30 (15 points).
#[must_use]
pub fn default_k_grid() -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0.01;
    while k <= 30.0 {
        grid.push(k);
        k += 2.0;
    }
    grid
}

/// Creep velocity during presliding at distance `z` under rate `k`, for a
/// constant steady-state level `F_ss_const`.
///
/// Returns `−k / (F_ss_const · ln z)`, which is strictly positive on
/// `0 < z < 1`, strictly increasing in `z`, exactly linear in `k`, exactly
/// inversely proportional to `F_ss_const`, and divergent as `z → 1`.
///
/// # Errors
///
/// [`Error::Domain`] for `k ≤ 0`, `F_ss_const ≤ 0`, non-finite inputs, or
/// `z` outside the open interval `(0, 1)` (both endpoints are singular:
/// `z = 0` has infinite log, `z = 1` divides by zero).
///
/// ```
/// use stickslip::presliding_velocity;
/// let v = presliding_velocity(1.0, 1.0, 0.5).unwrap();
/// assert!((v - 1.0 / 2.0f64.ln()).abs() < 1e-15); // 1/ln 2 ≈ 1.4427
/// ```
pub fn presliding_velocity(k: f64, f_ss_const: f64, z: f64) -> Result<f64> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::Domain(format!(
            "force rate k must be positive and finite, got {k}"
        )));
    }
    if !f_ss_const.is_finite() || f_ss_const <= 0.0 {
        return Err(Error::Domain(format!(
            "steady-state level must be positive and finite, got {f_ss_const}"
        )));
    }
    if !z.is_finite() || z <= 0.0 || z >= 1.0 {
        return Err(Error::Domain(format!(
            "presliding distance must lie strictly inside (0, 1), got {z}"
        )));
    }
    Ok(-k / (f_ss_const * z.ln()))
}

/// Full steady-state magnitude at positive velocity, including the viscous
/// term: `|F_ss(v)| = F_c + (F_s − F_c)·exp(−(v/V)^δ) + sigma·v`.
#[inline]
fn steady_state_magnitude(params: &FrictionParams, v: f64) -> f64 {
    stribeck_magnitude(params, v) + params.sigma * v
}

/// Damped fixed-point solve of `v = k / (|F_ss(v)|·|ln z|)`.
///
/// Iterates `v ← (1−α)·v + α·k / (|F_ss(v)|·|ln z|)` with damping
/// `α = 0.5`, starting from the Average-choice velocity, for at most 200
/// iterations, declaring convergence when the relative step drops below
/// 1e-12.
fn self_consistent_velocity(params: &FrictionParams, k: f64, z: f64) -> Result<f64> {
    const ALPHA: f64 = 0.5;
    const BUDGET: usize = 200;
    const TOL: f64 = 1e-12;
    let ln_abs = -z.ln();
    let mut v = k / (params.average_steady_state() * ln_abs);
    for _ in 0..BUDGET {
        let next = (1.0 - ALPHA) * v + ALPHA * k / (steady_state_magnitude(params, v) * ln_abs);
        let step = (next - v).abs();
        v = next;
        if step <= TOL * v.abs() {
            return Ok(v);
        }
    }
    Err(Error::FixedPointDiverged {
        last_iterate: v,
        residual: (v * steady_state_magnitude(params, v) * ln_abs - k).abs(),
    })
}

/// Resolves the threshold velocity for a choice at one `(k, z)` point.
fn threshold_velocity(
    params: &FrictionParams,
    choice: SteadyStateChoice,
    k: f64,
    z: f64,
) -> Result<f64> {
    match choice.constant_level(params) {
        Some(level) => presliding_velocity(k, level, z),
        None => self_consistent_velocity(params, k, z),
    }
}

/// Validates a grid, returning it sorted ascending.
///
/// Every value must satisfy `check`; duplicates are rejected so that grid
/// outputs are strictly ordered.
fn sorted_grid(
    values: &[f64],
    what: &str,
    check: impl Fn(f64) -> bool,
    requirement: &str,
) -> Result<Vec<f64>> {
    for &x in values {
        if !x.is_finite() || !check(x) {
            return Err(Error::Domain(format!(
                "{what} values must be {requirement}, got {x}"
            )));
        }
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain(format!("{what} values must be distinct")));
    }
    Ok(sorted)
}

/// Tabulates creep velocities over a `(k, z)` grid.
///
/// `F_ss` is resolved from `choice`; for [`SteadyStateChoice::SelfConsistent`]
/// the fixed point is solved at every grid point. Rows are ordered by
/// `(k, z)`, both ascending.
///
/// # Errors
///
/// [`Error::Domain`] for invalid parameters, empty or non-distinct grids,
/// `k ≤ 0`, or `z` outside `(0, 1)`; [`Error::FixedPointDiverged`] from the
/// self-consistent solve.
pub fn phase_diagram(
    params: &FrictionParams,
    choice: SteadyStateChoice,
    k_values: &[f64],
    z_grid: &[f64],
) -> Result<Vec<PhasePoint>> {
    params.validate()?;
    if k_values.is_empty() || z_grid.is_empty() {
        return Err(Error::Domain(
            "phase diagram requires nonempty k and z grids".into(),
        ));
    }
    let ks = sorted_grid(k_values, "rate", |k| k > 0.0, "positive")?;
    let zs = sorted_grid(z_grid, "presliding", |z| z > 0.0 && z < 1.0, "strictly inside (0, 1)")?;
    let mut rows = Vec::with_capacity(ks.len() * zs.len());
    for &k in &ks {
        for &z in &zs {
            rows.push(PhasePoint {
                k,
                z,
                v: threshold_velocity(params, choice, k, z)?,
            });
        }
    }
    Ok(rows)
}

/// Predicts the break-away force for one actuation rate.
///
/// Computes the threshold velocity `v_th` from the presliding profile at
/// `z_th` (resolving `F_ss` per `choice`), then evaluates the full
/// steady-state curve there: `F_ba = |F_ss(v_th)|`. For `sigma = 0` the
/// result lies in `[F_c, F_s]` and decreases monotonically in `k`.
///
/// # Errors
///
/// [`Error::Domain`] for invalid parameters, `k ≤ 0`, or `z_th` outside
/// `(0, 1)`; [`Error::FixedPointDiverged`] (carrying the last iterate and
/// residual) if the self-consistent solve exhausts its budget.
///
/// ```
/// use stickslip::{breakaway_force, FrictionParams, SteadyStateChoice};
/// let p = FrictionParams::default();
/// let pt = breakaway_force(&p, SteadyStateChoice::Average, 0.01, 0.95).unwrap();
/// assert!((pt.v_th - 0.155966).abs() < 1e-6);
/// assert!((pt.f_ba - 1.105104).abs() < 1e-6);
/// ```
pub fn breakaway_force(
    params: &FrictionParams,
    choice: SteadyStateChoice,
    k: f64,
    z_th: f64,
) -> Result<BreakawayPoint> {
    params.validate()?;
    if !z_th.is_finite() || z_th <= 0.0 || z_th >= 1.0 {
        return Err(Error::Domain(format!(
            "z_th must lie strictly inside (0, 1), got {z_th}"
        )));
    }
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::Domain(format!(
            "force rate k must be positive and finite, got {k}"
        )));
    }
    let v_th = threshold_velocity(params, choice, k, z_th)?;
    Ok(BreakawayPoint {
        k,
        v_th,
        f_ba: steady_state_magnitude(params, v_th),
    })
}

/// Maps [`breakaway_force`] over a rate grid.
///
/// The grid is sorted ascending; duplicates are rejected, so the resulting
/// sweep is strictly increasing in `k`.
///
/// # Errors
///
/// As for [`breakaway_force`], plus [`Error::Domain`] for an empty grid.
pub fn breakaway_sweep(
    params: &FrictionParams,
    choice: SteadyStateChoice,
    k_values: &[f64],
    z_th: f64,
) -> Result<BreakawaySweep> {
    if k_values.is_empty() {
        return Err(Error::Domain("rate grid must be nonempty".into()));
    }
    let ks = sorted_grid(k_values, "rate", |k| k > 0.0, "positive")?;
    let points = ks
        .iter()
        .map(|&k| breakaway_force(params, choice, k, z_th))
        .collect::<Result<Vec<_>>>()?;
    Ok(BreakawaySweep { z_th, points })
}

/// One row of the loop-area diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoopAreaPoint {
    /// Cycle amplitude expressed as a `z`-amplitude in `(0, 1]`
    /// (displacement amplitude times the scaling factor `s`).
    pub amplitude: f64,
    /// Enclosed friction–displacement area of the settled loop
    /// (energy dissipated per cycle, always ≥ 0).
    pub area: f64,
}

/// Result of [`loop_area_diagnostic`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoopAreaDiagnostic {
    /// Per-amplitude areas, in input amplitude order.
    pub points: Vec<LoopAreaPoint>,
    /// Least-squares slope of `ln(area)` versus `ln(amplitude)`; `None` when
    /// fewer than two distinct amplitudes are given.
    pub exponent: Option<f64>,
}

/// Steps per half-amplitude of the quasi-static cycle driver.
const CYCLE_STEPS: usize = 4000;
/// Maximum cycles driven while waiting for the loop to close.
const CYCLE_BUDGET: usize = 300;

/// Drives a settled symmetric hysteresis loop and integrates its area.
///
/// The displacement runs a triangle wave of `z`-amplitude `a` (positions
/// `±a/s`). After a lead-in stroke from rest, full cycles are driven until
/// the friction value at the positive turning point repeats within
/// `closure_tol`; the area of that settled cycle is returned. Loops whose
/// strokes saturate the presliding range (`a ≥ 1/2`) close after a single
/// cycle; smaller loops approach their closed shape geometrically.
fn settled_loop_area(params: &FrictionParams, a: f64, closure_tol: f64) -> Result<f64> {
    let h = a / params.s / CYCLE_STEPS as f64;
    let mut state = PreslidingState::idle();
    // Lead-in: rest → +A.
    for _ in 0..CYCLE_STEPS {
        state = advance_state_unchecked(params, &state, h);
    }
    let mut f_top = quasi_static_force(params, &state);
    for _ in 0..CYCLE_BUDGET {
        // One full cycle +A → −A → +A, integrating ∮F dx by the trapezoid
        // rule. Work done against friction, so the sum is nonnegative.
        let mut area = 0.0;
        let mut f_prev = quasi_static_force(params, &state);
        for _ in 0..2 * CYCLE_STEPS {
            state = advance_state_unchecked(params, &state, -h);
            let f = quasi_static_force(params, &state);
            area += 0.5 * (f_prev + f) * (-h);
            f_prev = f;
        }
        for _ in 0..2 * CYCLE_STEPS {
            state = advance_state_unchecked(params, &state, h);
            let f = quasi_static_force(params, &state);
            area += 0.5 * (f_prev + f) * h;
            f_prev = f;
        }
        let f_new = quasi_static_force(params, &state);
        if (f_new - f_top).abs() <= closure_tol {
            return Ok(area);
        }
        f_top = f_new;
    }
    Err(Error::NonClosedLoop {
        residual: (quasi_static_force(params, &state) - f_top).abs(),
        tolerance: closure_tol,
    })
}

/// Measures dissipated energy per cycle over a set of amplitudes and fits
/// the power-law exponent.
///
/// For each `z`-amplitude the friction state machine is driven through a
/// symmetric quasi-static displacement cycle until the loop closes, and the
/// enclosed friction–displacement area is integrated numerically. The
/// exponent is the least-squares slope of `ln(area)` against
/// `ln(amplitude)` — reported as a diagnostic, without asserting a value
/// (it approaches 2 for vanishing amplitudes and grows somewhat above 2
/// over moderate amplitude ranges).
///
/// # Errors
///
/// [`Error::Domain`] for invalid parameters or amplitudes outside `(0, 1]`;
/// [`Error::NonClosedLoop`] if a loop fails to settle within the cycle
/// budget.
pub fn loop_area_diagnostic(
    params: &FrictionParams,
    amplitudes: &[f64],
) -> Result<LoopAreaDiagnostic> {
    params.validate()?;
    for &a in amplitudes {
        if !a.is_finite() || a <= 0.0 || a > 1.0 {
            return Err(Error::Domain(format!(
                "loop amplitude must lie in (0, 1], got {a}"
            )));
        }
    }
    let closure_tol = 1e-9 * params.f_s;
    let points = amplitudes
        .iter()
        .map(|&a| {
            Ok(LoopAreaPoint {
                amplitude: a,
                area: settled_loop_area(params, a, closure_tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Least-squares slope in log–log coordinates.
    let exponent = if points.len() >= 2 {
        let n = points.len() as f64;
        let xs: Vec<f64> = points.iter().map(|p| p.amplitude.ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.area.ln()).collect();
        let x_mean = xs.iter().sum::<f64>() / n;
        let y_mean = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
        let sxy: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - x_mean) * (y - y_mean))
            .sum();
        (sxx > 1e-30).then(|| sxy / sxx)
    } else {
        None
    };
    Ok(LoopAreaDiagnostic { points, exponent })
}
