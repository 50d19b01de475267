//! Parameter identification by nonlinear least squares.
//!
//! Two fitting targets are supported, both recovering [`FrictionParams`]
//! fields from two-column measurement data:
//!
//! * [`fit_stribeck`] — fits the steady-state curve to `(v, F)` samples,
//!   the classic constant-velocity friction identification experiment;
//! * [`fit_breakaway_curve`] — fits the analytic break-away curve (Average
//!   closure) to `(k, F_ba)` samples, the experiment where the actuation
//!   ramp rate is varied and the observed break-away force recorded.
//!
//! The optimizer is a damped Gauss–Newton iteration: the Jacobian is
//! evaluated by central differences (relative step `10⁻⁶`), the normal
//! equations are solved by Cholesky factorization (with escalating diagonal
//! jitter if near-singular), and a backtracking line search accepts only
//! strict cost decreases, so the objective is monotonically non-increasing
//! across accepted iterations. Every iterate is projected onto the
//! configured box bounds and the ordering constraint `F_s ≥ F_c`. The
//! algorithm is deterministic given data, initial guess, and options.
//!
//! `delta_exp` is only fitted when explicitly enabled — it is weakly
//! identifiable from sparse velocity grids, and most published fits fix it.
//! The presliding scale `s` is never fitted (it is not observable from
//! either data set) and is carried through from the initial guess.

use crate::breakaway;
use crate::error::{Error, Result};
use crate::friction::{stribeck_magnitude, stribeck_unchecked};
use crate::params::FrictionParams;
use nalgebra::{DMatrix, DVector};

/// Box bounds for the fitted parameters, as `(lower, upper)` pairs.
///
/// The defaults are loose physical ranges; tighten them when prior
/// knowledge is available. Bounds are enforced by projection after every
/// accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitBounds {
    /// Coulomb level `F_c`.
    pub f_c: (f64, f64),
    /// Stiction level `F_s`.
    pub f_s: (f64, f64),
    /// Viscous coefficient `sigma`.
    pub sigma: (f64, f64),
    /// Stribeck velocity scale `V`.
    pub v: (f64, f64),
    /// Stribeck shape exponent `delta_exp`.
    pub delta_exp: (f64, f64),
}

impl Default for FitBounds {
    fn default() -> Self {
        Self {
            f_c: (1e-6, 1e6),
            f_s: (1e-6, 1e6),
            sigma: (0.0, 1e6),
            v: (1e-9, 1e6),
            delta_exp: (0.05, 8.0),
        }
    }
}

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitOptions {
    /// Box bounds enforced on every iterate.
    pub bounds: FitBounds,
    /// Also fit `delta_exp` (default: fixed at the initial guess).
    pub fit_delta_exp: bool,
    /// Iteration budget.
    pub max_iterations: usize,
    /// Convergence: relative parameter step below this value.
    pub step_tolerance: f64,
    /// If set, `converged` additionally requires the final residual norm to
    /// be at or below this value.
    pub residual_tolerance: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            bounds: FitBounds::default(),
            fit_delta_exp: false,
            max_iterations: 500,
            step_tolerance: 1e-10,
            residual_tolerance: None,
        }
    }
}

/// Outcome of a fit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    /// Identified parameters (inactive fields carried from the initial
    /// guess). Always satisfies the [`FrictionParams`] invariants.
    pub params: FrictionParams,
    /// Euclidean norm of the final residual vector.
    pub residual_norm: f64,
    /// Number of accepted Gauss–Newton iterations.
    pub iterations: usize,
    /// Whether the step-size criterion (and the residual tolerance, if
    /// configured) was met within the budget.
    pub converged: bool,
}

/// Identity of one fittable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Param {
    Fc,
    Fs,
    Sigma,
    V,
    Delta,
}

impl Param {
    fn get(self, p: &FrictionParams) -> f64 {
        match self {
            Self::Fc => p.f_c,
            Self::Fs => p.f_s,
            Self::Sigma => p.sigma,
            Self::V => p.v,
            Self::Delta => p.delta_exp,
        }
    }

    fn set(self, p: &mut FrictionParams, value: f64) {
        match self {
            Self::Fc => p.f_c = value,
            Self::Fs => p.f_s = value,
            Self::Sigma => p.sigma = value,
            Self::V => p.v = value,
            Self::Delta => p.delta_exp = value,
        }
    }

    fn range(self, b: &FitBounds) -> (f64, f64) {
        match self {
            Self::Fc => b.f_c,
            Self::Fs => b.f_s,
            Self::Sigma => b.sigma,
            Self::V => b.v,
            Self::Delta => b.delta_exp,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Fc => "F_c",
            Self::Fs => "F_s",
            Self::Sigma => "sigma",
            Self::V => "V",
            Self::Delta => "delta_exp",
        }
    }
}

/// Projects a parameter vector onto the box bounds and `F_s ≥ F_c`.
fn project(active: &[Param], bounds: &FitBounds, base: &FrictionParams, theta: &[f64]) -> FrictionParams {
    let mut p = *base;
    for (&which, &value) in active.iter().zip(theta) {
        let (lo, hi) = which.range(bounds);
        which.set(&mut p, value.clamp(lo, hi));
    }
    if p.f_s < p.f_c {
        p.f_s = p.f_c;
    }
    p
}

/// Sum of squared residuals, or infinity when any residual is non-finite.
fn cost_of(residuals: &[f64]) -> f64 {
    let mut c = 0.0;
    for &r in residuals {
        if !r.is_finite() {
            return f64::INFINITY;
        }
        c += r * r;
    }
    c
}

/// Core damped Gauss–Newton loop over the active parameter subset.
///
/// `residual_fn` evaluates the residual vector for a candidate parameter
/// set; it must tolerate transiently infeasible parameters (they arise
/// during finite differencing) by returning non-finite entries, which the
/// line search rejects.
#[allow(clippy::too_many_lines)]
fn gauss_newton(
    init: &FrictionParams,
    active: &[Param],
    options: &FitOptions,
    residual_fn: impl Fn(&FrictionParams) -> Vec<f64>,
) -> Result<FitResult> {
    let bounds = &options.bounds;
    for &which in active {
        let (lo, hi) = which.range(bounds);
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain(format!(
                "bounds for {} are empty: ({lo}, {hi})",
                which.name()
            )));
        }
        let value = which.get(init);
        if value < lo || value > hi {
            return Err(Error::Domain(format!(
                "initial {} = {value} lies outside its bounds ({lo}, {hi})",
                which.name()
            )));
        }
    }
    if options.max_iterations == 0 || options.step_tolerance <= 0.0 {
        return Err(Error::Domain(
            "max_iterations must be ≥ 1 and step_tolerance positive".into(),
        ));
    }

    let mut theta: Vec<f64> = active.iter().map(|p| p.get(init)).collect();
    let mut params = project(active, bounds, init, &theta);
    let mut residuals = residual_fn(&params);
    let mut cost = cost_of(&residuals);
    if !cost.is_finite() {
        return Err(Error::Numerical(
            "residuals are non-finite at the initial guess".into(),
        ));
    }
    let n_res = residuals.len();
    let n_par = active.len();
    let mut iterations = 0;
    let mut converged = cost == 0.0;

    while !converged && iterations < options.max_iterations {
        // Central-difference Jacobian at the current iterate.
        let mut jac = DMatrix::zeros(n_res, n_par);
        for (j, &which) in active.iter().enumerate() {
            let h = 1e-6 * theta[j].abs().max(1e-3);
            let mut plus = params;
            which.set(&mut plus, theta[j] + h);
            let mut minus = params;
            which.set(&mut minus, theta[j] - h);
            let rp = residual_fn(&plus);
            let rm = residual_fn(&minus);
            for i in 0..n_res {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        if jac.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical(
                "Jacobian is non-finite; residual model breaks down near the iterate".into(),
            ));
        }
        let r_vec = DVector::from_column_slice(&residuals);
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * r_vec;

        // Cholesky with escalating diagonal jitter for near-singular systems.
        let scale = (jtj.trace() / n_par as f64).max(f64::MIN_POSITIVE);
        let mut delta = None;
        let mut jitter = 0.0;
        for _ in 0..8 {
            let mut system = jtj.clone();
            for d in 0..n_par {
                system[(d, d)] += jitter;
            }
            if let Some(chol) = system.cholesky() {
                delta = Some(chol.solve(&jtr));
                break;
            }
            jitter = if jitter == 0.0 { 1e-12 * scale } else { jitter * 100.0 };
        }
        let delta = delta.ok_or_else(|| {
            Error::Numerical("normal equations are singular beyond jitter repair".into())
        })?;

        // Backtracking line search on the full Gauss–Newton direction,
        // projecting every candidate onto the feasible set.
        let mut accepted = false;
        let mut alpha = 1.0;
        for _ in 0..25 {
            let candidate: Vec<f64> = theta
                .iter()
                .enumerate()
                .map(|(j, &t)| t - alpha * delta[j])
                .collect();
            let cand_params = project(active, bounds, init, &candidate);
            let cand_theta: Vec<f64> = active.iter().map(|p| p.get(&cand_params)).collect();
            let cand_residuals = residual_fn(&cand_params);
            let cand_cost = cost_of(&cand_residuals);
            if cand_cost < cost {
                let step_sq: f64 = cand_theta
                    .iter()
                    .zip(&theta)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let norm_sq: f64 = theta.iter().map(|t| t * t).sum();
                let rel_step = (step_sq / norm_sq.max(f64::MIN_POSITIVE)).sqrt();
                theta = cand_theta;
                params = cand_params;
                residuals = cand_residuals;
                cost = cand_cost;
                iterations += 1;
                accepted = true;
                if rel_step < options.step_tolerance || cost == 0.0 {
                    converged = true;
                }
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // No descent along the Gauss–Newton direction: the iterate is
            // numerically stationary.
            converged = true;
        }
    }

    let residual_norm = cost.sqrt();
    if let Some(tol) = options.residual_tolerance {
        converged = converged && residual_norm <= tol;
    }
    params.validate()?;
    Ok(FitResult {
        params,
        residual_norm,
        iterations,
        converged,
    })
}

/// Checks two-column data for finiteness.
fn check_finite(data: &[(f64, f64)], what: &str) -> Result<()> {
    for &(a, b) in data {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "{what} data must be finite, got ({a}, {b})"
            )));
        }
    }
    Ok(())
}

/// Fits the steady-state (Stribeck) curve to `(velocity, force)` samples.
///
/// Free parameters: `F_c`, `F_s`, `sigma`, `V`, plus `delta_exp` when
/// [`FitOptions::fit_delta_exp`] is set. Minimizes the sum of squared
/// residuals of the steady-state curve subject to the box bounds and
/// `F_s ≥ F_c`, starting from `init`.
///
/// # Errors
///
/// * [`Error::Identifiability`] — fewer than 5 points, repeated
///   velocities, or speeds not spanning both sides of the Stribeck scale
///   `init.v` (the knee must be bracketed for `V` to be identifiable);
/// * [`Error::Domain`] — non-finite data, invalid `init`, or `init`
///   outside the bounds;
/// * [`Error::Numerical`] — irreparably singular normal equations.
// The only internal expect is a sort comparator; data are checked finite.
#[allow(clippy::missing_panics_doc)]
pub fn fit_stribeck(
    data: &[(f64, f64)],
    init: &FrictionParams,
    options: &FitOptions,
) -> Result<FitResult> {
    init.validate()?;
    check_finite(data, "stribeck")?;
    if data.len() < 5 {
        return Err(Error::Identifiability(format!(
            "need at least 5 (v, F) points, got {}",
            data.len()
        )));
    }
    let mut speeds: Vec<f64> = data.iter().map(|&(v, _)| v).collect();
    speeds.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    if speeds.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Identifiability(
            "velocities must be distinct".into(),
        ));
    }
    let below = data.iter().any(|&(v, _)| v.abs() < init.v);
    let above = data.iter().any(|&(v, _)| v.abs() > init.v);
    if !(below && above) {
        return Err(Error::Identifiability(format!(
            "speeds must span both sides of the Stribeck scale V = {}",
            init.v
        )));
    }
    let mut active = vec![Param::Fc, Param::Fs, Param::Sigma, Param::V];
    if options.fit_delta_exp {
        active.push(Param::Delta);
    }
    let data = data.to_vec();
    gauss_newton(init, &active, options, move |p| {
        data.iter()
            .map(|&(v, f)| stribeck_unchecked(p, v) - f)
            .collect()
    })
}

/// Fits the analytic break-away curve to `(k, F_ba)` samples.
///
/// The model is the Average-closure prediction at fixed threshold `z_th`:
/// the threshold velocity `v_th = k / (F̂_ss·|ln z_th|)` with
/// `F̂_ss = F_c + (F_s − F_c)/2`, evaluated on the steady-state curve.
/// Free parameters: `F_c`, `F_s`, `V`, plus `delta_exp` when enabled;
/// `sigma` is carried fixed from `init`.
///
/// # Errors
///
/// As for [`fit_stribeck`], with [`Error::Identifiability`] for fewer than
/// 4 points or repeated rates, and [`Error::Domain`] for non-positive
/// rates or `z_th` outside `(0, 1)`.
// The only internal expect is a sort comparator; data are checked finite.
#[allow(clippy::missing_panics_doc)]
pub fn fit_breakaway_curve(
    data: &[(f64, f64)],
    init: &FrictionParams,
    z_th: f64,
    options: &FitOptions,
) -> Result<FitResult> {
    init.validate()?;
    check_finite(data, "break-away")?;
    if !z_th.is_finite() || z_th <= 0.0 || z_th >= 1.0 {
        return Err(Error::Domain(format!(
            "z_th must lie strictly inside (0, 1), got {z_th}"
        )));
    }
    for &(k, _) in data {
        if k <= 0.0 {
            return Err(Error::Domain(format!("rates must be positive, got {k}")));
        }
    }
    if data.len() < 4 {
        return Err(Error::Identifiability(format!(
            "need at least 4 (k, F_ba) points, got {}",
            data.len()
        )));
    }
    let mut rates: Vec<f64> = data.iter().map(|&(k, _)| k).collect();
    rates.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    if rates.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Identifiability("rates must be distinct".into()));
    }
    let mut active = vec![Param::Fc, Param::Fs, Param::V];
    if options.fit_delta_exp {
        active.push(Param::Delta);
    }
    let ln_abs = -z_th.ln();
    let data = data.to_vec();
    gauss_newton(init, &active, options, move |p| {
        let level = p.average_steady_state();
        data.iter()
            .map(|&(k, f_ba)| {
                if level <= 0.0 {
                    return f64::INFINITY;
                }
                let v_th = k / (level * ln_abs);
                stribeck_magnitude(p, v_th) + p.sigma * v_th - f_ba
            })
            .collect()
    })
}

/// Convenience for tests and the CLI: evaluate the Average-closure
/// break-away curve for the given parameters over a rate grid.
///
/// # Panics
///
/// Panics on invalid `params`, non-positive rates, or `z_th` outside
/// `(0, 1)`; intended for synthetic-data generation from known-good
/// inputs. Use [`crate::breakaway_force`] for fallible evaluation.
#[must_use]
pub fn breakaway_model(params: &FrictionParams, z_th: f64, rates: &[f64]) -> Vec<(f64, f64)> {
    rates
        .iter()
        .map(|&k| {
            let pt = breakaway::breakaway_force(
                params,
                breakaway::SteadyStateChoice::Average,
                k,
                z_th,
            )
            .expect("valid grid");
            (k, pt.f_ba)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friction::stribeck;

    fn synth_stribeck(params: &FrictionParams, speeds: &[f64]) -> Vec<(f64, f64)> {
        speeds
            .iter()
            .map(|&v| (v, stribeck(params, v).unwrap()))
            .collect()
    }

    fn speed_grid() -> Vec<f64> {
        let mut g = Vec::new();
        for i in 1..=20 {
            let v = 0.03 * f64::from(i);
            g.push(v);
            g.push(-v);
        }
        g.push(0.005);
        g.push(-0.005);
        g
    }

    #[test]
    fn stribeck_round_trip_recovers_parameters() {
        let truth = FrictionParams {
            sigma: 0.2,
            ..FrictionParams::default()
        };
        let data = synth_stribeck(&truth, &speed_grid());
        let init = FrictionParams {
            f_c: 1.2,
            f_s: 1.3,
            sigma: 0.1,
            v: 0.13,
            ..truth
        };
        let fit = fit_stribeck(&data, &init, &FitOptions::default()).unwrap();
        assert!(fit.converged, "did not converge: {fit:?}");
        assert!(fit.residual_norm <= 1e-8 * truth.f_c);
        assert!((fit.params.f_c - truth.f_c).abs() / truth.f_c < 1e-3);
        assert!((fit.params.f_s - truth.f_s).abs() / truth.f_s < 1e-3);
        assert!((fit.params.sigma - truth.sigma).abs() / truth.sigma < 1e-3);
        assert!((fit.params.v - truth.v).abs() / truth.v < 1e-3);
    }

    #[test]
    fn pure_coulomb_collapses_the_gap() {
        let truth = FrictionParams {
            f_s: 1.0,
            ..FrictionParams::default()
        };
        let data = synth_stribeck(&truth, &speed_grid());
        let init = FrictionParams {
            f_s: 1.2,
            ..FrictionParams::default()
        };
        let fit = fit_stribeck(&data, &init, &FitOptions::default()).unwrap();
        assert!(
            fit.params.f_s - fit.params.f_c <= 1e-6,
            "gap = {}",
            fit.params.f_s - fit.params.f_c
        );
    }

    #[test]
    fn stribeck_identifiability_errors() {
        let p = FrictionParams::default();
        let two = synth_stribeck(&p, &[0.05, 0.3]);
        assert!(matches!(
            fit_stribeck(&two, &p, &FitOptions::default()),
            Err(Error::Identifiability(_))
        ));
        let equal: Vec<_> = (0..6).map(|_| (0.2, 1.1)).collect();
        assert!(matches!(
            fit_stribeck(&equal, &p, &FitOptions::default()),
            Err(Error::Identifiability(_))
        ));
        let one_sided = synth_stribeck(&p, &[0.2, 0.3, 0.4, 0.5, 0.6]);
        assert!(matches!(
            fit_stribeck(&one_sided, &p, &FitOptions::default()),
            Err(Error::Identifiability(_))
        ));
    }

    #[test]
    fn infeasible_init_is_a_domain_error() {
        let p = FrictionParams::default();
        let data = synth_stribeck(&p, &speed_grid());
        let mut options = FitOptions::default();
        options.bounds.f_c = (2.0, 3.0);
        assert!(matches!(
            fit_stribeck(&data, &p, &options),
            Err(Error::Domain(_))
        ));
    }

    /// Rates spanning the decaying part of the break-away curve. The curve's
    /// decay constant is `F̂·|ln z_th|·V ≈ 0.0064` for the defaults, so only
    /// rates of that order carry information about `(F_s, V)`; a grid of
    /// rates ≫ 0.1 sees a flat curve at `F_c` and cannot identify the gap.
    fn rate_grid() -> Vec<f64> {
        (0..14).map(|i| 5e-4 * 2.0_f64.powi(i)).collect()
    }

    #[test]
    fn breakaway_round_trip_recovers_parameters() {
        let truth = FrictionParams::default();
        let data = breakaway_model(&truth, 0.95, &rate_grid());
        let init = FrictionParams {
            f_c: 1.15,
            f_s: 1.32,
            v: 0.085,
            ..truth
        };
        let fit = fit_breakaway_curve(&data, &init, 0.95, &FitOptions::default()).unwrap();
        assert!(fit.converged, "did not converge: {fit:?}");
        assert!(fit.residual_norm <= 1e-8 * truth.f_c);
        assert!((fit.params.f_c - truth.f_c).abs() / truth.f_c < 1e-2);
        assert!((fit.params.f_s - truth.f_s).abs() / truth.f_s < 1e-2);
        assert!((fit.params.v - truth.v).abs() / truth.v < 1e-2);
    }

    #[test]
    fn flat_breakaway_data_collapses_the_gap() {
        let data: Vec<(f64, f64)> = rate_grid().iter().map(|&k| (k, 1.2)).collect();
        let init = FrictionParams::default();
        let fit = fit_breakaway_curve(&data, &init, 0.95, &FitOptions::default()).unwrap();
        assert!(
            fit.params.f_s - fit.params.f_c <= 1e-4,
            "gap = {}",
            fit.params.f_s - fit.params.f_c
        );
        assert!((fit.params.f_c - 1.2).abs() < 1e-3);
    }

    #[test]
    fn breakaway_identifiability_errors() {
        let p = FrictionParams::default();
        assert!(matches!(
            fit_breakaway_curve(&[(1.0, 1.2)], &p, 0.95, &FitOptions::default()),
            Err(Error::Identifiability(_))
        ));
        let dup = vec![(1.0, 1.2), (1.0, 1.2), (2.0, 1.1), (3.0, 1.05)];
        assert!(matches!(
            fit_breakaway_curve(&dup, &p, 0.95, &FitOptions::default()),
            Err(Error::Identifiability(_))
        ));
        assert!(matches!(
            fit_breakaway_curve(
                &[(0.0, 1.2), (1.0, 1.1), (2.0, 1.05), (3.0, 1.02)],
                &p,
                0.95,
                &FitOptions::default()
            ),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn residual_never_increases_from_init() {
        let truth = FrictionParams::default();
        let data = synth_stribeck(&truth, &speed_grid());
        let init = FrictionParams {
            f_c: 1.3,
            f_s: 1.35,
            v: 0.2,
            ..truth
        };
        let initial_cost: f64 = data
            .iter()
            .map(|&(v, f)| (stribeck(&init, v).unwrap() - f).powi(2))
            .sum::<f64>()
            .sqrt();
        let fit = fit_stribeck(&data, &init, &FitOptions::default()).unwrap();
        assert!(fit.residual_norm <= initial_cost);
    }

    #[test]
    fn delta_exponent_recoverable_from_rich_data() {
        let truth = FrictionParams {
            delta_exp: 1.7,
            ..FrictionParams::default()
        };
        let data = synth_stribeck(&truth, &speed_grid());
        let init = FrictionParams {
            delta_exp: 1.3,
            f_c: 1.1,
            f_s: 1.4,
            ..truth
        };
        let options = FitOptions {
            fit_delta_exp: true,
            ..FitOptions::default()
        };
        let fit = fit_stribeck(&data, &init, &options).unwrap();
        assert!(
            (fit.params.delta_exp - truth.delta_exp).abs() < 1e-2,
            "delta_exp = {}",
            fit.params.delta_exp
        );
    }
}
