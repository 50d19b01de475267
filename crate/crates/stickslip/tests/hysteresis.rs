//! Hysteresis-loop behavior: closure, dissipated energy, amplitude scaling.
//!
//! The loop areas asserted here were derived in closed form for the settled
//! symmetric loop and cross-checked with 30-digit arithmetic: for a
//! `z`-amplitude `a` with span `c = min(2a, 1)` the settled loop anchors at
//! `F* = F_s·shape(c)/(2 − shape(c))` and encloses
//! `(2/s)·(−F*·c + (F_s + F*)·c²·(3/4 − ln c / 2))`; once the strokes
//! saturate (`2a ≥ 1`) the area is `(2·F_s/s)·(2a − 1/2)`. The numeric
//! driver integrates the same loops by the trapezoid rule at 4000 steps per
//! amplitude, which lands within ~7·10⁻⁸ of the closed forms.

// Constants keep the generator's full 17 digits even where f64 rounds
// the last one away.
#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use stickslip::{loop_area_diagnostic, reversal_cycle, FrictionParams};

fn defaults() -> FrictionParams {
    FrictionParams::default()
}

#[test]
fn settled_loop_areas_match_the_closed_forms() {
    let d = loop_area_diagnostic(&defaults(), &[0.2, 0.4, 0.8]).unwrap();
    let expected = [
        0.194_570_871_580_463_87,
        0.939_808_074_145_770_22,
        3.3,
    ];
    for (point, want) in d.points.iter().zip(expected) {
        assert_relative_eq!(point.area, want, max_relative = 5e-7);
    }
    // Log–log slope over these three amplitudes (frozen from the closed
    // forms). Moderately above the small-amplitude limit of 2.
    assert_relative_eq!(
        d.exponent.unwrap(),
        2.042_049_186_561_737_6,
        max_relative = 1e-5
    );
}

#[test]
fn saturated_amplitude_has_exact_linear_area() {
    // Both strokes clamp z at 1, so the loop is two full branch traversals
    // plus flat saturated segments: area = (2F_s/s)(2a − 1/2) exactly.
    let d = loop_area_diagnostic(&defaults(), &[0.5, 0.9]).unwrap();
    assert_relative_eq!(d.points[0].area, 1.5, max_relative = 5e-7);
    assert_relative_eq!(d.points[1].area, 3.9, max_relative = 5e-7);
}

#[test]
fn area_scales_inversely_with_the_presliding_scale() {
    // Displacement spans shrink by 1/s while forces are unchanged.
    let stiff = FrictionParams {
        s: 200.0,
        ..FrictionParams::default()
    };
    let d = loop_area_diagnostic(&stiff, &[0.4]).unwrap();
    assert_relative_eq!(
        d.points[0].area,
        0.939_808_074_145_770_22 / 200.0,
        max_relative = 5e-7
    );
}

#[test]
fn small_loops_approach_quadratic_scaling() {
    // Dissipation per cycle vanishes roughly quadratically with amplitude —
    // a soft check on the small-amplitude exponent.
    let d = loop_area_diagnostic(&defaults(), &[0.01, 0.02, 0.04]).unwrap();
    let n = d.exponent.unwrap();
    assert!((1.8..2.5).contains(&n), "exponent {n} outside (1.8, 2.5)");
}

#[test]
fn unsettled_small_loop_creeps_closed_over_cycles() {
    // At small amplitude the loop drifts for several cycles before
    // settling; the turning-point force converges geometrically.
    let params = defaults();
    let traj = reversal_cycle(&params, 0.2, 10).unwrap();
    let per_cycle = 16_000;
    let lead_in = 4_000;
    assert_eq!(traj.samples.len(), 1 + lead_in + 10 * per_cycle);
    let top = |cycle: usize| traj.samples[lead_in + cycle * per_cycle].f;
    let early_drift = (top(2) - top(1)).abs();
    let late_drift = (top(10) - top(9)).abs();
    assert!(late_drift <= 1e-6 * params.f_s, "late drift {late_drift}");
    assert!(late_drift < 1e-3 * early_drift);
}

#[test]
fn settled_cycle_record_reproduces_the_diagnostic_area() {
    let params = defaults();
    let traj = reversal_cycle(&params, 0.2, 10).unwrap();
    let last_cycle = &traj.samples[traj.samples.len() - 16_000 - 1..];
    let mut area = 0.0;
    for w in last_cycle.windows(2) {
        area += 0.5 * (w[0].f + w[1].f) * (w[1].x - w[0].x);
    }
    assert!(area >= 0.0);
    assert_relative_eq!(area, 0.194_570_871_580_463_87, max_relative = 1e-5);
}

#[test]
fn forces_and_distances_stay_inside_the_invariant_set() {
    let params = defaults();
    let traj = reversal_cycle(&params, 0.7, 3).unwrap();
    for s in &traj.samples {
        assert!((0.0..=1.0).contains(&s.z));
        assert!(s.f.abs() <= params.f_s * (1.0 + 1e-12));
        assert_eq!(s.f, s.u);
    }
    assert!(traj.samples.windows(2).all(|w| w[0].t < w[1].t));
}
