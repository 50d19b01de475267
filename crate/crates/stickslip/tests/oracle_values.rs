//! High-precision pins for the analytic machinery.
//!
//! Every constant in this file was computed independently with 30-digit
//! arbitrary-precision arithmetic and frozen here to the first 17
//! significant digits. These tests protect the formulas against silent
//! drift (sign conventions, misplaced logarithms, off-by-one in the
//! closures) far below any physically meaningful tolerance.

// Constants keep the generator's full 17 digits even where f64 rounds
// the last one away.
#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use stickslip::{
    breakaway_force, friction_force, phase_diagram, presliding_shape, presliding_velocity,
    stribeck, FrictionParams, MotionDirection, PreslidingState, SteadyStateChoice,
};

fn defaults() -> FrictionParams {
    FrictionParams::default()
}

#[test]
fn stribeck_curve_values() {
    let p = defaults();
    // At v = V the exponential is exactly e⁻¹.
    assert_relative_eq!(
        stribeck(&p, 0.1).unwrap(),
        1.183_939_720_585_721_2,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        stribeck(&p, -0.1).unwrap(),
        -1.183_939_720_585_721_2,
        max_relative = 1e-14
    );
    // Limits: stiction level as v → 0⁺, Coulomb level as v → ∞.
    assert_relative_eq!(stribeck(&p, 1e-12).unwrap(), 1.5, max_relative = 1e-6);
    assert_relative_eq!(stribeck(&p, 1e9).unwrap(), 1.0, max_relative = 1e-6);
    assert_eq!(stribeck(&p, 0.0).unwrap(), 0.0);
}

#[test]
fn shape_function_values() {
    assert_eq!(presliding_shape(1.0).unwrap(), 1.0);
    assert_eq!(presliding_shape(0.0).unwrap(), 0.0);
    let at_inv_e = presliding_shape((-1.0f64).exp()).unwrap();
    assert_relative_eq!(at_inv_e, 0.735_758_882_342_884_64, max_relative = 1e-14);
    assert_relative_eq!(at_inv_e, 2.0 / std::f64::consts::E, max_relative = 1e-14);
}

#[test]
fn friction_force_composite_value() {
    // Fresh branch (F_r = 0) at z = 1/e evaluated on the moving curve:
    // the force is stribeck(0.1)·shape(1/e).
    let p = defaults();
    let state = PreslidingState {
        z: (-1.0f64).exp(),
        f_r: 0.0,
        dir: MotionDirection::Positive,
    };
    assert_relative_eq!(
        friction_force(&p, &state, 0.1).unwrap(),
        0.871_094_165_579_497_34,
        max_relative = 1e-14
    );
}

#[test]
fn presliding_velocity_at_the_default_threshold() {
    // v(z_th) = k/(F·|ln 0.95|) with |ln 0.95| = 0.051293294387550533.
    assert_relative_eq!(
        presliding_velocity(1.0, 1.0, 0.95).unwrap(),
        19.495_725_746_223_689,
        max_relative = 1e-14
    );
    // Average closure at k = 0.01: v_th and the resulting prediction.
    let p = defaults();
    let pt = breakaway_force(&p, SteadyStateChoice::Average, 0.01, 0.95).unwrap();
    assert_relative_eq!(pt.v_th, 0.155_965_805_969_789_51, max_relative = 1e-14);
    assert_relative_eq!(pt.f_ba, 1.105_103_968_739_361_2, max_relative = 1e-14);
}

#[test]
fn phase_diagram_point_value() {
    let p = defaults();
    let rows = phase_diagram(&p, SteadyStateChoice::Average, &[0.01], &[0.5]).unwrap();
    assert_relative_eq!(rows[0].v, 0.011_541_560_327_111_707, max_relative = 1e-14);
}

#[test]
fn self_consistent_fixed_points() {
    // (k, v*, F_ba) triples of the exact closure v·|F_ss(v)|·|ln z_th| = k.
    let cases = [
        (0.01, 0.180_086_047_559_565_06, 1.082_578_356_869_946),
        (0.1, 1.949_572_571_295_594_8, 1.000_000_001_706_412),
        (1.0, 19.495_725_746_223_689, 1.0),
        (10.0, 194.957_257_462_236_89, 1.0),
    ];
    let p = defaults();
    for (k, v_star, f_ba) in cases {
        let pt = breakaway_force(&p, SteadyStateChoice::SelfConsistent, k, 0.95).unwrap();
        assert_relative_eq!(pt.v_th, v_star, max_relative = 1e-9);
        assert_relative_eq!(pt.f_ba, f_ba, max_relative = 1e-9);
    }
}

#[test]
fn choice_levels_pin_the_velocity_ordering() {
    // Larger assumed steady-state level → slower creep at the threshold,
    // hence the ordering stiction < average < coulomb in v_th.
    let p = defaults();
    let k = 0.3;
    let c = breakaway_force(&p, SteadyStateChoice::CoulombLevel, k, 0.95).unwrap();
    let a = breakaway_force(&p, SteadyStateChoice::Average, k, 0.95).unwrap();
    let s = breakaway_force(&p, SteadyStateChoice::StictionLevel, k, 0.95).unwrap();
    assert!(s.v_th < a.v_th && a.v_th < c.v_th);
    // And exactly inversely proportional to the level.
    assert_relative_eq!(c.v_th * 1.0, s.v_th * 1.5, max_relative = 1e-12);
}
