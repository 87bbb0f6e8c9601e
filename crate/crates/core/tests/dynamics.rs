//! Reduced-model runs against the analytic verdicts.

use spot_rings::dopri::{self, DopriOptions};
use spot_rings::odesim::{
    empirical_verdict, integrate, rhs_state, perturb, IntegrateOptions, Model, ModePerturbation, SpotEnsemble,
    Termination,
};
use spot_rings::rings::stationary_radius;
use spot_rings::{KernelParams, ReducedParams};

const K: KernelParams = KernelParams::FIG1;

#[test]
fn centroid_drift_stays_at_tolerance_level() {
    let params = ReducedParams::fig1(0.1);
    let ring = stationary_radius(5, 1, &K).unwrap();
    let start = perturb(&SpotEnsemble::first(ring.positions()), &ModePerturbation::position(2, 0.02)).unwrap();
    let traj = integrate(&start, &params, &K, 2000.0, &IntegrateOptions::default()).unwrap();
    let c0 = start.centroid();
    let c1 = traj.ensemble(traj.times.len() - 1).centroid();
    assert!((c1 - c0).norm() < 1e-9, "{:e}", (c1 - c0).norm());
}

#[test]
fn stable_ring_recovers_from_radial_perturbation() {
    let params = ReducedParams::fig1(0.1);
    let ring = stationary_radius(3, 1, &K).unwrap();
    let v = empirical_verdict(&ring, Model::First, &params, &K, 0, 0.01, 2000.0).unwrap();
    assert!(!v.unstable);
    assert!(v.final_distance < 1e-3 * v.initial_distance);
}

#[test]
fn unstable_ring_departs_before_forty_thousand() {
    let params = ReducedParams::fig1(0.1);
    let ring = stationary_radius(4, 1, &K).unwrap();
    let v = empirical_verdict(&ring, Model::First, &params, &K, 2, 1e-4, 4e4).unwrap();
    assert!(v.unstable, "{v:?}");
}

#[test]
fn forward_then_backward_returns() {
    let params = ReducedParams::fig1(0.1);
    let ring = stationary_radius(4, 2, &K).unwrap();
    let start = perturb(&SpotEnsemble::first(ring.positions()), &ModePerturbation::position(2, 0.01)).unwrap();
    let opts = IntegrateOptions::default();
    let fwd = integrate(&start, &params, &K, 50.0, &opts).unwrap();
    assert_eq!(fwd.termination, Termination::Completed);
    let mid = fwd.states.last().unwrap().clone();
    // Reverse time by integrating the negated field.
    let back = dopri::integrate(
        |_, y: &[f64], dy: &mut [f64]| {
            rhs_state(Model::First, y, &params, &K, 0.0, dy)?;
            dy.iter_mut().for_each(|v| *v = -*v);
            Ok::<(), spot_rings::Error>(())
        },
        0.0,
        &mid,
        50.0,
        &[50.0],
        &DopriOptions { rtol: opts.rtol, atol: opts.atol, ..Default::default() },
    )
    .unwrap();
    let end = back.states.last().unwrap();
    let worst = end
        .iter()
        .zip(start.to_state())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 10.0 * opts.rtol, "{worst:e}");
}
