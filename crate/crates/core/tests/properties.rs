//! Property tests for the kernel, rings and reduced models.

use proptest::prelude::*;
use spot_rings::kernel::{fit, FitOptions, ZeroKind};
use spot_rings::odesim::{
    integrate, perturb, rhs_first, IntegrateOptions, ModePerturbation, PerturbTarget, SpotEnsemble,
};
use spot_rings::rings::{residuals, ring_function, stationary_radius};
use spot_rings::{Complex64, KernelParams, PdeParams, ReducedParams};

fn kernel_strategy() -> impl Strategy<Value = KernelParams> {
    (1e-4f64..1e-3, 8.0f64..25.0, 30.0f64..60.0, 0.15f64..0.25, 0.05f64..0.14)
        .prop_map(|(m0, a, b, d0, db)| KernelParams::new(m0, a, b, d0, db).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zeros_are_evenly_spaced_and_alternate(k in kernel_strategy()) {
        let zeros = k.find_zeros(k.d_b + 1e-6, k.d_b + 0.5);
        prop_assert!(zeros.len() >= 3);
        for w in zeros.windows(2) {
            prop_assert!((w[1].d_c - w[0].d_c - std::f64::consts::PI / k.beta).abs() < 1e-12);
            prop_assert!(w[0].kind != w[1].kind);
        }
        for z in &zeros {
            prop_assert!(k.value(z.d_c).abs() < 1e-12 * k.envelope(z.d_c));
            let slope = k.slope(z.d_c);
            prop_assert_eq!(z.kind == ZeroKind::Attractive, slope > 0.0);
        }
    }

    #[test]
    fn derivative_matches_finite_difference(k in kernel_strategy(), t in 0.0f64..1.0) {
        let d = k.d_b + 0.01 + 0.4 * t;
        let h = 1e-6;
        let fd = (k.value(d + h) - k.value(d - h)) / (2.0 * h);
        let exact = k.eval_deriv(d).unwrap();
        let scale = k.envelope(d) * (k.alpha + k.beta + 1.5 / d);
        prop_assert!((fd - exact).abs() < 1e-8 * scale);
    }

    #[test]
    fn fit_recovers_generating_parameters(
        m0 in 5e-4f64..9e-4, alpha in 12.0f64..20.0, beta in 38.0f64..48.0, d0 in 0.18f64..0.22,
    ) {
        let truth = KernelParams::new(m0, alpha, beta, d0, 0.12).unwrap();
        let samples: Vec<(f64, f64)> =
            (0..60).map(|i| 0.125 + 0.005 * i as f64).map(|d| (d, truth.value(d))).collect();
        let got = fit(&samples, 0.12, FitOptions::default()).unwrap().params;
        for (a, b) in [(got.m0, m0), (got.alpha, alpha), (got.beta, beta), (got.d0, d0)] {
            prop_assert!(((a - b) / b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn stationary_rings_solve_the_ring_function(n in 2usize..=12, branch in 1usize..=2) {
        let k = KernelParams::FIG1;
        let ring = stationary_radius(n, branch, &k).unwrap();
        prop_assert!(ring_function(ring.r0, n, &k).unwrap().abs() < 1e-14);
        let res = residuals(&ring, &ReducedParams::fig1(0.1), &k).unwrap();
        prop_assert!(res.model < 1e-14);
    }

    #[test]
    fn pair_forces_conserve_the_centroid(
        pts in prop::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 2..7),
    ) {
        let p: Vec<Complex64> = pts.iter().map(|(x, y)| Complex64::new(*x, *y)).collect();
        // Skip configurations inside the core.
        let min_d = (0..p.len())
            .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
            .map(|(i, j)| (p[i] - p[j]).norm())
            .fold(f64::INFINITY, f64::min);
        prop_assume!(min_d > 0.13);
        let v = rhs_first(&SpotEnsemble::first(p), &ReducedParams::fig1(0.1), &KernelParams::FIG1).unwrap();
        let total: Complex64 = v.iter().sum();
        let scale = v.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        prop_assert!(total.norm() < 1e-12 * scale);
    }

    #[test]
    fn mode_one_shift_is_a_translation(n in 2usize..=8, amp in -1e-2f64..1e-2) {
        let k = KernelParams::FIG1;
        let ring = stationary_radius(n, 1, &k).unwrap();
        let base = SpotEnsemble::first(ring.positions());
        let pert = ModePerturbation {
            m: 1,
            xi_plus: Complex64::new(0.0, 0.0),
            xi_minus: Complex64::new(amp, 0.0),
            target: PerturbTarget::Position,
        };
        let moved = perturb(&base, &pert).unwrap();
        for i in 0..n {
            for j in 0..n {
                let before = (base.p[i] - base.p[j]).norm();
                let after = (moved.p[i] - moved.p[j]).norm();
                prop_assert!((before - after).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn free_spot_speed_saturates(qx in -2e-3f64..2e-3, qy in -2e-3f64..2e-3, extra in 0.05f64..0.5) {
        let q = Complex64::new(qx, qy);
        prop_assume!(q.norm() > 1e-5);
        let params = ReducedParams::fig1(PdeParams::fig1().tau_c() + extra);
        let ens = SpotEnsemble::second(vec![Complex64::new(0.0, 0.0)], vec![q]);
        let t_end = 40.0 / params.m1;
        let traj = integrate(&ens, &params, &KernelParams::FIG1, t_end, &IntegrateOptions {
            sample_dt: t_end,
            ..Default::default()
        }).unwrap();
        let last = traj.ensemble(traj.times.len() - 1);
        let want = (params.m1 / params.m2).sqrt();
        prop_assert!((last.q[0].norm() - want).abs() < 1e-6 * want);
    }
}
