//! Block spectra against the finite-difference Jacobian of the full reduced
//! model, and the count of exactly-zero eigenvalues.

mod common;

use spot_rings::reproduce::table_ring;
use spot_rings::stability::{full_spectrum, match_spectra, verdict};
use spot_rings::{KernelParams, PdeParams, ReducedParams, RingKind, Verdict};

const K: KernelParams = KernelParams::FIG1;

fn distance(kind: RingKind, n: usize, branch: usize, tau: f64) -> f64 {
    let params = ReducedParams::fig1(tau);
    let ring = table_ring(kind, n, branch, &params, &K).unwrap();
    let fd = common::fd_spectrum(&ring, &params, &K).unwrap();
    let blocks = full_spectrum(&ring, &params, &K).unwrap();
    match_spectra(&fd, &blocks)
}

#[test]
fn stationary_blocks_match_jacobian() {
    for n in 2..=8 {
        for branch in 1..=2 {
            let d = distance(RingKind::Stationary, n, branch, 0.1);
            assert!(d < 1e-6, "N={n} branch {branch}: {d:e}");
        }
    }
}

#[test]
fn rotating_blocks_match_jacobian() {
    let tau = PdeParams::fig1().tau_c() + 0.01;
    for n in 2..=8 {
        for branch in 1..=2 {
            let d = distance(RingKind::Rotating, n, branch, tau);
            assert!(d < 1e-6, "N={n} branch {branch}: {d:e}");
        }
    }
}

#[test]
fn traveling_pair_matches_jacobian() {
    let tau = PdeParams::fig1().tau_c() + 0.01;
    for branch in 1..=2 {
        let d = distance(RingKind::Traveling, 2, branch, tau);
        assert!(d < 1e-6, "branch {branch}: {d:e}");
    }
}

#[test]
fn traveling_blocks_miss_mode_coupling_beyond_two_spots() {
    // The 4x4 block leaves out the coupling of mode m to m+2; the error is of
    // the size of M1.
    let tau = PdeParams::fig1().tau_c() + 0.01;
    let m1 = ReducedParams::fig1(tau).m1;
    for n in 3..=6 {
        let d = distance(RingKind::Traveling, n, 2, tau);
        assert!(d > 0.5 * m1 && d < 1.5 * m1, "N={n}: {d:e}");
    }
}

#[test]
fn zero_eigenvalues_match_symmetries() {
    for (kind, tau) in [
        (RingKind::Stationary, 0.1),
        (RingKind::Rotating, PdeParams::fig1().tau_c() + 0.01),
    ] {
        let params = ReducedParams::fig1(tau);
        for n in 2..=8 {
            for branch in 1..=2 {
                let ring = table_ring(kind, n, branch, &params, &K).unwrap();
                let fd = common::fd_spectrum(&ring, &params, &K).unwrap();
                let zeros = fd.iter().filter(|z| z.norm() < 1e-8).count();
                assert_eq!(zeros, common::symmetry_zero_count(kind, n), "{kind} N={n} b{branch}");
            }
        }
    }
}

#[test]
fn verdict_agrees_with_jacobian_sign() {
    // Outside the symmetry zeros, the largest real part of the Jacobian
    // spectrum has the sign the verdict reports.
    for (kind, tau) in [
        (RingKind::Stationary, 0.1),
        (RingKind::Rotating, PdeParams::fig1().tau_c() + 0.01),
    ] {
        let params = ReducedParams::fig1(tau);
        for n in 2..=8 {
            for branch in 1..=2 {
                let ring = table_ring(kind, n, branch, &params, &K).unwrap();
                let fd = common::fd_spectrum(&ring, &params, &K).unwrap();
                let top = fd
                    .iter()
                    .filter(|z| z.re.abs() > 1e-9)
                    .map(|z| z.re)
                    .fold(f64::NEG_INFINITY, f64::max);
                let v = verdict(&ring, &params, &K, None).unwrap().verdict;
                assert_eq!(v == Verdict::Unstable, top > 0.0, "{kind} N={n} b{branch}: {top:e}");
            }
        }
    }
}
