//! Per-Fourier-mode linearisation of ring equilibria and stability verdicts.
//!
//! A perturbation of an N-ring couples Fourier mode `m + 1` of the position
//! offsets with mode `1 - m` of their conjugates, so the 2N (or 4N) real
//! linearisation splits into N small blocks indexed by `m`. Blocks `m` and
//! `N - m` share a spectrum, which lets the verdict scan `m = 0..=N/2 + 1`.
//!
//! The split is exact for stationary and rotating rings. For a traveling ring
//! with N >= 3 the conjugate amplitude coupling `-M2 v0^2` shifts the mode
//! index by two, so the blocks built by [`matrix_traveling`] are the standard
//! closed form rather than an exact factorisation of the 4N Jacobian.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::{eig_small, SmallMatrix};
use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::params::ReducedParams;
use crate::rings::{ring_function, RingKind, RingSolution};

const RE: fn(f64) -> Complex64 = |x| Complex64::new(x, 0.0);

/// Relative tolerance separating neutral eigenvalues from genuine ones.
pub const EPS_NEUTRAL_REL: f64 = 1e-8;
/// Looser relative tolerance for eigenvalues that symmetry says must vanish.
pub const EPS_STRUCTURAL_REL: f64 = 1e-6;

fn half_chord(theta: f64, r0: f64, kernel: &KernelParams) -> Result<(f64, f64)> {
    let s = theta.sin().abs();
    let d = 2.0 * r0 * s;
    if d <= kernel.d_b {
        return Err(Error::CoreViolation { d, d_b: kernel.d_b });
    }
    Ok((d, s))
}

/// `f(2 r0 |sin theta|) + r0 f'(2 r0 |sin theta|) |sin theta|`.
pub fn g1(theta: f64, r0: f64, kernel: &KernelParams) -> Result<f64> {
    let (d, s) = half_chord(theta, r0, kernel)?;
    Ok(kernel.eval(d)? + r0 * kernel.eval_deriv(d)? * s)
}

/// `r0 f'(2 r0 |sin theta|) |sin theta|`.
pub fn g2(theta: f64, r0: f64, kernel: &KernelParams) -> Result<f64> {
    let (d, s) = half_chord(theta, r0, kernel)?;
    Ok(r0 * kernel.eval_deriv(d)? * s)
}

fn check_ring(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("a ring needs N >= 2, got {n}")));
    }
    Ok(())
}

/// `I1(m) = 2 sum_l G1(pi l/N) sin^2((m+1) pi l/N)`.
pub fn i1(m: i64, n: usize, r0: f64, kernel: &KernelParams) -> Result<f64> {
    check_ring(n)?;
    let mut s = 0.0;
    for l in 1..n {
        let half = PI * l as f64 / n as f64;
        let w = ((m + 1) as f64 * half).sin();
        s += 2.0 * g1(half, r0, kernel)? * w * w;
    }
    Ok(s)
}

/// `I2(m) = 2 sum_l G2(pi l/N) (sin^2(pi l/N) - sin^2(m pi l/N))`.
pub fn i2(m: i64, n: usize, r0: f64, kernel: &KernelParams) -> Result<f64> {
    check_ring(n)?;
    let mut s = 0.0;
    for l in 1..n {
        let half = PI * l as f64 / n as f64;
        let a = half.sin();
        let b = (m as f64 * half).sin();
        s += 2.0 * g2(half, r0, kernel)? * (a * a - b * b);
    }
    Ok(s)
}

/// `sum_l G1(theta_l/2) (1 - e^{i(m+1) theta_l})`; real up to rounding.
pub fn i1_complex(m: i64, n: usize, r0: f64, kernel: &KernelParams) -> Result<Complex64> {
    check_ring(n)?;
    let mut s = Complex64::new(0.0, 0.0);
    for l in 1..n {
        let th = 2.0 * PI * l as f64 / n as f64;
        s += g1(0.5 * th, r0, kernel)?
            * (RE(1.0) - Complex64::from_polar(1.0, (m + 1) as f64 * th));
    }
    Ok(s)
}

/// `sum_l G2(theta_l/2) (e^{i m theta_l} - e^{i theta_l})`; real up to rounding.
pub fn i2_complex(m: i64, n: usize, r0: f64, kernel: &KernelParams) -> Result<Complex64> {
    check_ring(n)?;
    let mut s = Complex64::new(0.0, 0.0);
    for l in 1..n {
        let th = 2.0 * PI * l as f64 / n as f64;
        s += g2(0.5 * th, r0, kernel)?
            * (Complex64::from_polar(1.0, m as f64 * th) - Complex64::from_polar(1.0, th));
    }
    Ok(s)
}

/// The linearisation block for one Fourier mode.
#[derive(Clone, Copy, Debug)]
pub struct ModeMatrix {
    pub m: i64,
    pub kind: RingKind,
    pub matrix: SmallMatrix,
}

fn expect_kind(ring: &RingSolution, kind: RingKind) -> Result<()> {
    if ring.kind != kind {
        return Err(Error::InvalidParams(format!(
            "expected a {kind} ring, got {}",
            ring.kind
        )));
    }
    Ok(())
}

struct Couplings {
    a: f64,
    b: f64,
    c: f64,
}

fn couplings(m: i64, ring: &RingSolution, kernel: &KernelParams) -> Result<Couplings> {
    Ok(Couplings {
        a: i1(m, ring.n, ring.r0, kernel)?,
        b: i2(m, ring.n, ring.r0, kernel)?,
        c: i1(-m, ring.n, ring.r0, kernel)?,
    })
}

/// `G(m) = [[-I1(m), -I2(m)], [-I2(m), -I1(-m)]]`, without the first-order
/// prefactor.
pub fn matrix_stationary(m: i64, ring: &RingSolution, kernel: &KernelParams) -> Result<ModeMatrix> {
    expect_kind(ring, RingKind::Stationary)?;
    let k = couplings(m, ring, kernel)?;
    Ok(ModeMatrix {
        m,
        kind: RingKind::Stationary,
        matrix: SmallMatrix::from_real(&[vec![-k.a, -k.b], vec![-k.b, -k.c]]),
    })
}

/// Traveling-ring block with `-M2 |v0|^2` on the amplitude diagonal and
/// `-M2 v0^2` coupling to the conjugate; for real `v0 = sqrt(M1/M2)` the
/// amplitude block is `[[-M1, -M1], [-M1, -M1]]`.
pub fn matrix_traveling(
    m: i64,
    ring: &RingSolution,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<ModeMatrix> {
    expect_kind(ring, RingKind::Traveling)?;
    let k = couplings(m, ring, kernel)?;
    let v = ring.v0;
    let diag = RE(params.m1 - 2.0 * params.m2 * v.norm_sqr());
    let off = -params.m2 * v * v;
    let k3 = params.k3;
    let z = RE(0.0);
    let one = RE(1.0);
    Ok(ModeMatrix {
        m,
        kind: RingKind::Traveling,
        matrix: SmallMatrix::from_rows(&[
            vec![RE(-k.a), RE(-k.b), one, z],
            vec![RE(-k.b), RE(-k.c), z, one],
            vec![RE(-k3 * k.a), RE(-k3 * k.b), diag, off],
            vec![RE(-k3 * k.b), RE(-k3 * k.c), off.conj(), diag],
        ]),
    })
}

/// `H1 = M1 - 2 M2 (omega^2 r0^2 + r0^2 F^2)` and `H2 = M2 (i omega r0 + r0 F)^2`.
pub fn rotating_h(r0: f64, omega: f64, f: f64, params: &ReducedParams) -> (f64, Complex64) {
    let h1 = params.m1 - 2.0 * params.m2 * r0 * r0 * (omega * omega + f * f);
    let w = Complex64::new(r0 * f, omega * r0);
    (h1, params.m2 * w * w)
}

/// Rotating-ring block in the co-rotating frame.
pub fn matrix_rotating(
    m: i64,
    ring: &RingSolution,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<ModeMatrix> {
    expect_kind(ring, RingKind::Rotating)?;
    let k = couplings(m, ring, kernel)?;
    let f = ring_function(ring.r0, ring.n, kernel)?;
    let (h1, h2) = rotating_h(ring.r0, ring.omega0, f, params);
    let iw = Complex64::new(0.0, ring.omega0);
    let k3 = params.k3;
    let z = RE(0.0);
    let one = RE(1.0);
    Ok(ModeMatrix {
        m,
        kind: RingKind::Rotating,
        matrix: SmallMatrix::from_rows(&[
            vec![RE(-k.a) - iw, RE(-k.b), one, z],
            vec![RE(-k.b), RE(-k.c) + iw, z, one],
            vec![RE(-k3 * k.a), RE(-k3 * k.b), RE(h1) - iw, -h2],
            vec![RE(-k3 * k.b), RE(-k3 * k.c), -h2.conj(), RE(h1) + iw],
        ]),
    })
}

/// The block matching `ring.kind`.
pub fn mode_matrix(
    m: i64,
    ring: &RingSolution,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<ModeMatrix> {
    match ring.kind {
        RingKind::Stationary => matrix_stationary(m, ring, kernel),
        RingKind::Traveling => matrix_traveling(m, ring, params, kernel),
        RingKind::Rotating => matrix_rotating(m, ring, params, kernel),
    }
}

/// Number of eigenvalues of block `m` forced onto the imaginary axis by
/// translation, rotation and (for moving rings) direction symmetry.
pub fn structural_neutral(kind: RingKind, n: usize, m: i64) -> usize {
    let r = m.rem_euclid(n as i64) as usize;
    let at_zero = match kind {
        RingKind::Stationary | RingKind::Rotating => 1,
        RingKind::Traveling => 2,
    };
    let mut count = 0;
    if r == 0 {
        count += at_zero;
    }
    if r == 1 {
        count += 1;
    }
    if r == n - 1 {
        count += 1;
    }
    if n == 2 && r == 1 && kind == RingKind::Traveling {
        // The two translation modes and the direction mode share this block.
        count += 1;
    }
    count
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub m: i64,
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues of this block classified as neutral.
    pub neutral: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub ring: RingSolution,
    pub per_mode: Vec<ModeSpectrum>,
    pub verdict: Verdict,
    pub neutral_count: usize,
    /// Largest real part among non-neutral eigenvalues; `-inf` if none.
    pub margin: f64,
    pub eps_neutral: f64,
}

impl StabilityReport {
    /// Non-neutral eigenvalue with the largest real part.
    pub fn dominant(&self) -> Option<(i64, Complex64)> {
        let mut best: Option<(i64, Complex64)> = None;
        for mode in &self.per_mode {
            for e in split_neutral(&mode.eigenvalues, mode.neutral).1 {
                if best.is_none_or(|(_, b)| e.re > b.re) {
                    best = Some((mode.m, e));
                }
            }
        }
        best
    }
}

/// Eigenvalues ordered by `|Re|`, split into the first `neutral` and the rest.
fn split_neutral(eigs: &[Complex64], neutral: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| a.re.abs().total_cmp(&b.re.abs()));
    let rest = sorted.split_off(neutral.min(sorted.len()));
    (sorted, rest)
}

fn classify(eigs: &[Complex64], structural: usize, eps: f64, eps_structural: f64) -> usize {
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| a.re.abs().total_cmp(&b.re.abs()));
    let mut count = 0;
    for (i, e) in sorted.iter().enumerate() {
        let tol = if i < structural { eps_structural } else { eps };
        if e.re.abs() <= tol {
            count += 1;
        } else {
            break;
        }
    }
    count
}

/// Verdict over an explicit list of modes.
pub fn verdict_over_modes(
    ring: &RingSolution,
    params: &ReducedParams,
    kernel: &KernelParams,
    modes: &[i64],
    eps_neutral: Option<f64>,
) -> Result<StabilityReport> {
    let blocks = modes
        .iter()
        .map(|&m| mode_matrix(m, ring, params, kernel))
        .collect::<Result<Vec<_>>>()?;
    let scale = blocks
        .iter()
        .map(|b| b.matrix.max_abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = eps_neutral.unwrap_or(EPS_NEUTRAL_REL * scale);
    let eps_structural = eps.max(EPS_STRUCTURAL_REL * scale);
    let mut per_mode = Vec::with_capacity(blocks.len());
    let mut neutral_count = 0;
    let mut margin = f64::NEG_INFINITY;
    for b in &blocks {
        let eigenvalues = eig_small(&b.matrix);
        let structural = structural_neutral(ring.kind, ring.n, b.m);
        let neutral = classify(&eigenvalues, structural, eps, eps_structural);
        neutral_count += neutral;
        for e in split_neutral(&eigenvalues, neutral).1 {
            margin = margin.max(e.re);
        }
        per_mode.push(ModeSpectrum {
            m: b.m,
            eigenvalues,
            neutral,
        });
    }
    let verdict = if margin > eps {
        Verdict::Unstable
    } else {
        Verdict::Stable
    };
    Ok(StabilityReport {
        ring: *ring,
        per_mode,
        verdict,
        neutral_count,
        margin,
        eps_neutral: eps,
    })
}

/// Modes `0..=N/2 + 1`; the rest repeat these spectra.
pub fn reduced_modes(n: usize) -> Vec<i64> {
    (0..=(n / 2 + 1) as i64).collect()
}

/// Every distinct block `0..N`; their union is the full linear spectrum.
pub fn all_modes(n: usize) -> Vec<i64> {
    (0..n as i64).collect()
}

/// Linear stability of a ring over the reduced mode range. `eps_neutral`
/// overrides the default `1e-8` times the largest matrix entry.
pub fn verdict(
    ring: &RingSolution,
    params: &ReducedParams,
    kernel: &KernelParams,
    eps_neutral: Option<f64>,
) -> Result<StabilityReport> {
    verdict_over_modes(ring, params, kernel, &reduced_modes(ring.n), eps_neutral)
}

/// Union of the block spectra over `m = 0..N`, scaled by the first-order
/// prefactor for stationary rings so it compares with the model Jacobian.
pub fn full_spectrum(
    ring: &RingSolution,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<Vec<Complex64>> {
    let scale = if ring.kind == RingKind::Stationary {
        params.prefactor()
    } else {
        1.0
    };
    let mut out = Vec::with_capacity(4 * ring.n);
    for m in all_modes(ring.n) {
        let b = mode_matrix(m, ring, params, kernel)?;
        out.extend(eig_small(&b.matrix).into_iter().map(|e| e * scale));
    }
    Ok(out)
}

/// Nearest-neighbour estimate of the non-zero eigenvalue of `G(m)`:
/// `-2 d_c f'(d_c) (sin^2((m+1) pi/N) + sin^2((1-m) pi/N))`.
pub fn nearest_neighbor_eigenvalue(m: i64, n: usize, d_c: f64, kernel: &KernelParams) -> f64 {
    let a = ((m + 1) as f64 * PI / n as f64).sin();
    let b = ((1 - m) as f64 * PI / n as f64).sin();
    -2.0 * d_c * kernel.slope(d_c) * (a * a + b * b)
}

/// Greedy nearest pairing of two spectra; returns the worst pair distance.
pub fn match_spectra(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut worst = 0.0f64;
    while !a.is_empty() {
        let mut best = (f64::INFINITY, 0, 0);
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let d = (x - y).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        worst = worst.max(best.0);
        a.swap_remove(best.1);
        b.swap_remove(best.2);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{rotating_ring, stationary_radius, traveling_ring};

    const K: KernelParams = KernelParams::FIG1;

    fn table1() -> ReducedParams {
        ReducedParams::fig1(0.1)
    }

    fn above() -> ReducedParams {
        ReducedParams::fig1(1.0 / 0.3 + 0.01)
    }

    #[test]
    fn g_identity_and_core() {
        let r0 = 0.2;
        for th in [0.5, 1.0, 1.4] {
            let d = g1(th, r0, &K).unwrap() - g2(th, r0, &K).unwrap();
            assert!((d - K.value(2.0 * r0 * f64::sin(th))).abs() < 1e-18);
        }
        assert!(g2(0.0, r0, &K).is_err());
    }

    #[test]
    fn g_at_binding_distance() {
        let ring = stationary_radius(6, 1, &K).unwrap();
        let d_c = 2.0 * ring.r0 * (PI / 6.0).sin();
        let want = 0.5 * d_c * K.slope(d_c);
        let a = g1(PI / 6.0, ring.r0, &K).unwrap();
        let b = g2(PI / 6.0, ring.r0, &K).unwrap();
        assert!((b - want).abs() < 1e-15);
        // G1 differs by f(d_c), small next to the slope term near a zero.
        assert!((a - want).abs() < 0.05 * want.abs(), "{a} {want}");
    }

    #[test]
    fn sum_forms_agree() {
        for n in 2..=8 {
            let r = stationary_radius(n, 1, &K).unwrap().r0;
            for m in -3..=8i64 {
                let a = i1(m, n, r, &K).unwrap();
                let ac = i1_complex(m, n, r, &K).unwrap();
                let b = i2(m, n, r, &K).unwrap();
                let bc = i2_complex(m, n, r, &K).unwrap();
                assert!((a - ac.re).abs() < 1e-13 && ac.im.abs() < 1e-13);
                assert!((b - bc.re).abs() < 1e-13 && bc.im.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn coupling_identities() {
        for n in 2..=8 {
            let r = stationary_radius(n, 2, &K).unwrap().r0;
            assert!(i1(-1, n, r, &K).unwrap().abs() < 1e-18);
            assert!(i2(1, n, r, &K).unwrap().abs() < 1e-18);
            let f = ring_function(r, n, &K).unwrap();
            let d = i1(0, n, r, &K).unwrap() - i2(0, n, r, &K).unwrap();
            assert!((d - f).abs() < 1e-15);
            for m in 0..n as i64 {
                let lhs = i1(n as i64 - m, n, r, &K).unwrap();
                let rhs = i1(-m, n, r, &K).unwrap();
                assert!((lhs - rhs).abs() < 1e-15);
                let lhs = i2(-m, n, r, &K).unwrap();
                let rhs = i2(m, n, r, &K).unwrap();
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stationary_neutral_blocks() {
        let ring = stationary_radius(5, 1, &K).unwrap();
        let g1m = matrix_stationary(1, &ring, &K).unwrap().matrix;
        assert_eq!(g1m.get(1, 0), RE(0.0));
        assert_eq!(g1m.get(1, 1), RE(0.0));
        let g0 = matrix_stationary(0, &ring, &K).unwrap().matrix;
        let v = g0.mul_vec(&[RE(1.0), RE(-1.0)]);
        assert!(v[0].norm() < 1e-14 && v[1].norm() < 1e-14);
    }

    #[test]
    fn table_examples() {
        let r = stationary_radius(4, 1, &K).unwrap();
        assert_eq!(verdict(&r, &table1(), &K, None).unwrap().verdict, Verdict::Unstable);
        let r = stationary_radius(3, 2, &K).unwrap();
        assert_eq!(verdict(&r, &table1(), &K, None).unwrap().verdict, Verdict::Stable);
        let r = rotating_ring(5, 2, &above(), &K).unwrap();
        assert_eq!(verdict(&r, &above(), &K, None).unwrap().verdict, Verdict::Unstable);
    }

    #[test]
    fn traveling_canonical_block() {
        let p = above();
        let ring = traveling_ring(3, 1, &p, &K).unwrap();
        let m = matrix_traveling(2, &ring, &p, &K).unwrap().matrix;
        for i in 2..4 {
            for j in 2..4 {
                assert!((m.get(i, j) - RE(-p.m1)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn traveling_spectrum_reversal_invariant() {
        let p = above();
        let mut ring = traveling_ring(4, 2, &p, &K).unwrap();
        let base = full_spectrum(&ring, &p, &K).unwrap();
        ring.v0 = -ring.v0;
        let turned = full_spectrum(&ring, &p, &K).unwrap();
        assert!(match_spectra(&base, &turned) < 1e-12);
    }

    #[test]
    fn rotating_h_and_trace() {
        let p = above();
        let ring = rotating_ring(3, 2, &p, &K).unwrap();
        let f = ring_function(ring.r0, 3, &K).unwrap();
        let (h1, h2) = rotating_h(ring.r0, ring.omega0, f, &p);
        let want = p.m2 * ring.r0 * ring.r0 * (ring.omega0.powi(2) + f * f);
        assert!((h2.norm() - want).abs() < 1e-12 * want);
        for m in 0..3 {
            let b = matrix_rotating(m, &ring, &p, &K).unwrap().matrix;
            let tr = -i1(m, 3, ring.r0, &K).unwrap() - i1(-m, 3, ring.r0, &K).unwrap() + 2.0 * h1;
            assert!((b.trace() - RE(tr)).norm() < 1e-14);
        }
    }

    #[test]
    fn rotating_reduces_to_traveling_at_rest() {
        let p = above();
        let mut rot = stationary_radius(4, 1, &K).unwrap();
        rot.kind = RingKind::Rotating;
        let mut trav = rot;
        trav.kind = RingKind::Traveling;
        for m in 0..4 {
            let a = matrix_rotating(m, &rot, &p, &K).unwrap().matrix;
            let b = matrix_traveling(m, &trav, &p, &K).unwrap().matrix;
            for i in 0..4 {
                for j in 0..4 {
                    assert!((a.get(i, j) - b.get(i, j)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn structural_counts_sum_to_symmetries() {
        for n in 3..=8 {
            let total: usize = all_modes(n)
                .iter()
                .map(|m| structural_neutral(RingKind::Stationary, n, *m))
                .sum();
            assert_eq!(total, 3);
        }
        let total: usize = all_modes(2)
            .iter()
            .map(|m| structural_neutral(RingKind::Traveling, 2, *m))
            .sum();
        assert_eq!(total, 5);
    }

    #[test]
    fn stable_rings_report_neutral_modes() {
        let r = stationary_radius(3, 2, &K).unwrap();
        let rep = verdict_over_modes(&r, &table1(), &K, &all_modes(3), None).unwrap();
        assert_eq!(rep.neutral_count, 3);
        assert!(rep.margin < 0.0);
    }
}
