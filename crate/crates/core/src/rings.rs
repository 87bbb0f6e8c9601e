//! N-spot ring equilibria: stationary and traveling rings sit on zeros of the
//! ring function `F(r0)`, rotating rings on roots of `M1 = (1 + M2 k3 r0^2) F(r0)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::odesim::{pair_sums, rhs_second_raw};
use crate::params::ReducedParams;
use crate::roots::{bisect, golden_max, sign_changes};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    Stationary,
    Traveling,
    Rotating,
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RingKind::Stationary => "stationary",
            RingKind::Traveling => "traveling",
            RingKind::Rotating => "rotating",
        })
    }
}

impl FromStr for RingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stationary" => Ok(RingKind::Stationary),
            "traveling" => Ok(RingKind::Traveling),
            "rotating" => Ok(RingKind::Rotating),
            other => Err(Error::Parse(format!("unknown ring kind '{other}'"))),
        }
    }
}

/// An equally spaced ring of `n` spots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingSolution {
    pub n: usize,
    pub r0: f64,
    pub kind: RingKind,
    /// Common velocity of a traveling ring; zero otherwise.
    pub v0: Complex64,
    /// Angular frequency of a rotating ring; zero otherwise.
    pub omega0: f64,
    /// Ordinal of the binding radius the ring belongs to.
    pub branch: usize,
}

impl RingSolution {
    pub fn angles(&self) -> Vec<f64> {
        (0..self.n).map(|k| 2.0 * PI * k as f64 / self.n as f64).collect()
    }

    pub fn positions(&self) -> Vec<Complex64> {
        self.angles()
            .into_iter()
            .map(|t| Complex64::from_polar(self.r0, t))
            .collect()
    }

    /// Propagator amplitudes `q_k` of the ring in the second-order model.
    pub fn amplitudes(&self, kernel: &KernelParams) -> Result<Vec<Complex64>> {
        Ok(match self.kind {
            RingKind::Stationary => vec![Complex64::new(0.0, 0.0); self.n],
            RingKind::Traveling => vec![self.v0; self.n],
            RingKind::Rotating => {
                let f = ring_function(self.r0, self.n, kernel)?;
                let factor = Complex64::new(f, self.omega0);
                self.positions().into_iter().map(|p| factor * p).collect()
            }
        })
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("a ring needs N >= 2, got {n}")));
    }
    Ok(())
}

fn chord(n: usize) -> f64 {
    2.0 * (PI / n as f64).sin()
}

fn check_core(r0: f64, n: usize, kernel: &KernelParams) -> Result<()> {
    let d = chord(n) * r0;
    if d > kernel.d_b {
        Ok(())
    } else {
        Err(Error::CoreViolation { d, d_b: kernel.d_b })
    }
}

/// `F(r0) = sum_l (1 - cos theta_l) f(2 r0 |sin(theta_l/2)|)`.
pub fn ring_function(r0: f64, n: usize, kernel: &KernelParams) -> Result<f64> {
    check_n(n)?;
    check_core(r0, n, kernel)?;
    Ok((1..n)
        .map(|l| {
            let th = 2.0 * PI * l as f64 / n as f64;
            (1.0 - th.cos()) * kernel.value(2.0 * r0 * (0.5 * th).sin().abs())
        })
        .sum())
}

/// `F(r0)` from the complex sum `sum_l (1 - e^{i theta_l}) f(...)`.
pub fn ring_function_complex(r0: f64, n: usize, kernel: &KernelParams) -> Result<Complex64> {
    check_n(n)?;
    check_core(r0, n, kernel)?;
    Ok((1..n)
        .map(|l| {
            let th = 2.0 * PI * l as f64 / n as f64;
            (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, th))
                * kernel.value(2.0 * r0 * (0.5 * th).sin().abs())
        })
        .sum())
}

/// Approximate radius `d_c / (2 sin(pi/N))`.
pub fn approximate_radius(n: usize, branch: usize, kernel: &KernelParams) -> Result<f64> {
    check_n(n)?;
    let d_c = kernel
        .attractive_zero(branch)
        .ok_or(Error::BranchNotRealizable { n, branch })?;
    Ok(d_c / chord(n))
}

/// Stationary ring on the `branch`-th binding radius.
pub fn stationary_radius(n: usize, branch: usize, kernel: &KernelParams) -> Result<RingSolution> {
    let seed = approximate_radius(n, branch, kernel)?;
    let s = chord(n);
    let half = PI / (2.0 * kernel.beta * s);
    let lo = (seed - half).max(kernel.d_b / s * (1.0 + 1e-9));
    let hi = seed + half;
    let f = |r: f64| ring_function(r, n, kernel).unwrap_or(f64::NAN);
    let up = sign_changes(f, lo, hi, 64)
        .into_iter()
        .filter(|(_, _, fa, _)| *fa < 0.0)
        .min_by(|a, b| {
            let da = (0.5 * (a.0 + a.1) - seed).abs();
            let db = (0.5 * (b.0 + b.1) - seed).abs();
            da.total_cmp(&db)
        })
        .ok_or(Error::BranchNotRealizable { n, branch })?;
    let r0 = bisect(f, up.0, up.1, 1e-13);
    Ok(RingSolution {
        n,
        r0,
        kind: RingKind::Stationary,
        v0: Complex64::new(0.0, 0.0),
        omega0: 0.0,
        branch,
    })
}

/// Traveling ring moving along +x.
pub fn traveling_ring(
    n: usize,
    branch: usize,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<RingSolution> {
    traveling_ring_towards(n, branch, params, kernel, 0.0)
}

/// Traveling ring with its velocity at `angle` from the x axis.
pub fn traveling_ring_towards(
    n: usize,
    branch: usize,
    params: &ReducedParams,
    kernel: &KernelParams,
    angle: f64,
) -> Result<RingSolution> {
    if params.m1 < 0.0 {
        return Err(Error::BelowBifurcation { m1: params.m1 });
    }
    if params.m2 <= 0.0 {
        return Err(Error::InvalidParams("M2 must be positive".into()));
    }
    let mut ring = stationary_radius(n, branch, kernel)?;
    ring.kind = RingKind::Traveling;
    ring.v0 = Complex64::from_polar((params.m1 / params.m2).sqrt(), angle);
    Ok(ring)
}

/// Scan window for rotating rings: from the core limit to four times the
/// second binding radius.
fn rotating_window(n: usize, kernel: &KernelParams) -> Result<(f64, f64)> {
    check_n(n)?;
    let s = chord(n);
    let lo = kernel.d_b / s * (1.0 + 1e-9);
    let second = match stationary_radius(n, 2, kernel) {
        Ok(r) => r.r0,
        Err(_) => approximate_radius(n, 2, kernel)?,
    };
    Ok((lo, 4.0 * second))
}

const ROTATING_SCAN: usize = 10_000;

/// Upward zeros of `F` in the scan window: the stationary radii by branch.
fn upward_zeros(n: usize, kernel: &KernelParams, lo: f64, hi: f64) -> Vec<f64> {
    let f = |r: f64| ring_function(r, n, kernel).unwrap_or(f64::NAN);
    sign_changes(f, lo, hi, ROTATING_SCAN)
        .into_iter()
        .filter(|(_, _, fa, _)| *fa < 0.0)
        .map(|(a, b, _, _)| bisect(f, a, b, 1e-13))
        .collect()
}

/// Every rotating ring with `omega0 > 0` in the scan window, ascending in
/// radius. Each root is labelled with the branch of the nearest stationary
/// radius below it.
pub fn rotating_rings(
    n: usize,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<Vec<RingSolution>> {
    if params.m1 <= 0.0 {
        return Err(Error::BelowBifurcation { m1: params.m1 });
    }
    let (lo, hi) = rotating_window(n, kernel)?;
    let k3 = params.k3;
    let g = |r: f64| {
        ring_function(r, n, kernel)
            .map(|f| (1.0 + params.m2 * k3 * r * r) * f - params.m1)
            .unwrap_or(f64::NAN)
    };
    let ups = upward_zeros(n, kernel, lo, hi);
    let mut out = Vec::new();
    for (a, b, _, _) in sign_changes(g, lo, hi, ROTATING_SCAN) {
        let r0 = bisect(g, a, b, 1e-14);
        let f = ring_function(r0, n, kernel)?;
        let w2 = k3 * f - f * f;
        if f < 0.0 || w2 < 0.0 {
            continue;
        }
        let branch = ups.iter().filter(|z| **z <= r0).count();
        out.push(RingSolution {
            n,
            r0,
            kind: RingKind::Rotating,
            v0: Complex64::new(0.0, 0.0),
            omega0: w2.sqrt(),
            branch,
        });
    }
    Ok(out)
}

/// The rotating ring continued from the stationary ring of `branch`: the
/// smallest root above that stationary radius.
pub fn rotating_ring(
    n: usize,
    branch: usize,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<RingSolution> {
    let stationary = stationary_radius(n, branch, kernel)?;
    rotating_rings(n, params, kernel)?
        .into_iter()
        .filter(|r| r.r0 > stationary.r0 && r.branch == branch)
        .min_by(|a, b| a.r0.total_cmp(&b.r0))
        .map(|mut r| {
            r.branch = branch;
            r
        })
        .ok_or(Error::BranchNotRealizable { n, branch })
}

fn rotation_balance(r: f64, n: usize, params: &ReducedParams, kernel: &KernelParams) -> f64 {
    match ring_function(r, n, kernel) {
        Ok(f) if f <= params.k3 => (1.0 + params.m2 * params.k3 * r * r) * f,
        _ => f64::NEG_INFINITY,
    }
}

fn maximise_on(
    n: usize,
    params: &ReducedParams,
    kernel: &KernelParams,
    lo: f64,
    hi: f64,
) -> (f64, f64) {
    let steps = ROTATING_SCAN;
    let h = (hi - lo) / steps as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=steps {
        let v = rotation_balance(lo + h * i as f64, n, params, kernel);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = lo + h * best_i.saturating_sub(1) as f64;
    let b = (lo + h * (best_i + 1) as f64).min(hi);
    let (r, refined) = golden_max(|r| rotation_balance(r, n, params, kernel), a, b, 1e-13);
    if refined >= best {
        (r, refined)
    } else {
        (lo + h * best_i as f64, best)
    }
}

/// Largest `M1` admitting a rotating ring: the maximum of
/// `(1 + M2 k3 r^2) F(r)` over the scan window subject to `F <= k3`.
pub fn m1_critical(n: usize, params: &ReducedParams, kernel: &KernelParams) -> Result<f64> {
    let (lo, hi) = rotating_window(n, kernel)?;
    Ok(maximise_on(n, params, kernel, lo, hi).1)
}

/// [`m1_critical`] restricted to the lobe of `F > 0` right of the stationary
/// radius of `branch`, where that branch of rotating rings lives.
pub fn m1_critical_branch(
    n: usize,
    branch: usize,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<f64> {
    Ok(max_rotating_state(n, branch, params, kernel)?.1)
}

/// Radius and `M1` of the largest rotating state on `branch`: beyond this
/// `M1` the branch has no rotating ring.
pub fn max_rotating_state(
    n: usize,
    branch: usize,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<(f64, f64)> {
    let (_, hi) = rotating_window(n, kernel)?;
    let start = stationary_radius(n, branch, kernel)?.r0;
    let f = |r: f64| ring_function(r, n, kernel).unwrap_or(f64::NAN);
    let end = sign_changes(f, start + 1e-9, hi, ROTATING_SCAN)
        .first()
        .map(|(a, b, _, _)| bisect(f, *a, *b, 1e-13))
        .unwrap_or(hi);
    Ok(maximise_on(n, params, kernel, start, end))
}

/// Residuals of the defining conditions of a ring.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct RingResiduals {
    /// `|F(r0)|` for stationary/traveling, `|M1 - (1 + M2 k3 r0^2) F|` for rotating.
    pub radius: f64,
    /// `|M1 - M2 |v0|^2|` for traveling, `|omega0^2 - (k3 F - F^2)|` for rotating.
    pub motion: f64,
    /// Max norm of the reduced-model right-hand side in the comoving frame.
    pub model: f64,
}

pub fn residuals(
    ring: &RingSolution,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<RingResiduals> {
    let f = ring_function(ring.r0, ring.n, kernel)?;
    let p = ring.positions();
    let out = match ring.kind {
        RingKind::Stationary => {
            let s = pair_sums(&p, kernel)?;
            RingResiduals {
                radius: f.abs(),
                motion: 0.0,
                model: s.iter().fold(0.0, |m, z| m.max(z.norm())),
            }
        }
        RingKind::Traveling | RingKind::Rotating => {
            let q = ring.amplitudes(kernel)?;
            let (dp, dq) = rhs_second_raw(&p, &q, params, kernel)?;
            // Comoving frame: subtract the rigid translation or rotation.
            let i_omega = Complex64::new(0.0, ring.omega0);
            let mut model = 0.0f64;
            for k in 0..ring.n {
                let (ep, eq) = match ring.kind {
                    RingKind::Traveling => (dp[k] - ring.v0, dq[k]),
                    _ => (dp[k] - i_omega * p[k], dq[k] - i_omega * q[k]),
                };
                model = model.max(ep.re.abs()).max(ep.im.abs());
                model = model.max(eq.re.abs()).max(eq.im.abs());
            }
            let (radius, motion) = if ring.kind == RingKind::Traveling {
                (f.abs(), (params.m1 - params.m2 * ring.v0.norm_sqr()).abs())
            } else {
                let r2 = ring.r0 * ring.r0;
                (
                    (params.m1 - (1.0 + params.m2 * params.k3 * r2) * f).abs(),
                    (ring.omega0 * ring.omega0 - (params.k3 * f - f * f)).abs(),
                )
            };
            RingResiduals {
                radius,
                motion,
                model,
            }
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: KernelParams = KernelParams::FIG1;

    #[test]
    fn two_spot_ring_function() {
        for r in [0.07, 0.09, 0.12, 0.2] {
            let f = ring_function(r, 2, &K).unwrap();
            assert!((f - 2.0 * K.value(2.0 * r)).abs() < 1e-18);
        }
        let r = stationary_radius(2, 1, &K).unwrap();
        assert!((r.r0 - K.attractive_zero(1).unwrap() / 2.0).abs() < 1e-12);
        assert!((r.r0 - 0.0813).abs() < 1e-4);
    }

    #[test]
    fn three_spot_radii() {
        let b1 = stationary_radius(3, 1, &K).unwrap();
        let b2 = stationary_radius(3, 2, &K).unwrap();
        assert!((b1.r0 - 0.0939).abs() < 1e-3, "{}", b1.r0);
        assert!((b2.r0 - 0.1780).abs() < 1e-3, "{}", b2.r0);
        assert!(ring_function(b1.r0, 3, &K).unwrap().abs() < 1e-6 * K.envelope(K.d_b));
    }

    #[test]
    fn complex_sum_is_real() {
        for n in 2..9 {
            let r = 0.2;
            let c = ring_function_complex(r, n, &K).unwrap();
            assert!(c.im.abs() < 1e-14 * K.m0);
            assert!((c.re - ring_function(r, n, &K).unwrap()).abs() < 1e-15 * K.m0 * n as f64);
        }
    }

    #[test]
    fn core_and_degenerate_inputs() {
        assert!(matches!(ring_function(0.05, 3, &K), Err(Error::CoreViolation { .. })));
        assert!(stationary_radius(1, 1, &K).is_err());
        assert!(stationary_radius(3, 0, &K).is_err());
    }

    #[test]
    fn approximation_within_half_period() {
        for n in 2..=12 {
            for b in 1..=2 {
                let exact = stationary_radius(n, b, &K).unwrap().r0;
                let approx = approximate_radius(n, b, &K).unwrap();
                assert!((exact - approx).abs() < PI / K.beta, "n={n} b={b}");
            }
        }
    }

    #[test]
    fn traveling_ring_speed() {
        let p = ReducedParams::fig1(1.0 / 0.3 + 0.01);
        let r = traveling_ring(3, 2, &p, &K).unwrap();
        assert!((r.v0.norm_sqr() * p.m2 - p.m1).abs() < 1e-15);
        let res = residuals(&r, &p, &K).unwrap();
        assert!(res.radius < 1e-10 && res.motion < 1e-10 && res.model < 1e-10);
        let below = ReducedParams::fig1(0.1);
        assert!(matches!(traveling_ring(3, 2, &below, &K), Err(Error::BelowBifurcation { .. })));
        let at = ReducedParams::new(0.3, 1.0 / 0.3, 2000.0);
        assert!(traveling_ring(3, 2, &at, &K).unwrap().v0.norm() < 1e-7);
    }

    #[test]
    fn rotating_three_spot_branch_two() {
        let p = ReducedParams::fig1(1.0 / 0.3 + 0.01);
        let r = rotating_ring(3, 2, &p, &K).unwrap();
        assert!((r.r0 - 0.1800).abs() < 5e-4, "{}", r.r0);
        assert!(r.omega0 > 0.0);
        let res = residuals(&r, &p, &K).unwrap();
        assert!(res.radius < 1e-10 && res.motion < 1e-10 && res.model < 1e-10, "{res:?}");
    }

    #[test]
    fn rotating_rings_vanish_above_critical() {
        let p = ReducedParams::fig1(1.0 / 0.3 + 0.01);
        let m1c = m1_critical(3, &p, &K).unwrap();
        assert!(m1c > 0.0);
        let below = ReducedParams { m1: 0.99 * m1c, ..p };
        let above = ReducedParams { m1: 1.01 * m1c, ..p };
        assert!(!rotating_rings(3, &below, &K).unwrap().is_empty());
        assert!(rotating_rings(3, &above, &K).unwrap().is_empty());
    }

    #[test]
    fn stationary_equilibrium_residual() {
        for n in 2..=8 {
            for b in 1..=2 {
                let r = stationary_radius(n, b, &K).unwrap();
                let res = residuals(&r, &ReducedParams::fig1(0.1), &K).unwrap();
                assert!(res.model < 1e-10, "n={n} b={b} {res:?}");
            }
        }
    }
}
