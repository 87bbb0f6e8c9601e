//! Reduced particle models for N spots and perturbation experiments.
//!
//! First order: `p_k' = -c sum_j (p_k - p_j) f(|p_k - p_j|)` with
//! `c = 1/(1 - tau k3)`.
//! Second order: `p_k' = q_k - S_k`, `q_k' = M1 q_k - M2 q_k |q_k|^2 - k3 S_k`
//! with the same pair sum `S_k`.
//!
//! Real state vectors are laid out as `x_1, y_1, ..., x_N, y_N` followed, for
//! the second-order model, by `xi_1, eta_1, ..., xi_N, eta_N`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dopri::{self, DopriOptions, DopriStats};
use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::params::ReducedParams;
use crate::rings::RingSolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    First,
    Second,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::First => "first",
            Model::Second => "second",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Model::First),
            "second" => Ok(Model::Second),
            other => Err(Error::Parse(format!("unknown model '{other}'"))),
        }
    }
}

/// Spot positions and propagator amplitudes at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotEnsemble {
    pub model: Model,
    pub p: Vec<Complex64>,
    /// Empty for the first-order model.
    pub q: Vec<Complex64>,
    pub t: f64,
}

impl SpotEnsemble {
    pub fn first(p: Vec<Complex64>) -> Self {
        SpotEnsemble {
            model: Model::First,
            p,
            q: Vec::new(),
            t: 0.0,
        }
    }

    pub fn second(p: Vec<Complex64>, q: Vec<Complex64>) -> Self {
        SpotEnsemble {
            model: Model::Second,
            p,
            q,
            t: 0.0,
        }
    }

    /// Ensemble sitting exactly on a ring.
    pub fn from_ring(ring: &RingSolution, model: Model, kernel: &KernelParams) -> Result<Self> {
        let p = ring.positions();
        Ok(match model {
            Model::First => Self::first(p),
            Model::Second => Self::second(p, ring.amplitudes(kernel)?),
        })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn to_state(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(2 * (self.p.len() + self.q.len()));
        for z in self.p.iter().chain(&self.q) {
            s.push(z.re);
            s.push(z.im);
        }
        s
    }

    pub fn from_state(model: Model, n: usize, state: &[f64], t: f64) -> Self {
        let z = |i: usize| Complex64::new(state[2 * i], state[2 * i + 1]);
        let p = (0..n).map(z).collect();
        let q = match model {
            Model::First => Vec::new(),
            Model::Second => (n..2 * n).map(z).collect(),
        };
        SpotEnsemble { model, p, q, t }
    }

    pub fn centroid(&self) -> Complex64 {
        self.p.iter().sum::<Complex64>() / self.p.len() as f64
    }
}

/// `S_k = sum_j (p_k - p_j) f(|p_k - p_j|)`; fails on a core violation.
pub fn pair_sums(p: &[Complex64], kernel: &KernelParams) -> Result<Vec<Complex64>> {
    let n = p.len();
    let mut s = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        for j in k + 1..n {
            let d = p[k] - p[j];
            let dist = d.norm();
            if dist <= kernel.d_b {
                return Err(Error::Collision { i: k, j, d: dist });
            }
            let term = d * kernel.value(dist);
            s[k] += term;
            s[j] -= term;
        }
    }
    Ok(s)
}

/// Velocities of the first-order model.
pub fn rhs_first(
    ens: &SpotEnsemble,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<Vec<Complex64>> {
    params.check_first_order()?;
    let c = params.prefactor();
    Ok(pair_sums(&ens.p, kernel)?.into_iter().map(|s| -c * s).collect())
}

/// Rates of the second-order model on raw position/amplitude slices.
pub fn rhs_second_raw(
    p: &[Complex64],
    q: &[Complex64],
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if p.len() != q.len() {
        return Err(Error::InvalidParams("positions and amplitudes differ in length".into()));
    }
    let s = pair_sums(p, kernel)?;
    let dp = q.iter().zip(&s).map(|(q, s)| q - s).collect();
    let dq = q
        .iter()
        .zip(&s)
        .map(|(q, s)| params.m1 * q - params.m2 * q * q.norm_sqr() - params.k3 * s)
        .collect();
    Ok((dp, dq))
}

pub fn rhs_second(
    ens: &SpotEnsemble,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    rhs_second_raw(&ens.p, &ens.q, params, kernel)
}

/// Right-hand side on the real state vector, optionally in a frame rotating
/// at `frame_omega` (rigid rotations become equilibria there).
pub fn rhs_state(
    model: Model,
    state: &[f64],
    params: &ReducedParams,
    kernel: &KernelParams,
    frame_omega: f64,
    out: &mut [f64],
) -> Result<()> {
    let n = match model {
        Model::First => state.len() / 2,
        Model::Second => state.len() / 4,
    };
    let ens = SpotEnsemble::from_state(model, n, state, 0.0);
    let rot = Complex64::new(0.0, frame_omega);
    let mut put = |i: usize, z: Complex64| {
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    };
    match model {
        Model::First => {
            for (k, v) in rhs_first(&ens, params, kernel)?.into_iter().enumerate() {
                put(k, v - rot * ens.p[k]);
            }
        }
        Model::Second => {
            let (dp, dq) = rhs_second(&ens, params, kernel)?;
            for k in 0..n {
                put(k, dp[k] - rot * ens.p[k]);
                put(n + k, dq[k] - rot * ens.q[k]);
            }
        }
    }
    Ok(())
}

/// Fourth-order central-difference Jacobian of [`rhs_state`], row-major.
pub fn numerical_jacobian(
    model: Model,
    state: &[f64],
    params: &ReducedParams,
    kernel: &KernelParams,
    frame_omega: f64,
    step: f64,
) -> Result<Vec<f64>> {
    let dim = state.len();
    let mut jac = vec![0.0; dim * dim];
    let mut x = state.to_vec();
    let mut f = [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]];
    for col in 0..dim {
        for (slot, offset) in [2.0, 1.0, -1.0, -2.0].iter().enumerate() {
            x[col] = state[col] + offset * step;
            rhs_state(model, &x, params, kernel, frame_omega, &mut f[slot])?;
        }
        x[col] = state[col];
        for row in 0..dim {
            jac[row * dim + col] =
                (-f[0][row] + 8.0 * f[1][row] - 8.0 * f[2][row] + f[3][row]) / (12.0 * step);
        }
    }
    Ok(jac)
}

/// How a trajectory ended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    CoreViolation { t: f64, i: usize, j: usize, d: f64 },
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub model: Model,
    pub n: usize,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
    pub stats: DopriStats,
}

impl Trajectory {
    pub fn ensemble(&self, i: usize) -> SpotEnsemble {
        SpotEnsemble::from_state(self.model, self.n, &self.states[i], self.times[i])
    }

    pub fn positions(&self, i: usize) -> Vec<Complex64> {
        self.ensemble(i).p
    }

    /// Positions of the last `count` samples, for [`measure_ring`].
    pub fn tail(&self, count: usize) -> Vec<(f64, Vec<Complex64>)> {
        let start = self.times.len().saturating_sub(count);
        (start..self.times.len())
            .map(|i| (self.times[i], self.positions(i)))
            .collect()
    }

    /// CSV with columns `t, x_1, y_1, ..., xi_1, eta_1, ...`. Leading `#`
    /// lines carry provenance (config JSON, kernel hash).
    pub fn write_csv(&self, path: impl AsRef<Path>, header_comments: &[String]) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        for line in header_comments {
            writeln!(file, "# {line}")?;
        }
        let mut cols = vec!["t".to_string()];
        for k in 1..=self.n {
            cols.push(format!("x_{k}"));
            cols.push(format!("y_{k}"));
        }
        if self.model == Model::Second {
            for k in 1..=self.n {
                cols.push(format!("xi_{k}"));
                cols.push(format!("eta_{k}"));
            }
        }
        let mut wtr = csv::Writer::from_writer(file);
        wtr.write_record(&cols)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut row = vec![format!("{t:e}")];
            row.extend(s.iter().map(|v| format!("{v:e}")));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Options for [`integrate`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of the recorded samples.
    pub sample_dt: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rtol: 1e-10,
            atol: 1e-13,
            sample_dt: 1.0,
        }
    }
}

/// Integrate the ensemble to `t_end`, halting on a core violation.
pub fn integrate(
    ens: &SpotEnsemble,
    params: &ReducedParams,
    kernel: &KernelParams,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if ens.model == Model::First {
        params.check_first_order()?;
    }
    let n = ens.len();
    let t0 = ens.t;
    let count = ((t_end - t0) / opts.sample_dt).floor() as usize;
    let mut samples: Vec<f64> = (0..=count).map(|i| t0 + i as f64 * opts.sample_dt).collect();
    if samples.last().is_none_or(|&l| l < t_end - 1e-12 * t_end.abs().max(1.0)) {
        samples.push(t_end);
    }
    let model = ens.model;
    let out = dopri::integrate(
        |_, y, dy| rhs_state(model, y, params, kernel, 0.0, dy),
        t0,
        &ens.to_state(),
        t_end,
        &samples,
        &DopriOptions {
            rtol: opts.rtol,
            atol: opts.atol,
            ..Default::default()
        },
    )?;
    let termination = match out.halted {
        None => Termination::Completed,
        Some(Error::Collision { i, j, d }) => Termination::CoreViolation {
            t: out.t_last,
            i,
            j,
            d,
        },
        Some(other) => return Err(other),
    };
    Ok(Trajectory {
        model,
        n,
        times: out.times,
        states: out.states,
        termination,
        stats: out.stats,
    })
}

/// Summary statistics of a ring-shaped trajectory tail.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RingMeasurement {
    pub r_mean: f64,
    pub omega_est: f64,
    pub v_est: Complex64,
    pub shape_error: f64,
}

fn slope(ts: &[f64], ys: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sty: f64 = ts.iter().zip(ys).map(|(t, y)| (t - mt) * (y - my)).sum();
    let stt: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    sty / stt
}

/// Least-squares rate `a` of `y ~ e^{a t}` on positive samples.
pub fn log_linear_rate(ts: &[f64], ys: &[f64]) -> f64 {
    let logs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    slope(ts, &logs)
}

/// Mean radius, angular velocity, centroid velocity and shape error of a
/// trajectory tail given as `(t, positions)` samples.
pub fn measure_ring(tail: &[(f64, Vec<Complex64>)]) -> Result<RingMeasurement> {
    if tail.len() < 100 {
        return Err(Error::TooFewSamples {
            need: 100,
            got: tail.len(),
        });
    }
    let n = tail[0].1.len();
    let ts: Vec<f64> = tail.iter().map(|s| s.0).collect();
    let centroids: Vec<Complex64> = tail
        .iter()
        .map(|(_, p)| p.iter().sum::<Complex64>() / n as f64)
        .collect();
    let mut r_sum = 0.0;
    let mut shape_error = 0.0f64;
    let mut phases: Vec<Vec<f64>> = vec![Vec::with_capacity(tail.len()); n];
    for ((_, p), c) in tail.iter().zip(&centroids) {
        let mut angles = Vec::with_capacity(n);
        for (k, z) in p.iter().enumerate() {
            let rel = z - c;
            r_sum += rel.norm();
            let a = rel.arg();
            let prev = phases[k].last().copied();
            let unwrapped = match prev {
                Some(last) => last + (a - last + PI).rem_euclid(2.0 * PI) - PI,
                None => a,
            };
            phases[k].push(unwrapped);
            angles.push(a.rem_euclid(2.0 * PI));
        }
        angles.sort_by(f64::total_cmp);
        let spacing = 2.0 * PI / n as f64;
        for k in 0..n {
            let next = if k + 1 < n { angles[k + 1] } else { angles[0] + 2.0 * PI };
            shape_error = shape_error.max((next - angles[k] - spacing).abs());
        }
    }
    let omega_est = phases.iter().map(|ph| slope(&ts, ph)).sum::<f64>() / n as f64;
    let vx = slope(&ts, &centroids.iter().map(|c| c.re).collect::<Vec<_>>());
    let vy = slope(&ts, &centroids.iter().map(|c| c.im).collect::<Vec<_>>());
    Ok(RingMeasurement {
        r_mean: r_sum / (n * tail.len()) as f64,
        omega_est,
        v_est: Complex64::new(vx, vy),
        shape_error,
    })
}

/// Which variables a mode perturbation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbTarget {
    Position,
    Amplitude,
}

/// Mode-`m` perturbation `phi_k = xi_plus e^{i m theta_k} + xi_minus e^{-i m theta_k}`
/// applied as `z_k += (p_k - c) phi_k`, with `c` the centroid and `theta_k`
/// the angle of spot `k` about it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModePerturbation {
    pub m: usize,
    pub xi_plus: Complex64,
    pub xi_minus: Complex64,
    pub target: PerturbTarget,
}

impl ModePerturbation {
    /// Equal real weights on both Fourier components.
    pub fn position(m: usize, amplitude: f64) -> Self {
        ModePerturbation {
            m,
            xi_plus: Complex64::new(amplitude, 0.0),
            xi_minus: Complex64::new(amplitude, 0.0),
            target: PerturbTarget::Position,
        }
    }
}

pub fn perturb(ens: &SpotEnsemble, pert: &ModePerturbation) -> Result<SpotEnsemble> {
    let n = ens.len();
    if pert.m > n {
        return Err(Error::InvalidParams(format!(
            "mode {} outside 0..={n}",
            pert.m
        )));
    }
    if pert.target == PerturbTarget::Amplitude && ens.model == Model::First {
        return Err(Error::InvalidParams(
            "the first-order model has no amplitudes to perturb".into(),
        ));
    }
    let c = ens.centroid();
    let mut out = ens.clone();
    for k in 0..n {
        let rel = ens.p[k] - c;
        let theta = rel.arg();
        let m = pert.m as f64;
        let phi = pert.xi_plus * Complex64::from_polar(1.0, m * theta)
            + pert.xi_minus * Complex64::from_polar(1.0, -m * theta);
        match pert.target {
            PerturbTarget::Position => out.p[k] += rel * phi,
            PerturbTarget::Amplitude => out.q[k] += rel * phi,
        }
    }
    Ok(out)
}

/// Distance from `p` to the ring shape `reference`, minimised over rigid
/// translations and rotations (labels are kept).
pub fn shape_distance(p: &[Complex64], reference: &[Complex64]) -> f64 {
    let n = p.len() as f64;
    let cp = p.iter().sum::<Complex64>() / n;
    let cr = reference.iter().sum::<Complex64>() / n;
    let overlap: Complex64 = p
        .iter()
        .zip(reference)
        .map(|(a, b)| (b - cr).conj() * (a - cp))
        .sum();
    let rot = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (p.iter()
        .zip(reference)
        .map(|(a, b)| (a - cp - rot * (b - cr)).norm_sqr())
        .sum::<f64>()
        / n)
        .sqrt()
}

/// Outcome of a perturbation-relaxation run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmpiricalVerdict {
    pub mode: usize,
    pub initial_distance: f64,
    pub final_distance: f64,
    pub max_growth: f64,
    pub termination: Termination,
    pub unstable: bool,
}

/// Growth threshold for empirical verdicts.
pub const GROWTH_THRESHOLD: f64 = 10.0;

/// Perturb a ring in mode `m`, integrate, and call it unstable if the shape
/// distance grows by [`GROWTH_THRESHOLD`] or the spots collide.
pub fn empirical_verdict(
    ring: &RingSolution,
    model: Model,
    params: &ReducedParams,
    kernel: &KernelParams,
    m: usize,
    amplitude: f64,
    t_end: f64,
) -> Result<EmpiricalVerdict> {
    let base = SpotEnsemble::from_ring(ring, model, kernel)?;
    let start = perturb(&base, &ModePerturbation::position(m, amplitude))?;
    let reference = ring.positions();
    let traj = integrate(
        &start,
        params,
        kernel,
        t_end,
        &IntegrateOptions {
            sample_dt: (t_end / 2000.0).max(1e-3),
            ..Default::default()
        },
    )?;
    let d0 = shape_distance(&start.p, &reference);
    let mut max_growth = 1.0f64;
    let mut last = d0;
    for i in 0..traj.times.len() {
        last = shape_distance(&traj.positions(i), &reference);
        max_growth = max_growth.max(last / d0);
    }
    let collided = traj.termination != Termination::Completed;
    Ok(EmpiricalVerdict {
        mode: m,
        initial_distance: d0,
        final_distance: last,
        max_growth,
        termination: traj.termination,
        unstable: collided || max_growth >= GROWTH_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{rotating_ring, stationary_radius};

    const K: KernelParams = KernelParams::FIG1;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_spot_is_at_rest() {
        let ens = SpotEnsemble::first(vec![c(0.3, -0.1)]);
        let v = rhs_first(&ens, &ReducedParams::fig1(0.1), &K).unwrap();
        assert_eq!(v[0], c(0.0, 0.0));
    }

    #[test]
    fn pair_direction_follows_kernel_sign() {
        let p = ReducedParams::fig1(0.1);
        let ens = SpotEnsemble::first(vec![c(0.0, 0.0), c(0.18, 0.0)]);
        let v = rhs_first(&ens, &p, &K).unwrap();
        let f = K.value(0.18);
        // Spot 0 moves along -(p0 - p1) f = +0.18 f.
        assert!(v[0].re * f > 0.0);
        assert!((v[0].re - p.prefactor() * 0.18 * f).abs() < 1e-18);
        assert!((v[0] + v[1]).norm() < 1e-18);
    }

    #[test]
    fn collision_is_reported() {
        let ens = SpotEnsemble::first(vec![c(0.0, 0.0), c(0.1, 0.0)]);
        assert!(matches!(
            rhs_first(&ens, &ReducedParams::fig1(0.1), &K),
            Err(Error::Collision { .. })
        ));
    }

    #[test]
    fn saturated_single_spot() {
        let p = ReducedParams::fig1(1.0 / 0.3 + 0.01);
        let q = (p.m1 / p.m2).sqrt();
        let ens = SpotEnsemble::second(vec![c(0.0, 0.0)], vec![c(0.0, q)]);
        let (dp, dq) = rhs_second(&ens, &p, &K).unwrap();
        assert!(dq[0].norm() < 1e-18);
        assert!((dp[0] - c(0.0, q)).norm() < 1e-18);
    }

    #[test]
    fn rotating_ring_is_rigid_rotation() {
        let p = ReducedParams::fig1(1.0 / 0.3 + 0.01);
        let ring = rotating_ring(3, 2, &p, &K).unwrap();
        let ens = SpotEnsemble::from_ring(&ring, Model::Second, &K).unwrap();
        let (dp, dq) = rhs_second(&ens, &p, &K).unwrap();
        let iw = c(0.0, ring.omega0);
        for k in 0..3 {
            assert!((dp[k] - iw * ens.p[k]).norm() < 1e-10);
            assert!((dq[k] - iw * ens.q[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn equilibrium_is_preserved() {
        let ring = stationary_radius(3, 1, &K).unwrap();
        let ens = SpotEnsemble::from_ring(&ring, Model::First, &K).unwrap();
        let traj = integrate(&ens, &ReducedParams::fig1(0.1), &K, 1000.0, &IntegrateOptions {
            sample_dt: 100.0,
            ..Default::default()
        })
        .unwrap();
        let last = traj.positions(traj.times.len() - 1);
        for (a, b) in last.iter().zip(&ens.p) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn perturbation_shapes() {
        let ring = stationary_radius(4, 1, &K).unwrap();
        let ens = SpotEnsemble::from_ring(&ring, Model::First, &K).unwrap();
        let same = perturb(&ens, &ModePerturbation::position(2, 0.0)).unwrap();
        assert_eq!(same, ens);
        let shift = perturb(
            &ens,
            &ModePerturbation {
                m: 1,
                xi_plus: c(0.0, 0.0),
                xi_minus: c(0.01, 0.0),
                target: PerturbTarget::Position,
            },
        )
        .unwrap();
        for k in 0..4 {
            assert!((shift.p[k] - ens.p[k] - c(0.01 * ring.r0, 0.0)).norm() < 1e-15);
        }
        let eps = 1e-3;
        let turn = perturb(
            &ens,
            &ModePerturbation {
                m: 0,
                xi_plus: c(0.0, eps / 2.0),
                xi_minus: c(0.0, eps / 2.0),
                target: PerturbTarget::Position,
            },
        )
        .unwrap();
        for k in 0..4 {
            let expect = ens.p[k] * c(1.0, eps);
            assert!((turn.p[k] - expect).norm() < 1e-15);
        }
        assert!(perturb(&ens, &ModePerturbation::position(5, 0.1)).is_err());
    }

    #[test]
    fn measure_synthetic_rotation() {
        let (r0, w, n) = (0.18, 0.002, 3);
        let tail: Vec<(f64, Vec<Complex64>)> = (0..200)
            .map(|i| {
                let t = i as f64 * 5.0;
                let p = (0..n)
                    .map(|k| Complex64::from_polar(r0, w * t + 2.0 * PI * k as f64 / n as f64))
                    .collect();
                (t, p)
            })
            .collect();
        let m = measure_ring(&tail).unwrap();
        assert!((m.omega_est - w).abs() < 1e-6);
        assert!((m.r_mean - r0).abs() < 1e-12);
        assert!(m.shape_error < 1e-10);
        assert!(m.v_est.norm() < 1e-12);
        assert!(measure_ring(&tail[..50]).is_err());
    }

    #[test]
    fn measure_synthetic_translation() {
        let v = c(3e-4, 1e-4);
        let tail: Vec<(f64, Vec<Complex64>)> = (0..150)
            .map(|i| {
                let t = i as f64;
                let p = (0..4)
                    .map(|k| Complex64::from_polar(0.1, PI * k as f64 / 2.0) + v * t)
                    .collect();
                (t, p)
            })
            .collect();
        let m = measure_ring(&tail).unwrap();
        assert!((m.v_est - v).norm() < 1e-12);
        assert!(m.omega_est.abs() < 1e-12);
    }
}
