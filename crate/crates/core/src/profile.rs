//! Homogeneous state, radial single-spot profile and the derived reduction
//! coefficients (`f(d)` sampled numerically and the saturation ratio `Q`).

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PdeParams;
use crate::roots::bisect;
use crate::spline::RadialSpline;

/// Real roots of the uniform steady-state cubic and the selected level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Homogeneous {
    /// Level that is stable against uniform perturbations.
    pub u_c: f64,
    /// Every real root, ascending.
    pub roots: Vec<f64>,
    /// Linear stability of each root against uniform perturbations.
    pub stable: Vec<bool>,
}

fn uniform_stable(params: &PdeParams, u: f64) -> bool {
    // Uniform perturbations see w = u, so the 2x2 Jacobian is
    // [[k1 - 3u^2 - k4, -k3], [1/tau, -1/tau]].
    let a = params.k1 - 3.0 * u * u - params.k4;
    let tol = 1e-12;
    let trace = a - 1.0 / params.tau;
    let det = (params.k3 - a) / params.tau;
    trace <= tol && det >= -tol
}

/// Solve `k1 u - u^3 - k3 u - k4 u + kappa = 0`.
pub fn solve_homogeneous(params: &PdeParams) -> Result<Homogeneous> {
    params.validate()?;
    let p = params.k3 + params.k4 - params.k1;
    let kappa = params.kappa;
    let cubic = |u: f64| u * u * u + p * u - kappa;
    let bound = 1.0 + p.abs().max(kappa.abs());
    let mut cuts = vec![-bound];
    if p < 0.0 {
        let c = (-p / 3.0).sqrt();
        cuts.extend([-c, c]);
    }
    cuts.push(bound);
    let mut roots: Vec<f64> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (cubic(a), cubic(b));
        let r = if fa == 0.0 {
            a
        } else if fb == 0.0 {
            b
        } else if (fa < 0.0) != (fb < 0.0) {
            bisect(cubic, a, b, 0.0)
        } else {
            continue;
        };
        if roots.last().is_none_or(|&last| (r - last).abs() > 1e-12) {
            roots.push(r);
        }
    }
    assert!(!roots.is_empty(), "an odd cubic always has a real root");
    let stable: Vec<bool> = roots.iter().map(|&u| uniform_stable(params, u)).collect();
    let u_c = roots
        .iter()
        .zip(&stable)
        .find(|(_, s)| **s)
        .map(|(u, _)| *u)
        .ok_or_else(|| Error::InvalidParams("no uniformly stable homogeneous state".into()))?;
    Ok(Homogeneous { u_c, roots, stable })
}

/// Radial steady state, stored as deviations from the homogeneous level.
#[derive(Clone, Debug, PartialEq)]
pub struct SpotProfile {
    pub rho: Vec<f64>,
    pub u_s: Vec<f64>,
    pub w_s: Vec<f64>,
    pub u_c: f64,
    pub r_max: f64,
    pub params: PdeParams,
}

/// Options for the radial Newton solve.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub r_max: f64,
    pub n: usize,
    /// Height of the Gaussian initial bump in units of `|u_c|`.
    pub guess_height: f64,
    /// Width of the initial bump in units of `sqrt(D_u)`.
    pub guess_width: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            r_max: 0.6,
            n: 2048,
            guess_height: 4.0,
            guess_width: 3.0,
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

type Block = [[f64; 2]; 2];

fn inv2(a: &Block) -> Block {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ]
}

fn mul2(a: &Block, b: &Block) -> Block {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn mulv(a: &Block, v: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// Block-tridiagonal solve; `lower[0]` and `upper[n-1]` are ignored.
fn block_thomas(lower: &[Block], diag: &[Block], upper: &[Block], rhs: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let n = diag.len();
    let mut cp = vec![[[0.0; 2]; 2]; n];
    let mut dp = vec![[0.0; 2]; n];
    let inv = inv2(&diag[0]);
    cp[0] = mul2(&inv, &upper[0]);
    dp[0] = mulv(&inv, rhs[0]);
    for i in 1..n {
        let bc = mul2(&lower[i], &cp[i - 1]);
        let mut m = diag[i];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] -= bc[r][c];
            }
        }
        let inv = inv2(&m);
        if i + 1 < n {
            cp[i] = mul2(&inv, &upper[i]);
        }
        let bd = mulv(&lower[i], dp[i - 1]);
        dp[i] = mulv(&inv, [rhs[i][0] - bd[0], rhs[i][1] - bd[1]]);
    }
    let mut x = dp.clone();
    for i in (0..n - 1).rev() {
        let cx = mulv(&cp[i], x[i + 1]);
        x[i] = [dp[i][0] - cx[0], dp[i][1] - cx[1]];
    }
    x
}

/// Laplacian stencil `(lower, diag, upper)` at node `i` of the radial grid.
fn stencil(i: usize, h: f64, rho: f64) -> (f64, f64, f64) {
    let h2 = h * h;
    if i == 0 {
        // Symmetric extension: u'' + u'/rho -> 2 u'' at the origin.
        (0.0, -4.0 / h2, 4.0 / h2)
    } else {
        let c = 1.0 / (2.0 * h * rho);
        (1.0 / h2 - c, -2.0 / h2, 1.0 / h2 + c)
    }
}

struct Radial<'a> {
    p: &'a PdeParams,
    u_c: f64,
    h: f64,
    rho: &'a [f64],
}

impl Radial<'_> {
    fn residual(&self, u: &[f64], w: &[f64]) -> Vec<[f64; 2]> {
        let n = u.len();
        let p = self.p;
        let mut r = vec![[0.0; 2]; n];
        for i in 0..n - 1 {
            let (lo, di, up) = stencil(i, self.h, self.rho[i]);
            let lap = |v: &[f64]| {
                let left = if i == 0 { 0.0 } else { lo * v[i - 1] };
                left + di * v[i] + up * v[i + 1]
            };
            let big = self.u_c + u[i];
            r[i][0] = p.d_u * lap(u) + p.k1 * big - big * big * big - p.k3 * big
                - p.k4 * (self.u_c + w[i])
                + p.kappa;
            r[i][1] = p.d_w * lap(w) - w[i] + u[i];
        }
        r[n - 1] = [u[n - 1], w[n - 1]];
        r
    }

    fn newton_step(&self, u: &[f64], res: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let n = u.len();
        let p = self.p;
        let mut lower = vec![[[0.0; 2]; 2]; n];
        let mut diag = vec![[[0.0; 2]; 2]; n];
        let mut upper = vec![[[0.0; 2]; 2]; n];
        for i in 0..n - 1 {
            let (lo, di, up) = stencil(i, self.h, self.rho[i]);
            let big = self.u_c + u[i];
            diag[i] = [
                [p.d_u * di + p.k1 - 3.0 * big * big - p.k3, -p.k4],
                [1.0, p.d_w * di - 1.0],
            ];
            lower[i] = [[p.d_u * lo, 0.0], [0.0, p.d_w * lo]];
            upper[i] = [[p.d_u * up, 0.0], [0.0, p.d_w * up]];
        }
        diag[n - 1] = [[1.0, 0.0], [0.0, 1.0]];
        let rhs: Vec<[f64; 2]> = res.iter().map(|r| [-r[0], -r[1]]).collect();
        block_thomas(&lower, &diag, &upper, &rhs)
    }
}

fn max_norm(r: &[[f64; 2]]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v[0].abs()).max(v[1].abs()))
}

fn radial_grid(r_max: f64, n: usize) -> (Vec<f64>, f64) {
    let h = r_max / (n - 1) as f64;
    ((0..n).map(|i| i as f64 * h).collect(), h)
}

/// Solve the radial boundary-value problem from the default Gaussian guess.
pub fn solve_radial_profile(params: &PdeParams, opts: &ProfileOptions) -> Result<SpotProfile> {
    let hom = solve_homogeneous(params)?;
    let (rho, _) = radial_grid(opts.r_max, opts.n);
    let width = opts.guess_width * params.d_u.sqrt();
    let mut u0: Vec<f64> = rho
        .iter()
        .map(|r| opts.guess_height * hom.u_c.abs() * (-(r / width).powi(2)).exp())
        .collect();
    *u0.last_mut().unwrap() = 0.0;
    let w0 = vec![0.0; opts.n];
    solve_radial_profile_from(params, opts, &u0, &w0)
}

/// Solve the radial boundary-value problem from an explicit initial guess.
pub fn solve_radial_profile_from(
    params: &PdeParams,
    opts: &ProfileOptions,
    u_guess: &[f64],
    w_guess: &[f64],
) -> Result<SpotProfile> {
    params.validate()?;
    if opts.n < 16 || u_guess.len() != opts.n || w_guess.len() != opts.n {
        return Err(Error::InvalidParams(format!(
            "grid size {} with guesses of length {} and {}",
            opts.n,
            u_guess.len(),
            w_guess.len()
        )));
    }
    let u_c = solve_homogeneous(params)?.u_c;
    let (rho, h) = radial_grid(opts.r_max, opts.n);
    let sys = Radial {
        p: params,
        u_c,
        h,
        rho: &rho,
    };
    let mut u = u_guess.to_vec();
    let mut w = w_guess.to_vec();
    let mut res = sys.residual(&u, &w);
    let mut norm = max_norm(&res);
    let mut iterations = 0;
    while norm >= opts.tol {
        if iterations >= opts.max_iter || !norm.is_finite() {
            return Err(Error::NewtonDiverged {
                iterations,
                residual: norm,
            });
        }
        iterations += 1;
        let dx = sys.newton_step(&u, &res);
        let mut lambda = 1.0;
        loop {
            let ut: Vec<f64> = u.iter().zip(&dx).map(|(a, d)| a + lambda * d[0]).collect();
            let wt: Vec<f64> = w.iter().zip(&dx).map(|(a, d)| a + lambda * d[1]).collect();
            let rt = sys.residual(&ut, &wt);
            let nt = max_norm(&rt);
            if nt < norm * (1.0 - 1e-4 * lambda) || lambda < 2e-3 {
                u = ut;
                w = wt;
                res = rt;
                norm = nt;
                break;
            }
            lambda *= 0.5;
        }
    }
    let amplitude = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if amplitude < 1e-8 {
        return Err(Error::NoSpot);
    }
    Ok(SpotProfile {
        rho,
        u_s: u,
        w_s: w,
        u_c,
        r_max: opts.r_max,
        params: *params,
    })
}

/// JSON sidecar written next to the profile CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct Sidecar {
    params: PdeParams,
    u_c: f64,
    r_max: f64,
    n: usize,
}

impl SpotProfile {
    pub fn spacing(&self) -> f64 {
        self.rho[1] - self.rho[0]
    }

    pub fn spline(&self) -> RadialSpline {
        RadialSpline::new(0.0, self.spacing(), &self.u_s)
    }

    /// Max-norm residual of the discrete radial equations.
    pub fn residual(&self) -> f64 {
        let sys = Radial {
            p: &self.params,
            u_c: self.u_c,
            h: self.spacing(),
            rho: &self.rho,
        };
        max_norm(&sys.residual(&self.u_s, &self.w_s))
    }

    /// Radii where `u_s` changes sign, by linear interpolation.
    pub fn sign_changes(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let n = self.u_s.len();
        for i in 0..n - 2 {
            let (a, b) = (self.u_s[i], self.u_s[i + 1]);
            if a != 0.0 && b != 0.0 && (a < 0.0) != (b < 0.0) {
                out.push(self.rho[i] - a * (self.rho[i + 1] - self.rho[i]) / (b - a));
            }
        }
        out
    }

    /// Exponential decay rate of the tail from lobe extrema in `[lo, hi]`,
    /// using the two-dimensional far-field shape `e^{-a rho}/sqrt(rho)`.
    pub fn tail_decay_rate(&self, lo: f64, hi: f64) -> Result<f64> {
        let zeros: Vec<f64> = self
            .sign_changes()
            .into_iter()
            .filter(|z| *z >= lo && *z <= hi)
            .collect();
        let mut pts = Vec::new();
        for lobe in zeros.windows(2) {
            let peak = self
                .rho
                .iter()
                .zip(&self.u_s)
                .filter(|(r, _)| **r > lobe[0] && **r < lobe[1])
                .map(|(r, u)| (*r, (u.abs() * r.sqrt())))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((r, y)) = peak {
                pts.push((r, y.ln()));
            }
        }
        if pts.len() < 2 {
            return Err(Error::TooFewSamples {
                need: 2,
                got: pts.len(),
            });
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Ok(-sxy / sxx)
    }

    /// Multiply the deviation fields by `c`; used to probe scale invariances.
    pub fn scaled(&self, c: f64) -> SpotProfile {
        let mut out = self.clone();
        out.u_s.iter_mut().for_each(|x| *x *= c);
        out.w_s.iter_mut().for_each(|x| *x *= c);
        out
    }

    fn sidecar_path(csv: &Path) -> PathBuf {
        csv.with_extension("json")
    }

    /// Write `rho,u_s,w_s` as CSV plus a JSON sidecar with the same stem.
    /// Values use shortest round-trip formatting, so reading back is exact.
    pub fn write(&self, csv_path: impl AsRef<Path>) -> Result<()> {
        let csv_path = csv_path.as_ref();
        let mut wtr = csv::Writer::from_path(csv_path)?;
        wtr.write_record(["rho", "u_s", "w_s"])?;
        for i in 0..self.rho.len() {
            wtr.write_record([
                format!("{:e}", self.rho[i]),
                format!("{:e}", self.u_s[i]),
                format!("{:e}", self.w_s[i]),
            ])?;
        }
        wtr.flush()?;
        let side = Sidecar {
            params: self.params,
            u_c: self.u_c,
            r_max: self.r_max,
            n: self.rho.len(),
        };
        std::fs::write(
            Self::sidecar_path(csv_path),
            serde_json::to_string_pretty(&side)?,
        )?;
        Ok(())
    }

    pub fn read(csv_path: impl AsRef<Path>) -> Result<SpotProfile> {
        let csv_path = csv_path.as_ref();
        let side: Sidecar =
            serde_json::from_str(&std::fs::read_to_string(Self::sidecar_path(csv_path))?)?;
        let mut rdr = csv::Reader::from_path(csv_path)?;
        let (mut rho, mut u_s, mut w_s) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let get = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse("short profile row".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(e.to_string()))
            };
            rho.push(get(0)?);
            u_s.push(get(1)?);
            w_s.push(get(2)?);
        }
        if rho.len() != side.n {
            return Err(Error::Parse(format!(
                "sidecar declares {} rows, CSV has {}",
                side.n,
                rho.len()
            )));
        }
        Ok(SpotProfile {
            rho,
            u_s,
            w_s,
            u_c: side.u_c,
            r_max: side.r_max,
            params: side.params,
        })
    }
}

/// Precomputed 2-D quadrature for the interaction integral.
///
/// The grid is square with spacing no larger than the profile spacing and
/// covers the support disc of the spot at the origin; the source term
/// `u_x (3u^2 + 6 u_c u)` is cached, only the shifted partner is evaluated
/// per distance.
pub struct InteractionQuadrature {
    spline: RadialSpline,
    r_max: f64,
    h: f64,
    /// Per row `y >= 0`: (y, first x index, weighted source values).
    rows: Vec<(f64, i64, Vec<f64>)>,
    /// `sum u_x^2 h^2` over the full plane.
    denom: f64,
}

impl InteractionQuadrature {
    pub fn new(profile: &SpotProfile) -> Self {
        Self::with_spacing(profile, profile.spacing())
    }

    pub fn with_spacing(profile: &SpotProfile, spacing: f64) -> Self {
        let spline = profile.spline();
        let r_max = profile.r_max;
        let m = (r_max / spacing).ceil() as i64;
        let h = r_max / m as f64;
        let u_c = profile.u_c;
        let rows: Vec<(f64, i64, Vec<f64>, f64)> = (0..=m)
            .into_par_iter()
            .map(|iy| {
                let y = iy as f64 * h;
                let weight = if iy == 0 { 1.0 } else { 2.0 };
                let half = (r_max * r_max - y * y).max(0.0).sqrt();
                let ix0 = -((half / h).floor() as i64);
                let mut vals = Vec::with_capacity((2 * -ix0 + 1) as usize);
                let mut den = 0.0;
                for ix in ix0..=-ix0 {
                    let x = ix as f64 * h;
                    let r = (x * x + y * y).sqrt();
                    let (u, du, _) = spline.eval3(r);
                    let ux = if r > 0.0 { du * x / r } else { 0.0 };
                    vals.push(weight * ux * (3.0 * u * u + 6.0 * u_c * u));
                    den += weight * ux * ux;
                }
                (y, ix0, vals, den)
            })
            .collect();
        let denom = rows.iter().map(|r| r.3).sum::<f64>() * h * h;
        let rows = rows.into_iter().map(|(y, i, v, _)| (y, i, v)).collect();
        InteractionQuadrature {
            spline,
            r_max,
            h,
            rows,
            denom,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// `f(d)`: overlap of the source with the partner shifted by `d` along x.
    pub fn eval(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::InvalidParams(format!("distance must be positive, got {d}")));
        }
        let limit = 2.0 * self.r_max;
        if d > limit {
            return Err(Error::SupportExceeded { d, limit });
        }
        let h = self.h;
        let num: f64 = self
            .rows
            .par_iter()
            .map(|(y, ix0, vals)| {
                let y2 = y * y;
                let mut s = 0.0;
                for (k, src) in vals.iter().enumerate() {
                    let x = (*ix0 + k as i64) as f64 * h - d;
                    s += src * self.spline.value((x * x + y2).sqrt());
                }
                s
            })
            .sum();
        Ok(num * h * h / (d * self.denom))
    }

    /// Evaluate at many distances.
    pub fn sample(&self, ds: &[f64]) -> Result<Vec<(f64, f64)>> {
        ds.iter().map(|&d| Ok((d, self.eval(d)?))).collect()
    }
}

/// One-shot numeric interaction function.
pub fn interaction_numeric(profile: &SpotProfile, d: f64) -> Result<f64> {
    InteractionQuadrature::new(profile).eval(d)
}

/// `Q = iint u_xx^2 / iint u_x^2` on a 2-D grid with the profile spacing.
pub fn compute_q(profile: &SpotProfile) -> Result<f64> {
    compute_q_with_spacing(profile, profile.spacing())
}

/// [`compute_q`] on a grid of the given spacing. Cartesian derivatives come
/// from the radial spline by the chain rule.
pub fn compute_q_with_spacing(profile: &SpotProfile, spacing: f64) -> Result<f64> {
    let spline = profile.spline();
    let r_max = profile.r_max;
    let m = (r_max / spacing).ceil() as i64;
    let h = r_max / m as f64;
    let (num, den) = (-m..=m)
        .into_par_iter()
        .map(|iy| {
            let y = iy as f64 * h;
            let mut num = 0.0;
            let mut den = 0.0;
            for ix in -m..=m {
                let x = ix as f64 * h;
                let r = (x * x + y * y).sqrt();
                if r >= r_max {
                    continue;
                }
                let (_, du, ddu) = spline.eval3(r);
                let (ux, uxx) = if r > 0.0 {
                    let (c2, s2) = (x * x / (r * r), y * y / (r * r));
                    (du * x / r, ddu * c2 + du / r * s2)
                } else {
                    (0.0, ddu)
                };
                num += uxx * uxx;
                den += ux * ux;
            }
            (num, den)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    if den * h * h < 1e-14 {
        return Err(Error::Degenerate(format!(
            "denominator {:e} of Q is below 1e-14",
            den * h * h
        )));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_reference_level() {
        let h = solve_homogeneous(&PdeParams::fig1()).unwrap();
        assert_eq!(h.roots.len(), 1);
        let u = h.u_c;
        assert!((u * u * u + 0.29 * u + 0.1).abs() < 1e-15);
        assert!((u + 0.2739401683479871).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_trivial_and_symmetric() {
        let mut p = PdeParams::fig1();
        p.k1 = p.k3 + p.k4;
        p.kappa = 0.0;
        assert!(solve_homogeneous(&p).unwrap().u_c.abs() < 1e-12);
        let mut q = PdeParams::fig1();
        q.kappa = 0.1;
        let up = solve_homogeneous(&q).unwrap().u_c;
        let dn = solve_homogeneous(&PdeParams::fig1()).unwrap().u_c;
        assert!((up + dn).abs() < 1e-14);
    }

    #[test]
    fn homogeneous_reports_all_roots() {
        let mut p = PdeParams::fig1();
        p.k1 = 2.5;
        p.kappa = 0.0;
        let h = solve_homogeneous(&p).unwrap();
        assert_eq!(h.roots.len(), 3);
        assert!(h.stable.iter().any(|s| *s));
    }

    #[test]
    fn zero_guess_is_trivial() {
        let opts = ProfileOptions {
            n: 512,
            ..Default::default()
        };
        let z = vec![0.0; 512];
        let r = solve_radial_profile_from(&PdeParams::fig1(), &opts, &z, &z);
        assert!(matches!(r, Err(Error::NoSpot)));
    }

    #[test]
    fn block_thomas_matches_dense() {
        let n = 5;
        let lower: Vec<Block> = (0..n).map(|i| [[0.3 * i as f64, 0.1], [0.0, -0.2]]).collect();
        let diag: Vec<Block> = (0..n).map(|i| [[4.0 + i as f64, 0.5], [-0.7, 3.0]]).collect();
        let upper: Vec<Block> = (0..n).map(|i| [[0.2, -0.1 * i as f64], [0.4, 0.1]]).collect();
        let x_true: Vec<[f64; 2]> = (0..n).map(|i| [i as f64 - 1.5, 0.5 * i as f64]).collect();
        let mut rhs = vec![[0.0; 2]; n];
        for i in 0..n {
            let mut r = mulv(&diag[i], x_true[i]);
            if i > 0 {
                let l = mulv(&lower[i], x_true[i - 1]);
                r = [r[0] + l[0], r[1] + l[1]];
            }
            if i + 1 < n {
                let u = mulv(&upper[i], x_true[i + 1]);
                r = [r[0] + u[0], r[1] + u[1]];
            }
            rhs[i] = r;
        }
        let x = block_thomas(&lower, &diag, &upper, &rhs);
        for i in 0..n {
            assert!((x[i][0] - x_true[i][0]).abs() < 1e-13);
            assert!((x[i][1] - x_true[i][1]).abs() < 1e-13);
        }
    }
}
