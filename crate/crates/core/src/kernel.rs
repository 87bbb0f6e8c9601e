//! Closed-form oscillatory interaction kernel
//! `f(d) = M0 e^{-alpha d} d^{-3/2} cos(beta (d - d0))`, valid for `d > d_b`.
//!
//! Zeros of the cosine factor are the binding distances. A zero with
//! `f'(d_c) > 0` is attractive (a stable pair spacing), otherwise repulsive.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};

use crate::error::{Error, Result};
use crate::linalg::solve_real;
use crate::roots::illinois;

/// Fitted constants of the interaction kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub m0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub d0: f64,
    /// Core radius; the model is invalid at or below it.
    pub d_b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroKind {
    Attractive,
    Repulsive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroClassification {
    pub d_c: f64,
    pub kind: ZeroKind,
    /// 1-based ordinal among zeros of the same kind, counted from `d_b`.
    pub index: usize,
}

impl KernelParams {
    /// Constants of the reference fit.
    pub const FIG1: KernelParams = KernelParams {
        m0: 6.87e-4,
        alpha: 15.7,
        beta: 43.15,
        d0: 0.199,
        d_b: 0.12,
    };

    pub fn new(m0: f64, alpha: f64, beta: f64, d0: f64, d_b: f64) -> Result<Self> {
        let k = KernelParams {
            m0,
            alpha,
            beta,
            d0,
            d_b,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.m0 > 0.0
            && self.alpha > 0.0
            && self.beta > 0.0
            && self.d_b > 0.0
            && self.d0 > self.d_b
            && [self.m0, self.alpha, self.beta, self.d0, self.d_b]
                .iter()
                .all(|x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "kernel needs m0, alpha, beta > 0 and d0 > d_b > 0, got {self:?}"
            )))
        }
    }

    fn check(&self, d: f64) -> Result<()> {
        if d > self.d_b {
            Ok(())
        } else {
            Err(Error::CoreViolation { d, d_b: self.d_b })
        }
    }

    /// Envelope `M0 e^{-alpha d} / d^{3/2}`.
    pub fn envelope(&self, d: f64) -> f64 {
        self.m0 * (-self.alpha * d).exp() / (d * d.sqrt())
    }

    /// Kernel value without the core check.
    pub fn value(&self, d: f64) -> f64 {
        self.envelope(d) * (self.beta * (d - self.d0)).cos()
    }

    /// Kernel derivative without the core check.
    pub fn slope(&self, d: f64) -> f64 {
        let phase = self.beta * (d - self.d0);
        self.envelope(d)
            * ((-self.alpha - 1.5 / d) * phase.cos() - self.beta * phase.sin())
    }

    pub fn eval(&self, d: f64) -> Result<f64> {
        self.check(d)?;
        Ok(self.value(d))
    }

    pub fn eval_deriv(&self, d: f64) -> Result<f64> {
        self.check(d)?;
        Ok(self.slope(d))
    }

    /// Location of the zero with cosine phase `pi/2 + k pi`.
    fn zero_at(&self, k: i64) -> f64 {
        self.d0 + (FRAC_PI_2 + k as f64 * PI) / self.beta
    }

    /// All zeros in `(d_lo, d_hi)`, ascending, classified by the sign of `f'`.
    pub fn find_zeros(&self, d_lo: f64, d_hi: f64) -> Vec<ZeroClassification> {
        if !(d_hi > d_lo) {
            return Vec::new();
        }
        let lo = d_lo.max(self.d_b);
        let k_first = ((lo - self.d0) * self.beta / PI - 0.5).floor() as i64;
        // Ordinals count from the first zero above the core radius.
        let k_core = ((self.d_b - self.d0) * self.beta / PI - 0.5).floor() as i64 + 1;
        let mut out = Vec::new();
        let mut k = k_first;
        loop {
            let d = self.zero_at(k);
            if d >= d_hi {
                break;
            }
            if d > lo && d > d_lo {
                // cos phase = pi/2 + k pi, so f' = -env * beta * (-1)^k.
                let kind = if k.rem_euclid(2) == 1 {
                    ZeroKind::Attractive
                } else {
                    ZeroKind::Repulsive
                };
                let same_kind_before = (k_core..k)
                    .filter(|j| (j.rem_euclid(2) == 1) == (kind == ZeroKind::Attractive))
                    .count();
                out.push(ZeroClassification {
                    d_c: d,
                    kind,
                    index: same_kind_before + 1,
                });
            }
            k += 1;
        }
        out
    }

    /// The `branch`-th attractive zero above the core radius (1-based).
    pub fn attractive_zero(&self, branch: usize) -> Option<f64> {
        if branch == 0 {
            return None;
        }
        let hi = self.d_b + (2 * branch + 2) as f64 * PI / self.beta;
        self.find_zeros(self.d_b, hi)
            .into_iter()
            .filter(|z| z.kind == ZeroKind::Attractive)
            .nth(branch - 1)
            .map(|z| z.d_c)
    }

    /// Canonical JSON text used for storage and hashing.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernel params serialize")
    }

    /// Git blob id (`git hash-object`) of the canonical JSON text.
    pub fn content_hash(&self) -> String {
        git_blob_hash(self.to_json().as_bytes())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Load from `builtin:fig1` or a JSON file path.
    pub fn load(source: &str) -> Result<Self> {
        if let Some(name) = source.strip_prefix("builtin:") {
            return match name {
                "fig1" => Ok(Self::FIG1),
                other => Err(Error::Parse(format!("unknown builtin kernel '{other}'"))),
            };
        }
        let text = std::fs::read_to_string(source)?;
        let k: KernelParams = serde_json::from_str(&text)?;
        k.validate()?;
        Ok(k)
    }
}

/// Git-style content hash: SHA-1 over `"blob <len>\0" + bytes`.
pub fn git_blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    format!("{:x}", h.finalize())
}

/// Zeros of tabulated `(d, f)` samples by sign-change bracketing followed by
/// regula falsi on `eval`.
pub fn numeric_zeros<F: FnMut(f64) -> f64>(
    mut eval: F,
    samples: &[(f64, f64)],
    tol: f64,
) -> Vec<ZeroClassification> {
    let mut out = Vec::new();
    let (mut n_att, mut n_rep) = (0, 0);
    for w in samples.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        if fa == 0.0 || (fa < 0.0) == (fb < 0.0) {
            continue;
        }
        let d_c = illinois(&mut eval, a, b, tol);
        let kind = if fb > fa {
            n_att += 1;
            ZeroKind::Attractive
        } else {
            n_rep += 1;
            ZeroKind::Repulsive
        };
        let index = if kind == ZeroKind::Attractive { n_att } else { n_rep };
        out.push(ZeroClassification { d_c, kind, index });
    }
    out
}

/// Outcome of [`fit`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub params: KernelParams,
    /// Root-mean-square of the envelope-weighted residual, relative to `m0`.
    pub rms: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Options for [`fit`].
#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Relative step tolerance on every parameter.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 200,
            tol: 1e-12,
        }
    }
}

/// Initial guess from zero spacing and the log-envelope slope.
fn initial_guess(samples: &[(f64, f64)], d_b: f64) -> Result<[f64; 4]> {
    let mut zeros = Vec::new();
    for w in samples.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            zeros.push(a - fa * (b - a) / (fb - fa));
        }
    }
    if zeros.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least three sign changes (two half periods), found {}",
            zeros.len()
        )));
    }
    let spacing = (zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64;
    let beta = PI / spacing;

    // Lobe peaks of |f| d^{3/2}; their logarithm is linear in d.
    let mut peaks = Vec::new();
    for lobe in zeros.windows(2) {
        let best = samples
            .iter()
            .filter(|(d, _)| *d > lobe[0] && *d < lobe[1])
            .map(|&(d, f)| (d, f.abs() * d.powf(1.5)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((d, y)) = best {
            if y > 0.0 {
                peaks.push((d, y.ln()));
            }
        }
    }
    if peaks.len() < 2 {
        return Err(Error::Fit("cannot estimate the envelope".into()));
    }
    let n = peaks.len() as f64;
    let mx = peaks.iter().map(|p| p.0).sum::<f64>() / n;
    let my = peaks.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = peaks.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = peaks.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let alpha = (-slope).max(1e-3);
    let m0 = (my - slope * mx).exp();

    // Phase: midpoint of the first positive lobe above the core.
    let mut d0 = None;
    for lobe in zeros.windows(2) {
        if lobe[0] <= d_b {
            continue;
        }
        let mid = 0.5 * (lobe[0] + lobe[1]);
        let positive = samples
            .iter()
            .filter(|(d, _)| *d > lobe[0] && *d < lobe[1])
            .map(|(_, f)| *f)
            .sum::<f64>()
            > 0.0;
        if positive {
            d0 = Some(mid);
            break;
        }
    }
    let d0 = d0.ok_or_else(|| Error::Fit("no positive lobe above the core radius".into()))?;
    Ok([m0, alpha, beta, d0])
}

fn model(p: &[f64; 4], d: f64) -> (f64, [f64; 4]) {
    let [m0, alpha, beta, d0] = *p;
    let g = (-alpha * d).exp() / (d * d.sqrt());
    let phase = beta * (d - d0);
    let (s, c) = phase.sin_cos();
    let f = m0 * g * c;
    (f, [g * c, -d * f, -m0 * g * s * (d - d0), m0 * g * s * beta])
}

/// Levenberg-Marquardt fit of the closed form to `(d, f)` samples.
///
/// Residuals are weighted by `e^{alpha0 d} d^{3/2}` with `alpha0` the initial
/// envelope estimate, which flattens the exponential near field. The core
/// radius is not identifiable from samples and is passed in.
pub fn fit(samples: &[(f64, f64)], d_b: f64, opts: FitOptions) -> Result<FitReport> {
    if samples.len() < 30 {
        return Err(Error::TooFewSamples {
            need: 30,
            got: samples.len(),
        });
    }
    if samples.iter().any(|(d, f)| *d <= d_b || !f.is_finite()) {
        return Err(Error::Fit("samples must satisfy d > d_b and be finite".into()));
    }
    if samples.iter().all(|(_, f)| *f == 0.0) {
        return Err(Error::Fit("all samples are zero; amplitude unidentifiable".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut p = initial_guess(&sorted, d_b)?;
    let weights: Vec<f64> = sorted
        .iter()
        .map(|(d, _)| (p[1] * d).exp() * d.powf(1.5) / p[0])
        .collect();

    let cost = |p: &[f64; 4]| -> f64 {
        sorted
            .iter()
            .zip(&weights)
            .map(|(&(d, f), w)| (w * (model(p, d).0 - f)).powi(2))
            .sum()
    };

    let mut lambda = 1e-3;
    let mut current = cost(&p);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut jtj = [0.0; 16];
        let mut jtr = [0.0; 4];
        for (&(d, f), w) in sorted.iter().zip(&weights) {
            let (val, grad) = model(&p, d);
            let r = w * (val - f);
            for i in 0..4 {
                jtr[i] += w * grad[i] * r;
                for j in 0..4 {
                    jtj[i * 4 + j] += w * w * grad[i] * grad[j];
                }
            }
        }
        let mut accepted = false;
        for _ in 0..40 {
            let mut a = jtj;
            for i in 0..4 {
                a[i * 4 + i] *= 1.0 + lambda;
            }
            let mut step = jtr.map(|x| -x);
            if solve_real(&mut a, &mut step, 4).is_none() {
                lambda *= 10.0;
                continue;
            }
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2], p[3] + step[3]];
            let c = cost(&trial);
            if c.is_finite() && c <= current {
                let small = (0..4).all(|i| step[i].abs() <= opts.tol * trial[i].abs().max(1e-300));
                p = trial;
                current = c;
                lambda = (lambda * 0.3).max(1e-15);
                accepted = true;
                if small {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged || !accepted {
            // A rejected step at huge damping means no descent direction is
            // left: a stationary point within round-off.
            converged = converged || !accepted;
            break;
        }
    }
    // Keep the amplitude positive by absorbing a sign flip into the phase.
    if p[0] < 0.0 {
        p[0] = -p[0];
        p[3] += PI / p[2];
    }
    let params = KernelParams {
        m0: p[0],
        alpha: p[1],
        beta: p[2],
        d0: p[3],
        d_b,
    };
    let rms = (current / sorted.len() as f64).sqrt();
    Ok(FitReport {
        params,
        rms,
        iterations,
        converged,
    })
}
