//! Fourier pseudo-spectral solver for the nonlocal two-component system on
//! the periodic square `[-L, L)^2`.
//!
//! The linear part is a 2x2 block per wavenumber and is integrated exactly;
//! the cubic term goes through a second-order exponential Runge-Kutta step
//! (ETD2RK). Coefficients come from the exponential of a 6x6 augmented
//! matrix, one per distinct `|k|^2`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::params::PdeParams;
use crate::profile::{solve_homogeneous, solve_radial_profile, ProfileOptions, SpotProfile};

/// Both field components on an `nx` by `ny` grid, row-major with `y` as the
/// row index.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    pub nx: usize,
    pub ny: usize,
    pub l: f64,
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

fn check_grid(nx: usize, ny: usize, l: f64) -> Result<()> {
    if !nx.is_power_of_two() || !ny.is_power_of_two() || nx < 4 || ny < 4 {
        return Err(Error::InvalidParams(format!(
            "grid {nx}x{ny} must be powers of two, at least 4"
        )));
    }
    if !(l > 0.0) {
        return Err(Error::InvalidParams(format!("half-width {l} must be positive")));
    }
    Ok(())
}

impl Field2D {
    pub fn uniform(nx: usize, ny: usize, l: f64, value: f64) -> Result<Self> {
        check_grid(nx, ny, l)?;
        Ok(Field2D {
            nx,
            ny,
            l,
            t: 0.0,
            u: vec![value; nx * ny],
            v: vec![value; nx * ny],
        })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.l / self.ny as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        -self.l + self.dx() * ix as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        -self.l + self.dy() * iy as f64
    }

    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    /// Shortest periodic offset `a - b` along an axis of length `2L`.
    pub fn min_image(&self, a: f64, b: f64) -> f64 {
        let period = 2.0 * self.l;
        let d = a - b;
        d - period * (d / period).round()
    }

    /// `u` along the row through `y`-index `iy`, from column `ix0` rightwards.
    pub fn row_u(&self, iy: usize, ix0: usize) -> Vec<f64> {
        (ix0..self.nx).map(|ix| self.u[self.idx(ix, iy)]).collect()
    }

    /// Flat binary snapshot: `nx`, `ny` as little-endian u64, then `L`, `t`
    /// as little-endian f64, then `u` and `v` row-major.
    pub fn write_snapshot(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&(self.nx as u64).to_le_bytes())?;
        w.write_all(&(self.ny as u64).to_le_bytes())?;
        w.write_all(&self.l.to_le_bytes())?;
        w.write_all(&self.t.to_le_bytes())?;
        for x in self.u.iter().chain(&self.v) {
            w.write_all(&x.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut b = [0u8; 8];
        let mut next = |r: &mut BufReader<File>| -> Result<[u8; 8]> {
            r.read_exact(&mut b)?;
            Ok(b)
        };
        let nx = u64::from_le_bytes(next(&mut r)?) as usize;
        let ny = u64::from_le_bytes(next(&mut r)?) as usize;
        let l = f64::from_le_bytes(next(&mut r)?);
        let t = f64::from_le_bytes(next(&mut r)?);
        check_grid(nx, ny, l)?;
        let mut read_block = |r: &mut BufReader<File>| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(nx * ny);
            for _ in 0..nx * ny {
                out.push(f64::from_le_bytes(next(r)?));
            }
            Ok(out)
        };
        let u = read_block(&mut r)?;
        let v = read_block(&mut r)?;
        Ok(Field2D { nx, ny, l, t, u, v })
    }
}

/// Signed integer wavenumber of FFT bin `i` out of `n`.
fn wave_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// 2-D transforms and Fourier symbols on a fixed grid.
pub struct Spectral {
    nx: usize,
    ny: usize,
    l: f64,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    /// `sx^2 + sy^2` per bin, with `|k|^2 = (pi/L)^2 * key`.
    keys: Vec<u64>,
}

impl Spectral {
    pub fn new(nx: usize, ny: usize, l: f64) -> Result<Self> {
        check_grid(nx, ny, l)?;
        let mut planner = FftPlanner::new();
        let mut keys = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            let sy = wave_index(iy, ny);
            for ix in 0..nx {
                let sx = wave_index(ix, nx);
                keys.push((sx * sx + sy * sy) as u64);
            }
        }
        Ok(Spectral {
            nx,
            ny,
            l,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
            keys,
        })
    }

    fn unit(&self) -> f64 {
        std::f64::consts::PI / self.l
    }

    /// `|k|^2` of every bin.
    pub fn k2(&self) -> Vec<f64> {
        let c = self.unit() * self.unit();
        self.keys.iter().map(|&s| c * s as f64).collect()
    }

    fn columns(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let (nx, ny) = (self.nx, self.ny);
        let mut t = vec![Complex64::new(0.0, 0.0); nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                t[ix * ny + iy] = buf[iy * nx + ix];
            }
        }
        fft.process(&mut t);
        for iy in 0..ny {
            for ix in 0..nx {
                buf[iy * nx + ix] = t[ix * ny + iy];
            }
        }
    }

    pub fn forward_complex(&self, buf: &mut [Complex64]) {
        self.fwd_x.process(buf);
        self.columns(buf, &self.fwd_y);
    }

    /// Inverse transform including the `1/(nx ny)` normalisation.
    pub fn inverse_complex(&self, buf: &mut [Complex64]) {
        self.inv_x.process(buf);
        self.columns(buf, &self.inv_y);
        let s = 1.0 / (self.nx * self.ny) as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }

    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward_complex(&mut buf);
        buf
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut buf = spec.to_vec();
        self.inverse_complex(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Multiply by `1/(D_w |k|^2 + 1)`.
    pub fn apply_ginv(&self, spec: &mut [Complex64], d_w: f64) {
        for (z, k2) in spec.iter_mut().zip(self.k2()) {
            *z /= d_w * k2 + 1.0;
        }
    }

    /// Multiply by `D_w |k|^2 + 1`.
    pub fn apply_g(&self, spec: &mut [Complex64], d_w: f64) {
        for (z, k2) in spec.iter_mut().zip(self.k2()) {
            *z *= d_w * k2 + 1.0;
        }
    }

    /// Spectral `d/dx`, with the Nyquist bin dropped.
    pub fn derivative_x(&self, spec: &mut [Complex64]) {
        let unit = self.unit();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let z = &mut spec[iy * self.nx + ix];
                if 2 * ix == self.nx {
                    *z = Complex64::new(0.0, 0.0);
                } else {
                    *z *= Complex64::new(0.0, unit * wave_index(ix, self.nx) as f64);
                }
            }
        }
    }

    /// Project onto the transforms of real fields. Without this, round-off
    /// imaginary parts evolve under the linear operator alone, which is
    /// unstable once the cubic term's damping is left out.
    pub fn make_real(&self, spec: &mut [Complex64]) {
        let (nx, ny) = (self.nx, self.ny);
        for iy in 0..ny {
            let jy = (ny - iy) % ny;
            for ix in 0..nx {
                let jx = (nx - ix) % nx;
                let (a, b) = (iy * nx + ix, jy * nx + jx);
                if b < a {
                    continue;
                }
                let m = 0.5 * (spec[a] + spec[b].conj());
                spec[a] = m;
                spec[b] = m.conj();
            }
        }
    }

    /// Keep bins with `|sx| < nx/3` and `|sy| < ny/3`.
    pub fn two_thirds_mask(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for iy in 0..self.ny {
            let sy = wave_index(iy, self.ny).unsigned_abs() as usize;
            for ix in 0..self.nx {
                let sx = wave_index(ix, self.nx).unsigned_abs() as usize;
                out.push(3 * sx < self.nx && 3 * sy < self.ny);
            }
        }
        out
    }
}

/// ETD2RK coefficients for one wavenumber: the 2x2 propagator and the first
/// columns of `phi1` and `phi2` (the cubic term only enters the `u` row).
#[derive(Clone, Copy, Debug)]
struct Coeffs {
    e: [f64; 4],
    p1: [f64; 2],
    p2: [f64; 2],
}

fn linear_block(params: &PdeParams, k2: f64) -> [f64; 4] {
    let a = -params.d_u * k2 + params.k1 - params.k4 / (1.0 + params.d_w * k2);
    [a, -params.k3, 1.0 / params.tau, -1.0 / params.tau]
}

fn coeffs(params: &PdeParams, k2: f64, dt: f64) -> Coeffs {
    let a = linear_block(params, k2);
    // [[A dt, I, 0], [0, 0, I], [0, 0, 0]]; the top block row of its
    // exponential is [e^{A dt}, phi1(A dt), phi2(A dt)].
    let mut b = vec![0.0; 36];
    b[0] = a[0] * dt;
    b[1] = a[1] * dt;
    b[6] = a[2] * dt;
    b[7] = a[3] * dt;
    b[2] = 1.0;
    b[6 + 3] = 1.0;
    b[2 * 6 + 4] = 1.0;
    b[3 * 6 + 5] = 1.0;
    let x = expm(&b, 6);
    Coeffs {
        e: [x[0], x[1], x[6], x[7]],
        p1: [x[2], x[6 + 2]],
        p2: [x[4], x[6 + 4]],
    }
}

/// Time stepper holding the spectral state.
pub struct Simulation {
    params: PdeParams,
    spectral: Spectral,
    dt: f64,
    table: Vec<Coeffs>,
    slot: Vec<u32>,
    mask: Option<Vec<bool>>,
    u_hat: Vec<Complex64>,
    v_hat: Vec<Complex64>,
    t: f64,
    nx: usize,
    ny: usize,
    l: f64,
    last_u: Option<Vec<f64>>,
    buf: Vec<Complex64>,
}

impl Simulation {
    pub fn new(field: &Field2D, params: &PdeParams, dt: f64, dealias: bool) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParams(format!("time step {dt} must be positive")));
        }
        let spectral = Spectral::new(field.nx, field.ny, field.l)?;
        let unit2 = spectral.unit() * spectral.unit();
        let mut index: HashMap<u64, u32> = HashMap::new();
        let mut table = Vec::new();
        let mut slot = Vec::with_capacity(spectral.keys.len());
        for &key in &spectral.keys {
            let s = *index.entry(key).or_insert_with(|| {
                table.push(coeffs(params, unit2 * key as f64, dt));
                (table.len() - 1) as u32
            });
            slot.push(s);
        }
        let mask = dealias.then(|| spectral.two_thirds_mask());
        let u_hat = spectral.forward(&field.u);
        let v_hat = spectral.forward(&field.v);
        Ok(Simulation {
            params: *params,
            dt,
            table,
            slot,
            mask,
            u_hat,
            v_hat,
            t: field.t,
            nx: field.nx,
            ny: field.ny,
            l: field.l,
            last_u: None,
            buf: vec![Complex64::new(0.0, 0.0); field.nx * field.ny],
            spectral,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn physical(&mut self, spec: &[Complex64]) -> Vec<f64> {
        self.buf.copy_from_slice(spec);
        self.spectral.inverse_complex(&mut self.buf);
        self.buf.iter().map(|z| z.re).collect()
    }

    /// Transform of `-u^3 + kappa`, de-aliased if requested.
    fn nonlinear(&mut self, u: &[f64]) -> Vec<Complex64> {
        let kappa = self.params.kappa;
        for (z, &x) in self.buf.iter_mut().zip(u) {
            *z = Complex64::new(kappa - x * x * x, 0.0);
        }
        self.spectral.forward_complex(&mut self.buf);
        let mut out = self.buf.clone();
        if let Some(mask) = &self.mask {
            for (z, keep) in out.iter_mut().zip(mask) {
                if !keep {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
        }
        out
    }

    /// Advance one step; returns the max-norm change of `u` since the
    /// previous step started (infinite on the first step).
    pub fn step(&mut self) -> Result<f64> {
        let u_hat = self.u_hat.clone();
        let u = self.physical(&u_hat);
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::BlowUp { t: self.t });
        }
        let change = match &self.last_u {
            Some(prev) => prev
                .iter()
                .zip(&u)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())),
            None => f64::INFINITY,
        };
        let n0 = self.nonlinear(&u);
        let dt = self.dt;
        let mut ua = vec![Complex64::new(0.0, 0.0); u_hat.len()];
        let mut va = ua.clone();
        for i in 0..u_hat.len() {
            let c = &self.table[self.slot[i] as usize];
            let (x, y) = (u_hat[i], self.v_hat[i]);
            ua[i] = c.e[0] * x + c.e[1] * y + dt * c.p1[0] * n0[i];
            va[i] = c.e[2] * x + c.e[3] * y + dt * c.p1[1] * n0[i];
        }
        let u_mid = self.physical(&ua);
        let na = self.nonlinear(&u_mid);
        for i in 0..ua.len() {
            let c = &self.table[self.slot[i] as usize];
            let dn = na[i] - n0[i];
            ua[i] += dt * c.p2[0] * dn;
            va[i] += dt * c.p2[1] * dn;
        }
        self.spectral.make_real(&mut ua);
        self.spectral.make_real(&mut va);
        self.u_hat = ua;
        self.v_hat = va;
        self.t += dt;
        self.last_u = Some(u);
        Ok(change)
    }

    pub fn field(&self) -> Field2D {
        Field2D {
            nx: self.nx,
            ny: self.ny,
            l: self.l,
            t: self.t,
            u: self.spectral.inverse(&self.u_hat),
            v: self.spectral.inverse(&self.v_hat),
        }
    }
}

/// Centres of spots at one instant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotTrack {
    pub t: f64,
    pub centers: Vec<[f64; 2]>,
    pub count: usize,
}

/// Connected components of `{u - u_c > frac * max(u - u_c)}` (4-neighbour,
/// periodic), each reduced to its `(u - u_c)`-weighted centroid.
pub fn detect_spots(field: &Field2D, u_c: f64, threshold_fraction: f64) -> SpotTrack {
    let (nx, ny) = (field.nx, field.ny);
    let peak = field.u.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x - u_c));
    let mut centers = Vec::new();
    // Relative floor so round-off on a flat field is not a spot.
    if peak > 1e-9 * (1.0 + u_c.abs()) {
        let level = threshold_fraction * peak;
        let inside: Vec<bool> = field.u.iter().map(|&x| x - u_c > level).collect();
        let mut seen = vec![false; nx * ny];
        let (dx, dy) = (field.dx(), field.dy());
        for start in 0..nx * ny {
            if !inside[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            // Unwrapped integer offsets from the seed keep centroids right
            // across the seam.
            let mut stack = vec![(start % nx, start / nx, 0i64, 0i64)];
            let (mut w, mut sx, mut sy) = (0.0, 0.0, 0.0);
            while let Some((ix, iy, ox, oy)) = stack.pop() {
                let weight = field.u[iy * nx + ix] - u_c;
                w += weight;
                sx += weight * ox as f64;
                sy += weight * oy as f64;
                let nbrs = [
                    ((ix + 1) % nx, iy, ox + 1, oy),
                    ((ix + nx - 1) % nx, iy, ox - 1, oy),
                    (ix, (iy + 1) % ny, ox, oy + 1),
                    (ix, (iy + ny - 1) % ny, ox, oy - 1),
                ];
                for (jx, jy, px, py) in nbrs {
                    let j = jy * nx + jx;
                    if inside[j] && !seen[j] {
                        seen[j] = true;
                        stack.push((jx, jy, px, py));
                    }
                }
            }
            let x0 = field.x(start % nx) + dx * sx / w;
            let y0 = field.y(start / nx) + dy * sy / w;
            let wrap = |z: f64| z - 2.0 * field.l * ((z + field.l) / (2.0 * field.l)).floor();
            centers.push([wrap(x0), wrap(y0)]);
        }
    }
    SpotTrack {
        t: field.t,
        count: centers.len(),
        centers,
    }
}

/// Offset applied to the `u` contribution of one embedded spot; `v` stays
/// centred, which starts the spot moving along `offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kick {
    pub spot: usize,
    pub offset: [f64; 2],
}

/// `u = u_c + sum_k u_s(|r - c_k|)` with minimal images, `v` likewise.
pub fn embed_spots(
    nx: usize,
    ny: usize,
    l: f64,
    profile: &SpotProfile,
    centers: &[[f64; 2]],
    kick: Option<&Kick>,
) -> Result<Field2D> {
    let mut field = Field2D::uniform(nx, ny, l, profile.u_c)?;
    let spline = profile.spline();
    let r_max = profile.r_max;
    let add = |target: &mut Vec<f64>, c: [f64; 2], f: &Field2D| {
        for iy in 0..ny {
            let ry = f.min_image(f.y(iy), c[1]);
            for ix in 0..nx {
                let rx = f.min_image(f.x(ix), c[0]);
                let r = rx.hypot(ry);
                if r < r_max {
                    target[iy * nx + ix] += spline.value(r);
                }
            }
        }
    };
    let geometry = field.clone();
    for (k, &c) in centers.iter().enumerate() {
        let uc = match kick {
            Some(kick) if kick.spot == k => [c[0] + kick.offset[0], c[1] + kick.offset[1]],
            _ => c,
        };
        add(&mut field.u, uc, &geometry);
        add(&mut field.v, c, &geometry);
    }
    if let Some(kick) = kick {
        if kick.spot >= centers.len() {
            return Err(Error::InvalidParams(format!(
                "kick targets spot {} of {}",
                kick.spot,
                centers.len()
            )));
        }
    }
    Ok(field)
}

/// Spot centres of an N-ring of radius `r0` about the origin.
pub fn ring_centers(n: usize, r0: f64, phase: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let th = phase + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [r0 * th.cos(), r0 * th.sin()]
        })
        .collect()
}

/// Ring of spots with at least `clearance` between the ring and the seam.
pub fn init_ring(
    n: usize,
    r0: f64,
    profile: &SpotProfile,
    nx: usize,
    ny: usize,
    l: f64,
    clearance: f64,
) -> Result<Field2D> {
    if n == 0 {
        return Err(Error::InvalidParams("a ring needs at least one spot".into()));
    }
    if r0 > l - clearance {
        return Err(Error::Clearance { r0, clearance, l });
    }
    embed_spots(nx, ny, l, profile, &ring_centers(n, r0, 0.0), None)
}

/// Initial condition of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitSpec {
    /// Homogeneous state plus uniform noise of the given amplitude.
    Homogeneous { noise: f64 },
    /// Gaussian bump `amplitude * exp(-(r/width)^2)` on top of `u_c`, in both fields.
    Bump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// Profile copies at explicit centres.
    Spots { centers: Vec<[f64; 2]> },
    /// Profile copies on a ring about the origin.
    Ring {
        n: usize,
        r0: f64,
        #[serde(default)]
        phase: f64,
    },
}

fn default_params() -> PdeParams {
    PdeParams::fig1()
}
fn default_grid() -> usize {
    256
}
fn default_l() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    0.05
}
fn default_record() -> f64 {
    10.0
}
fn default_steady() -> f64 {
    1e-7
}
fn default_true() -> bool {
    true
}
fn default_fraction() -> f64 {
    0.5
}
fn default_clearance() -> f64 {
    0.3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_params")]
    pub params: PdeParams,
    #[serde(default = "default_grid")]
    pub nx: usize,
    #[serde(default = "default_grid")]
    pub ny: usize,
    #[serde(default = "default_l")]
    pub l: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_record")]
    pub record_dt: f64,
    /// Max-norm change of `u` between steps below which the run is steady.
    #[serde(default = "default_steady")]
    pub steady_tol: f64,
    #[serde(default = "default_true")]
    pub stop_on_steady: bool,
    #[serde(default = "default_true")]
    pub stop_on_count_change: bool,
    #[serde(default)]
    pub dealias: bool,
    #[serde(default = "default_fraction")]
    pub threshold_fraction: f64,
    #[serde(default = "default_clearance")]
    pub clearance: f64,
    pub init: InitSpec,
    #[serde(default)]
    pub kick: Option<Kick>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(init: InitSpec, t_end: f64) -> Self {
        RunConfig {
            params: default_params(),
            nx: default_grid(),
            ny: default_grid(),
            l: default_l(),
            dt: default_dt(),
            t_end,
            record_dt: default_record(),
            steady_tol: default_steady(),
            stop_on_steady: true,
            stop_on_count_change: true,
            dealias: false,
            threshold_fraction: default_fraction(),
            clearance: default_clearance(),
            init,
            kick: None,
            seed: 0,
        }
    }

    /// The 128x128 desk-scale grid.
    pub fn fast(mut self) -> Self {
        self.nx = 128;
        self.ny = 128;
        self
    }

    fn needs_profile(&self) -> bool {
        matches!(self.init, InitSpec::Spots { .. } | InitSpec::Ring { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum PdeTermination {
    Completed { t: f64 },
    Steady { t: f64, change: f64 },
    CountChange { t: f64, from: usize, to: usize },
    BlowUp { t: f64 },
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub tracks: Vec<SpotTrack>,
    pub termination: PdeTermination,
    pub field: Field2D,
    pub u_c: f64,
    pub steps: usize,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub termination: PdeTermination,
    pub wall_seconds: f64,
    pub steps: usize,
    pub t_final: f64,
    pub final_count: usize,
    pub config: RunConfig,
}

/// Initial field of a run.
pub fn initial_field(
    config: &RunConfig,
    u_c: f64,
    profile: Option<&SpotProfile>,
) -> Result<Field2D> {
    let (nx, ny, l) = (config.nx, config.ny, config.l);
    let need = || {
        profile.ok_or_else(|| Error::InvalidParams("this initial condition needs a profile".into()))
    };
    match &config.init {
        InitSpec::Homogeneous { noise } => {
            let mut f = Field2D::uniform(nx, ny, l, u_c)?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            for x in f.u.iter_mut().chain(f.v.iter_mut()) {
                *x += noise * rng.gen_range(-1.0..1.0);
            }
            Ok(f)
        }
        InitSpec::Bump {
            amplitude,
            width,
            center,
        } => {
            let mut f = Field2D::uniform(nx, ny, l, u_c)?;
            let g = f.clone();
            for iy in 0..ny {
                let ry = g.min_image(g.y(iy), center[1]);
                for ix in 0..nx {
                    let rx = g.min_image(g.x(ix), center[0]);
                    let bump = amplitude * (-(rx * rx + ry * ry) / (width * width)).exp();
                    f.u[iy * nx + ix] += bump;
                    f.v[iy * nx + ix] += bump;
                }
            }
            Ok(f)
        }
        InitSpec::Spots { centers } => {
            embed_spots(nx, ny, l, need()?, centers, config.kick.as_ref())
        }
        InitSpec::Ring { n, r0, phase } => {
            if *r0 > l - config.clearance {
                return Err(Error::Clearance {
                    r0: *r0,
                    clearance: config.clearance,
                    l,
                });
            }
            embed_spots(
                nx,
                ny,
                l,
                need()?,
                &ring_centers(*n, *r0, *phase),
                config.kick.as_ref(),
            )
        }
    }
}

/// Run a configuration, solving the radial profile first when the initial
/// condition embeds spots.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let profile = if config.needs_profile() {
        Some(
            solve_radial_profile(&config.params, &ProfileOptions::default())
                .map_err(|e| e.in_stage("profile"))?,
        )
    } else {
        None
    };
    run_with_profile(config, profile.as_ref())
}

pub fn run_with_profile(config: &RunConfig, profile: Option<&SpotProfile>) -> Result<RunOutcome> {
    let started = Instant::now();
    let u_c = match profile {
        Some(p) => p.u_c,
        None => solve_homogeneous(&config.params)?.u_c,
    };
    let field = initial_field(config, u_c, profile)?;
    let mut sim = Simulation::new(&field, &config.params, config.dt, config.dealias)?;
    let mut tracks = vec![detect_spots(&field, u_c, config.threshold_fraction)];
    let record_every = ((config.record_dt / config.dt).round() as usize).max(1);
    let total = (config.t_end / config.dt).round() as usize;
    let mut steps = 0;
    let mut termination = PdeTermination::Completed { t: config.t_end };
    while steps < total {
        let change = match sim.step() {
            Ok(c) => c,
            Err(Error::BlowUp { t }) => {
                termination = PdeTermination::BlowUp { t };
                break;
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        if config.stop_on_steady && change < config.steady_tol {
            termination = PdeTermination::Steady {
                t: sim.time(),
                change,
            };
            tracks.push(detect_spots(&sim.field(), u_c, config.threshold_fraction));
            break;
        }
        if steps % record_every == 0 || steps == total {
            let f = sim.field();
            if !f.is_finite() {
                termination = PdeTermination::BlowUp { t: f.t };
                break;
            }
            let track = detect_spots(&f, u_c, config.threshold_fraction);
            let before = tracks.last().map_or(track.count, |t| t.count);
            let now = track.count;
            tracks.push(track);
            if config.stop_on_count_change && now != before {
                termination = PdeTermination::CountChange {
                    t: f.t,
                    from: before,
                    to: now,
                };
                break;
            }
        }
    }
    Ok(RunOutcome {
        tracks,
        termination,
        field: sim.field(),
        u_c,
        steps,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Spot-track CSV with columns `t, count, x0, y0, x1, y1, ...`.
pub fn write_tracks(tracks: &[SpotTrack], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_path(path)?;
    let widest = tracks.iter().map(|t| t.count).max().unwrap_or(0);
    let mut header = vec!["t".to_string(), "count".to_string()];
    for k in 0..widest {
        header.push(format!("x{k}"));
        header.push(format!("y{k}"));
    }
    w.write_record(&header)?;
    for t in tracks {
        let mut row = vec![format!("{}", t.t), t.count.to_string()];
        for c in &t.centers {
            row.push(format!("{}", c[0]));
            row.push(format!("{}", c[1]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `tracks.csv`, `final.bin` and `summary.json` into `dir`.
pub fn write_outputs(outcome: &RunOutcome, config: &RunConfig, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_tracks(&outcome.tracks, dir.join("tracks.csv"))?;
    outcome.field.write_snapshot(dir.join("final.bin"))?;
    let summary = RunSummary {
        termination: outcome.termination.clone(),
        wall_seconds: outcome.wall_seconds,
        steps: outcome.steps,
        t_final: outcome.field.t,
        final_count: outcome.tracks.last().map_or(0, |t| t.count),
        config: config.clone(),
    };
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

/// Max-norm gap between the field's radial section through `center` (along
/// +x) and the profile, over radii up to `r_limit`.
pub fn section_error(field: &Field2D, center: [f64; 2], profile: &SpotProfile, r_limit: f64) -> f64 {
    let spline = profile.spline();
    let iy = (((center[1] + field.l) / field.dy()).round() as usize) % field.ny;
    let mut worst = 0.0f64;
    for ix in 0..field.nx {
        let rx = field.min_image(field.x(ix), center[0]);
        if rx < 0.0 || rx > r_limit {
            continue;
        }
        let ry = field.min_image(field.y(iy), center[1]);
        let r = rx.hypot(ry);
        let want = profile.u_c + if r < profile.r_max { spline.value(r) } else { 0.0 };
        worst = worst.max((field.u[field.idx(ix, iy)] - want).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(nx: usize, ny: usize, l: f64, sx: f64, sy: f64) -> Vec<f64> {
        let f = Field2D::uniform(nx, ny, l, 0.0).unwrap();
        let k = std::f64::consts::PI / l;
        let mut out = vec![0.0; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                out[iy * nx + ix] = (k * (sx * f.x(ix) + sy * f.y(iy))).cos();
            }
        }
        out
    }

    #[test]
    fn ginv_symbols() {
        let s = Spectral::new(32, 16, 1.0).unwrap();
        let d_w = 9.64e-4;
        let mut c = s.forward(&vec![2.5; 32 * 16]);
        s.apply_ginv(&mut c, d_w);
        let back = s.inverse(&c);
        assert!(back.iter().all(|x| (x - 2.5).abs() < 1e-13));

        let m = mode(32, 16, 1.0, 3.0, 2.0);
        let mut c = s.forward(&m);
        s.apply_ginv(&mut c, d_w);
        let k2 = std::f64::consts::PI.powi(2) * 13.0;
        let back = s.inverse(&c);
        for (a, b) in back.iter().zip(&m) {
            assert!((a - b / (d_w * k2 + 1.0)).abs() < 1e-13);
        }

        let mut c = s.forward(&m);
        s.apply_g(&mut c, d_w);
        s.apply_ginv(&mut c, d_w);
        let back = s.inverse(&c);
        for (a, b) in back.iter().zip(&m) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_derivative_is_exact() {
        let (nx, ny, l) = (64, 32, 1.0);
        let f = Field2D::uniform(nx, ny, l, 0.0).unwrap();
        let k = std::f64::consts::PI / l;
        let data: Vec<f64> = (0..nx * ny)
            .map(|i| (5.0 * k * f.x(i % nx) + 2.0 * k * f.y(i / nx)).sin())
            .collect();
        let s = Spectral::new(nx, ny, l).unwrap();
        let mut c = s.forward(&data);
        s.derivative_x(&mut c);
        let d = s.inverse(&c);
        for i in 0..nx * ny {
            let want = 5.0 * k * (5.0 * k * f.x(i % nx) + 2.0 * k * f.y(i / nx)).cos();
            assert!((d[i] - want).abs() < 1e-12 * 5.0 * k);
        }
    }

    #[test]
    fn homogeneous_state_is_fixed() {
        let p = PdeParams::fig1();
        let u_c = solve_homogeneous(&p).unwrap().u_c;
        let f = Field2D::uniform(32, 32, 1.0, u_c).unwrap();
        let mut sim = Simulation::new(&f, &p, 0.05, false).unwrap();
        for _ in 0..5 {
            sim.step().unwrap();
        }
        let g = sim.field();
        assert!(g.u.iter().chain(&g.v).all(|x| (x - u_c).abs() < 1e-12));
    }

    #[test]
    fn homogeneous_noise_decays() {
        // Long enough for a spurious imaginary component to surface.
        for tau in [0.1, 3.0] {
            let p = PdeParams::fig1().with_tau(tau);
            let u_c = solve_homogeneous(&p).unwrap().u_c;
            let mut cfg = RunConfig::new(InitSpec::Homogeneous { noise: 1e-4 }, 1.0);
            cfg.nx = 32;
            cfg.ny = 32;
            cfg.seed = 7;
            let f = initial_field(&cfg, u_c, None).unwrap();
            let mut sim = Simulation::new(&f, &p, 0.1, false).unwrap();
            for _ in 0..4000 {
                sim.step().unwrap();
            }
            let g = sim.field();
            let dev = g.u.iter().fold(0.0f64, |m, x| m.max((x - u_c).abs()));
            assert!(dev < 1e-8, "tau {tau}: {dev}");
        }
    }

    #[test]
    fn second_order_in_time() {
        let p = PdeParams::fig1();
        let u_c = solve_homogeneous(&p).unwrap().u_c;
        let mut f = Field2D::uniform(32, 32, 1.0, u_c).unwrap();
        let m = mode(32, 32, 1.0, 1.0, 2.0);
        for (x, w) in f.u.iter_mut().zip(&m) {
            *x += 0.4 * w;
        }
        let advance = |dt: f64, steps: usize| {
            let mut s = Simulation::new(&f, &p, dt, false).unwrap();
            for _ in 0..steps {
                s.step().unwrap();
            }
            s.field().u
        };
        let reference = advance(0.025 / 16.0, 16 * 8);
        let err = |u: Vec<f64>| {
            u.iter()
                .zip(&reference)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        let coarse = err(advance(0.05, 4));
        let fine = err(advance(0.025, 8));
        let ratio = coarse / fine;
        assert!(ratio > 3.5 && ratio < 4.6, "ratio {ratio}");
    }

    #[test]
    fn snapshot_round_trip() {
        let mut f = Field2D::uniform(8, 4, 1.5, 0.0).unwrap();
        f.t = 12.5;
        for (i, x) in f.u.iter_mut().enumerate() {
            *x = i as f64 * 0.1;
        }
        f.v[3] = -7.0;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        f.write_snapshot(&path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 32 + 2 * 8 * 32);
        assert_eq!(Field2D::read_snapshot(&path).unwrap(), f);
    }

    #[test]
    fn detection_on_synthetic_fields() {
        let mut f = Field2D::uniform(64, 64, 1.0, -0.3).unwrap();
        assert_eq!(detect_spots(&f, -0.3, 0.5).count, 0);
        // A bump straddling the seam.
        let c = [0.98, -0.4];
        let g = f.clone();
        for iy in 0..64 {
            for ix in 0..64 {
                let rx = g.min_image(g.x(ix), c[0]);
                let ry = g.min_image(g.y(iy), c[1]);
                f.u[iy * 64 + ix] += (-(rx * rx + ry * ry) / 0.003).exp();
            }
        }
        let t = detect_spots(&f, -0.3, 0.5);
        assert_eq!(t.count, 1);
        assert!(f.min_image(t.centers[0][0], c[0]).abs() < 0.25 * f.dx());
        assert!((t.centers[0][1] - c[1]).abs() < 0.25 * f.dy());
    }
}

