//! Dormand-Prince 5(4) with adaptive steps and the standard fourth-order
//! continuous extension for output at requested times.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Copy, Debug)]
pub struct DopriOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; estimated when `None`.
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for DopriOptions {
    fn default() -> Self {
        DopriOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h0: None,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DopriStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Dense samples plus how the integration ended.
#[derive(Clone, Debug)]
pub struct DopriOutput<E> {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: DopriStats,
    /// Last accepted time and state.
    pub t_last: f64,
    pub y_last: Vec<f64>,
    /// Set when the right-hand side refused to evaluate near `t_last`.
    pub halted: Option<E>,
}

fn wrms(v: &[f64], y0: &[f64], y1: &[f64], o: &DopriOptions) -> f64 {
    let n = v.len() as f64;
    (v.iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = o.atol + o.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum::<f64>()
        / n)
        .sqrt()
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end`, recording the solution at
/// each of `sample_times` (ascending, within `[t0, t_end]`).
///
/// If `f` returns an error during a trial stage the step is shrunk; once the
/// step cannot shrink further the integration stops and reports the error in
/// [`DopriOutput::halted`].
pub fn integrate<F, E>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    sample_times: &[f64],
    o: &DopriOptions,
) -> Result<DopriOutput<E>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> std::result::Result<(), E>,
{
    let n = y0.len();
    let mut out = DopriOutput {
        times: Vec::new(),
        states: Vec::new(),
        stats: DopriStats::default(),
        t_last: t0,
        y_last: y0.to_vec(),
        halted: None,
    };
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        if sample_times[next_sample] == t0 {
            out.times.push(t0);
            out.states.push(y0.to_vec());
        }
        next_sample += 1;
    }
    if t_end <= t0 {
        return Ok(out);
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    if let Err(e) = f(t, &y, &mut k1) {
        out.halted = Some(e);
        return Ok(out);
    }
    out.stats.evaluations += 1;

    let mut h = match o.h0 {
        Some(h) => h,
        None => {
            let sc: Vec<f64> = y.iter().map(|v| o.atol + o.rtol * v.abs()).collect();
            let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
            let d1 = (k1.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            let y1: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + h0 * b).collect();
            let mut f1 = vec![0.0; n];
            let h1 = if f(t + h0, &y1, &mut f1).is_ok() {
                out.stats.evaluations += 1;
                let d2 = (f1
                    .iter()
                    .zip(&k1)
                    .zip(&sc)
                    .map(|((a, b), s)| ((a - b) / s).powi(2))
                    .sum::<f64>()
                    / n as f64)
                    .sqrt()
                    / h0;
                if d1.max(d2) <= 1e-15 {
                    (h0 * 1e-3).max(1e-6)
                } else {
                    (0.01 / d1.max(d2)).powf(0.2)
                }
            } else {
                h0
            };
            (100.0 * h0).min(h1)
        }
    };
    h = h.min(o.h_max).min(t_end - t);

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut last_rejected = false;
    let mut steps = 0;

    while t < t_end {
        steps += 1;
        if steps > o.max_steps {
            return Err(Error::StepUnderflow { t });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }
        if t + 1.01 * h >= t_end {
            h = t_end - t;
        }

        let stages = (|| -> std::result::Result<(), E> {
            for i in 0..n {
                ys[i] = y[i] + h * A21 * k1[i];
            }
            f(t + C2 * h, &ys, &mut k2)?;
            for i in 0..n {
                ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            f(t + C3 * h, &ys, &mut k3)?;
            for i in 0..n {
                ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(t + C4 * h, &ys, &mut k4)?;
            for i in 0..n {
                ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(t + C5 * h, &ys, &mut k5)?;
            for i in 0..n {
                ys[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            f(t + h, &ys, &mut k6)?;
            for i in 0..n {
                y_new[i] = y[i]
                    + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            f(t + h, &y_new, &mut k7)?;
            Ok(())
        })();
        out.stats.evaluations += 6;

        if let Err(e) = stages {
            out.stats.rejected += 1;
            h *= 0.25;
            if h < 1e-12 * t.abs().max(1.0) {
                out.t_last = t;
                out.y_last = y;
                out.halted = Some(e);
                return Ok(out);
            }
            last_rejected = true;
            continue;
        }

        for i in 0..n {
            err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = wrms(&err, &y, &y_new, o);
        if !e.is_finite() || e > 1.0 {
            out.stats.rejected += 1;
            let fac = if e.is_finite() {
                (0.9 * e.powf(-0.2)).max(0.2)
            } else {
                0.2
            };
            h *= fac;
            last_rejected = true;
            continue;
        }

        // Accepted: emit dense samples inside (t, t + h].
        let t_new = t + h;
        while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
            let ts = sample_times[next_sample];
            let theta = (ts - t) / h;
            let th1 = 1.0 - theta;
            let state: Vec<f64> = (0..n)
                .map(|i| {
                    let r2 = y_new[i] - y[i];
                    let r3 = h * k1[i] - r2;
                    let r4 = r2 - h * k7[i] - r3;
                    let r5 = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                    y[i] + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)))
                })
                .collect();
            out.times.push(ts);
            out.states.push(state);
            next_sample += 1;
        }
        out.stats.accepted += 1;
        t = t_new;
        std::mem::swap(&mut y, &mut y_new);
        std::mem::swap(&mut k1, &mut k7);

        let mut fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h = (h * fac).min(o.h_max);
    }
    out.t_last = t;
    out.y_last = y;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_dense_output() {
        let ts: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let out = integrate::<_, ()>(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0, 0.0],
            10.0,
            &ts,
            &DopriOptions {
                rtol: 1e-11,
                atol: 1e-13,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.times.len(), ts.len());
        for (t, s) in out.times.iter().zip(&out.states) {
            assert!((s[0] - t.cos()).abs() < 1e-9, "t={t}");
            assert!((s[1] + t.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn fifth_order_convergence_with_fixed_steps() {
        let run = |h: f64| {
            let out = integrate::<_, ()>(
                |_, y, dy| {
                    dy[0] = -2.0 * y[0] + y[0] * y[0];
                    Ok(())
                },
                0.0,
                &[0.5],
                1.0,
                &[],
                &DopriOptions {
                    rtol: 1.0,
                    atol: 1.0,
                    h0: Some(h),
                    h_max: h,
                    ..Default::default()
                },
            )
            .unwrap();
            // y = 2 / (1 + 3 e^{2t})
            (out.y_last[0] - 2.0 / (1.0 + 3.0 * 2f64.exp())).abs()
        };
        let ratio = run(0.1) / run(0.05);
        assert!(ratio > 25.0 && ratio < 45.0, "ratio {ratio}");
    }

    #[test]
    fn halts_on_refusal() {
        let out = integrate(
            |t, y, dy| {
                if y[0] > 2.0 {
                    return Err(t);
                }
                dy[0] = 1.0;
                Ok(())
            },
            0.0,
            &[0.0],
            10.0,
            &[],
            &DopriOptions::default(),
        )
        .unwrap();
        assert!(out.halted.is_some());
        assert!((out.y_last[0] - 2.0).abs() < 1e-6);
    }
}
