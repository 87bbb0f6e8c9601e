//! Regeneration of the stability tables, radius curves and the
//! profile-to-PDE cross-validation pipeline.
//!
//! Every CSV written here starts with `#` lines carrying the JSON config and
//! the content hash of the kernel, so an output file identifies its inputs.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{fit, FitOptions, KernelParams};
use crate::odesim::{empirical_verdict, EmpiricalVerdict, Model};
use crate::params::{PdeParams, ReducedParams, FIG1_Q};
use crate::pdesim::{run_with_profile, InitSpec, PdeTermination, RunConfig};
use crate::profile::{compute_q, solve_radial_profile, InteractionQuadrature, ProfileOptions};
use crate::rings::{
    approximate_radius, max_rotating_state, rotating_rings, rotating_ring, stationary_radius,
    traveling_ring, RingKind, RingSolution,
};
use crate::stability::{all_modes, reduced_modes, verdict, verdict_over_modes, Verdict};

/// Ring counts covered by the tables.
pub const TABLE_N: std::ops::RangeInclusive<usize> = 2..=8;

fn tau_c() -> f64 {
    1.0 / PdeParams::fig1().k3
}

/// Ring kind and `tau` of a table.
pub fn table_setting(which: u8) -> Result<(RingKind, f64)> {
    match which {
        1 => Ok((RingKind::Stationary, 0.1)),
        2 => Ok((RingKind::Traveling, tau_c() + 0.01)),
        3 => Ok((RingKind::Rotating, tau_c() + 0.01)),
        _ => Err(Error::InvalidParams(format!("no table {which}; expected 1, 2 or 3"))),
    }
}

/// Published rows of a table for N = 2..=8: ODE and PDE verdicts per branch.
/// `None` marks a PDE cell without a result.
#[derive(Clone, Debug)]
pub struct PublishedTable {
    pub ode: [[Verdict; 7]; 2],
    pub pde: [[Option<Verdict>; 7]; 2],
}

pub fn published_table(which: u8) -> Result<PublishedTable> {
    use Verdict::{Stable as S, Unstable as U};
    let (ode, pde) = match which {
        1 => (
            [[S, S, U, S, S, U, S], [S; 7]],
            [
                [Some(S), Some(S), Some(U), Some(S), None, Some(U), Some(S)],
                [Some(S); 7],
            ],
        ),
        2 => (
            [[S, S, U, S, S, U, S], [S, S, S, U, U, S, S]],
            [
                [Some(S), Some(S), Some(U), Some(S), None, Some(U), Some(U)],
                [Some(S), Some(S), Some(S), Some(U), Some(U), Some(U), Some(U)],
            ],
        ),
        3 => (
            [[S, S, U, S, S, U, S], [S, S, S, U, U, U, U]],
            [
                [Some(S), Some(S), Some(U), Some(S), None, Some(U), Some(U)],
                [Some(S), Some(S), Some(S), Some(U), Some(U), Some(U), Some(U)],
            ],
        ),
        _ => return Err(Error::InvalidParams(format!("no table {which}"))),
    };
    Ok(PublishedTable { ode, pde })
}

/// Published verdicts for one cell, if `(kind, tau)` is a table setting.
pub fn published_cell(kind: RingKind, tau: f64, n: usize, branch: usize) -> Option<(Verdict, Option<Verdict>)> {
    let which = (1..=3u8).find(|w| {
        table_setting(*w).is_ok_and(|(k, t)| k == kind && (t - tau).abs() < 1e-9)
    })?;
    if !TABLE_N.contains(&n) || !(1..=2).contains(&branch) {
        return None;
    }
    let t = published_table(which).ok()?;
    Some((t.ode[branch - 1][n - 2], t.pde[branch - 1][n - 2]))
}

/// Build the ring of a table cell.
pub fn table_ring(
    kind: RingKind,
    n: usize,
    branch: usize,
    params: &ReducedParams,
    kernel: &KernelParams,
) -> Result<RingSolution> {
    match kind {
        RingKind::Stationary => stationary_radius(n, branch, kernel),
        RingKind::Traveling => traveling_ring(n, branch, params, kernel),
        RingKind::Rotating => rotating_ring(n, branch, params, kernel),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableConfig {
    pub which: u8,
    pub kind: RingKind,
    pub tau: f64,
    pub q: f64,
    pub kernel: KernelParams,
    pub kernel_hash: String,
    pub eps_neutral: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableCell {
    pub n: usize,
    pub branch: usize,
    /// `None` when the ring does not exist (written as N.A.).
    pub ring: Option<RingSolution>,
    pub verdict: Option<Verdict>,
    pub margin: f64,
    pub neutral_count: usize,
    /// Verdict over every block `m = 0..N`; must equal `verdict`.
    pub full_range_verdict: Option<Verdict>,
    pub published_ode: Verdict,
    pub published_pde: Option<Verdict>,
    pub pde_na: bool,
    pub matches_published: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableReport {
    pub config: TableConfig,
    pub cells: Vec<TableCell>,
}

impl TableReport {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(|c| c.matches_published)
    }

    pub fn mismatches(&self) -> Vec<&TableCell> {
        self.cells.iter().filter(|c| !c.matches_published).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut s = String::new();
        writeln!(s, "# config: {}", serde_json::to_string(&self.config)?).ok();
        writeln!(s, "# kernel_hash: {}", self.config.kernel_hash).ok();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "table",
            "kind",
            "tau",
            "n",
            "branch",
            "r0",
            "omega0",
            "speed",
            "verdict",
            "margin",
            "neutral_count",
            "published_ode",
            "published_pde",
            "pde_na",
            "match",
        ])?;
        for c in &self.cells {
            let na = "N.A.".to_string();
            let (r0, omega, speed) = match &c.ring {
                Some(r) => (
                    format!("{:.10}", r.r0),
                    format!("{:.10}", r.omega0),
                    format!("{:.10}", r.v0.norm()),
                ),
                None => (na.clone(), na.clone(), na.clone()),
            };
            w.write_record([
                self.config.which.to_string(),
                self.config.kind.to_string(),
                format!("{:.6}", self.config.tau),
                c.n.to_string(),
                c.branch.to_string(),
                r0,
                omega,
                speed,
                c.verdict.map_or(na.clone(), |v| v.to_string()),
                format!("{:.6e}", c.margin),
                c.neutral_count.to_string(),
                c.published_ode.to_string(),
                c.published_pde.map_or(na.clone(), |v| v.to_string()),
                c.pde_na.to_string(),
                c.matches_published.to_string(),
            ])?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        s.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(s)
    }
}

/// ODE-side verdicts of Table 1, 2 or 3 for N = 2..=8 and both branches.
/// Cells are evaluated in parallel and assembled in a fixed order.
pub fn reproduce_table(which: u8, kernel: &KernelParams, eps_neutral: Option<f64>) -> Result<TableReport> {
    reproduce_table_with_q(which, kernel, FIG1_Q, eps_neutral)
}

pub fn reproduce_table_with_q(
    which: u8,
    kernel: &KernelParams,
    q: f64,
    eps_neutral: Option<f64>,
) -> Result<TableReport> {
    let (kind, tau) = table_setting(which)?;
    let published = published_table(which)?;
    let params = ReducedParams::new(PdeParams::fig1().k3, tau, q);
    let keys: Vec<(usize, usize)> = (1..=2usize)
        .flat_map(|b| TABLE_N.map(move |n| (n, b)))
        .collect();
    let cells = keys
        .par_iter()
        .map(|&(n, branch)| -> Result<TableCell> {
            let published_ode = published.ode[branch - 1][n - 2];
            let published_pde = published.pde[branch - 1][n - 2];
            let ring = match table_ring(kind, n, branch, &params, kernel) {
                Ok(r) => Some(r),
                Err(Error::BranchNotRealizable { .. }) => None,
                Err(e) => return Err(e),
            };
            let (verdict_, margin, neutral, full) = match &ring {
                Some(r) => {
                    let rep = verdict(r, &params, kernel, eps_neutral)?;
                    let full =
                        verdict_over_modes(r, &params, kernel, &all_modes(n), eps_neutral)?;
                    (Some(rep.verdict), rep.margin, rep.neutral_count, Some(full.verdict))
                }
                None => (None, f64::NAN, 0, None),
            };
            Ok(TableCell {
                n,
                branch,
                ring,
                verdict: verdict_,
                margin,
                neutral_count: neutral,
                full_range_verdict: full,
                published_ode,
                published_pde,
                pde_na: published_pde.is_none(),
                matches_published: verdict_ == Some(published_ode),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TableReport {
        config: TableConfig {
            which,
            kind,
            tau,
            q,
            kernel: *kernel,
            kernel_hash: kernel.content_hash(),
            eps_neutral,
        },
        cells,
    })
}

/// One rotating ring on a radius curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusCurveRow {
    pub tau: f64,
    pub tau_offset: f64,
    pub m1: f64,
    pub branch: usize,
    /// Order of the root within its branch, by increasing radius.
    pub root: usize,
    pub r0: f64,
    pub omega0: f64,
    pub verdict: Verdict,
    pub margin: f64,
    /// Radius and `M1` of the largest rotating state of this branch.
    pub r_max: f64,
    pub m1_critical: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusCurveConfig {
    pub n: usize,
    pub tau_grid: Vec<f64>,
    pub q: f64,
    pub kernel_hash: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusCurve {
    pub config: RadiusCurveConfig,
    pub rows: Vec<RadiusCurveRow>,
}

/// Rotating-ring radii of an N-ring along a grid of `tau > tau_c`, with
/// verdicts. Points with `M1` above a branch's critical value carry no row
/// for that branch, which ends the curve.
pub fn radius_curve(n: usize, tau_grid: &[f64], kernel: &KernelParams, q: f64) -> Result<RadiusCurve> {
    let k3 = PdeParams::fig1().k3;
    if let Some(bad) = tau_grid.iter().find(|t| **t <= tau_c()) {
        return Err(Error::InvalidParams(format!(
            "tau = {bad} is not above the drift bifurcation"
        )));
    }
    let per_tau = tau_grid
        .par_iter()
        .map(|&tau| -> Result<Vec<RadiusCurveRow>> {
            let params = ReducedParams::new(k3, tau, q);
            let mut rows: Vec<RadiusCurveRow> = Vec::new();
            let mut rings = rotating_rings(n, &params, kernel)?;
            rings.sort_by(|a, b| a.branch.cmp(&b.branch).then(a.r0.total_cmp(&b.r0)));
            for ring in rings {
                let root = rows.iter().filter(|r| r.branch == ring.branch).count();
                let rep = verdict(&ring, &params, kernel, None)?;
                let (r_max, m1_crit) = max_rotating_state(n, ring.branch.max(1), &params, kernel)?;
                rows.push(RadiusCurveRow {
                    tau,
                    tau_offset: tau - tau_c(),
                    m1: params.m1,
                    branch: ring.branch,
                    root,
                    r0: ring.r0,
                    omega0: ring.omega0,
                    verdict: rep.verdict,
                    margin: rep.margin,
                    r_max,
                    m1_critical: m1_crit,
                });
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RadiusCurve {
        config: RadiusCurveConfig {
            n,
            tau_grid: tau_grid.to_vec(),
            q,
            kernel_hash: kernel.content_hash(),
        },
        rows: per_tau.into_iter().flatten().collect(),
    })
}

impl RadiusCurve {
    pub fn to_csv(&self) -> Result<String> {
        let mut s = String::new();
        writeln!(s, "# config: {}", serde_json::to_string(&self.config)?).ok();
        writeln!(s, "# kernel_hash: {}", self.config.kernel_hash).ok();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "tau", "tau_minus_tau_c", "m1", "branch", "root", "r0", "omega0", "verdict", "margin",
            "r_max", "m1_critical",
        ])?;
        for r in &self.rows {
            w.write_record([
                format!("{:.6}", r.tau),
                format!("{:.6}", r.tau_offset),
                format!("{:.6e}", r.m1),
                r.branch.to_string(),
                r.root.to_string(),
                format!("{:.8}", r.r0),
                format!("{:.8e}", r.omega0),
                r.verdict.to_string(),
                format!("{:.6e}", r.margin),
                format!("{:.8}", r.r_max),
                format!("{:.6e}", r.m1_critical),
            ])?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        s.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusRow {
    pub n: usize,
    pub branch: usize,
    pub r0: f64,
    pub approx: f64,
    /// `N d_c / (2 pi)`, the large-N limit.
    pub large_n: f64,
}

/// Exact and approximate stationary radii for a range of N.
pub fn radius_vs_n(ns: &[usize], kernel: &KernelParams) -> Result<Vec<RadiusRow>> {
    let mut out = Vec::new();
    for branch in 1..=2 {
        let d_c = kernel
            .attractive_zero(branch)
            .ok_or(Error::BranchNotRealizable { n: 0, branch })?;
        for &n in ns {
            out.push(RadiusRow {
                n,
                branch,
                r0: stationary_radius(n, branch, kernel)?.r0,
                approx: approximate_radius(n, branch, kernel)?,
                large_n: n as f64 * d_c / (2.0 * std::f64::consts::PI),
            });
        }
    }
    Ok(out)
}

pub fn radius_vs_n_csv(rows: &[RadiusRow], kernel: &KernelParams) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "# kernel: {}", serde_json::to_string(kernel)?).ok();
    writeln!(s, "# kernel_hash: {}", kernel.content_hash()).ok();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "branch", "r0", "approx", "large_n"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.branch.to_string(),
            format!("{:.8}", r.r0),
            format!("{:.8}", r.approx),
            format!("{:.8}", r.large_n),
        ])?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    s.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(s)
}

/// Known reasons for ODE and PDE verdicts to differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discrepancy {
    /// A spot ignites at the ring centre; no PDE verdict exists.
    CenterIgnition,
    /// A moving ring deforms and interactions beyond the reduced model act.
    MovingRingDeformation,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossOptions {
    /// Fit the kernel and `Q` from the solved profile instead of the builtin.
    pub derive_kernel: bool,
    /// Integration horizon of the odesim check; chosen from the margin if `None`.
    pub ode_t_end: Option<f64>,
    pub ode_amplitude: f64,
    /// Horizon of an optional 128x128 PDE run from the ring.
    pub pde_t_end: Option<f64>,
}

impl Default for CrossOptions {
    fn default() -> Self {
        CrossOptions {
            derive_kernel: false,
            ode_t_end: None,
            ode_amplitude: 1e-3,
            pde_t_end: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PdeCheck {
    pub termination: PdeTermination,
    pub final_count: usize,
    pub mean_radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossReport {
    pub n: usize,
    pub branch: usize,
    pub tau: f64,
    pub kind: RingKind,
    pub kernel: KernelParams,
    pub kernel_hash: String,
    pub q: f64,
    pub ring: RingSolution,
    pub analytic: Verdict,
    pub margin: f64,
    pub ode: EmpiricalVerdict,
    pub pde: Option<PdeCheck>,
    pub published_ode: Option<Verdict>,
    pub published_pde: Option<Verdict>,
    pub analytic_matches_ode_run: bool,
    pub analytic_matches_published: Option<bool>,
    pub discrepancy: Option<Discrepancy>,
}

fn tag<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(stage))
}

/// Profile, kernel, ring, analytic verdict, reduced-model run and an
/// optional PDE run for one configuration.
pub fn cross_validate(
    n: usize,
    branch: usize,
    tau: f64,
    kind: RingKind,
    opts: &CrossOptions,
) -> Result<CrossReport> {
    let pde = PdeParams::fig1().with_tau(tau);
    let needs_profile = opts.derive_kernel || opts.pde_t_end.is_some();
    let profile = if needs_profile {
        Some(tag("profile", solve_radial_profile(&pde, &ProfileOptions::default()))?)
    } else {
        None
    };
    let (kernel, q) = match (&profile, opts.derive_kernel) {
        (Some(p), true) => {
            let quad = InteractionQuadrature::new(p);
            let builtin = KernelParams::FIG1;
            let ds: Vec<f64> = (0..40).map(|i| 0.125 + 0.008 * i as f64).collect();
            let samples = tag("kernel", quad.sample(&ds))?;
            let report = tag("kernel", fit(&samples, builtin.d_b, FitOptions::default()))?;
            (report.params, tag("kernel", compute_q(p))?)
        }
        _ => (KernelParams::FIG1, FIG1_Q),
    };
    let params = ReducedParams::new(pde.k3, tau, q);
    let ring = tag("rings", table_ring(kind, n, branch, &params, &kernel))?;
    let rep = tag("stability", verdict(&ring, &params, &kernel, None))?;
    let model = match kind {
        RingKind::Stationary => Model::First,
        _ => Model::Second,
    };
    let (m, rate) = match rep.dominant() {
        Some((m, e)) => (m.rem_euclid(n as i64) as usize, e.re),
        None => (2.min(n), 0.0),
    };
    // Enough time for a tenfold change at the dominant rate, within bounds.
    let rate_scale = if model == Model::First {
        params.prefactor()
    } else {
        1.0
    };
    let t_end = opts.ode_t_end.unwrap_or_else(|| {
        let r = (rate * rate_scale).abs().max(1e-5);
        (3.0 * 10f64.ln() / r).clamp(500.0, 2e5)
    });
    let ode = tag(
        "odesim",
        empirical_verdict(&ring, model, &params, &kernel, m, opts.ode_amplitude, t_end),
    )?;
    let pde_check = match (opts.pde_t_end, &profile) {
        (Some(t_end), Some(p)) => {
            let mut cfg = RunConfig::new(
                InitSpec::Ring {
                    n,
                    r0: ring.r0,
                    phase: 0.0,
                },
                t_end,
            )
            .fast();
            cfg.params = pde;
            cfg.stop_on_steady = false;
            let out = tag("pdesim", run_with_profile(&cfg, Some(p)))?;
            let last = out.tracks.last().cloned();
            let (count, mean_radius) = match last {
                Some(t) if t.count > 0 => {
                    let cx = t.centers.iter().map(|c| c[0]).sum::<f64>() / t.count as f64;
                    let cy = t.centers.iter().map(|c| c[1]).sum::<f64>() / t.count as f64;
                    let r = t
                        .centers
                        .iter()
                        .map(|c| (c[0] - cx).hypot(c[1] - cy))
                        .sum::<f64>()
                        / t.count as f64;
                    (t.count, r)
                }
                _ => (0, f64::NAN),
            };
            Some(PdeCheck {
                termination: out.termination,
                final_count: count,
                mean_radius,
            })
        }
        _ => None,
    };
    let published = published_cell(kind, tau, n, branch);
    let published_ode = published.map(|p| p.0);
    let published_pde = published.and_then(|p| p.1);
    let discrepancy = match published {
        Some((_, None)) => Some(Discrepancy::CenterIgnition),
        Some((o, Some(p))) if o != p && kind != RingKind::Stationary => {
            Some(Discrepancy::MovingRingDeformation)
        }
        _ => None,
    };
    Ok(CrossReport {
        n,
        branch,
        tau,
        kind,
        kernel_hash: kernel.content_hash(),
        kernel,
        q,
        ring,
        analytic: rep.verdict,
        margin: rep.margin,
        analytic_matches_ode_run: (rep.verdict == Verdict::Unstable) == ode.unstable,
        analytic_matches_published: published_ode.map(|p| p == rep.verdict),
        ode,
        pde: pde_check,
        published_ode,
        published_pde,
        discrepancy,
    })
}

/// Modes scanned by the verdict, re-exported for reports.
pub fn verdict_modes(n: usize) -> Vec<i64> {
    reduced_modes(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_rows_shape() {
        for w in 1..=3 {
            let t = published_table(w).unwrap();
            // N = 6 branch 1 has no PDE verdict in any table.
            assert!(t.pde[0][4].is_none());
            assert_eq!(t.ode[0][2], Verdict::Unstable);
        }
        assert!(published_table(4).is_err());
    }

    #[test]
    fn published_cell_lookup() {
        let (o, p) = published_cell(RingKind::Traveling, tau_c() + 0.01, 8, 2).unwrap();
        assert_eq!(o, Verdict::Stable);
        assert_eq!(p, Some(Verdict::Unstable));
        assert!(published_cell(RingKind::Traveling, 3.5, 8, 2).is_none());
    }

    #[test]
    fn table_csv_is_stable() {
        let k = KernelParams::FIG1;
        let a = reproduce_table(3, &k, None).unwrap().to_csv().unwrap();
        let b = reproduce_table(3, &k, None).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("# config: "));
        assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 15);
    }

    #[test]
    fn reduced_and_full_mode_ranges_agree() {
        let k = KernelParams::FIG1;
        for w in 1..=3 {
            for c in reproduce_table(w, &k, None).unwrap().cells {
                assert_eq!(c.verdict, c.full_range_verdict, "table {w} cell {} {}", c.n, c.branch);
            }
        }
    }

    #[test]
    fn rotating_window_where_stationary_fails() {
        let k = KernelParams::FIG1;
        assert_eq!(
            verdict(&stationary_radius(4, 1, &k).unwrap(), &ReducedParams::fig1(0.1), &k, None)
                .unwrap()
                .verdict,
            Verdict::Unstable
        );
        let curve = radius_curve(4, &[tau_c() + 0.01, tau_c() + 0.245], &k, FIG1_Q).unwrap();
        let inner = |off: f64| {
            curve
                .rows
                .iter()
                .find(|r| r.branch == 1 && r.root == 0 && (r.tau_offset - off).abs() < 1e-9)
                .unwrap()
                .verdict
        };
        assert_eq!(inner(0.01), Verdict::Unstable);
        assert_eq!(inner(0.245), Verdict::Stable);
    }

    #[test]
    fn curve_ends_above_critical_m1() {
        let k = KernelParams::FIG1;
        let curve = radius_curve(4, &[tau_c() + 0.3], &k, FIG1_Q).unwrap();
        assert!(curve.rows.iter().all(|r| r.branch != 1));
        let near = radius_curve(4, &[tau_c() + 1e-6], &k, FIG1_Q).unwrap();
        let st = stationary_radius(4, 1, &k).unwrap().r0;
        assert!(near.rows.iter().any(|r| r.branch == 1 && (r.r0 - st).abs() < 1e-3));
    }

    #[test]
    fn radius_rows() {
        let k = KernelParams::FIG1;
        let rows = radius_vs_n(&[2, 3, 12], &k).unwrap();
        let r3 = rows.iter().find(|r| r.n == 3 && r.branch == 2).unwrap();
        assert!((r3.r0 - 0.1780).abs() < 1e-3);
        for r in &rows {
            assert!((r.r0 - r.approx).abs() < std::f64::consts::PI / k.beta);
        }
    }
}
