//! Command-line front end: profiles, kernels, rings, stability, simulations
//! and the table/curve reproductions.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use spot_rings::kernel::{fit, FitOptions};
use spot_rings::odesim::{integrate, perturb, IntegrateOptions, Model, ModePerturbation, SpotEnsemble};
use spot_rings::params::FIG1_Q;
use spot_rings::pdesim::{self, RunConfig};
use spot_rings::profile::{compute_q, solve_radial_profile, InteractionQuadrature, ProfileOptions, SpotProfile};
use spot_rings::reproduce::{
    cross_validate, radius_curve, radius_vs_n, radius_vs_n_csv, reproduce_table_with_q, table_ring,
    CrossOptions,
};
use spot_rings::rings::residuals;
use spot_rings::stability::verdict;
use spot_rings::{Error, KernelParams, PdeParams, ReducedParams, Result, RingKind, RingSolution};

#[derive(Parser)]
#[command(name = "spot-rings", version, about = "Rings of interacting spots: radii, stability and simulations")]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Seed for randomised initial conditions.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the radial spot profile and export it as CSV with a JSON sidecar.
    Profile(ProfileArgs),
    /// Kernel zeros and fitting.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Ring equilibria.
    #[command(subcommand)]
    Rings(RingsCmd),
    /// Linear stability of a ring, or a whole table.
    Stability(StabilityArgs),
    /// Reduced-model simulations.
    #[command(subcommand)]
    Odesim(OdesimCmd),
    /// Reaction-diffusion simulations.
    #[command(subcommand)]
    Pdesim(PdesimCmd),
    /// Regenerate tables and curves.
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
}

#[derive(Args)]
struct KernelSource {
    /// `builtin:fig1` or a KernelParams JSON file.
    #[arg(long, default_value = "builtin:fig1")]
    kernel: String,
    /// Propagator coefficient Q (defaults to the value for the reference parameters).
    #[arg(long, default_value_t = FIG1_Q)]
    q: f64,
}

impl KernelSource {
    fn load(&self) -> Result<KernelParams> {
        KernelParams::load(&self.kernel)
    }
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value_t = 0.6)]
    r_max: f64,
    #[arg(long, default_value_t = 2048)]
    points: usize,
    /// Also report the interaction coefficient Q (a few seconds).
    #[arg(long)]
    with_q: bool,
    #[arg(long, default_value = "profile.csv")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum KernelCmd {
    /// Zeros of f in a distance range, classified by slope.
    Zeros {
        #[command(flatten)]
        source: KernelSource,
        #[arg(long, default_value_t = 0.12)]
        lo: f64,
        #[arg(long, default_value_t = 0.35)]
        hi: f64,
    },
    /// Fit the closed form to samples from a CSV (`d,f`) or from a profile CSV.
    Fit {
        /// CSV with columns d,f.
        #[arg(long, conflicts_with = "profile")]
        samples: Option<PathBuf>,
        /// Profile CSV written by `profile`; f is sampled by quadrature.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Core radius below which samples are discarded.
        #[arg(long, default_value_t = KernelParams::FIG1.d_b)]
        d_b: f64,
        #[arg(long, default_value = "kernel.json")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum RingsCmd {
    /// Construct one ring and report its radius, motion and residuals.
    Find {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        branch: usize,
        #[arg(long, default_value = "stationary")]
        kind: RingKind,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        #[command(flatten)]
        source: KernelSource,
        /// Output JSON file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct StabilityArgs {
    #[command(subcommand)]
    table: Option<StabilityCmd>,
    /// Ring JSON written by `rings find`.
    #[arg(long)]
    ring: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long)]
    eps_neutral: Option<f64>,
    #[command(flatten)]
    source: KernelSource,
}

#[derive(Subcommand)]
enum StabilityCmd {
    /// ODE rows of table 1, 2 or 3 as CSV.
    Table(TableArgs),
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    which: u8,
    #[arg(long)]
    eps_neutral: Option<f64>,
    #[command(flatten)]
    source: KernelSource,
}

#[derive(Subcommand)]
enum OdesimCmd {
    Run {
        #[arg(long, default_value = "second")]
        model: Model,
        /// Ring JSON written by `rings find`.
        #[arg(long)]
        init: PathBuf,
        /// Mode perturbation, `m=<m>,amp=<a>`.
        #[arg(long)]
        perturb: Option<String>,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        sample_dt: f64,
        #[command(flatten)]
        source: KernelSource,
        #[arg(long, default_value = "traj.csv")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum PdesimCmd {
    Run {
        /// RunConfig JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (relative to --out-dir).
        #[arg(long, default_value = "pdesim")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReproduceCmd {
    /// ODE rows of one or all tables; exit status reflects agreement.
    Table {
        /// 1, 2 or 3; all three when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: Option<u8>,
        #[arg(long)]
        eps_neutral: Option<f64>,
        #[command(flatten)]
        source: KernelSource,
    },
    /// Rotating-ring radii against tau - tau_c.
    RadiusCurve {
        #[arg(long)]
        n: usize,
        /// Comma-separated offsets tau - tau_c.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.05,0.1,0.2,0.3,0.4,0.5")]
        offsets: Vec<f64>,
        #[command(flatten)]
        source: KernelSource,
    },
    /// Stationary radius against N.
    RadiusVsN {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value = "builtin:fig1")]
        kernel: String,
    },
    /// One configuration through profile, kernel, ring, verdict and simulations.
    CrossValidate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        branch: usize,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value = "stationary")]
        kind: RingKind,
        /// Fit the kernel and Q from a freshly solved profile.
        #[arg(long)]
        derive_kernel: bool,
        /// Also run the PDE on a 128x128 grid up to this time.
        #[arg(long)]
        pde_t_end: Option<f64>,
        #[arg(long)]
        ode_t_end: Option<f64>,
    },
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn load_ring(path: &Path) -> Result<RingSolution> {
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let ring = value.get("ring").cloned().unwrap_or(value);
    Ok(serde_json::from_value(ring)?)
}

fn parse_perturbation(spec: &str) -> Result<ModePerturbation> {
    let (mut m, mut amp) = (None, None);
    for part in spec.split(',') {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value in '{part}'")))?;
        let bad = |_| Error::Parse(format!("bad value '{val}' for {key}"));
        match key.trim() {
            "m" => m = Some(val.trim().parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "amp" => amp = Some(val.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?),
            other => return Err(Error::Parse(format!("unknown perturbation key '{other}'"))),
        }
    }
    match (m, amp) {
        (Some(m), Some(a)) => Ok(ModePerturbation::position(m, a)),
        _ => Err(Error::Parse("perturbation needs both m and amp".into())),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let out_dir = &cli.out_dir;
    std::fs::create_dir_all(out_dir)?;
    match cli.command {
        Command::Profile(a) => {
            let params = PdeParams::fig1().with_tau(a.tau);
            let opts = ProfileOptions {
                r_max: a.r_max,
                n: a.points,
                ..ProfileOptions::default()
            };
            let profile = solve_radial_profile(&params, &opts)?;
            let path = out_dir.join(&a.out);
            profile.write(&path)?;
            let q = if a.with_q { Some(compute_q(&profile)?) } else { None };
            let report = json!({
                "csv": path,
                "u_c": profile.u_c,
                "peak": profile.u_s.first(),
                "residual": profile.residual(),
                "sign_changes": profile.sign_changes(),
                "q": q,
                "options": opts,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Kernel(KernelCmd::Zeros { source, lo, hi }) => {
            let k = source.load()?;
            let report = json!({
                "kernel": k,
                "kernel_hash": k.content_hash(),
                "zeros": k.find_zeros(lo, hi),
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Kernel(KernelCmd::Fit {
            samples,
            profile,
            d_b,
            out,
        }) => {
            let data: Vec<(f64, f64)> = match (samples, profile) {
                (Some(path), _) => {
                    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
                    rdr.deserialize::<(f64, f64)>().collect::<std::result::Result<_, _>>()?
                }
                (None, Some(path)) => {
                    let p = SpotProfile::read(path)?;
                    let ds: Vec<f64> = (0..40).map(|i| d_b + 0.005 + 0.008 * i as f64).collect();
                    InteractionQuadrature::new(&p).sample(&ds)?
                }
                (None, None) => {
                    return Err(Error::InvalidParams("give --samples or --profile".into()))
                }
            };
            let report = fit(&data, d_b, FitOptions::default())?;
            report.params.save(out_dir.join(&out))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Rings(RingsCmd::Find {
            n,
            branch,
            kind,
            tau,
            source,
            out,
        }) => {
            let k = source.load()?;
            let params = ReducedParams::new(PdeParams::fig1().k3, tau, source.q);
            let ring = table_ring(kind, n, branch, &params, &k)?;
            let report = json!({
                "config": { "n": n, "branch": branch, "kind": kind, "tau": tau, "params": params, "kernel": k },
                "kernel_hash": k.content_hash(),
                "ring": ring,
                "residuals": residuals(&ring, &params, &k)?,
            });
            match out {
                Some(path) => write_json(&out_dir.join(path), &report)?,
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
        }
        Command::Stability(a) => match a.table {
            Some(StabilityCmd::Table(t)) => {
                let k = t.source.load()?;
                let report = reproduce_table_with_q(t.which, &k, t.source.q, t.eps_neutral)?;
                print!("{}", report.to_csv()?);
            }
            None => {
                let path = a
                    .ring
                    .ok_or_else(|| Error::InvalidParams("stability needs --ring or a table subcommand".into()))?;
                let ring = load_ring(&path)?;
                let k = a.source.load()?;
                let params = ReducedParams::new(PdeParams::fig1().k3, a.tau, a.source.q);
                let report = verdict(&ring, &params, &k, a.eps_neutral)?;
                let out = json!({
                    "config": { "ring": path, "tau": a.tau, "params": params, "kernel": k, "eps_neutral": a.eps_neutral },
                    "kernel_hash": k.content_hash(),
                    "report": report,
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
        },
        Command::Odesim(OdesimCmd::Run {
            model,
            init,
            perturb: spec,
            t_end,
            tau,
            sample_dt,
            source,
            out,
        }) => {
            let k = source.load()?;
            let params = ReducedParams::new(PdeParams::fig1().k3, tau, source.q);
            let ring = load_ring(&init)?;
            let mut ens = SpotEnsemble::from_ring(&ring, model, &k)?;
            if let Some(spec) = &spec {
                ens = perturb(&ens, &parse_perturbation(spec)?)?;
            }
            let opts = IntegrateOptions {
                sample_dt,
                ..Default::default()
            };
            let traj = integrate(&ens, &params, &k, t_end, &opts)?;
            let config = json!({
                "model": model, "init": init, "perturb": spec, "t_end": t_end,
                "params": params, "kernel": k, "options": opts,
            });
            traj.write_csv(
                out_dir.join(&out),
                &[
                    format!("config: {config}"),
                    format!("kernel_hash: {}", k.content_hash()),
                ],
            )?;
            println!("{}", serde_json::to_string(&traj.termination)?);
        }
        Command::Pdesim(PdesimCmd::Run { config, out }) => {
            let mut cfg: RunConfig = serde_json::from_str(&std::fs::read_to_string(&config)?)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let outcome = pdesim::run(&cfg)?;
            let dir = out_dir.join(out);
            pdesim::write_outputs(&outcome, &cfg, &dir)?;
            println!(
                "{}",
                json!({ "termination": outcome.termination, "wall_seconds": outcome.wall_seconds, "out": dir })
            );
        }
        Command::Reproduce(cmd) => return reproduce(cmd, out_dir),
    }
    Ok(true)
}

fn reproduce(cmd: ReproduceCmd, out_dir: &Path) -> Result<bool> {
    match cmd {
        ReproduceCmd::Table {
            which,
            eps_neutral,
            source,
        } => {
            let k = source.load()?;
            let tables = which.map_or(vec![1, 2, 3], |w| vec![w]);
            let mut ok = true;
            for w in tables {
                let report = reproduce_table_with_q(w, &k, source.q, eps_neutral)?;
                let path = out_dir.join(format!("table{w}.csv"));
                std::fs::write(&path, report.to_csv()?)?;
                for c in report.mismatches() {
                    eprintln!(
                        "table {w}: N={} branch {} computed {} expected {}",
                        c.n,
                        c.branch,
                        c.verdict.map_or("N.A.".to_string(), |v| v.to_string()),
                        c.published_ode
                    );
                }
                println!("{} {}", path.display(), if report.all_match() { "match" } else { "MISMATCH" });
                ok &= report.all_match();
            }
            Ok(ok)
        }
        ReproduceCmd::RadiusCurve { n, offsets, source } => {
            let k = source.load()?;
            let tau_c = PdeParams::fig1().tau_c();
            let grid: Vec<f64> = offsets.iter().map(|o| tau_c + o).collect();
            let curve = radius_curve(n, &grid, &k, source.q)?;
            let path = out_dir.join(format!("radius_curve_n{n}.csv"));
            std::fs::write(&path, curve.to_csv()?)?;
            println!("{}", path.display());
            Ok(true)
        }
        ReproduceCmd::RadiusVsN { n_min, n_max, kernel } => {
            let k = KernelParams::load(&kernel)?;
            let ns: Vec<usize> = (n_min.max(2)..=n_max).collect();
            let rows = radius_vs_n(&ns, &k)?;
            let path = out_dir.join("radius_vs_n.csv");
            std::fs::write(&path, radius_vs_n_csv(&rows, &k)?)?;
            println!("{}", path.display());
            let r3 = rows.iter().find(|r| r.n == 3 && r.branch == 2);
            Ok(r3.is_none_or(|r| (r.r0 - 0.1780).abs() < 1e-3))
        }
        ReproduceCmd::CrossValidate {
            n,
            branch,
            tau,
            kind,
            derive_kernel,
            pde_t_end,
            ode_t_end,
        } => {
            let opts = CrossOptions {
                derive_kernel,
                pde_t_end,
                ode_t_end,
                ..CrossOptions::default()
            };
            let report = cross_validate(n, branch, tau, kind, &opts)?;
            let path = out_dir.join(format!("cross_{kind}_n{n}_b{branch}.json"));
            write_json(&path, &json!({ "options": opts, "report": report }))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.analytic_matches_published.unwrap_or(true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
