//! Fit the closed-form kernel to interaction values computed from the
//! solved spot profile.

use spot_rings::kernel::{fit, FitOptions};
use spot_rings::profile::{solve_radial_profile, InteractionQuadrature, ProfileOptions};
use spot_rings::{KernelParams, PdeParams};

fn main() -> spot_rings::Result<()> {
    let profile = solve_radial_profile(&PdeParams::fig1(), &ProfileOptions::default())?;
    let quad = InteractionQuadrature::new(&profile);
    let ds: Vec<f64> = (0..40).map(|i| 0.125 + 0.008 * i as f64).collect();
    let samples = quad.sample(&ds)?;
    let builtin = KernelParams::FIG1;
    let report = fit(&samples, builtin.d_b, FitOptions::default())?;
    let p = report.params;
    println!("converged {} after {} iterations, rms {:.2e}", report.converged, report.iterations, report.rms);
    println!("M0    {:.4e} (builtin {:.4e})", p.m0, builtin.m0);
    println!("alpha {:.3} (builtin {:.3})", p.alpha, builtin.alpha);
    println!("beta  {:.3} (builtin {:.3})", p.beta, builtin.beta);
    println!("d0    {:.4} (builtin {:.4})", p.d0, builtin.d0);
    for (a, b) in p.find_zeros(0.13, 0.35).iter().zip(builtin.find_zeros(0.13, 0.35)) {
        println!("zero {:.4} vs {:.4}", a.d_c, b.d_c);
    }
    Ok(())
}
