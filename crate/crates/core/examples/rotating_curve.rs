//! Radius of rotating 4-rings against tau - tau_c, with verdicts.

use spot_rings::params::FIG1_Q;
use spot_rings::reproduce::radius_curve;
use spot_rings::{KernelParams, PdeParams};

fn main() -> spot_rings::Result<()> {
    let tau_c = PdeParams::fig1().tau_c();
    let grid: Vec<f64> = (1..=28).map(|i| tau_c + 0.01 * i as f64).collect();
    let curve = radius_curve(4, &grid, &KernelParams::FIG1, FIG1_Q)?;
    print!("{}", curve.to_csv()?);
    Ok(())
}
