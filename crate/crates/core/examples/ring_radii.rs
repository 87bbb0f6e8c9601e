//! Stationary, traveling and rotating rings for small N.

use spot_rings::rings::{approximate_radius, rotating_rings, stationary_radius, traveling_ring};
use spot_rings::{KernelParams, PdeParams, ReducedParams};

fn main() -> spot_rings::Result<()> {
    let k = KernelParams::FIG1;
    println!("N  branch  exact     approx");
    for n in 2..=8 {
        for branch in 1..=2 {
            let r = stationary_radius(n, branch, &k)?;
            println!("{n}  {branch}       {:.5}   {:.5}", r.r0, approximate_radius(n, branch, &k)?);
        }
    }
    let params = ReducedParams::fig1(PdeParams::fig1().tau_c() + 0.01);
    let t = traveling_ring(3, 2, &params, &k)?;
    println!("traveling N=3 branch 2: r0 {:.5}, speed {:.5}", t.r0, t.v0.norm());
    for r in rotating_rings(3, &params, &k)? {
        println!("rotating N=3 branch {}: r0 {:.5}, omega {:.5}", r.branch, r.r0, r.omega0);
    }
    Ok(())
}
