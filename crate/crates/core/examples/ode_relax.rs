//! Seed the second-order model near a rotating 3-ring and measure where it
//! settles.

use spot_rings::odesim::{integrate, measure_ring, perturb, IntegrateOptions, Model, ModePerturbation, SpotEnsemble};
use spot_rings::rings::rotating_ring;
use spot_rings::{KernelParams, PdeParams, ReducedParams};

fn main() -> spot_rings::Result<()> {
    let k = KernelParams::FIG1;
    let params = ReducedParams::fig1(PdeParams::fig1().tau_c() + 0.01);
    let ring = rotating_ring(3, 2, &params, &k)?;
    let start = perturb(&SpotEnsemble::from_ring(&ring, Model::Second, &k)?, &ModePerturbation::position(2, 0.01))?;
    let traj = integrate(&start, &params, &k, 20_000.0, &IntegrateOptions::default())?;
    let m = measure_ring(&traj.tail(2000))?;
    println!("target   r0 {:.6}  omega {:.6e}", ring.r0, ring.omega0);
    println!("measured r0 {:.6}  omega {:.6e}  shape error {:.1e}", m.r_mean, m.omega_est, m.shape_error);
    Ok(())
}
