//! Solve the radial spot at the reference parameters and print its shape.

use spot_rings::profile::{compute_q, solve_radial_profile, ProfileOptions};
use spot_rings::PdeParams;

fn main() -> spot_rings::Result<()> {
    let params = PdeParams::fig1();
    let profile = solve_radial_profile(&params, &ProfileOptions::default())?;
    println!("homogeneous u_c = {:.10}", profile.u_c);
    println!("peak deviation  = {:.6}", profile.u_s[0]);
    println!("newton residual = {:.2e}", profile.residual());
    let zeros: Vec<String> = profile.sign_changes().iter().take(4).map(|r| format!("{r:.4}")).collect();
    println!("sign changes of u_s: {}", zeros.join(", "));
    println!("Q = {:.3}", compute_q(&profile)?);
    Ok(())
}
