//! Grow a spot from a bump on a 128x128 grid and compare it with the
//! radial solution.

use spot_rings::pdesim::{detect_spots, run, section_error, InitSpec, RunConfig};
use spot_rings::profile::{solve_radial_profile, ProfileOptions};
use spot_rings::PdeParams;

fn main() -> spot_rings::Result<()> {
    let init = InitSpec::Bump { amplitude: 0.8, width: 0.04, center: [0.0, 0.0] };
    let mut config = RunConfig::new(init, 400.0).fast();
    config.dt = 0.1;
    let out = run(&config)?;
    println!("{:?} after {} steps ({:.1} s)", out.termination, out.steps, out.wall_seconds);
    let spots = detect_spots(&out.field, out.u_c, config.threshold_fraction);
    let Some(center) = spots.centers.first() else {
        println!("no spot formed");
        return Ok(());
    };
    let profile = solve_radial_profile(&PdeParams::fig1(), &ProfileOptions::default())?;
    let err = section_error(&out.field, *center, &profile, 0.4);
    println!("spot at ({:.4}, {:.4}), section error {:.2e}", center[0], center[1], err);
    Ok(())
}
