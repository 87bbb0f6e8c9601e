//! Run three configurations through the analytic and simulated checks.

use spot_rings::reproduce::{cross_validate, CrossOptions};
use spot_rings::{PdeParams, RingKind};

fn main() -> spot_rings::Result<()> {
    let above = PdeParams::fig1().tau_c() + 0.01;
    let cases = [
        (3, 1, 0.1, RingKind::Stationary),
        (6, 2, above, RingKind::Traveling),
        (8, 2, above, RingKind::Traveling),
    ];
    for (n, branch, tau, kind) in cases {
        let r = cross_validate(n, branch, tau, kind, &CrossOptions::default())?;
        println!(
            "N={n} branch {branch} {kind}: analytic {}, ode run {}, published ode {:?}, published pde {:?}, note {:?}",
            r.analytic,
            if r.ode.unstable { "unstable" } else { "stable" },
            r.published_ode,
            r.published_pde,
            r.discrepancy,
        );
    }
    Ok(())
}
