//! Print the three stability tables next to the published ODE rows.

use spot_rings::reproduce::reproduce_table;
use spot_rings::KernelParams;

fn main() -> spot_rings::Result<()> {
    for which in 1..=3 {
        let report = reproduce_table(which, &KernelParams::FIG1, None)?;
        println!("table {which} ({}, tau = {:.4})", report.config.kind, report.config.tau);
        for branch in 1..=2 {
            let row: Vec<String> = report
                .cells
                .iter()
                .filter(|c| c.branch == branch)
                .map(|c| {
                    let v = c.verdict.map_or("N.A.".into(), |v| v.to_string());
                    if c.matches_published { v } else { format!("{v}*") }
                })
                .collect();
            println!("  branch {branch}: {}", row.join(" "));
        }
    }
    println!("(* differs from the published row)");
    Ok(())
}
