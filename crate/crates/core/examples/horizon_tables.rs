//! The horizon bundle S^2 x R^x with metric (2 kappa)^-2 g_S2: its star
//! table and a comparison of the component Laplacian formulas against
//! `d delta + delta d` computed from the full stack.
//!
//!     cargo run --release --example horizon_tables [kappa]

use carroll::horizon::{angular_box, laplacian_table_suite, verify_hodge_table};

fn main() -> carroll::Result<()> {
    let kappa: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let pts = angular_box().points(100, 9);

    println!("star table, kappa = {kappa}");
    for e in verify_hodge_table(kappa, &pts, 1e-10)? {
        println!("  {:<5} {:<14} = {:<10} dev {:.1e}", if e.pass { "ok" } else { "FAIL" }, e.entry, e.expected, e.max_deviation);
    }

    // degrees 1 and 2 disagree; see the README for the analysis
    println!("\nLaplacian table vs stack, 20 random forms per degree");
    for r in laplacian_table_suite(kappa, 20, 1, &pts, 1e-8)? {
        println!("  {:?}  {}  max dev {:.3e}", r.status, r.case, r.max_deviation);
    }
    Ok(())
}
