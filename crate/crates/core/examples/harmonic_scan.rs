//! Separable harmonic forms `t^lambda Y_lm` on the horizon bundle, plus the
//! measured degree-0 eigenvalue of each `Y_lm`.
//!
//!     cargo run --release --example harmonic_scan [kappa]

use carroll::hodge::laplacian;
use carroll::horizon::{angular_box, harmonic_scan, measured_eigenvalue, spherical_harmonic, HorizonBundle, HorizonForm};
use carroll::ScalarExpr;

fn main() -> carroll::Result<()> {
    let kappa: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let hb = HorizonBundle::new(kappa)?;
    let pts = angular_box().points(100, 4);

    let one = hb.to_form(&HorizonForm::function(ScalarExpr::one()));
    println!("Laplacian of the constant: {:.1e}", laplacian(&one, hb.bundle())?.max_abs(&pts)?.0);

    for l in 1..=4 {
        let y = spherical_harmonic(l, 0)?;
        let mu = measured_eigenvalue(&hb, &y, &pts)?;
        println!("Y_{l}0: Laplacian eigenvalue {mu:.6}  (-(2 kappa)^2 l(l+1) = {:.6})", -(2.0 * kappa).powi(2) * (l * (l + 1)) as f64);
    }

    let hits = harmonic_scan(kappa, &[0, 1, 2, 3], 4, 3, &pts)?;
    println!("\n{} separable harmonics with l <= 4, lambda <= 3:", hits.len());
    for h in hits {
        println!("  degree {} slot {} l={} m={} lambda={} residual {:.1e}", h.degree, h.component, h.l, h.m, h.lambda, h.residual);
    }
    Ok(())
}
