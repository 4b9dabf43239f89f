//! Regularity at the zero section: forms whose constrained components
//! vanish linearly in t have a Laplacian that extends to t = 0.
//!
//!     cargo run --example extend_to_zero

use carroll::horizon::{angular_box, extend_to_zero, regularity_check, spherical_harmonic, HorizonBundle, HorizonForm};
use carroll::ScalarExpr;

fn main() -> carroll::Result<()> {
    let hb = HorizonBundle::new(0.5)?;
    let t = ScalarExpr::fibre();
    let y10 = spherical_harmonic(1, 0)?;
    let z = ScalarExpr::zero;
    let pts = angular_box().points(100, 1);

    let cases = [
        ("t Y10", HorizonForm::function(&t * &y10)),
        ("t^2 S1 + t T0", HorizonForm::one_form([t.powi(2) * &y10, z()], &t * &y10)),
        ("Y10 T0 (not regular)", HorizonForm::one_form([z(), z()], y10.clone())),
        ("S2 = 1, T1 = T2 = 0", HorizonForm::two_form(ScalarExpr::one(), [z(), z()])),
    ];
    for (name, h) in cases {
        println!("{name}: {:?}", regularity_check(&h));
        match extend_to_zero(&h, &hb) {
            Ok(lim) => {
                // coefficients stay unsimplified; report them by sampled size
                let at_small_t = lim.laplacian.substitute(carroll::Var::Fibre, &ScalarExpr::constant(1e-6));
                println!("  finite {}  max |limit| {:.3e}  max |lap at t=1e-6| {:.3e}", lim.finite_limit, lim.limit.max_abs(&pts)?.0, at_small_t.max_abs(&pts)?.0);
            }
            Err(e) => println!("  refused: {e}"),
        }
    }
    Ok(())
}
