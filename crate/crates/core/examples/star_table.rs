//! Hodge star of every basis monomial, first on flat R^3 x R^x and then on
//! a curved base with a non-flat connection.
//!
//!     cargo run --example star_table

use carroll::hodge::{star, star_sign};
use carroll::{CarrollBundle, Form, Monomial, SampleBox, ScalarExpr};

fn print_table(b: &CarrollBundle) -> carroll::Result<()> {
    let n = b.dim();
    let pts = SampleBox::unit(n).points(32, 1);
    for k in 0..=n + 1 {
        for m in Monomial::all_of_degree(n, k) {
            let xi = Form::monomial(n, m, ScalarExpr::one());
            let s = star(&xi, b)?;
            let back = star(&s, b)?;
            let (dev, _) = back.max_deviation(&xi.scale(&star_sign(n, k).into()), &pts)?;
            println!("  *({xi}) = {}    [** dev {dev:.1e}]", s.brief());
        }
    }
    Ok(())
}

fn main() -> carroll::Result<()> {
    println!("flat R^3 x R^x");
    print_table(&CarrollBundle::flat(3)?)?;

    // g = diag(1 + x2^2, e^x1), A = (x2, 0): curvature dA = -dx1^dx2
    let x1 = ScalarExpr::coord(0);
    let x2 = ScalarExpr::coord(1);
    let z = ScalarExpr::zero();
    let b = CarrollBundle::new(vec![vec![x2.powi(2) + 1.0, z.clone()], vec![z.clone(), x1.exp()]], vec![x2.clone(), z])?;
    println!("\ncurved base, curvature {}", b.curvature());
    print_table(&b)
}
