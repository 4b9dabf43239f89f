//! `** = (-1)^{1 + k(n+1-k)}` on random bundles (non-flat metric, A != 0)
//! together with the defining relation `eta ^ *xi = <eta, xi> vol`.
//!
//!     cargo run --release --example sign_law

use carroll::hodge::{inner_product, star, star_sign, volume_form};
use carroll::{random, Form, Monomial, ScalarExpr};

fn main() -> carroll::Result<()> {
    let mut rng = random::rng(2024);
    for n in 1..=3 {
        let b = random::bundle(&mut rng, n, false)?;
        let pts = b.domain().points(100, 5);
        let top = Monomial::top(n);
        let vol = volume_form(&b).coeff(top);
        for k in 0..=n + 1 {
            let xi = random::form(&mut rng, n, k);
            let sx = star(&xi, &b)?;
            let (sign_dev, _) = star(&sx, &b)?.max_deviation(&xi.scale(&star_sign(n, k).into()), &pts)?;
            let mut def_dev = 0.0f64;
            for m in Monomial::all_of_degree(n, k) {
                let eta = Form::monomial(n, m, ScalarExpr::one());
                let lhs = eta.wedge(&sx)?.coeff(top);
                for p in &pts {
                    let rhs = inner_product(&eta, &xi, &b, p)? * vol.eval(p)?;
                    def_dev = def_dev.max((lhs.eval(p)? - rhs).abs());
                }
            }
            println!("n={n} k={k}  sign {:+}  ** dev {sign_dev:.1e}  defining dev {def_dev:.1e}", star_sign(n, k));
        }
    }
    Ok(())
}
