//! Codifferential, Hodge-de Rham Laplacian, harmonic classification and
//! the weight bookkeeping of `L = t d/dt`.
//!
//!     cargo run --example laplacian

use carroll::hodge::{classify, codifferential, laplacian};
use carroll::{CarrollBundle, Form};

fn main() -> carroll::Result<()> {
    let b = CarrollBundle::flat(3)?;
    let pts = b.domain().points(64, 3);
    for src in ["t^2*sin(x1)", "x1*x2 + x3", "t*dx1", "cos(x2)*th", "t^-1*dx1^dx2 + x3*th^dx1", "dx1^dx2^dx3"] {
        let xi = Form::parse(src, 3)?;
        let c = classify(&xi, &b, &pts, 1e-9)?;
        println!("{src}  (degree {})", xi.degree());
        println!("  delta = {}", codifferential(&xi, &b)?.brief());
        println!("  lap   = {}", laplacian(&xi, &b)?.brief());
        println!("  weight {:?} -> {:?}", xi.weight(&pts)?, laplacian(&xi, &b)?.weight(&pts)?);
        println!("  closed {} coclosed {} harmonic {}", c.closed, c.coclosed, c.harmonic);
    }
    Ok(())
}
