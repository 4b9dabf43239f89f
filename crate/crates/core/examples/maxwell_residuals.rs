//! Carrollian Maxwell equations on flat R^3 x R^x: the form equations
//! dF = 0, d*F = 0 against the curl/div system with `t d/dt` as time
//! derivative, on a plane wave, its dual and a non-solution.
//!
//!     cargo run --example maxwell_residuals

use carroll::maxwell::{maxwell_residual, plane_wave, EmField};
use carroll::SampleBox;

fn report(name: &str, f: &EmField) -> carroll::Result<()> {
    let pts = SampleBox::unit(3).points(100, 2);
    let s = maxwell_residual(f)?.summarize(&pts)?;
    println!("{name}\n  dF {:.1e}  d*F {:.1e}  vector {:.1e}  agree {}", s.d_f, s.d_star_f, s.vector, s.formulations_agree(1e-9));
    Ok(())
}

fn main() -> carroll::Result<()> {
    let wave = plane_wave([1.0, 2.0, 0.5], [2.0, -1.0, 0.0], true)?;
    println!("E = {:?}", wave.e.iter().map(|c| c.brief(60)).collect::<Vec<_>>());
    report("plane wave", &wave)?;
    report("dual (E, B) -> (B, -E)", &wave.dual())?;
    report("rescaled t -> 3t", &wave.rescale_time(3.0))?;
    report("E = (0, x1, 0), B = 0", &EmField::parse("0; x1; 0", "0; 0; 0")?)?;
    Ok(())
}
