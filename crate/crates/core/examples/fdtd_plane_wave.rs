//! Yee leapfrog in logarithmic time u = ln|t|: one plane-wave period at
//! N = 16, 32, 64, the L-infinity error and observed order, and the
//! conserved energy. Writes the N = 32 series as CSV and a final field dump
//! into the system temp dir.
//!
//!     cargo run --release --example fdtd_plane_wave

use std::f64::consts::PI;
use std::fs::File;

use carroll::maxwell::{output, plane_wave, SimConfig, Simulation};

fn main() -> carroll::Result<()> {
    let (modes, e0) = ([1, 0, 0], [0.0, 1.0, 0.0]);
    let mut prev: Option<f64> = None;
    for n in [16, 32, 64] {
        let cfg = SimConfig::plane_wave(n, 2.0 * PI, modes, e0, 0.5, 1.0);
        let exact = plane_wave(cfg.wave_vector().unwrap(), e0, false)?;
        let mut sim = Simulation::new(cfg.clone())?;
        let rows = sim.run(|_, _| Ok(()))?;
        let err = sim.state.max_error(&exact, cfg.du)?;
        let (e_first, e_last) = (rows[0].energy, rows.last().unwrap().energy);
        let order = prev.map(|p| format!("{:.2}", (p / err).log2())).unwrap_or_else(|| "-".into());
        println!("N={n:<3} steps {:<4} error {err:.3e} order {order:<5} energy drift {:.1e}", cfg.steps, ((e_last - e_first) / e_first).abs());
        prev = Some(err);
        if n == 32 {
            let dir = std::env::temp_dir();
            output::write_csv(&rows, File::create(dir.join("plane_wave_32.csv"))?)?;
            let dump = output::dump_path(&dir, "plane_wave_32", sim.state.step);
            output::write_dump(&dump, &sim.state, cfg.du)?;
            println!("       wrote {} and {}", dir.join("plane_wave_32.csv").display(), dump.display());
        }
    }
    Ok(())
}
