use std::f64::consts::PI;

use carroll::maxwell::{fdtd::fdtd_step, output, plane_wave, run_simulation, EmGridState, InitialCondition, SimConfig, Simulation};
use carroll::Error;

fn custom(n: usize, e: &str, b: &str, steps: usize) -> SimConfig {
    let mut c = SimConfig::plane_wave(n, 2.0 * PI, [1, 0, 0], [0.0, 1.0, 0.0], 0.9, 1.0);
    c.init = InitialCondition::Custom { e: e.into(), b: b.into() };
    c.steps = steps;
    c
}

#[test]
fn divergence_is_conserved_for_generic_data() {
    // not divergence-free, so the discrete divergences start well away from zero
    let cfg = custom(16, "sin(x1 + 2*x2); cos(x3)*sin(x2); sin(x1)", "cos(x1 - x3); sin(2*x1); cos(x2)", 40);
    let mut s = Simulation::new(cfg.clone()).unwrap();
    let (mut de, mut db) = (s.state.max_div_e(), s.state.max_div_b());
    assert!(de > 0.1 && db > 0.1);
    for _ in 0..cfg.steps {
        s.step().unwrap();
        let (ne, nb) = (s.state.max_div_e(), s.state.max_div_b());
        assert!((ne - de).abs() < 1e-12 && (nb - db).abs() < 1e-12, "div drift {} {}", ne - de, nb - db);
        (de, db) = (ne, nb);
    }
}

#[test]
fn zero_field_gives_a_zero_series() {
    let mut cfg = custom(8, "0;0;0", "0;0;0", 5);
    cfg.init = InitialCondition::Zero;
    for r in run_simulation(&cfg).unwrap() {
        assert_eq!((r.energy, r.max_div_e, r.max_div_b, r.max_residual_faraday, r.max_residual_ampere), (0.0, 0.0, 0.0, 0.0, 0.0));
    }
}

#[test]
fn energy_is_conserved_on_both_branches() {
    for branch in [1.0, -1.0] {
        let mut cfg = SimConfig::plane_wave(16, 2.0 * PI, [1, 1, 0], [1.0, -1.0, 2.0], 0.9, 1.0);
        cfg.branch = branch;
        let rows = run_simulation(&cfg).unwrap();
        let e0 = rows[0].energy;
        assert!(rows.iter().all(|r| ((r.energy - e0) / e0).abs() < 1e-12));
        assert!(rows.iter().all(|r| r.t.signum() == branch && (r.t.abs() - r.u.exp()).abs() < 1e-9 * r.u.exp()));
    }
}

#[test]
fn dual_initial_data_has_the_same_energy_series() {
    let cfg = SimConfig::plane_wave(16, 2.0 * PI, [1, 1, 0], [1.0, -1.0, 2.0], 0.5, 1.0);
    let mut dual = cfg.clone();
    dual.dual = true;
    let (a, b) = (run_simulation(&cfg).unwrap(), run_simulation(&dual).unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!(((x.energy - y.energy) / x.energy).abs() < 1e-10, "{} vs {}", x.energy, y.energy);
    }
}

#[test]
fn plane_wave_error_shrinks_at_second_order() {
    let mut errs = Vec::new();
    for n in [8, 16, 32] {
        let cfg = SimConfig::plane_wave(n, 2.0 * PI, [0, 1, 1], [1.0, 0.0, 0.0], 0.5, 0.5);
        let exact = plane_wave(cfg.wave_vector().unwrap(), [1.0, 0.0, 0.0], false).unwrap();
        let mut s = Simulation::new(cfg.clone()).unwrap();
        s.run(|_, _| Ok(())).unwrap();
        errs.push(s.state.max_error(&exact, cfg.du).unwrap());
    }
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.8, "{errs:?}");
    }
}

#[test]
fn cfl_violations_are_rejected() {
    let mut s = EmGridState::zeros(8, 1.0);
    let bound = carroll::maxwell::fdtd::cfl_bound(s.dx());
    assert!(matches!(fdtd_step(&mut s, bound * 1.01), Err(Error::Cfl { .. })));
    assert!(fdtd_step(&mut s, bound).is_ok());
}

#[test]
fn outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SimConfig::plane_wave(8, 1.0, [1, 0, 0], [0.0, 0.0, 1.0], 0.8, 0.25);
    cfg.dump_cadence = 2;
    let mut seen = Vec::new();
    let mut sim = Simulation::new(cfg.clone()).unwrap();
    let rows = sim
        .run(|s, du| {
            let p = output::dump_path(dir.path(), "wave", s.step);
            output::write_dump(&p, s, du)?;
            seen.push((p, s.clone()));
            Ok(())
        })
        .unwrap();
    assert!(!seen.is_empty());
    for (p, s) in &seen {
        let back = output::read_dump(p).unwrap();
        assert_eq!(back.e, s.e);
        assert_eq!(back.b, s.b);
        assert_eq!(back.u, s.u);
        assert!(output::meta_path(p).exists());
    }
    let mut buf = Vec::new();
    output::write_csv(&rows, &mut buf).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("step,u,t,energy,max_divE,max_divB,max_residual_faraday,max_residual_ampere\n"));
    assert_eq!(output::read_csv(&buf[..]).unwrap(), rows);
}
