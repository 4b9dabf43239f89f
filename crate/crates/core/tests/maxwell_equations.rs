use rand::Rng;

use carroll::maxwell::{local_equations, maxwell_residual, plane_wave, vector_residuals, wave_residual, EmField};
use carroll::{random, Point, SampleBox, ScalarExpr};

const TOL: f64 = 1e-9;

fn pts() -> Vec<Point> {
    SampleBox::unit(3).points(100, 17)
}

fn random_wave<R: Rng>(rng: &mut R) -> EmField {
    loop {
        let k = [0, 1, 2].map(|_| rng.gen_range(-2..=2) as f64);
        let v = [0, 1, 2].map(|_| rng.gen_range(-3..=3) as f64);
        // transverse amplitude k x v
        let e0 = carroll::maxwell::cross(k, v);
        if carroll::maxwell::norm(e0) > 0.0 {
            return plane_wave(k, e0, true).unwrap();
        }
    }
}

/// 25 exact solutions (superposed waves, duals, rescalings, static fields)
/// and 25 of the same with a generic perturbation in one component.
fn field_pairs(seed: u64) -> Vec<(EmField, bool)> {
    let mut rng = random::rng(seed);
    let mut out = Vec::new();
    for i in 0..25 {
        let mut f = random_wave(&mut rng);
        if i % 2 == 0 {
            f = f.superpose(&random_wave(&mut rng).dual());
        }
        if i % 3 == 0 {
            f = f.rescale_time(rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        }
        if i % 5 == 0 {
            // (x2, x1, 0) is the gradient of a harmonic function
            let stat = EmField::parse("x2; x1; 0.5", "1; x3; x2").unwrap();
            f = f.superpose(&stat);
        }
        out.push((f.clone(), true));
        let mut g = f;
        let slot = rng.gen_range(0..6);
        // t x_a^2 alone already breaks the equations, so the bump can never cancel
        let bump = random::general_function(&mut rng, 3) + ScalarExpr::fibre() * ScalarExpr::coord((slot + 1) % 3).powi(2);
        if slot < 3 {
            g.e[slot] = &g.e[slot] + &bump;
        } else {
            g.b[slot - 3] = &g.b[slot - 3] + &bump;
        }
        out.push((g, false));
    }
    out
}

#[test]
fn form_and_vector_residuals_vanish_together() {
    let pts = pts();
    for (f, solution) in field_pairs(5) {
        let s = maxwell_residual(&f).unwrap().summarize(&pts).unwrap();
        let form = s.d_f.max(s.d_star_f);
        assert_eq!(form < TOL, s.vector < TOL, "form {form:.3e} vs vector {:.3e}", s.vector);
        assert_eq!(form < TOL, solution, "E = {:?}", f.e.iter().map(|c| c.brief(50)).collect::<Vec<_>>());
    }
}

#[test]
fn vector_residuals_match_finite_differences() {
    // central differences in x and in t (L = t d/dt)
    let (f, _) = field_pairs(9).swap_remove(3);
    let r = vector_residuals(&f);
    let h = 1e-5;
    let comp = |c: &ScalarExpr, p: &Point, axis: Option<usize>| {
        let (mut a, mut b) = (p.clone(), p.clone());
        match axis {
            Some(i) => {
                a.x[i] += h;
                b.x[i] -= h;
                (c.eval(&a).unwrap() - c.eval(&b).unwrap()) / (2.0 * h)
            }
            None => {
                a.t += h;
                b.t -= h;
                p.t * (c.eval(&a).unwrap() - c.eval(&b).unwrap()) / (2.0 * h)
            }
        }
    };
    for p in SampleBox::unit(3).points(10, 1) {
        let d = |c: &ScalarExpr, i| comp(c, &p, Some(i));
        let curl_e = [d(&f.e[2], 1) - d(&f.e[1], 2), d(&f.e[0], 2) - d(&f.e[2], 0), d(&f.e[1], 0) - d(&f.e[0], 1)];
        for a in 0..3 {
            let want = curl_e[a] - comp(&f.b[a], &p, None);
            assert!((r.faraday[a].eval(&p).unwrap() - want).abs() < 1e-6);
        }
        let div_e: f64 = (0..3).map(|a| d(&f.e[a], a)).sum();
        assert!((r.div_e.eval(&p).unwrap() - div_e).abs() < 1e-6);
    }
}

#[test]
fn local_equations_imply_maxwell_but_not_conversely() {
    let pts = pts();
    // static solution of the local system is a Maxwell solution
    let stat = EmField::parse("x2; x1; 0.5", "1; x3; x2").unwrap();
    assert!(local_equations(&stat).unwrap().max_abs(&pts).unwrap() < TOL);
    assert!(maxwell_residual(&stat).unwrap().summarize(&pts).unwrap().max() < TOL);
    // a plane wave solves dF = d*F = 0 but has L B != 0, so dB != 0 with the full d
    let wave = plane_wave([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], false).unwrap();
    assert!(maxwell_residual(&wave).unwrap().summarize(&pts).unwrap().max() < TOL);
    assert!(local_equations(&wave).unwrap().max_abs(&pts).unwrap() > 0.1);
}

#[test]
fn residuals_invariant_under_time_rescaling() {
    let pts = pts();
    let (f, _) = field_pairs(2).swap_remove(1);
    let r0 = vector_residuals(&f);
    for phi0 in [3.0, -0.5] {
        let r1 = vector_residuals(&f.rescale_time(phi0));
        for p in &pts {
            // residuals of the rescaled field are the old ones at phi0 t
            let q = Point::new(p.x.clone(), phi0 * p.t).unwrap();
            for a in 0..3 {
                assert!((r1.faraday[a].eval(p).unwrap() - r0.faraday[a].eval(&q).unwrap()).abs() < 1e-10);
                assert!((r1.ampere[a].eval(p).unwrap() - r0.ampere[a].eval(&q).unwrap()).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn polynomial_fields_extend_to_t_zero() {
    // E = t (0, e^x1, 0), B = t (0, 0, e^x1) solves the system and is smooth at t = 0
    let f = EmField::parse("0; t*exp(x1); 0", "0; 0; t*exp(x1)").unwrap();
    let r = vector_residuals(&f);
    let mut exprs = vec![r.div_b.clone(), r.div_e.clone()];
    exprs.extend(r.faraday.iter().cloned());
    exprs.extend(r.ampere.iter().cloned());
    for x in [[0.0, 0.0, 0.0], [0.3, -0.2, 1.0]] {
        let p = Point::closure(x.to_vec());
        for e in &exprs {
            assert!(e.t_laurent().is_some(), "{e} is not polynomial in t");
            assert_eq!(e.eval(&p).unwrap(), 0.0);
        }
    }
    // a non-solution of the same shape is still evaluable at t = 0
    let g = EmField::parse("0; t^2*x1; 0", "0; 0; 0").unwrap();
    let rg = vector_residuals(&g);
    assert!((rg.ampere[1].eval(&Point::closure(vec![1.0, 0.0, 0.0])).unwrap()).abs() < 1e-15);
    assert!((rg.faraday[2].eval(&Point::closure(vec![1.0, 0.0, 0.0])).unwrap()).abs() < 1e-15);
}

#[test]
fn solutions_obey_the_wave_equation() {
    let pts = pts();
    for (f, solution) in field_pairs(8) {
        if !solution {
            continue;
        }
        let tape = carroll::scalar::Tape::compile(&wave_residual(&f));
        for p in &pts {
            assert!(tape.eval(p).unwrap().iter().all(|v| v.abs() < 1e-8));
        }
    }
}

#[test]
fn duality_maps_solutions_to_solutions() {
    let pts = pts();
    for (f, _) in field_pairs(3).into_iter().filter(|(_, s)| *s) {
        let d = f.dual();
        assert!(maxwell_residual(&d).unwrap().summarize(&pts).unwrap().max() < TOL);
        let diff = d.energy_density() - f.energy_density();
        assert!(pts.iter().all(|p| diff.eval(p).unwrap().abs() < 1e-12));
    }
}
