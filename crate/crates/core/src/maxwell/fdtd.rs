//! Yee leapfrog for `d_u B = curl E`, `d_u E = -curl B` on a periodic cube.
//!
//! Cell `(i, j, k)` has spacing `h = l_box / n`. `E_x` lives at
//! `((i+1/2) h, j h, k h)`, `E_y` and `E_z` likewise on their edges; `B_x` at
//! `(i h, (j+1/2) h, (k+1/2) h)` and so on over the faces. `E` is stored at
//! `u`, `B` half a step behind at `u - du/2`.
//!
//! The forward differences taking `E` to faces and the backward
//! differences taking `B` to edges are negative transposes of each other,
//! so `div curl = 0` holds exactly and
//! `W = h^3/2 sum (|E^n|^2 + B^{n-1/2} . B^{n+1/2})` is conserved to
//! round-off. Rows report `W`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maxwell::{EmField, SimConfig};
use crate::scalar::{Point, ScalarExpr, Tape};

/// Staggering offsets, in cells, of `ex, ey, ez, bx, by, bz`.
pub const OFFSETS: [[f64; 3]; 6] = [
    [0.5, 0.0, 0.0],
    [0.0, 0.5, 0.0],
    [0.0, 0.0, 0.5],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
    [0.5, 0.5, 0.0],
];

#[derive(Clone, Debug, PartialEq)]
pub struct EmGridState {
    pub n: usize,
    pub l_box: f64,
    /// log-time of `E`; `B` is at `u - du/2`
    pub u: f64,
    pub step: usize,
    /// sign of `t` on this branch
    pub branch: f64,
    pub e: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    fn up(&self, i: usize) -> usize {
        if i + 1 == self.n {
            0
        } else {
            i + 1
        }
    }

    #[inline]
    fn down(&self, i: usize) -> usize {
        if i == 0 {
            self.n - 1
        } else {
            i - 1
        }
    }
}

/// Applies `f(i, j, k, value)` over every cell, one rayon task per z-slab,
/// and returns per-slab results in slab order.
fn par_slabs<R>(out: &mut [f64], g: Grid, f: impl Fn(usize, usize, usize, &mut f64) -> R + Sync, fold: impl Fn(R, R) -> R + Sync, init: R) -> Vec<R>
where
    R: Copy + Send + Sync,
{
    out.par_chunks_mut(g.n * g.n)
        .enumerate()
        .map(|(k, slab)| {
            let mut acc = init;
            for j in 0..g.n {
                for i in 0..g.n {
                    acc = fold(acc, f(i, j, k, &mut slab[i + g.n * j]));
                }
            }
            acc
        })
        .collect()
}

/// Sequential fold over a slice, in order.
fn reduce<R: Copy>(parts: &[R], init: R, fold: impl Fn(R, R) -> R) -> R {
    parts.iter().fold(init, |a, &b| fold(a, b))
}

fn max2(a: f64, b: f64) -> f64 {
    a.max(b)
}

impl EmGridState {
    fn grid(&self) -> Grid {
        Grid { n: self.n, h: self.l_box / self.n as f64 }
    }

    pub fn dx(&self) -> f64 {
        self.l_box / self.n as f64
    }

    /// Samples `field` with `E` at `u` and `B` at `u - du/2`.
    pub fn from_field(field: &EmField, n: usize, l_box: f64, u: f64, du: f64, branch: f64) -> Result<Self> {
        let h = l_box / n as f64;
        let mut arrays: Vec<Vec<f64>> = Vec::with_capacity(6);
        for (c, expr) in field.e.iter().chain(&field.b).enumerate() {
            let uc = if c < 3 { u } else { u - 0.5 * du };
            arrays.push(sample(expr, n, h, OFFSETS[c], branch * uc.exp())?);
        }
        let mut it = arrays.into_iter();
        let mut next = || it.next().expect("six components");
        Ok(EmGridState {
            n,
            l_box,
            u,
            step: 0,
            branch,
            e: [next(), next(), next()],
            b: [next(), next(), next()],
        })
    }

    pub fn zeros(n: usize, l_box: f64) -> Self {
        let z = || vec![0.0; n * n * n];
        EmGridState { n, l_box, u: 0.0, step: 0, branch: 1.0, e: [z(), z(), z()], b: [z(), z(), z()] }
    }

    pub fn components(&self) -> [&[f64]; 6] {
        [&self.e[0], &self.e[1], &self.e[2], &self.b[0], &self.b[1], &self.b[2]]
    }

    /// `t = branch * e^u` of the `E` level.
    pub fn carrollian_time(&self) -> f64 {
        self.branch * self.u.exp()
    }

    fn curl_e_at(&self, g: Grid, c: usize, i: usize, j: usize, k: usize) -> f64 {
        let [ex, ey, ez] = &self.e;
        let at = |a: &Vec<f64>, i, j, k| a[g.idx(i, j, k)];
        let v = match c {
            0 => at(ez, i, g.up(j), k) - at(ez, i, j, k) - at(ey, i, j, g.up(k)) + at(ey, i, j, k),
            1 => at(ex, i, j, g.up(k)) - at(ex, i, j, k) - at(ez, g.up(i), j, k) + at(ez, i, j, k),
            _ => at(ey, g.up(i), j, k) - at(ey, i, j, k) - at(ex, i, g.up(j), k) + at(ex, i, j, k),
        };
        v / g.h
    }

    fn curl_b_at(&self, g: Grid, c: usize, i: usize, j: usize, k: usize) -> f64 {
        let [bx, by, bz] = &self.b;
        let at = |a: &Vec<f64>, i, j, k| a[g.idx(i, j, k)];
        let v = match c {
            0 => at(bz, i, j, k) - at(bz, i, g.down(j), k) - at(by, i, j, k) + at(by, i, j, g.down(k)),
            1 => at(bx, i, j, k) - at(bx, i, j, g.down(k)) - at(bz, i, j, k) + at(bz, g.down(i), j, k),
            _ => at(by, i, j, k) - at(by, g.down(i), j, k) - at(bx, i, j, k) + at(bx, i, g.down(j), k),
        };
        v / g.h
    }

    /// Max |div E| at the nodes.
    pub fn max_div_e(&self) -> f64 {
        let g = self.grid();
        let [ex, ey, ez] = &self.e;
        let parts: Vec<f64> = (0..g.n)
            .into_par_iter()
            .map(|k| {
                let mut m: f64 = 0.0;
                for j in 0..g.n {
                    for i in 0..g.n {
                        let d = ex[g.idx(i, j, k)] - ex[g.idx(g.down(i), j, k)] + ey[g.idx(i, j, k)] - ey[g.idx(i, g.down(j), k)]
                            + ez[g.idx(i, j, k)]
                            - ez[g.idx(i, j, g.down(k))];
                        m = m.max((d / g.h).abs());
                    }
                }
                m
            })
            .collect();
        reduce(&parts, 0.0, max2)
    }

    /// Max |div B| at the cell centres.
    pub fn max_div_b(&self) -> f64 {
        let g = self.grid();
        let [bx, by, bz] = &self.b;
        let parts: Vec<f64> = (0..g.n)
            .into_par_iter()
            .map(|k| {
                let mut m: f64 = 0.0;
                for j in 0..g.n {
                    for i in 0..g.n {
                        let d = bx[g.idx(g.up(i), j, k)] - bx[g.idx(i, j, k)] + by[g.idx(i, g.up(j), k)] - by[g.idx(i, j, k)]
                            + bz[g.idx(i, j, g.up(k))]
                            - bz[g.idx(i, j, k)];
                        m = m.max((d / g.h).abs());
                    }
                }
                m
            })
            .collect();
        reduce(&parts, 0.0, max2)
    }

    /// `h^3/2 sum |E|^2` and `h^3/2 sum |B|^2` of the stored levels.
    pub fn naive_energy(&self) -> f64 {
        let h3 = self.dx().powi(3);
        let parts: Vec<f64> = self.components().iter().map(|a| ordered_sum(a.iter().map(|v| v * v))).collect();
        0.5 * h3 * reduce(&parts, 0.0, |a, b| a + b)
    }

    /// Max |E - E_exact| at `u` and |B - B_exact| at `u - du/2`.
    pub fn max_error(&self, exact: &EmField, du: f64) -> Result<f64> {
        let reference = EmGridState::from_field(exact, self.n, self.l_box, self.u, du, self.branch)?;
        let mut m: f64 = 0.0;
        for (a, b) in self.components().iter().zip(reference.components()) {
            for (x, y) in a.iter().zip(b) {
                m = m.max((x - y).abs());
            }
        }
        Ok(m)
    }
}

fn ordered_sum(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |a, b| a + b)
}

fn sample(expr: &ScalarExpr, n: usize, h: f64, off: [f64; 3], t: f64) -> Result<Vec<f64>> {
    if let Some(c) = expr.as_const() {
        return Ok(vec![c; n * n * n]);
    }
    let tape = Tape::compile(std::slice::from_ref(expr));
    let slabs: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut out = Vec::with_capacity(n * n);
            let mut buf = Vec::new();
            for j in 0..n {
                for i in 0..n {
                    let x = vec![(i as f64 + off[0]) * h, (j as f64 + off[1]) * h, (k as f64 + off[2]) * h];
                    tape.eval_into(&Point::new(x, t)?, &mut buf)?;
                    out.push(tape.outputs(&buf).next().expect("one output"));
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::with_capacity(n * n * n);
    for s in slabs {
        all.extend(s?);
    }
    Ok(all)
}

/// Diagnostics produced while advancing from level `n` to `n + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    /// conserved energy of level `n`
    pub energy: f64,
    /// max |(B^{n+1/2} - B^{n-1/2})/du - curl E^n|
    pub faraday: f64,
    /// max |(E^{n+1} - E^n)/du + curl B^{n+1/2}|
    pub ampere: f64,
}

pub fn cfl_bound(dx: f64) -> f64 {
    dx / 3f64.sqrt()
}

/// One leapfrog step `B += du curl E`, `E -= du curl B`.
pub fn fdtd_step(s: &mut EmGridState, du: f64) -> Result<StepReport> {
    let bound = cfl_bound(s.dx());
    if du.is_nan() || du <= 0.0 || du > bound {
        return Err(Error::Cfl { du, bound });
    }
    let g = s.grid();
    let h3 = g.h.powi(3);
    let mut faraday: f64 = 0.0;
    let mut cross = 0.0;
    let mut b_new = s.b.clone();
    for (c, out) in b_new.iter_mut().enumerate() {
        let old = &s.b[c];
        // (B_old . B_new, faraday residual)
        let parts = par_slabs(
            out,
            g,
            |i, j, k, v| {
                let curl = s.curl_e_at(g, c, i, j, k);
                let prev = old[g.idx(i, j, k)];
                *v = prev + du * curl;
                (prev * *v, ((*v - prev) / du - curl).abs())
            },
            |a, b| (a.0 + b.0, a.1.max(b.1)),
            (0.0, 0.0),
        );
        let r = reduce(&parts, (0.0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
        cross += r.0;
        faraday = faraday.max(r.1);
    }
    let e2 = ordered_sum(s.e.iter().map(|a| ordered_sum(a.iter().map(|v| v * v))));
    let energy = 0.5 * h3 * (e2 + cross);
    s.b = b_new;
    let mut ampere: f64 = 0.0;
    let mut e_new = s.e.clone();
    for (c, out) in e_new.iter_mut().enumerate() {
        let old = &s.e[c];
        let parts = par_slabs(
            out,
            g,
            |i, j, k, v| {
                let curl = s.curl_b_at(g, c, i, j, k);
                let prev = old[g.idx(i, j, k)];
                *v = prev - du * curl;
                ((*v - prev) / du + curl).abs()
            },
            max2,
            0.0,
        );
        ampere = ampere.max(reduce(&parts, 0.0, max2));
    }
    s.e = e_new;
    s.u += du;
    s.step += 1;
    Ok(StepReport { energy, faraday, ampere })
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimRow {
    pub step: usize,
    pub u: f64,
    pub t: f64,
    pub energy: f64,
    #[serde(rename = "max_divE")]
    pub max_div_e: f64,
    #[serde(rename = "max_divB")]
    pub max_div_b: f64,
    pub max_residual_faraday: f64,
    pub max_residual_ampere: f64,
}

/// A configured run: state, initial data and the collected rows.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub config: SimConfig,
    pub field: EmField,
    pub state: EmGridState,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let field = config.initial_field()?;
        let state = EmGridState::from_field(&field, config.n, config.l_box, config.u0, config.du, config.branch)?;
        Ok(Simulation { config, field, state })
    }

    pub fn step(&mut self) -> Result<StepReport> {
        fdtd_step(&mut self.state, self.config.du)
    }

    fn row(&self, rep: StepReport) -> SimRow {
        SimRow {
            step: self.state.step,
            u: self.state.u,
            t: self.state.carrollian_time(),
            energy: rep.energy,
            max_div_e: self.state.max_div_e(),
            max_div_b: self.state.max_div_b(),
            max_residual_faraday: rep.faraday,
            max_residual_ampere: rep.ampere,
        }
    }

    /// Runs `config.steps` steps; `dump` is called on every dump level.
    /// The final row's residuals come from a trial step that is discarded.
    pub fn run(&mut self, mut dump: impl FnMut(&EmGridState, f64) -> Result<()>) -> Result<Vec<SimRow>> {
        let (cadence, dumps, steps) = (self.config.cadence, self.config.dump_cadence, self.config.steps);
        let mut rows = Vec::new();
        for level in 0..=steps {
            if dumps > 0 && level % dumps == 0 {
                dump(&self.state, self.config.du)?;
            }
            let want = level % cadence == 0 || level == steps;
            if level == steps {
                let mut trial = self.state.clone();
                let rep = fdtd_step(&mut trial, self.config.du)?;
                if want {
                    rows.push(self.row(rep));
                }
                break;
            }
            let before = want.then(|| (self.state.max_div_e(), self.state.max_div_b(), self.state.step, self.state.u));
            let rep = self.step()?;
            if let Some((de, db, step, u)) = before {
                rows.push(SimRow {
                    step,
                    u,
                    t: self.state.branch * u.exp(),
                    energy: rep.energy,
                    max_div_e: de,
                    max_div_b: db,
                    max_residual_faraday: rep.faraday,
                    max_residual_ampere: rep.ampere,
                });
            }
        }
        Ok(rows)
    }
}

/// Runs a configuration without dumps.
pub fn run_simulation(cfg: &SimConfig) -> Result<Vec<SimRow>> {
    Simulation::new(cfg.clone())?.run(|_, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxwell::plane_wave;
    use std::f64::consts::PI;

    #[test]
    fn constant_fields_are_stationary() {
        let f = EmField::parse("1; 2; 3", "-1; 0.5; 4").unwrap();
        let mut s = EmGridState::from_field(&f, 8, 1.0, 0.0, 0.05, 1.0).unwrap();
        let before = s.clone();
        for _ in 0..5 {
            fdtd_step(&mut s, 0.05).unwrap();
        }
        for (a, b) in s.components().iter().zip(before.components()) {
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-14));
        }
    }

    #[test]
    fn cfl_is_enforced() {
        let mut s = EmGridState::zeros(8, 1.0);
        let bound = cfl_bound(1.0 / 8.0);
        assert!(matches!(fdtd_step(&mut s, bound * 1.01), Err(Error::Cfl { .. })));
        assert!(fdtd_step(&mut s, bound).is_ok());
    }

    #[test]
    fn divergence_and_energy_are_conserved() {
        let k = [2.0 * PI, 2.0 * PI, 0.0];
        let f = plane_wave(k, [1.0, -1.0, 0.5], false).unwrap();
        let mut s = EmGridState::from_field(&f, 12, 1.0, 0.0, 0.04, -1.0).unwrap();
        let (de, db) = (s.max_div_e(), s.max_div_b());
        let mut energies = Vec::new();
        for _ in 0..20 {
            energies.push(fdtd_step(&mut s, 0.04).unwrap().energy);
        }
        assert!((s.max_div_e() - de).abs() < 1e-11 && (s.max_div_b() - db).abs() < 1e-11);
        let e0 = energies[0];
        assert!(energies.iter().all(|e| ((e - e0) / e0).abs() < 1e-12));
        assert!(s.carrollian_time() < 0.0);
    }

    #[test]
    fn zero_field_gives_zero_series() {
        let mut cfg = SimConfig::plane_wave(8, 1.0, [1, 0, 0], [0.0, 1.0, 0.0], 0.5, 0.25);
        cfg.init = crate::maxwell::InitialCondition::Zero;
        let rows = run_simulation(&cfg).unwrap();
        assert_eq!(rows.len(), cfg.steps + 1);
        assert!(rows.iter().all(|r| r.energy == 0.0 && r.max_div_e == 0.0 && r.max_residual_ampere == 0.0));
    }
}
