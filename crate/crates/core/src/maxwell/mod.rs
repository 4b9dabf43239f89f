//! Carrollian electromagnetism on `R^3 x R^x` with `theta = dt / t`.
//!
//! The symbolic half assembles `F = B + theta ^ E`, evaluates `dF` and
//! `d*F` with the general operator stack, and compares them with the vector
//! equations
//!
//! ```text
//! div B = 0,   curl E - L B = 0,
//! div E = 0,   curl B + L E = 0,      L = t d/dt,
//! ```
//!
//! which in logarithmic time `u = ln|t|` read `curl E = d_u B`,
//! `curl B = -d_u E`. The numerical half ([`fdtd`]) marches those in `u`.

pub mod config;
pub mod fdtd;
pub mod output;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{CarrollBundle, Form, Monomial};
use crate::hodge::{base_star, star};
use crate::scalar::{Point, ScalarExpr, Var};

pub use config::{InitialCondition, SimConfig};
pub use fdtd::{run_simulation, EmGridState, SimRow, Simulation};

pub type Vec3 = [ScalarExpr; 3];

/// Symbolic field pair on `(x, y, z, t)`; `E` is the horizontal one-form
/// `E_x dx + E_y dy + E_z dz`, the `theta` is added on assembly.
#[derive(Clone, Debug, PartialEq)]
pub struct EmField {
    pub e: Vec3,
    pub b: Vec3,
}

fn zero3() -> Vec3 {
    [ScalarExpr::zero(), ScalarExpr::zero(), ScalarExpr::zero()]
}

fn dxdx(a: usize, b: usize) -> Monomial {
    Monomial::new(&[a, b], false).expect("distinct axes")
}

/// `R^3 x R^x` with the Euclidean metric and trivial connection.
pub fn flat_space() -> CarrollBundle {
    CarrollBundle::flat(3).expect("flat bundle")
}

impl EmField {
    pub fn new(e: Vec3, b: Vec3) -> Self {
        EmField { e, b }
    }

    pub fn zero() -> Self {
        EmField { e: zero3(), b: zero3() }
    }

    /// Parses `"ex; ey; ez"` triples in the scalar syntax (`x1, x2, x3, t`).
    pub fn parse(e: &str, b: &str) -> Result<Self> {
        Ok(EmField { e: parse_triple(e)?, b: parse_triple(b)? })
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        EmField { e: self.e.each_ref().map(&f), b: self.b.each_ref().map(&f) }
    }

    /// `E -> B`, `B -> -E`.
    pub fn dual(&self) -> Self {
        EmField { e: self.b.clone(), b: self.e.each_ref().map(|c| -c) }
    }

    pub fn rescale_time(&self, phi0: f64) -> Self {
        self.map(|c| c.substitute(Var::Fibre, &(ScalarExpr::fibre() * phi0)))
    }

    pub fn energy_density(&self) -> ScalarExpr {
        ScalarExpr::sum(self.e.iter().chain(&self.b).map(|c| c.powi(2))) * 0.5
    }

    pub fn superpose(&self, other: &EmField) -> Self {
        let add = |a: &Vec3, b: &Vec3| [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]];
        EmField { e: add(&self.e, &other.e), b: add(&self.b, &other.b) }
    }

    /// `B = dx^dy B_z - dx^dz B_y + dy^dz B_x`.
    pub fn magnetic_form(&self) -> Form {
        vector_to_two_form(&self.b)
    }

    pub fn electric_form(&self) -> Form {
        vector_to_one_form(&self.e)
    }
}

fn parse_triple(src: &str) -> Result<Vec3> {
    let parts: Vec<&str> = src.split(';').collect();
    if parts.len() != 3 {
        return Err(Error::Parse { pos: 0, msg: format!("expected three `;`-separated components, got {}", parts.len()) });
    }
    let mut out = zero3();
    for (slot, p) in out.iter_mut().zip(parts) {
        let e = crate::scalar::parse_scalar(p.trim())?;
        if e.max_axis().is_some_and(|a| a >= 3) {
            return Err(Error::Parse { pos: 0, msg: format!("`{}` uses a coordinate beyond x3", p.trim()) });
        }
        *slot = e;
    }
    Ok(out)
}

fn vector_to_one_form(v: &Vec3) -> Form {
    Form::from_terms(3, 1, (0..3).map(|a| (Monomial::dx(a), v[a].clone()))).expect("one-form")
}

fn vector_to_two_form(v: &Vec3) -> Form {
    Form::from_terms(3, 2, [(dxdx(0, 1), v[2].clone()), (dxdx(0, 2), -&v[1]), (dxdx(1, 2), v[0].clone())])
        .expect("two-form")
}

/// `v` with `F = two_form(v)`, the inverse of the magnetic dictionary.
fn two_form_to_vector(f: &Form) -> Vec3 {
    [f.coeff(dxdx(1, 2)), -f.coeff(dxdx(0, 2)), f.coeff(dxdx(0, 1))]
}

/// `F = B + theta ^ E`.
pub fn assemble_field_strength(f: &EmField) -> Form {
    let theta_e = Form::theta(3).wedge(&f.electric_form()).expect("degree 2");
    f.magnetic_form() + theta_e
}

/// Reads a horizontal-plus-theta two-form back into `(E, B)`.
pub fn split_field_strength(big_f: &Form) -> Result<EmField> {
    if big_f.dim() != 3 || big_f.degree() != 2 {
        return Err(Error::InvalidField("field strength must be a two-form on R^3 x R^x".into()));
    }
    let (h, v) = big_f.decompose();
    let e = v.theta_factor().unwrap_or_else(|| Form::zero(3, 1));
    Ok(EmField { e: [e.coeff(Monomial::dx(0)), e.coeff(Monomial::dx(1)), e.coeff(Monomial::dx(2))], b: two_form_to_vector(&h) })
}

/// The four vector residuals, computed directly from partial derivatives.
#[derive(Clone, Debug)]
pub struct VectorResiduals {
    pub div_b: ScalarExpr,
    /// `curl E - L B`
    pub faraday: Vec3,
    pub div_e: ScalarExpr,
    /// `curl B + L E`
    pub ampere: Vec3,
}

fn div(v: &Vec3) -> ScalarExpr {
    ScalarExpr::sum((0..3).map(|a| v[a].partial(Var::Base(a))))
}

fn curl(v: &Vec3) -> Vec3 {
    let d = |c: usize, a: usize| v[c].partial(Var::Base(a));
    [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
}

pub fn vector_residuals(f: &EmField) -> VectorResiduals {
    let (ce, cb) = (curl(&f.e), curl(&f.b));
    let l = |v: &Vec3| v.each_ref().map(ScalarExpr::euler_derivative);
    let (lb, le) = (l(&f.b), l(&f.e));
    VectorResiduals {
        div_b: div(&f.b),
        faraday: [&ce[0] - &lb[0], &ce[1] - &lb[1], &ce[2] - &lb[2]],
        div_e: div(&f.e),
        ampere: [&cb[0] + &le[0], &cb[1] + &le[1], &cb[2] + &le[2]],
    }
}

impl VectorResiduals {
    fn all(&self) -> Vec<ScalarExpr> {
        let mut out = vec![self.div_b.clone(), self.div_e.clone()];
        out.extend(self.faraday.iter().cloned());
        out.extend(self.ampere.iter().cloned());
        out
    }

    pub fn max_abs(&self, samples: &[Point]) -> Result<(f64, Option<Point>)> {
        let tape = crate::scalar::Tape::compile(&self.all());
        let mut best = (0.0, None);
        for p in samples {
            for v in tape.eval(p)? {
                if v.abs() > best.0 {
                    best = (v.abs(), Some(p.clone()));
                }
            }
        }
        Ok(best)
    }
}

/// Both formulations of the field equations for one field pair.
#[derive(Clone, Debug)]
pub struct MaxwellResidual {
    pub d_f: Form,
    pub d_star_f: Form,
    pub vector: VectorResiduals,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualSummary {
    pub d_f: f64,
    pub d_star_f: f64,
    pub vector: f64,
    pub witness: Option<String>,
}

impl ResidualSummary {
    pub fn max(&self) -> f64 {
        self.d_f.max(self.d_star_f).max(self.vector)
    }

    /// Both formulations agree on the verdict at tolerance `tol`.
    pub fn formulations_agree(&self, tol: f64) -> bool {
        (self.d_f.max(self.d_star_f) < tol) == (self.vector < tol)
    }
}

pub fn maxwell_residual(f: &EmField) -> Result<MaxwellResidual> {
    let b = flat_space();
    let big_f = assemble_field_strength(f);
    let d_f = b.exterior_derivative(&big_f)?;
    let d_star_f = b.exterior_derivative(&star(&big_f, &b)?)?;
    Ok(MaxwellResidual { d_f, d_star_f, vector: vector_residuals(f) })
}

impl MaxwellResidual {
    pub fn summarize(&self, samples: &[Point]) -> Result<ResidualSummary> {
        let (a, pa) = self.d_f.max_abs(samples)?;
        let (b, pb) = self.d_star_f.max_abs(samples)?;
        let (c, pc) = self.vector.max_abs(samples)?;
        let witness = [(a, pa), (b, pb), (c, pc)]
            .into_iter()
            .max_by(|x, y| x.0.total_cmp(&y.0))
            .and_then(|(_, p)| p)
            .map(|p| p.to_string());
        Ok(ResidualSummary { d_f: a, d_star_f: b, vector: c, witness })
    }

    /// The vector residuals as they appear inside `dF` and `d*F`:
    /// `dF = div B vol + theta ^ two_form(-(curl E - L B))`,
    /// `d*F = div E vol + theta ^ two_form(curl B + L E)`.
    pub fn predicted_forms(&self) -> (Form, Form) {
        let vol = Monomial::base_top(3);
        let theta = Form::theta(3);
        let neg = |v: &Vec3| v.each_ref().map(|c| -c);
        let d_f = Form::monomial(3, vol, self.vector.div_b.clone())
            + theta.wedge(&vector_to_two_form(&neg(&self.vector.faraday))).expect("degree 3");
        let d_star_f = Form::monomial(3, vol, self.vector.div_e.clone())
            + theta.wedge(&vector_to_two_form(&self.vector.ampere)).expect("degree 3");
        (d_f, d_star_f)
    }
}

/// Residuals of the local equations `dB = 0`, `dE = 0`, `d *_M B = 0`,
/// `d *_M E = 0` for the flat trivialisation.
#[derive(Clone, Debug)]
pub struct LocalResiduals {
    pub d_b: Form,
    pub d_e: Form,
    pub d_star_b: Form,
    pub d_star_e: Form,
}

pub fn local_equations(f: &EmField) -> Result<LocalResiduals> {
    let b = flat_space();
    let (bb, ee) = (f.magnetic_form(), f.electric_form());
    Ok(LocalResiduals {
        d_b: b.exterior_derivative(&bb)?,
        d_e: b.exterior_derivative(&ee)?,
        d_star_b: b.exterior_derivative(&base_star(&bb, &b)?)?,
        d_star_e: b.exterior_derivative(&base_star(&ee, &b)?)?,
    })
}

impl LocalResiduals {
    pub fn max_abs(&self, samples: &[Point]) -> Result<f64> {
        let mut m: f64 = 0.0;
        for f in [&self.d_b, &self.d_e, &self.d_star_b, &self.d_star_e] {
            m = m.max(f.max_abs(samples)?.0);
        }
        Ok(m)
    }
}

/// `E = E0 cos(k.x - w u)`, `B = -(k x E0)/w cos(k.x - w u)`, `w = |k|`,
/// `u = ln|t|`. With `normalize`, `E0` is scaled to unit length first.
pub fn plane_wave(k: [f64; 3], e0: [f64; 3], normalize: bool) -> Result<EmField> {
    let kk = norm(k);
    if kk == 0.0 || !kk.is_finite() {
        return Err(Error::InvalidField("wave vector must be nonzero".into()));
    }
    let mut e0 = e0;
    let en = norm(e0);
    if normalize {
        if en == 0.0 {
            return Err(Error::InvalidField("cannot normalize a zero amplitude".into()));
        }
        e0 = e0.map(|c| c / en);
    }
    let kdot = k[0] * e0[0] + k[1] * e0[1] + k[2] * e0[2];
    if kdot.abs() > 1e-12 * kk * en.max(1.0) {
        return Err(Error::InvalidField(format!("amplitude is not transverse: k.E0 = {kdot}")));
    }
    let b0 = cross(k, e0).map(|c| -c / kk);
    let phase = ScalarExpr::sum((0..3).filter(|&a| k[a] != 0.0).map(|a| ScalarExpr::coord(a) * k[a]))
        - ScalarExpr::fibre().ln_abs() * kk;
    let wave = phase.cos();
    let field = |a: [f64; 3]| a.map(|c| &wave * c);
    Ok(EmField { e: field(e0), b: field(b0) })
}

pub fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `d_u^2 c - lap c` for every component, with `d_u = L`.
pub fn wave_residual(f: &EmField) -> Vec<ScalarExpr> {
    f.e.iter()
        .chain(&f.b)
        .map(|c| {
            let lap = ScalarExpr::sum((0..3).map(|a| c.partial(Var::Base(a)).partial(Var::Base(a))));
            c.euler_derivative().euler_derivative() - lap
        })
        .collect()
}
