//! The Schwarzschild horizon `S^2 x R^x` with `g = (2 kappa)^-2 g_{S^2}` and
//! the trivial connection.
//!
//! Forms are handled in the orthonormal coframe
//! `e^1 = (2 kappa)^-1 dvartheta`, `e^2 = (2 kappa)^-1 sin(vartheta) dvarphi`, `theta`,
//! as pairs `(S_k, T_{k-1})` with `xi = S_k + theta ^ T_{k-1}`. Base axis 0
//! is `vartheta`, axis 1 is `varphi`; pointwise checks keep away from the poles.

pub mod sphere;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{CarrollBundle, Form, Monomial};
use crate::hodge::{laplacian, star};
use crate::scalar::{Point, SampleBox, ScalarExpr, Var};
pub use sphere::{spherical_harmonic, Sphere};

/// Polar margin: samples use `vartheta` in `[POLE_MARGIN, pi - POLE_MARGIN]`.
pub const POLE_MARGIN: f64 = 0.2;

/// `kappa` at which `(2 kappa)^2 l(l+1) = lambda^2` for `l = lambda = 1`.
pub const KAPPA_BALANCED: f64 = 0.353_553_390_593_273_8; // 1 / (2 sqrt 2)

/// Horizon bundle together with its coframe data.
#[derive(Clone, Debug)]
pub struct HorizonBundle {
    kappa: f64,
    bundle: CarrollBundle,
    sphere: Sphere,
    scale: [ScalarExpr; 2],
}

/// Bundle with base metric `diag((2k)^-2, (2k)^-2 sin^2 vartheta)` and `A = 0`.
pub fn make_horizon_bundle(kappa: f64) -> Result<CarrollBundle> {
    Ok(HorizonBundle::new(kappa)?.bundle)
}

pub fn angular_box() -> SampleBox {
    SampleBox::new(vec![(POLE_MARGIN, PI - POLE_MARGIN), (0.0, 2.0 * PI)], (0.5, 2.0))
}

impl HorizonBundle {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidBundle(format!("surface gravity must be positive, got {kappa}")));
        }
        let c = 1.0 / (2.0 * kappa);
        let sin = ScalarExpr::coord(0).sin();
        let metric = vec![
            vec![ScalarExpr::constant(c * c), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), sin.powi(2) * (c * c)],
        ];
        let bundle = CarrollBundle::with_domain(metric, vec![ScalarExpr::zero(); 2], angular_box())?;
        let scale = [ScalarExpr::constant(c), sin * c];
        Ok(HorizonBundle { kappa, bundle, sphere: Sphere::new(kappa), scale })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn bundle(&self) -> &CarrollBundle {
        &self.bundle
    }

    pub fn sphere(&self) -> &Sphere {
        &self.sphere
    }

    fn monomial_scale(&self, m: Monomial) -> ScalarExpr {
        ScalarExpr::product(m.base_indices().into_iter().map(|i| self.scale[i].clone()))
    }

    /// Rewrites a form given in the `{e^1, e^2, theta}` coframe in the
    /// `{dvartheta, dvarphi, theta}` coframe.
    pub fn from_orthonormal(&self, xi: &Form) -> Form {
        xi.map_coeffs(|m, c| c * self.monomial_scale(*m))
    }

    pub fn to_orthonormal(&self, xi: &Form) -> Form {
        xi.map_coeffs(|m, c| c / self.monomial_scale(*m))
    }

    pub fn to_form(&self, h: &HorizonForm) -> Form {
        self.from_orthonormal(&h.to_coframe_form())
    }

    pub fn split(&self, xi: &Form) -> HorizonForm {
        HorizonForm::from_coframe_form(&self.to_orthonormal(xi))
    }
}

/// Named slot of a horizon form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Component {
    /// horizontal part `S_k`
    S(usize),
    /// theta-part `T_{k-1}`
    T(usize),
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Component::S(k) => write!(f, "S{k}"),
            Component::T(k) => write!(f, "T{k}"),
        }
    }
}

/// Degree-k form `S_k + theta ^ T_{k-1}` on the horizon, components in the
/// orthonormal coframe. Components are horizontal [`Form`]s over the
/// two-dimensional base whose monomials stand for `e^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizonForm {
    degree: usize,
    s: Form,
    t: Option<Form>,
}

impl HorizonForm {
    pub fn new(s: Form, t: Option<Form>) -> Result<Self> {
        let degree = match &t {
            Some(t) => t.degree() + 1,
            None => s.degree(),
        };
        if degree > 3 || s.dim() != 2 || t.as_ref().is_some_and(|t| t.dim() != 2) {
            return Err(Error::Degree("horizon forms have a two-dimensional base and degree at most 3".into()));
        }
        if s.degree() != degree && !(degree == 3 && s.is_empty()) {
            return Err(Error::Degree(format!("S has degree {}, expected {degree}", s.degree())));
        }
        if !s.is_horizontal() || t.as_ref().is_some_and(|t| !t.is_horizontal()) {
            return Err(Error::NotHorizontal);
        }
        if degree > 0 && t.is_none() {
            return Err(Error::Degree("positive-degree horizon forms need a T component".into()));
        }
        let s = if degree == 3 { Form::zero(2, 2) } else { s };
        Ok(HorizonForm { degree, s, t })
    }

    /// Degree 0: `f`.
    pub fn function(f: ScalarExpr) -> Self {
        HorizonForm { degree: 0, s: Form::scalar(2, f), t: None }
    }

    /// Degree 1: `S_1 = s[0] e^1 + s[1] e^2`, `T_0 = t0`.
    pub fn one_form(s: [ScalarExpr; 2], t0: ScalarExpr) -> Self {
        HorizonForm { degree: 1, s: e1(s), t: Some(Form::scalar(2, t0)) }
    }

    /// Degree 2: `S_2 = s2 e^1 ^ e^2`, `T_1 = t[0] e^1 + t[1] e^2`.
    pub fn two_form(s2: ScalarExpr, t: [ScalarExpr; 2]) -> Self {
        HorizonForm { degree: 2, s: e12(s2), t: Some(e1(t)) }
    }

    /// Degree 3: `theta ^ T_2`, `T_2 = t2 e^1 ^ e^2`.
    pub fn three_form(t2: ScalarExpr) -> Self {
        HorizonForm { degree: 3, s: Form::zero(2, 2), t: Some(e12(t2)) }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn s(&self) -> &Form {
        &self.s
    }

    pub fn t(&self) -> Option<&Form> {
        self.t.as_ref()
    }

    /// `xi` with the e-monomials read as coframe monomials.
    pub fn to_coframe_form(&self) -> Form {
        let mut out = if self.degree == 3 { Form::zero(2, 3) } else { self.s.clone() };
        if let Some(t) = &self.t {
            out = out + Form::theta(2).wedge(t).expect("degree <= 3");
        }
        out
    }

    pub fn from_coframe_form(xi: &Form) -> Self {
        let (h, v) = xi.decompose();
        let degree = xi.degree();
        let t = (degree > 0).then(|| v.theta_factor().unwrap_or_else(|| Form::zero(2, degree - 1)));
        let s = if degree == 3 { Form::zero(2, 2) } else { h };
        HorizonForm { degree, s, t }
    }

    /// Every (slot, coefficient) pair, zero slots included.
    pub fn slots(&self) -> Vec<(Component, Monomial, ScalarExpr)> {
        let mut out = Vec::new();
        if self.degree < 3 {
            for m in Monomial::horizontal_of_degree(2, self.degree) {
                out.push((Component::S(self.degree), m, self.s.coeff(m)));
            }
        }
        if let Some(t) = &self.t {
            for m in Monomial::horizontal_of_degree(2, self.degree - 1) {
                out.push((Component::T(self.degree - 1), m, t.coeff(m)));
            }
        }
        out
    }

    pub fn max_deviation(&self, other: &HorizonForm, samples: &[Point]) -> Result<(f64, Option<Point>)> {
        self.to_coframe_form().max_deviation(&other.to_coframe_form(), samples)
    }
}

fn e1(s: [ScalarExpr; 2]) -> Form {
    let [a, b] = s;
    Form::from_terms(2, 1, [(Monomial::dx(0), a), (Monomial::dx(1), b)]).expect("1-form")
}

fn e12(c: ScalarExpr) -> Form {
    Form::monomial(2, Monomial::new(&[0, 1], false).expect("e1^e2"), c)
}

/// One checked entry of a table.
#[derive(Clone, Debug, Serialize)]
pub struct TableEntry {
    pub entry: String,
    pub expected: String,
    pub computed: String,
    pub max_deviation: f64,
    pub pass: bool,
}

fn render_e(xi: &Form) -> String {
    xi.render(|i| format!("e{}", i + 1), "th")
}

/// The eight printed star entries in the orthonormal coframe, as
/// `(input, expected)` in `e`/`th` notation.
pub const HORIZON_STAR_TABLE: [(&str, &str); 8] = [
    ("1", "e1^e2^th"),
    ("e1", "e2^th"),
    ("e2", "-e1^th"),
    ("th", "-e1^e2"),
    ("e1^e2", "th"),
    ("e1^th", "e2"),
    ("e2^th", "-e1"),
    ("e1^e2^th", "-1"),
];

fn parse_e(src: &str) -> Result<Form> {
    Form::parse(&src.replace("e1", "dx1").replace("e2", "dx2"), 2)
}

/// Computes the star of the eight coframe monomials through the general
/// Hodge machinery and compares with the printed table.
pub fn verify_hodge_table(kappa: f64, samples: &[Point], tol: f64) -> Result<Vec<TableEntry>> {
    let hb = HorizonBundle::new(kappa)?;
    HORIZON_STAR_TABLE
        .iter()
        .map(|(input, expected)| {
            let xi = hb.from_orthonormal(&parse_e(input)?);
            let computed = hb.to_orthonormal(&star(&xi, hb.bundle())?);
            let want = parse_e(expected)?;
            let dev = computed.max_deviation(&want, samples)?.0;
            Ok(TableEntry {
                entry: format!("*({input})"),
                expected: (*expected).to_string(),
                computed: render_e(&computed),
                max_deviation: dev,
                pass: dev < tol,
            })
        })
        .collect()
}

/// Stack-versus-table comparison for one horizon form.
#[derive(Clone, Debug, Serialize)]
pub struct LaplacianCheck {
    pub degree: usize,
    pub max_deviation: f64,
    pub witness: Option<String>,
    pub pass: bool,
}

fn lie(c: &ScalarExpr) -> ScalarExpr {
    c.euler_derivative()
}

/// `Delta_{S^2} X - L^2 X` on a coordinate one-form.
fn wave1(s: &Sphere, w: &[ScalarExpr; 2]) -> [ScalarExpr; 2] {
    let l = s.lap1(w);
    [&l[0] - lie(&lie(&w[0])), &l[1] - lie(&lie(&w[1]))]
}

/// Right-hand side of the horizon Laplacian table, computed with the
/// coordinate calculus of [`Sphere`], returned in the coordinate coframe.
pub fn laplacian_table_rhs(hb: &HorizonBundle, h: &HorizonForm) -> Result<Form> {
    let s = hb.sphere();
    let coord = hb.to_form(h);
    let split = HorizonForm::from_coframe_form(&coord);
    let dx = |a: usize| Monomial::dx(a);
    let dth_dph = Monomial::new(&[0, 1], false)?;
    let one_form = |f: &Form| [f.coeff(dx(0)), f.coeff(dx(1))];
    let theta_wedge = |f: Form| Form::theta(2).wedge(&f).expect("degree <= 3");
    let out = match h.degree() {
        0 => {
            let f = split.s().coeff(Monomial::one());
            Form::scalar(2, s.lap0(&f) - lie(&lie(&f)))
        }
        1 => {
            let s1 = one_form(split.s());
            let t0 = split.t().expect("degree 1").coeff(Monomial::one());
            let w = wave1(s, &s1);
            let horiz = e_free_one_form([&w[0] - lie(&s1[0]) * 2.0, &w[1] - lie(&s1[1]) * 2.0]);
            let inner = s.div(&s1) * 2.0 - (s.lap0(&t0) - lie(&lie(&t0)));
            horiz - theta_wedge(Form::scalar(2, inner))
        }
        2 => {
            let s2 = split.s().coeff(dth_dph);
            let t1 = one_form(split.t().expect("degree 2"));
            let horiz = s.lap2(&s2) - lie(&lie(&s2)) - lie(&s2) * 2.0;
            let div = s.div_split(&t1);
            let w = wave1(s, &t1);
            let inner = e_free_one_form([&div[0] * 2.0 - &w[0], &div[1] * 2.0 - &w[1]]);
            Form::monomial(2, dth_dph, horiz) - theta_wedge(inner)
        }
        3 => {
            let t2 = split.t().expect("degree 3").coeff(dth_dph);
            let inner = s.lap2(&t2) - lie(&lie(&t2));
            -theta_wedge(Form::monomial(2, dth_dph, inner))
        }
        _ => unreachable!("degree checked at construction"),
    };
    Ok(out)
}

fn e_free_one_form(w: [ScalarExpr; 2]) -> Form {
    e1(w)
}

/// `Delta_HdR` of a horizon form through the full operator stack.
pub fn stack_laplacian(hb: &HorizonBundle, h: &HorizonForm) -> Result<Form> {
    laplacian(&hb.to_form(h), hb.bundle())
}

pub fn verify_laplacian_table(h: &HorizonForm, hb: &HorizonBundle, samples: &[Point], tol: f64) -> Result<LaplacianCheck> {
    let lhs = stack_laplacian(hb, h)?;
    let rhs = laplacian_table_rhs(hb, h)?;
    let (dev, at) = lhs.max_deviation(&rhs, samples)?;
    Ok(LaplacianCheck { degree: h.degree(), max_deviation: dev, witness: at.map(|p| p.to_string()), pass: dev < tol })
}

/// Regularity verdict at the zero section.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Regularity {
    Regular,
    NotRegular { offenders: Vec<String> },
    Indeterminate { reason: String },
}

/// Components that must vanish at least linearly in `t`.
pub fn constrained(degree: usize) -> Vec<Component> {
    match degree {
        0 => vec![],
        1 => vec![Component::S(1), Component::T(0)],
        2 => vec![Component::T(1)],
        _ => vec![Component::T(2)],
    }
}

/// Lowest power of `t` in a Laurent-polynomial coefficient; `None` for
/// zero, `Err` when the t-dependence is not polynomial.
fn lowest_power(c: &ScalarExpr) -> Result<Option<i32>, String> {
    match c.t_laurent() {
        Some(m) => Ok(m.keys().next().copied()),
        None => Err(format!("`{}` is not a Laurent polynomial in t", c.brief(60))),
    }
}

/// Checks the printed list `S_1, T_0, T_1, T_2` for at least linear
/// dependence on `t`; `f` and `S_2` are not constrained.
pub fn regularity_check(h: &HorizonForm) -> Regularity {
    let wanted = constrained(h.degree());
    let mut offenders = Vec::new();
    for (comp, m, c) in h.slots() {
        if !wanted.contains(&comp) || c.is_zero() {
            continue;
        }
        match lowest_power(&c) {
            Ok(Some(p)) if p < 1 => {
                let name = comp.to_string();
                if !offenders.contains(&name) {
                    offenders.push(name);
                }
            }
            Ok(_) => {}
            Err(reason) => {
                return Regularity::Indeterminate { reason: format!("{comp} ({}): {reason}", render_e(&Form::monomial(2, m, ScalarExpr::one()))) }
            }
        }
    }
    if offenders.is_empty() {
        Regularity::Regular
    } else {
        Regularity::NotRegular { offenders }
    }
}

/// Result of passing to `t = 0`.
#[derive(Clone, Debug)]
pub struct ZeroLimit {
    pub finite_limit: bool,
    /// `Delta_HdR xi` in the coordinate coframe `{dvartheta, dvarphi, dt}`.
    pub laplacian: Form,
    /// Its `t -> 0` limit (same coframe).
    pub limit: Form,
}

/// Evaluates `Delta_HdR xi` and checks that every coefficient in the
/// coordinate coframe, where `theta = dt / t` shows its pole, is polynomial
/// in `t`; refuses non-regular input.
pub fn extend_to_zero(h: &HorizonForm, hb: &HorizonBundle) -> Result<ZeroLimit> {
    match regularity_check(h) {
        Regularity::Regular => {}
        Regularity::NotRegular { offenders } => return Err(Error::NotRegular(offenders.join(", "))),
        Regularity::Indeterminate { reason } => return Err(Error::Unsupported(reason)),
    }
    let lap = stack_laplacian(hb, h)?;
    let coord = hb.bundle().to_coordinate_coframe(&lap)?;
    let mut finite = true;
    let mut limit = Vec::new();
    for (m, c) in coord.terms() {
        match c.t_laurent() {
            Some(series) => {
                if series.keys().next().is_some_and(|&p| p < 0) {
                    finite = false;
                }
                if let Some(h0) = series.get(&0) {
                    limit.push((*m, h0.clone()));
                }
            }
            None => finite = false,
        }
    }
    let limit = Form::from_terms(2, coord.degree(), limit)?;
    Ok(ZeroLimit { finite_limit: finite, laplacian: coord, limit })
}

/// A separable harmonic found by [`harmonic_scan`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanHit {
    pub degree: usize,
    pub l: usize,
    pub m: i32,
    pub lambda: u32,
    pub component: String,
    pub residual: f64,
    /// whether the table expressions also vanish on the hit
    pub table_confirms: bool,
}

/// Ansatz `t^lambda Y_lm` placed in one coefficient slot.
fn ansatz(degree: usize, slot: usize, coeff: ScalarExpr) -> (HorizonForm, String) {
    let z = ScalarExpr::zero;
    match (degree, slot) {
        (0, _) => (HorizonForm::function(coeff), "f".into()),
        (1, 0) => (HorizonForm::one_form([coeff, z()], z()), "S1.e1".into()),
        (1, 1) => (HorizonForm::one_form([z(), coeff], z()), "S1.e2".into()),
        (1, _) => (HorizonForm::one_form([z(), z()], coeff), "T0".into()),
        (2, 0) => (HorizonForm::two_form(coeff, [z(), z()]), "S2.e12".into()),
        (2, 1) => (HorizonForm::two_form(z(), [coeff, z()]), "T1.e1".into()),
        (2, _) => (HorizonForm::two_form(z(), [z(), coeff]), "T1.e2".into()),
        _ => (HorizonForm::three_form(coeff), "T2.e12".into()),
    }
}

fn slot_count(degree: usize) -> usize {
    match degree {
        0 | 3 => 1,
        _ => 3,
    }
}

/// Stack residual threshold for a scan hit.
pub const SCAN_TOL: f64 = 1e-8;

/// Scans `t^lambda Y_lm`, one slot at a time, for `Delta_HdR = 0`.
pub fn harmonic_scan(kappa: f64, degrees: &[usize], l_max: usize, lambda_max: u32, samples: &[Point]) -> Result<Vec<ScanHit>> {
    if l_max > 4 {
        return Err(Error::Unsupported(format!("l_max = {l_max} exceeds the tabulated harmonics (4)")));
    }
    let hb = HorizonBundle::new(kappa)?;
    let mut cases = Vec::new();
    for &degree in degrees {
        if degree > 3 {
            return Err(Error::Degree(format!("horizon forms have degree at most 3, got {degree}")));
        }
        for l in 0..=l_max {
            for m in -(l as i32)..=l as i32 {
                for lambda in 0..=lambda_max {
                    for slot in 0..slot_count(degree) {
                        cases.push((degree, l, m, lambda, slot));
                    }
                }
            }
        }
    }
    let results: Vec<Result<Option<ScanHit>>> = cases
        .par_iter()
        .map(|&(degree, l, m, lambda, slot)| {
            let coeff = ScalarExpr::fibre().powi(lambda as i32) * spherical_harmonic(l, m)?;
            let (form, component) = ansatz(degree, slot, coeff);
            let lap = stack_laplacian(&hb, &form)?;
            let residual = lap.max_abs(samples)?.0;
            if residual >= SCAN_TOL {
                return Ok(None);
            }
            let table = laplacian_table_rhs(&hb, &form)?.max_abs(samples)?.0;
            Ok(Some(ScanHit { degree, l, m, lambda, component, residual, table_confirms: table < SCAN_TOL }))
        })
        .collect();
    let mut hits = Vec::new();
    for r in results {
        if let Some(h) = r? {
            hits.push(h);
        }
    }
    Ok(hits)
}

/// Measured eigenvalue `mu` of a t-independent function under the stack:
/// `Delta_HdR Y = mu Y`, estimated by least squares over the samples.
pub fn measured_eigenvalue(hb: &HorizonBundle, y: &ScalarExpr, samples: &[Point]) -> Result<f64> {
    let lap = stack_laplacian(hb, &HorizonForm::function(y.clone()))?;
    let ly = lap.coeff(Monomial::one());
    let (mut num, mut den) = (0.0, 0.0);
    for p in samples {
        let (a, b) = (ly.eval(p)?, y.eval(p)?);
        num += a * b;
        den += b * b;
    }
    Ok(num / den)
}

/// Weight of every component of a horizon form, per slot.
pub fn component_weights(h: &HorizonForm) -> BTreeMap<String, Option<i32>> {
    h.slots()
        .into_iter()
        .filter(|(_, _, c)| !c.is_zero())
        .map(|(comp, m, c)| (format!("{comp}.{}", render_e(&Form::monomial(2, m, ScalarExpr::one()))), c.t_monomial().map(|(p, _)| p)))
        .collect()
}

/// Rotation `varphi -> varphi + alpha` of every component.
pub fn rotate(h: &HorizonForm, alpha: f64) -> HorizonForm {
    let shifted = ScalarExpr::coord(1) + alpha;
    HorizonForm::from_coframe_form(&h.to_coframe_form().substitute(Var::Base(1), &shifted))
}

/// Rescaling `t -> c t`.
pub fn rescale_time(h: &HorizonForm, c: f64) -> HorizonForm {
    HorizonForm::from_coframe_form(&h.to_coframe_form().substitute(Var::Fibre, &(ScalarExpr::fibre() * c)))
}

/// `t^lambda` times a random trigonometric polynomial in `(vartheta, varphi)`.
pub fn random_component<R: rand::Rng>(rng: &mut R, lambda_max: u32) -> ScalarExpr {
    let th = ScalarExpr::coord(0);
    let ph = ScalarExpr::coord(1);
    let count = rng.gen_range(1..=3);
    let terms: Vec<ScalarExpr> = (0..count).map(|_| {
        let c = rng.gen_range(-8..=8) as f64 / 4.0;
        let a = th.cos().powi(rng.gen_range(0..=2));
        let b = th.sin().powi(rng.gen_range(0..=2));
        let m = rng.gen_range(0..=2) as f64;
        let az = if rng.gen_bool(0.5) { (&ph * m).cos() } else { (&ph * m).sin() };
        a * b * az * if c == 0.0 { 0.5 } else { c }
    }).collect();
    ScalarExpr::fibre().powi(rng.gen_range(0..=lambda_max) as i32) * ScalarExpr::sum(terms)
}

/// Random degree-`k` horizon form with every component from [`random_component`].
pub fn random_form<R: rand::Rng>(rng: &mut R, degree: usize, lambda_max: u32) -> HorizonForm {
    let mut c = || random_component(rng, lambda_max);
    match degree {
        0 => HorizonForm::function(c()),
        1 => HorizonForm::one_form([c(), c()], c()),
        2 => HorizonForm::two_form(c(), [c(), c()]),
        _ => HorizonForm::three_form(c()),
    }
}

/// Stack-versus-table check on `cases` random forms per degree 0..=3.
pub fn laplacian_table_suite(kappa: f64, cases: usize, seed: u64, samples: &[Point], tol: f64) -> Result<Vec<crate::report::Record>> {
    let hb = HorizonBundle::new(kappa)?;
    let mut out = Vec::new();
    for degree in 0..=3 {
        let mut rng = crate::random::rng(seed ^ (degree as u64) << 40);
        let forms: Vec<HorizonForm> = (0..cases).map(|_| random_form(&mut rng, degree, 3)).collect();
        let checks: Vec<Result<LaplacianCheck>> = forms.par_iter().map(|f| verify_laplacian_table(f, &hb, samples, tol)).collect();
        let mut worst = (0.0, None, 0usize);
        for c in checks {
            let c = c?;
            if !c.pass {
                worst.2 += 1;
            }
            if c.max_deviation > worst.0 || worst.1.is_none() {
                worst = (c.max_deviation, c.witness, worst.2);
            }
        }
        let case = format!("kappa={kappa} degree {degree}: stack = table ({} of {cases} forms disagree)", worst.2);
        out.push(crate::report::Record::check("horizon-laplacian", case, worst.0, tol, worst.1));
    }
    Ok(out)
}
