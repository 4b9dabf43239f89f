//! Differential forms on `P` in the mixed coframe `{dx^a, theta}`.
//!
//! A [`Form`] stores one [`ScalarExpr`] coefficient per basis [`Monomial`].
//! Everything that only needs the coframe algebra (wedge, the Euler
//! contraction, the Lie derivative along the Euler field, the
//! horizontal/vertical split) lives on `Form`; the exterior and covariant
//! derivatives need the connection and live on [`CarrollBundle`].

mod bundle;
mod monomial;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

pub use bundle::CarrollBundle;
pub use monomial::Monomial;

use crate::error::{Error, Result};
use crate::scalar::parse::{parse_ast, Ast};
use crate::scalar::{parse::lower_scalar, Point, ScalarExpr, Tape, Var};

/// Eigenvalue of the Lie derivative along the Euler field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    /// The zero form is homogeneous of every weight.
    Any,
    Homogeneous(f64),
    NonHomogeneous,
}

/// Differential form of fixed degree on a bundle with `dim`-dimensional base.
#[derive(Clone, PartialEq)]
pub struct Form {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Monomial, ScalarExpr>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(degree <= dim + 1, "degree {degree} exceeds dim P = {}", dim + 1);
        Form { dim, degree, terms: BTreeMap::new() }
    }

    /// A 0-form.
    pub fn scalar(dim: usize, f: ScalarExpr) -> Self {
        Form::monomial(dim, Monomial::one(), f)
    }

    pub fn monomial(dim: usize, m: Monomial, coeff: ScalarExpr) -> Self {
        assert!(m.fits(dim), "monomial {m} does not fit a base of dimension {dim}");
        let mut f = Form::zero(dim, m.degree());
        f.accumulate(m, coeff);
        f
    }

    pub fn dx(dim: usize, axis: usize) -> Self {
        Form::monomial(dim, Monomial::dx(axis), ScalarExpr::one())
    }

    pub fn theta(dim: usize) -> Self {
        Form::monomial(dim, Monomial::theta(), ScalarExpr::one())
    }

    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, ScalarExpr)>,
    {
        if degree > dim + 1 {
            return Err(Error::Degree(format!("degree {degree} exceeds dim P = {}", dim + 1)));
        }
        let mut f = Form::zero(dim, degree);
        for (m, c) in terms {
            if m.degree() != degree {
                return Err(Error::Degree(format!("monomial {m} has degree {}, expected {degree}", m.degree())));
            }
            if !m.fits(dim) {
                return Err(Error::DimensionMismatch(format!("monomial {m} does not fit dim {dim}")));
            }
            f.accumulate(m, c);
        }
        Ok(f)
    }

    /// Parses the textual form syntax, e.g. `t^2*dx1^dx2 + sin(x1)*th^dx1`.
    pub fn parse(src: &str, dim: usize) -> Result<Form> {
        let form = lower_form(&parse_ast(src)?, dim)?;
        for c in form.terms.values() {
            if let Some(a) = c.max_axis() {
                if a >= dim {
                    return Err(Error::DimensionMismatch(format!("coordinate x{} used on a {dim}-dimensional base", a + 1)));
                }
            }
        }
        Ok(form)
    }

    fn accumulate(&mut self, m: Monomial, c: ScalarExpr) {
        let slot = self.terms.remove(&m).map(|old| old + &c).unwrap_or(c);
        if !slot.is_zero() {
            self.terms.insert(m, slot);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> ScalarExpr {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    /// For a 0-form, its function.
    pub fn as_function(&self) -> Option<ScalarExpr> {
        (self.degree == 0).then(|| self.coeff(Monomial::one()))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Monomial, &ScalarExpr) -> ScalarExpr) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        for (m, c) in &self.terms {
            out.accumulate(*m, f(m, c));
        }
        out
    }

    pub fn scale(&self, s: &ScalarExpr) -> Form {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn substitute(&self, var: Var, with: &ScalarExpr) -> Form {
        self.map_coeffs(|_, c| c.substitute(var, with))
    }

    fn check_same(&self, other: &Form) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("base dimensions {} and {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Form) -> Result<Form> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!("cannot add a {}-form and a {}-form", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        Ok(out)
    }

    /// Exterior product. Degrees beyond `dim + 1` give `Ok(None)`.
    pub fn try_wedge(&self, other: &Form) -> Result<Option<Form>> {
        self.check_same(other)?;
        let degree = self.degree + other.degree;
        if degree > self.dim + 1 {
            return Ok(None);
        }
        let mut out = Form::zero(self.dim, degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, m)) = ma.wedge(*mb) {
                    out.accumulate(m, (ca * cb).scaled(sign));
                }
            }
        }
        Ok(Some(out))
    }

    /// Exterior product; panics when the total degree exceeds `dim + 1`.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.try_wedge(other)?
            .ok_or_else(|| Error::Degree(format!("wedge of degree {} exceeds dim P", self.degree + other.degree)))
    }

    /// `(horizontal, vertical)` parts: monomials without and with `theta`.
    pub fn decompose(&self) -> (Form, Form) {
        let mut h = Form::zero(self.dim, self.degree);
        let mut v = Form::zero(self.dim, self.degree);
        for (m, c) in &self.terms {
            if m.has_theta() {
                v.accumulate(*m, c.clone());
            } else {
                h.accumulate(*m, c.clone());
            }
        }
        (h, v)
    }

    /// Structurally horizontal: no `theta` monomial.
    pub fn is_horizontal(&self) -> bool {
        self.terms.keys().all(|m| !m.has_theta())
    }

    pub fn is_vertical(&self) -> bool {
        self.terms.keys().all(|m| m.has_theta())
    }

    /// Horizontal `beta` with `self = theta ^ beta`, when `self` is vertical.
    pub fn theta_factor(&self) -> Option<Form> {
        if !self.is_vertical() || self.degree == 0 {
            return None;
        }
        // theta ^ dx^I = (-1)^|I| dx^I ^ theta
        let sign = if (self.degree - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = Form::zero(self.dim, self.degree - 1);
        for (m, c) in &self.terms {
            out.accumulate(m.horizontal_part(), c.scaled(sign));
        }
        Some(out)
    }

    /// Contraction with the Euler field: `i(theta) = 1`, `i(dx^a) = 0`.
    pub fn interior_euler(&self) -> Result<Form> {
        if self.degree == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        let mut out = Form::zero(self.dim, self.degree - 1);
        for (m, c) in &self.terms {
            if m.has_theta() {
                let sign = if m.base_degree() % 2 == 0 { 1.0 } else { -1.0 };
                out.accumulate(m.horizontal_part(), c.scaled(sign));
            }
        }
        Ok(out)
    }

    /// Lie derivative along the Euler field. `theta` and `dx^a` are
    /// invariant, so it acts as `t d/dt` on every coefficient.
    pub fn lie_euler(&self) -> Form {
        self.map_coeffs(|_, c| c.euler_derivative())
    }

    /// Compiles all coefficients into one evaluation tape.
    pub fn compile(&self) -> FormTape {
        let (monomials, coeffs): (Vec<Monomial>, Vec<ScalarExpr>) =
            self.terms.iter().map(|(m, c)| (*m, c.clone())).unzip();
        FormTape { monomials, tape: Tape::compile(&coeffs) }
    }

    pub fn eval(&self, p: &Point) -> Result<BTreeMap<Monomial, f64>> {
        self.compile().eval(p)
    }

    /// Largest |coefficient| over the samples and where it occurs.
    pub fn max_abs(&self, samples: &[Point]) -> Result<(f64, Option<Point>)> {
        self.compile().max_abs(samples)
    }

    /// Largest pointwise coefficient difference to `other`.
    pub fn max_deviation(&self, other: &Form, samples: &[Point]) -> Result<(f64, Option<Point>)> {
        (self.clone() - other.clone()).max_abs(samples)
    }

    pub fn vanishes_on(&self, samples: &[Point], tol: f64) -> Result<bool> {
        Ok(self.max_abs(samples)?.0 < tol)
    }

    /// Weight of a homogeneous form.
    ///
    /// First tries the structural test (each coefficient a single
    /// t-monomial, all of the same power); otherwise estimates a candidate
    /// ratio at the largest sample. Either candidate is confirmed pointwise.
    pub fn weight(&self, samples: &[Point]) -> Result<Weight> {
        if self.terms.is_empty() {
            return Ok(Weight::Any);
        }
        let structural = self
            .terms
            .values()
            .map(|c| c.t_monomial().map(|(p, _)| p))
            .collect::<Option<Vec<i32>>>()
            .filter(|ps| ps.windows(2).all(|w| w[0] == w[1]))
            .map(|ps| ps[0] as f64);
        let lie = self.lie_euler();
        let candidate = match structural {
            Some(l) => Some(l),
            None => {
                let mut best: Option<(f64, f64)> = None;
                let (here_tape, there_tape) = (self.compile(), lie.compile());
                for p in samples {
                    let here = here_tape.eval(p)?;
                    let there = there_tape.eval(p)?;
                    for (m, v) in &here {
                        if best.is_none_or(|(b, _)| v.abs() > b.abs()) {
                            best = Some((*v, there.get(m).copied().unwrap_or(0.0)));
                        }
                    }
                }
                best.filter(|(v, _)| *v != 0.0).map(|(v, lv)| lv / v)
            }
        };
        let Some(lambda) = candidate else {
            return Ok(Weight::NonHomogeneous);
        };
        let residual = lie - self.scale(&ScalarExpr::constant(lambda));
        let scale = self.max_abs(samples)?.0.max(1.0);
        if residual.max_abs(samples)?.0 <= 1e-9 * scale {
            Ok(Weight::Homogeneous(lambda))
        } else {
            Ok(Weight::NonHomogeneous)
        }
    }

    /// Renders with caller-chosen generator names.
    pub fn render(&self, base_name: impl Fn(usize) -> String + Copy, theta_name: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let basis = m.render(base_name, theta_name);
            let coef = c.to_string();
            let term = if m.degree() == 0 {
                coef
            } else if c.is_one() {
                basis
            } else if c.as_const() == Some(-1.0) {
                format!("-{basis}")
            } else if matches!(c.node(), crate::scalar::Node::Sum(_)) {
                format!("({coef})*{basis}")
            } else {
                format!("{coef}*{basis}")
            };
            parts.push(term);
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        out
    }
}

/// A form's coefficients compiled for repeated evaluation.
#[derive(Clone, Debug)]
pub struct FormTape {
    monomials: Vec<Monomial>,
    tape: Tape,
}

impl FormTape {
    pub fn eval(&self, p: &Point) -> Result<BTreeMap<Monomial, f64>> {
        Ok(self.monomials.iter().copied().zip(self.tape.eval(p)?).collect())
    }

    pub fn max_abs(&self, samples: &[Point]) -> Result<(f64, Option<Point>)> {
        let mut best = 0.0;
        let mut at = None;
        let mut buf = Vec::new();
        for p in samples {
            self.tape.eval_into(p, &mut buf)?;
            for v in self.tape.outputs(&buf) {
                if at.is_none() || v.abs() > best {
                    best = v.abs();
                    at = Some(p.clone());
                }
            }
        }
        Ok((best, at))
    }
}

fn lower_form(ast: &Ast, dim: usize) -> Result<Form> {
    let bad = |msg: String| Error::Parse { pos: 0, msg };
    let scalar_of = |f: &Form| -> Result<ScalarExpr> {
        f.as_function().ok_or_else(|| bad("expected a function, found a form of positive degree".into()))
    };
    Ok(match ast {
        Ast::Dx(a) => {
            if *a >= dim {
                return Err(Error::DimensionMismatch(format!("dx{} on a {dim}-dimensional base", a + 1)));
            }
            Form::dx(dim, *a)
        }
        Ast::Theta => Form::theta(dim),
        Ast::Num(_) | Ast::Var(_) => Form::scalar(dim, lower_scalar(ast)?),
        Ast::Neg(a) => -lower_form(a, dim)?,
        Ast::Add(a, b) => lower_form(a, dim)?.checked_add(&lower_form(b, dim)?)?,
        Ast::Sub(a, b) => lower_form(a, dim)?.checked_add(&-lower_form(b, dim)?)?,
        Ast::Mul(a, b) | Ast::Wedge(a, b) => lower_form(a, dim)?.wedge(&lower_form(b, dim)?)?,
        Ast::Div(a, b) => {
            let den = scalar_of(&lower_form(b, dim)?)?;
            lower_form(a, dim)?.scale(&den.recip())
        }
        Ast::Pow(a, n) => Form::scalar(dim, scalar_of(&lower_form(a, dim)?)?.powi(*n)),
        Ast::Call(f, a) => Form::scalar(dim, ScalarExpr::apply(*f, scalar_of(&lower_form(a, dim)?)?)),
    })
}

impl Add for Form {
    type Output = Form;
    /// Panics on mismatched dimension or degree; see [`Form::checked_add`].
    fn add(self, rhs: Form) -> Form {
        self.checked_add(&rhs).expect("form addition")
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        self.checked_add(&-rhs).expect("form subtraction")
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.map_coeffs(|_, c| -c)
    }
}

impl Form {
    /// Display form cut to about 80 characters, for witnesses.
    pub fn brief(&self) -> String {
        let s = self.to_string();
        match s.char_indices().nth(80) {
            Some((i, _)) => format!("{}...", &s[..i]),
            None => s,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|i| format!("dx{}", i + 1), "th"))
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[n={}, k={}]({self})", self.dim, self.degree)
    }
}
