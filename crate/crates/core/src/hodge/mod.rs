//! The Lorentzian metric `G`, Hodge star, codifferential and Hodge-de Rham
//! Laplacian on a Carrollian bundle.
//!
//! Everything is computed in the mixed coframe `{dx^a, theta}`, ordered with
//! `theta` last, where `G = blockdiag(g_M, -1)` and
//! `Vol_P = sqrt(det g_M) dx^1 ^ .. ^ dx^n ^ theta = (-1)^n theta ^ Vol_M`.
//! Inner products of k-forms are Gram determinants of `G^-1` in the basis of
//! increasing monomials (no `1/k!`).

mod metric;

use nalgebra::DMatrix;

pub use metric::MetricG;

use crate::error::{Error, Result};
use crate::forms::{CarrollBundle, Form, Monomial};
use crate::scalar::{Point, ScalarExpr};

/// Default threshold below which a sampled form counts as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// `(-1)^{1 + k(n+1-k)}`: the sign of `**` on k-forms, and of `delta`.
pub fn star_sign(n: usize, k: usize) -> f64 {
    if (1 + k * (n + 1 - k)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_dim(b: &CarrollBundle, xi: &Form) -> Result<()> {
    if xi.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("form over dim {}, bundle over dim {}", xi.dim(), b.dim())));
    }
    Ok(())
}

pub fn volume_form(b: &CarrollBundle) -> Form {
    let n = b.dim();
    Form::monomial(n, Monomial::top(n), b.metric().sqrt_det().clone())
}

/// Base volume `sqrt(det g_M) dx^1 ^ .. ^ dx^n`.
pub fn base_volume_form(b: &CarrollBundle) -> Form {
    let n = b.dim();
    Form::monomial(n, Monomial::base_top(n), b.metric().sqrt_det().clone())
}

/// Full `(n+1) x (n+1)` inverse of `G` at `p`, evaluated numerically.
pub fn inverse_metric_at(b: &CarrollBundle, p: &Point) -> Result<DMatrix<f64>> {
    let n = b.dim();
    let g = b.metric().base_matrix_at(p)?;
    let inv = g
        .try_inverse()
        .ok_or_else(|| Error::InvalidBundle(format!("metric is singular at {p}")))?;
    let mut out = DMatrix::zeros(n + 1, n + 1);
    out.view_mut((0, 0), (n, n)).copy_from(&inv);
    out[(n, n)] = -1.0;
    Ok(out)
}

/// `G` in the coordinate coframe `{dx^a, dt}` at `p`.
///
/// Only meant as a cross-check: its entries carry `1/t` and `1/t^2`.
pub fn coordinate_metric_at(b: &CarrollBundle, p: &Point) -> Result<DMatrix<f64>> {
    let n = b.dim();
    let g = b.metric().base_matrix_at(p)?;
    let a: Vec<f64> = b.connection().iter().map(|c| c.eval(p)).collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = g[(i, j)] - a[i] * a[j];
        }
        m[(i, n)] = -a[i] / p.t;
        m[(n, i)] = -a[i] / p.t;
    }
    m[(n, n)] = -1.0 / (p.t * p.t);
    Ok(m)
}

fn monomial_slots(m: Monomial, n: usize) -> Vec<usize> {
    let mut v = m.base_indices();
    if m.has_theta() {
        v.push(n);
    }
    v
}

/// Pointwise `<xi, eta>_G`, evaluated numerically from `G^-1` at `p`.
///
/// Independent of the symbolic path used by [`star`].
pub fn inner_product(xi: &Form, eta: &Form, b: &CarrollBundle, p: &Point) -> Result<f64> {
    check_dim(b, xi)?;
    check_dim(b, eta)?;
    if xi.degree() != eta.degree() {
        return Err(Error::Degree(format!("inner product of a {}-form and a {}-form", xi.degree(), eta.degree())));
    }
    let n = b.dim();
    let ginv = inverse_metric_at(b, p)?;
    let xv = xi.eval(p)?;
    let ev = eta.eval(p)?;
    let mut acc = 0.0;
    for (mi, ci) in &xv {
        let rows = monomial_slots(*mi, n);
        for (mj, cj) in &ev {
            let cols = monomial_slots(*mj, n);
            let k = rows.len();
            let gram = if k == 0 {
                1.0
            } else {
                DMatrix::from_fn(k, k, |r, c| ginv[(rows[r], cols[c])]).determinant()
            };
            acc += ci * cj * gram;
        }
    }
    Ok(acc)
}

/// Hodge star: the unique `*xi` with `eta ^ *xi = <eta, xi>_G Vol_P`.
pub fn star(xi: &Form, b: &CarrollBundle) -> Result<Form> {
    check_dim(b, xi)?;
    let n = b.dim();
    let k = xi.degree();
    let g = b.metric();
    let root = g.sqrt_det();
    let mut acc: Vec<(Monomial, ScalarExpr)> = Vec::new();
    let candidates = Monomial::all_of_degree(n, k);
    for (mi, ci) in xi.terms() {
        let targets: Vec<Monomial> = if g.is_diagonal() {
            vec![*mi]
        } else {
            candidates.iter().copied().filter(|l| l.has_theta() == mi.has_theta()).collect()
        };
        for l in targets {
            let gram = g.gram(l, *mi);
            if gram.is_zero() {
                continue;
            }
            let lc = l.complement(n);
            let (sign, _) = l.wedge(lc).expect("complementary monomials");
            acc.push((lc, (ci * &gram * root).scaled(sign)));
        }
    }
    Form::from_terms(n, n + 1 - k, acc)
}

/// Riemannian star of `(M, g_M)` applied fibrewise to a horizontal form.
pub fn base_star(xi: &Form, b: &CarrollBundle) -> Result<Form> {
    check_dim(b, xi)?;
    if !xi.is_horizontal() {
        return Err(Error::NotHorizontal);
    }
    let n = b.dim();
    let k = xi.degree();
    if k > n {
        return Ok(Form::zero(n, 0));
    }
    let g = b.metric();
    let root = g.sqrt_det();
    let mut acc = Vec::new();
    let candidates = Monomial::horizontal_of_degree(n, k);
    for (mi, ci) in xi.terms() {
        let targets = if g.is_diagonal() { vec![*mi] } else { candidates.clone() };
        for l in targets {
            let gram = g.base_gram(l, *mi);
            if gram.is_zero() {
                continue;
            }
            let lc = l.base_complement(n);
            let (sign, _) = l.wedge(lc).expect("complementary monomials");
            acc.push((lc, (ci * &gram * root).scaled(sign)));
        }
    }
    Form::from_terms(n, n - k, acc)
}

/// `delta xi = (-1)^{1 + k(n+1-k)} * d * xi`; zero on 0-forms.
pub fn codifferential(xi: &Form, b: &CarrollBundle) -> Result<Form> {
    check_dim(b, xi)?;
    let n = b.dim();
    let k = xi.degree();
    if k == 0 {
        return Ok(Form::zero(n, 0));
    }
    let inner = b.exterior_derivative(&star(xi, b)?)?;
    Ok(star(&inner, b)?.scale(&ScalarExpr::constant(star_sign(n, k))))
}

/// `Delta = d delta + delta d`.
pub fn laplacian(xi: &Form, b: &CarrollBundle) -> Result<Form> {
    check_dim(b, xi)?;
    let n = b.dim();
    let k = xi.degree();
    let mut out = Form::zero(n, k);
    if k > 0 {
        out = out + b.exterior_derivative(&codifferential(xi, b)?)?;
    }
    if k <= n {
        out = out + codifferential(&b.exterior_derivative(xi)?, b)?;
    }
    Ok(out)
}

/// Sampled verdicts of [`classify`] with the residuals behind them.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub closed: bool,
    pub coclosed: bool,
    pub harmonic: bool,
    pub d_residual: f64,
    pub delta_residual: f64,
    pub laplacian_residual: f64,
}

impl Classification {
    /// Closed and coclosed forms must be harmonic; the converse may fail.
    pub fn is_consistent(&self) -> bool {
        !(self.closed && self.coclosed) || self.harmonic
    }
}

pub fn classify(xi: &Form, b: &CarrollBundle, samples: &[Point], tol: f64) -> Result<Classification> {
    let n = b.dim();
    let d_residual = if xi.degree() > n {
        0.0
    } else {
        b.exterior_derivative(xi)?.max_abs(samples)?.0
    };
    let delta_residual = codifferential(xi, b)?.max_abs(samples)?.0;
    let laplacian_residual = laplacian(xi, b)?.max_abs(samples)?.0;
    Ok(Classification {
        closed: d_residual < tol,
        coclosed: delta_residual < tol,
        harmonic: laplacian_residual < tol,
        d_residual,
        delta_residual,
        laplacian_residual,
    })
}
