//! Calculus on the round sphere of radius `(2 kappa)^-1` in the chart
//! `(vartheta, varphi)`, written out by hand in coordinate components.
//!
//! Nothing here goes through the Hodge star of [`crate::hodge`]; it is the
//! independent side of the horizon Laplacian table. The metric is
//! `c^2 (dvartheta^2 + sin^2 vartheta dvarphi^2)` with `c = (2 kappa)^-1`.
//! One-forms are `[a, b] = a dvartheta + b dvarphi`, two-forms are the
//! coefficient of `dvartheta ^ dvarphi`.

use crate::error::{Error, Result};
use crate::scalar::{ScalarExpr, Var};

const TH: Var = Var::Base(0);
const PH: Var = Var::Base(1);

pub type OneForm = [ScalarExpr; 2];

/// Coordinate calculus for one value of `kappa`.
#[derive(Clone, Debug)]
pub struct Sphere {
    /// `(2 kappa)^2 = 1/c^2`
    k2: f64,
    sin: ScalarExpr,
}

impl Sphere {
    pub fn new(kappa: f64) -> Self {
        Sphere { k2: (2.0 * kappa).powi(2), sin: ScalarExpr::coord(0).sin() }
    }

    pub fn theta() -> ScalarExpr {
        ScalarExpr::coord(0)
    }

    pub fn phi() -> ScalarExpr {
        ScalarExpr::coord(1)
    }

    pub fn d0(&self, f: &ScalarExpr) -> OneForm {
        [f.partial(TH), f.partial(PH)]
    }

    pub fn d1(&self, w: &OneForm) -> ScalarExpr {
        w[1].partial(TH) - w[0].partial(PH)
    }

    /// `(2k)^2 (1/sin d_th(sin a) + 1/sin^2 d_ph b)`.
    pub fn div(&self, w: &OneForm) -> ScalarExpr {
        let s = &self.sin;
        let first = (s * &w[0]).partial(TH) / s;
        let second = w[1].partial(PH) / s.powi(2);
        (first + second) * self.k2
    }

    /// The printed one-form variant of the divergence, keeping each term on
    /// its own coordinate differential.
    pub fn div_split(&self, w: &OneForm) -> OneForm {
        let s = &self.sin;
        [(s * &w[0]).partial(TH) / s * self.k2, w[1].partial(PH) / s.powi(2) * self.k2]
    }

    /// Riemannian codifferential on one-forms: `-div`.
    pub fn delta1(&self, w: &OneForm) -> ScalarExpr {
        -self.div(w)
    }

    /// Riemannian codifferential on two-forms `w dth ^ dph`: with
    /// `h = w / (c^2 sin)`, `delta = (h_ph / sin) dth - (h_th sin) dph`.
    pub fn delta2(&self, w: &ScalarExpr) -> OneForm {
        let h = w * self.k2 / &self.sin;
        [h.partial(PH) / &self.sin, -(h.partial(TH) * &self.sin)]
    }

    /// Non-negative Hodge-de Rham Laplacians `d delta + delta d` of the
    /// sphere.
    pub fn hdr0(&self, f: &ScalarExpr) -> ScalarExpr {
        self.delta1(&self.d0(f))
    }

    pub fn hdr1(&self, w: &OneForm) -> OneForm {
        let a = self.d0(&self.delta1(w));
        let b = self.delta2(&self.d1(w));
        [&a[0] + &b[0], &a[1] + &b[1]]
    }

    pub fn hdr2(&self, w: &ScalarExpr) -> ScalarExpr {
        self.d1(&self.delta2(w))
    }

    /// `Delta_{S^2}` in the sign of record: the operator that the full stack
    /// induces on t-independent functions, i.e. `-(d delta + delta d)`,
    /// extended to every degree with the same sign.
    pub fn lap0(&self, f: &ScalarExpr) -> ScalarExpr {
        -self.hdr0(f)
    }

    pub fn lap1(&self, w: &OneForm) -> OneForm {
        let h = self.hdr1(w);
        [-&h[0], -&h[1]]
    }

    pub fn lap2(&self, w: &ScalarExpr) -> ScalarExpr {
        -self.hdr2(w)
    }
}

fn legendre(l: usize) -> Vec<f64> {
    // ascending coefficients of P_l(x)
    match l {
        0 => vec![1.0],
        1 => vec![0.0, 1.0],
        2 => vec![-0.5, 0.0, 1.5],
        3 => vec![0.0, -1.5, 0.0, 2.5],
        4 => vec![0.375, 0.0, -3.75, 0.0, 4.375],
        _ => unreachable!(),
    }
}

/// Real spherical harmonic of degree `l <= 4` and order `m`, unnormalised:
/// `sin^|m| th * P_l^(|m|)(cos th) * (cos(m ph) for m >= 0, sin(|m| ph) for m < 0)`.
pub fn spherical_harmonic(l: usize, m: i32) -> Result<ScalarExpr> {
    if l > 4 {
        return Err(Error::Unsupported(format!("spherical harmonics are tabulated up to l = 4, got l = {l}")));
    }
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Err(Error::Unsupported(format!("order |m| = {am} exceeds l = {l}")));
    }
    let mut poly = legendre(l);
    for _ in 0..am {
        poly = poly.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    }
    let x = Sphere::theta().cos();
    let assoc = ScalarExpr::sum(poly.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(i, c)| x.powi(i as i32) * *c));
    let angular = Sphere::theta().sin().powi(am as i32) * assoc;
    let azimuthal = if m > 0 {
        (Sphere::phi() * m as f64).cos()
    } else if m < 0 {
        (Sphere::phi() * am as f64).sin()
    } else {
        ScalarExpr::one()
    };
    Ok(angular * azimuthal)
}
