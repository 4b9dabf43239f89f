use std::sync::Arc;

use nalgebra::DMatrix;

use super::{Form, Monomial};
use crate::error::{Error, Result};
use crate::hodge::MetricG;
use crate::scalar::{SampleBox, ScalarExpr, Var};

/// Number of sample points used to check positive-definiteness of `g_M`.
const PD_SAMPLES: usize = 64;

/// Local model `U x R^x` of a Carrollian `R^x`-bundle with connection
/// `theta = dt/t + A_a dx^a` and base metric `g_M`.
#[derive(Clone, Debug)]
pub struct CarrollBundle {
    dim: usize,
    connection: Vec<ScalarExpr>,
    domain: SampleBox,
    geometry: Arc<MetricG>,
    curvature: Form,
}

impl CarrollBundle {
    /// Validates on the default domain `[-1, 1]^n`.
    pub fn new(metric: Vec<Vec<ScalarExpr>>, connection: Vec<ScalarExpr>) -> Result<Self> {
        let n = metric.len();
        Self::with_domain(metric, connection, SampleBox::unit(n))
    }

    pub fn with_domain(metric: Vec<Vec<ScalarExpr>>, connection: Vec<ScalarExpr>, domain: SampleBox) -> Result<Self> {
        let n = metric.len();
        if n == 0 {
            return Err(Error::InvalidBundle("the base must have dimension at least 1".into()));
        }
        if n > Monomial::MAX_DIM {
            return Err(Error::InvalidBundle(format!("base dimension {n} exceeds {}", Monomial::MAX_DIM)));
        }
        if metric.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidBundle("metric must be a square matrix".into()));
        }
        if connection.len() != n {
            return Err(Error::InvalidBundle(format!("{} connection components for a base of dimension {n}", connection.len())));
        }
        if domain.dim() != n {
            return Err(Error::InvalidBundle(format!("sampling box has {} axes, expected {n}", domain.dim())));
        }
        let all = metric.iter().flatten().chain(&connection);
        for e in all {
            if e.depends_on(Var::Fibre) {
                return Err(Error::InvalidBundle(format!("`{e}` depends on t")));
            }
            if e.max_axis().is_some_and(|a| a >= n) {
                return Err(Error::InvalidBundle(format!("`{e}` uses a coordinate outside the chart")));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if metric[a][b] != metric[b][a] {
                    return Err(Error::InvalidBundle(format!("metric is not symmetric at ({}, {})", a + 1, b + 1)));
                }
            }
        }
        for p in domain.points(PD_SAMPLES, 0x9d) {
            let mut m = DMatrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    m[(a, b)] = metric[a][b].eval(&p)?;
                }
            }
            if m.cholesky().is_none() {
                return Err(Error::InvalidBundle(format!("metric is not positive-definite at {p}")));
            }
        }
        let geometry = Arc::new(MetricG::new(metric));
        let mut curvature = Form::zero(n, 2);
        for (b, ab) in connection.iter().enumerate() {
            for a in 0..n {
                let da = ab.partial(Var::Base(a));
                if !da.is_zero() {
                    let term = Form::dx(n, a).wedge(&Form::dx(n, b))?.scale(&da);
                    curvature = curvature + term;
                }
            }
        }
        Ok(CarrollBundle { dim: n, connection, domain, geometry, curvature })
    }

    /// Flat metric, trivial connection.
    pub fn flat(n: usize) -> Result<Self> {
        let metric = (0..n)
            .map(|a| (0..n).map(|b| if a == b { ScalarExpr::one() } else { ScalarExpr::zero() }).collect())
            .collect();
        Self::new(metric, vec![ScalarExpr::zero(); n])
    }

    /// Flat metric with the given connection.
    pub fn flat_with_connection(connection: Vec<ScalarExpr>) -> Result<Self> {
        let n = connection.len();
        let flat = Self::flat(n)?;
        Self::new(flat.geometry.base_metric().to_vec(), connection)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &MetricG {
        &self.geometry
    }

    pub fn connection(&self) -> &[ScalarExpr] {
        &self.connection
    }

    pub fn domain(&self) -> &SampleBox {
        &self.domain
    }

    /// `F = d theta = dA`.
    pub fn curvature(&self) -> &Form {
        &self.curvature
    }

    pub fn is_flat_connection(&self) -> bool {
        self.curvature.is_empty()
    }

    fn check(&self, xi: &Form) -> Result<()> {
        if xi.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!("form over dim {}, bundle over dim {}", xi.dim(), self.dim)));
        }
        Ok(())
    }

    /// `df = sum_a (d_a f - A_a L f) dx^a + (L f) theta` with `L = t d/dt`.
    pub fn differential(&self, f: &ScalarExpr) -> Form {
        let n = self.dim;
        let lf = f.euler_derivative();
        let mut terms = Vec::with_capacity(n + 1);
        for a in 0..n {
            let c = f.partial(Var::Base(a)) - &self.connection[a] * &lf;
            terms.push((Monomial::dx(a), c));
        }
        terms.push((Monomial::theta(), lf));
        Form::from_terms(n, 1, terms).expect("well-formed differential")
    }

    /// Exterior derivative in the mixed coframe.
    ///
    /// `d(f m) = df ^ m + f dm` where `dm` only sees `d theta = F`.
    pub fn exterior_derivative(&self, xi: &Form) -> Result<Form> {
        self.check(xi)?;
        let n = self.dim;
        if xi.degree() > n {
            return Err(Error::Degree(format!("d of a {}-form on a {}-dimensional total space", xi.degree(), n + 1)));
        }
        let mut out = Form::zero(n, xi.degree() + 1);
        for (m, f) in xi.terms() {
            let basis = Form::monomial(n, *m, ScalarExpr::one());
            out = out + self.differential(f).wedge(&basis)?;
            if m.has_theta() && !self.curvature.is_empty() {
                // d(dx^I ^ theta) = (-1)^|I| dx^I ^ F
                let sign = if m.base_degree() % 2 == 0 { 1.0 } else { -1.0 };
                let h = Form::monomial(n, m.horizontal_part(), f.scaled(sign));
                out = out + h.wedge(&self.curvature)?;
            }
        }
        Ok(out)
    }

    /// `D = d - theta ^ L` on horizontal forms.
    pub fn covariant_derivative(&self, xi: &Form) -> Result<Form> {
        self.check(xi)?;
        if !xi.is_horizontal() {
            return Err(Error::NotHorizontal);
        }
        let n = self.dim;
        let mut out = Form::zero(n, xi.degree() + 1);
        for (m, f) in xi.terms() {
            let lf = f.euler_derivative();
            for a in 0..n {
                if let Some((sign, mm)) = Monomial::dx(a).wedge(*m) {
                    let c = f.partial(Var::Base(a)) - &self.connection[a] * &lf;
                    out = out + Form::monomial(n, mm, c.scaled(sign));
                }
            }
        }
        Ok(out)
    }

    /// Re-expresses `xi` in the coordinate coframe `{dx^a, dt}`: the
    /// theta-slot of the returned form stands for `dt`. Coefficients pick
    /// up `1/t`, so this is for display only.
    pub fn to_coordinate_coframe(&self, xi: &Form) -> Result<Form> {
        self.check(xi)?;
        let n = self.dim;
        let mut a = Form::zero(n, 1);
        for (i, ai) in self.connection.iter().enumerate() {
            a = a + Form::dx(n, i).scale(ai);
        }
        let t_inv = ScalarExpr::fibre().recip();
        let mut out = Form::zero(n, xi.degree());
        for (m, f) in xi.terms() {
            if m.has_theta() {
                let h = Form::monomial(n, m.horizontal_part(), f.clone());
                out = out + Form::monomial(n, *m, f * &t_inv) + h.wedge(&a)?;
            } else {
                out = out + Form::monomial(n, *m, f.clone());
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn s(e: &str) -> ScalarExpr {
        parse_scalar(e).unwrap()
    }

    #[test]
    fn rejects_bad_bundles() {
        assert!(CarrollBundle::flat(0).is_err());
        assert!(CarrollBundle::new(vec![vec![s("t")]], vec![s("0")]).is_err());
        assert!(CarrollBundle::new(vec![vec![s("-1")]], vec![s("0")]).is_err());
        assert!(CarrollBundle::new(vec![vec![s("1")]], vec![s("x2")]).is_err());
        assert!(CarrollBundle::new(vec![vec![s("1"), s("x1")], vec![s("0"), s("1")]], vec![s("0"), s("0")]).is_err());
        assert!(CarrollBundle::new(vec![vec![s("1")]], vec![]).is_err());
    }

    #[test]
    fn curvature_of_simple_connection() {
        let b = CarrollBundle::flat_with_connection(vec![s("0"), s("x1")]).unwrap();
        assert_eq!(b.curvature(), &Form::parse("dx1^dx2", 2).unwrap());
        assert!(CarrollBundle::flat(3).unwrap().curvature().is_empty());
    }

    #[test]
    fn d_of_t_and_theta() {
        let b = CarrollBundle::flat(2).unwrap();
        let dt = b.exterior_derivative(&Form::scalar(2, s("t"))).unwrap();
        assert_eq!(dt, Form::parse("t*th", 2).unwrap());
        let b = CarrollBundle::flat_with_connection(vec![s("x2"), s("0")]).unwrap();
        let dth = b.exterior_derivative(&Form::theta(2)).unwrap();
        assert_eq!(&dth, b.curvature());
        assert!(dth.is_horizontal());
        // dt = t theta - t A
        let dt = b.exterior_derivative(&Form::scalar(2, s("t"))).unwrap();
        assert_eq!(dt, Form::parse("t*th - t*x2*dx1", 2).unwrap());
    }

    #[test]
    fn covariant_derivative_examples() {
        let b = CarrollBundle::flat_with_connection(vec![s("x2"), s("x1^2")]).unwrap();
        let d = b.covariant_derivative(&Form::scalar(2, s("t"))).unwrap();
        assert_eq!(d, Form::parse("-t*x2*dx + -t*x1^2*dx2", 2).unwrap());
        assert!(matches!(b.covariant_derivative(&Form::theta(2)), Err(Error::NotHorizontal)));
        let flat = CarrollBundle::flat(2).unwrap();
        let d = flat.covariant_derivative(&Form::scalar(2, s("sin(x1)*x2"))).unwrap();
        assert_eq!(d, Form::parse("cos(x1)*x2*dx1 + sin(x1)*dx2", 2).unwrap());
    }

    #[test]
    fn top_degree_has_no_derivative() {
        let b = CarrollBundle::flat(1).unwrap();
        assert!(b.exterior_derivative(&Form::parse("dx1^th", 1).unwrap()).is_err());
    }

    #[test]
    fn coordinate_coframe_display() {
        let b = CarrollBundle::flat_with_connection(vec![s("x1")]).unwrap();
        let c = b.to_coordinate_coframe(&Form::theta(1)).unwrap();
        assert_eq!(c.render(|_| "dx".into(), "dt"), "x1*dx + 1/t*dt");
    }
}
