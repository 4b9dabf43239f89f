//! The randomized property suite behind `carroll verify`.
//!
//! Every case draws its own bundles and forms from a seed derived from
//! `(seed, n, case)`, so cases are independent, run in parallel and still
//! come back in a fixed order with reproducible witnesses.

use rayon::prelude::*;

use crate::error::Result;
use crate::forms::{CarrollBundle, Form, Weight};
use crate::hodge::{base_star, codifferential, inner_product, laplacian, star, star_sign, volume_form};
use crate::random;
use crate::report::Record;
use crate::scalar::Point;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    /// random (bundle, form) draws per case
    pub trials: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, samples: 24, tol: 1e-9, trials: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    StarStar,
    Defining,
    DSquared,
    DeltaSquared,
    LieD,
    LieStar,
    LieDelta,
    LieLaplacian,
    Weight,
    Swap,
    LocalStar,
    Interior,
    Cartan,
    Decompose,
    Covariant,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::StarStar => "star star = sign",
            Check::Defining => "eta ^ *xi = <eta, xi> vol",
            Check::DSquared => "d d = 0",
            Check::DeltaSquared => "delta delta = 0",
            Check::LieD => "L d = d L",
            Check::LieStar => "L * = * L",
            Check::LieDelta => "L delta = delta L",
            Check::LieLaplacian => "L Laplacian = Laplacian L",
            Check::Weight => "weight preserved by d, *, delta, Laplacian",
            Check::Swap => "* swaps horizontal and vertical",
            Check::LocalStar => "local formulas for * via *_M",
            Check::Interior => "i i = 0",
            Check::Cartan => "L = i d + d i",
            Check::Decompose => "horizontal + vertical = identity",
            Check::Covariant => "d = D + theta ^ L on horizontal forms",
        }
    }

    fn suite(self) -> &'static str {
        match self {
            Check::Interior | Check::Cartan | Check::Decompose | Check::Covariant | Check::DSquared | Check::LieD => "forms",
            _ => "hodge",
        }
    }
}

const CHECKS: [Check; 15] = [
    Check::StarStar,
    Check::Defining,
    Check::Swap,
    Check::LocalStar,
    Check::DeltaSquared,
    Check::LieStar,
    Check::LieDelta,
    Check::LieLaplacian,
    Check::Weight,
    Check::DSquared,
    Check::LieD,
    Check::Interior,
    Check::Cartan,
    Check::Decompose,
    Check::Covariant,
];

/// Largest deviation and where it happened.
#[derive(Clone, Debug, Default)]
struct Worst {
    dev: f64,
    at: Option<String>,
}

impl Worst {
    fn take(&mut self, dev: f64, at: impl FnOnce() -> String) {
        if dev > self.dev || (self.at.is_none() && dev.is_nan()) {
            self.dev = dev;
            self.at = Some(at());
        }
    }

    fn diff(&mut self, a: &Form, b: &Form, pts: &[Point], what: &str) -> Result<()> {
        let (d, p) = a.max_deviation(b, pts)?;
        self.take(d, || witness(what, p));
        Ok(())
    }

    fn zero(&mut self, a: &Form, pts: &[Point], what: &str) -> Result<()> {
        let (d, p) = a.max_abs(pts)?;
        self.take(d, || witness(what, p));
        Ok(())
    }
}

fn witness(what: &str, p: Option<Point>) -> String {
    match p {
        Some(p) => format!("{what} at {p}"),
        None => what.to_string(),
    }
}

fn case_seed(seed: u64, n: usize, case: usize, trial: usize) -> u64 {
    seed ^ (n as u64) << 48 ^ (case as u64) << 32 ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs every check for base dimension `n` at every degree.
pub fn property_suite(n: usize, opts: &SuiteOptions) -> Result<Vec<Record>> {
    let mut cases = Vec::new();
    for (ci, &check) in CHECKS.iter().enumerate() {
        for k in 0..=n + 1 {
            cases.push((ci, check, k));
        }
    }
    let out: Vec<Result<Record>> = cases
        .par_iter()
        .map(|&(ci, check, k)| {
            let mut worst = Worst::default();
            for trial in 0..opts.trials {
                run_case(check, n, k, case_seed(opts.seed, n, ci * 8 + k, trial), opts, &mut worst)?;
            }
            let case = format!("n={n} k={k}: {}", check.name());
            Ok(Record::check(check.suite(), case, worst.dev, opts.tol, worst.at))
        })
        .collect();
    out.into_iter().collect()
}

fn run_case(check: Check, n: usize, k: usize, seed: u64, opts: &SuiteOptions, worst: &mut Worst) -> Result<()> {
    let mut rng = random::rng(seed);
    let b = random::bundle(&mut rng, n, false)?;
    let pts = b.domain().points(opts.samples, seed);
    let xi = random::form(&mut rng, n, k);
    let lie = |f: &Form| f.lie_euler();
    match check {
        Check::StarStar => {
            let ss = star(&star(&xi, &b)?, &b)?;
            worst.diff(&ss, &xi.scale(&star_sign(n, k).into()), &pts, &format!("xi = {}", xi.brief()))?;
        }
        Check::Defining => defining_relation(&b, &xi, &pts, worst)?,
        Check::DSquared => {
            if k + 2 <= n + 1 {
                let dd = b.exterior_derivative(&b.exterior_derivative(&xi)?)?;
                worst.zero(&dd, &pts, &format!("xi = {}", xi.brief()))?;
            }
        }
        Check::DeltaSquared => {
            let dd = codifferential(&codifferential(&xi, &b)?, &b)?;
            worst.zero(&dd, &pts, &format!("xi = {}", xi.brief()))?;
        }
        Check::LieD => {
            if k <= n {
                worst.diff(&lie(&b.exterior_derivative(&xi)?), &b.exterior_derivative(&lie(&xi))?, &pts, "L d vs d L")?;
            }
        }
        Check::LieStar => worst.diff(&lie(&star(&xi, &b)?), &star(&lie(&xi), &b)?, &pts, "L * vs * L")?,
        Check::LieDelta => {
            worst.diff(&lie(&codifferential(&xi, &b)?), &codifferential(&lie(&xi), &b)?, &pts, "L delta vs delta L")?
        }
        Check::LieLaplacian => worst.diff(&lie(&laplacian(&xi, &b)?), &laplacian(&lie(&xi), &b)?, &pts, "L lap vs lap L")?,
        Check::Weight => {
            let lambda = rng_weight(seed);
            let h = random::homogeneous_form(&mut rng, n, k, lambda);
            let mut outs = vec![("*", star(&h, &b)?), ("delta", codifferential(&h, &b)?), ("laplacian", laplacian(&h, &b)?)];
            if k <= n {
                outs.push(("d", b.exterior_derivative(&h)?));
            }
            for (name, f) in outs {
                let dev = match f.weight(&pts)? {
                    Weight::Any => 0.0,
                    Weight::Homogeneous(mu) => (mu - lambda as f64).abs(),
                    Weight::NonHomogeneous => f64::INFINITY,
                };
                worst.take(dev, || format!("{name} of weight-{lambda} form {}", h.brief()));
            }
        }
        Check::Swap => {
            let (h, v) = xi.decompose();
            let sh = star(&h, &b)?;
            worst.zero(&sh.decompose().0, &pts, "horizontal part of *(horizontal)")?;
            worst.zero(&contract(&star(&v, &b)?)?, &pts, "i *(vertical)")?;
        }
        Check::LocalStar => {
            // *S_k = (-1)^{n+k} theta ^ *_M S_k and *(theta ^ S_{k-1}) = (-1)^{n+1} *_M S_{k-1}
            let sign = |e: usize| if e % 2 == 0 { 1.0 } else { -1.0 };
            if k <= n {
                let s = random::horizontal_form(&mut rng, n, k, true);
                let rhs = Form::theta(n).wedge(&base_star(&s, &b)?)?.scale(&sign(n + k).into());
                worst.diff(&star(&s, &b)?, &rhs, &pts, &format!("S = {}", s.brief()))?;
            }
            if k >= 1 {
                let s = random::horizontal_form(&mut rng, n, k - 1, true);
                let lhs = star(&Form::theta(n).wedge(&s)?, &b)?;
                let rhs = base_star(&s, &b)?.scale(&sign(n + 1).into());
                worst.diff(&lhs, &rhs, &pts, &format!("theta ^ S, S = {}", s.brief()))?;
            }
        }
        Check::Interior => {
            if k >= 1 {
                worst.zero(&contract(&contract(&xi)?)?, &pts, "i i xi")?;
            }
        }
        Check::Cartan => {
            let mut rhs = Form::zero(n, k);
            if k <= n {
                rhs = rhs + b.exterior_derivative(&xi)?.interior_euler()?;
            }
            if k >= 1 {
                rhs = rhs + b.exterior_derivative(&xi.interior_euler()?)?;
            }
            worst.diff(&lie(&xi), &rhs, &pts, &format!("xi = {}", xi.brief()))?;
        }
        Check::Decompose => {
            let (h, v) = xi.decompose();
            worst.diff(&(h.clone() + v.clone()), &xi, &pts, "h + v")?;
            let (hh, hv) = h.decompose();
            worst.diff(&hh, &h, &pts, "decompose(h)")?;
            worst.zero(&hv, &pts, "vertical part of h")?;
            worst.zero(&contract(&h)?, &pts, "i h")?;
            worst.zero(&v.decompose().0, &pts, "horizontal part of v")?;
        }
        Check::Covariant => {
            if k <= n {
                let h = random::horizontal_form(&mut rng, n, k, false);
                let rhs = b.covariant_derivative(&h)? + Form::theta(n).wedge(&lie(&h))?;
                worst.diff(&b.exterior_derivative(&h)?, &rhs, &pts, &format!("S = {}", h.brief()))?;
            }
        }
    }
    Ok(())
}

/// `i` with the zero convention on functions.
fn contract(f: &Form) -> Result<Form> {
    if f.degree() == 0 {
        Ok(Form::zero(f.dim(), 0))
    } else {
        f.interior_euler()
    }
}

fn rng_weight(seed: u64) -> i32 {
    (seed % 6) as i32 - 2
}

/// `eta ^ *xi - <eta, xi> vol` over every basis monomial `eta`, with the
/// inner product from the numeric Gram matrix of `G^{-1}`.
fn defining_relation(b: &CarrollBundle, xi: &Form, pts: &[Point], worst: &mut Worst) -> Result<()> {
    let n = b.dim();
    let sx = star(xi, b)?;
    let vol = volume_form(b);
    let top = crate::forms::Monomial::top(n);
    for eta_m in crate::forms::Monomial::all_of_degree(n, xi.degree()) {
        let eta = Form::monomial(n, eta_m, crate::ScalarExpr::one());
        let lhs = eta.wedge(&sx)?.coeff(top);
        let vol_c = vol.coeff(top);
        for p in pts {
            let ip = inner_product(&eta, xi, b, p)?;
            let dev = (lhs.eval(p)? - ip * vol_c.eval(p)?).abs();
            worst.take(dev, || format!("eta = {} at {p}", eta.brief()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_in_two_dimensions() {
        let recs = property_suite(2, &SuiteOptions { trials: 1, samples: 8, ..Default::default() }).unwrap();
        assert_eq!(recs.len(), CHECKS.len() * 4);
        for r in &recs {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let o = SuiteOptions { trials: 1, samples: 4, ..Default::default() };
        assert_eq!(property_suite(1, &o).unwrap(), property_suite(1, &o).unwrap());
    }
}
