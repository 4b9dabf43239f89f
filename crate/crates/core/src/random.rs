//! Seeded generators of test inputs: coefficient functions, bundles and
//! forms. Everything produced here evaluates without domain faults on the
//! default sample box (`[-1, 1]^n`, `|t|` in `[0.5, 2]`).

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::forms::{CarrollBundle, Form, Monomial};
use crate::scalar::ScalarExpr;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_coeff<R: Rng>(rng: &mut R) -> f64 {
    // quarters keep printed expressions readable
    let v = rng.gen_range(-8..=8) as f64 / 4.0;
    if v == 0.0 {
        0.5
    } else {
        v
    }
}

fn linear<R: Rng>(rng: &mut R, n: usize) -> ScalarExpr {
    let mut terms = vec![ScalarExpr::constant(rng.gen_range(-4..=4) as f64 / 4.0)];
    for a in 0..n {
        if rng.gen_bool(0.6) {
            terms.push(ScalarExpr::coord(a) * small_coeff(rng));
        }
    }
    ScalarExpr::sum(terms)
}

/// Smooth t-independent function of `x^1..x^n`.
pub fn base_function<R: Rng>(rng: &mut R, n: usize) -> ScalarExpr {
    let pieces = rng.gen_range(1..=3);
    let mut terms = Vec::new();
    for _ in 0..pieces {
        let term = match rng.gen_range(0..5) {
            0 => ScalarExpr::constant(small_coeff(rng)),
            1 => {
                let a = rng.gen_range(0..n);
                ScalarExpr::coord(a).powi(rng.gen_range(1..=3)) * small_coeff(rng)
            }
            2 => linear(rng, n).sin() * small_coeff(rng),
            3 => linear(rng, n).cos() * linear(rng, n),
            _ => (linear(rng, n) * 0.5).exp() * small_coeff(rng),
        };
        terms.push(term);
    }
    ScalarExpr::sum(terms)
}

/// Coefficient of weight `lambda`: `t^lambda h(x)`.
pub fn homogeneous_function<R: Rng>(rng: &mut R, n: usize, lambda: i32) -> ScalarExpr {
    ScalarExpr::fibre().powi(lambda) * base_function(rng, n)
}

/// Generic coefficient mixing several weights and non-polynomial `t`
/// dependence.
pub fn general_function<R: Rng>(rng: &mut R, n: usize) -> ScalarExpr {
    let l0 = rng.gen_range(-2..=3);
    let mut terms = vec![homogeneous_function(rng, n, l0)];
    if rng.gen_bool(0.5) {
        let l1 = rng.gen_range(-2..=3);
        terms.push(homogeneous_function(rng, n, l1));
    }
    if rng.gen_bool(0.4) {
        let arg = ScalarExpr::fibre() * small_coeff(rng) + linear(rng, n);
        terms.push(arg.sin() * base_function(rng, n));
    }
    if rng.gen_bool(0.3) {
        terms.push(ScalarExpr::fibre().ln_abs() * base_function(rng, n));
    }
    ScalarExpr::sum(terms)
}

/// Bundle with curved, generally non-diagonal `g_M` and a non-flat
/// connection. Diagonal entries are at least 2 and off-diagonal entries at
/// most 0.3 in size on `[-1, 1]^n`, so `g_M` is positive-definite for n <= 6.
pub fn bundle<R: Rng>(rng: &mut R, n: usize, diagonal: bool) -> Result<CarrollBundle> {
    let mut g = vec![vec![ScalarExpr::zero(); n]; n];
    for a in 0..n {
        let bump = match rng.gen_range(0..3) {
            0 => ScalarExpr::coord(rng.gen_range(0..n)).powi(2) * 0.5,
            1 => (linear(rng, n) * 0.5).sin() * 0.5,
            _ => ScalarExpr::constant(rng.gen_range(0..4) as f64 / 4.0),
        };
        g[a][a] = ScalarExpr::constant(2.0) + bump;
        if !diagonal {
            for b in 0..a {
                let c = rng.gen_range(-3..=3) as f64 / 10.0;
                let e = match rng.gen_range(0..3) {
                    0 => ScalarExpr::constant(c),
                    1 => ScalarExpr::coord(rng.gen_range(0..n)) * c,
                    _ => (ScalarExpr::coord(a) + ScalarExpr::coord(b)).cos() * c,
                };
                g[a][b] = e.clone();
                g[b][a] = e;
            }
        }
    }
    let a = (0..n)
        .map(|_| if rng.gen_bool(0.8) { base_function(rng, n) } else { ScalarExpr::zero() })
        .collect();
    CarrollBundle::new(g, a)
}

/// Flat metric with a random, generally curved, connection.
pub fn flat_metric_bundle<R: Rng>(rng: &mut R, n: usize) -> Result<CarrollBundle> {
    let a = (0..n).map(|_| base_function(rng, n)).collect();
    CarrollBundle::flat_with_connection(a)
}

fn pick_monomials<R: Rng>(rng: &mut R, all: Vec<Monomial>) -> Vec<Monomial> {
    let mut all = all;
    all.shuffle(rng);
    let count = rng.gen_range(1..=all.len().min(3));
    all.truncate(count);
    all
}

/// Random k-form with generic coefficients.
pub fn form<R: Rng>(rng: &mut R, n: usize, k: usize) -> Form {
    let terms: Vec<_> = pick_monomials(rng, Monomial::all_of_degree(n, k))
        .into_iter()
        .map(|m| (m, general_function(rng, n)))
        .collect();
    Form::from_terms(n, k, terms).expect("generated form")
}

/// Random k-form homogeneous of weight `lambda`.
pub fn homogeneous_form<R: Rng>(rng: &mut R, n: usize, k: usize, lambda: i32) -> Form {
    let terms: Vec<_> = pick_monomials(rng, Monomial::all_of_degree(n, k))
        .into_iter()
        .map(|m| (m, homogeneous_function(rng, n, lambda)))
        .collect();
    Form::from_terms(n, k, terms).expect("generated form")
}

/// Random horizontal k-form; with `base_only` the coefficients are
/// t-independent.
pub fn horizontal_form<R: Rng>(rng: &mut R, n: usize, k: usize, base_only: bool) -> Form {
    let terms: Vec<_> = pick_monomials(rng, Monomial::horizontal_of_degree(n, k))
        .into_iter()
        .map(|m| (m, if base_only { base_function(rng, n) } else { general_function(rng, n) }))
        .collect();
    Form::from_terms(n, k, terms).expect("generated form")
}
