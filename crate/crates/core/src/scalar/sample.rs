use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// A point of the total space in adapted coordinates. The fibre coordinate
/// is nonzero except for closure points built with [`Point::closure`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub t: f64,
}

impl Point {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        if t == 0.0 {
            return Err(Error::ZeroFibre);
        }
        Ok(Point { x, t })
    }

    /// A point of the zero section `t = 0`. Only meaningful for coefficient
    /// expressions that extend across it.
    pub fn closure(x: Vec<f64>) -> Self {
        Point { x, t: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.x.iter().enumerate() {
            write!(f, "x{}={v:.6}, ", i + 1)?;
        }
        write!(f, "t={:.6})", self.t)
    }
}

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    r
}

/// Axis-aligned sampling region for the base coordinates and `|t|`.
///
/// Points come from a Halton sequence with a seeded Cranley-Patterson
/// rotation, so a given `(box, count, seed)` always yields the same set.
/// Both sheets `t > 0` and `t < 0` are sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox {
    pub base: Vec<(f64, f64)>,
    pub t_abs: (f64, f64),
}

impl SampleBox {
    pub fn new(base: Vec<(f64, f64)>, t_abs: (f64, f64)) -> Self {
        SampleBox { base, t_abs }
    }

    /// `[-1, 1]^n` with `|t| in [0.5, 2]`.
    pub fn unit(n: usize) -> Self {
        SampleBox::new(vec![(-1.0, 1.0); n], (0.5, 2.0))
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn points(&self, count: usize, seed: u64) -> Vec<Point> {
        let dims = self.base.len() + 2;
        assert!(dims <= PRIMES.len(), "sampling supports at most {} base axes", PRIMES.len() - 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..dims).map(|_| rng.gen::<f64>()).collect();
        (1..=count as u64)
            .map(|i| {
                let u: Vec<f64> = (0..dims)
                    .map(|d| (radical_inverse(i, PRIMES[d]) + shift[d]).fract())
                    .collect();
                let x = self
                    .base
                    .iter()
                    .zip(&u)
                    .map(|(&(lo, hi), &v)| lo + (hi - lo) * v)
                    .collect();
                let n = self.base.len();
                let mag = self.t_abs.0 + (self.t_abs.1 - self.t_abs.0) * u[n];
                let t = if u[n + 1] < 0.5 { -mag } else { mag };
                Point { x, t }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_fibre_rejected() {
        assert!(matches!(Point::new(vec![1.0], 0.0), Err(Error::ZeroFibre)));
        assert_eq!(Point::closure(vec![1.0]).t, 0.0);
    }

    #[test]
    fn samples_are_deterministic_and_in_range() {
        let b = SampleBox::new(vec![(0.2, 3.0), (-1.0, 1.0)], (0.5, 2.0));
        let p = b.points(100, 7);
        assert_eq!(p, b.points(100, 7));
        assert_ne!(p, b.points(100, 8));
        assert!(p.iter().all(|q| q.t.abs() >= 0.5 && q.t.abs() <= 2.0));
        assert!(p.iter().all(|q| (0.2..=3.0).contains(&q.x[0])));
        assert!(p.iter().any(|q| q.t < 0.0) && p.iter().any(|q| q.t > 0.0));
    }
}
