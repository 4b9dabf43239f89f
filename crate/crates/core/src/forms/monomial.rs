use std::fmt;

use crate::error::{Error, Result};

const THETA_BIT: u32 = 31;

/// Basis monomial of the mixed coframe: `dx^{i_1} ^ .. ^ dx^{i_r}` with
/// strictly increasing base indices, optionally followed by `theta`.
///
/// `theta` is always last in the canonical order, so the top monomial is
/// `dx^1 ^ .. ^ dx^n ^ theta`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    theta: bool,
    base: u32,
}

impl Monomial {
    /// Largest supported base dimension.
    pub const MAX_DIM: usize = 30;

    pub fn new(indices: &[usize], theta: bool) -> Result<Self> {
        let mut base = 0u32;
        let mut prev: Option<usize> = None;
        for &i in indices {
            if i >= Self::MAX_DIM {
                return Err(Error::DimensionMismatch(format!("base index {i} out of range")));
            }
            if prev.is_some_and(|p| p >= i) {
                return Err(Error::Degree("monomial indices must be strictly increasing".into()));
            }
            base |= 1 << i;
            prev = Some(i);
        }
        Ok(Monomial { theta, base })
    }

    pub fn one() -> Self {
        Monomial { theta: false, base: 0 }
    }

    pub fn dx(axis: usize) -> Self {
        assert!(axis < Self::MAX_DIM);
        Monomial { theta: false, base: 1 << axis }
    }

    pub fn theta() -> Self {
        Monomial { theta: true, base: 0 }
    }

    #[cfg(test)]
    fn from_parts(base: u32, theta: bool) -> Self {
        Monomial { theta, base }
    }

    /// `dx^1 ^ .. ^ dx^n ^ theta`.
    pub fn top(n: usize) -> Self {
        Monomial { theta: true, base: full_mask(n) }
    }

    /// Horizontal top monomial `dx^1 ^ .. ^ dx^n`.
    pub fn base_top(n: usize) -> Self {
        Monomial { theta: false, base: full_mask(n) }
    }

    pub fn has_theta(self) -> bool {
        self.theta
    }

    pub fn base_mask(self) -> u32 {
        self.base
    }

    pub fn base_degree(self) -> usize {
        self.base.count_ones() as usize
    }

    pub fn degree(self) -> usize {
        self.base_degree() + self.theta as usize
    }

    pub fn base_indices(self) -> Vec<usize> {
        (0..Self::MAX_DIM).filter(|i| self.base & (1 << i) != 0).collect()
    }

    /// Highest base index used, if any.
    pub fn max_index(self) -> Option<usize> {
        (self.base != 0).then(|| 31 - self.base.leading_zeros() as usize)
    }

    pub fn horizontal_part(self) -> Monomial {
        Monomial { theta: false, base: self.base }
    }

    pub fn with_theta(self) -> Monomial {
        Monomial { theta: true, base: self.base }
    }

    fn mask(self) -> u64 {
        self.base as u64 | ((self.theta as u64) << THETA_BIT)
    }

    /// `self ^ other = sign * m`, or `None` when a generator repeats.
    pub fn wedge(self, other: Monomial) -> Option<(f64, Monomial)> {
        let (a, b) = (self.mask(), other.mask());
        if a & b != 0 {
            return None;
        }
        let mut inversions = 0u32;
        let mut rest = a;
        while rest != 0 {
            let i = rest.trailing_zeros();
            inversions += (b & ((1u64 << i) - 1)).count_ones();
            rest &= rest - 1;
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((sign, Monomial { theta: self.theta || other.theta, base: self.base | other.base }))
    }

    /// Complementary monomial in the full coframe of a base of dimension `n`.
    pub fn complement(self, n: usize) -> Monomial {
        Monomial { theta: !self.theta, base: full_mask(n) & !self.base }
    }

    /// Complement inside the base coframe; `theta` is dropped.
    pub fn base_complement(self, n: usize) -> Monomial {
        Monomial { theta: false, base: full_mask(n) & !self.base }
    }

    /// All monomials of degree `k` over a base of dimension `n`, in order.
    pub fn all_of_degree(n: usize, k: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        for base in 0..=full_mask(n) {
            let r = base.count_ones() as usize;
            if r == k {
                out.push(Monomial { theta: false, base });
            }
            if r + 1 == k {
                out.push(Monomial { theta: true, base });
            }
        }
        out.sort();
        out
    }

    /// All horizontal monomials of degree `k`.
    pub fn horizontal_of_degree(n: usize, k: usize) -> Vec<Monomial> {
        Self::all_of_degree(n, k).into_iter().filter(|m| !m.theta).collect()
    }

    pub fn fits(self, n: usize) -> bool {
        self.base & !full_mask(n) == 0
    }

    /// Renders with caller-chosen generator names.
    pub fn render(self, base_name: impl Fn(usize) -> String, theta_name: &str) -> String {
        if self.degree() == 0 {
            return "1".into();
        }
        let mut parts: Vec<String> = self.base_indices().into_iter().map(base_name).collect();
        if self.theta {
            parts.push(theta_name.to_string());
        }
        parts.join("^")
    }
}

fn full_mask(n: usize) -> u32 {
    assert!(n <= Monomial::MAX_DIM);
    if n == 0 {
        0
    } else {
        u32::MAX >> (32 - n)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|i| format!("dx{}", i + 1), "th"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sign of the permutation sorting `seq` (generators as plain integers,
    /// theta = big), by explicit bubble sort.
    fn bubble_sign(mut seq: Vec<usize>) -> f64 {
        let mut sign = 1.0;
        for i in 0..seq.len() {
            for j in 0..seq.len() - 1 - i {
                if seq[j] > seq[j + 1] {
                    seq.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        sign
    }

    #[test]
    fn nilpotent_and_antisymmetric() {
        assert!(Monomial::dx(0).wedge(Monomial::dx(0)).is_none());
        let (s12, m) = Monomial::dx(0).wedge(Monomial::dx(1)).unwrap();
        let (s21, m2) = Monomial::dx(1).wedge(Monomial::dx(0)).unwrap();
        assert_eq!(m, m2);
        assert_eq!(s12, -s21);
    }

    #[test]
    fn sign_matches_bubble_sort() {
        // (theta ^ dx1) ^ dx2 -> theta^dx1^dx2 = +dx1^dx2^theta (two swaps)
        let (s, _) = Monomial::theta().wedge(Monomial::dx(0)).unwrap();
        let lhs = Monomial::dx(0).with_theta();
        let (s2, top) = lhs.wedge(Monomial::dx(1)).unwrap();
        assert_eq!(top, Monomial::new(&[0, 1], true).unwrap());
        assert_eq!(s * s2, bubble_sign(vec![99, 0, 1]));
        for a in 0..16u32 {
            for b in 0..16u32 {
                let ma = Monomial::from_parts(a & 7, a & 8 != 0);
                let mb = Monomial::from_parts(b & 7, b & 8 != 0);
                let seq: Vec<usize> = ma
                    .base_indices()
                    .into_iter()
                    .chain(ma.has_theta().then_some(99))
                    .chain(mb.base_indices())
                    .chain(mb.has_theta().then_some(99))
                    .collect();
                let mut uniq = seq.clone();
                uniq.sort();
                uniq.dedup();
                match ma.wedge(mb) {
                    None => assert!(uniq.len() < seq.len()),
                    Some((s, _)) => assert_eq!(s, bubble_sign(seq)),
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        // binomial(n+1, k)
        assert_eq!(Monomial::all_of_degree(3, 2).len(), 6);
        assert_eq!(Monomial::all_of_degree(3, 0), vec![Monomial::one()]);
        assert_eq!(Monomial::all_of_degree(3, 4), vec![Monomial::top(3)]);
        assert_eq!(Monomial::all_of_degree(2, 1).len(), 3);
    }

    #[test]
    fn increasing_indices_required() {
        assert!(Monomial::new(&[1, 0], false).is_err());
        assert!(Monomial::new(&[0, 0], false).is_err());
        assert_eq!(Monomial::new(&[0, 2], true).unwrap().degree(), 3);
    }
}
