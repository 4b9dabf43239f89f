use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use nalgebra::DMatrix;

use crate::error::Result;
use crate::forms::Monomial;
use crate::scalar::{Point, ScalarExpr};

/// `G = g - theta (x) theta` in the mixed coframe: `blockdiag(g_M, -1)`.
///
/// The inverse `blockdiag(g_M^-1, -1)` is kept symbolically (adjugate over
/// determinant), and Gram determinants of index subsets are memoised.
pub struct MetricG {
    dim: usize,
    g: Vec<Vec<ScalarExpr>>,
    inv: Vec<Vec<ScalarExpr>>,
    det: ScalarExpr,
    sqrt_det: ScalarExpr,
    diagonal: bool,
    grams: Mutex<HashMap<(u32, u32), ScalarExpr>>,
}

fn det_of(m: &[Vec<ScalarExpr>], rows: &[usize], cols: &[usize]) -> ScalarExpr {
    match rows.len() {
        0 => ScalarExpr::one(),
        1 => m[rows[0]][cols[0]].clone(),
        2 => &m[rows[0]][cols[0]] * &m[rows[1]][cols[1]] - &m[rows[0]][cols[1]] * &m[rows[1]][cols[0]],
        _ => {
            let r0 = rows[0];
            let rest = &rows[1..];
            let mut terms = Vec::with_capacity(cols.len());
            for (j, &c) in cols.iter().enumerate() {
                if m[r0][c].is_zero() {
                    continue;
                }
                let sub: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = &m[r0][c] * det_of(m, rest, &sub);
                terms.push(if j % 2 == 0 { minor } else { -minor });
            }
            ScalarExpr::sum(terms)
        }
    }
}

impl MetricG {
    pub fn new(g: Vec<Vec<ScalarExpr>>) -> Self {
        let n = g.len();
        let diagonal = (0..n).all(|a| (0..n).all(|b| a == b || g[a][b].is_zero()));
        let idx: Vec<usize> = (0..n).collect();
        let (det, inv) = if diagonal {
            let det = ScalarExpr::product((0..n).map(|a| g[a][a].clone()));
            let inv = (0..n)
                .map(|a| (0..n).map(|b| if a == b { g[a][a].recip() } else { ScalarExpr::zero() }).collect())
                .collect();
            (det, inv)
        } else {
            let det = det_of(&g, &idx, &idx);
            let det_inv = det.recip();
            let inv = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            // (g^-1)_{ab} = C_{ba} / det
                            let rows: Vec<usize> = idx.iter().copied().filter(|&r| r != b).collect();
                            let cols: Vec<usize> = idx.iter().copied().filter(|&c| c != a).collect();
                            let minor = det_of(&g, &rows, &cols);
                            let c = if (a + b) % 2 == 0 { minor } else { -minor };
                            c * &det_inv
                        })
                        .collect()
                })
                .collect();
            (det, inv)
        };
        let sqrt_det = det.sqrt();
        MetricG { dim: n, g, inv, det, sqrt_det, diagonal, grams: Mutex::new(HashMap::new()) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base_metric(&self) -> &[Vec<ScalarExpr>] {
        &self.g
    }

    pub fn base_inverse(&self) -> &[Vec<ScalarExpr>] {
        &self.inv
    }

    /// Entry of `G` in the mixed coframe, index `n` being `theta`.
    pub fn entry(&self, i: usize, j: usize) -> ScalarExpr {
        let n = self.dim;
        match (i == n, j == n) {
            (true, true) => ScalarExpr::constant(-1.0),
            (false, false) => self.g[i][j].clone(),
            _ => ScalarExpr::zero(),
        }
    }

    pub fn inverse_entry(&self, i: usize, j: usize) -> ScalarExpr {
        let n = self.dim;
        match (i == n, j == n) {
            (true, true) => ScalarExpr::constant(-1.0),
            (false, false) => self.inv[i][j].clone(),
            _ => ScalarExpr::zero(),
        }
    }

    /// `det g_M`; `det G = -det g_M` in the mixed coframe.
    pub fn base_det(&self) -> &ScalarExpr {
        &self.det
    }

    pub fn sqrt_det(&self) -> &ScalarExpr {
        &self.sqrt_det
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// `det[g^{i_p j_q}]` over base index sets given as masks.
    pub fn base_gram(&self, a: Monomial, b: Monomial) -> ScalarExpr {
        let (ma, mb) = (a.base_mask(), b.base_mask());
        if ma.count_ones() != mb.count_ones() {
            return ScalarExpr::zero();
        }
        if self.diagonal {
            if ma != mb {
                return ScalarExpr::zero();
            }
            return ScalarExpr::product(a.base_indices().into_iter().map(|i| self.inv[i][i].clone()));
        }
        let key = (ma, mb);
        if let Some(v) = self.grams.lock().expect("gram cache").get(&key) {
            return v.clone();
        }
        let v = det_of(&self.inv, &a.base_indices(), &b.base_indices());
        self.grams.lock().expect("gram cache").insert(key, v.clone());
        v
    }

    /// Gram determinant of `G^-1` over two monomials of equal degree.
    pub fn gram(&self, a: Monomial, b: Monomial) -> ScalarExpr {
        if a.has_theta() != b.has_theta() || a.degree() != b.degree() {
            return ScalarExpr::zero();
        }
        let g = self.base_gram(a, b);
        if a.has_theta() {
            -g
        } else {
            g
        }
    }

    /// Numeric `g_M` at a point.
    pub fn base_matrix_at(&self, p: &Point) -> Result<DMatrix<f64>> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] = self.g[a][b].eval(p)?;
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for MetricG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricG").field("dim", &self.dim).field("g", &self.g).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, SampleBox};

    fn s(e: &str) -> ScalarExpr {
        parse_scalar(e).unwrap()
    }

    #[test]
    fn symbolic_inverse_matches_numeric() {
        let g = vec![
            vec![s("2 + x1^2"), s("x2/3"), s("0.1")],
            vec![s("x2/3"), s("3"), s("x1*x3/4")],
            vec![s("0.1"), s("x1*x3/4"), s("1 + x3^2")],
        ];
        let m = MetricG::new(g);
        assert!(!m.is_diagonal());
        for p in SampleBox::unit(3).points(20, 3) {
            let num = m.base_matrix_at(&p).unwrap();
            let inv = num.clone().try_inverse().unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    assert!((m.base_inverse()[a][b].eval(&p).unwrap() - inv[(a, b)]).abs() < 1e-12);
                }
            }
            assert!((m.base_det().eval(&p).unwrap() - num.determinant()).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_block() {
        let m = MetricG::new(vec![vec![s("1")]]);
        assert_eq!(m.entry(1, 1), s("-1"));
        assert_eq!(m.inverse_entry(0, 1), s("0"));
        assert_eq!(m.gram(Monomial::theta(), Monomial::theta()), s("-1"));
        assert_eq!(m.gram(Monomial::theta(), Monomial::dx(0)), s("0"));
        let both = Monomial::new(&[0], true).unwrap();
        assert_eq!(m.gram(both, both), s("-1"));
    }
}
