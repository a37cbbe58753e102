use super::RealPoly;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Dense real polynomial in two variables, `coeffs[i][j]` multiplies `x^i y^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivarPoly {
    coeffs: Vec<Vec<f64>>,
}

impl BivarPoly {
    /// Zero polynomial with room for total degree `degree`.
    pub fn zeros(degree: usize) -> Self {
        BivarPoly {
            coeffs: vec![vec![0.0; degree + 1]; degree + 1],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let need = i.max(j) + 1;
        if self.coeffs.len() < need {
            let width = need.max(self.coeffs.first().map_or(0, Vec::len));
            self.coeffs.resize(need, vec![0.0; width]);
        }
        for row in &mut self.coeffs {
            if row.len() < need {
                row.resize(need, 0.0);
            }
        }
        self.coeffs[i][j] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: f64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + value);
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(move |(j, &c)| (i, j, c))
        })
    }

    /// Highest `i + j` over nonzero terms; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms().next().is_none()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms().map(|(_, _, c)| c.abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, row| {
            acc * x + row.iter().rev().fold(0.0, |a, &c| a * y + c)
        })
    }

    pub fn partial_x(&self) -> BivarPoly {
        let mut out = BivarPoly::zeros(self.degree().saturating_sub(1));
        for (i, j, c) in self.terms() {
            if i > 0 {
                out.add_to(i - 1, j, c * i as f64);
            }
        }
        out
    }

    pub fn partial_y(&self) -> BivarPoly {
        let mut out = BivarPoly::zeros(self.degree().saturating_sub(1));
        for (i, j, c) in self.terms() {
            if j > 0 {
                out.add_to(i, j - 1, c * j as f64);
            }
        }
        out
    }

    /// Coefficients as polynomials in `x`, indexed by the power of `y`.
    pub fn in_powers_of_y(&self) -> Vec<RealPoly> {
        let d = self.degree();
        (0..=d)
            .map(|j| RealPoly::new((0..=d).map(|i| self.get(i, j)).collect()))
            .collect()
    }

    /// The univariate polynomial `y -> f(x, y)` at fixed `x`.
    pub fn at_x(&self, x: f64) -> RealPoly {
        RealPoly::new(self.in_powers_of_y().iter().map(|c| c.eval(x)).collect())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d = self.degree();
        let scale = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        (0..=d).all(|i| (0..=d).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol * scale))
    }
}

/// A bivariate polynomial symmetric under `x1 <-> x2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivarSym(BivarPoly);

impl BivarSym {
    /// Wraps `p` after checking symmetry to relative tolerance `1e-12`.
    pub fn new(p: BivarPoly) -> Result<Self> {
        if p.is_symmetric(1e-12) {
            Ok(BivarSym(p))
        } else {
            Err(Error::InvalidArgument("polynomial is not symmetric".into()))
        }
    }

    pub fn poly(&self) -> &BivarPoly {
        &self.0
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.0.eval(x1, x2)
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }
}

/// `(q(x1) - q(x2)) / (x1 - x2)` as a symmetric polynomial of degree `deg q - 1`.
pub fn divided_difference(q: &RealPoly) -> BivarSym {
    let mut out = BivarPoly::zeros(q.degree().saturating_sub(1));
    for (k, &c) in q.coeffs().iter().enumerate().skip(1) {
        for i in 0..k {
            out.add_to(i, k - 1 - i, c);
        }
    }
    BivarSym(out)
}

/// Sylvester sizes above this are refused; the cofactor expansion grows combinatorially.
const MAX_SYLVESTER: usize = 24;

/// Resultant of `f` and `g` with respect to the second variable, as a polynomial in the first.
///
/// Both inputs must keep their nominal degree in `x2` for every `x1`, so the
/// pure `x2^d` coefficient has to be nonzero. The determinant of the Sylvester
/// matrix is expanded over column subsets without any division. Coefficients
/// indistinguishable from rounding error, judged by the same expansion over
/// absolute values, are zeroed.
pub fn resultant_x2(f: &BivarSym, g: &BivarSym) -> Result<RealPoly> {
    resultant_x2_general(f.poly(), g.poly())
}

pub(crate) fn resultant_x2_general(f: &BivarPoly, g: &BivarPoly) -> Result<RealPoly> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let m = f.degree();
    let n = g.degree();
    if f.get(0, m) == 0.0 || g.get(0, n) == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let fy = f.in_powers_of_y();
    let gy = g.in_powers_of_y();
    let size = m + n;
    if size == 0 {
        return Ok(RealPoly::constant(1.0));
    }
    if size > MAX_SYLVESTER {
        return Err(Error::InvalidArgument(format!(
            "resultant of degrees {m} and {n} is too large"
        )));
    }

    // row r < n: f shifted by r; row n + r: g shifted by r; descending powers
    let entry = |row: usize, col: usize| -> Option<&RealPoly> {
        let (poly, deg, shift) = if row < n {
            (&fy, m, row)
        } else {
            (&gy, n, row - n)
        };
        if col < shift || col > shift + deg {
            return None;
        }
        let c = &poly[deg - (col - shift)];
        (!c.is_zero()).then_some(c)
    };

    // each partial expansion carries its value and the same sum taken over
    // absolute values, which bounds the rounding error of every coefficient
    let abs = |p: &RealPoly| RealPoly::new(p.coeffs().iter().map(|c| c.abs()).collect());
    let mut layer: HashMap<u32, (RealPoly, RealPoly)> = HashMap::new();
    layer.insert(0, (RealPoly::constant(1.0), RealPoly::constant(1.0)));
    for row in 0..size {
        let mut next: HashMap<u32, (RealPoly, RealPoly)> = HashMap::new();
        for (mask, (acc, mag)) in &layer {
            for col in 0..size {
                if mask & (1 << col) != 0 {
                    continue;
                }
                let Some(e) = entry(row, col) else { continue };
                let inversions = (mask >> col).count_ones();
                let term = (acc * e).scale(if inversions % 2 == 0 { 1.0 } else { -1.0 });
                let term_mag = mag * &abs(e);
                let slot = next
                    .entry(mask | (1 << col))
                    .or_insert_with(|| (RealPoly::zero(), RealPoly::zero()));
                *slot = (&slot.0 + &term, &slot.1 + &term_mag);
            }
        }
        layer = next;
    }
    let Some((det, mag)) = layer.remove(&((1u32 << size) - 1)) else {
        return Ok(RealPoly::zero());
    };
    let noise = 16.0 * size as f64 * f64::EPSILON;
    let coeffs = (0..=det.degree())
        .map(|k| {
            let c = det.coeff(k);
            if c.abs() <= noise * mag.coeff(k) {
                0.0
            } else {
                c
            }
        })
        .collect();
    Ok(RealPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn divided_difference_of_square() {
        let dd = divided_difference(&RealPoly::new(vec![0.0, 0.0, 1.0]));
        assert_eq!(dd.degree(), 1);
        assert_eq!(dd.poly().get(1, 0), 1.0);
        assert_eq!(dd.poly().get(0, 1), 1.0);
        assert_eq!(dd.poly().get(0, 0), 0.0);
    }

    #[test]
    fn divided_difference_of_quartic() {
        let dd = divided_difference(&RealPoly::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]));
        assert_eq!(dd.degree(), 3);
        for i in 0..=3 {
            assert_eq!(dd.poly().get(i, 3 - i), 1.0);
        }
    }

    #[test]
    fn divided_difference_matches_quotient() {
        let q = RealPoly::new(vec![0.3, -1.0, 2.0, 0.7]);
        let dd = divided_difference(&q);
        let (a, b) = (1.3, -0.4);
        assert_abs_diff_eq!(
            dd.eval(a, b),
            (q.eval(a) - q.eval(b)) / (a - b),
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(dd.eval(a, a), q.derivative().eval(a), epsilon = 1e-13);
    }

    #[test]
    fn resultant_of_linear_pair() {
        // x1 + x2 - 1 and 2 x1 - x2: eliminating x2 gives the intersection x1 = 1/3
        let mut f = BivarPoly::zeros(1);
        f.set(0, 0, -1.0);
        f.set(1, 0, 1.0);
        f.set(0, 1, 1.0);
        let mut g = BivarPoly::zeros(1);
        g.set(1, 0, 2.0);
        g.set(0, 1, -1.0);
        let r = resultant_x2_general(&f, &g).unwrap();
        assert_eq!(r.degree(), 1);
        assert_abs_diff_eq!(-r.coeff(0) / r.coeff(1), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn resultant_vanishes_for_identical_inputs() {
        let f = divided_difference(&RealPoly::new(vec![0.5, 1.0, -2.0, 1.0]));
        let r = resultant_x2(&f, &f).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn resultant_detects_degenerate_leading_term() {
        let mut f = BivarPoly::zeros(1);
        f.set(1, 0, 1.0);
        let g = f.clone();
        assert_eq!(
            resultant_x2_general(&f, &g),
            Err(Error::DegenerateLeadingCoefficient)
        );
    }

    #[test]
    fn resultant_roots_are_common_projections() {
        // circle x^2 + y^2 = 4 and line y = x
        let mut f = BivarPoly::zeros(2);
        f.set(2, 0, 1.0);
        f.set(0, 2, 1.0);
        f.set(0, 0, -4.0);
        let mut g = BivarPoly::zeros(1);
        g.set(0, 1, 1.0);
        g.set(1, 0, -1.0);
        let r = resultant_x2_general(&f, &g).unwrap();
        let roots = r.real_roots(None, 1e-12).unwrap();
        assert_eq!(roots.len(), 2);
        assert_abs_diff_eq!(roots[1], 2f64.sqrt(), epsilon = 1e-12);
    }
}
