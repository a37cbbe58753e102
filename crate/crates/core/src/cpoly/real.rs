use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Dense real polynomial, coefficients ascending, trailing zeros removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for RealPoly {
    fn from(c: Vec<f64>) -> Self {
        RealPoly::new(c)
    }
}

impl From<RealPoly> for Vec<f64> {
    fn from(p: RealPoly) -> Self {
        p.coeffs
    }
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0.0) {
            coeffs.pop();
        }
        RealPoly { coeffs }
    }

    pub fn zero() -> Self {
        RealPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        RealPoly::new(vec![c])
    }

    /// Product of `(x - r)` over the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(RealPoly::constant(1.0), |acc, &r| {
            &acc * &RealPoly::new(vec![-r, 1.0])
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> RealPoly {
        RealPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> RealPoly {
        RealPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Zeroes every coefficient with magnitude at most `threshold`.
    pub fn trim(&self, threshold: f64) -> RealPoly {
        RealPoly::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() <= threshold { 0.0 } else { c })
                .collect(),
        )
    }

    /// Long division; panics on a zero divisor.
    pub fn div_rem(&self, d: &RealPoly) -> (RealPoly, RealPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.coeffs.len() < d.coeffs.len() {
            return (RealPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dn = d.degree();
        let lead = d.leading();
        let mut quot = vec![0.0; self.coeffs.len() - dn];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dn] / lead;
            quot[k] = q;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
            rem[k + dn] = 0.0;
        }
        rem.truncate(dn);
        (RealPoly::new(quot), RealPoly::new(rem))
    }

    /// Real roots in `[lo, hi]` (whole line when `None`), see [`real_roots`].
    pub fn real_roots(&self, interval: Option<(f64, f64)>, tol: f64) -> Result<Vec<f64>> {
        real_roots(self, interval, tol)
    }

    /// Cauchy bound on root magnitudes.
    pub fn root_bound(&self) -> f64 {
        let lead = self.leading().abs();
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .map(|c| c.abs() / lead)
            .fold(0.0, f64::max)
    }
}

impl Add for &RealPoly {
    type Output = RealPoly;
    fn add(self, rhs: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RealPoly {
    type Output = RealPoly;
    fn sub(self, rhs: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &RealPoly {
    type Output = RealPoly;
    fn mul(self, rhs: &RealPoly) -> RealPoly {
        if self.is_zero() || rhs.is_zero() {
            return RealPoly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPoly::new(out)
    }
}

impl Neg for &RealPoly {
    type Output = RealPoly;
    fn neg(self) -> RealPoly {
        self.scale(-1.0)
    }
}

struct Sturm {
    chain: Vec<RealPoly>,
}

impl Sturm {
    fn new(p: &RealPoly) -> Sturm {
        let unit = |q: &RealPoly| q.scale(1.0 / q.max_abs_coeff());
        let mut chain = vec![unit(p)];
        let dp = p.derivative();
        if !dp.is_zero() {
            chain.push(unit(&dp));
        }
        while chain.len() >= 2 {
            let a = &chain[chain.len() - 2];
            let b = &chain[chain.len() - 1];
            if b.degree() == 0 {
                break;
            }
            let (_, r) = a.div_rem(b);
            // a has unit scale, so cancellation noise sits near machine epsilon
            let r = r.trim(1e-11);
            if r.is_zero() {
                break;
            }
            chain.push(unit(&-&r));
        }
        Sturm { chain }
    }

    fn sign_changes_at(&self, x: f64) -> usize {
        count_changes(self.chain.iter().map(|q| q.eval(x)))
    }
}

fn count_changes(values: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Real roots of `p` in `[lo, hi]` by Sturm-sequence isolation.
///
/// Isolating intervals are refined by bisection on a sign change (or by Sturm
/// counts for even-multiplicity roots) to machine precision. Each distinct
/// root is reported once, ascending. `tol` is the relative width below which
/// an interval still holding several roots is reported as a single cluster.
pub fn real_roots(p: &RealPoly, interval: Option<(f64, f64)>, tol: f64) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let bound = p.root_bound();
    let (lo, hi) = match interval {
        Some((a, b)) if a > b => {
            return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")))
        }
        Some((a, b)) => (a.max(-bound), b.min(bound)),
        None => (-bound, bound),
    };
    if lo > hi {
        return Ok(Vec::new());
    }

    let sturm = Sturm::new(p);
    let mut found = Vec::new();
    if p.eval(lo) == 0.0 {
        found.push(lo);
    }
    let v_lo = sturm.sign_changes_at(lo);
    let v_hi = sturm.sign_changes_at(hi);
    let mut stack = vec![(lo, hi, v_lo, v_hi)];
    let min_width = |a: f64, b: f64| tol.max(4.0 * f64::EPSILON) * a.abs().max(b.abs()).max(1.0);

    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va.saturating_sub(vb);
        if count == 0 {
            continue;
        }
        if count == 1 {
            found.push(refine(p, &sturm, a, b, va));
            continue;
        }
        if b - a <= min_width(a, b) {
            found.push(0.5 * (a + b));
            continue;
        }
        let mut mid = 0.5 * (a + b);
        if p.eval(mid) == 0.0 {
            // keep split points off roots so sign counts stay exact
            mid = a + 0.5007 * (b - a);
        }
        let vm = sturm.sign_changes_at(mid);
        stack.push((a, mid, va, vm));
        stack.push((mid, b, vm, vb));
    }

    found.sort_by(f64::total_cmp);
    found.dedup_by(|x, y| (*x - *y).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0));
    Ok(found)
}

/// Narrows `(a, b]`, known to hold exactly one distinct root.
fn refine(p: &RealPoly, sturm: &Sturm, mut a: f64, mut b: f64, va: usize) -> f64 {
    let pb = p.eval(b);
    if pb == 0.0 {
        return b;
    }
    if a < 0.0 && b > 0.0 && p.coeff(0) == 0.0 {
        return 0.0;
    }
    let mut pa = p.eval(a);
    if pa != 0.0 && (pa > 0.0) != (pb > 0.0) {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let pm = p.eval(m);
            if pm == 0.0 {
                return m;
            }
            if (pm > 0.0) == (pa > 0.0) {
                a = m;
                pa = pm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    }
    // even multiplicity: no sign change, track the root by counts
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if p.eval(m) == 0.0 {
            return m;
        }
        if va - sturm.sign_changes_at(m) >= 1 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn six_real_roots() {
        let p = RealPoly::from_roots(&[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
        let r = p.real_roots(None, 1e-12).unwrap();
        assert_eq!(r.len(), 6);
        for (got, want) in r.iter().zip([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn no_real_roots() {
        let p = RealPoly::new(vec![1.0, 0.0, 1.0]);
        assert!(p.real_roots(None, 1e-12).unwrap().is_empty());
    }

    #[test]
    fn double_root_reported_once() {
        let p = RealPoly::from_roots(&[1.5, 1.5, -0.25]);
        let r = p.real_roots(None, 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0], -0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], 1.5, epsilon = 1e-7);
    }

    #[test]
    fn interval_restricts_search() {
        let p = RealPoly::from_roots(&[-2.0, 0.5, 4.0]);
        let r = p.real_roots(Some((0.0, 3.0)), 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(
            RealPoly::zero().real_roots(None, 1e-12),
            Err(Error::IdenticallyZero)
        );
    }

    #[test]
    fn root_at_zero_exact() {
        let p = RealPoly::new(vec![0.0, 3.0, 1.0]);
        let r = p.real_roots(None, 1e-12).unwrap();
        assert_eq!(r, vec![-3.0, 0.0]);
    }

    #[test]
    fn division_identity() {
        let a = RealPoly::new(vec![1.0, -2.0, 0.5, 3.0, 1.0]);
        let b = RealPoly::new(vec![2.0, 1.0, -1.0]);
        let (q, r) = a.div_rem(&b);
        let back = &(&q * &b) + &r;
        for k in 0..5 {
            assert_abs_diff_eq!(back.coeff(k), a.coeff(k), epsilon = 1e-12);
        }
        assert!(r.degree() < b.degree());
    }
}
