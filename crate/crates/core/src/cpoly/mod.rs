//! Complex and real polynomial arithmetic.
//!
//! [`CPoly`] holds the vector fields `p(z)`; [`RealPoly`] and [`BivarPoly`]
//! carry the restrictions of stream functions to the real axis and the
//! crossing-pair polynomials built from them.

mod bivar;
mod real;

pub use bivar::{divided_difference, resultant_x2, BivarPoly, BivarSym};
pub use real::{real_roots, RealPoly};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

/// Default relative tolerance for root finding and refinement.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default radius below which roots are merged into one multiple root.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

const MAX_ABERTH_ITERATIONS: usize = 500;

/// Dense complex polynomial, coefficients in ascending degree.
///
/// The representation is normalized: the last stored coefficient is nonzero,
/// and the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for CPoly {
    fn from(coeffs: Vec<Complex64>) -> Self {
        CPoly::new(coeffs)
    }
}

impl From<CPoly> for Vec<Complex64> {
    fn from(p: CPoly) -> Self {
        p.coeffs
    }
}

impl CPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        CPoly { coeffs }
    }

    pub fn zero() -> Self {
        CPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        CPoly::new(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        CPoly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `c * z^k`
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        CPoly::new(coeffs)
    }

    /// Monic polynomial with the given roots (repeated entries give multiplicity).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        CPoly::new(coeffs)
    }

    /// Expands a root set back into the monic polynomial it describes.
    pub fn from_root_set(set: &RootSet) -> Self {
        let flat: Vec<Complex64> = set
            .roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.location, r.multiplicity))
            .collect();
        CPoly::from_roots(&flat)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> CPoly {
        CPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Term-by-term primitive with zero constant term.
    pub fn antiderivative(&self) -> CPoly {
        if self.is_zero() {
            return CPoly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        CPoly::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Taylor shift: the polynomial `q(t) = p(t + a)`.
    pub fn shift(&self, a: Complex64) -> CPoly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                let hi = c[k + 1];
                c[k] += a * hi;
            }
        }
        CPoly::new(c)
    }

    /// Long division by a nonzero divisor.
    pub fn div_rem(&self, d: &CPoly) -> Result<(CPoly, CPoly)> {
        if d.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.coeffs.len() < d.coeffs.len() {
            return Ok((CPoly::zero(), self.clone()));
        }
        let dn = d.degree();
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complex64::new(0.0, 0.0); self.coeffs.len() - dn];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dn] / lead;
            quot[k] = q;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
        }
        rem.truncate(dn);
        Ok((CPoly::new(quot), CPoly::new(rem)))
    }

    pub fn real_part(&self) -> RealPoly {
        RealPoly::new(self.coeffs.iter().map(|c| c.re).collect())
    }

    pub fn imag_part(&self) -> RealPoly {
        RealPoly::new(self.coeffs.iter().map(|c| c.im).collect())
    }

    /// True when every coefficient is real to within `tol` times the coefficient scale.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    /// All complex roots with multiplicities, default cluster radius.
    pub fn roots(&self, tol: f64) -> Result<RootSet> {
        roots_with(
            self,
            &RootOptions {
                tol,
                ..RootOptions::default()
            },
        )
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        if self.is_zero() || rhs.is_zero() {
            return CPoly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

/// One distinct root and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub location: Complex64,
    pub multiplicity: usize,
}

/// Distinct roots of a polynomial; multiplicities sum to its degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter()
    }

    pub fn all_simple(&self) -> bool {
        self.roots.iter().all(|r| r.multiplicity == 1)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Relative residual tolerance.
    pub tol: f64,
    /// Minimum merge radius for clustering.
    pub cluster_tol: f64,
    pub max_iterations: usize,
    /// Merge nearby roots into multiple roots; when false every root is reported simple.
    pub cluster: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: DEFAULT_TOL,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            max_iterations: MAX_ABERTH_ITERATIONS,
            cluster: true,
        }
    }
}

/// All complex roots of `p` with multiplicities.
pub fn roots(p: &CPoly, tol: f64) -> Result<RootSet> {
    p.roots(tol)
}

/// Root finding with explicit clustering and iteration settings.
///
/// Exact zero roots are split off first; the rest are found by simultaneous
/// Aberth–Ehrlich iteration started on a circle of radius `1 + max|c_k/c_n|`.
/// Roots closer than `max(cluster_tol, tol^(1/m))` (relative) to a running
/// cluster centroid are merged into a root of multiplicity `m`.
pub fn roots_with(p: &CPoly, opts: &RootOptions) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(
            "root finding needs degree >= 1".into(),
        ));
    }

    let zero_mult = p.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = CPoly::new(p.coeffs[zero_mult..].to_vec());

    let mut approx = if reduced.degree() > 0 {
        aberth(&reduced, opts)?
    } else {
        Vec::new()
    };
    approx.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zero_mult));

    let mut set = if opts.cluster {
        cluster(&approx, opts)
    } else {
        RootSet {
            roots: approx
                .iter()
                .map(|&location| Root {
                    location,
                    multiplicity: 1,
                })
                .collect(),
        }
    };
    set.roots.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    Ok(set)
}

fn residual_bound(p: &CPoly, z: Complex64, tol: f64) -> f64 {
    let n = p.degree() as i32;
    tol * (1.0 + p.max_abs_coeff()) * z.norm().max(1.0).powi(n)
}

fn aberth(p: &CPoly, opts: &RootOptions) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.leading();
    let radius = 1.0
        + p.coeffs[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);

    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
        .collect();

    let mut settled_for = 0usize;
    for _ in 0..opts.max_iterations {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            } else {
                // derivative vanished: nudge off the critical point
                let nudge = Complex64::new(1e-8, 1e-8) * z[i].norm().max(1.0);
                z[i] += nudge;
                max_step = f64::INFINITY;
            }
        }
        let residual_ok = z
            .iter()
            .all(|&zi| p.eval(zi).norm() <= residual_bound(p, zi, opts.tol));
        if max_step <= 4.0 * f64::EPSILON {
            break;
        }
        if residual_ok {
            settled_for += 1;
            if settled_for >= 8 {
                break;
            }
        }
    }

    let worst = z
        .iter()
        .map(|&zi| p.eval(zi).norm() / residual_bound(p, zi, 1.0))
        .fold(0.0, f64::max);
    if !z.iter().all(|zi| zi.is_finite()) || worst > opts.tol {
        return Err(Error::NonConvergence {
            iterations: opts.max_iterations,
            residual: worst,
        });
    }
    Ok(z)
}

fn cluster(approx: &[Complex64], opts: &RootOptions) -> RootSet {
    let radius = |m: usize, centroid: Complex64| {
        opts.cluster_tol.max(opts.tol.powf(1.0 / m as f64)) * centroid.norm().max(1.0)
    };
    let mut used = vec![false; approx.len()];
    let mut roots = Vec::new();
    for i in 0..approx.len() {
        if used[i] {
            continue;
        }
        let mut near: Vec<usize> = (0..approx.len()).filter(|&j| !used[j] && j != i).collect();
        near.sort_by(|&a, &b| {
            (approx[a] - approx[i])
                .norm()
                .total_cmp(&(approx[b] - approx[i]).norm())
        });
        // largest group around the seed that fits inside its own merge radius
        let mut members = vec![i];
        for m in (2..=near.len() + 1).rev() {
            let group: Vec<usize> = std::iter::once(i)
                .chain(near[..m - 1].iter().copied())
                .collect();
            let centroid = group.iter().map(|&k| approx[k]).sum::<Complex64>() / m as f64;
            let r = radius(m, centroid);
            if group.iter().all(|&k| (approx[k] - centroid).norm() <= r) {
                members = group;
                break;
            }
        }
        for &k in &members {
            used[k] = true;
        }
        let location = members.iter().map(|&k| approx[k]).sum::<Complex64>() / members.len() as f64;
        roots.push(Root {
            location,
            multiplicity: members.len(),
        });
    }
    RootSet { roots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_evaluation() {
        let p = CPoly::from_real(&[0.0, -1.0, 0.0, 1.0]);
        assert_eq!(p.eval(c(2.0, 0.0)), c(6.0, 0.0));
        assert_eq!(CPoly::from_real(&[1.0]).eval(c(5.0, 1.0)), c(1.0, 0.0));
        // z^3 - i z at z = i: i^3 - i*i = -i + 1
        let q = CPoly::new(vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let v = q.eval(c(0.0, 1.0));
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn normalization_drops_trailing_zeros() {
        let p = CPoly::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(CPoly::from_real(&[0.0, 0.0]).is_zero());
    }

    #[test]
    fn antiderivative_of_square() {
        let p = CPoly::monomial(c(1.0, 0.0), 2).antiderivative();
        assert_eq!(p.coeffs().len(), 4);
        assert_abs_diff_eq!(p.coeff(3).re, 1.0 / 3.0);
        assert_eq!(p.coeff(0), c(0.0, 0.0));
    }

    #[test]
    fn antiderivative_matches_shifted_square() {
        // (2+i)(z - 5i) integrates to (2+i)(z-5i)^2/2 up to a constant
        let p = CPoly::new(vec![c(2.0, 1.0) * c(0.0, -5.0), c(2.0, 1.0)]);
        let prim = p.antiderivative();
        let closed = |z: Complex64| c(2.0, 1.0) * (z - c(0.0, 5.0)).powi(2) / 2.0;
        let k = closed(c(0.0, 0.0)) - prim.eval(c(0.0, 0.0));
        for z in [c(1.0, 2.0), c(-3.0, 0.5), c(0.2, -4.0)] {
            let d = closed(z) - prim.eval(z) - k;
            assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn taylor_shift() {
        let p = CPoly::from_real(&[1.0, -2.0, 0.0, 3.0]);
        let a = c(0.5, -1.0);
        let q = p.shift(a);
        for t in [c(0.0, 0.0), c(1.0, 1.0), c(-2.0, 0.3)] {
            assert!((q.eval(t) - p.eval(t + a)).norm() < 1e-12);
        }
    }

    #[test]
    fn roots_of_simple_cubic() {
        let set = CPoly::from_real(&[0.0, -1.0, 0.0, 1.0])
            .roots(DEFAULT_TOL)
            .unwrap();
        assert_eq!(set.len(), 3);
        for (root, want) in set.iter().zip([-1.0, 0.0, 1.0]) {
            assert_eq!(root.multiplicity, 1);
            assert_abs_diff_eq!(root.location.re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(root.location.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn double_root_is_merged() {
        let set = CPoly::from_real(&[2.0, -3.0, 0.0, 1.0])
            .roots(DEFAULT_TOL)
            .unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.total_multiplicity(), 3);
        let double = set.iter().find(|r| r.multiplicity == 2).unwrap();
        assert!((double.location - c(1.0, 0.0)).norm() < 1e-7);
        let simple = set.iter().find(|r| r.multiplicity == 1).unwrap();
        assert!((simple.location - c(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn triple_root_at_origin() {
        let set = CPoly::monomial(c(1.0, 0.0), 3).roots(DEFAULT_TOL).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.roots[0].multiplicity, 3);
        assert_eq!(set.roots[0].location, c(0.0, 0.0));
    }

    #[test]
    fn triple_root_off_origin() {
        let r = c(0.3, -0.7);
        let p = CPoly::from_roots(&[r, r, r, c(2.0, 1.0)]);
        let set = p.roots(DEFAULT_TOL).unwrap();
        assert_eq!(set.len(), 2);
        let triple = set.iter().find(|x| x.multiplicity == 3).unwrap();
        assert!((triple.location - r).norm() < 1e-5);
    }

    #[test]
    fn constant_and_zero_are_rejected() {
        assert_eq!(CPoly::zero().roots(DEFAULT_TOL), Err(Error::ZeroPolynomial));
        assert!(matches!(
            CPoly::constant(c(2.0, 0.0)).roots(DEFAULT_TOL),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn centered_cubic_roots_sum_to_zero() {
        let p = CPoly::new(vec![c(4.0, -12.0), c(4.0, 6.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let set = p.roots(DEFAULT_TOL).unwrap();
        let sum: Complex64 = set.iter().map(|r| r.location * r.multiplicity as f64).sum();
        assert!(sum.norm() < 1e-10);
    }
}
