//! Complex potentials and first integrals.
//!
//! For `z' = f(z)` the potential is `Phi = ∫ dz / f`, so `Re Phi` advances at
//! unit rate along trajectories and `Im Phi` is conserved. For
//! `z' = conj(p(z))` the potential is a primitive of `p` and again `Im Phi`
//! is conserved.

use crate::cpoly::{roots_with, BivarPoly, CPoly, RootOptions, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::system::{FieldKind, SystemSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// `residue * Log(z - pole)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogTerm {
    pub residue: Complex64,
    pub pole: Complex64,
}

/// `coeff / (z - pole)^order`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub coeff: Complex64,
    pub pole: Complex64,
    pub order: usize,
}

/// Closed form of a complex potential: polynomial part, logarithms and poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialRep {
    pub poly_part: CPoly,
    pub log_terms: Vec<LogTerm>,
    pub rational_terms: Vec<PoleTerm>,
}

impl PotentialRep {
    pub fn is_polynomial(&self) -> bool {
        self.log_terms.is_empty() && self.rational_terms.is_empty()
    }

    pub fn poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.log_terms
            .iter()
            .map(|t| t.pole)
            .chain(self.rational_terms.iter().map(|t| t.pole))
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        for pole in self.poles() {
            if (z - pole).norm() < 1e-12 * pole.norm().max(1.0) {
                return Err(Error::AtPole { z });
            }
        }
        Ok(())
    }

    fn non_log_value(&self, z: Complex64) -> Complex64 {
        let mut v = self.poly_part.eval(z);
        for t in &self.rational_terms {
            v += t.coeff / (z - t.pole).powi(t.order as i32);
        }
        v
    }

    /// `Phi'(z)`; equals `1/p` for holomorphic and `p` for antiholomorphic systems.
    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let mut v = self.poly_part.derivative().eval(z);
        for t in &self.log_terms {
            v += t.residue / (z - t.pole);
        }
        for t in &self.rational_terms {
            v -= t.coeff * t.order as f64 / (z - t.pole).powi(t.order as i32 + 1);
        }
        Ok(v)
    }
}

/// Potential of a polynomial system.
pub fn build_potential(spec: &SystemSpec) -> Result<PotentialRep> {
    if spec.p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    match spec.kind {
        FieldKind::Holomorphic => {
            build_potential_rational(&spec.p, &CPoly::constant(Complex64::new(1.0, 0.0)))
        }
        FieldKind::AntiHolomorphic => Ok(PotentialRep {
            poly_part: spec.p.antiderivative(),
            log_terms: Vec::new(),
            rational_terms: Vec::new(),
        }),
    }
}

/// Potential `∫ denom / numer dz` of the holomorphic field `numer / denom`.
///
/// `denom / numer` is split into a polynomial quotient and partial fractions
/// over the roots of `numer`; simple-pole parts integrate to logarithms.
pub fn build_potential_rational(numer: &CPoly, denom: &CPoly) -> Result<PotentialRep> {
    if numer.is_zero() || denom.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (quot, rem) = denom.div_rem(numer)?;
    let mut rep = PotentialRep {
        poly_part: quot.antiderivative(),
        log_terms: Vec::new(),
        rational_terms: Vec::new(),
    };
    if rem.is_zero() || numer.degree() == 0 {
        return Ok(rep);
    }

    let set = roots_with(
        numer,
        &RootOptions {
            tol: DEFAULT_TOL,
            ..RootOptions::default()
        },
    )?;
    let lead = numer.leading();
    for (j, root) in set.roots.iter().enumerate() {
        let m = root.multiplicity;
        // numer(z_j + t) / t^m from the remaining roots
        let others: Vec<Complex64> = set
            .roots
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .flat_map(|(_, r)| std::iter::repeat_n(r.location - root.location, r.multiplicity))
            .collect();
        let g = CPoly::from_roots(&others).scale(lead);
        let h = series_quotient(&rem.shift(root.location), &g, m);
        for k in 1..=m {
            let a = h[m - k];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            if k == 1 {
                rep.log_terms.push(LogTerm {
                    residue: a,
                    pole: root.location,
                });
            } else {
                rep.rational_terms.push(PoleTerm {
                    coeff: -a / (k as f64 - 1.0),
                    pole: root.location,
                    order: k - 1,
                });
            }
        }
    }
    Ok(rep)
}

/// First `len` Taylor coefficients of `a / b` at zero; `b(0)` must be nonzero.
fn series_quotient(a: &CPoly, b: &CPoly, len: usize) -> Vec<Complex64> {
    let b0 = b.coeff(0);
    let mut h = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = a.coeff(k);
        for i in 1..=k {
            acc -= b.coeff(i) * h[k - i];
        }
        h.push(acc / b0);
    }
    h
}

/// `Phi(z)` with principal-branch logarithms.
pub fn eval_potential(rep: &PotentialRep, z: Complex64) -> Result<Complex64> {
    rep.check_pole(z)?;
    let mut v = rep.non_log_value(z);
    for t in &rep.log_terms {
        v += t.residue * (z - t.pole).ln();
    }
    Ok(v)
}

/// Rectifying coordinate `w = Phi(z)`; in `w` the flow is a unit translation.
pub fn rectify(rep: &PotentialRep, z: Complex64) -> Result<Complex64> {
    eval_potential(rep, z)
}

/// `(phi, psi) = (Re Phi, Im Phi)`; `psi` is conserved along trajectories.
pub fn first_integral(rep: &PotentialRep, z: Complex64) -> Result<(f64, f64)> {
    let v = eval_potential(rep, z)?;
    Ok((v.re, v.im))
}

/// Evaluates the potential along a path, continuing logarithms across branch cuts.
///
/// Successive points must turn by less than `pi` around every log pole.
#[derive(Debug, Clone)]
pub struct BranchTracker<'a> {
    rep: &'a PotentialRep,
    args: Vec<f64>,
}

impl<'a> BranchTracker<'a> {
    pub fn new(rep: &'a PotentialRep, z0: Complex64) -> Result<Self> {
        rep.check_pole(z0)?;
        let args = rep.log_terms.iter().map(|t| (z0 - t.pole).arg()).collect();
        Ok(BranchTracker { rep, args })
    }

    pub fn advance(&mut self, z: Complex64) -> Result<Complex64> {
        self.rep.check_pole(z)?;
        let mut v = self.rep.non_log_value(z);
        for (t, prev) in self.rep.log_terms.iter().zip(self.args.iter_mut()) {
            let d = z - t.pole;
            let principal = d.arg();
            let turns = ((*prev - principal) / TAU).round();
            let arg = principal + TAU * turns;
            *prev = arg;
            v += t.residue * Complex64::new(d.norm().ln(), arg);
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormKind {
    /// `z' = z^n`
    Monomial,
    /// `z' = z^n / (1 + z^(n-1))`
    Resonant,
}

/// Closed-form potential of a local normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub n: i32,
    pub kind: NormalFormKind,
}

impl NormalForm {
    /// `(phi, psi)` at `(x, y)`; angles use the principal branch.
    pub fn eval(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let singular = self.n > 1;
        let r2 = x * x + y * y;
        if singular && r2 == 0.0 {
            return Err(Error::UndefinedAtOrigin);
        }
        let e = f64::from(1 - self.n);
        let theta = y.atan2(x);
        let rho = r2.powf(e / 2.0) / e;
        let mut phi = rho * (e * theta).cos();
        let mut psi = rho * (e * theta).sin();
        if self.kind == NormalFormKind::Resonant {
            phi += 0.5 * r2.ln();
            psi += theta;
        }
        Ok((phi, psi))
    }

    /// The same potential as a [`PotentialRep`].
    pub fn as_rep(&self) -> PotentialRep {
        let e = f64::from(1 - self.n);
        let zero = Complex64::new(0.0, 0.0);
        let mut rep = PotentialRep {
            poly_part: CPoly::zero(),
            log_terms: Vec::new(),
            rational_terms: Vec::new(),
        };
        if self.n <= 0 {
            rep.poly_part = CPoly::monomial(Complex64::new(1.0 / e, 0.0), (1 - self.n) as usize);
        } else {
            rep.rational_terms.push(PoleTerm {
                coeff: Complex64::new(1.0 / e, 0.0),
                pole: zero,
                order: (self.n - 1) as usize,
            });
        }
        if self.kind == NormalFormKind::Resonant {
            rep.log_terms.push(LogTerm {
                residue: Complex64::new(1.0, 0.0),
                pole: zero,
            });
        }
        rep
    }
}

/// Potential of the normal form `z' = z^n` or its resonant variant.
///
/// `n = 1` is excluded (its potential is logarithmic). The resonant family
/// needs `n >= 2`.
pub fn normal_form_potential(n: i32, kind: NormalFormKind) -> Result<NormalForm> {
    if n == 1 {
        return Err(Error::ExcludedExponent);
    }
    if kind == NormalFormKind::Resonant && n < 2 {
        return Err(Error::InvalidArgument(format!(
            "resonant normal form needs n >= 2, got {n}"
        )));
    }
    Ok(NormalForm { n, kind })
}

/// Real and imaginary parts of a polynomial potential as polynomials in `(x, y)`.
pub fn stream_function_poly(rep: &PotentialRep) -> Option<(BivarPoly, BivarPoly)> {
    if !rep.is_polynomial() {
        return None;
    }
    let d = rep.poly_part.degree();
    let mut phi = BivarPoly::zeros(d);
    let mut psi = BivarPoly::zeros(d);
    for (k, &c) in rep.poly_part.coeffs().iter().enumerate() {
        // (x + i y)^k = sum_j C(k, j) x^(k-j) (i y)^j
        let mut binom = 1.0;
        for j in 0..=k {
            let ipow = match j % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            let term = c * ipow * binom;
            phi.add_to(k - j, j, term.re);
            psi.add_to(k - j, j, term.im);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    Some((phi, psi))
}
