//! Equilibria of holomorphic systems, at finite distance and at infinity,
//! and the canonical-region counts of cubic and Bernoulli portraits.

use crate::cpoly::{roots_with, CPoly, RealPoly, RootOptions, DEFAULT_TOL};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Default relative band for center and node detection.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Values within this factor of the band edge are too close to call.
const BORDERLINE_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumType {
    AttractingNode,
    RepellingNode,
    AttractingFocus,
    RepellingFocus,
    Center,
    Multiple(usize),
}

impl EquilibriumType {
    pub fn is_center(self) -> bool {
        self == EquilibriumType::Center
    }

    pub fn is_node(self) -> bool {
        matches!(
            self,
            EquilibriumType::AttractingNode | EquilibriumType::RepellingNode
        )
    }

    pub fn is_focus(self) -> bool {
        matches!(
            self,
            EquilibriumType::AttractingFocus | EquilibriumType::RepellingFocus
        )
    }

    pub fn name(self) -> String {
        match self {
            EquilibriumType::AttractingNode => "attracting_node".into(),
            EquilibriumType::RepellingNode => "repelling_node".into(),
            EquilibriumType::AttractingFocus => "attracting_focus".into(),
            EquilibriumType::RepellingFocus => "repelling_focus".into(),
            EquilibriumType::Center => "center".into(),
            EquilibriumType::Multiple(m) => format!("multiple_{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumInfo {
    pub location: Complex64,
    pub multiplicity: usize,
    /// `p'(z0)` at simple equilibria, zero at multiple ones.
    pub lambda: Complex64,
    pub etype: EquilibriumType,
}

/// Type of a simple equilibrium with eigenvalue `lambda`, using relative band `eps`.
pub fn type_from_lambda(lambda: Complex64, eps: f64) -> EquilibriumType {
    let band = eps * lambda.norm();
    if lambda.re.abs() <= band {
        EquilibriumType::Center
    } else if lambda.im.abs() <= band {
        if lambda.re < 0.0 {
            EquilibriumType::AttractingNode
        } else {
            EquilibriumType::RepellingNode
        }
    } else if lambda.re < 0.0 {
        EquilibriumType::AttractingFocus
    } else {
        EquilibriumType::RepellingFocus
    }
}

fn is_borderline(lambda: Complex64, eps: f64) -> bool {
    let n = lambda.norm();
    let near = |v: f64| v.abs() > eps * n && v.abs() <= BORDERLINE_FACTOR * eps * n;
    near(lambda.re) || near(lambda.im)
}

fn info(p: &CPoly, location: Complex64, multiplicity: usize, eps: f64) -> EquilibriumInfo {
    if multiplicity > 1 {
        EquilibriumInfo {
            location,
            multiplicity,
            lambda: Complex64::new(0.0, 0.0),
            etype: EquilibriumType::Multiple(multiplicity),
        }
    } else {
        let lambda = p.derivative().eval(location);
        EquilibriumInfo {
            location,
            multiplicity,
            lambda,
            etype: type_from_lambda(lambda, eps),
        }
    }
}

/// One entry per distinct root of `p`.
pub fn classify_equilibria(p: &CPoly, eps: f64) -> Result<Vec<EquilibriumInfo>> {
    let set = p.roots(DEFAULT_TOL)?;
    Ok(set
        .iter()
        .map(|r| info(p, r.location, r.multiplicity, eps))
        .collect())
}

/// `|sum 1/p'(z_k)|` over the roots; vanishes for every polynomial of degree >= 2 with simple roots.
pub fn euler_jacobi_residual(p: &CPoly) -> Result<f64> {
    let set = p.roots(DEFAULT_TOL)?;
    if let Some(r) = set.iter().find(|r| r.multiplicity > 1) {
        return Err(Error::MultipleRoot {
            location: r.location,
            multiplicity: r.multiplicity,
        });
    }
    let dp = p.derivative();
    Ok(set
        .iter()
        .map(|r| dp.eval(r.location).inv())
        .sum::<Complex64>()
        .norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `x = 1/w, y = s/w`
    U1,
    /// `x = s/w, y = 1/w`
    U2,
}

/// Equilibrium of the compactified field `z' = z^n` on the rim of the Poincaré disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfinityEquilibrium {
    pub angle: f64,
    pub index: usize,
    /// Jacobian determinant in the chart; negative for a saddle.
    pub saddle_det: f64,
    pub chart: Chart,
}

/// Real and imaginary parts of `base^n` for a linear `base` in `s`.
fn power_parts(base: &CPoly, n: usize) -> (RealPoly, RealPoly) {
    let pow = (0..n).fold(CPoly::constant(Complex64::new(1.0, 0.0)), |acc, _| {
        &acc * base
    });
    (pow.real_part(), pow.imag_part())
}

/// The `2(n-1)` saddles at infinity of `z' = z^n`, at angles `k pi / (n-1)`.
///
/// Determinants come from the Jacobian of the chart field at `w = 0`: chart
/// U1 with `s = tan(angle)` unless the cosine vanishes, else chart U2 with
/// `s = cot(angle)`.
pub fn infinity_equilibria(n: usize) -> Result<Vec<InfinityEquilibrium>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "equilibria at infinity need n >= 2, got {n}"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    // (1 + i s)^n = A + i B and (s + i)^n = C + i D
    let (a1, b1) = power_parts(&CPoly::new(vec![one, i]), n);
    let (c2, d2) = power_parts(&CPoly::new(vec![i, one]), n);
    Ok((0..2 * (n - 1))
        .map(|k| {
            let angle = (k as f64 * PI / (n - 1) as f64).rem_euclid(TAU);
            let (chart, det) = if angle.cos().abs() > 1e-12 {
                // s' = B - s A, w' = -w A
                let s = angle.tan();
                let (a, da) = a1.eval_with_derivative(s);
                let (_, db) = b1.eval_with_derivative(s);
                (Chart::U1, (db - a - s * da) * (-a))
            } else {
                // s' = C - s D, w' = -w D
                let s = angle.cos() / angle.sin();
                let (d, dd) = d2.eval_with_derivative(s);
                let (_, dc) = c2.eval_with_derivative(s);
                (Chart::U2, (dc - d - s * dd) * (-d))
            };
            InfinityEquilibrium {
                angle,
                index: k,
                saddle_det: det,
                chart,
            }
        })
        .collect())
}

/// `-(n-1)(1 + tan^2)^(n-1)`, with `cot` in place of `tan` where the tangent blows up.
pub fn expected_saddle_det(n: usize, angle: f64) -> f64 {
    let t = if angle.cos().abs() > 1e-12 {
        angle.tan()
    } else {
        angle.cos() / angle.sin()
    };
    -((n - 1) as f64) * (1.0 + t * t).powi(n as i32 - 1)
}

/// Equilibrium configurations of `z' = z^3 + A1 z + A0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigLabel {
    /// three centers
    A,
    /// three nodes
    B,
    /// one triple equilibrium
    C,
    /// three foci
    D,
    /// center and double
    E,
    /// node and double
    F,
    /// focus and double
    G,
    /// center and two foci
    H,
    /// node and two foci
    I,
    /// center, node and focus
    J,
}

impl ConfigLabel {
    pub fn letter(self) -> char {
        match self {
            ConfigLabel::A => 'a',
            ConfigLabel::B => 'b',
            ConfigLabel::C => 'c',
            ConfigLabel::D => 'd',
            ConfigLabel::E => 'e',
            ConfigLabel::F => 'f',
            ConfigLabel::G => 'g',
            ConfigLabel::H => 'h',
            ConfigLabel::I => 'i',
            ConfigLabel::J => 'j',
        }
    }

    /// `(center, sepal, alpha-omega)` region counts.
    pub fn regions(self) -> (usize, usize, usize) {
        match self {
            ConfigLabel::A => (3, 0, 0),
            ConfigLabel::B | ConfigLabel::D | ConfigLabel::I => (0, 0, 2),
            ConfigLabel::C => (0, 4, 0),
            ConfigLabel::E => (1, 2, 0),
            ConfigLabel::F | ConfigLabel::G => (0, 2, 1),
            ConfigLabel::H | ConfigLabel::J => (1, 0, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitClass {
    pub config_label: ConfigLabel,
    pub center_regions: usize,
    pub sepal_regions: usize,
    pub alpha_omega_regions: usize,
    pub equilibria: Vec<EquilibriumInfo>,
}

impl PortraitClass {
    pub fn total_regions(&self) -> usize {
        self.center_regions + self.sepal_regions + self.alpha_omega_regions
    }
}

/// `-4 A1^3 - 27 A0^2` and its natural scale.
fn discriminant(a1: Complex64, a0: Complex64) -> (Complex64, f64) {
    let disc = -4.0 * a1.powi(3) - 27.0 * a0 * a0;
    (disc, 4.0 * a1.norm().powi(3) + 27.0 * a0.norm_sqr())
}

/// Canonical-region decomposition of the portrait of `z' = z^3 + A1 z + A0`.
///
/// Multiple equilibria are detected by the discriminant (`|disc| <= eps`
/// relative to its scale). Eigenvalues inside `(eps, 100 eps]` of either
/// band edge are refused as borderline.
pub fn classify_cubic(a1: Complex64, a0: Complex64, eps: f64) -> Result<PortraitClass> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let p = CPoly::new(vec![a0, a1, zero, one]);
    let (disc, scale) = discriminant(a1, a0);

    let equilibria = if disc.norm() <= eps * scale || scale == 0.0 {
        if a1.norm() <= eps * (a0.norm().powf(2.0 / 3.0)).max(f64::MIN_POSITIVE) || scale == 0.0 {
            vec![info(&p, zero, 3, eps)]
        } else {
            let double = -3.0 * a0 / (2.0 * a1);
            let simple = 3.0 * a0 / a1;
            vec![info(&p, double, 2, eps), info(&p, simple, 1, eps)]
        }
    } else {
        let set = roots_with(
            &p,
            &RootOptions {
                cluster: false,
                ..RootOptions::default()
            },
        )?;
        set.iter().map(|r| info(&p, r.location, 1, eps)).collect()
    };

    for e in &equilibria {
        if e.multiplicity == 1 && is_borderline(e.lambda, eps) {
            return Err(Error::UnclassifiedConfiguration(format!(
                "eigenvalue {} at {} lies within {BORDERLINE_FACTOR} eps of a type boundary",
                e.lambda, e.location
            )));
        }
    }

    let label = label_for(&equilibria)?;
    let (center, sepal, ao) = label.regions();
    Ok(PortraitClass {
        config_label: label,
        center_regions: center,
        sepal_regions: sepal,
        alpha_omega_regions: ao,
        equilibria,
    })
}

fn label_for(eqs: &[EquilibriumInfo]) -> Result<ConfigLabel> {
    let simple: Vec<EquilibriumType> = eqs
        .iter()
        .filter(|e| e.multiplicity == 1)
        .map(|e| e.etype)
        .collect();
    let count = |f: fn(EquilibriumType) -> bool| simple.iter().filter(|t| f(**t)).count();
    let (c, n, f) = (
        count(EquilibriumType::is_center),
        count(EquilibriumType::is_node),
        count(EquilibriumType::is_focus),
    );
    let max_mult = eqs.iter().map(|e| e.multiplicity).max().unwrap_or(0);
    let label = match (max_mult, c, n, f) {
        (3, 0, 0, 0) => Some(ConfigLabel::C),
        (2, 1, 0, 0) => Some(ConfigLabel::E),
        (2, 0, 1, 0) => Some(ConfigLabel::F),
        (2, 0, 0, 1) => Some(ConfigLabel::G),
        (1, 3, 0, 0) => Some(ConfigLabel::A),
        (1, 0, 3, 0) if split_stability(eqs) => Some(ConfigLabel::B),
        (1, 0, 0, 3) if split_stability(eqs) => Some(ConfigLabel::D),
        (1, 1, 0, 2) => Some(ConfigLabel::H),
        (1, 0, 1, 2) => Some(ConfigLabel::I),
        (1, 1, 1, 1) => Some(ConfigLabel::J),
        _ => None,
    };
    label.ok_or_else(|| {
        let kinds: Vec<String> = eqs.iter().map(|e| e.etype.name()).collect();
        Error::UnclassifiedConfiguration(kinds.join(", "))
    })
}

fn split_stability(eqs: &[EquilibriumInfo]) -> bool {
    let attracting = eqs.iter().filter(|e| e.lambda.re < 0.0).count();
    attracting == 1 || attracting == 2
}

/// Portrait summary of `z' = z^n - alpha z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliPortrait {
    pub n: usize,
    pub alpha: Complex64,
    pub equilibria: Vec<EquilibriumInfo>,
    pub center_regions: usize,
    pub alpha_omega_regions: usize,
    pub infinity: Vec<InfinityEquilibrium>,
}

/// Equilibria are the origin (`lambda = -alpha`) and the `n-1` roots of
/// `z^(n-1) = alpha` (`lambda = (n-1) alpha`). A purely imaginary `alpha`
/// (within `eps`) makes every equilibrium a center and gives `n` center
/// regions; otherwise there are `n-1` alpha-omega regions.
pub fn bernoulli_portrait(n: usize, alpha: Complex64, eps: f64) -> Result<BernoulliPortrait> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Bernoulli family needs n >= 2, got {n}"
        )));
    }
    if alpha.norm() == 0.0 {
        return Err(Error::ZeroAlpha);
    }
    let m = (n - 1) as f64;
    let lambda_origin = -alpha;
    let lambda_ring = alpha * m;
    let mut equilibria = vec![EquilibriumInfo {
        location: Complex64::new(0.0, 0.0),
        multiplicity: 1,
        lambda: lambda_origin,
        etype: type_from_lambda(lambda_origin, eps),
    }];
    let radius = alpha.norm().powf(1.0 / m);
    for k in 0..n - 1 {
        let location = Complex64::from_polar(radius, (alpha.arg() + TAU * k as f64) / m);
        equilibria.push(EquilibriumInfo {
            location,
            multiplicity: 1,
            lambda: lambda_ring,
            etype: type_from_lambda(lambda_ring, eps),
        });
    }
    let centered = alpha.re.abs() <= eps * alpha.norm();
    Ok(BernoulliPortrait {
        n,
        alpha,
        equilibria,
        center_regions: if centered { n } else { 0 },
        alpha_omega_regions: if centered { 0 } else { n - 1 },
        infinity: infinity_equilibria(n)?,
    })
}
