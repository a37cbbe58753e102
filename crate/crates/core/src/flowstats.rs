//! Circulation and net flow across closed curves, and closed-form complex-time flows.

use crate::error::{Error, Result};
use crate::odeint::{integrate_field, IntegratorConfig};
use crate::potential::{BranchTracker, PotentialRep};
use crate::system::{FieldKind, SystemSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub const DEFAULT_NODES: usize = 4096;

/// `(Re, Im)` of the contour integral of `conj(f) dz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourResult {
    pub circulation: f64,
    pub net_flow: f64,
}

/// Closed integration path.
pub enum Curve {
    Circle {
        center: Complex64,
        radius: f64,
        counterclockwise: bool,
    },
    /// Vertices in order; the last edge closes back to the first vertex.
    Polygon(Vec<Complex64>),
    /// `t -> (z(t), z'(t))` on `[0, 1)`, smooth and periodic.
    Custom(Box<dyn Fn(f64) -> (Complex64, Complex64) + Send + Sync>),
}

impl Curve {
    pub fn unit_circle() -> Self {
        Curve::Circle {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
            counterclockwise: true,
        }
    }
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Curve::Circle {
                center,
                radius,
                counterclockwise,
            } => f
                .debug_struct("Circle")
                .field("center", center)
                .field("radius", radius)
                .field("counterclockwise", counterclockwise)
                .finish(),
            Curve::Polygon(v) => f.debug_tuple("Polygon").field(v).finish(),
            Curve::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

const PANEL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_m`.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Sums a list of terms pairwise so the result does not depend on evaluation order.
fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    match terms.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => terms[0],
        n => pairwise_sum(&terms[..n / 2]) + pairwise_sum(&terms[n / 2..]),
    }
}

/// Contour integral of `conj(f(z)) dz` around `curve`.
///
/// Circles and custom curves use the periodic trapezoid rule with `n_nodes`
/// points. Polygons have corners where the trapezoid rule loses its
/// spectral accuracy, so each edge is split into 16-point Gauss–Legendre
/// panels, about `n_nodes` nodes in total.
pub fn contour_integral(
    f: impl Fn(Complex64) -> Complex64,
    curve: &Curve,
    n_nodes: usize,
) -> Result<ContourResult> {
    if n_nodes < 2 {
        return Err(Error::InvalidArgument(
            "need at least two quadrature nodes".into(),
        ));
    }
    let term = |z: Complex64, dz: Complex64, w: f64| -> Result<Complex64> {
        let v = f(z);
        if !v.is_finite() {
            return Err(Error::FieldSingularOnCurve { z });
        }
        Ok(v.conj() * dz * w)
    };
    let terms: Vec<Complex64> = match curve {
        Curve::Circle {
            center,
            radius,
            counterclockwise,
        } => {
            let dir = if *counterclockwise { 1.0 } else { -1.0 };
            let h = TAU / n_nodes as f64;
            (0..n_nodes)
                .map(|k| {
                    let e = Complex64::from_polar(1.0, dir * h * k as f64);
                    let z = center + e * *radius;
                    let dz = Complex64::new(0.0, dir) * e * *radius;
                    term(z, dz, h)
                })
                .collect::<Result<_>>()?
        }
        Curve::Custom(param) => {
            let h = 1.0 / n_nodes as f64;
            (0..n_nodes)
                .map(|k| {
                    let (z, dz) = param(h * k as f64);
                    term(z, dz, h)
                })
                .collect::<Result<_>>()?
        }
        Curve::Polygon(vertices) => {
            if vertices.len() < 3 {
                return Err(Error::InvalidArgument(
                    "polygon needs at least three vertices".into(),
                ));
            }
            let rule = gauss_legendre(PANEL_ORDER);
            let panels = (n_nodes / (PANEL_ORDER * vertices.len())).max(1);
            let mut out = Vec::with_capacity(panels * PANEL_ORDER * vertices.len());
            for (i, &a) in vertices.iter().enumerate() {
                let b = vertices[(i + 1) % vertices.len()];
                let edge = (b - a) / panels as f64;
                for p in 0..panels {
                    let start = a + edge * p as f64;
                    for &(x, w) in &rule {
                        let z = start + edge * (0.5 * (x + 1.0));
                        out.push(term(z, edge, 0.5 * w)?);
                    }
                }
            }
            out
        }
    };
    let total = pairwise_sum(&terms);
    Ok(ContourResult {
        circulation: total.re,
        net_flow: total.im,
    })
}

/// Contour integral of a polynomial system's velocity field.
pub fn contour_integral_spec(
    spec: &SystemSpec,
    curve: &Curve,
    n_nodes: usize,
) -> Result<ContourResult> {
    contour_integral(|z| spec.velocity(z), curve, n_nodes)
}

/// Holomorphic fields whose complex-time flow has a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormFlow {
    /// `z' = 1`
    Constant,
    /// `z' = z`
    Linear,
    /// `z' = z^2`
    Quadratic,
    /// `z' = 1/z`
    Reciprocal,
    /// `z' + alpha z = beta z^n`
    Bernoulli {
        n: u32,
        alpha: Complex64,
        beta: Complex64,
    },
}

impl ClosedFormFlow {
    /// The field `f` with `z' = f(z)`.
    pub fn field(&self, z: Complex64) -> Complex64 {
        match *self {
            ClosedFormFlow::Constant => Complex64::new(1.0, 0.0),
            ClosedFormFlow::Linear => z,
            ClosedFormFlow::Quadratic => z * z,
            ClosedFormFlow::Reciprocal => z.inv(),
            ClosedFormFlow::Bernoulli { n, alpha, beta } => beta * z.powu(n) - alpha * z,
        }
    }
}

const BRANCH_STEPS: usize = 64;

/// Value at complex time `T` of the solution with `z(0) = z0`.
///
/// Multivalued forms follow the branch that is continuous along the segment
/// from 0 to `T`, sampled at 64 steps.
pub fn closed_form_flow(flow: &ClosedFormFlow, z0: Complex64, t: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    match *flow {
        ClosedFormFlow::Constant => Ok(z0 + t),
        ClosedFormFlow::Linear => Ok(z0 * t.exp()),
        ClosedFormFlow::Quadratic => {
            let denom = one - z0 * t;
            if denom.norm() <= 1e-12 {
                return Err(Error::DomainViolation(format!("blow-up at T = {t}")));
            }
            Ok(z0 / denom)
        }
        ClosedFormFlow::Reciprocal => {
            if z0.norm() == 0.0 {
                return Err(Error::DomainViolation(
                    "z0 = 0 is a pole of the field".into(),
                ));
            }
            track_root(z0, t, 2, |tk| 2.0 * tk + z0 * z0)
        }
        ClosedFormFlow::Bernoulli { n, alpha, beta } => {
            if n < 2 {
                return Err(Error::InvalidArgument(format!(
                    "Bernoulli exponent must be >= 2, got {n}"
                )));
            }
            if alpha.norm() == 0.0 || beta.norm() == 0.0 {
                return Err(Error::InvalidArgument(
                    "alpha and beta must be nonzero".into(),
                ));
            }
            if z0.norm() == 0.0 {
                return Ok(z0);
            }
            let m = f64::from(n - 1);
            let ratio = beta / alpha;
            let w0 = z0.powf(-m);
            // w = z^(1-n) solves a linear equation
            let w = |tk: Complex64| ratio + (w0 - ratio) * (alpha * m * tk).exp();
            track_root(z0, t, n - 1, |tk| w(tk).inv())
        }
    }
}

/// Follows the `k`-th root of `g(T)` from `z0` along the segment `[0, t]`.
fn track_root(
    z0: Complex64,
    t: Complex64,
    k: u32,
    g: impl Fn(Complex64) -> Complex64,
) -> Result<Complex64> {
    let mut z = z0;
    let kf = f64::from(k);
    for step in 1..=BRANCH_STEPS {
        let tk = t * (step as f64 / BRANCH_STEPS as f64);
        let v = g(tk);
        if !v.is_finite() || v.norm() <= 1e-300 {
            return Err(Error::DomainViolation(format!(
                "branch point on the path at T = {tk}"
            )));
        }
        let principal = v.powf(1.0 / kf);
        z = (0..k)
            .map(|j| principal * Complex64::from_polar(1.0, TAU * f64::from(j) / kf))
            .min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()))
            .expect("k >= 1");
    }
    Ok(z)
}

/// Largest drifts of `psi` along the real-time flow and of `phi` along the imaginary-time flow.
///
/// The real-time system is `z' = f(z)`; the imaginary-time system is
/// `z' = i f(z)`. The potential is continued along each path.
pub fn complex_time_invariants(
    spec: &SystemSpec,
    rep: &PotentialRep,
    z0: Complex64,
    duration: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64)> {
    if spec.kind != FieldKind::Holomorphic {
        return Err(Error::InvalidArgument(
            "complex-time flows need a holomorphic system".into(),
        ));
    }
    let real_time = |x: f64, y: f64| {
        let v = spec.p.eval(Complex64::new(x, y));
        (v.re, v.im)
    };
    let imag_time = |x: f64, y: f64| {
        let v = spec.p.eval(Complex64::new(x, y));
        (-v.im, v.re)
    };
    let drift = |traj: &crate::odeint::Trajectory, pick: fn(Complex64) -> f64| -> Result<f64> {
        let mut tracker = BranchTracker::new(rep, z0)?;
        let start = pick(tracker.advance(z0)?);
        let mut worst = 0.0f64;
        for s in &traj.samples {
            let v = pick(tracker.advance(Complex64::new(s.x, s.y))?);
            worst = worst.max((v - start).abs());
        }
        Ok(worst)
    };
    let re_path = integrate_field(&real_time, (z0.re, z0.im), duration, cfg)?;
    let im_path = integrate_field(&imag_time, (z0.re, z0.im), duration, cfg)?;
    Ok((drift(&re_path, |w| w.im)?, drift(&im_path, |w| w.re)?))
}
