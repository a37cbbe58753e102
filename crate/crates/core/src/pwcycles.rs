//! Crossing limit cycles of systems switching on the real axis.
//!
//! A crossing cycle meets the axis at two points `x1 > x2`. Each half-plane
//! has a first integral, so a candidate pair must lie on one level set of
//! the upper integral and one level set of the lower integral. The algebraic
//! candidates found here are then checked by integrating both arcs.

use crate::cpoly::{divided_difference, real_roots, resultant_x2, BivarSym, CPoly, RealPoly};
use crate::error::{Error, Result};
use crate::odeint::{half_return, return_map_derivative, IntegratorConfig, Side};
pub use crate::system::PiecewiseSpec;
use crate::system::{FieldKind, PlanarField, SystemSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    NonHyperbolic,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verification {
    /// Solves the matching equations; arcs not integrated.
    Analytic,
    NumericallyConfirmed,
    Rejected,
}

/// A pair of axis crossings `x1 > x2` that may carry a closed orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleCandidate {
    pub x1: f64,
    pub x2: f64,
    /// Derivative of the return map at the crossing.
    pub multiplier: Option<f64>,
    pub stability: Stability,
    pub verified: Verification,
}

impl CycleCandidate {
    fn new(a: f64, b: f64) -> Self {
        CycleCandidate {
            x1: a.max(b),
            x2: a.min(b),
            multiplier: None,
            stability: Stability::Unknown,
            verified: Verification::Analytic,
        }
    }
}

fn stability_of(multiplier: f64) -> Stability {
    if (multiplier - 1.0).abs() <= 1e-6 {
        Stability::NonHyperbolic
    } else if multiplier < 1.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Crossing {
    CrossingUp,
    CrossingDown,
    Tangent,
    Sliding,
}

/// Filippov type of the axis point `(x, 0)`.
pub fn crossing_transversality(spec: &PiecewiseSpec, x: f64) -> Crossing {
    let zero = |u: f64, v: f64| v.abs() <= 1e-12 * u.abs().max(1.0);
    let (uu, vu) = spec.upper.eval(x, 0.0);
    let (ul, vl) = spec.lower.eval(x, 0.0);
    if zero(uu, vu) || zero(ul, vl) {
        Crossing::Tangent
    } else if vu > 0.0 && vl > 0.0 {
        Crossing::CrossingUp
    } else if vu < 0.0 && vl < 0.0 {
        Crossing::CrossingDown
    } else {
        Crossing::Sliding
    }
}

/// Settings for numerical confirmation of candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOptions {
    /// Integrate both arcs of every candidate.
    pub validate: bool,
    pub cfg: IntegratorConfig,
    /// Relative tolerance for the integrated landing points.
    pub landing_tol: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            validate: true,
            cfg: IntegratorConfig::with_tolerance(1e-11),
            landing_tol: 1e-6,
        }
    }
}

/// Integrates the cycle through `(x_down, x_up)`: the upper arc from `x_up`
/// should land at `x_down` and the lower arc from `x_down` back at `x_up`.
fn confirm(spec: &PiecewiseSpec, cand: &mut CycleCandidate, opts: &CycleOptions) -> Result<()> {
    let (x_up, x_down) = match (
        crossing_transversality(spec, cand.x1),
        crossing_transversality(spec, cand.x2),
    ) {
        (Crossing::CrossingUp, Crossing::CrossingDown) => (cand.x1, cand.x2),
        (Crossing::CrossingDown, Crossing::CrossingUp) => (cand.x2, cand.x1),
        _ => {
            cand.verified = Verification::Rejected;
            return Ok(());
        }
    };
    let close = |got: Option<f64>, want: f64| {
        got.is_some_and(|g| (g - want).abs() <= opts.landing_tol * want.abs().max(1.0))
    };
    let upper_ok = close(
        half_return(&spec.upper, x_up, Side::Upper, &opts.cfg)?,
        x_down,
    );
    let lower_ok = close(
        half_return(&spec.lower, x_down, Side::Lower, &opts.cfg)?,
        x_up,
    );
    if !(upper_ok && lower_ok) {
        cand.verified = Verification::Rejected;
        return Ok(());
    }
    cand.verified = Verification::NumericallyConfirmed;
    if cand.multiplier.is_none() {
        if let Some(m) = return_map_derivative(&spec.upper, &spec.lower, x_up, None, &opts.cfg)? {
            cand.multiplier = Some(m);
            cand.stability = stability_of(m);
        }
    }
    Ok(())
}

/// Re-runs the arc integrations for a previously reported candidate.
pub fn verify_candidate(
    spec: &PiecewiseSpec,
    cand: &CycleCandidate,
    opts: &CycleOptions,
) -> Result<CycleCandidate> {
    let mut out = CycleCandidate {
        verified: Verification::Analytic,
        ..*cand
    };
    confirm(spec, &mut out, opts)?;
    Ok(out)
}

/// Piecewise linear system: `z' = conj((a1 + i a2) z + b1 + i b2)` above the
/// axis and `z' = (a + i b)(z - x0 - i y0)` below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedConstants {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub y0: f64,
}

impl MixedConstants {
    pub fn piecewise(&self) -> PiecewiseSpec {
        let lambda = Complex64::new(self.a, self.b);
        let z0 = Complex64::new(self.x0, self.y0);
        PiecewiseSpec {
            upper: SystemSpec::anti_holomorphic(CPoly::new(vec![
                Complex64::new(self.b1, self.b2),
                Complex64::new(self.a1, self.a2),
            ])),
            lower: SystemSpec::holomorphic(CPoly::new(vec![-lambda * z0, lambda])),
        }
    }

    /// `2 x0 + 2 b2 / a2`
    pub fn c(&self) -> f64 {
        2.0 * self.x0 + 2.0 * self.b2 / self.a2
    }

    /// Partner crossing on the same upper level set: `-x - 2 b2 / a2`.
    pub fn l(&self, x: f64) -> f64 {
        -x - 2.0 * self.b2 / self.a2
    }

    fn r(&self, x: f64) -> f64 {
        (x - self.x0).hypot(self.y0)
    }

    fn theta(&self, x: f64) -> f64 {
        (-self.y0).atan2(x - self.x0)
    }

    /// Mismatch of `b ln r - a theta` across the lower arc from `x` to `L(x)`.
    ///
    /// When the lower equilibrium sits below the axis the arc winds around it,
    /// which adds a full turn in the direction of rotation.
    pub fn f(&self, x: f64) -> f64 {
        let lx = self.l(x);
        let wrap = if self.y0 < 0.0 {
            TAU * self.b.signum()
        } else {
            0.0
        };
        self.b * (self.r(lx) / self.r(x)).ln() - self.a * (self.theta(lx) - self.theta(x) + wrap)
    }

    /// `F'(x)` times `R(x)^2 R(L(x))^2`, a quadratic in `u = x - x0`.
    pub fn f_prime_numerator(&self) -> [f64; 3] {
        let (a, b, y0, c) = (self.a, self.b, self.y0, self.c());
        [
            a * y0 * c * c + 2.0 * a * y0.powi(3) + b * c * y0 * y0,
            2.0 * a * y0 * c - b * c * c,
            2.0 * a * y0 - b * c,
        ]
    }

    /// Whether the upper level set through `(x, 0)` reaches `(L(x), 0)` inside `y > 0`.
    ///
    /// The upper field `conj(A z + B)` has its saddle at `z* = -B/A`, and the
    /// level sets of `Im(A (z - z*)^2)` are hyperbolas whose branches are told
    /// apart by the sign of `Re(sqrt(A) (z - z*))`. A line meets one branch in
    /// two points with the bounded arc between them on the saddle's side, so
    /// the saddle must lie above the axis.
    pub fn upper_arc_joins(&self, x: f64) -> bool {
        let big_a = Complex64::new(self.a1, self.a2);
        let z_star = -Complex64::new(self.b1, self.b2) / big_a;
        let root = big_a.sqrt();
        let side = |w: f64| (root * (Complex64::new(w, 0.0) - z_star)).re;
        z_star.im > 0.0 && side(x) * side(self.l(x)) > 0.0
    }

    fn check(&self) -> Result<()> {
        if self.a2 == 0.0 {
            return Err(Error::HypothesisViolation("a2 must be nonzero".into()));
        }
        if self.b == 0.0 {
            return Err(Error::HypothesisViolation("b must be nonzero".into()));
        }
        let all = [
            self.a1, self.a2, self.b1, self.b2, self.a, self.b, self.x0, self.y0,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("constants must be finite".into()));
        }
        Ok(())
    }
}

/// The mixed linear system with its lower equilibrium `x0` on the axis has at most one crossing cycle.
///
/// In `w = z - x0` the lower arc turns by a half-rotation while scaling by
/// `e^{a pi/|b|}`, which fixes the negative crossing at
/// `2 b2~ / (a2 (e^{a pi/b} - 1))` with `b2~ = a2 x0 + b2`. The pair is kept
/// only if the Filippov directions allow a crossing cycle and the upper
/// level set joins the two points above the axis.
pub fn solve_mixed_linear_on_sigma(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    a: f64,
    b: f64,
    x0: f64,
) -> Result<Vec<CycleCandidate>> {
    let k = MixedConstants {
        a1,
        a2,
        b1,
        b2,
        a,
        b,
        x0,
        y0: 0.0,
    };
    k.check()?;
    let bt2 = a2 * x0 + b2;
    if a == 0.0 {
        if bt2 == 0.0 {
            return Err(Error::CenterContinuum { center: x0 });
        }
        return Ok(Vec::new());
    }
    let growth = (a * PI / b).exp();
    let neg = 2.0 * bt2 / (a2 * (growth - 1.0));
    let pos = -neg - 2.0 * bt2 / a2;
    if !(neg < 0.0 && pos > 0.0 && a2 * b < 0.0) {
        return Ok(Vec::new());
    }
    if !k.upper_arc_joins(pos + x0) {
        return Ok(Vec::new());
    }
    let multiplier = (a * PI / b.abs()).exp();
    let mut cand = CycleCandidate::new(pos + x0, neg + x0);
    cand.multiplier = Some(multiplier);
    cand.stability = if a < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    Ok(vec![cand])
}

/// [`solve_mixed_linear_on_sigma`] followed by integration of both arcs.
pub fn solve_mixed_linear_checked(
    k: &MixedConstants,
    opts: &CycleOptions,
) -> Result<Vec<CycleCandidate>> {
    let mut out = solve_mixed_linear_on_sigma(k.a1, k.a2, k.b1, k.b2, k.a, k.b, k.x0)?;
    if opts.validate {
        let spec = k.piecewise();
        for c in &mut out {
            confirm(&spec, c, opts)?;
        }
    }
    Ok(out)
}

/// Crossing cycles of the mixed linear system with arbitrary lower equilibrium; at most three.
///
/// Roots of `F` are searched where `x` can start the lower arc and `L(x)` can
/// end it. The quadratic numerator of `F'` splits that interval into monotone
/// pieces, each bisected on a sign change. Candidates are integrated when
/// `opts.validate` is set.
pub fn solve_mixed_general(
    k: &MixedConstants,
    tol: f64,
    opts: &CycleOptions,
) -> Result<Vec<CycleCandidate>> {
    k.check()?;
    if k.y0 == 0.0 {
        return solve_mixed_linear_checked(k, opts);
    }
    let c = k.c();
    let scale = 1.0 + k.x0.abs() + (2.0 * k.b2 / k.a2).abs() + k.y0.abs();
    if k.a == 0.0 && c.abs() <= 1e-12 * scale {
        return Err(Error::CenterContinuum { center: k.x0 });
    }

    let Some((lo, hi)) = start_interval(k, scale) else {
        return Ok(Vec::new());
    };
    let q = k.f_prime_numerator();
    let critical = RealPoly::new(q.to_vec());
    let mut cuts = vec![lo];
    if !critical.is_zero() {
        for u in real_roots(&critical, None, 1e-14)? {
            let x = u + k.x0;
            if x > lo && x < hi {
                cuts.push(x);
            }
        }
    }
    cuts.push(hi);

    let mut roots: Vec<f64> = Vec::new();
    for w in cuts.windows(2) {
        if let Some(x) = bisect(|x| k.f(x), w[0], w[1], tol) {
            if !roots.iter().any(|r| (r - x).abs() <= 10.0 * tol * scale) {
                roots.push(x);
            }
        }
    }

    let spec = k.piecewise();
    let mut out = Vec::new();
    for x in roots {
        let lx = k.l(x);
        if (x - lx).abs() <= 1e-9 * scale || !k.upper_arc_joins(x) {
            continue;
        }
        let mut cand = CycleCandidate::new(x, lx);
        if opts.validate {
            confirm(&spec, &mut cand, opts)?;
        }
        out.push(cand);
    }
    Ok(out)
}

/// Open interval of lower-arc start points whose partner `L(x)` can end the arc.
///
/// At the start both fields point down, at the partner both point up; every
/// condition is linear in `x`.
fn start_interval(k: &MixedConstants, scale: f64) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    // each entry (s, t) encodes s * x + t < 0
    let lower_vy =
        |x_coef: f64, offset: f64| (k.b * x_coef, k.b * offset - k.a * k.y0 - k.b * k.x0);
    let upper_vy = |x_coef: f64, offset: f64| (-k.a2 * x_coef, -(k.a2 * offset + k.b2));
    let l_off = -2.0 * k.b2 / k.a2;
    let (s1, t1) = lower_vy(1.0, 0.0);
    let (s2, t2) = upper_vy(1.0, 0.0);
    let (s3, t3) = lower_vy(-1.0, l_off);
    let (s4, t4) = upper_vy(-1.0, l_off);
    let conds = [(s1, t1), (s2, t2), (-s3, -t3), (-s4, -t4)];
    for (s, t) in conds {
        if s == 0.0 {
            if t >= 0.0 {
                return None;
            }
        } else if s > 0.0 {
            hi = hi.min(-t / s);
        } else {
            lo = lo.max(-t / s);
        }
    }
    let far = 1e8 * scale;
    let lo = lo.max(k.x0 - far);
    let hi = hi.min(k.x0 + far);
    (lo < hi).then_some((lo, hi))
}

/// Root of a continuous `f` with a sign change on the open interval `(a, b)`.
fn bisect(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    let inset = 1e-12 * (b - a).max(1e-300);
    let (mut lo, mut hi) = (a + inset, b - inset);
    let mut flo = f(lo);
    let fhi = f(hi);
    if !(flo.is_finite() && fhi.is_finite()) || flo * fhi > 0.0 {
        return None;
    }
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs().max(1.0) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `Im` of the primitive of `p` on the real axis.
pub fn axis_stream_function(p: &CPoly) -> RealPoly {
    p.antiderivative().imag_part()
}

/// Largest number of crossing cycles guaranteed for these degrees, when known.
pub fn antiholo_degree_bound(spec: &PiecewiseSpec) -> Option<usize> {
    let (dp, dm) = (spec.upper.p.degree(), spec.lower.p.degree());
    if dp != dm {
        return None;
    }
    match dp {
        1 => Some(0),
        2 => Some(1),
        3 => Some(3),
        _ => None,
    }
}

/// Crossing cycles of a system that is anti-holomorphic on both sides.
///
/// The upper and lower stream functions restricted to the axis give the
/// symmetric matching polynomials `c+` and `c-`; the resultant in `x2`
/// projects their common zeros. For each real root every common `x2` is
/// polished by Newton's method on both equations. Degrees above three (or
/// unequal degrees) run the same pipeline with stability left `Unknown`.
pub fn solve_antiholo_pair(
    spec: &PiecewiseSpec,
    tol: f64,
    opts: &CycleOptions,
) -> Result<Vec<CycleCandidate>> {
    for side in [&spec.upper, &spec.lower] {
        if side.kind != FieldKind::AntiHolomorphic {
            return Err(Error::InvalidArgument(
                "both sides must be anti-holomorphic".into(),
            ));
        }
        if side.p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
    }
    let cp = divided_difference(&axis_stream_function(&spec.upper.p));
    let cm = divided_difference(&axis_stream_function(&spec.lower.p));
    let pairs = matching_pairs(&cp, &cm, tol)?;

    let known_bound = antiholo_degree_bound(spec).is_some();
    let mut out = Vec::new();
    for (a, b) in pairs {
        let mut cand = CycleCandidate::new(a, b);
        if opts.validate {
            confirm(spec, &mut cand, opts)?;
        }
        if !known_bound {
            cand.stability = Stability::Unknown;
        }
        out.push(cand);
    }
    Ok(out)
}

/// Resultant in `x2` of the upper and lower matching polynomials, a polynomial in `x1`.
pub fn antiholo_resultant(spec: &PiecewiseSpec) -> Result<RealPoly> {
    let cp = divided_difference(&axis_stream_function(&spec.upper.p));
    let cm = divided_difference(&axis_stream_function(&spec.lower.p));
    resultant_x2(&cp, &cm)
}

/// Unordered real pairs `x1 != x2` with `c+(x1, x2) = c-(x1, x2) = 0`.
fn matching_pairs(cp: &BivarSym, cm: &BivarSym, tol: f64) -> Result<Vec<(f64, f64)>> {
    let r = resultant_x2(cp, cm)?;
    if r.is_zero() {
        return Err(Error::ContinuumDetected);
    }
    if r.degree() == 0 {
        return Ok(Vec::new());
    }
    let scale = |x: f64| x.abs().max(1.0);
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for x1 in real_roots(&r, None, tol)? {
        let up = cp.poly().at_x(x1);
        let down = cm.poly().at_x(x1);
        if up.is_zero() || down.is_zero() {
            continue;
        }
        let ru = real_roots(&up, None, tol)?;
        let rd = real_roots(&down, None, tol)?;
        for &u in &ru {
            for &d in &rd {
                if (u - d).abs() > 1e-6 * scale(u).max(scale(x1)) {
                    continue;
                }
                let (a, b) = polish(cp, cm, x1, 0.5 * (u + d));
                if (a - b).abs() <= 1e-7 * scale(a) {
                    continue;
                }
                let (hi, lo) = (a.max(b), a.min(b));
                let dup = pairs.iter().any(|&(p, q)| {
                    (p - hi).abs() <= 1e-7 * scale(hi) && (q - lo).abs() <= 1e-7 * scale(lo)
                });
                if !dup {
                    pairs.push((hi, lo));
                }
            }
        }
    }
    Ok(pairs)
}

/// Newton iterations on `(c+, c-) = 0` from `(x1, x2)`.
fn polish(cp: &BivarSym, cm: &BivarSym, mut x1: f64, mut x2: f64) -> (f64, f64) {
    let (px, py) = (cp.poly().partial_x(), cp.poly().partial_y());
    let (mx, my) = (cm.poly().partial_x(), cm.poly().partial_y());
    for _ in 0..20 {
        let f = cp.eval(x1, x2);
        let g = cm.eval(x1, x2);
        let (j11, j12) = (px.eval(x1, x2), py.eval(x1, x2));
        let (j21, j22) = (mx.eval(x1, x2), my.eval(x1, x2));
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let d1 = (f * j22 - g * j12) / det;
        let d2 = (g * j11 - f * j21) / det;
        if !(d1.is_finite() && d2.is_finite()) {
            break;
        }
        x1 -= d1;
        x2 -= d2;
        if d1.abs().max(d2.abs()) <= 1e-16 * x1.abs().max(x2.abs()).max(1.0) {
            break;
        }
    }
    (x1, x2)
}
