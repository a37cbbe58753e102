//! Adaptive Dormand–Prince 5(4) integration of planar fields.
//!
//! Besides plain trajectories this provides the crossing machinery used to
//! check cycle candidates: half-returns to the real axis, the composed return
//! map and its finite-difference derivative.

use crate::classify::InfinityEquilibrium;
use crate::cpoly::CPoly;
use crate::error::{Error, Result};
use crate::system::{PlanarField, SystemSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Points farther than this from the origin count as escaped to infinity.
pub const BLOWUP_RADIUS: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Target `|y|` at a located axis crossing.
    pub event_tol: f64,
    /// Time budget for open-ended integrations (half-returns).
    pub max_time: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-9,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
            event_tol: 1e-12,
            max_time: 1e3,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        IntegratorConfig {
            rel_tol: tol,
            abs_tol: tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.event_tol > 0.0
            && self.max_step > 0.0
            && self.max_time > 0.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "integrator tolerances and limits must be positive".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    TimeReached,
    /// Landed on the real axis at this `x`.
    EventHit(f64),
    Blowup,
    StepLimit,
    /// Reached the axis with vanishing normal velocity at this `x`.
    Tangent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    t0: f64,
    h: f64,
    rcont: [[f64; 2]; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> [f64; 2] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])))
        })
    }
}

/// Integrated path with dense output between accepted steps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminal: Terminal,
    segments: Vec<Segment>,
    direction: f64,
}

impl Trajectory {
    pub fn last(&self) -> Sample {
        *self
            .samples
            .last()
            .expect("trajectory has at least its initial point")
    }

    pub fn end_point(&self) -> Complex64 {
        let s = self.last();
        Complex64::new(s.x, s.y)
    }

    /// Interpolated state at time `t` inside the integrated span.
    pub fn at(&self, t: f64) -> Option<(f64, f64)> {
        let tau = t * self.direction;
        let seg = self
            .segments
            .iter()
            .find(|s| tau >= s.t0 && tau <= s.t0 + s.h)?;
        let y = seg.eval(tau);
        Some((y[0], y[1]))
    }

    pub fn max_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.x.hypot(s.y))
            .fold(0.0, f64::max)
    }

    /// Writes the samples as CSV with columns `t,x,y`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type State = [f64; 2];

fn axpy(y: &State, terms: &[(f64, &State)]) -> State {
    std::array::from_fn(|i| y[i] + terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

struct StepResult {
    y1: State,
    k7: State,
    err: f64,
    stages: [State; 7],
}

struct Stepper<'f, F: PlanarField + ?Sized> {
    field: &'f F,
    sign: f64,
    cfg: IntegratorConfig,
}

impl<F: PlanarField + ?Sized> Stepper<'_, F> {
    fn f(&self, y: &State) -> State {
        let (u, v) = self.field.eval(y[0], y[1]);
        [self.sign * u, self.sign * v]
    }

    fn attempt(&self, y: &State, k1: &State, h: f64) -> StepResult {
        let k2 = self.f(&axpy(y, &[(h * A21, k1)]));
        let k3 = self.f(&axpy(y, &[(h * A31, k1), (h * A32, &k2)]));
        let k4 = self.f(&axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = self.f(&axpy(
            y,
            &[
                (h * A51, k1),
                (h * A52, &k2),
                (h * A53, &k3),
                (h * A54, &k4),
            ],
        ));
        let k6 = self.f(&axpy(
            y,
            &[
                (h * A61, k1),
                (h * A62, &k2),
                (h * A63, &k3),
                (h * A64, &k4),
                (h * A65, &k5),
            ],
        ));
        let y1 = axpy(
            y,
            &[
                (h * A71, k1),
                (h * A73, &k3),
                (h * A74, &k4),
                (h * A75, &k5),
                (h * A76, &k6),
            ],
        );
        let k7 = self.f(&y1);
        let mut acc = 0.0;
        for i in 0..2 {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs().max(y1[i].abs());
            acc += (e / sk).powi(2);
        }
        let err = (acc / 2.0).sqrt();
        let err = if err.is_finite() { err } else { f64::INFINITY };
        StepResult {
            y1,
            k7,
            err,
            stages: [*k1, k2, k3, k4, k5, k6, k7],
        }
    }

    fn dense(&self, t0: f64, h: f64, y: &State, r: &StepResult) -> Segment {
        let k = &r.stages;
        let mut rcont = [[0.0; 2]; 5];
        for i in 0..2 {
            let ydiff = r.y1[i] - y[i];
            let bspl = h * k[0][i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * r.k7[i] - bspl;
            rcont[4][i] = h
                * (D1 * k[0][i]
                    + D3 * k[2][i]
                    + D4 * k[3][i]
                    + D5 * k[4][i]
                    + D6 * k[5][i]
                    + D7 * k[6][i]);
        }
        Segment { t0, h, rcont }
    }

    fn initial_step(&self, y: &State, k1: &State, span: f64) -> f64 {
        let sk: State = std::array::from_fn(|i| self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs());
        let dnf: f64 = (0..2).map(|i| (k1[i] / sk[i]).powi(2)).sum::<f64>() / 2.0;
        let dny: f64 = (0..2).map(|i| (y[i] / sk[i]).powi(2)).sum::<f64>() / 2.0;
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(self.cfg.max_step).min(span);
        let k2 = self.f(&axpy(y, &[(h, k1)]));
        let der2 = ((0..2)
            .map(|i| ((k2[i] - k1[i]) / sk[i]).powi(2))
            .sum::<f64>()
            / 2.0)
            .sqrt()
            / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(0.2)
        };
        (100.0 * h).min(h1).min(self.cfg.max_step).min(span)
    }
}

/// What the driver should do after an accepted step.
enum Control {
    Continue,
    Stop(Terminal),
}

struct Accepted<'a> {
    t0: f64,
    h: f64,
    y0: State,
    y1: State,
    k1: State,
    segment: &'a Segment,
}

fn drive<F: PlanarField + ?Sized>(
    field: &F,
    start: State,
    span: f64,
    sign: f64,
    cfg: &IntegratorConfig,
    mut on_step: impl FnMut(&Stepper<'_, F>, &Accepted<'_>) -> Control,
) -> Result<Trajectory> {
    cfg.validate()?;
    if !(start[0].is_finite() && start[1].is_finite()) {
        return Err(Error::InvalidArgument(
            "initial point must be finite".into(),
        ));
    }
    let stepper = Stepper {
        field,
        sign,
        cfg: *cfg,
    };
    let mut traj = Trajectory {
        samples: vec![Sample {
            t: 0.0,
            x: start[0],
            y: start[1],
        }],
        terminal: Terminal::TimeReached,
        segments: Vec::new(),
        direction: sign,
    };
    let mut t = 0.0;
    let mut y = start;
    let mut k1 = stepper.f(&y);
    if !(k1[0].is_finite() && k1[1].is_finite()) {
        traj.terminal = Terminal::Blowup;
        return Ok(traj);
    }
    let mut h = stepper.initial_step(&y, &k1, span);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while t < span {
        if steps >= cfg.max_steps {
            traj.terminal = Terminal::StepLimit;
            return Ok(traj);
        }
        steps += 1;
        let last = t + h >= span;
        if last {
            h = span - t;
        }
        let r = stepper.attempt(&y, &k1, h);
        if r.err > 1.0 {
            let fac = (0.9 * r.err.powf(-0.2)).max(0.2);
            h *= fac;
            last_rejected = true;
            if h < 1e-14 * t.abs().max(1.0) {
                // the field varies faster than representable step sizes
                traj.terminal = Terminal::Blowup;
                return Ok(traj);
            }
            continue;
        }
        let segment = stepper.dense(t, h, &y, &r);
        let y1 = r.y1;
        let t1 = if last { span } else { t + h };
        let control = on_step(
            &stepper,
            &Accepted {
                t0: t,
                h,
                y0: y,
                y1,
                k1,
                segment: &segment,
            },
        );
        if let Control::Stop(term) = control {
            traj.terminal = term;
            traj.segments.push(segment);
            return Ok(traj);
        }
        traj.segments.push(segment);
        traj.samples.push(Sample {
            t: t1 * sign,
            x: y1[0],
            y: y1[1],
        });
        t = t1;
        y = y1;
        k1 = r.k7;
        if y[0].hypot(y[1]) > BLOWUP_RADIUS || !(y[0].is_finite() && y[1].is_finite()) {
            traj.terminal = Terminal::Blowup;
            return Ok(traj);
        }
        let mut fac = if r.err == 0.0 {
            5.0
        } else {
            (0.9 * r.err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h = (h * fac).min(cfg.max_step);
    }
    Ok(traj)
}

/// Integrates an arbitrary planar field from `(x0, y0)` for time `t_end` (negative runs backward).
pub fn integrate_field<F: PlanarField + ?Sized>(
    field: &F,
    start: (f64, f64),
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if t_end == 0.0 || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t_end must be finite and nonzero, got {t_end}"
        )));
    }
    let sign = t_end.signum();
    drive(field, [start.0, start.1], t_end.abs(), sign, cfg, |_, _| {
        Control::Continue
    })
}

/// Integrates a polynomial system from `z0` for time `t_end`.
pub fn integrate(
    spec: &SystemSpec,
    z0: Complex64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_field(spec, (z0.re, z0.im), t_end, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
        }
    }
}

/// Follows the arc that leaves `(x_start, 0)` into `side` until it returns to the axis.
///
/// The terminal is `EventHit(x)` with `|y| <= event_tol` at the landing point,
/// `Tangent(x)` when it lands with vanishing normal velocity, or whatever
/// stopped the integration first (`TimeReached` after `max_time`).
pub fn arc_to_axis<F: PlanarField + ?Sized>(
    field: &F,
    x_start: f64,
    side: Side,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let (_, v) = field.eval(x_start, 0.0);
    let inward = v * side.sign();
    if inward.is_nan() || inward <= 0.0 {
        return Err(Error::NotEntering {
            x: x_start,
            side: side.name(),
        });
    }
    let s = side.sign();
    let mut t_hit = 0.0;
    let mut traj = drive(field, [x_start, 0.0], cfg.max_time, 1.0, cfg, |st, acc| {
        let departed = acc.y0[1] * s > 0.0 || acc.t0 == 0.0;
        if departed && acc.y1[1] * s <= 0.0 {
            let (t, x, speed, vy) = locate_crossing(st, acc);
            t_hit = t;
            if vy.abs() <= 1e-9 * speed.max(f64::MIN_POSITIVE) {
                Control::Stop(Terminal::Tangent(x))
            } else {
                Control::Stop(Terminal::EventHit(x))
            }
        } else {
            Control::Continue
        }
    })?;
    if let Terminal::EventHit(x) | Terminal::Tangent(x) = traj.terminal {
        traj.samples.push(Sample {
            t: t_hit,
            x,
            y: 0.0,
        });
    }
    Ok(traj)
}

/// Locates the axis crossing inside an accepted step.
///
/// Bisection on the dense output brackets the time; Newton iterations on a
/// fresh single step from the step start then drive `|y|` to `event_tol`.
/// Returns the landing time and `x`, the speed there and the normal velocity.
fn locate_crossing<F: PlanarField + ?Sized>(
    st: &Stepper<'_, F>,
    acc: &Accepted<'_>,
) -> (f64, f64, f64, f64) {
    let seg = acc.segment;
    let y_at = |t: f64| seg.eval(t)[1];
    let (mut lo, mut hi) = (acc.t0, acc.t0 + acc.h);
    let y_lo0 = acc.y0[1];
    // at the very first step y0 is zero; bracket from a point just inside the arc
    let mut y_lo = if y_lo0 == 0.0 {
        y_at(lo + 1e-6 * acc.h)
    } else {
        y_lo0
    };
    if y_lo0 == 0.0 {
        lo += 1e-6 * acc.h;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let ym = y_at(mid);
        if ym == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (ym > 0.0) == (y_lo > 0.0) {
            lo = mid;
            y_lo = ym;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }

    let mut s = 0.5 * (lo + hi) - acc.t0;
    let mut state = seg.eval(acc.t0 + s);
    for _ in 0..8 {
        let r = st.attempt(&acc.y0, &acc.k1, s);
        state = r.y1;
        if state[1].abs() <= st.cfg.event_tol {
            break;
        }
        let v = r.k7[1];
        if v == 0.0 {
            break;
        }
        s -= state[1] / v;
    }
    let (u, v) = st.field.eval(state[0], 0.0);
    (acc.t0 + s, state[0], u.hypot(v), v)
}

/// Landing point of the half-return from `(x_start, 0)` through `side`; `None` if it never lands.
pub fn half_return<F: PlanarField + ?Sized>(
    field: &F,
    x_start: f64,
    side: Side,
    cfg: &IntegratorConfig,
) -> Result<Option<f64>> {
    let traj = arc_to_axis(field, x_start, side, cfg)?;
    Ok(match traj.terminal {
        Terminal::EventHit(x) => Some(x),
        _ => None,
    })
}

/// Full return to the axis: one arc through each half-plane.
///
/// The first leg goes into whichever half-plane the field at `(x_start, 0)`
/// enters; `upper` governs `y > 0` and `lower` governs `y < 0`.
pub fn return_map<U, L>(
    upper: &U,
    lower: &L,
    x_start: f64,
    cfg: &IntegratorConfig,
) -> Result<Option<f64>>
where
    U: PlanarField + ?Sized,
    L: PlanarField + ?Sized,
{
    let (_, vu) = upper.eval(x_start, 0.0);
    let (_, vl) = lower.eval(x_start, 0.0);
    if vu > 0.0 {
        let Some(x1) = half_return(upper, x_start, Side::Upper, cfg)? else {
            return Ok(None);
        };
        half_return(lower, x1, Side::Lower, cfg)
    } else if vl < 0.0 {
        let Some(x1) = half_return(lower, x_start, Side::Lower, cfg)? else {
            return Ok(None);
        };
        half_return(upper, x1, Side::Upper, cfg)
    } else {
        Err(Error::NotEntering {
            x: x_start,
            side: "either",
        })
    }
}

/// Central difference of the return map; `h` defaults to `1e-5 * max(1, |x|)`.
pub fn return_map_derivative<U, L>(
    upper: &U,
    lower: &L,
    x: f64,
    h: Option<f64>,
    cfg: &IntegratorConfig,
) -> Result<Option<f64>>
where
    U: PlanarField + ?Sized,
    L: PlanarField + ?Sized,
{
    let h = h.unwrap_or(1e-5 * x.abs().max(1.0));
    let plus = return_map(upper, lower, x + h, cfg)?;
    let minus = return_map(upper, lower, x - h, cfg)?;
    Ok(match (plus, minus) {
        (Some(a), Some(b)) => Some((a - b) / (2.0 * h)),
        _ => None,
    })
}

/// Radius of the planar point at distance `1e-4` from the rim of the Poincaré disk.
pub fn separatrix_seed_radius() -> f64 {
    let rho: f64 = 1.0 - 1e-4;
    rho / (1.0 - rho * rho).sqrt()
}

/// Traces the separatrix that a saddle at infinity sends into the finite plane.
///
/// The seed sits on the saddle's ray near the rim of the Poincaré disk; the
/// time direction is chosen so the trajectory moves inward.
pub fn trace_separatrix(
    p: &CPoly,
    inf_eq: &InfinityEquilibrium,
    duration: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if p.degree() < 2 {
        return Err(Error::InvalidArgument(
            "separatrices at infinity need degree >= 2".into(),
        ));
    }
    if duration.is_nan() || duration <= 0.0 {
        return Err(Error::InvalidArgument("duration must be positive".into()));
    }
    let n = p.degree() as f64;
    let dir = Complex64::from_polar(1.0, inf_eq.angle);
    let radial = (p.leading() * Complex64::from_polar(1.0, (n - 1.0) * inf_eq.angle)).re;
    let z0 = dir * separatrix_seed_radius();
    let t_end = if radial > 0.0 { -duration } else { duration };
    integrate(&SystemSpec::holomorphic(p.clone()), z0, t_end, cfg)
}
