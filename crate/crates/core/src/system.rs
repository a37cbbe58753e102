//! Planar systems: polynomial fields in complex notation and their piecewise gluing.

use crate::cpoly::CPoly;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Anything that assigns a velocity `(x', y')` to a point of the plane.
pub trait PlanarField {
    fn eval(&self, x: f64, y: f64) -> (f64, f64);
}

impl<F: Fn(f64, f64) -> (f64, f64)> PlanarField for F {
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        self(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// `z' = p(z)`
    Holomorphic,
    /// `z' = conj(p(z))`
    AntiHolomorphic,
}

/// A polynomial planar system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: FieldKind,
    pub p: CPoly,
}

impl SystemSpec {
    pub fn holomorphic(p: CPoly) -> Self {
        SystemSpec {
            kind: FieldKind::Holomorphic,
            p,
        }
    }

    pub fn anti_holomorphic(p: CPoly) -> Self {
        SystemSpec {
            kind: FieldKind::AntiHolomorphic,
            p,
        }
    }

    /// Velocity `x' + i y'` at `z`.
    pub fn velocity(&self, z: Complex64) -> Complex64 {
        let v = self.p.eval(z);
        match self.kind {
            FieldKind::Holomorphic => v,
            FieldKind::AntiHolomorphic => v.conj(),
        }
    }
}

impl PlanarField for SystemSpec {
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let v = self.velocity(Complex64::new(x, y));
        (v.re, v.im)
    }
}

/// Two systems glued along the real axis: `upper` governs `y > 0`, `lower` governs `y < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSpec {
    pub upper: SystemSpec,
    pub lower: SystemSpec,
}

impl PlanarField for PiecewiseSpec {
    /// Uses `upper` on the axis itself.
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        if y >= 0.0 {
            self.upper.eval(x, y)
        } else {
            self.lower.eval(x, y)
        }
    }
}
