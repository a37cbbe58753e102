//! Fixed inputs shared by the benchmarks.

use holoflow::cpoly::CPoly;
use holoflow::system::{PiecewiseSpec, SystemSpec};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Polynomial of degree `n` with roots spread on a spiral.
pub fn spiral_poly(n: usize) -> CPoly {
    let roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 + k as f64 / n as f64, 2.4 * k as f64))
        .collect();
    CPoly::from_roots(&roots)
}

/// Quadratic anti-holomorphic pair with one crossing limit cycle.
pub fn quadratic_pair() -> PiecewiseSpec {
    let s = 33f64.sqrt();
    let k = (-1.0 + s) / (-19.0 + 3.0 * s);
    PiecewiseSpec {
        upper: SystemSpec::anti_holomorphic(CPoly::new(vec![
            c(1.0, 0.5),
            c(2.0, 1.5),
            c(3.0, 0.5),
        ])),
        lower: SystemSpec::anti_holomorphic(CPoly::new(vec![
            c(-3.0, 1.0),
            c(-1.0, 1.0),
            c(-4.0, k),
        ])),
    }
}

/// Cubic anti-holomorphic pair.
pub fn cubic_pair() -> PiecewiseSpec {
    PiecewiseSpec {
        upper: SystemSpec::anti_holomorphic(CPoly::new(vec![
            c(0.3, -0.2),
            c(1.0, 0.7),
            c(-0.4, 0.1),
            c(0.5, 0.9),
        ])),
        lower: SystemSpec::anti_holomorphic(CPoly::new(vec![
            c(-0.6, 0.4),
            c(0.8, -1.1),
            c(0.2, 0.3),
            c(-0.7, 0.5),
        ])),
    }
}

/// `(A1, A0)` of the ten cubic configurations.
pub fn cubic_table() -> Vec<(Complex64, Complex64)> {
    let s2 = 2f64.sqrt();
    vec![
        (c(0.0, -1.0), c(0.0, 0.0)),
        (c(-1.0, 0.0), c(0.0, 0.0)),
        (c(0.0, 0.0), c(0.0, 0.0)),
        (c(4.0, 6.0), c(4.0, -12.0)),
        (c(0.0, -3.0), c(-s2, s2)),
        (c(-3.0, 0.0), c(2.0, 0.0)),
        (c(9.0, -12.0), c(-22.0, -4.0)),
        (c(0.0, 3.0), c(5.0, -5.0)),
        (c(0.25, 0.0), c(-1.25, 0.0)),
        (
            c(-343.0 / 7500.0, 1152.0 / 625.0),
            c(-1542592.0 / 1687500.0, -1433619.0 / 1687500.0),
        ),
    ]
}

/// `z' = z^3 - z`.
pub fn cubic_field() -> SystemSpec {
    SystemSpec::holomorphic(CPoly::from_real(&[0.0, -1.0, 0.0, 1.0]))
}
