use approx::assert_abs_diff_eq;
use holoflow::cpoly::CPoly;
use holoflow::flowstats::{
    closed_form_flow, complex_time_invariants, contour_integral, contour_integral_spec,
    ClosedFormFlow, Curve, DEFAULT_NODES,
};
use holoflow::odeint::{integrate, IntegratorConfig, Terminal};
use holoflow::potential::build_potential;
use holoflow::system::SystemSpec;
use holoflow::{Complex64, Error};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn linear_field_around_equilibrium() {
    let (a, b, eps) = (0.7, -1.3, 0.01);
    let z0 = c(0.4, -0.2);
    let curve = Curve::Circle {
        center: z0,
        radius: eps,
        counterclockwise: true,
    };
    let r = contour_integral(|z| c(a, b) * (z - z0), &curve, DEFAULT_NODES).unwrap();
    assert_abs_diff_eq!(r.circulation, TAU * eps * eps * b, epsilon = 1e-15);
    assert_abs_diff_eq!(r.net_flow, TAU * eps * eps * a, epsilon = 1e-15);

    let cw = Curve::Circle {
        center: z0,
        radius: eps,
        counterclockwise: false,
    };
    let r2 = contour_integral(|z| c(a, b) * (z - z0), &cw, DEFAULT_NODES).unwrap();
    assert_abs_diff_eq!(r2.circulation, -r.circulation, epsilon = 1e-15);
}

#[test]
fn polygon_measures_enclosed_area() {
    // for f = z the integral of conj(z) dz is 2i times the area
    let square = Curve::Polygon(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]);
    let r = contour_integral(|z| z, &square, DEFAULT_NODES).unwrap();
    assert_abs_diff_eq!(r.circulation, 0.0, epsilon = 1e-13);
    assert_abs_diff_eq!(r.net_flow, 4.0, epsilon = 1e-13);

    let tri = Curve::Polygon(vec![c(0.0, 0.0), c(3.0, 0.0), c(0.0, 2.0)]);
    let r = contour_integral(|z| z, &tri, DEFAULT_NODES).unwrap();
    assert_abs_diff_eq!(r.net_flow, 6.0, epsilon = 1e-13);
}

#[test]
fn custom_curve_matches_circle() {
    let spec = SystemSpec::holomorphic(CPoly::new(vec![
        c(0.3, 0.0),
        c(0.0, -1.0),
        c(0.2, 0.5),
        c(1.0, 0.0),
    ]));
    let circle = contour_integral_spec(
        &spec,
        &Curve::Circle {
            center: c(0.1, 0.2),
            radius: 1.5,
            counterclockwise: true,
        },
        DEFAULT_NODES,
    )
    .unwrap();
    let custom = Curve::Custom(Box::new(|s: f64| {
        let e = Complex64::from_polar(1.0, TAU * s);
        (c(0.1, 0.2) + 1.5 * e, c(0.0, TAU * 1.5) * e)
    }));
    let r = contour_integral_spec(&spec, &custom, DEFAULT_NODES).unwrap();
    assert_abs_diff_eq!(r.circulation, circle.circulation, epsilon = 1e-10);
    assert_abs_diff_eq!(r.net_flow, circle.net_flow, epsilon = 1e-10);
}

#[test]
fn antiholomorphic_polynomial_has_no_circulation_or_flux() {
    let spec =
        SystemSpec::anti_holomorphic(CPoly::new(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, 1.0)]));
    let r = contour_integral_spec(&spec, &Curve::unit_circle(), DEFAULT_NODES).unwrap();
    assert_abs_diff_eq!(r.circulation, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.net_flow, 0.0, epsilon = 1e-12);
}

#[test]
fn contour_errors() {
    // the first circle node sits on the pole at 1
    let r = contour_integral(|z| (z - 1.0).inv(), &Curve::unit_circle(), 64);
    assert!(matches!(r, Err(Error::FieldSingularOnCurve { .. })));
    let r = contour_integral(|z| z, &Curve::Polygon(vec![c(0.0, 0.0), c(1.0, 0.0)]), 64);
    assert!(matches!(r, Err(Error::InvalidArgument(_))));
    assert!(matches!(
        contour_integral(|z| z, &Curve::unit_circle(), 1),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn bernoulli_agrees_with_integration() {
    let cfg = IntegratorConfig::with_tolerance(1e-12);
    for (n, alpha, beta, z0) in [
        (2u32, c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.2)),
        (3, c(0.5, 1.0), c(2.0, -1.0), c(0.3, -0.4)),
        (4, c(-1.0, 0.5), c(0.5, 0.5), c(-0.6, 0.1)),
    ] {
        let mut coeffs = vec![c(0.0, 0.0); n as usize + 1];
        coeffs[1] = -alpha;
        coeffs[n as usize] = beta;
        let spec = SystemSpec::holomorphic(CPoly::new(coeffs));
        let t = 0.8;
        let tr = integrate(&spec, z0, t, &cfg).unwrap();
        assert_eq!(tr.terminal, Terminal::TimeReached);
        let flow = ClosedFormFlow::Bernoulli { n, alpha, beta };
        let z = closed_form_flow(&flow, z0, c(t, 0.0)).unwrap();
        assert!(
            (z - tr.end_point()).norm() < 1e-8,
            "n = {n}: {z} vs {}",
            tr.end_point()
        );
    }
}

#[test]
fn closed_form_domain_errors() {
    assert!(matches!(
        closed_form_flow(&ClosedFormFlow::Quadratic, c(1.0, 0.0), c(1.0, 0.0)),
        Err(Error::DomainViolation(_))
    ));
    assert!(matches!(
        closed_form_flow(&ClosedFormFlow::Reciprocal, c(0.0, 0.0), c(1.0, 0.0)),
        Err(Error::DomainViolation(_))
    ));
    let z = closed_form_flow(&ClosedFormFlow::Constant, c(1.0, 2.0), c(0.5, -1.0)).unwrap();
    assert_eq!(z, c(1.5, 1.0));
}

#[test]
fn invariants_along_complex_time() {
    let cfg = IntegratorConfig::with_tolerance(1e-11);
    let cases = [
        (CPoly::from_real(&[0.0, 1.0]), c(1.0, 0.0), 1.0, 1e-8),
        (CPoly::from_real(&[0.0, 0.0, 1.0]), c(1.0, 1.0), 0.3, 1e-8),
        (CPoly::from_real(&[1.0]), c(0.2, -0.7), 2.0, 1e-14),
    ];
    for (p, z0, dur, tol) in cases {
        let spec = SystemSpec::holomorphic(p);
        let rep = build_potential(&spec).unwrap();
        let (psi, phi) = complex_time_invariants(&spec, &rep, z0, dur, &cfg).unwrap();
        assert!(psi < tol && phi < tol, "{psi} {phi}");
    }
    let anti = SystemSpec::anti_holomorphic(CPoly::from_real(&[0.0, 1.0]));
    let rep = build_potential(&anti).unwrap();
    assert!(matches!(
        complex_time_invariants(&anti, &rep, c(1.0, 0.0), 1.0, &cfg),
        Err(Error::InvalidArgument(_))
    ));
}

fn flows() -> impl Strategy<Value = ClosedFormFlow> {
    prop_oneof![
        Just(ClosedFormFlow::Constant),
        Just(ClosedFormFlow::Linear),
        Just(ClosedFormFlow::Quadratic),
        Just(ClosedFormFlow::Reciprocal),
        (
            2u32..5,
            0.3..1.5f64,
            -1.0..1.0f64,
            0.3..1.5f64,
            -1.0..1.0f64
        )
            .prop_map(|(n, ar, ai, br, bi)| {
                ClosedFormFlow::Bernoulli {
                    n,
                    alpha: c(ar, ai),
                    beta: c(br, bi),
                }
            }),
    ]
}

proptest! {
    #[test]
    fn closed_forms_solve_their_equation(
        flow in flows(),
        z0 in (0.2..0.6f64, -0.4..0.4f64).prop_map(|(re, im)| c(re, im)),
        t in (-0.3..0.3f64, -0.3..0.3f64).prop_map(|(re, im)| c(re, im)),
    ) {
        let h = 1e-5;
        let at = |s: Complex64| closed_form_flow(&flow, z0, s);
        let z = at(t);
        prop_assume!(z.is_ok());
        let z = z.unwrap();
        prop_assume!(z.norm() < 5.0);
        let zero = closed_form_flow(&flow, z0, c(0.0, 0.0)).unwrap();
        prop_assert!((zero - z0).norm() < 1e-14);
        let want = flow.field(z);
        // the derivative along the real and the imaginary time directions
        for dir in [c(1.0, 0.0), c(0.0, 1.0)] {
            let (fwd, back) = (at(t + dir * h), at(t - dir * h));
            prop_assume!(fwd.is_ok() && back.is_ok());
            let d = (fwd.unwrap() - back.unwrap()) / (dir * (2.0 * h));
            prop_assert!((d - want).norm() <= 1e-6 * (1.0 + want.norm()), "{:?} dir {}: {} vs {}", flow, dir, d, want);
        }
    }
}
