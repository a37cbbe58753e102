use approx::assert_relative_eq;
use holoflow::cpoly::{divided_difference, real_roots, resultant_x2, CPoly, RealPoly};
use holoflow::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| c(re, im))
}

#[test]
fn evaluation_examples() {
    let p = CPoly::from_real(&[0.0, -1.0, 0.0, 1.0]);
    assert_eq!(p.eval(c(2.0, 0.0)), c(6.0, 0.0));
    assert_eq!(CPoly::constant(c(1.0, 0.0)).eval(c(5.0, 1.0)), c(1.0, 0.0));
    let q = CPoly::new(vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(1.0, 0.0)]);
    // i^3 - i*i = -i + 1
    assert!((q.eval(c(0.0, 1.0)) - c(1.0, -1.0)).norm() < 1e-15);
}

#[test]
fn antiderivative_of_shifted_linear() {
    // (2+i)(z - 5i) integrates to (2+i)(z - 5i)^2 / 2 up to a constant
    let p = CPoly::new(vec![c(2.0, 1.0) * c(0.0, -5.0), c(2.0, 1.0)]);
    let expected = |z: Complex64| c(2.0, 1.0) * (z - c(0.0, 5.0)).powi(2) / 2.0;
    let a = p.antiderivative();
    let offset = expected(c(0.0, 0.0)) - a.eval(c(0.0, 0.0));
    for z in [c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 7.0)] {
        assert!((a.eval(z) + offset - expected(z)).norm() < 1e-12);
    }
}

#[test]
fn root_examples() {
    let set = CPoly::from_real(&[0.0, -1.0, 0.0, 1.0])
        .roots(1e-10)
        .unwrap();
    let locs: Vec<f64> = set.iter().map(|r| r.location.re).collect();
    assert_eq!(set.len(), 3);
    for (got, want) in locs.iter().zip([-1.0, 0.0, 1.0]) {
        assert!((got - want).abs() < 1e-12);
    }

    let set = CPoly::from_real(&[2.0, -3.0, 0.0, 1.0])
        .roots(1e-10)
        .unwrap();
    assert_eq!(set.len(), 2);
    let double = set.iter().find(|r| r.multiplicity == 2).unwrap();
    assert!((double.location - c(1.0, 0.0)).norm() < 1e-6);
    let simple = set.iter().find(|r| r.multiplicity == 1).unwrap();
    assert!((simple.location - c(-2.0, 0.0)).norm() < 1e-10);

    let set = CPoly::from_real(&[0.0, 0.0, 0.0, 1.0])
        .roots(1e-10)
        .unwrap();
    assert_eq!(set.len(), 1);
    assert_eq!(set.iter().next().unwrap().multiplicity, 3);
}

#[test]
fn divided_difference_examples() {
    let dd = divided_difference(&RealPoly::new(vec![0.0, 0.0, 1.0]));
    assert_relative_eq!(dd.eval(0.3, 1.7), 2.0, epsilon = 1e-14);

    let (c2, b2, a2) = (0.7, -1.2, 2.5);
    let q = RealPoly::new(vec![0.0, c2, b2 / 2.0, a2 / 3.0]);
    let dd = divided_difference(&q);
    for (x1, x2) in [(0.3, -1.1), (2.0, 0.5), (-0.4, -0.4)] {
        let want = c2 + b2 / 2.0 * (x1 + x2) + a2 / 3.0 * (x1 * x1 + x1 * x2 + x2 * x2);
        assert_relative_eq!(dd.eval(x1, x2), want, epsilon = 1e-13);
    }

    let dd = divided_difference(&RealPoly::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]));
    let (x1, x2) = (1.3f64, -0.6f64);
    let want = x1.powi(3) + x1 * x1 * x2 + x1 * x2 * x2 + x2.powi(3);
    assert_relative_eq!(dd.eval(x1, x2), want, epsilon = 1e-13);
}

#[test]
fn resultant_identical_is_zero() {
    let dd = divided_difference(&RealPoly::new(vec![0.0, 0.4, -0.3, 1.1]));
    assert!(resultant_x2(&dd, &dd).unwrap().is_zero());
}

#[test]
fn resultant_matches_numeric_elimination() {
    // quadratic matching polynomials: cubic stream functions on the axis
    let f = divided_difference(&RealPoly::new(vec![0.0, 0.3, -0.8, 0.5]));
    let g = divided_difference(&RealPoly::new(vec![0.0, -1.1, 0.4, 0.9]));
    let r = resultant_x2(&f, &g).unwrap();
    assert_eq!(r.degree(), 2);
    // R(x1) vanishes exactly when c+(x1, .) and c-(x1, .) share a root, so
    // R(x1) is proportional to the product of c- over the roots of c+(x1, .).
    let mut ratios = Vec::new();
    for x1 in [-1.5, -0.3, 0.4, 1.2, 2.7] {
        let fx = f.poly().at_x(x1);
        let (a, b, cc) = (fx.coeff(2), fx.coeff(1), fx.coeff(0));
        let disc = Complex64::new(b * b - 4.0 * a * cc, 0.0).sqrt();
        let roots = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
        let gx = g.poly().at_x(x1);
        let prod: Complex64 = roots
            .iter()
            .map(|&y| {
                (0..=gx.degree())
                    .rev()
                    .fold(c(0.0, 0.0), |acc, k| acc * y + gx.coeff(k))
            })
            .product();
        assert!(prod.im.abs() < 1e-9 * prod.norm().max(1.0));
        ratios.push(r.eval(x1) / prod.re);
    }
    for w in ratios.windows(2) {
        assert_relative_eq!(w[0], w[1], max_relative = 1e-8);
    }
}

#[test]
fn real_root_examples() {
    assert!(real_roots(&RealPoly::new(vec![1.0, 0.0, 1.0]), None, 1e-12)
        .unwrap()
        .is_empty());
    let p = RealPoly::from_roots(&[1.0, -1.0, 2.0, -2.0, 3.0, -3.0]);
    let roots = real_roots(&p, None, 1e-12).unwrap();
    assert_eq!(roots.len(), 6);
    for (got, want) in roots.iter().zip([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]) {
        assert!((got - want).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn derivative_inverts_antiderivative(coeffs in prop::collection::vec(complex(), 1..8)) {
        let p = CPoly::new(coeffs);
        let back = p.antiderivative().derivative();
        for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn roots_rebuild_the_polynomial(roots in prop::collection::vec(complex(), 1..7)) {
        let separated = roots.iter().enumerate()
            .all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() > 0.05));
        prop_assume!(separated);
        let p = CPoly::from_roots(&roots);
        let set = p.roots(1e-10).unwrap();
        prop_assert_eq!(set.total_multiplicity(), roots.len());
        for r in &roots {
            let best = set.iter().map(|s| (s.location - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-7, "missing root {} ({})", r, best);
        }
    }

    #[test]
    fn multiplicities_sum_to_degree(coeffs in prop::collection::vec(complex(), 2..9)) {
        let p = CPoly::new(coeffs);
        prop_assume!(p.degree() >= 1 && p.leading().norm() > 1e-3);
        let set = p.roots(1e-10).unwrap();
        prop_assert_eq!(set.total_multiplicity(), p.degree());
    }

    #[test]
    fn real_roots_are_roots(roots in prop::collection::vec(-5.0..5.0f64, 1..6), extra in 0.1..3.0f64) {
        let mut sorted = roots.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 1e-2));
        // an irreducible quadratic factor adds no real roots
        let p = &RealPoly::from_roots(&roots) * &RealPoly::new(vec![extra, 0.0, 1.0]);
        let found = real_roots(&p, None, 1e-13).unwrap();
        prop_assert_eq!(found.len(), sorted.len());
        for (f, r) in found.iter().zip(&sorted) {
            prop_assert!((f - r).abs() < 1e-8);
        }
    }

    #[test]
    fn divided_difference_is_symmetric_quotient(
        coeffs in prop::collection::vec(-2.0..2.0f64, 2..7),
        x1 in -2.0..2.0f64,
        x2 in -2.0..2.0f64,
    ) {
        prop_assume!((x1 - x2).abs() > 1e-2);
        let q = RealPoly::new(coeffs);
        let dd = divided_difference(&q);
        let want = (q.eval(x1) - q.eval(x2)) / (x1 - x2);
        prop_assert!((dd.eval(x1, x2) - want).abs() < 1e-10 * (1.0 + want.abs()));
        prop_assert!((dd.eval(x1, x2) - dd.eval(x2, x1)).abs() < 1e-12 * (1.0 + want.abs()));
    }

    #[test]
    fn resultant_vanishes_on_common_zeros(
        fc in prop::collection::vec(-2.0..2.0f64, 2..4),
        gc in prop::collection::vec(-2.0..2.0f64, 2..4),
        x1 in -2.0..2.0f64,
        x2 in -2.0..2.0f64,
    ) {
        // shift the linear coefficient so (x1, x2) solves both equations
        let build = |tail: &[f64]| {
            let mut coeffs = vec![0.0, 0.0];
            coeffs.extend_from_slice(tail);
            let q = RealPoly::new(coeffs.clone());
            coeffs[1] = -divided_difference(&q).eval(x1, x2);
            divided_difference(&RealPoly::new(coeffs))
        };
        let f = build(&fc);
        let g = build(&gc);
        prop_assume!(f.eval(x1, x2).abs() < 1e-12 && g.eval(x1, x2).abs() < 1e-12);
        let Ok(r) = resultant_x2(&f, &g) else { return Ok(()) };
        let scale: f64 = r.coeffs().iter().enumerate().map(|(k, a)| a.abs() * x1.abs().powi(k as i32)).sum();
        prop_assert!(r.eval(x1).abs() <= 1e-8 * scale.max(1e-300), "R({}) = {}", x1, r.eval(x1));
    }
}
