use approx::assert_relative_eq;
use holoflow::cpoly::CPoly;
use holoflow::odeint::{return_map, IntegratorConfig};
use holoflow::pwcycles::{
    crossing_transversality, solve_antiholo_pair, solve_mixed_general, solve_mixed_linear_checked,
    solve_mixed_linear_on_sigma, Crossing, CycleOptions, MixedConstants, Stability, Verification,
};
use holoflow::report::{cycle_report, verify_report, CycleFamily, CycleReport, CycleSystem};
use holoflow::system::{PiecewiseSpec, SystemSpec};
use holoflow::{Complex64, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quadratic_pair() -> PiecewiseSpec {
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

fn no_validation() -> CycleOptions {
    CycleOptions {
        validate: false,
        ..CycleOptions::default()
    }
}

#[test]
fn example_has_one_confirmed_cycle() {
    let cands = solve_antiholo_pair(&quadratic_pair(), 1e-12, &CycleOptions::default()).unwrap();
    assert_eq!(cands.len(), 1);
    let cand = cands[0];
    assert!(cand.x1.abs() < 1e-9);
    assert_relative_eq!(cand.x2, (-9.0 + 33f64.sqrt()) / 4.0, max_relative = 1e-9);
    assert_eq!(cand.verified, Verification::NumericallyConfirmed);
    assert!(matches!(
        crossing_transversality(&quadratic_pair(), 0.0),
        Crossing::CrossingUp | Crossing::CrossingDown
    ));
}

#[test]
fn identical_quadratics_form_a_continuum() {
    let p = CPoly::new(vec![c(1.0, 0.5), c(2.0, 1.5), c(3.0, 0.5)]);
    let spec = PiecewiseSpec {
        upper: SystemSpec::anti_holomorphic(p.clone()),
        lower: SystemSpec::anti_holomorphic(p),
    };
    assert_eq!(
        solve_antiholo_pair(&spec, 1e-12, &no_validation()),
        Err(Error::ContinuumDetected)
    );
}

#[test]
fn linear_pairs_have_no_cycles() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let rand_c = |r: &mut ChaCha8Rng| c(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
    for _ in 0..1000 {
        let spec = PiecewiseSpec {
            upper: SystemSpec::anti_holomorphic(CPoly::new(vec![rand_c(&mut r), rand_c(&mut r)])),
            lower: SystemSpec::anti_holomorphic(CPoly::new(vec![rand_c(&mut r), rand_c(&mut r)])),
        };
        match solve_antiholo_pair(&spec, 1e-12, &no_validation()) {
            Ok(cands) => assert!(cands.is_empty()),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn tangent_where_upper_normal_velocity_vanishes() {
    // upper conj(z - 2i) has vertical velocity 2 - ... zero where Im conj(p) = 0
    let spec = PiecewiseSpec {
        upper: SystemSpec::anti_holomorphic(CPoly::new(vec![c(0.0, 0.0), c(0.0, 1.0)])),
        lower: SystemSpec::holomorphic(CPoly::from_real(&[1.0])),
    };
    assert_eq!(crossing_transversality(&spec, 0.0), Crossing::Tangent);
}

#[test]
fn center_continuum_example() {
    let err = solve_mixed_linear_on_sigma(2.0, 1.0, 5.0, -10.0, 0.0, -1.0, 10.0).unwrap_err();
    assert_eq!(err, Error::CenterContinuum { center: 10.0 });
}

fn random_linear(r: &mut ChaCha8Rng, a: f64) -> MixedConstants {
    MixedConstants {
        a1: r.gen_range(-2.0..2.0),
        a2: r.gen_range(0.2..2.0) * if r.gen() { 1.0 } else { -1.0 },
        b1: r.gen_range(-2.0..2.0),
        b2: r.gen_range(-2.0..2.0),
        a,
        b: r.gen_range(0.5..2.0) * if r.gen() { 1.0 } else { -1.0 },
        x0: r.gen_range(-2.0..2.0),
        y0: 0.0,
    }
}

#[test]
fn focus_sign_decides_stability() {
    let mut r = ChaCha8Rng::seed_from_u64(10);
    let mut hits = [0usize; 2];
    for _ in 0..2000 {
        for (i, (a, stability)) in [(0.2, Stability::Unstable), (-0.2, Stability::Stable)]
            .into_iter()
            .enumerate()
        {
            let k = random_linear(&mut r, a);
            let cands = solve_mixed_linear_checked(&k, &CycleOptions::default()).unwrap();
            assert!(cands.len() <= 1);
            for cand in cands {
                assert_eq!(cand.stability, stability);
                let want = (a * PI / k.b.abs()).exp();
                assert_relative_eq!(cand.multiplier.unwrap(), want, max_relative = 1e-4);
                assert_eq!(cand.verified, Verification::NumericallyConfirmed);
                hits[i] += 1;
            }
        }
    }
    assert!(hits.iter().all(|&h| h >= 10), "{hits:?}");
}

#[test]
fn wrong_sign_of_crossing_gives_nothing() {
    // the closed-form crossing lands on the positive side
    let k = MixedConstants {
        a1: 0.3,
        a2: 1.0,
        b1: -0.5,
        b2: 1.0,
        a: 0.2,
        b: -1.0,
        x0: 0.0,
        y0: 0.0,
    };
    let cands = solve_mixed_linear_on_sigma(k.a1, k.a2, k.b1, k.b2, k.a, k.b, k.x0).unwrap();
    assert!(cands.is_empty());
    let spec = k.piecewise();
    let cfg = IntegratorConfig::with_tolerance(1e-10);
    for i in 1..80 {
        let x = -4.0 + 0.1 * i as f64;
        if let Ok(Some(back)) = return_map(&spec.upper, &spec.lower, x, &cfg) {
            assert!((back - x).abs() > 1e-6, "closed orbit through {x}");
        }
    }
}

#[test]
fn on_axis_equilibrium_reduces_to_linear_case() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let a = r.gen_range(-0.5..0.5);
        let k = random_linear(&mut r, a);
        let general = solve_mixed_general(&k, 1e-12, &no_validation());
        let linear = solve_mixed_linear_checked(&k, &no_validation());
        assert_eq!(general, linear);
    }
}

#[test]
fn constructed_root_is_recovered() {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    let mut found = 0;
    for _ in 0..20_000 {
        let mut k = MixedConstants {
            a1: r.gen_range(-2.0..2.0),
            a2: r.gen_range(0.2..2.0) * if r.gen() { 1.0 } else { -1.0 },
            b1: r.gen_range(-2.0..2.0),
            b2: r.gen_range(-2.0..2.0),
            a: 0.0,
            b: r.gen_range(0.5..2.0) * if r.gen() { 1.0 } else { -1.0 },
            x0: r.gen_range(-2.0..2.0),
            y0: r.gen_range(-2.0..2.0),
        };
        let x = r.gen_range(-4.0..4.0);
        // F is affine in a; pick a so that F(x) = 0
        let with_a = |a: f64| MixedConstants { a, ..k };
        let f0 = with_a(0.0).f(x);
        let f1 = with_a(1.0).f(x);
        if (f1 - f0).abs() < 1e-6 {
            continue;
        }
        k.a = -f0 / (f1 - f0);
        if k.a.abs() > 2.0 || (x - k.l(x)).abs() < 1e-2 {
            continue;
        }
        let spec = k.piecewise();
        let valid = crossing_transversality(&spec, x) == Crossing::CrossingDown
            && crossing_transversality(&spec, k.l(x)) == Crossing::CrossingUp
            && k.upper_arc_joins(x);
        if !valid {
            continue;
        }
        let cands = solve_mixed_general(&k, 1e-13, &CycleOptions::default()).unwrap();
        let (hi, lo) = (x.max(k.l(x)), x.min(k.l(x)));
        let hit = cands.iter().find(|c| {
            (c.x1 - hi).abs() < 1e-7 * hi.abs().max(1.0)
                && (c.x2 - lo).abs() < 1e-7 * lo.abs().max(1.0)
        });
        let hit = hit.unwrap_or_else(|| panic!("{k:?} x = {x}: {cands:?}"));
        assert_eq!(hit.verified, Verification::NumericallyConfirmed);
        assert!(cands.len() <= 3);
        found += 1;
        if found == 25 {
            break;
        }
    }
    assert_eq!(found, 25);
}

#[test]
fn report_round_trips_and_verifies() {
    let spec = quadratic_pair();
    let system = CycleSystem::Antiholo {
        upper: spec.upper,
        lower: spec.lower,
    };
    let opts = CycleOptions::default();
    let report = cycle_report(CycleFamily::Antiholo, system, 1e-12, &opts).unwrap();
    assert_eq!(report.bound, Some(1));
    assert!(!report.continuum);
    let json = serde_json::to_string(&report).unwrap();
    let back: CycleReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
    let outcomes = verify_report(&back, &opts).unwrap();
    assert_eq!(outcomes.len(), 1);
    assert!(outcomes[0].pass);

    // a tampered crossing no longer closes up
    let mut bad = back.clone();
    bad.candidates[0].x2 += 0.05;
    assert!(!verify_report(&bad, &opts).unwrap()[0].pass);
}

#[test]
fn continuum_is_reported_not_raised() {
    let k = MixedConstants {
        a1: 2.0,
        a2: 1.0,
        b1: 5.0,
        b2: -10.0,
        a: 0.0,
        b: -1.0,
        x0: 10.0,
        y0: 0.0,
    };
    let report = cycle_report(
        CycleFamily::MixedLinear,
        CycleSystem::Mixed(k),
        1e-12,
        &no_validation(),
    )
    .unwrap();
    assert!(report.continuum);
    assert!(report.candidates.is_empty());
    assert!(matches!(
        cycle_report(
            CycleFamily::Antiholo,
            CycleSystem::Mixed(k),
            1e-12,
            &no_validation()
        ),
        Err(Error::InvalidArgument(_))
    ));
}

fn mixed() -> impl Strategy<Value = MixedConstants> {
    (
        (
            -2.0..2.0f64,
            0.2..2.0f64,
            any::<bool>(),
            -2.0..2.0f64,
            -2.0..2.0f64,
        ),
        (
            -1.0..1.0f64,
            0.3..2.0f64,
            any::<bool>(),
            -2.0..2.0f64,
            -2.0..2.0f64,
        ),
    )
        .prop_map(
            |((a1, a2, s2, b1, b2), (a, b, sb, x0, y0))| MixedConstants {
                a1,
                a2: if s2 { a2 } else { -a2 },
                b1,
                b2,
                a,
                b: if sb { b } else { -b },
                x0,
                y0,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixed_candidates_integrate_to_closed_orbits(k in mixed()) {
        match solve_mixed_general(&k, 1e-13, &CycleOptions::default()) {
            Ok(cands) => {
                prop_assert!(cands.len() <= 3);
                for cand in cands {
                    prop_assert_eq!(cand.verified, Verification::NumericallyConfirmed, "{:?}", cand);
                }
            }
            Err(Error::CenterContinuum { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
