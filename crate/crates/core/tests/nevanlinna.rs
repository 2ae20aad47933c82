use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use relgrowth::models::FunctionModel;
use relgrowth::nevanlinna::{breakdown, characteristic, counting, proximity};
use relgrowth::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn poly(coeffs: &[f64]) -> FunctionModel {
    FunctionModel::Polynomial {
        coeffs: coeffs.iter().map(|&x| c(x, 0.0)).collect(),
    }
}

fn exp_model() -> FunctionModel {
    FunctionModel::ExpPower { c: 1.0, n: 1 }
}

#[test]
fn exp_proximity_is_r_over_pi() {
    let m = proximity(&exp_model(), 10.0, None).unwrap();
    let oracle = 3.183_098_861_837_906_7; // 10/pi
    assert!((m - oracle).abs() < 1e-8, "got {m}");
}

#[test]
fn polynomial_proximity_closed_forms() {
    let f = poly(&[0.0, 1.0]);
    let m = proximity(&f, std::f64::consts::E, None).unwrap();
    assert!((m - 1.0).abs() < 1e-10, "got {m}");
    let small = proximity(&f, 0.5, None).unwrap();
    assert_eq!(small, 0.0);
}

#[test]
fn polynomial_log_exactness_on_random_radii() {
    let f = poly(&[0.0, 1.0]);
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let r: f64 = rng.gen_range(1.000001..1000.0);
        let m = proximity(&f, r, None).unwrap();
        assert!((m - r.ln()).abs() < 1e-10, "r={r}: {m} vs {}", r.ln());
    }
}

#[test]
fn near_target_spike_is_integrated() {
    // f(z) = z on the unit circle; the a-point sits 1e-7 outside.
    let f = poly(&[0.0, 1.0]);
    let m = proximity(&f, 1.0, Some(c(1.0 + 1e-7, 0.0))).unwrap();
    let oracle = 0.323_065_880_552_789; // exact kink-split quadrature
    assert!((m - oracle).abs() < 1e-7, "got {m}");

    let smooth = proximity(&f, 1.0, Some(c(1.5, 0.0))).unwrap();
    let oracle = 0.089_978_444_772_883_2;
    assert!((smooth - oracle).abs() < 1e-8, "got {smooth}");
}

#[test]
fn contour_apoint_is_singular() {
    let f = poly(&[0.0, 1.0]);
    assert!(matches!(
        proximity(&f, 1.0, Some(c(1.0, 0.0))),
        Err(Error::SingularNode)
    ));
    let g = FunctionModel::FactoredRational {
        zeros: vec![],
        poles: vec![c(1.0, 0.0)],
        scale: c(1.0, 0.0),
    };
    assert!(matches!(proximity(&g, 1.0, None), Err(Error::SingularNode)));
}

#[test]
fn counting_examples() {
    assert_eq!(counting(&exp_model(), 5.0, None, false).unwrap(), 0.0);

    let inv_z = FunctionModel::FactoredRational {
        zeros: vec![],
        poles: vec![c(0.0, 0.0)],
        scale: c(1.0, 0.0),
    };
    let n = counting(&inv_z, std::f64::consts::E, None, false).unwrap();
    assert!((n - 1.0).abs() < 1e-15, "got {n}");

    let two_poles = FunctionModel::FactoredRational {
        zeros: vec![],
        poles: vec![c(1.0, 0.0), c(3.0, 0.0)],
        scale: c(1.0, 0.0),
    };
    let n = counting(&two_poles, 6.0, None, false).unwrap();
    let oracle = 2.484_906_649_788_000_3; // log 6 + log 2
    assert!((n - oracle).abs() < 1e-12, "got {n}");
}

#[test]
fn characteristic_examples() {
    let t = characteristic(&exp_model(), std::f64::consts::PI).unwrap();
    assert!((t - 1.0).abs() < 1e-8, "got {t}");

    let inv_z = FunctionModel::FactoredRational {
        zeros: vec![],
        poles: vec![c(0.0, 0.0)],
        scale: c(1.0, 0.0),
    };
    let t = characteristic(&inv_z, std::f64::consts::E).unwrap();
    assert!((t - 1.0).abs() < 1e-10, "got {t}");

    let t = characteristic(&poly(&[0.0, 1.0]), (2.0f64).exp()).unwrap();
    assert!((t - 2.0).abs() < 1e-10, "got {t}");
}

#[test]
fn breakdown_sums_exactly() {
    let two_poles = FunctionModel::FactoredRational {
        zeros: vec![],
        poles: vec![c(1.0, 0.0), c(3.0, 0.0)],
        scale: c(1.0, 0.0),
    };
    let b = breakdown(&two_poles, 6.0, None).unwrap();
    assert_eq!(b.characteristic, b.proximity + b.counting);
    assert!(b.counting > 0.0);

    let e = breakdown(&exp_model(), 2.0, None).unwrap();
    assert_eq!(e.counting, 0.0);
    assert_eq!(e.characteristic, e.proximity);
}

#[test]
fn distinct_counting_bounded_by_multiplicity() {
    // (z-2)^2 (z+1) = 4 - 3z^2 + z^3 has a double root
    let f = poly(&[4.0, 0.0, -3.0, 1.0]);
    let a = Some(c(0.0, 0.0));
    let with_mult = counting(&f, 3.0, a, false).unwrap();
    let distinct = counting(&f, 3.0, a, true).unwrap();
    assert!(distinct < with_mult);

    // simple roots: the two countings agree
    let g = poly(&[-1.0, 0.0, 1.0]);
    let m = counting(&g, 2.0, a, false).unwrap();
    let d = counting(&g, 2.0, a, true).unwrap();
    assert!((m - d).abs() < 1e-12);
}

#[test]
fn log_max_modulus_brackets_characteristic() {
    // T(r) <= log+ M(r) <= 3 T(2r) (1 + 1e-6) for entire models, R = 2r.
    // (model, largest test radius): the tower integrand's kink slopes grow
    // like e^r, so its quadrature budget runs out beyond 2r ~ 4.5.
    let models: Vec<(FunctionModel, f64)> = vec![
        (exp_model(), 3.0),
        (FunctionModel::ExpPower { c: 1.0, n: 2 }, 3.0),
        (poly(&[1.0, 2.0, 0.0, 1.0]), 3.0),
        (
            FunctionModel::Sum(Box::new(exp_model()), Box::new(poly(&[0.0, 1.0]))),
            3.0,
        ),
        (FunctionModel::ExpTower { k: 2 }, 2.2),
    ];
    for (f, top) in &models {
        for i in 0..10 {
            let r = 1.1 * (top / 1.1).powf(i as f64 / 9.0);
            let t_r = characteristic(f, r).unwrap();
            let t_2r = characteristic(f, 2.0 * r).unwrap();
            let m = f.max_modulus(r).unwrap();
            let log_m = if m <= relgrowth::TowerReal::from(1.0) {
                0.0
            } else {
                m.iter_log(1).unwrap().to_float().unwrap()
            };
            assert!(
                t_r <= log_m * (1.0 + 1e-9) + 1e-12,
                "{f:?} at r={r}: T={t_r} logM={log_m}"
            );
            assert!(
                log_m <= 3.0 * t_2r * (1.0 + 1e-6),
                "{f:?} at r={r}: logM={log_m} 3T(2r)={}",
                3.0 * t_2r
            );
        }
    }
}

#[test]
fn characteristic_is_strictly_increasing() {
    let models = vec![
        exp_model(),
        poly(&[0.0, 1.0]),
        FunctionModel::FactoredRational {
            zeros: vec![],
            poles: vec![c(1.0, 0.0), c(3.0, 0.0)],
            scale: c(1.0, 0.0),
        },
        FunctionModel::Sum(
            Box::new(exp_model()),
            Box::new(poly(&[0.0, 1.0])),
        ),
    ];
    for f in &models {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..64 {
            let r = 1.5 * (20.0f64 / 1.5).powf(i as f64 / 63.0);
            let t = characteristic(f, r).unwrap();
            assert!(t > prev, "{f:?} at r={r}: {t} !> {prev}");
            prev = t;
        }
    }
}
