use proptest::prelude::*;
use relgrowth::scales::GrowthScale;
use relgrowth::tower::TowerReal;
use relgrowth::{
    classify, integrand_log, lemma_ratio, transition, Error, GridSpec, RatioBehavior,
    TransitionResult, Verdict,
};

fn exp_scale() -> GrowthScale {
    GrowthScale::iterated(1, 0, 1.0, 1.0).unwrap()
}

/// beta = exp(exp(c x)), so F = alpha^{-1} beta = e^{cr} at p = 2:
/// the integral is the closed form int e^{(c-k-1) r} dr with flip at c - 1.
fn exp_gap(c: f64) -> GrowthScale {
    GrowthScale::iterated(2, 0, 1.0, c).unwrap()
}

/// beta = exp(x^c), so F = r^c at p = 2, q = 2:
/// the integral is int r^{c-k-1} dr with flip at c.
fn power_gap(c: f64) -> GrowthScale {
    GrowthScale::iterated(1, 0, c, 1.0).unwrap()
}

fn q1_grid() -> GridSpec {
    GridSpec::default_for(1)
}

fn q2_grid() -> GridSpec {
    GridSpec::default_for(2)
}

#[test]
fn integrand_log_closed_forms() {
    let a = exp_scale();
    // F = e^{2r}: 2r - (k+1) r at k = 0, r = 10
    let l = integrand_log(&a, &exp_gap(2.0), 2, 1, 1.0, 0.0, &TowerReal::new(10.0)).unwrap();
    assert!((l - 10.0).abs() <= 1e-9, "l = {l}");

    // F = r^3 at q = 2: 3 ln r - (k+1) ln r at k = 3, r = e^5
    let r = TowerReal::new(5.0).iter_exp(1);
    let l = integrand_log(&a, &power_gap(3.0), 2, 2, 1.0, 3.0, &r).unwrap();
    assert!((l + 5.0).abs() <= 1e-9, "l = {l}");

    // F = e^r at k = 0: identically zero
    for rv in [2.0, 7.0, 20.0] {
        let l =
            integrand_log(&a, &exp_gap(1.0), 2, 1, 1.0, 0.0, &TowerReal::new(rv)).unwrap();
        assert!(l.abs() <= 1e-9, "l({rv}) = {l}");
    }
}

#[test]
fn exponential_family_verdicts() {
    let a = exp_scale();
    let b = exp_gap(2.0);
    let v = classify(&a, &b, 2, 1, 1.0, 0.5, &q1_grid()).unwrap();
    assert_eq!(v.verdict, Verdict::Diverges);

    let v = classify(&a, &b, 2, 1, 1.0, 1.5, &q1_grid()).unwrap();
    assert_eq!(v.verdict, Verdict::Converges);
    let bound = v.tail_bound.expect("superexponential decay sums directly");
    assert!((0.0..1e-10).contains(&bound), "tail bound = {bound}");

    // at k = c - 1 the integrand is identically 1: divergence, exactly
    let v = classify(&a, &b, 2, 1, 1.0, 1.0, &q1_grid()).unwrap();
    assert_eq!(v.verdict, Verdict::Diverges);
}

#[test]
fn power_family_verdicts() {
    let a = exp_scale();
    let b = power_gap(3.0);
    let v = classify(&a, &b, 2, 2, 1.0, 3.5, &q2_grid()).unwrap();
    assert_eq!(v.verdict, Verdict::Converges);

    let v = classify(&a, &b, 2, 2, 1.0, 2.5, &q2_grid()).unwrap();
    assert_eq!(v.verdict, Verdict::Diverges);

    // the r^{-1} logarithmic boundary sits inside the dead band
    let v = classify(&a, &b, 2, 2, 1.0, 3.0, &q2_grid()).unwrap();
    assert_eq!(v.verdict, Verdict::Indeterminate);
    assert!((v.decay_slope + 1.0).abs() <= 1e-6, "slope = {}", v.decay_slope);
}

#[test]
fn calculus_oracle_agreement() {
    let a = exp_scale();
    for c in [1.0, 2.0, 3.0] {
        for dk in [0.1, 0.25, 0.5, 1.0] {
            let b = exp_gap(c);
            let k_star = c - 1.0;
            let below = classify(&a, &b, 2, 1, 1.0, k_star - dk, &q1_grid()).unwrap();
            assert_eq!(below.verdict, Verdict::Diverges, "exp c={c} k*-{dk}");
            let above = classify(&a, &b, 2, 1, 1.0, k_star + dk, &q1_grid()).unwrap();
            assert_eq!(above.verdict, Verdict::Converges, "exp c={c} k*+{dk}");

            let b = power_gap(c);
            let below = classify(&a, &b, 2, 2, 1.0, c - dk, &q2_grid()).unwrap();
            assert_eq!(below.verdict, Verdict::Diverges, "pow c={c} k*-{dk}");
            let above = classify(&a, &b, 2, 2, 1.0, c + dk, &q2_grid()).unwrap();
            assert_eq!(above.verdict, Verdict::Converges, "pow c={c} k*+{dk}");
        }
    }
}

fn check_monotone_table(result: &TransitionResult) {
    let table = &result.verdict_table;
    for (k1, v1) in table {
        for (k2, v2) in table {
            if v1.verdict == Verdict::Converges && k2 > k1 {
                assert_eq!(
                    v2.verdict,
                    Verdict::Converges,
                    "converges at {k1} but {:?} at {k2}",
                    v2.verdict
                );
            }
            if v1.verdict == Verdict::Diverges && k2 < k1 {
                assert_eq!(
                    v2.verdict,
                    Verdict::Diverges,
                    "diverges at {k1} but {:?} at {k2}",
                    v2.verdict
                );
            }
        }
    }
}

#[test]
fn exponential_transition_brackets_the_flip() {
    let res = transition(
        &exp_scale(),
        &exp_gap(2.0),
        2,
        1,
        1.0,
        (0.0, 3.0),
        0.05,
        &q1_grid(),
    )
    .unwrap();
    assert!(res.k_lo < res.k_hi);
    assert!(res.k_lo <= 1.0 && 1.0 <= res.k_hi, "bracket ({}, {})", res.k_lo, res.k_hi);
    assert!(res.k_hi - res.k_lo <= 0.05 || res.indeterminate_limited);
    check_monotone_table(&res);
}

#[test]
fn power_transition_brackets_the_flip() {
    let res = transition(
        &exp_scale(),
        &power_gap(3.0),
        2,
        2,
        1.0,
        (1.0, 6.0),
        0.05,
        &q2_grid(),
    )
    .unwrap();
    assert!(res.k_lo <= 3.0 && 3.0 <= res.k_hi, "bracket ({}, {})", res.k_lo, res.k_hi);
    assert!(res.k_hi - res.k_lo <= 0.15, "bracket width {}", res.k_hi - res.k_lo);
    assert!(res.k_hi - res.k_lo <= 0.05 || res.indeterminate_limited);
    check_monotone_table(&res);
}

#[test]
fn oscillating_transition_brackets_the_envelope_peak() {
    // F = exp(r (2 + sin log r)) against exp(r)^{k+1}: diverges while
    // 2 + sin log r > k + 1 recurs, i.e. up to k = 2
    let grid = GridSpec::new(1, 2.0, 0.5, 256).unwrap();
    let res = transition(
        &exp_scale(),
        &GrowthScale::sinlog(),
        1,
        1,
        1.0,
        (1.2, 3.1),
        0.05,
        &grid,
    )
    .unwrap();
    assert!(res.k_lo <= 2.0 && 2.0 <= res.k_hi, "bracket ({}, {})", res.k_lo, res.k_hi);
    assert!(res.k_hi - res.k_lo <= 0.15, "bracket width {}", res.k_hi - res.k_lo);
    check_monotone_table(&res);
}

#[test]
fn bad_brackets_are_rejected() {
    // k = 2 already converges for the c = 2 exponential family
    let e = transition(
        &exp_scale(),
        &exp_gap(2.0),
        2,
        1,
        1.0,
        (2.0, 3.0),
        0.05,
        &q1_grid(),
    )
    .unwrap_err();
    assert!(matches!(e, Error::BadBracket(_)));

    // reversed range
    let e = transition(
        &exp_scale(),
        &exp_gap(2.0),
        2,
        1,
        1.0,
        (3.0, 0.0),
        0.05,
        &q1_grid(),
    )
    .unwrap_err();
    assert!(matches!(e, Error::BadBracket(_)));
}

#[test]
fn lemma_ratio_examples() {
    let a = exp_scale();
    let r = lemma_ratio(&a, &power_gap(3.0), 2, 2, 1.0, 3.5, &q2_grid()).unwrap();
    assert_eq!(r, RatioBehavior::TendsToZero);

    // the ratio blows up at an exponent where the integral itself converges
    let b = exp_gap(2.0);
    let r = lemma_ratio(&a, &b, 2, 1, 1.0, 1.5, &q1_grid()).unwrap();
    assert_eq!(r, RatioBehavior::Unbounded);
    let v = classify(&a, &b, 2, 1, 1.0, 1.5, &q1_grid()).unwrap();
    assert_eq!(v.verdict, Verdict::Converges);

    let r = lemma_ratio(&a, &b, 2, 1, 1.0, 2.0, &q1_grid()).unwrap();
    assert_eq!(r, RatioBehavior::BoundedAway);

    let grid = GridSpec::new(1, 2.0, 0.5, 256).unwrap();
    let r = lemma_ratio(&a, &GrowthScale::sinlog(), 1, 1, 1.0, 2.0, &grid).unwrap();
    assert_eq!(r, RatioBehavior::Oscillatory);
}

#[test]
fn convergence_implies_vanishing_ratio_for_power_families() {
    let a = exp_scale();
    for c in [1.0, 2.0, 3.0] {
        let b = power_gap(c);
        for dk in [0.15, 0.5, 1.0] {
            let v = classify(&a, &b, 2, 2, 1.0, c + dk, &q2_grid()).unwrap();
            assert_eq!(v.verdict, Verdict::Converges);
            let r = lemma_ratio(&a, &b, 2, 2, 1.0, c + dk, &q2_grid()).unwrap();
            assert_eq!(r, RatioBehavior::TendsToZero, "c={c} dk={dk}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdicts_are_monotone_in_k(
        c in 1.0f64..3.0,
        k1 in -0.5f64..4.0,
        dk in 0.05f64..1.5,
    ) {
        let a = GrowthScale::iterated(1, 0, 1.0, 1.0).unwrap();
        let b = GrowthScale::iterated(1, 0, c, 1.0).unwrap();
        let k2 = k1 + dk;
        let v1 = classify(&a, &b, 2, 2, 1.0, k1, &GridSpec::default_for(2)).unwrap();
        let v2 = classify(&a, &b, 2, 2, 1.0, k2, &GridSpec::default_for(2)).unwrap();
        if v1.verdict == Verdict::Converges {
            prop_assert_eq!(v2.verdict, Verdict::Converges);
        }
        if v2.verdict == Verdict::Diverges {
            prop_assert_eq!(v1.verdict, Verdict::Diverges);
        }
    }
}
