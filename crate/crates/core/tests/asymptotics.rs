use disc_hitting::asymptotics::{
    cdf_e1_form, cdf_e1_form_derivative, density_heat_kernel, density_w_leading, phi,
    survival_log_series, Constants,
};
use disc_hitting::consts::PI_SQ_OVER_6;
use disc_hitting::harness::EnvelopeConstants;
use disc_hitting::hitting_density::{cdf, density_branchcut, HittingQuery, InversionConfig};
use proptest::prelude::*;

/// Frozen constants are empirical; these checks are regressions against them.
#[test]
fn envelopes_hold_on_calibration_grid() {
    let env = EnvelopeConstants::frozen();
    let k = Constants::new(env.r_ref).unwrap();
    let cfg = InversionConfig::default();
    let s = env.safety_factor;
    for &x in &env.x_grid {
        for &t in &env.t_grid {
            let q = HittingQuery::new(env.r_ref, x, t).unwrap();
            let p = density_branchcut(q, &cfg).unwrap().value;
            let c = cdf(q, &cfg).unwrap().value;
            let a1 = density_w_leading(x, t, &k).unwrap();
            let a2 = density_heat_kernel(x, t, &k).unwrap();
            let a3 = cdf_e1_form(x, t, &k).unwrap();
            assert!(
                (a1.value - p).abs() <= s * env.w_leading * a1.envelope,
                "W form x={x} t={t}"
            );
            assert!(
                (a2.value - p).abs() <= s * env.heat_kernel * a2.envelope,
                "heat kernel x={x} t={t}"
            );
            assert!(
                (a3.value - c).abs() <= s * env.e1_cdf * a3.envelope,
                "E1 cdf x={x} t={t}"
            );
        }
    }
}

#[test]
fn regime_agreement_of_density_forms() {
    let env = EnvelopeConstants::frozen();
    let k = Constants::default();
    let bound = env.safety_factor * env.regime_agreement;
    // both forms vanish at |x| = r_ref, so the relative gap is only bounded
    // uniformly on the calibrated range of |x|
    for &x in &env.x_grid {
        for t in [1e4, 1e6, 1e8, 1e10] {
            let lt: f64 = f64::ln(t);
            if x * x > t / (lt * lt) {
                continue;
            }
            let a1 = density_w_leading(x, t, &k).unwrap().value;
            let a2 = density_heat_kernel(x, t, &k).unwrap().value;
            assert!((a1 / a2 - 1.0).abs() * lt <= bound, "x={x} t={t}");
        }
    }
}

#[test]
fn mc_example_point_for_e1_form() {
    // against the exact cdf; 20k-path MC standard error there is about 1.1e-3
    let k = Constants::default();
    let c = cdf(
        HittingQuery::new(1.0, 30.0, 300.0).unwrap(),
        &InversionConfig::default(),
    )
    .unwrap()
    .value;
    let a = cdf_e1_form(30.0, 300.0, &k).unwrap().value;
    assert!((a - c).abs() < 3.0 * 1.1e-3);
}

#[test]
fn phi_bounded_and_decreasing() {
    let grid: Vec<f64> = (0..80)
        .map(|i| 10f64.powf(-8.0 + 0.12 * i as f64))
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&a| phi(a).unwrap()).collect();
    for (a, v) in grid.iter().zip(&vals) {
        assert!(*v > 0.0 && *v <= PI_SQ_OVER_6, "α = {a}");
    }
    for w in vals.windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn preconditions() {
    let k = Constants::default();
    assert!(density_w_leading(0.5, 1e4, &k).is_err());
    assert!(density_heat_kernel(2.0, 1.0, &k).is_err());
    assert!(cdf_e1_form(2.0, 0.5, &k).is_err());
    assert!(survival_log_series(2.0, 1e4, &k, 0).is_err());
    assert!(Constants::new(-1.0).is_err());
    assert!(phi(-1.0).is_err());
    assert!(!survival_log_series(200.0, 1e4, &k, 3).unwrap().in_regime);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_matches_central_difference(xe in 0.1f64..2.5, te in 2.0f64..9.0) {
        let k = Constants::default();
        let x = 10f64.powf(xe);
        let t = 10f64.powf(te);
        // e^{-α} varies on the scale t/α
        let h = 1e-4 * t / (0.5 * x * x / t).max(1.0);
        let d = cdf_e1_form_derivative(x, t, &k).unwrap();
        let fd = (cdf_e1_form(x, t + h, &k).unwrap().value - cdf_e1_form(x, t - h, &k).unwrap().value) / (2.0 * h);
        prop_assume!(d.abs() > 1e-300);
        prop_assert!((fd - d).abs() <= 1e-5 * d.abs(), "{} vs {}", fd, d);
    }

    #[test]
    fn constants_invariant(r in 1e-3f64..1e3) {
        let k = Constants::new(r).unwrap();
        let lhs = 0.5 * r * r;
        let rhs = (-(k.c_ref + 2.0 * k.gamma_euler)).exp();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-15 * (1.0 + r.ln().abs()) * 4.0);
    }

    #[test]
    fn log_series_decreases_in_time(xe in 0.05f64..1.0, te in 4.0f64..12.0) {
        let k = Constants::default();
        let x = 10f64.powf(xe);
        let t = 10f64.powf(te);
        let a = survival_log_series(x, t, &k, 3).unwrap().value;
        let b = survival_log_series(x, 10.0 * t, &k, 3).unwrap().value;
        prop_assert!(b < a && b > 0.0);
    }
}
