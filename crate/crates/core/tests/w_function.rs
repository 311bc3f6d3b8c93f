use disc_hitting::w_ramanujan::{
    lambda_w_three_terms, w_asymptotic, w_fourier, w_quadrature, FourierVariant,
};
use disc_hitting::Error;
use proptest::prelude::*;

fn w(l: f64) -> f64 {
    w_quadrature(l).unwrap().value
}

#[test]
fn decreasing_and_log_convex_on_grid() {
    let grid: Vec<f64> = (0..=60)
        .map(|i| 10f64.powf(-6.0 + 0.25 * i as f64))
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&l| w(l)).collect();
    assert!(vals.iter().all(|&v| v > 0.0));
    for k in 1..vals.len() {
        assert!(vals[k] < vals[k - 1]);
    }
    // Laplace transform of a positive measure: W(a)W(b) ≥ W((a+b)/2)²
    for k in 1..grid.len() {
        let (a, b) = (grid[k - 1], grid[k]);
        let m = w(0.5 * (a + b));
        assert!(m * m <= vals[k - 1] * vals[k] * (1.0 + 1e-12), "λ = {a}");
    }
}

#[test]
fn three_term_expansion_brackets_truth_far_out() {
    // error of the three-term form shrinks like |ln λ|^{-3} relative to the leading term
    let mut last = f64::INFINITY;
    for e in [4, 8, 16, 32, 64] {
        let l = 10f64.powi(e);
        let big_l = l.ln();
        let rel = (l * w(l) - lambda_w_three_terms(big_l)).abs() * big_l * big_l;
        assert!(rel < last, "1e{e}");
        assert!(rel * big_l.powi(3) < 10.0);
        last = rel;
    }
}

#[test]
fn series_truncation_improves_with_terms_at_large_lambda() {
    let l = 1e40;
    let truth = w(l);
    let errs: Vec<f64> = (1..=5)
        .map(|n| (w_asymptotic(l, n).unwrap().value - truth).abs())
        .collect();
    for e in errs.windows(2) {
        assert!(e[1] < e[0], "{errs:?}");
    }
}

#[test]
fn error_paths() {
    assert!(matches!(w_quadrature(0.0), Err(Error::Domain { .. })));
    assert!(matches!(w_quadrature(f64::NAN), Err(Error::Domain { .. })));
    assert!(matches!(
        w_fourier(-1.0, FourierVariant::Sine),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(w_asymptotic(1.0, 3), Err(Error::Domain { .. })));
    assert!(matches!(w_asymptotic(10.0, 0), Err(Error::Domain { .. })));
    assert!(w_asymptotic(2.0, 3).unwrap().unreliable);
    assert!(!w_asymptotic(1e3, 3).unwrap().unreliable);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn representations_agree(e in -2.0f64..4.0) {
        let l = 10f64.powf(e);
        let q = w(l);
        let s = w_fourier(l, FourierVariant::Sine).unwrap().value;
        let c = w_fourier(l, FourierVariant::Cosine).unwrap().value;
        prop_assert!((q - s).abs() < 1e-9 && (q - c).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_lambda(e in -8.0f64..12.0, step in 1e-3f64..1.0) {
        let a = 10f64.powf(e);
        prop_assert!(w(a * (1.0 + step)) < w(a));
    }

    #[test]
    fn below_one_over_lambda_ln_squared_bound(e in -12.0f64..-1.0) {
        // W(λ) < ∫ e^{-λu} du / π² = 1/(π² λ)
        let l = 10f64.powf(e);
        prop_assert!(w(l) * l * std::f64::consts::PI.powi(2) < 1.0);
    }
}
