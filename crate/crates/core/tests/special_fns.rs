use disc_hitting::consts::{EULER_GAMMA, PI};
use disc_hitting::special_fns::{
    bessel_j0_y0, bessel_k0, bessel_k0_scaled, bessel_k1, exp_integral_e1, ASYMPTOTIC_RADIUS,
    SERIES_RADIUS,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn k0r(x: f64) -> f64 {
    bessel_k0(Complex64::new(x, 0.0)).unwrap().re
}

/// J0 by the trapezoid rule on (1/π)∫_0^π cos(x sin θ) dθ; the integrand is
/// smooth and periodic, so the rule converges geometrically.
fn j0_trapezoid(x: f64) -> f64 {
    let n = 400;
    let h = PI / n as f64;
    let mut s = 0.5 * (1.0 + 1.0);
    for i in 1..n {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s * h / PI
}

/// Y0 from its ascending series, summed directly.
fn y0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let (mut term, mut h, mut harm) = (1.0, 0.0, 0.0);
    let mut j = 1.0;
    for k in 1..80 {
        let kf = k as f64;
        term *= -y / (kf * kf);
        h += 1.0 / kf;
        j += term;
        harm += term * h;
    }
    (2.0 / PI) * ((0.5 * x).ln() + EULER_GAMMA) * j - (2.0 / PI) * harm
}

#[test]
fn k0_positive_and_decreasing_on_real_axis() {
    let xs: Vec<f64> = (0..=200)
        .map(|i| 0.1 + (30.0 - 0.1) * i as f64 / 200.0)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| k0r(x)).collect();
    assert!(vals.iter().all(|&v| v > 0.0));
    for w in vals.windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn k0_derivative_is_minus_k1() {
    for z in [
        Complex64::new(0.3, 0.0),
        Complex64::new(1.7, 0.4),
        Complex64::new(5.0, -3.0),
        Complex64::new(12.0, 7.0),
        Complex64::new(25.0, 1.0),
        Complex64::new(-2.0, 3.0),
    ] {
        let h = 1e-6;
        let d = (bessel_k0(z + h).unwrap() - bessel_k0(z - h).unwrap()) / (2.0 * h);
        let k1 = bessel_k1(z).unwrap();
        assert!((d + k1).norm() <= 1e-8 * k1.norm(), "z = {z}: {d} vs {k1}");
    }
}

#[test]
fn branches_join_continuously() {
    for seam in [SERIES_RADIUS, ASYMPTOTIC_RADIUS] {
        for k in 0..12 {
            let arg = -3.0 + 6.0 * k as f64 / 11.0;
            let e = Complex64::from_polar(1.0, arg);
            let lo = bessel_k0_scaled(e * seam * (1.0 - 1e-14)).unwrap();
            let hi = bessel_k0_scaled(e * seam * (1.0 + 1e-14)).unwrap();
            assert!(
                (lo - hi).norm() <= 1e-12 * lo.norm(),
                "|z| = {seam}, arg {arg}"
            );
        }
    }
}

#[test]
fn e1_derivative() {
    for a in [0.01f64, 0.5, 1.0, 3.0, 10.0, 40.0] {
        let h = 1e-6 * a.min(1.0);
        let d = (exp_integral_e1(a + h).unwrap() - exp_integral_e1(a - h).unwrap()) / (2.0 * h);
        let exact = -(-a).exp() / a;
        assert!((d - exact).abs() <= 1e-8 * exact.abs(), "a = {a}");
    }
}

#[test]
fn j0_y0_against_independent_forms() {
    for i in 0..40 {
        let x = 0.25 + 0.15 * i as f64;
        let (j, y) = bessel_j0_y0(x).unwrap();
        assert!((j - j0_trapezoid(x)).abs() < 1e-13, "J0({x})");
        assert!((y - y0_series(x)).abs() < 1e-11, "Y0({x})");
    }
    for x in [10.0, 25.0, 60.0] {
        let (j, _) = bessel_j0_y0(x).unwrap();
        assert!((j - j0_trapezoid(x)).abs() < 1e-13, "J0({x})");
    }
}

#[test]
fn k0_on_imaginary_axis_matches_hankel_relation() {
    for x in [0.5, 3.0, 15.0, 40.0] {
        let (j, y) = bessel_j0_y0(x).unwrap();
        let k = bessel_k0(Complex64::new(0.0, -x)).unwrap();
        let expect = Complex64::new(-0.5 * PI * y, 0.5 * PI * j);
        assert!((k - expect).norm() < 1e-12, "x = {x}");
    }
}

proptest! {
    #[test]
    fn k0_conjugate_symmetry(re in 0.01f64..40.0, im in -40.0f64..40.0) {
        let z = Complex64::new(re, im);
        let a = bessel_k0(z.conj()).unwrap();
        let b = bessel_k0(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-14 * b.norm().max(1e-300));
    }

    #[test]
    fn scaled_k0_times_exp_is_k0(re in 0.05f64..30.0, im in -30.0f64..30.0) {
        let z = Complex64::new(re, im);
        let a = bessel_k0(z).unwrap();
        let b = bessel_k0_scaled(z).unwrap() * (-z).exp();
        prop_assert!((a - b).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn j0_matches_trapezoid(x in 0.0f64..80.0) {
        let (j, _) = bessel_j0_y0(x).unwrap();
        prop_assert!((j - j0_trapezoid(x)).abs() < 1e-13);
    }

    #[test]
    fn e1_recurrence_bounds(a in 0.01f64..50.0) {
        // e^{-a} ln(1 + 2/a)/2 < E1(a) < e^{-a} ln(1 + 1/a)
        let e = exp_integral_e1(a).unwrap();
        let s = (-a).exp();
        prop_assert!(e > 0.5 * s * (1.0 + 2.0 / a).ln());
        prop_assert!(e < s * (1.0 + 1.0 / a).ln());
    }
}
