//! Special functions used throughout the crate: the modified Bessel
//! functions `K0`, `K1` of complex argument (and their boundary values on the
//! negative real axis), `J0`/`Y0` of real argument, the exponential integral
//! `E1`, and the Taylor coefficients of `z/Γ(1 - z)`.
//!
//! `K0`/`K1` are evaluated by three branches chosen on `|z|`:
//!
//! * `|z| <= SERIES_RADIUS`: ascending series;
//! * `SERIES_RADIUS < |z| < ASYMPTOTIC_RADIUS`: the integral representation
//!   `e^z K_ν(z) = sqrt(π/2z)/Γ(ν+½) ∫_0^∞ e^{-s} s^{ν-½} (1 + s/2z)^{ν-½} ds`
//!   with `s = v²`, on fixed Gauss–Legendre panels;
//! * `|z| >= ASYMPTOTIC_RADIUS`: the Hankel asymptotic expansion.
//!
//! For `|arg z| > 3π/4` the last two branches are applied to `w = -z` and
//! continued with `K_ν(w e^{±iπ}) = e^{∓iνπ} K_ν(w) ∓ iπ I_ν(w)`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::consts::{EULER_GAMMA, PI, ZETA, ZETA_MAX_ARG};
use crate::error::{domain, Error, Result};
use crate::quad::{gauss_legendre, integrate, Tolerance};

/// Below this modulus the ascending series is used.
pub const SERIES_RADIUS: f64 = 2.0;
/// At and above this modulus the asymptotic expansion is used.
pub const ASYMPTOTIC_RADIUS: f64 = 20.0;

/// Which algorithm produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Integral,
    Asymptotic,
    Quadrature,
    FourierSine,
    FourierCosine,
    BranchCut,
    LogSurrogate,
    LargeXi,
    ClosedForm,
}

/// A numerical result together with how it was obtained and an a-posteriori
/// absolute error estimate (never negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub method: Method,
    pub error_estimate: f64,
}

impl<T> Evaluation<T> {
    pub fn new(value: T, method: Method, error_estimate: f64) -> Self {
        debug_assert!(error_estimate >= 0.0 || error_estimate.is_nan());
        Self {
            value,
            method,
            error_estimate: error_estimate.abs(),
        }
    }
}

/// Side of the branch cut along the negative real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    /// limit from the upper half plane, `arg → +π`
    Upper,
    /// limit from the lower half plane, `arg → -π`
    Lower,
}

const SERIES_MAX_TERMS: usize = 200;
const SERIES_REL_EPS: f64 = 1e-18;

fn check_principal(func: &'static str, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(domain(func, format!("non-finite argument {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(domain(func, "argument is zero"));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(domain(
            func,
            "argument on the negative real axis; use the cut boundary values",
        ));
    }
    Ok(())
}

/// Ascending series for `(K0(z), z K1(z))`, principal branch.
fn series_k0_f(z: Complex64) -> (Complex64, Complex64) {
    let q = z * z * 0.25;
    let log_half = (z * 0.5).ln();
    let c = log_half + EULER_GAMMA;

    // K0 = Σ q^k/(k!)² (H_k - γ - ln(z/2))
    // zK1 = 1 + z ln(z/2) I1(z) - (z²/4) Σ (ψ(k+1) + ψ(k+2)) q^k/(k!(k+1)!)
    let mut term0 = Complex64::new(1.0, 0.0); // q^k/(k!)²
    let mut term1 = Complex64::new(1.0, 0.0); // q^k/(k!(k+1)!)
    let mut harmonic = 0.0; // H_k, accumulated incrementally
    let mut k0 = -c;
    let mut i1_sum = term1;
    let mut psi_sum = term1 * (-2.0 * EULER_GAMMA + 1.0);
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        term0 = term0 * q / (kf * kf);
        term1 = term1 * q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        let add0 = term0 * (harmonic - c);
        k0 += add0;
        i1_sum += term1;
        // ψ(k+1) + ψ(k+2) = 2H_k + 1/(k+1) - 2γ
        let add1 = term1 * (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        psi_sum += add1;
        if add0.norm() <= SERIES_REL_EPS * k0.norm()
            && add1.norm() <= SERIES_REL_EPS * psi_sum.norm()
        {
            break;
        }
    }
    let i1 = z * 0.5 * i1_sum;
    let f = Complex64::new(1.0, 0.0) + z * log_half * i1 - q * psi_sum;
    (k0, f)
}

/// Scaled pair `(e^z K0(z), e^z K1(z))` by the Hankel expansion.
fn asymptotic_k01_scaled(z: Complex64) -> (Complex64, Complex64) {
    let pref = (PI / (2.0 * z)).sqrt();
    let mut s0 = Complex64::new(1.0, 0.0);
    let mut s1 = Complex64::new(1.0, 0.0);
    let mut t0 = Complex64::new(1.0, 0.0);
    let mut t1 = Complex64::new(1.0, 0.0);
    let inv8z = 1.0 / (8.0 * z);
    let mut prev0 = f64::INFINITY;
    let mut prev1 = f64::INFINITY;
    let mut done0 = false;
    let mut done1 = false;
    for k in 1..60 {
        let kf = k as f64;
        let odd = (2.0 * kf - 1.0) * (2.0 * kf - 1.0);
        if !done0 {
            let next = t0 * (-odd) * inv8z / kf;
            if next.norm() >= prev0 {
                done0 = true;
            } else {
                t0 = next;
                prev0 = t0.norm();
                s0 += t0;
                done0 = prev0 < 1e-17 * s0.norm();
            }
        }
        if !done1 {
            let next = t1 * (4.0 - odd) * inv8z / kf;
            if next.norm() >= prev1 {
                done1 = true;
            } else {
                t1 = next;
                prev1 = t1.norm();
                s1 += t1;
                done1 = prev1 < 1e-17 * s1.norm();
            }
        }
        if done0 && done1 {
            break;
        }
    }
    (pref * s0, pref * s1)
}

struct Panels {
    nodes: Vec<(f64, f64)>,
}

/// Gauss–Legendre panels covering `v ∈ [0, 6.6]`; `e^{-v²}` is below 1e-18
/// beyond the last panel.
fn panels() -> &'static Panels {
    static P: OnceLock<Panels> = OnceLock::new();
    P.get_or_init(|| {
        let rule = gauss_legendre(20);
        let edges = [0.0, 0.8, 1.6, 2.4, 3.2, 4.0, 5.0, 6.6];
        let mut nodes = Vec::with_capacity(rule.len() * (edges.len() - 1));
        for w in edges.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let h = 0.5 * (w[1] - w[0]);
            for &(x, wt) in &rule {
                let v: f64 = c + h * x;
                nodes.push((v, wt * h * (-v * v).exp()));
            }
        }
        Panels { nodes }
    })
}

/// Scaled pair `(e^z K0(z), e^z K1(z))` from the integral representation.
/// Accurate for `|z| >= SERIES_RADIUS` and `|arg z| <= 3π/4`.
fn integral_k01_scaled(z: Complex64) -> (Complex64, Complex64) {
    let inv2z = 1.0 / (2.0 * z);
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    for &(v, w) in &panels().nodes {
        let v2 = v * v;
        let root = (Complex64::new(1.0, 0.0) + v2 * inv2z).sqrt();
        s0 += w / root;
        s1 += w * v2 * root;
    }
    let pref = (2.0 / z).sqrt();
    (pref * s0, pref * s1 * 2.0)
}

/// `(e^{-w} I0(w), e^{-w} I1(w))` for `Re w >= 0` by the trapezoidal rule on
/// `(1/π) ∫_0^π e^{w(cos θ - 1)} cos(νθ) dθ`.
fn scaled_i01(w: Complex64) -> (Complex64, Complex64) {
    let n = (w.norm() * 1.5) as usize + 48;
    let h = PI / n as f64;
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let theta = j as f64 * h;
        let weight = if j == 0 || j == n { 0.5 } else { 1.0 };
        let e = (w * (theta.cos() - 1.0)).exp() * weight;
        s0 += e;
        s1 += e * theta.cos();
    }
    (s0 * (h / PI), s1 * (h / PI))
}

fn direct_k01_scaled(z: Complex64) -> (Complex64, Complex64, Method) {
    if z.norm() >= ASYMPTOTIC_RADIUS {
        let (a, b) = asymptotic_k01_scaled(z);
        (a, b, Method::Asymptotic)
    } else {
        let (a, b) = integral_k01_scaled(z);
        (a, b, Method::Integral)
    }
}

/// `(e^z K0(z), e^z K1(z))` outside the series disc.
fn outer_k01_scaled(z: Complex64) -> (Complex64, Complex64, Method) {
    if z.arg().abs() <= 0.75 * PI {
        return direct_k01_scaled(z);
    }
    // z = w e^{mπi}, m = sign(Im z), Re w > 0
    let w = -z;
    let m = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let (k0w, k1w, method) = direct_k01_scaled(w);
    let (i0w, i1w) = scaled_i01(w);
    // e^{z} K(w) e^{-w} = e^{-2w} (e^{w} K(w))
    let damp = (-2.0 * w).exp();
    let i_pi_m = Complex64::new(0.0, PI * m);
    let k0 = damp * k0w - i_pi_m * i0w;
    let k1 = -(damp * k1w) - i_pi_m * i1w;
    (k0, k1, method)
}

/// `(e^z K0(z), e^z · z K1(z))` for a validated principal-branch argument.
pub(crate) fn k0_f_scaled(z: Complex64) -> (Complex64, Complex64, Method) {
    if z.norm() <= SERIES_RADIUS {
        let (k0, f) = series_k0_f(z);
        let e = z.exp();
        (k0 * e, f * e, Method::Series)
    } else {
        let (k0, k1, m) = outer_k01_scaled(z);
        (k0, k1 * z, m)
    }
}

/// `K0(z)` on the principal branch `-π < arg z < π`.
pub fn bessel_k0(z: Complex64) -> Result<Complex64> {
    check_principal("bessel_k0", z)?;
    let (k0, _, _) = k0_f_scaled(z);
    Ok(k0 * (-z).exp())
}

/// `K0(z)` with the method that produced it.
pub fn bessel_k0_eval(z: Complex64) -> Result<Evaluation<Complex64>> {
    check_principal("bessel_k0", z)?;
    let (k0, _, method) = k0_f_scaled(z);
    let v = k0 * (-z).exp();
    Ok(Evaluation::new(v, method, 1e-13 * v.norm()))
}

/// `e^z K0(z)`, which stays representable for large `Re z`.
pub fn bessel_k0_scaled(z: Complex64) -> Result<Complex64> {
    check_principal("bessel_k0_scaled", z)?;
    Ok(k0_f_scaled(z).0)
}

/// `K1(z)` on the principal branch.
pub fn bessel_k1(z: Complex64) -> Result<Complex64> {
    check_principal("bessel_k1", z)?;
    let (_, f, _) = k0_f_scaled(z);
    Ok(f * (-z).exp() / z)
}

/// `F(z) = z K1(z) = -z K0'(z)`; `F(z) → 1` as `z → 0`.
pub fn bessel_f(z: Complex64) -> Result<Complex64> {
    check_principal("bessel_f", z)?;
    let (_, f, _) = k0_f_scaled(z);
    Ok(f * (-z).exp())
}

/// Boundary value of `K0(√(2z))` as `z → -u ± 0i`, i.e. `K0(± i √(2u))`.
pub fn bessel_k0_negreal(u: f64, side: CutSide) -> Result<Complex64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(domain(
            "bessel_k0_negreal",
            format!("u = {u} must be positive"),
        ));
    }
    let y = (2.0 * u).sqrt();
    Ok(k0_on_imaginary_axis(y, side))
}

/// `K0(± i y)` for `y > 0`: `+` on the upper side of the cut.
pub(crate) fn k0_on_imaginary_axis(y: f64, side: CutSide) -> Complex64 {
    let z = Complex64::new(0.0, y);
    let v = if y <= SERIES_RADIUS {
        series_k0_f(z).0
    } else {
        let (k0, _, _) = direct_k01_scaled(z);
        k0 * Complex64::new(0.0, -y).exp()
    };
    match side {
        CutSide::Upper => v,
        CutSide::Lower => v.conj(),
    }
}

/// `(J0(x), Y0(x))` for real `x > 0`, via `K0(-ix) = -(π/2) Y0(x) + i (π/2) J0(x)`.
pub fn bessel_j0_y0(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_j0_y0", format!("x = {x} must be positive")));
    }
    let k = k0_on_imaginary_axis(x, CutSide::Lower);
    Ok((2.0 / PI * k.im, -2.0 / PI * k.re))
}

/// `Σ_k (-y)^k / (k!)² = J0(2√y)` for `y >= 0`.
pub fn bessel_j0(y: f64) -> Result<f64> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(domain("bessel_j0", format!("y = {y} must be non-negative")));
    }
    if y <= 4.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..SERIES_MAX_TERMS {
            let kf = k as f64;
            term *= -y / (kf * kf);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        Ok(sum)
    } else {
        Ok(bessel_j0_y0(2.0 * y.sqrt())?.0)
    }
}

/// Exponential integral `E1(a) = ∫_a^∞ e^{-u}/u du`, `a > 0`.
pub fn exp_integral_e1(a: f64) -> Result<f64> {
    if !(a > 0.0) || a.is_nan() {
        return Err(domain(
            "exp_integral_e1",
            format!("a = {a} must be positive"),
        ));
    }
    if a.is_infinite() {
        return Ok(0.0);
    }
    if a < 1.0 {
        // E1(a) = -γ - ln a - ∫_0^a (e^{-u} - 1)/u du
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..SERIES_MAX_TERMS {
            let kf = k as f64;
            term *= -a / kf;
            let add = -term / kf;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        Ok(-EULER_GAMMA - a.ln() + sum)
    } else {
        // E1(a) = e^{-a} ∫_0^∞ e^{-s}/(a+s) ds
        let q = integrate(
            |s: f64| (-s).exp() / (a + s),
            0.0,
            48.0,
            Tolerance::new(0.0, 4e-14),
        )?;
        Ok((-a).exp() * q.value)
    }
}

/// Coefficients `c_0..=c_{n_max}` of `z/Γ(1-z) = Σ c_n z^n / n!`.
///
/// Built from `ln Γ(1-z) = γz + Σ_{k>=2} ζ(k) z^k / k` and the power-series
/// exponential recurrence.
pub fn recip_gamma_series(n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(domain("recip_gamma_series", "n_max must be at least 1"));
    }
    if n_max > ZETA_MAX_ARG - 1 {
        return Err(Error::Precision {
            func: "recip_gamma_series",
            detail: format!(
                "n_max = {n_max} exceeds the zeta table (max {})",
                ZETA_MAX_ARG - 1
            ),
        });
    }
    // g(z) = -ln Γ(1-z): g_1 = -γ, g_k = -ζ(k)/k
    let g = |k: usize| -> f64 {
        if k == 1 {
            -EULER_GAMMA
        } else {
            -ZETA[k - 2] / k as f64
        }
    };
    // f = exp(g): f_0 = 1, n f_n = Σ_{k=1}^n k g_k f_{n-k}
    let mut f = vec![1.0];
    for n in 1..n_max {
        let s: f64 = (1..=n).map(|k| k as f64 * g(k) * f[n - k]).sum();
        f.push(s / n as f64);
    }
    let mut c = vec![0.0; n_max + 1];
    let mut factorial = 1.0;
    for n in 1..=n_max {
        factorial *= n as f64;
        c[n] = factorial * f[n - 1];
    }
    Ok(c)
}
