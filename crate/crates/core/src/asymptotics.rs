//! Large-time approximations of the hitting density and distribution.
//!
//! All formulas are written for the reference radius `r_ref` and the
//! centring constant `c = -2γ + ln(2/r_ref²)`; `ℓ = ln(e^c t)` throughout.
//! Each function returns the approximation together with the shape of its
//! error term (without the unknown constant), so that comparisons can scale
//! it by an empirically calibrated factor.

use crate::consts::{EULER_GAMMA, PI_SQ_OVER_6};
use crate::error::{domain, Result};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::special_fns::exp_integral_e1;
use crate::w_ramanujan::{w_quadrature, BouwkampSeries, MAX_ASYMPTOTIC_TERMS};

/// Reference radius and derived constants.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Constants {
    pub r_ref: f64,
    pub gamma_euler: f64,
    pub c_ref: f64,
}

impl Constants {
    pub fn new(r_ref: f64) -> Result<Self> {
        if !(r_ref > 0.0) || !r_ref.is_finite() {
            return Err(domain(
                "Constants",
                format!("r_ref = {r_ref} must be positive"),
            ));
        }
        Ok(Self {
            r_ref,
            gamma_euler: EULER_GAMMA,
            c_ref: -2.0 * EULER_GAMMA + (2.0 / (r_ref * r_ref)).ln(),
        })
    }

    /// `ln(e^c t)`
    pub fn log_time(&self, t: f64) -> f64 {
        self.c_ref + t.ln()
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::new(1.0).expect("unit radius is valid")
    }
}

/// `ξ = |x| / √t`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Xi(pub f64);

impl Xi {
    pub fn new(x_radius: f64, t: f64) -> Self {
        Xi(x_radius / t.sqrt())
    }

    /// `α = ξ²/2 = x²/(2t)`
    pub fn alpha(&self) -> f64 {
        0.5 * self.0 * self.0
    }
}

/// An asymptotic value and the shape of its error term.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Approximation {
    pub value: f64,
    /// error shape; the true error is at most a constant times this
    pub envelope: f64,
    /// false when the inputs are outside the regime the formula is meant for
    pub in_regime: bool,
}

fn check(func: &'static str, x_radius: f64, t: f64, k: &Constants) -> Result<()> {
    if !(x_radius > k.r_ref) || !x_radius.is_finite() {
        return Err(domain(
            func,
            format!("|x| = {x_radius} must exceed r_ref = {}", k.r_ref),
        ));
    }
    if !(t > 1.0) || !t.is_finite() {
        return Err(domain(func, format!("t = {t} must exceed 1")));
    }
    Ok(())
}

fn log_plus(v: f64) -> f64 {
    v.ln().max(0.0)
}

/// `φ(α) = -∫_1^∞ e^{-αy} ln(1 - 1/y) dy / y`.
///
/// With `σ = 1/y` this is `-∫_0^1 e^{-α/σ} ln(1-σ) dσ/σ`; on `[½, 1)` the
/// substitution `σ = 1 - e^{-w}` removes the logarithmic endpoint.
pub fn phi(alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || alpha.is_nan() {
        return Err(domain(
            "phi",
            format!("alpha = {alpha} must be non-negative"),
        ));
    }
    if alpha == 0.0 {
        return Ok(PI_SQ_OVER_6);
    }
    if alpha.is_infinite() {
        return Ok(0.0);
    }
    let tol = Tolerance::new(1e-300, 1e-13);
    let mut near: Vec<f64> = [0.0, alpha.min(0.5) * 0.1, alpha.min(0.5), 0.25, 0.5]
        .into_iter()
        .collect();
    near.sort_by(f64::total_cmp);
    near.dedup();
    let inner = integrate_with_breaks(
        |s: f64| {
            if s == 0.0 {
                0.0
            } else {
                -(-alpha / s).exp() * (-s).ln_1p() / s
            }
        },
        &near,
        tol,
    )?;
    let ln2 = std::f64::consts::LN_2;
    let outer = integrate_with_breaks(
        |w: f64| {
            let s = -(-w).exp_m1();
            w * (-w).exp() * (-alpha / s).exp() / s
        },
        &[ln2, 2.0, 5.0, 12.0, 25.0, 45.0],
        tol,
    )?;
    Ok(inner.value + outer.value)
}

/// `φ'(α) = -(γ + ln α) e^{-α}/α - E1(α)/α`.
pub fn phi_derivative(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(domain("phi_derivative", "alpha must be positive"));
    }
    Ok(-(EULER_GAMMA + alpha.ln()) * (-alpha).exp() / alpha - exp_integral_e1(alpha)? / alpha)
}

/// `p(t) ≈ 2 ln(|x|/r_ref) e^c W(e^c t)`, accurate for `|x| ≪ √t`.
///
/// Error shape `(1 + ln⁺|x|)/(t (ln t)²) · (x² ∧ t)/t`.
pub fn density_w_leading(x_radius: f64, t: f64, k: &Constants) -> Result<Approximation> {
    check("density_w_leading", x_radius, t, k)?;
    let ec = k.c_ref.exp();
    let w = w_quadrature(ec * t)?.value;
    let value = 2.0 * (x_radius / k.r_ref).ln() * ec * w;
    let lt = t.ln();
    let envelope = (1.0 + log_plus(x_radius)) / (t * lt * lt) * (x_radius * x_radius).min(t) / t;
    Ok(Approximation {
        value,
        envelope,
        in_regime: true,
    })
}

/// `p(t) ≈ ln(½e^c x²) e^{-x²/2t} / (t ℓ²)`, plus `2γ ln(t/x²)/(t (ln t)³)`
/// when `x² < t`.
///
/// Error shape `1/(t (ln t)³)` for `x² < t`, otherwise
/// `(1 + ln²(x²/t))/(x² (ln t)³)`.
pub fn density_heat_kernel(x_radius: f64, t: f64, k: &Constants) -> Result<Approximation> {
    check("density_heat_kernel", x_radius, t, k)?;
    let x2 = x_radius * x_radius;
    let l = k.log_time(t);
    let lt = t.ln();
    let lead = (0.5 * k.c_ref.exp() * x2).ln() * (-0.5 * x2 / t).exp() / (t * l * l);
    let (corr, envelope) = if x2 < t {
        (
            2.0 * EULER_GAMMA * log_plus(t / x2) / (t * lt.powi(3)),
            1.0 / (t * lt.powi(3)),
        )
    } else {
        let lr = (x2 / t).ln();
        (0.0, (1.0 + lr * lr) / (x2 * lt.powi(3)))
    };
    Ok(Approximation {
        value: lead + corr,
        envelope,
        in_regime: true,
    })
}

/// `P(τ <= t) ≈ A(t) = (1/ℓ)(1 - γ/ℓ) E1(ξ²/2) + φ(ξ²/2)/ℓ²`, clamped to `[0, 1]`.
///
/// Error shape `|ln(ξ/2)|/(ln t)³` for `x² < t`, otherwise
/// `ln²(2ξ)/(ξ² (ln t)³)`.
pub fn cdf_e1_form(x_radius: f64, t: f64, k: &Constants) -> Result<Approximation> {
    check("cdf_e1_form", x_radius, t, k)?;
    let xi = Xi::new(x_radius, t);
    let a = xi.alpha();
    let l = k.log_time(t);
    let value = (1.0 - EULER_GAMMA / l) * exp_integral_e1(a)? / l + phi(a)? / (l * l);
    let lt3 = t.ln().powi(3);
    let envelope = if x_radius * x_radius < t {
        (0.5 * xi.0).ln().abs() / lt3
    } else {
        (2.0 * xi.0).ln().powi(2) / (xi.0 * xi.0) / lt3
    };
    Ok(Approximation {
        value: value.clamp(0.0, 1.0),
        envelope,
        in_regime: true,
    })
}

/// `dA/dt = ln(½e^c x²) e^{-α}/(tℓ²) + 2γ E1(α)/(tℓ³) - 2φ(α)/(tℓ³)`, `α = x²/2t`.
pub fn cdf_e1_form_derivative(x_radius: f64, t: f64, k: &Constants) -> Result<f64> {
    check("cdf_e1_form_derivative", x_radius, t, k)?;
    let a = Xi::new(x_radius, t).alpha();
    let l = k.log_time(t);
    let first = (0.5 * k.c_ref.exp() * x_radius * x_radius).ln() * (-a).exp() / (t * l * l);
    let rest = (2.0 * EULER_GAMMA * exp_integral_e1(a)? - 2.0 * phi(a)?) / (t * l.powi(3));
    Ok(first + rest)
}

/// The two-term principal part `b(t)` of `dA/dt` for `x² < t`; equals
/// [`density_heat_kernel`] for `x² < t`.
pub fn cdf_e1_form_principal(x_radius: f64, t: f64, k: &Constants) -> Result<f64> {
    Ok(density_heat_kernel(x_radius, t, k)?.value)
}

/// `P(τ > t) ≈ 2 ln(|x|/r_ref) Σ_{n=1}^{N} c_n / (n ℓ^n)`
/// `= (2 ln(|x|/r_ref)/ℓ)[1 - γ/ℓ - (π²/6 - γ²)/ℓ² + ⋯]`.
///
/// Meant for `x² < t`; outside that `in_regime` is false. Error shape
/// `ξ² ln|x|/(ln t)²` plus the first omitted term.
pub fn survival_log_series(
    x_radius: f64,
    t: f64,
    k: &Constants,
    n_terms: usize,
) -> Result<Approximation> {
    check("survival_log_series", x_radius, t, k)?;
    if n_terms == 0 || n_terms > MAX_ASYMPTOTIC_TERMS - 1 {
        return Err(domain(
            "survival_log_series",
            format!(
                "n_terms = {n_terms} outside 1..={}",
                MAX_ASYMPTOTIC_TERMS - 1
            ),
        ));
    }
    let series = BouwkampSeries::new(n_terms + 1)?;
    let c = series.coeffs();
    let l = k.log_time(t);
    let pref = 2.0 * (x_radius / k.r_ref).ln();
    let term = |n: usize| c[n] / (n as f64 * l.powi(n as i32));
    let value = pref * (1..=n_terms).map(term).sum::<f64>();
    let xi2 = x_radius * x_radius / t;
    let lt = t.ln();
    let envelope = xi2 * log_plus(x_radius).max(1.0) / (lt * lt) + (pref * term(n_terms + 1)).abs();
    Ok(Approximation {
        value,
        envelope,
        in_regime: x_radius * x_radius < t,
    })
}
