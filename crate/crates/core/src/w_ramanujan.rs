//! The function `W(λ) = ∫_0^∞ e^{-λu} du / ((ln u)² + π²)`, `λ > 0`.
//!
//! Four independent evaluation routes:
//!
//! * direct quadrature after `u = e^v` (the reference method);
//! * the sine form `W(λ) = ∫_0^∞ sin(λt) dt / ((ln t)² + π²/4) - e^{-λ}`;
//! * the cosine form `W(λ) = (2/π) ∫_0^∞ ln t cos(λt) dt / ((ln t)² + π²/4) + e^{-λ}`;
//! * the asymptotic series `λ W(λ) = Σ_n c_n (ln λ)^{-n-1}` with
//!   `Σ c_n z^n / n! = z / Γ(1 - z)`, valid as `λ → ∞` and as `λ → 0`.
//!
//! The two Fourier integrands decay only like `1/ln t`, so they are summed lobe
//! by lobe between zeros of the trigonometric factor and the tail of the
//! alternating lobe sequence is extrapolated ([`crate::quad::euler_limit`]).

use crate::consts::{EULER_GAMMA, PI};
use crate::error::{convergence, domain, Result};
use crate::quad::{fixed_gauss, gk21, gl20, integrate_with_breaks, Tolerance};
use crate::special_fns::{recip_gamma_series, Method};

/// `|ln λ|` below which the asymptotic series is flagged as unreliable.
pub const ASYMPTOTIC_WARN_LOG: f64 = 2.0;

/// Largest truncation order supported by the stored zeta table.
pub const MAX_ASYMPTOTIC_TERMS: usize = 30;

/// One value of `W(λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WEvaluation {
    pub lambda: f64,
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    /// Set when the asymptotic series is used with `|ln λ| < 2`.
    pub unreliable: bool,
}

/// Which trigonometric representation to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierVariant {
    Sine,
    Cosine,
}

/// Settings for the lobe-summation engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryConfig {
    /// Number of leading lobes integrated adaptively before extrapolation.
    pub lead_lobes: usize,
    /// Number of lobes fed to the extrapolation.
    pub depth: usize,
    /// Tolerance of the leading adaptive part; also the acceptance threshold
    /// for the extrapolated tail.
    pub tol: Tolerance,
}

impl Default for OscillatoryConfig {
    fn default() -> Self {
        Self {
            lead_lobes: 30,
            depth: 30,
            tol: Tolerance::new(1e-12, 1e-11),
        }
    }
}

/// Coefficients `c_0..=c_N` of `λW(λ) ~ Σ c_n (ln λ)^{-n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BouwkampSeries {
    coeffs: Vec<f64>,
}

impl BouwkampSeries {
    /// Series with coefficients up to `c_n_max` (`1 <= n_max <= 30`).
    pub fn new(n_max: usize) -> Result<Self> {
        let coeffs = recip_gamma_series(n_max)?;
        debug_assert!(coeffs[0] == 0.0 && coeffs[1] == 1.0);
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `Σ_{n=1}^{n_terms} c_n L^{-n-1}` with `L = ln λ`.
    pub fn lambda_w(&self, log_lambda: f64, n_terms: usize) -> f64 {
        let inv = 1.0 / log_lambda;
        let mut pow = inv; // L^{-n-1} for n = 0
        let mut sum = 0.0;
        for c in self.coeffs.iter().take(n_terms + 1).skip(1) {
            pow *= inv;
            sum += c * pow;
        }
        sum
    }
}

fn check_lambda(func: &'static str, lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(
            func,
            format!("lambda = {lambda} must be positive and finite"),
        ));
    }
    Ok(())
}

/// `W(λ)` by adaptive quadrature of `∫ exp(-λe^v + v) / (v² + π²) dv`.
pub fn w_quadrature(lambda: f64) -> Result<WEvaluation> {
    w_quadrature_tol(lambda, Tolerance::new(1e-300, 1e-13))
}

pub fn w_quadrature_tol(lambda: f64, tol: Tolerance) -> Result<WEvaluation> {
    check_lambda("w_quadrature", lambda)?;
    let peak = -lambda.ln();
    let offsets = [
        -45.0, -30.0, -20.0, -12.0, -7.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.6,
    ];
    let breaks: Vec<f64> = offsets.iter().map(|o| peak + o).collect();
    let q = integrate_with_breaks(
        |v: f64| (v - lambda * v.exp()).exp() / (v * v + PI * PI),
        &breaks,
        tol,
    )?;
    // the neglected range v < breaks[0] contributes at most e^{v}/(v² + π²) there
    let lo = breaks[0];
    let tail = lo.exp() / (lo.min(0.0).powi(2) + PI * PI);
    Ok(WEvaluation {
        lambda,
        value: q.value,
        method: Method::Quadrature,
        error_estimate: q.abs_error + tail,
        unreliable: false,
    })
}

/// `∫_0^∞ amp(t) trig(ωt) dt` for a slowly decaying amplitude.
///
/// The first `lead_lobes` half-periods are integrated adaptively; the
/// following `depth` lobes are integrated with a fixed Gauss rule and the
/// limit of their partial sums is extrapolated.
pub fn oscillatory_integral<A: Fn(f64) -> f64>(
    amp: A,
    variant: FourierVariant,
    omega: f64,
    cfg: &OscillatoryConfig,
) -> Result<(f64, f64)> {
    if !(omega > 0.0) {
        return Err(domain("oscillatory_integral", "frequency must be positive"));
    }
    let half_period = PI / omega;
    let phase = match variant {
        FourierVariant::Sine => 0.0,
        FourierVariant::Cosine => 0.5,
    };
    let trig = |t: f64| match variant {
        FourierVariant::Sine => (omega * t).sin(),
        FourierVariant::Cosine => (omega * t).cos(),
    };
    let integrand = |t: f64| {
        if t == 0.0 {
            0.0
        } else {
            amp(t) * trig(t)
        }
    };
    let zero = |k: usize| (k as f64 + phase) * half_period;

    let mut breaks = vec![0.0];
    breaks.extend((0..=cfg.lead_lobes).map(zero).filter(|&z| z > 0.0));
    let head = integrate_with_breaks(integrand, &breaks, cfg.tol)?;

    let start = cfg.lead_lobes;
    let mut partial = Vec::with_capacity(cfg.depth + 1);
    let mut running = 0.0;
    let mut lobe_err = 0.0;
    partial.push(0.0);
    for k in start..start + cfg.depth {
        let (a, b) = (zero(k), zero(k + 1));
        let v = fixed_gauss(integrand, a, b, gl20());
        // guard against a lobe the fixed rule does not resolve
        let (vk, ek) = gk21(&mut |t| integrand(t), a, b);
        lobe_err += ek.max((vk - v).abs());
        running += v;
        partial.push(running);
    }
    let (tail, change) = crate::quad::euler_limit(&partial);
    let (tail_short, _) = crate::quad::euler_limit(&partial[..partial.len() - 1]);
    let extrap_err = change.max((tail - tail_short).abs());
    let target = cfg.tol.abs.max(cfg.tol.rel * (head.value + tail).abs());
    if extrap_err > 1e3 * target {
        return Err(convergence(
            "oscillatory_integral",
            format!(
                "lobe extrapolation did not settle: change {extrap_err:.3e} after {} lobes",
                cfg.depth
            ),
        ));
    }
    Ok((head.value + tail, head.abs_error + lobe_err + extrap_err))
}

fn sine_amplitude(t: f64) -> f64 {
    let l = t.ln();
    1.0 / (l * l + 0.25 * PI * PI)
}

fn cosine_amplitude(t: f64) -> f64 {
    let l = t.ln();
    l / (l * l + 0.25 * PI * PI)
}

/// `W(λ)` from one of the two real Fourier representations.
pub fn w_fourier(lambda: f64, variant: FourierVariant) -> Result<WEvaluation> {
    w_fourier_with(lambda, variant, &OscillatoryConfig::default())
}

pub fn w_fourier_with(
    lambda: f64,
    variant: FourierVariant,
    cfg: &OscillatoryConfig,
) -> Result<WEvaluation> {
    check_lambda("w_fourier", lambda)?;
    let decay = (-lambda).exp();
    let (value, err, method) = match variant {
        FourierVariant::Sine => {
            let (s, e) = oscillatory_integral(sine_amplitude, variant, lambda, cfg)?;
            (s - decay, e, Method::FourierSine)
        }
        FourierVariant::Cosine => {
            let (c, e) = oscillatory_integral(cosine_amplitude, variant, lambda, cfg)?;
            (2.0 / PI * c + decay, 2.0 / PI * e, Method::FourierCosine)
        }
    };
    Ok(WEvaluation {
        lambda,
        value,
        method,
        error_estimate: err,
        unreliable: false,
    })
}

/// The raw Fourier integrals `(∫ sin(λt)/D dt, ∫ ln t cos(λt)/D dt)` with
/// `D = (ln t)² + π²/4`.
pub fn fourier_integrals(omega: f64, cfg: &OscillatoryConfig) -> Result<((f64, f64), (f64, f64))> {
    let s = oscillatory_integral(sine_amplitude, FourierVariant::Sine, omega, cfg)?;
    let c = oscillatory_integral(cosine_amplitude, FourierVariant::Cosine, omega, cfg)?;
    Ok((s, c))
}

/// `(1/2π) ∫_{-∞}^{∞} e^{-iλu} / ln(-iu) du` for `λ < 0`, which equals `-e^{λ}`.
///
/// Folding `u` and `-u` together gives
/// `(1/π) ∫_0^∞ ln u cos(|λ|u)/D du - ½ ∫_0^∞ sin(|λ|u)/D du`.
pub fn w_negative_side_check(lambda: f64) -> Result<f64> {
    if !(lambda < 0.0) || !lambda.is_finite() {
        return Err(domain(
            "w_negative_side_check",
            format!("lambda = {lambda} must be negative"),
        ));
    }
    let ((s, _), (c, _)) = fourier_integrals(-lambda, &OscillatoryConfig::default())?;
    Ok(c / PI - 0.5 * s)
}

/// `W(λ)` from the first `n_terms` terms of the `1/ln λ` expansion.
pub fn w_asymptotic(lambda: f64, n_terms: usize) -> Result<WEvaluation> {
    check_lambda("w_asymptotic", lambda)?;
    if lambda == 1.0 {
        return Err(domain("w_asymptotic", "ln λ = 0 at λ = 1"));
    }
    if n_terms == 0 || n_terms > MAX_ASYMPTOTIC_TERMS {
        return Err(domain(
            "w_asymptotic",
            format!("n_terms = {n_terms} outside 1..={MAX_ASYMPTOTIC_TERMS}"),
        ));
    }
    let series = BouwkampSeries::new((n_terms + 1).min(MAX_ASYMPTOTIC_TERMS))?;
    let log_l = lambda.ln();
    let lw = series.lambda_w(log_l, n_terms);
    let c = series.coeffs();
    let next = if n_terms < c.len() - 1 {
        c[n_terms + 1] * log_l.powi(-(n_terms as i32) - 2)
    } else {
        c[n_terms] * log_l.powi(-(n_terms as i32) - 1)
    };
    Ok(WEvaluation {
        lambda,
        value: lw / lambda,
        method: Method::Asymptotic,
        error_estimate: next.abs() / lambda,
        unreliable: log_l.abs() < ASYMPTOTIC_WARN_LOG,
    })
}

/// Three-term form `1/L² - 2γ/L³ - (π²/2 - 3γ²)/L⁴` of `λW(λ)`, `L = ln λ`.
pub fn lambda_w_three_terms(log_lambda: f64) -> f64 {
    let l = log_lambda;
    1.0 / (l * l)
        - 2.0 * EULER_GAMMA / l.powi(3)
        - (0.5 * PI * PI - 3.0 * EULER_GAMMA * EULER_GAMMA) / l.powi(4)
}
