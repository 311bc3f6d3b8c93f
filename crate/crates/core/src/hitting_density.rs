//! Density and distribution of the first time planar Brownian motion started
//! at distance `|x|` from the origin enters the disc of radius `r`.
//!
//! The Laplace transform `E_x[e^{-λτ}] = K0(|x|√(2λ)) / K0(r√(2λ))` has a
//! logarithmic branch cut on the negative axis. Folding the Bromwich contour
//! onto that cut gives the non-oscillatory representations
//!
//! ```text
//! p(t)         = (1/π) ∫_0^∞ e^{-tu} Im R(u) du
//! P(τ > t)     = (1/π) ∫_0^∞ e^{-tu} Im R(u) du / u
//! R(u)         = K0(-i|x|√(2u)) / K0(-ir√(2u)) = H0(|x|√(2u)) / H0(r√(2u))
//! ```
//!
//! with `H0 = J0 + iY0`. Both integrals are taken in `v = ln u`.

use num_complex::Complex64;

use crate::consts::{EULER_GAMMA, PI};
use crate::error::{convergence, domain, Error, Result};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::special_fns::{
    bessel_j0, bessel_j0_y0, bessel_k0_scaled, k0_on_imaginary_axis, CutSide, Evaluation, Method,
};
use crate::w_ramanujan::w_quadrature;

/// Disc radius and starting distance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Geometry {
    pub r: f64,
    pub x_radius: f64,
}

impl Geometry {
    pub fn new(r: f64, x_radius: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(
                "Geometry",
                format!("radius r = {r} must be positive"),
            ));
        }
        if !(x_radius > r) || !x_radius.is_finite() {
            return Err(domain(
                "Geometry",
                format!("start |x| = {x_radius} must exceed r = {r}"),
            ));
        }
        Ok(Self { r, x_radius })
    }

    pub fn at(self, t: f64) -> Result<HittingQuery> {
        HittingQuery::new(self.r, self.x_radius, t)
    }

    /// `ln(|x|/r)`
    pub fn log_ratio(&self) -> f64 {
        (self.x_radius / self.r).ln()
    }
}

/// One evaluation point `(r, |x|, t)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HittingQuery {
    pub r: f64,
    pub x_radius: f64,
    pub t: f64,
}

impl HittingQuery {
    pub fn new(r: f64, x_radius: f64, t: f64) -> Result<Self> {
        Geometry::new(r, x_radius)?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain(
                "HittingQuery",
                format!("time t = {t} must be positive"),
            ));
        }
        Ok(Self { r, x_radius, t })
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            r: self.r,
            x_radius: self.x_radius,
        }
    }
}

/// How far along the cut the numerical integral extends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperCutoff {
    /// `u_max = k · max(1/t, 1/r²)`; the neglected tail is below `e^{-k}/(πt)`.
    Decay(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub upper_cutoff: UpperCutoff,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
            upper_cutoff: UpperCutoff::Decay(50.0),
        }
    }
}

impl InversionConfig {
    fn validate(&self) -> Result<()> {
        let UpperCutoff::Decay(k) = self.upper_cutoff;
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && k > 0.0 && self.max_subdivisions > 0) {
            return Err(Error::Config(
                "inversion tolerances must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `abs_tol` is relative to the integrand scale, `1/t` for the density.
    fn tolerance(&self, scale: f64) -> Tolerance {
        Tolerance::new(self.abs_tol * scale, self.rel_tol)
            .with_max_subdivisions(self.max_subdivisions)
    }

    fn u_max(&self, r: f64, t: f64) -> f64 {
        let UpperCutoff::Decay(k) = self.upper_cutoff;
        k * (1.0 / t).max(1.0 / (r * r))
    }
}

/// `E_x[e^{-λτ}] = K0(|x|√(2λ)) / K0(r√(2λ))`.
pub fn laplace_transform(g: Geometry, lambda: f64) -> Result<f64> {
    let g = Geometry::new(g.r, g.x_radius)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(
            "laplace_transform",
            format!("lambda = {lambda} must be positive"),
        ));
    }
    let s = (2.0 * lambda).sqrt();
    let (a, b) = (g.x_radius * s, g.r * s);
    let ka = bessel_k0_scaled(Complex64::new(a, 0.0))?.re;
    let kb = bessel_k0_scaled(Complex64::new(b, 0.0))?.re;
    Ok((b - a).exp() * ka / kb)
}

/// `Im R(u)` on the lower side of the cut.
pub fn cut_jump(g: Geometry, u: f64) -> f64 {
    let s = (2.0 * u).sqrt();
    let ka = k0_on_imaginary_axis(g.x_radius * s, CutSide::Lower);
    let kb = k0_on_imaginary_axis(g.r * s, CutSide::Lower);
    let den = kb.norm_sqr();
    debug_assert!(den > 0.0, "|K0| vanished on the cut");
    (ka * kb.conj()).im / den
}

fn log_breaks(lo: f64, hi: f64, interior: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = interior
        .iter()
        .copied()
        .filter(|&v| v > lo && v < hi)
        .collect();
    b.push(lo);
    b.push(hi);
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    b
}

fn cut_breaks(g: Geometry, t: f64, lo: f64, hi: f64) -> Vec<f64> {
    let lt = -t.ln();
    let mut inner = vec![
        lt - 6.0,
        lt - 3.0,
        lt - 1.0,
        lt,
        lt + 1.0,
        lt + 2.0,
        lt + 3.0,
    ];
    inner.push(-2.0 * g.x_radius.ln());
    inner.push(-2.0 * g.r.ln());
    log_breaks(lo, hi, &inner)
}

/// `p_{r,x}(t)` by branch-cut inversion.
pub fn density_branchcut(q: HittingQuery, cfg: &InversionConfig) -> Result<Evaluation<f64>> {
    let q = HittingQuery::new(q.r, q.x_radius, q.t)?;
    cfg.validate()?;
    let g = q.geometry();
    let t = q.t;
    let u_max = cfg.u_max(g.r, t);
    let u_lo = 1e-18 / t.max(g.x_radius * g.x_radius).max(1.0);
    let (lo, hi) = (u_lo.ln(), u_max.ln());
    let breaks = cut_breaks(g, t, lo, hi);
    let res = integrate_with_breaks(
        |v: f64| {
            let u = v.exp();
            (-t * u).exp() * u * cut_jump(g, u)
        },
        &breaks,
        cfg.tolerance(1.0 / t),
    )
    .map_err(|e| rename(e, "density_branchcut"))?;
    // |Im R| <= 1 because |H0| decreases; bounds both neglected ranges
    let tail = ((-t * u_max).exp() / t + u_lo) / PI;
    let value = (res.value / PI).max(0.0);
    Ok(Evaluation::new(
        value,
        Method::BranchCut,
        res.abs_error / PI + tail,
    ))
}

/// `P_x(τ > t)`.
pub fn survival(q: HittingQuery, cfg: &InversionConfig) -> Result<Evaluation<f64>> {
    let q = HittingQuery::new(q.r, q.x_radius, q.t)?;
    cfg.validate()?;
    let g = q.geometry();
    let t = q.t;
    let u_max = cfg.u_max(g.r, t);
    let u_lo = 1e-18 / t.max(g.x_radius * g.x_radius).max(g.r * g.r).max(1.0);
    let (lo, hi) = (u_lo.ln(), u_max.ln());
    let breaks = cut_breaks(g, t, lo, hi);
    let res = integrate_with_breaks(
        |v: f64| {
            let u = v.exp();
            (-t * u).exp() * cut_jump(g, u)
        },
        &breaks,
        cfg.tolerance(1.0),
    )
    .map_err(|e| rename(e, "survival"))?;
    // below u_lo: J0 ≈ 1 and Y0 ≈ (2/π)(ln(y/2) + γ), integrated in closed form
    let big_b = -(g.r * (2.0 * u_lo).sqrt() / 2.0).ln() - EULER_GAMMA;
    let head = 2.0 * g.log_ratio() / PI * (0.5 * PI - (2.0 * big_b / PI).atan());
    let head_err = 10.0 * u_lo * (t + g.x_radius * g.x_radius) * head;
    let value = (res.value / PI + head).clamp(0.0, 1.0);
    let tail = (-t * u_max).exp() / (PI * t * u_max);
    Ok(Evaluation::new(
        value,
        Method::BranchCut,
        res.abs_error / PI + head_err + tail,
    ))
}

/// `P_x(τ <= t) = 1 - P_x(τ > t)`.
pub fn cdf(q: HittingQuery, cfg: &InversionConfig) -> Result<Evaluation<f64>> {
    let s = survival(q, cfg)?;
    Ok(Evaluation::new(1.0 - s.value, s.method, s.error_estimate))
}

/// `∫_{t0}^{t1} p(t) dt` by quadrature in `ln t`.
pub fn integrate_density(
    g: Geometry,
    t0: f64,
    t1: f64,
    cfg: &InversionConfig,
) -> Result<Evaluation<f64>> {
    if !(t0 > 0.0 && t1 > t0) {
        return Err(domain("integrate_density", "need 0 < t0 < t1"));
    }
    let (a, b) = (t0.ln(), t1.ln());
    let n = ((b - a) / 1.5).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let mut failure = None;
    let res = integrate_with_breaks(
        |s: f64| {
            let t = s.exp();
            match g.at(t).and_then(|q| density_branchcut(q, cfg)) {
                Ok(p) => t * p.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &breaks,
        Tolerance::new(1e-12, 1e-9),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Evaluation::new(res.value, Method::BranchCut, res.abs_error))
}

fn rename(e: Error, func: &'static str) -> Error {
    match e {
        Error::Convergence { detail, .. } => convergence(func, detail),
        other => other,
    }
}

/// `c = -2γ + ln(2/r²)`, the constant that recentres logarithms for radius `r`.
pub fn log_center(r: f64) -> f64 {
    -2.0 * EULER_GAMMA + (2.0 / (r * r)).ln()
}

/// Radius whose log-centre constant is zero: `√2 e^{-γ}`.
pub fn zero_center_radius() -> f64 {
    std::f64::consts::SQRT_2 * (-EULER_GAMMA).exp()
}

/// Below this `y` the harmonic sum is summed termwise; above it the closed
/// Bessel form is used.
pub const SURROGATE_SERIES_LIMIT: f64 = 4.0;

/// `Σ_k (-y)^k H_k / (k!)²` with `H_k` the harmonic numbers.
pub fn harmonic_bessel_sum(y: f64) -> Result<f64> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(domain(
            "harmonic_bessel_sum",
            format!("y = {y} must be non-negative"),
        ));
    }
    if y <= SURROGATE_SERIES_LIMIT {
        Ok(harmonic_series(y))
    } else {
        let (j0, y0) = bessel_j0_y0(2.0 * y.sqrt())?;
        Ok(-0.5 * PI * y0 + (EULER_GAMMA + 0.5 * y.ln()) * j0)
    }
}

pub(crate) fn harmonic_series(y: f64) -> f64 {
    let mut term = 1.0;
    let mut h = 0.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -y / (kf * kf);
        h += 1.0 / kf;
        let add = term * h;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Density of the log-denominator model in which `K0(r√(2λ))` is replaced by
/// its small-argument form; `q.r` plays the role of the reference radius.
///
/// `q(t) = -2 ∫_0^∞ [S(x²u/2) - ln(|x|/r) J0(|x|√(2u))] e^{-tu} du / ((ln u - c)² + π²)`
/// with `S` from [`harmonic_bessel_sum`].
pub fn q_x_surrogate(q: HittingQuery) -> Result<Evaluation<f64>> {
    let q = HittingQuery::new(q.r, q.x_radius, q.t)?;
    let c = log_center(q.r);
    let l = (q.x_radius / q.r).ln();
    let half_x2 = 0.5 * q.x_radius * q.x_radius;
    let t = q.t;
    let lt = -t.ln();
    let (lo, hi) = (lt - 45.0, lt + 3.95);
    let inner = [
        lt - 20.0,
        lt - 8.0,
        lt - 3.0,
        lt - 1.0,
        lt,
        lt + 1.0,
        lt + 2.0,
        -half_x2.ln(),
        (4.0 / half_x2).ln(),
    ];
    let breaks = log_breaks(lo, hi, &inner);
    let mut failure = None;
    let res = integrate_with_breaks(
        |v: f64| {
            let u = v.exp();
            let y = half_x2 * u;
            let s = harmonic_bessel_sum(y).and_then(|s| Ok(s - l * bessel_j0(y)?));
            match s {
                Ok(s) => {
                    let d = v - c;
                    -2.0 * s * (-t * u).exp() * u / (d * d + PI * PI)
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &breaks,
        Tolerance::new(1e-14 / t, 1e-11),
    )
    .map_err(|e| rename(e, "q_x_surrogate"))?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Evaluation::new(
        res.value,
        Method::LogSurrogate,
        res.abs_error,
    ))
}

/// `∫_0^{λ0} W(λ) dλ = ∫_0^∞ (1 - e^{-λ0 u}) du / (u((ln u)² + π²))`.
pub fn w_primitive(lambda0: f64) -> Result<f64> {
    if !(lambda0 > 0.0) {
        return Err(domain("w_primitive", "upper limit must be positive"));
    }
    let peak = -lambda0.ln();
    let (lo, hi) = (peak - 45.0, peak + 4.0);
    let breaks = log_breaks(
        lo,
        hi,
        &[
            peak - 20.0,
            peak - 5.0,
            peak - 1.0,
            peak,
            peak + 1.0,
            peak + 2.0,
        ],
    );
    let q = integrate_with_breaks(
        |v: f64| -(-lambda0 * v.exp()).exp_m1() / (v * v + PI * PI),
        &breaks,
        Tolerance::new(1e-300, 1e-12),
    )?;
    // 1 - e^{-λ0 u} ≈ 1 above hi; ∫_V^∞ dv/(v² + π²) = (1/π)(π/2 - atan(V/π))
    let tail = (0.5 * PI - (hi / PI).atan()) / PI;
    Ok(q.value + tail)
}

/// Same density as [`q_x_surrogate`] written for large `ξ = |x|/√t`:
///
/// `q = ∫_1^∞ g(y) e^{-(y-1)t} dy - ∫_0^1 g(y) W((1-y)t) dy`, `g(y) = e^{-ξ²/2y}/y`,
///
/// valid as written for the radius with zero log-centre; other radii follow by
/// rescaling `x → x e^{c/2}`, `t → t e^c`, `q → e^c q`.
pub fn q_x_large_xi(q: HittingQuery) -> Result<Evaluation<f64>> {
    let q = HittingQuery::new(q.r, q.x_radius, q.t)?;
    let c = log_center(q.r);
    let t = q.t * c.exp();
    let xi2 = q.x_radius * q.x_radius / q.t;
    let g = |y: f64| (-0.5 * xi2 / y).exp() / y;
    let tol = Tolerance::new(1e-300, 1e-10);

    // y = 1 + s/t
    let first = integrate_with_breaks(
        |s: f64| g(1.0 + s / t) * (-s).exp(),
        &[0.0, 1.0, 4.0, 12.0, 25.0, 50.0],
        tol,
    )?;

    // ∫_0^1 (g(y) - g(1)) W((1-y)t) dy + g(1)/t ∫_0^t W
    let g1 = g(1.0);
    let mut failure = None;
    let y_lo = (0.5 * xi2 / 745.0).min(0.5);
    let mut breaks = vec![
        y_lo,
        0.5,
        0.9,
        0.99,
        0.999,
        1.0 - 1e-4,
        1.0 - 1e-6,
        1.0 - 1e-9,
        1.0,
    ];
    breaks.retain(|&b| b >= y_lo);
    breaks.dedup();
    let second = integrate_with_breaks(
        |y: f64| {
            let lam = (1.0 - y) * t;
            if lam <= 0.0 {
                return 0.0;
            }
            match w_quadrature(lam) {
                Ok(w) => (g(y) - g1) * w.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &breaks,
        Tolerance::new(1e-300, 1e-9),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    // below y_lo, g(y) < e^{-745}/y_lo and only -g(1) remains
    let below = -g1 * (w_primitive(t)? - w_primitive((1.0 - y_lo) * t)?) / t;
    let whole = g1 * w_primitive(t)? / t;

    let value = (first.value / t - (second.value + below + whole)) * c.exp();
    let err = (first.abs_error / t + second.abs_error) * c.exp();
    Ok(Evaluation::new(value, Method::LargeXi, err))
}

/// Map `(r, |x|, t)` to `(r/|x|, 1, t/x²)`; densities scale by `x²`.
pub fn scaling_reduce(q: HittingQuery) -> HittingQuery {
    let x2 = q.x_radius * q.x_radius;
    HittingQuery {
        r: q.r / q.x_radius,
        x_radius: 1.0,
        t: q.t / x2,
    }
}
