//! Numerical integration: adaptive Gauss–Kronrod (21-point) on finite
//! intervals, fixed-order Gauss–Legendre panels, and summation of
//! alternating lobe sequences for slowly decaying oscillatory integrals.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{convergence, Result};

/// Positive Kronrod abscissae of the 21-point rule, descending; the last one is 0.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_5,
    0.973_906_528_517_171_720_078,
    0.930_157_491_355_708_226_001_2,
    0.865_063_366_688_984_510_732_1,
    0.780_817_726_586_416_897_063_7,
    0.679_409_568_299_024_406_234_3,
    0.562_757_134_668_604_683_339,
    0.433_395_394_129_247_190_799_3,
    0.294_392_862_701_460_198_131_1,
    0.148_874_338_981_631_210_884_8,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_06,
    0.032_558_162_307_964_727_478_82,
    0.054_755_896_574_351_996_031_38,
    0.075_039_674_810_919_952_767_04,
    0.093_125_454_583_697_605_535_07,
    0.109_387_158_802_297_641_899_2,
    0.123_491_976_262_065_851_078,
    0.134_709_217_311_473_325_928_1,
    0.142_775_938_577_060_080_797_1,
    0.147_739_104_901_338_491_374_8,
    0.149_445_554_002_916_905_664_9,
];

/// Weights of the embedded 10-point Gauss rule (odd entries of `XGK`).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_57,
    0.149_451_349_150_580_593_145_8,
    0.219_086_362_515_982_043_995_5,
    0.269_266_719_309_996_355_091_2,
    0.295_524_224_714_752_870_173_9,
];

/// Stopping rule for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_subdivisions: 2000,
        }
    }

    pub const fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-13, 1e-12)
    }
}

/// Result of a quadrature: value and a-posteriori absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One application of the 21-point Gauss–Kronrod pair, with the QUADPACK
/// error heuristic.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// Adaptive integration of `f` over `[a, b]` (finite).
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Adaptive integration over `[points[0], points[last]]`, seeded with the
/// given interior break points (sorted, finite).
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Quadrature> {
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::with_capacity(points.len() + 64);
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, error) = gk21(&mut f, w[0], w[1]);
        evaluations += 21;
        total += value;
        total_err += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let mut n_segments = heap.len();
    while total_err > tol.target(total) {
        if n_segments >= tol.max_subdivisions {
            return Err(convergence(
                "integrate",
                format!(
                    "{} subdivisions reached, error {:.3e} vs target {:.3e}",
                    n_segments,
                    total_err,
                    tol.target(total)
                ),
            ));
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval collapsed to adjacent floats; accept what we have
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        n_segments += 1;
    }
    // re-sum to shed accumulated cancellation in the running totals
    let (value, abs_error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(Quadrature {
        value,
        abs_error,
        evaluations,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Cached 20-point Gauss–Legendre rule.
pub fn gl20() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Fixed-order Gauss–Legendre quadrature over `[a, b]`.
pub fn fixed_gauss<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Sum of an alternating-type series given its leading partial sums, by
/// repeated averaging (Euler transformation of the tail).
///
/// Returns the extrapolated limit and the change in the last averaging level
/// as an error estimate.
pub fn euler_limit(partial_sums: &[f64]) -> (f64, f64) {
    let mut level: Vec<f64> = partial_sums.to_vec();
    let mut last_change = f64::INFINITY;
    while level.len() > 1 {
        let next: Vec<f64> = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        last_change = (next[next.len() - 1] - level[level.len() - 1]).abs();
        level = next;
    }
    (level[0], last_change)
}
