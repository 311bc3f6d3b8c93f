//! Monte Carlo estimates of the hitting-time distribution.
//!
//! The radial part `R = |B|` solves `dR = dW + dt/(2R)`, and the disc is hit
//! when `R` reaches `r`. Paths are advanced by Euler–Maruyama with step
//! `dt = s · min((R - r)², 1)`, so steps shrink geometrically near the barrier.
//! Each path draws from its own ChaCha stream (stream index = path index), and
//! results are collected in path order, so output does not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hitting_density::Geometry;

/// Paths closer than this fraction of `r` to the barrier count as hits.
pub const HIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
    pub t_max: f64,
    pub step_scale: f64,
    pub time_grid: Vec<f64>,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::Config("n_paths must be at least 1".into()));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::Config(format!(
                "t_max = {} must be positive",
                self.t_max
            )));
        }
        if !(self.step_scale > 0.0 && self.step_scale <= 1.0) {
            return Err(Error::Config(format!(
                "step_scale = {} must lie in (0, 1]",
                self.step_scale
            )));
        }
        for w in self.time_grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config(
                    "time grid must be strictly increasing".into(),
                ));
            }
        }
        if let (Some(&first), Some(&last)) = (self.time_grid.first(), self.time_grid.last()) {
            if !(first > 0.0) || last > self.t_max {
                return Err(Error::Config(format!(
                    "time grid must lie in (0, t_max = {}]",
                    self.t_max
                )));
            }
        }
        Ok(())
    }
}

/// Empirical `P(τ > t)` on a grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_paths: usize,
}

/// Binned hitting-time density.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// hits per bin / (n_paths · width)
    pub density: Vec<f64>,
    pub std_err: Vec<f64>,
    /// fraction of paths not counted in any bin (censored, or hit outside the edges)
    pub censored_mass: f64,
    pub n_paths: usize,
}

/// Hitting time of one path, or `None` if it survives to `t_max`.
pub fn simulate_path(
    g: Geometry,
    seed: u64,
    index: u64,
    t_max: f64,
    step_scale: f64,
) -> Option<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let r = g.r;
    let hit_gap = HIT_TOLERANCE * r;
    let mut radius = g.x_radius;
    let mut t = 0.0;
    loop {
        let gap = radius - r;
        if gap <= hit_gap {
            return Some(t);
        }
        let mut dt = step_scale * (gap * gap).min(1.0);
        if t + dt >= t_max {
            dt = t_max - t;
            if dt <= 0.0 {
                return None;
            }
        }
        let z: f64 = StandardNormal.sample(&mut rng);
        radius += 0.5 * dt / radius + dt.sqrt() * z;
        t += dt;
        if radius <= r {
            return Some(t);
        }
        if t >= t_max {
            return None;
        }
    }
}

/// Hitting times of all paths in path order.
pub fn simulate_hitting_times(g: Geometry, cfg: &McConfig) -> Result<Vec<Option<f64>>> {
    let g = Geometry::new(g.r, g.x_radius)?;
    cfg.validate()?;
    Ok((0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(g, cfg.seed, i, cfg.t_max, cfg.step_scale))
        .collect())
}

fn survival_from_times(times: &[Option<f64>], grid: &[f64]) -> SurvivalCurve {
    let n = times.len();
    let mut hits: Vec<f64> = times.iter().flatten().copied().collect();
    hits.sort_by(f64::total_cmp);
    let nf = n as f64;
    let (survival, std_err) = grid
        .iter()
        .map(|&t| {
            let hit_by_t = hits.partition_point(|&h| h <= t);
            let p = (n - hit_by_t) as f64 / nf;
            (p, (p * (1.0 - p) / nf).sqrt())
        })
        .unzip();
    SurvivalCurve {
        times: grid.to_vec(),
        survival,
        std_err,
        n_paths: n,
    }
}

/// Fraction of paths with hitting time greater than each grid time; censored
/// paths count as survivors.
pub fn simulate_survival(g: Geometry, cfg: &McConfig) -> Result<SurvivalCurve> {
    if cfg.time_grid.is_empty() {
        return Err(Error::Config("time grid is empty".into()));
    }
    let times = simulate_hitting_times(g, cfg)?;
    Ok(survival_from_times(&times, &cfg.time_grid))
}

/// Histogram of hitting times over `bin_edges`, normalised to a density.
pub fn hitting_time_histogram(g: Geometry, cfg: &McConfig, bin_edges: &[f64]) -> Result<Histogram> {
    if bin_edges.len() < 2 {
        return Err(Error::Config("need at least two bin edges".into()));
    }
    for w in bin_edges.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Config(
                "bin edges must be strictly increasing".into(),
            ));
        }
    }
    if !(bin_edges[0] >= 0.0) || bin_edges[bin_edges.len() - 1] > cfg.t_max {
        return Err(Error::Config("bin edges must lie in [0, t_max]".into()));
    }
    let times = simulate_hitting_times(g, cfg)?;
    Ok(histogram_from_times(&times, bin_edges))
}

fn histogram_from_times(times: &[Option<f64>], edges: &[f64]) -> Histogram {
    let n = times.len();
    let nf = n as f64;
    let mut counts = vec![0usize; edges.len() - 1];
    for h in times.iter().flatten() {
        // bins are (e_i, e_{i+1}]
        let k = edges.partition_point(|&e| e < *h);
        if k >= 1 && k < edges.len() {
            counts[k - 1] += 1;
        }
    }
    let binned: usize = counts.iter().sum();
    let mut density = Vec::with_capacity(counts.len());
    let mut std_err = Vec::with_capacity(counts.len());
    for (i, &c) in counts.iter().enumerate() {
        let w = edges[i + 1] - edges[i];
        let p = c as f64 / nf;
        density.push(p / w);
        std_err.push((p * (1.0 - p) / nf).sqrt() / w);
    }
    Histogram {
        edges: edges.to_vec(),
        density,
        std_err,
        censored_mass: (n - binned) as f64 / nf,
        n_paths: n,
    }
}

/// Least-squares slope of `survival` against `1/ln t`, through the origin.
pub fn log_tail_slope(curve: &SurvivalCurve) -> f64 {
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&t, &s) in curve.times.iter().zip(&curve.survival) {
        let x = 1.0 / t.ln();
        sxy += x * s;
        sxx += x * x;
    }
    sxy / sxx
}
