//! Command-line front end: argument definitions, grid parsing, tabular output
//! and the envelope-constant calibration file.
//!
//! Every command produces a [`Table`], written as CSV (a `# disc-hitting
//! <version>` line, then a header) or as one JSON object with `meta` and
//! `rows`. Rows are emitted in input order.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::asymptotics::{
    cdf_e1_form, cdf_e1_form_derivative, density_heat_kernel, density_w_leading,
    survival_log_series, Constants,
};
use crate::brownian_mc::{hitting_time_histogram, simulate_survival, McConfig};
use crate::error::Error;
use crate::hitting_density::{cdf, density_branchcut, Geometry, HittingQuery, InversionConfig};
use crate::w_ramanujan::{w_asymptotic, w_fourier, w_quadrature, FourierVariant, WEvaluation};
use crate::VERSION;

/// Failure of a harness run, carrying its process exit code.
#[derive(Debug)]
pub enum HarnessError {
    /// bad arguments or configuration (exit 2)
    Invalid(String),
    /// a numerical routine failed to converge or lost precision (exit 3)
    Numerical(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Invalid(_) => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Invalid(m) => write!(f, "invalid input: {m}"),
            HarnessError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<Error> for HarnessError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Config(_) => HarnessError::Invalid(e.to_string()),
            Error::Convergence { .. } | Error::Precision { .. } => {
                HarnessError::Numerical(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Invalid(format!("i/o: {e}"))
    }
}

type HResult<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Parser)]
#[command(
    name = "disc-hitting",
    version,
    about = "Hitting times of a disc by planar Brownian motion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// output file (stdout if omitted)
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate W(λ)
    EvalW(EvalWArgs),
    /// Hitting-time density by branch-cut inversion
    EvalDensity(PointArgs),
    /// Hitting-time distribution function by branch-cut inversion
    EvalCdf(PointArgs),
    /// Large-time asymptotic formulas
    EvalAsymptotic(AsymptoticArgs),
    /// Monte Carlo survival curve
    McRun(McArgs),
    /// Side-by-side comparison of inversion, asymptotics and Monte Carlo
    Compare(CompareArgs),
    /// Fit the envelope constants and write them to a file
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WMethodArg {
    Quadrature,
    FourierSine,
    FourierCosine,
    Asymptotic,
    All,
}

#[derive(Debug, Args)]
pub struct EvalWArgs {
    /// λ value or grid `a:b:logN` / `a:b:linN`
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, value_enum, default_value_t = WMethodArg::Quadrature)]
    pub method: WMethodArg,
    /// terms of the asymptotic series
    #[arg(long, default_value_t = 3)]
    pub terms: usize,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub x: f64,
    /// time or grid
    #[arg(long = "t", alias = "t-grid")]
    pub t: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    /// 2 ln(|x|/r) e^c W(e^c t)
    Thm1,
    /// heat-kernel form of the density
    Thm2,
    /// exponential-integral form of the distribution function
    Thm3,
    /// time derivative of the exponential-integral form
    Thm3Derivative,
    /// 1/ln t series of the survival probability
    Tail,
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    /// reference radius
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long = "t", alias = "t-grid")]
    pub t: String,
    #[arg(long, value_enum)]
    pub formula: Formula,
    /// terms of the tail series
    #[arg(long, default_value_t = 3)]
    pub terms: usize,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "t-grid", default_value = "1e-1:1e2:log7")]
    pub t_grid: String,
    /// censoring horizon (defaults to the last grid time)
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub step_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// densities, error shape of the W form
    Thm1,
    /// densities, error shape of the heat-kernel form
    Thm2,
    /// distribution functions
    Thm3,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long = "t-grid", alias = "t")]
    pub t_grid: String,
    #[arg(long, value_enum, default_value_t = Suite::Thm1)]
    pub suite: Suite,
    /// Monte Carlo paths per grid point (0 leaves the MC columns empty)
    #[arg(long, default_value_t = 0)]
    pub mc_paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub step_scale: f64,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// overwrite an existing constants file
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// comma-separated |x| values
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 10.0, 50.0])]
    pub x_grid: Vec<f64>,
    #[arg(long = "t-grid", default_value = "1e3:1e7:log5")]
    pub t_grid: String,
}

/// Parse `v`, `a:b:logN` or `a:b:linN` (N points, both ends included).
pub fn parse_grid(text: &str) -> HResult<Vec<f64>> {
    let bad = |m: &str| HarnessError::Invalid(format!("grid `{text}`: {m}"));
    let parts: Vec<&str> = text.trim().split(':').collect();
    let num = |s: &str| -> HResult<f64> {
        let v: f64 = s.trim().parse().map_err(|_| bad("not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("not finite"))
        }
    };
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, kind] => {
            let (a, b) = (num(a)?, num(b)?);
            let (log, n) = if let Some(n) = kind.strip_prefix("log") {
                (true, n)
            } else if let Some(n) = kind.strip_prefix("lin") {
                (false, n)
            } else {
                return Err(bad("expected logN or linN"));
            };
            let n: usize = n.parse().map_err(|_| bad("bad point count"))?;
            if n == 0 {
                return Err(bad("point count must be positive"));
            }
            if n == 1 {
                return if a == b {
                    Ok(vec![a])
                } else {
                    Err(bad("one point needs a = b"))
                };
            }
            if !(b > a) {
                return Err(bad("need a < b"));
            }
            if log && !(a > 0.0) {
                return Err(bad("log grid needs positive bounds"));
            }
            let step = |i: usize| i as f64 / (n - 1) as f64;
            Ok((0..n)
                .map(|i| {
                    if i == 0 {
                        a
                    } else if i == n - 1 {
                        b
                    } else if log {
                        10f64.powf(a.log10() + (b.log10() - a.log10()) * step(i))
                    } else {
                        a + (b - a) * step(i)
                    }
                })
                .collect())
        }
        _ => Err(bad("expected `v` or `a:b:logN`")),
    }
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            // Debug formatting is the shortest representation that round-trips
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
}

impl Table {
    fn new(command: &str, columns: Vec<&'static str>) -> Self {
        let mut meta = Map::new();
        meta.insert("tool".into(), json!("disc-hitting"));
        meta.insert("version".into(), json!(VERSION));
        meta.insert("command".into(), json!(command));
        Self {
            columns,
            rows: Vec::new(),
            meta,
        }
    }

    fn meta(mut self, key: &str, v: Value) -> Self {
        self.meta.insert(key.into(), v);
        self
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> HResult<()> {
        writeln!(w, "# disc-hitting {VERSION}")?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::csv))
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "meta": self.meta, "rows": rows })
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> HResult<()> {
        serde_json::to_writer_pretty(&mut w, &self.to_json())
            .map_err(|e| HarnessError::Invalid(format!("json: {e}")))?;
        writeln!(w)?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Invalid(format!("csv: {e}"))
}

/// Columns of the `compare` table.
pub const COMPARISON_COLUMNS: [&str; 9] = [
    "t",
    "x_radius",
    "r",
    "value_inversion",
    "value_thm1",
    "value_thm2_or_3",
    "value_mc",
    "mc_std_err",
    "envelope",
];

/// One row of `compare`. Density suites compare densities, `thm3` compares
/// distribution functions. The MC fields are `None` when no paths were run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub t: f64,
    pub x_radius: f64,
    pub r: f64,
    pub value_inversion: f64,
    pub value_thm1: f64,
    pub value_thm2_or_3: f64,
    pub value_mc: Option<f64>,
    pub mc_std_err: Option<f64>,
    pub envelope: f64,
}

impl ComparisonRow {
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.t),
            Cell::Num(self.x_radius),
            Cell::Num(self.r),
            Cell::Num(self.value_inversion),
            Cell::Num(self.value_thm1),
            Cell::Num(self.value_thm2_or_3),
            Cell::opt(self.value_mc),
            Cell::opt(self.mc_std_err),
            Cell::Num(self.envelope),
        ]
    }
}

/// Fitted constants for the error shapes of the asymptotic formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConstants {
    pub format: u32,
    pub version: String,
    pub r_ref: f64,
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// max |W-form density - truth| / error shape
    pub w_leading: f64,
    /// max |heat-kernel density - truth| / error shape
    pub heat_kernel: f64,
    /// max |heat-kernel density / truth - 1| · ln t
    pub heat_kernel_rel_log: f64,
    /// max |E1-form cdf - truth| / error shape
    pub e1_cdf: f64,
    /// max |W form / heat-kernel form - 1| · ln t over points with x² ≤ t/(ln t)²
    pub regime_agreement: f64,
    /// factor applied to the fitted constants when they are used as bounds
    pub safety_factor: f64,
}

pub const ENVELOPE_FORMAT: u32 = 1;
const FROZEN_CONSTANTS: &str = include_str!("../data/envelope_constants.json");

impl EnvelopeConstants {
    pub fn load(path: &Path) -> HResult<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_json(&s)
    }

    pub fn from_json(s: &str) -> HResult<Self> {
        let c: Self = serde_json::from_str(s)
            .map_err(|e| HarnessError::Invalid(format!("constants file: {e}")))?;
        if c.format != ENVELOPE_FORMAT {
            return Err(HarnessError::Invalid(format!(
                "unsupported constants format {}",
                c.format
            )));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }

    /// Write to `path`; refuses to replace an existing file unless `force`.
    pub fn save(&self, path: &Path, force: bool) -> HResult<()> {
        if path.exists() && !force {
            return Err(HarnessError::Invalid(format!(
                "{} exists; pass --force to overwrite",
                path.display()
            )));
        }
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// The constants shipped with the crate.
    pub fn frozen() -> Self {
        Self::from_json(FROZEN_CONSTANTS).expect("bundled constants parse")
    }
}

/// Fit the envelope constants against branch-cut values at `r = r_ref`.
pub fn calibrate(
    r_ref: f64,
    x_grid: &[f64],
    t_grid: &[f64],
    cfg: &InversionConfig,
) -> HResult<EnvelopeConstants> {
    let k = Constants::new(r_ref)?;
    if x_grid.is_empty() || t_grid.is_empty() {
        return Err(HarnessError::Invalid("calibration grid is empty".into()));
    }
    let points: Vec<(f64, f64)> = x_grid
        .iter()
        .flat_map(|&x| t_grid.iter().map(move |&t| (x, t)))
        .collect();
    let fits: Vec<[f64; 5]> = points
        .par_iter()
        .map(|&(x, t)| -> HResult<[f64; 5]> {
            let q = HittingQuery::new(r_ref, x, t)?;
            let p = density_branchcut(q, cfg)?.value;
            let c = cdf(q, cfg)?.value;
            let a1 = density_w_leading(x, t, &k)?;
            let a2 = density_heat_kernel(x, t, &k)?;
            let a3 = cdf_e1_form(x, t, &k)?;
            let lt = t.ln();
            let agree = if x * x <= t / (lt * lt) {
                (a1.value / a2.value - 1.0).abs() * lt
            } else {
                0.0
            };
            Ok([
                (a1.value - p).abs() / a1.envelope,
                (a2.value - p).abs() / a2.envelope,
                (a2.value / p - 1.0).abs() * lt,
                (a3.value - c).abs() / a3.envelope,
                agree,
            ])
        })
        .collect::<HResult<_>>()?;
    // NaN must survive the reduction so the sanity check below sees it
    let max = |i: usize| {
        fits.iter().map(|f| f[i]).fold(0.0, |m: f64, v| {
            if v.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(v)
            }
        })
    };
    let out = EnvelopeConstants {
        format: ENVELOPE_FORMAT,
        version: VERSION.to_string(),
        r_ref,
        x_grid: x_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        w_leading: max(0),
        heat_kernel: max(1),
        heat_kernel_rel_log: max(2),
        e1_cdf: max(3),
        regime_agreement: max(4),
        safety_factor: 2.0,
    };
    for (name, v) in [
        ("w_leading", out.w_leading),
        ("heat_kernel", out.heat_kernel),
        ("heat_kernel_rel_log", out.heat_kernel_rel_log),
        ("e1_cdf", out.e1_cdf),
        ("regime_agreement", out.regime_agreement),
    ] {
        if !v.is_finite() || v > 1e3 {
            return Err(HarnessError::Numerical(format!(
                "calibration constant {name} = {v} fails the sanity bound"
            )));
        }
    }
    Ok(out)
}

fn w_cells(
    lambda: f64,
    name: &str,
    w: crate::Result<WEvaluation>,
    lenient: bool,
) -> HResult<Vec<Cell>> {
    match w {
        Ok(w) => Ok(vec![
            Cell::Num(w.lambda),
            Cell::Text(name.into()),
            Cell::Num(w.value),
            Cell::Num(w.error_estimate),
            Cell::Bool(w.unreliable),
        ]),
        // with --method all, a method undefined at this λ leaves an empty row
        Err(Error::Domain { .. }) if lenient => Ok(vec![
            Cell::Num(lambda),
            Cell::Text(name.into()),
            Cell::Empty,
            Cell::Empty,
            Cell::Bool(true),
        ]),
        Err(e) => Err(e.into()),
    }
}

fn eval_w(a: &EvalWArgs) -> HResult<Table> {
    let grid = parse_grid(&a.lambda)?;
    let lenient = a.method == WMethodArg::All;
    let methods: Vec<WMethodArg> = match a.method {
        WMethodArg::All => vec![
            WMethodArg::Quadrature,
            WMethodArg::FourierSine,
            WMethodArg::FourierCosine,
            WMethodArg::Asymptotic,
        ],
        m => vec![m],
    };
    let rows: Vec<Vec<Vec<Cell>>> = grid
        .par_iter()
        .map(|&l| {
            methods
                .iter()
                .map(|m| {
                    let (w, name) = match m {
                        WMethodArg::Quadrature => (w_quadrature(l), "quadrature"),
                        WMethodArg::FourierSine => {
                            (w_fourier(l, FourierVariant::Sine), "fourier_sine")
                        }
                        WMethodArg::FourierCosine => {
                            (w_fourier(l, FourierVariant::Cosine), "fourier_cosine")
                        }
                        WMethodArg::Asymptotic => (w_asymptotic(l, a.terms), "asymptotic"),
                        WMethodArg::All => unreachable!(),
                    };
                    w_cells(l, name, w, lenient)
                })
                .collect()
        })
        .collect::<HResult<_>>()?;
    let mut t = Table::new(
        "eval-w",
        vec!["lambda", "method", "value", "error_estimate", "unreliable"],
    )
    .meta("terms", json!(a.terms));
    t.rows = rows.into_iter().flatten().collect();
    Ok(t)
}

fn eval_point(
    a: &PointArgs,
    command: &str,
    f: fn(HittingQuery, &InversionConfig) -> crate::Result<crate::Evaluation<f64>>,
) -> HResult<Table> {
    let g = Geometry::new(a.r, a.x)?;
    let grid = parse_grid(&a.t)?;
    let cfg = InversionConfig::default();
    let vals: Vec<crate::Evaluation<f64>> = grid
        .par_iter()
        .map(|&t| -> HResult<_> { Ok(f(g.at(t)?, &cfg)?) })
        .collect::<HResult<_>>()?;
    let mut table = Table::new(
        command,
        vec!["t", "x_radius", "r", "value", "error_estimate", "method"],
    );
    for (t, v) in grid.iter().zip(vals) {
        table.rows.push(vec![
            Cell::Num(*t),
            Cell::Num(a.x),
            Cell::Num(a.r),
            Cell::Num(v.value),
            Cell::Num(v.error_estimate),
            Cell::Text(method_name(v.method)),
        ]);
    }
    Ok(table)
}

fn method_name(m: crate::Method) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn eval_asymptotic(a: &AsymptoticArgs) -> HResult<Table> {
    let k = Constants::new(a.r)?;
    let grid = parse_grid(&a.t)?;
    let name = a
        .formula
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let mut table = Table::new(
        "eval-asymptotic",
        vec![
            "t",
            "x_radius",
            "r_ref",
            "formula",
            "value",
            "envelope",
            "in_regime",
        ],
    )
    .meta("c_ref", json!(k.c_ref));
    for &t in &grid {
        let (value, envelope, in_regime) = match a.formula {
            Formula::Thm1 => split(density_w_leading(a.x, t, &k)?),
            Formula::Thm2 => split(density_heat_kernel(a.x, t, &k)?),
            Formula::Thm3 => split(cdf_e1_form(a.x, t, &k)?),
            Formula::Thm3Derivative => (
                Cell::Num(cdf_e1_form_derivative(a.x, t, &k)?),
                Cell::Empty,
                Cell::Bool(true),
            ),
            Formula::Tail => split(survival_log_series(a.x, t, &k, a.terms)?),
        };
        table.rows.push(vec![
            Cell::Num(t),
            Cell::Num(a.x),
            Cell::Num(a.r),
            Cell::Text(name.clone()),
            value,
            envelope,
            in_regime,
        ]);
    }
    Ok(table)
}

fn split(a: crate::asymptotics::Approximation) -> (Cell, Cell, Cell) {
    (
        Cell::Num(a.value),
        Cell::Num(a.envelope),
        Cell::Bool(a.in_regime),
    )
}

fn mc_run(a: &McArgs) -> HResult<Table> {
    let g = Geometry::new(a.r, a.x)?;
    let grid = parse_grid(&a.t_grid)?;
    let t_max = a
        .t_max
        .unwrap_or_else(|| grid.last().copied().unwrap_or(1.0));
    let cfg = McConfig {
        n_paths: a.paths,
        seed: a.seed,
        t_max,
        step_scale: a.step_scale,
        time_grid: grid,
    };
    let curve = simulate_survival(g, &cfg)?;
    let mut t = Table::new("mc-run", vec!["t", "survival", "std_err", "n_paths"])
        .meta("r", json!(a.r))
        .meta("x_radius", json!(a.x))
        .meta("seed", json!(a.seed))
        .meta("t_max", json!(t_max))
        .meta("step_scale", json!(a.step_scale));
    for i in 0..curve.times.len() {
        t.rows.push(vec![
            Cell::Num(curve.times[i]),
            Cell::Num(curve.survival[i]),
            Cell::Num(curve.std_err[i]),
            Cell::Int(curve.n_paths as u64),
        ]);
    }
    Ok(t)
}

/// Rows of `compare`, in grid order.
pub fn comparison_rows(a: &CompareArgs) -> HResult<Vec<ComparisonRow>> {
    let g = Geometry::new(a.r, a.x)?;
    let k = Constants::new(a.r)?;
    let grid = parse_grid(&a.t_grid)?;
    let cfg = InversionConfig::default();
    let mut rows: Vec<ComparisonRow> = grid
        .par_iter()
        .map(|&t| -> HResult<ComparisonRow> {
            let q = g.at(t)?;
            let (inv, v1, v23, env) = match a.suite {
                Suite::Thm1 | Suite::Thm2 => {
                    let a1 = density_w_leading(a.x, t, &k)?;
                    let a2 = density_heat_kernel(a.x, t, &k)?;
                    let env = if a.suite == Suite::Thm1 {
                        a1.envelope
                    } else {
                        a2.envelope
                    };
                    (density_branchcut(q, &cfg)?.value, a1.value, a2.value, env)
                }
                Suite::Thm3 => {
                    let tail = survival_log_series(a.x, t, &k, 3)?;
                    let a3 = cdf_e1_form(a.x, t, &k)?;
                    (cdf(q, &cfg)?.value, 1.0 - tail.value, a3.value, a3.envelope)
                }
            };
            Ok(ComparisonRow {
                t,
                x_radius: a.x,
                r: a.r,
                value_inversion: inv,
                value_thm1: v1,
                value_thm2_or_3: v23,
                value_mc: None,
                mc_std_err: None,
                envelope: env,
            })
        })
        .collect::<HResult<_>>()?;
    if a.mc_paths > 0 {
        match a.suite {
            Suite::Thm3 => {
                let cfg = McConfig {
                    n_paths: a.mc_paths,
                    seed: a.seed,
                    t_max: *grid.last().expect("grid is non-empty"),
                    step_scale: a.step_scale,
                    time_grid: grid.clone(),
                };
                let curve = simulate_survival(g, &cfg)?;
                for (row, (s, e)) in rows
                    .iter_mut()
                    .zip(curve.survival.iter().zip(&curve.std_err))
                {
                    row.value_mc = Some(1.0 - s);
                    row.mc_std_err = Some(*e);
                }
            }
            Suite::Thm1 | Suite::Thm2 => {
                // density from the fraction hitting within ±5% of t
                for (i, row) in rows.iter_mut().enumerate() {
                    let (lo, hi) = (row.t * 0.95, row.t * 1.05);
                    let cfg = McConfig {
                        n_paths: a.mc_paths,
                        seed: a.seed.wrapping_add(i as u64),
                        t_max: hi,
                        step_scale: a.step_scale,
                        time_grid: vec![hi],
                    };
                    let h = hitting_time_histogram(g, &cfg, &[lo, hi])?;
                    row.value_mc = Some(h.density[0]);
                    row.mc_std_err = Some(h.std_err[0]);
                }
            }
        }
    }
    Ok(rows)
}

fn compare(a: &CompareArgs) -> HResult<Table> {
    let rows = comparison_rows(a)?;
    let suite = a
        .suite
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let mut t = Table::new("compare", COMPARISON_COLUMNS.to_vec())
        .meta("suite", json!(suite))
        .meta("mc_paths", json!(a.mc_paths))
        .meta("seed", json!(a.seed));
    t.rows = rows.iter().map(ComparisonRow::cells).collect();
    Ok(t)
}

/// Number of worker threads from `WORKERS`, if set.
pub fn workers_from_env() -> HResult<Option<usize>> {
    match std::env::var("WORKERS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Invalid(format!(
                "WORKERS = `{s}` is not a positive integer"
            ))),
        },
    }
}

fn emit(table: &Table, cli: &Cli) -> HResult<()> {
    match &cli.output {
        Some(path) => {
            let file = std::io::BufWriter::new(std::fs::File::create(path)?);
            match cli.format {
                Format::Csv => table.write_csv(file),
                Format::Json => table.write_json(file),
            }
        }
        None => {
            let out = std::io::stdout().lock();
            match cli.format {
                Format::Csv => table.write_csv(out),
                Format::Json => table.write_json(out),
            }
        }
    }
}

fn dispatch(cli: &Cli) -> HResult<()> {
    let table = match &cli.command {
        Command::EvalW(a) => eval_w(a)?,
        Command::EvalDensity(a) => eval_point(a, "eval-density", density_branchcut)?,
        Command::EvalCdf(a) => eval_point(a, "eval-cdf", cdf)?,
        Command::EvalAsymptotic(a) => eval_asymptotic(a)?,
        Command::McRun(a) => mc_run(a)?,
        Command::Compare(a) => compare(a)?,
        Command::Calibrate(a) => {
            let path = cli
                .output
                .as_ref()
                .ok_or_else(|| HarnessError::Invalid("calibrate needs --output".into()))?;
            if path.exists() && !a.force {
                return Err(HarnessError::Invalid(format!(
                    "{} exists; pass --force to overwrite",
                    path.display()
                )));
            }
            let ts = parse_grid(&a.t_grid)?;
            let c = calibrate(a.r, &a.x_grid, &ts, &InversionConfig::default())?;
            return c.save(path, a.force);
        }
    };
    emit(&table, cli)
}

/// Run a parsed command line, honouring `WORKERS`.
pub fn run(cli: &Cli) -> HResult<()> {
    match workers_from_env()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Invalid(format!("thread pool: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}
