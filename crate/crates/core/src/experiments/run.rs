use serde::{Deserialize, Serialize};

use super::config::{Comparison, ExperimentConfig, Preset, Varied};
use super::table::{parse_field, Metadata, Table};
use crate::error::{invalid, Error, Result};
use crate::intensity::{expected_count, intensity, intensity_numeric, IntensityCurve, IntensityPoint, Method, DEFAULT_TOL};
use crate::kernels::{kernel_cdf, kernel_density, HawkesParams, KernelSpec};
use crate::simulation::{count_distribution, tv_distance, ClusterOptions, ClusterSimulator, CountHistogram, EventSequence, SeedSpec};
use crate::special::{ml_three_param, MlArgs};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const INTENSITY_HEADER: [&str; 5] = ["t", "lambda_analytic", "lambda_numeric", "abs_diff", "numeric_err"];

fn params_metadata(meta: &mut Metadata, p: &HawkesParams<f64>) {
    meta.push("lambda0", p.lambda0);
    meta.push("alpha", p.alpha);
    meta.push("beta", p.beta);
    meta.push("nu", p.nu);
    meta.push("gamma", p.gamma);
}

fn kernel_label(k: &KernelSpec<f64>) -> String {
    serde_json::to_string(k).unwrap_or_default()
}

/// Closed-form and inverted intensity on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityComparison {
    pub analytic: IntensityCurve<f64>,
    pub numeric: IntensityCurve<f64>,
}

impl IntensityComparison {
    pub fn compute(params: &HawkesParams<f64>, grid: &[f64], tol: f64) -> Result<Self> {
        use rayon::prelude::*;
        let rows = grid
            .par_iter()
            .map(|&t| {
                let analytic = intensity(params, t, tol)?;
                let inv = if t == 0.0 {
                    crate::laplace::Inversion { value: params.lambda0, error_estimate: 0.0 }
                } else {
                    intensity_numeric(params, t, tol).map_err(|e| match e {
                        Error::InversionDisagreement { .. } => e,
                        other => other.context(format!("inversion at t={t}")),
                    })?
                };
                let numeric = IntensityPoint { t, value: inv.value, method: Method::Numeric, error_estimate: inv.error_estimate };
                Ok((analytic, numeric))
            })
            .collect::<Result<Vec<_>>>()?;
        let (a, n): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let analytic = IntensityCurve { params: *params, points: a };
        let numeric = IntensityCurve { params: *params, points: n };
        analytic.validate()?;
        numeric.validate()?;
        Ok(Self { analytic, numeric })
    }

    pub fn max_abs_diff(&self) -> f64 {
        self.analytic
            .points
            .iter()
            .zip(&self.numeric.points)
            .map(|(a, n)| (a.value - n.value).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_table(&self, preset: Option<Preset>) -> Table {
        let mut meta = Metadata::default();
        if let Some(p) = preset {
            meta.push("preset", p);
        }
        params_metadata(&mut meta, &self.analytic.params);
        meta.push("version", VERSION);
        let mut table = Table::new(meta, &INTENSITY_HEADER);
        for (a, n) in self.analytic.points.iter().zip(&self.numeric.points) {
            table.push_row(vec![
                a.t.to_string(),
                a.value.to_string(),
                n.value.to_string(),
                (a.value - n.value).abs().to_string(),
                n.error_estimate.to_string(),
            ]);
        }
        table.footer.push("max_abs_diff", self.max_abs_diff());
        table
    }

    /// Reads back the output of [`Self::to_table`]; floats are written in
    /// shortest round-trip form, so nothing is lost.
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = Table::parse(text)?;
        let params = HawkesParams {
            lambda0: table.meta.parse("lambda0")?,
            alpha: table.meta.parse("alpha")?,
            beta: table.meta.parse("beta")?,
            nu: table.meta.parse("nu")?,
            gamma: table.meta.parse("gamma")?,
        };
        let (ct, ca, cn, ce) = (
            table.column("t")?,
            table.column("lambda_analytic")?,
            table.column("lambda_numeric")?,
            table.column("numeric_err")?,
        );
        let mut analytic = IntensityCurve { params, points: Vec::with_capacity(table.rows.len()) };
        let mut numeric = analytic.clone();
        for row in &table.rows {
            let t = parse_field(&row[ct], "t")?;
            analytic.points.push(IntensityPoint { t, value: parse_field(&row[ca], "lambda_analytic")?, method: Method::Analytic, error_estimate: 0.0 });
            numeric.points.push(IntensityPoint { t, value: parse_field(&row[cn], "lambda_numeric")?, method: Method::Numeric, error_estimate: parse_field(&row[ce], "numeric_err")? });
        }
        analytic.validate()?;
        numeric.validate()?;
        Ok(Self { analytic, numeric })
    }
}

/// Expected intensity at the `fig1` preset parameters on `t = 0.01, 0.02, …, 15`.
pub fn run_fig1() -> Result<IntensityComparison> {
    IntensityComparison::compute(&Preset::Fig1.params(), &Preset::Fig1.t_values(), DEFAULT_TOL)
}

/// Histogram rows with probabilities rounded to six decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub n: usize,
    pub frequency: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub kernel: KernelSpec<f64>,
    pub t: f64,
    pub n_runs: u64,
    pub mean: f64,
    pub std_error_of_mean: f64,
    /// `E[N(t)]` of the simulated process, where a closed form exists.
    pub expected_count: Option<f64>,
    pub rows: Vec<HistogramRow>,
}

fn round6(p: f64) -> f64 {
    (p * 1e6).round() / 1e6
}

impl HistogramData {
    pub fn new(h: &CountHistogram, kernel: KernelSpec<f64>, expected_count: Option<f64>) -> Self {
        let rows = h
            .frequencies
            .iter()
            .enumerate()
            .map(|(n, &frequency)| HistogramRow { n, frequency, probability: round6(h.probability(n)) })
            .collect();
        Self { kernel, t: h.t, n_runs: h.n_runs, mean: h.mean, std_error_of_mean: h.std_error_of_mean, expected_count, rows }
    }

    pub fn histogram(&self) -> Result<CountHistogram> {
        let len = self.rows.iter().map(|r| r.n + 1).max().unwrap_or(0);
        let mut frequencies = vec![0u64; len];
        for r in &self.rows {
            frequencies[r.n] += r.frequency;
        }
        CountHistogram::from_frequencies(self.t, frequencies)
    }
}

/// Mean count of the simulated process: the closed form for tempered kernels,
/// `Λ₀t` without excitation.
fn mean_count(params: &HawkesParams<f64>, kernel: &KernelSpec<f64>, t: f64) -> Option<f64> {
    let shape = kernel.shape()?;
    let p = HawkesParams { beta: shape.beta, nu: shape.nu, gamma: shape.gamma, ..*params };
    expected_count(&p, t, DEFAULT_TOL).ok()
}

fn expected_for(params: &HawkesParams<f64>, kernel: &KernelSpec<f64>, t: f64) -> Option<f64> {
    match kernel {
        KernelSpec::None => Some(params.lambda0 * t),
        _ => mean_count(params, kernel, t),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellVariant {
    pub name: Varied,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub t: f64,
    pub variant: CellVariant,
    pub params: HawkesParams<f64>,
    pub comparison: Comparison,
    pub hptml: HistogramData,
    pub reference: HistogramData,
    pub tv_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    pub params: HawkesParams<f64>,
    pub kernel: KernelSpec<f64>,
    pub seed: u64,
    pub n_runs: u64,
    pub version: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub overrides: Vec<String>,
}

impl RunMeta {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            preset: cfg.preset,
            params: cfg.params,
            kernel: cfg.kernel,
            seed: cfg.master_seed,
            n_runs: cfg.n_runs,
            version: VERSION.to_string(),
            overrides: cfg.overrides.clone(),
        }
    }
}

/// JSON document `{meta, data}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<D> {
    pub meta: RunMeta,
    pub data: D,
}

impl<D: Serialize> Document<D> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetData {
    pub cells: Vec<CellResult>,
}

pub type PresetReport = Document<PresetData>;

/// Runs a distribution preset with its default replications and seed.
pub fn run_distribution_preset(preset: Preset) -> Result<PresetReport> {
    let cfg = ExperimentConfig::resolve(super::ConfigLayer { preset: Some(preset), ..Default::default() })?;
    run_distribution_config(&cfg)
}

/// Every `(t, variant)` cell of a distribution preset, with both histograms and
/// their total-variation distance. Each histogram has its own seed derived from
/// the master seed and the cell label.
pub fn run_distribution_config(cfg: &ExperimentConfig) -> Result<PresetReport> {
    let preset = cfg.preset.ok_or_else(|| invalid("preset", "a distribution preset is required"))?;
    let (varied, values) = preset
        .variant()
        .ok_or_else(|| invalid("preset", format!("{preset} is not a distribution preset")))?;
    let comparison = preset.comparison().expect("distribution presets have a comparison");
    // an explicit value for the varied parameter replaces the list
    let values = if cfg.overrides.iter().any(|o| o == varied.name()) {
        vec![match varied {
            Varied::Alpha => cfg.params.alpha,
            Varied::Beta => cfg.params.beta,
        }]
    } else {
        values
    };
    let master = SeedSpec::new(cfg.master_seed);
    let mut cells = Vec::new();
    for &t in &cfg.t_values {
        for &value in &values {
            let params = varied.apply(&cfg.params, value);
            params.validate()?;
            let label = format!("{preset}/t={t}/{}={value}", varied.name());
            let cell_error = |e: Error| e.context(format!("cell {label}"));
            let kernel = params.kernel();
            let reference_kernel = comparison.kernel(&params);
            let h = count_distribution(&params, &kernel, t, cfg.n_runs, &master.derive(&format!("{label}/hptml"))).map_err(cell_error)?;
            let r = count_distribution(&params, &reference_kernel, t, cfg.n_runs, &master.derive(&format!("{label}/reference")))
                .map_err(cell_error)?;
            let tv = tv_distance(&h, &r)?;
            cells.push(CellResult {
                t,
                variant: CellVariant { name: varied, value },
                params,
                comparison,
                hptml: HistogramData::new(&h, kernel, expected_for(&params, &kernel, t)),
                reference: HistogramData::new(&r, reference_kernel, expected_for(&params, &reference_kernel, t)),
                tv_distance: tv,
            });
        }
    }
    Ok(Document { meta: RunMeta::new(cfg), data: PresetData { cells } })
}

/// What [`run_generic`] computes.
#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    MlEval { a: f64, b: f64, c: f64, z: f64, tol: f64 },
    Kernel { t_max: f64, points: usize },
    Intensity { tol: f64 },
    Simulate { horizon: f64, replication: u64 },
    Distribution { t: f64 },
    Preset,
}

/// Runs `task` and renders it in the configured format.
pub fn run_generic(cfg: &ExperimentConfig, task: &Task) -> Result<String> {
    use super::config::Format;
    match task {
        Task::MlEval { a, b, c, z, tol } => {
            let v = ml_three_param(MlArgs::new(*a, *b, *c, *z), *tol)?;
            Ok(match cfg.format {
                Format::Csv => format!("{v}\n"),
                Format::Json => format!("{}\n", serde_json::json!({ "a": a, "b": b, "c": c, "z": z, "value": v })),
            })
        }
        Task::Kernel { t_max, points } => {
            let table = kernel_table(&cfg.kernel, *t_max, *points)?;
            Ok(render_table(cfg, table))
        }
        Task::Intensity { tol } => {
            let grid = if cfg.t_values.is_empty() { Preset::Fig1.t_values() } else { cfg.t_values.clone() };
            let cmp = IntensityComparison::compute(&cfg.params, &grid, *tol)?;
            Ok(render_table(cfg, cmp.to_table(cfg.preset)))
        }
        Task::Simulate { horizon, replication } => {
            let seq = simulate_path(cfg, *horizon, *replication)?;
            match cfg.format {
                Format::Csv => Ok(path_table(cfg, &seq, *replication).to_csv()),
                Format::Json => Ok(Document { meta: RunMeta::new(cfg), data: seq }.to_json()),
            }
        }
        Task::Distribution { t } => {
            let h = count_distribution(&cfg.params, &cfg.kernel, *t, cfg.n_runs, &SeedSpec::new(cfg.master_seed))?;
            let data = HistogramData::new(&h, cfg.kernel, expected_for(&cfg.params, &cfg.kernel, *t));
            match cfg.format {
                Format::Csv => Ok(histogram_table(cfg, &data).to_csv()),
                Format::Json => Ok(Document { meta: RunMeta::new(cfg), data }.to_json()),
            }
        }
        Task::Preset => match cfg.preset {
            Some(Preset::Fig1) => {
                let grid = if cfg.t_values.is_empty() { Preset::Fig1.t_values() } else { cfg.t_values.clone() };
                let cmp = IntensityComparison::compute(&cfg.params, &grid, DEFAULT_TOL)?;
                Ok(render_table(cfg, cmp.to_table(cfg.preset)))
            }
            Some(_) => Ok(run_distribution_config(cfg)?.to_json()),
            None => Err(invalid("preset", "no preset given")),
        },
    }
}

fn render_table(cfg: &ExperimentConfig, table: Table) -> String {
    use super::config::Format;
    match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let rows: Vec<serde_json::Map<String, serde_json::Value>> = table
                .rows
                .iter()
                .map(|row| {
                    table
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, v)| (h.clone(), v.parse::<f64>().map_or(serde_json::Value::from(v.as_str()), serde_json::Value::from)))
                        .collect()
                })
                .collect();
            Document { meta: RunMeta::new(cfg), data: rows }.to_json()
        }
    }
}

/// `(t, density, cdf)` on `t_max·i/points`, `i = 1..=points`.
pub fn kernel_table(kernel: &KernelSpec<f64>, t_max: f64, points: usize) -> Result<Table> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(invalid("tmax", format!("must be finite and positive, got {t_max}")));
    }
    if points == 0 {
        return Err(invalid("points", "must be positive"));
    }
    let mut meta = Metadata::default();
    meta.push("kernel", kernel_label(kernel));
    meta.push("version", VERSION);
    let mut table = Table::new(meta, &["t", "density", "cdf"]);
    for i in 1..=points {
        let t = t_max * i as f64 / points as f64;
        table.push_row(vec![t.to_string(), kernel_density(kernel, t)?.to_string(), kernel_cdf(kernel, t, 1e-12)?.to_string()]);
    }
    Ok(table)
}

/// One cluster-simulated path, supercritical runs allowed up to the event cap.
pub fn simulate_path(cfg: &ExperimentConfig, horizon: f64, replication: u64) -> Result<EventSequence> {
    let options = ClusterOptions { allow_supercritical: true, ..Default::default() };
    ClusterSimulator::new(&cfg.params, &cfg.kernel, options)?.run(horizon, &SeedSpec::new(cfg.master_seed), replication)
}

fn run_metadata(cfg: &ExperimentConfig) -> Metadata {
    let mut meta = Metadata::default();
    params_metadata(&mut meta, &cfg.params);
    meta.push("kernel", kernel_label(&cfg.kernel));
    meta.push("seed", cfg.master_seed);
    meta.push("version", VERSION);
    meta
}

fn path_table(cfg: &ExperimentConfig, seq: &EventSequence, replication: u64) -> Table {
    let mut meta = run_metadata(cfg);
    meta.push("replication", replication);
    meta.push("horizon", seq.horizon);
    let mut table = Table::new(meta, &["index", "time"]);
    for (i, t) in seq.times.iter().enumerate() {
        table.push_row(vec![(i + 1).to_string(), t.to_string()]);
    }
    table
}

pub fn histogram_table(cfg: &ExperimentConfig, data: &HistogramData) -> Table {
    let mut meta = run_metadata(cfg);
    meta.push("t", data.t);
    meta.push("n_runs", data.n_runs);
    meta.push("mean", data.mean);
    meta.push("std_error_of_mean", data.std_error_of_mean);
    if let Some(e) = data.expected_count {
        meta.push("expected_count", e);
    }
    let mut table = Table::new(meta, &["n", "frequency", "probability"]);
    for r in &data.rows {
        table.push_row(vec![r.n.to_string(), r.frequency.to_string(), format!("{:.6}", r.probability)]);
    }
    table
}

/// Reads a histogram written by the `distribution` command, CSV or JSON.
pub fn read_histogram(text: &str) -> Result<CountHistogram> {
    if text.trim_start().starts_with('{') {
        let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| invalid("json", e.to_string()))?;
        let data: HistogramData = serde_json::from_value(doc.get("data").cloned().unwrap_or(doc))
            .map_err(|e| invalid("json", e.to_string()))?;
        return data.histogram();
    }
    let table = Table::parse(text)?;
    let t: f64 = table.meta.parse("t")?;
    let (cn, cf) = (table.column("n")?, table.column("frequency")?);
    let mut frequencies = Vec::new();
    for row in &table.rows {
        let n: usize = parse_field(&row[cn], "n")?;
        let f: u64 = parse_field(&row[cf], "frequency")?;
        if frequencies.len() <= n {
            frequencies.resize(n + 1, 0);
        }
        frequencies[n] += f;
    }
    CountHistogram::from_frequencies(t, frequencies)
}

/// Total-variation distance between two histogram files.
pub fn compare_histograms(a: &str, b: &str) -> Result<f64> {
    tv_distance(&read_histogram(a)?, &read_histogram(b)?)
}
