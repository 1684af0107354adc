//! Monte Carlo sweeps, configuration text and CSV output.
//!
//! A run walks the sweep values in order. At each value it generates
//! `n_scenarios` scenarios and one fading draw per scenario, then allocates with
//! every scheme. The seed of scenario `j` at sweep index `i` is
//! [`seed::scenario_seed`]`(master_seed, i, j)`. Geometry and fading use the
//! [`seed::stream::GEOMETRY`] and [`seed::stream::FADING`] streams of that seed.
//! Scenarios are farmed out to a thread pool and the results are reduced in
//! scenario order, so the output does not depend on the thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::allocation::{allocate, SchemeConfig};
use crate::combinatorics::{SelectionMode, SizeVector};
use crate::geometry::{generate_scenario_seeded, NetworkScenario, SimParams};
use crate::power::{PLowForm, PowerPolicy};
use crate::radio::{FadingRealization, ThroughputMode};
use crate::seed;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "sweep_var,sweep_value,scheme,mean_bps_hz,std,degenerate,wall_ms";

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    /// Exclusion radius (m).
    D,
    /// Cell radius (m).
    R,
    /// CU minimum rate (bps/Hz).
    RcMin,
    /// Maximum MG power (dBm).
    PG,
    /// Per-channel MG density (per m²).
    LambdaG,
    /// `n` of every `fixed(n)` scheme.
    NPerChannel,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 6] = [
        SweepVariable::D,
        SweepVariable::R,
        SweepVariable::RcMin,
        SweepVariable::PG,
        SweepVariable::LambdaG,
        SweepVariable::NPerChannel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::D => "D",
            SweepVariable::R => "R",
            SweepVariable::RcMin => "R_c_min",
            SweepVariable::PG => "P_G",
            SweepVariable::LambdaG => "lambda_g",
            SweepVariable::NPerChannel => "n_per_channel",
        }
    }

    /// Parameters and schemes at sweep value `v`.
    pub fn apply(
        self,
        base: &SimParams<f64>,
        schemes: &[SchemeConfig],
        v: f64,
    ) -> Result<(SimParams<f64>, Vec<SchemeConfig>)> {
        let mut p = base.clone();
        let mut s = schemes.to_vec();
        match self {
            SweepVariable::D => p.exclusion_radius_m = v,
            SweepVariable::R => p.cell_radius_m = v,
            SweepVariable::RcMin => p.cu_min_rate_bps_per_hz = v,
            SweepVariable::PG => p.max_mg_power_dbm = v,
            SweepVariable::LambdaG => p.group_density_per_channel = v,
            SweepVariable::NPerChannel => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(Error::param(
                        "sweep_values",
                        format!("n_per_channel needs positive integers, got {v}"),
                    ));
                }
                for scheme in &mut s {
                    if let SelectionMode::Fixed(_) = scheme.selection_mode {
                        scheme.selection_mode = SelectionMode::Fixed(v as usize);
                    }
                }
            }
        }
        p.validate()?;
        Ok((p, s))
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepVariable::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| Error::param("sweep_variable", format!("unknown sweep variable `{s}`")))
    }
}

/// A full experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub base: SimParams<f64>,
    pub sweep_variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    pub schemes: Vec<SchemeConfig>,
    pub n_scenarios: usize,
    pub output_path: Option<PathBuf>,
    pub parallelism: usize,
    /// Measure per-scheme compute time. Off by default, in which case `wall_ms`
    /// is written as 0 so that the CSV is reproducible byte for byte.
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    /// Defaults for everything but the sweep and the schemes.
    pub fn new(sweep_variable: SweepVariable, sweep_values: Vec<f64>, schemes: Vec<SchemeConfig>) -> Self {
        ExperimentConfig {
            base: SimParams::default(),
            sweep_variable,
            sweep_values,
            schemes,
            n_scenarios: 500,
            output_path: None,
            parallelism: 1,
            record_wall_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep_values.is_empty() {
            return Err(Error::param("sweep_values", "must not be empty"));
        }
        if self.sweep_values.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::param("sweep_values", "must be sorted ascending"));
        }
        if self.schemes.is_empty() {
            return Err(Error::param("schemes", "must not be empty"));
        }
        if self.n_scenarios == 0 {
            return Err(Error::param("n_scenarios", "must be >= 1"));
        }
        if self.parallelism == 0 {
            return Err(Error::param("parallelism", "must be >= 1"));
        }
        for &v in &self.sweep_values {
            self.sweep_variable.apply(&self.base, &self.schemes, v)?;
        }
        Ok(())
    }
}

const REQUIRED_KEYS: [&str; 3] = ["sweep_variable", "sweep_values", "schemes"];

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_power_policy(s: &str) -> Option<PowerPolicy> {
    if s == "max_feasible" {
        return Some(PowerPolicy::MaxFeasible);
    }
    s.strip_prefix("grid(")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|n| n.trim().parse().ok())
        .map(PowerPolicy::Grid)
}

fn render_power_policy(p: PowerPolicy) -> String {
    match p {
        PowerPolicy::MaxFeasible => "max_feasible".into(),
        PowerPolicy::Grid(n) => format!("grid({n})"),
    }
}

/// Parses the key=value configuration format.
///
/// One `key = value` per line; `#` starts a comment. `sweep_variable`,
/// `sweep_values` (comma separated) and `schemes` (comma separated
/// `<mode>[:<method>]`) are required; every [`SimParams`] field and
/// `n_scenarios`, `output_path`, `parallelism`, `power_policy`
/// (`max_feasible` or `grid(n)`), `throughput_mode` (`instantaneous` or
/// `analytic`), `p_low_form` (`appendix` or `lemma`), `allow_large_search` and
/// `record_wall_time` are optional. Unknown or repeated keys are errors.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut seen = BTreeSet::new();
    let mut cfg = ExperimentConfig::new(SweepVariable::D, Vec::new(), Vec::new());
    let mut power_policy = PowerPolicy::default();
    let mut throughput_mode = ThroughputMode::default();
    let mut p_low_form = PLowForm::default();
    let mut allow_large_search = false;
    let mut scheme_names: Vec<String> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let bad = |what: &str| err(format!("invalid value `{value}` for `{key}` ({what})"));
        let num = || value.parse::<f64>().map_err(|_| bad("expected a number"));
        let int = || {
            value
                .parse::<usize>()
                .map_err(|_| bad("expected a non-negative integer"))
        };
        let p = &mut cfg.base;
        match key {
            "cell_radius_m" => p.cell_radius_m = num()?,
            "exclusion_radius_m" => p.exclusion_radius_m = num()?,
            "num_channels" => p.num_channels = int()?,
            "num_groups" => p.num_groups = int()?,
            "receiver_density_per_m2" => p.receiver_density_per_m2 = num()?,
            "group_density_per_channel" => p.group_density_per_channel = num()?,
            "cu_density_per_channel" => p.cu_density_per_channel = num()?,
            "max_cu_power_dbm" => p.max_cu_power_dbm = num()?,
            "max_mg_power_dbm" => p.max_mg_power_dbm = num()?,
            "cu_sir_threshold_db" => p.cu_sir_threshold_db = num()?,
            "mg_sir_threshold_db" => p.mg_sir_threshold_db = num()?,
            "cu_outage_threshold" => p.cu_outage_threshold = num()?,
            "mg_outage_threshold" => p.mg_outage_threshold = num()?,
            "cu_min_rate_bps_per_hz" => p.cu_min_rate_bps_per_hz = num()?,
            "path_loss_exponent" => p.path_loss_exponent = num()?,
            "bandwidth_hz" => p.bandwidth_hz = num()?,
            "assoc_min_rx_power_dbm" => p.assoc_min_rx_power_dbm = num()?,
            "master_seed" => p.master_seed = value.parse().map_err(|_| bad("expected a u64"))?,
            "sweep_variable" => cfg.sweep_variable = value.parse().map_err(|e: Error| bad(&e.to_string()))?,
            "sweep_values" => {
                cfg.sweep_values = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("expected comma-separated numbers"))?;
            }
            "schemes" => scheme_names = value.split(',').map(|s| s.trim().to_string()).collect(),
            "n_scenarios" => cfg.n_scenarios = int()?,
            "output_path" => cfg.output_path = Some(PathBuf::from(value)),
            "parallelism" => cfg.parallelism = int()?,
            "power_policy" => power_policy = parse_power_policy(value).ok_or_else(|| bad("max_feasible or grid(n)"))?,
            "throughput_mode" => {
                throughput_mode = match value {
                    "instantaneous" => ThroughputMode::Instantaneous,
                    "analytic" => ThroughputMode::Analytic,
                    _ => return Err(bad("instantaneous or analytic")),
                }
            }
            "p_low_form" => {
                p_low_form = match value {
                    "appendix" => PLowForm::Appendix,
                    "lemma" => PLowForm::Lemma,
                    _ => return Err(bad("appendix or lemma")),
                }
            }
            "allow_large_search" => allow_large_search = parse_bool(value).ok_or_else(|| bad("expected a boolean"))?,
            "record_wall_time" => cfg.record_wall_time = parse_bool(value).ok_or_else(|| bad("expected a boolean"))?,
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }

    let missing: Vec<&str> = REQUIRED_KEYS.iter().copied().filter(|k| !seen.contains(*k)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingKeys(missing.join(", ")));
    }
    cfg.schemes = scheme_names
        .iter()
        .map(|s| {
            let mut scheme: SchemeConfig = s.parse()?;
            scheme.power_policy = power_policy;
            scheme.throughput_mode = throughput_mode;
            scheme.p_low_form = p_low_form;
            scheme.search_guard.allow_large_search = allow_large_search;
            Ok(scheme)
        })
        .collect::<Result<_>>()?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Renders a config so that [`parse_config`] gives it back unchanged. Options
/// shared by all schemes are taken from the first scheme.
pub fn render_config(cfg: &ExperimentConfig) -> String {
    let p = &cfg.base;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    kv("cell_radius_m", p.cell_radius_m.to_string());
    kv("exclusion_radius_m", p.exclusion_radius_m.to_string());
    kv("num_channels", p.num_channels.to_string());
    kv("num_groups", p.num_groups.to_string());
    kv("receiver_density_per_m2", p.receiver_density_per_m2.to_string());
    kv("group_density_per_channel", p.group_density_per_channel.to_string());
    kv("cu_density_per_channel", p.cu_density_per_channel.to_string());
    kv("max_cu_power_dbm", p.max_cu_power_dbm.to_string());
    kv("max_mg_power_dbm", p.max_mg_power_dbm.to_string());
    kv("cu_sir_threshold_db", p.cu_sir_threshold_db.to_string());
    kv("mg_sir_threshold_db", p.mg_sir_threshold_db.to_string());
    kv("cu_outage_threshold", p.cu_outage_threshold.to_string());
    kv("mg_outage_threshold", p.mg_outage_threshold.to_string());
    kv("cu_min_rate_bps_per_hz", p.cu_min_rate_bps_per_hz.to_string());
    kv("path_loss_exponent", p.path_loss_exponent.to_string());
    kv("bandwidth_hz", p.bandwidth_hz.to_string());
    kv("assoc_min_rx_power_dbm", p.assoc_min_rx_power_dbm.to_string());
    kv("master_seed", p.master_seed.to_string());
    kv("sweep_variable", cfg.sweep_variable.to_string());
    kv(
        "sweep_values",
        cfg.sweep_values
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(", "),
    );
    kv(
        "schemes",
        cfg.schemes
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", "),
    );
    kv("n_scenarios", cfg.n_scenarios.to_string());
    if let Some(path) = &cfg.output_path {
        kv("output_path", path.display().to_string());
    }
    kv("parallelism", cfg.parallelism.to_string());
    if let Some(s) = cfg.schemes.first() {
        kv("power_policy", render_power_policy(s.power_policy));
        kv(
            "throughput_mode",
            match s.throughput_mode {
                ThroughputMode::Instantaneous => "instantaneous".into(),
                ThroughputMode::Analytic => "analytic".into(),
            },
        );
        kv(
            "p_low_form",
            match s.p_low_form {
                PLowForm::Appendix => "appendix".into(),
                PLowForm::Lemma => "lemma".into(),
            },
        );
        kv("allow_large_search", s.search_guard.allow_large_search.to_string());
    }
    kv("record_wall_time", cfg.record_wall_time.to_string());
    out
}

/// Outcome of one scheme on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    /// `None` when the scenario is degenerate or allocation failed.
    pub throughput: Option<f64>,
    pub size_vector: Option<SizeVector>,
    pub elapsed_ns: u128,
}

/// Per-scenario outcomes of every scheme at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub sweep_value: f64,
    pub schemes: Vec<SchemeConfig>,
    /// `outcomes[scenario][scheme]`.
    pub outcomes: Vec<Vec<SchemeOutcome>>,
}

impl SweepPoint {
    /// Throughputs of `scheme` over the non-degenerate scenarios, in order.
    pub fn throughputs(&self, scheme: usize) -> Vec<f64> {
        self.outcomes.iter().filter_map(|o| o[scheme].throughput).collect()
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_variable: SweepVariable,
    pub sweep_value: f64,
    pub scheme: String,
    pub mean_throughput: f64,
    pub std_dev: f64,
    pub n_degenerate: usize,
    pub wall_ms: f64,
}

/// The scenario and fading realisation the harness evaluates for
/// `scenario_seed` (see [`seed::scenario_seed`]).
pub fn draw_scenario(
    params: &SimParams<f64>,
    scenario_seed: u64,
) -> Result<(NetworkScenario<f64>, FadingRealization<f64>)> {
    let scenario = generate_scenario_seeded(params, scenario_seed)?;
    let mut rng = seed::stream_rng(scenario_seed, seed::stream::FADING);
    let fading = FadingRealization::draw(&scenario, &mut rng);
    Ok((scenario, fading))
}

fn run_scenario(params: &SimParams<f64>, schemes: &[SchemeConfig], seed_value: u64, timed: bool) -> Vec<SchemeOutcome> {
    let failed = |elapsed_ns| SchemeOutcome {
        throughput: None,
        size_vector: None,
        elapsed_ns,
    };
    let (scenario, fading) = match draw_scenario(params, seed_value) {
        Ok(pair) if !pair.0.degenerate => pair,
        _ => return schemes.iter().map(|_| failed(0)).collect(),
    };
    schemes
        .iter()
        .map(|scheme| {
            let start = timed.then(Instant::now);
            let result = allocate(&scenario, scheme, &fading);
            let elapsed_ns = start.map_or(0, |s| s.elapsed().as_nanos());
            match result {
                Ok(a) => SchemeOutcome {
                    throughput: Some(a.throughput),
                    size_vector: a.size_vector,
                    elapsed_ns,
                },
                Err(_) => failed(elapsed_ns),
            }
        })
        .collect()
}

/// Runs every sweep point and keeps the per-scenario outcomes.
pub fn run_experiment_detailed(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    // Configuration errors that every scenario would hit are reported up
    // front instead of being counted as degenerate scenarios.
    for scheme in &cfg.schemes {
        scheme.search_guard.check(cfg.base.num_groups, cfg.base.num_channels)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::param("parallelism", e.to_string()))?;
    cfg.sweep_values
        .iter()
        .enumerate()
        .map(|(si, &value)| {
            let (params, schemes) = cfg.sweep_variable.apply(&cfg.base, &cfg.schemes, value)?;
            let outcomes: Vec<Vec<SchemeOutcome>> = pool.install(|| {
                (0..cfg.n_scenarios)
                    .into_par_iter()
                    .map(|j| {
                        let s = seed::scenario_seed(params.master_seed, si as u64, j as u64);
                        run_scenario(&params, &schemes, s, cfg.record_wall_time)
                    })
                    .collect()
            });
            Ok(SweepPoint {
                sweep_value: value,
                schemes,
                outcomes,
            })
        })
        .collect()
}

/// Mean and sample standard deviation, summed in order.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One row per (sweep value, scheme).
pub fn summarize(cfg: &ExperimentConfig, points: &[SweepPoint]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for point in points {
        for (i, scheme) in point.schemes.iter().enumerate() {
            let xs = point.throughputs(i);
            let (mean, std) = mean_std(&xs);
            let wall_ns: u128 = point.outcomes.iter().map(|o| o[i].elapsed_ns).sum();
            rows.push(ResultRow {
                sweep_variable: cfg.sweep_variable,
                sweep_value: point.sweep_value,
                scheme: scheme.to_string(),
                mean_throughput: mean,
                std_dev: std,
                n_degenerate: point.outcomes.len() - xs.len(),
                wall_ms: wall_ns as f64 / 1e6,
            });
        }
    }
    rows
}

/// Runs the experiment and aggregates it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let points = run_experiment_detailed(cfg)?;
    Ok(summarize(cfg, &points))
}

/// How often each size vector wins for `scheme` (normally `all:exhaustive`),
/// per sweep value. Degenerate scenarios and outcomes without an admissible
/// family are not counted.
pub fn winning_combination_histogram(points: &[SweepPoint], scheme: usize) -> Vec<(f64, BTreeMap<SizeVector, usize>)> {
    points
        .iter()
        .map(|p| {
            let mut h = BTreeMap::new();
            for o in &p.outcomes {
                if let (Some(_), Some(sv)) = (o[scheme].throughput, &o[scheme].size_vector) {
                    *h.entry(sv.clone()).or_insert(0) += 1;
                }
            }
            (p.sweep_value, h)
        })
        .collect()
}

/// `10 log10(a / b)`.
pub fn db_gap(a: f64, b: f64) -> f64 {
    10.0 * (a / b).log10()
}

/// `%g`-style rendering with `sig` significant digits.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

pub fn render_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.sweep_variable,
            format_sig(r.sweep_value, 6),
            r.scheme,
            format_sig(r.mean_throughput, 6),
            format_sig(r.std_dev, 6),
            r.n_degenerate,
            format_sig(r.wall_ms, 6),
        ));
    }
    out
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(rows)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
