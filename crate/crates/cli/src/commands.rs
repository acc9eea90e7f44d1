use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use probit_ar::estimate::{replicate as run_replicate, OneStepStart, ReplicationTable};
use probit_ar::model::{
    arma_covariates, simulate_panel, CovariateModel, ObservedCovariates, ScalarCovariate, DEFAULT_BURN_IN,
};
use probit_ar::panel_data::{
    assemble, binarize, impute, load_csv, read_trace, save_csv, save_mask_csv, save_panel_csv, write_trace,
    BinarizeSpec, RawPanel, DEFAULT_QUANTILE,
};
use probit_ar::presets::{self, Design};
use probit_ar::{bootstrap_ci, one_step, two_step, BootstrapOptions, Dims, EstimateOptions, EstimationResult, Method, ModelParams, PanelData};
use serde::{Deserialize, Serialize};

use crate::table::{num, render};
use crate::CliError;

type Outcome = Result<Vec<String>, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    PaperSec5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    TwoStep,
    OneStep,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::TwoStep => Method::TwoStep,
            MethodArg::OneStep => Method::OneStep,
        }
    }
}

/// Where the model to simulate from comes from.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ModelArgs {
    /// Built-in design; sets parameters, covariates, n and T.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    /// Parameter JSON (`{"p","k","d","A","B","C","R"}`).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<PathBuf>,
    /// Response dimension (all-zero coefficients and R = I when no parameters are given).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Lag order.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Covariate dimension.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Number of paths.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Path length.
    #[arg(long = "T")]
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t_len: Option<usize>,
    /// Covariate column, repeatable: `arma:AR/MA[/SD]` (comma-separated
    /// coefficients, e.g. `arma:0.5,-0.3,0.1/0.4`) or `const:VALUE`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covariate: Vec<String>,
    /// Steps discarded before each path.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn parse_coefs(s: &str) -> Result<Vec<f64>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| usage(format!("bad coefficient `{v}`"))))
        .collect()
}

pub fn parse_covariate(spec: &str) -> Result<ScalarCovariate, CliError> {
    if let Some(rest) = spec.strip_prefix("const:") {
        let v: f64 = rest.trim().parse().map_err(|_| usage(format!("bad constant in `{spec}`")))?;
        return Ok(ScalarCovariate::Constant(v));
    }
    let rest = spec
        .strip_prefix("arma:")
        .ok_or_else(|| usage(format!("covariate `{spec}` must start with `arma:` or `const:`")))?;
    let parts: Vec<&str> = rest.split('/').collect();
    if parts.len() > 3 {
        return Err(usage(format!("covariate `{spec}` has too many `/` parts")));
    }
    let ar = parse_coefs(parts[0])?;
    let ma = parse_coefs(parts.get(1).copied().unwrap_or(""))?;
    let sd = match parts.get(2) {
        Some(s) => s.trim().parse().map_err(|_| usage(format!("bad innovation sd in `{spec}`")))?,
        None => 1.0,
    };
    Ok(ScalarCovariate::Arma(arma_covariates(&ar, &ma, sd)?))
}

impl ModelArgs {
    fn design(&self) -> Result<Design, CliError> {
        let preset = self.preset.map(|Preset::PaperSec5| presets::paper_sec5());
        let params = match (&self.params, &preset) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<ModelParams>(&text)
                    .map_err(|e| usage(format!("invalid parameter JSON {}: {e}", path.display())))?
            }
            (None, Some(d)) => d.params.clone(),
            (None, None) => {
                let k = self.k.ok_or_else(|| usage("give --preset, --params or --k"))?;
                ModelParams::null(Dims::new(self.p.unwrap_or(1), k, self.d.unwrap_or(0))?)
            }
        };
        let dims = params.dims();
        for (flag, given, actual) in [("k", self.k, dims.k), ("p", self.p, dims.p), ("d", self.d, dims.d)] {
            if given.is_some_and(|g| g != actual) {
                return Err(usage(format!("--{flag} {} disagrees with the parameters ({actual})", given.unwrap())));
            }
        }
        let covariates = if !self.covariate.is_empty() {
            CovariateModel::new(self.covariate.iter().map(|s| parse_covariate(s)).collect::<Result<_, _>>()?)
        } else if let Some(d) = preset.as_ref().filter(|d| d.params.dims().d == dims.d) {
            d.covariates.clone()
        } else {
            CovariateModel::none()
        };
        if covariates.columns.len() != dims.d {
            return Err(usage(format!(
                "model has d = {} covariates but {} --covariate specs were given",
                dims.d,
                covariates.columns.len()
            )));
        }
        let n = self.n.or(preset.as_ref().map(|d| d.n)).ok_or_else(|| usage("--n is required"))?;
        let horizon = self
            .t_len
            .or(preset.as_ref().map(|d| d.horizon))
            .ok_or_else(|| usage("--T is required"))?;
        if n == 0 || horizon == 0 {
            return Err(usage("--n and --T must be at least 1"));
        }
        Ok(Design {
            params,
            covariates,
            n,
            horizon,
        })
    }

    fn seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| usage("--seed is required"))
    }
}

fn out_dir(dir: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Also write the binary trace `panel.par1`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trace: bool,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

pub fn simulate(args: SimulateArgs) -> Outcome {
    let design = args.model.design()?;
    let seed = args.model.seed()?;
    let burn_in = args.model.burn_in.unwrap_or(DEFAULT_BURN_IN);
    let panel = simulate_panel(&design.params, &design.covariates, design.n, design.horizon, burn_in, seed)?;
    let dir = out_dir(&args.out_dir)?;
    save_panel_csv(&panel, dir.join("panel.csv"))?;
    write_json(&dir.join("params.json"), &design.params)?;
    if args.trace {
        let path = dir.join("panel.par1");
        let file = fs::File::create(&path).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        write_trace(&panel, design.params.dims().p, std::io::BufWriter::new(file))?;
    }
    let dims = design.params.dims();
    println!(
        "simulated n = {}, T = {}, k = {}, d = {}, p = {} into {}",
        design.n,
        design.horizon,
        dims.k,
        dims.d,
        dims.p,
        dir.display()
    );
    Ok(Vec::new())
}

// ---------------------------------------------------------------- data input

/// Which series of a long panel are responses and which are covariates.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SeriesArgs {
    /// Long-format panel CSV (`path_id,time,series,value`) or a `.par1` trace.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Response series (default: every series whose values are all 0 or 1).
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub responses: Vec<String>,
    /// Covariate series (default: every series that is not a response).
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covariates: Vec<String>,
    /// Use no covariates at all.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub no_covariates: bool,
}

struct Loaded {
    data: PanelData,
    trace_p: Option<usize>,
    warnings: Vec<String>,
}

fn select_series(raw: &RawPanel, args: &SeriesArgs) -> (Vec<String>, Vec<String>) {
    let names = raw.series_names();
    let responses = if args.responses.is_empty() {
        names
            .iter()
            .filter(|s| {
                raw.records()
                    .iter()
                    .filter(|r| &&r.series == s)
                    .all(|r| r.value.is_some_and(|v| v == 0.0 || v == 1.0))
            })
            .cloned()
            .collect()
    } else {
        args.responses.clone()
    };
    let covariates = if args.no_covariates {
        Vec::new()
    } else if args.covariates.is_empty() {
        names.into_iter().filter(|s| !responses.contains(s)).collect()
    } else {
        args.covariates.clone()
    };
    (responses, covariates)
}

fn load(args: &SeriesArgs) -> Result<Loaded, CliError> {
    let path = args.input.as_ref().ok_or_else(|| usage("--input is required"))?;
    if path.extension().is_some_and(|e| e == "par1") {
        let file = fs::File::open(path).map_err(|e| usage(format!("cannot open {}: {e}", path.display())))?;
        let (data, p) = read_trace(std::io::BufReader::new(file))?;
        return Ok(Loaded {
            data,
            trace_p: Some(p),
            warnings: Vec::new(),
        });
    }
    let raw = load_csv(path)?;
    let (responses, covariates) = select_series(&raw, args);
    if responses.is_empty() {
        return Err(usage("no binary series found; name the responses with --responses"));
    }
    let assembled = assemble(&raw, &responses, &covariates)?;
    Ok(Loaded {
        data: assembled.data,
        trace_p: None,
        warnings: assembled.warnings,
    })
}

// ---------------------------------------------------------------- estimate

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub series: SeriesArgs,
    /// Lag order (default 1, or the order stored in a trace).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodArg>,
    /// GHK draws of the one-step objective when k >= 3.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ghk_draws: Option<usize>,
    /// Seed of the GHK draws (required for one-step with k >= 3).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Start the one-step search from the count-based values instead of the two-step fit.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cold_start: bool,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn fit_table(fit: &EstimationResult) -> String {
    let rows: Vec<Vec<String>> = fit
        .labels()
        .into_iter()
        .zip(fit.theta())
        .map(|(l, v)| vec![l, num(v, 4)])
        .collect();
    format!(
        "method: {}\nobjective: {}\n\n{}",
        fit.method,
        num(fit.objective_value, 4),
        render(&["parameter", "estimate"], &rows)
    )
}

pub fn estimate(args: EstimateArgs) -> Outcome {
    let loaded = load(&args.series)?;
    let method: Method = args.method.unwrap_or(MethodArg::TwoStep).into();
    let data = &loaded.data;
    if method == Method::OneStep && data.k() >= 3 && args.seed.is_none() {
        return Err(usage("--seed is required for the one-step method when k >= 3"));
    }
    let mut opts = EstimateOptions {
        p: args.p.or(loaded.trace_p).unwrap_or(1),
        ghk_seed: args.seed.unwrap_or(0),
        one_step_start: if args.cold_start { OneStepStart::Init } else { OneStepStart::TwoStep },
        ..EstimateOptions::default()
    };
    if let Some(draws) = args.ghk_draws {
        opts.ghk_draws = draws;
    }
    let fit = match method {
        Method::TwoStep => two_step(data, &opts)?,
        Method::OneStep => one_step(data, &opts)?,
    };
    let dir = out_dir(&args.out_dir)?;
    write_json(&dir.join("estimate.json"), &fit)?;
    let table = fit_table(&fit);
    write_text(&dir.join("estimate.txt"), &table)?;
    print!("{table}");
    let mut warnings = loaded.warnings;
    warnings.extend(fit.warnings());
    Ok(warnings)
}

// ---------------------------------------------------------------- replicate

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReplicateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Number of Monte-Carlo replicates.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sims: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodArg>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ghk_draws: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

pub fn replication_table(t: &ReplicationTable) -> String {
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.parameter.clone(),
                num(r.truth, 3),
                num(r.mean, 4),
                num(r.mse, 5),
                num(r.bias, 4),
                num(r.variance, 5),
            ]
        })
        .collect();
    format!(
        "method: {}\nreplicates: {} ({} failed)\n\n{}",
        t.method,
        t.sims,
        t.failed,
        render(&["parameter", "true", "mean", "MSE", "bias", "variance"], &rows)
    )
}

pub fn replicate(args: ReplicateArgs) -> Outcome {
    let design = args.model.design()?;
    let seed = args.model.seed()?;
    let sims = args.sims.ok_or_else(|| usage("--sims is required"))?;
    let method: Method = args.method.unwrap_or(MethodArg::TwoStep).into();
    let mut opts = EstimateOptions {
        ghk_seed: seed,
        ..EstimateOptions::default()
    };
    if let Some(draws) = args.ghk_draws {
        opts.ghk_draws = draws;
    }
    let burn_in = args.model.burn_in.unwrap_or(DEFAULT_BURN_IN);
    let table = run_replicate(&design, sims, burn_in, method, &opts, seed)?;
    let dir = out_dir(&args.out_dir)?;
    write_json(&dir.join("replicate.json"), &table)?;
    let text = replication_table(&table);
    write_text(&dir.join("replicate.txt"), &text)?;
    print!("{text}");
    let mut warnings = Vec::new();
    if table.failed > 0 {
        warnings.push(format!("{} of {sims} replicates failed", table.failed));
    }
    Ok(warnings)
}

// ---------------------------------------------------------------- bootstrap

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BootstrapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub series: SeriesArgs,
    /// Fitted `estimate.json`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<PathBuf>,
    /// Bootstrap replicates (at least 100).
    #[arg(long = "B")]
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    /// Nominal coverage.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Keep every replicate estimate in `bootstrap.json`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub keep_replicates: bool,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

pub fn bootstrap(args: BootstrapArgs) -> Outcome {
    let seed = args.seed.ok_or_else(|| usage("--seed is required"))?;
    let fit_path = args.fit.as_ref().ok_or_else(|| usage("--fit is required"))?;
    let text = fs::read_to_string(fit_path).map_err(|e| usage(format!("cannot read {}: {e}", fit_path.display())))?;
    let fit = EstimationResult::from_json(&text)?;
    let loaded = load(&args.series)?;
    let data = &loaded.data;
    if data.k() != fit.dims.k || data.d() != fit.dims.d {
        return Err(usage(format!(
            "panel has k = {}, d = {} but the fit has k = {}, d = {}",
            data.k(),
            data.d(),
            fit.dims.k,
            fit.dims.d
        )));
    }
    let covariates =
        ObservedCovariates::new(data.d(), data.paths().iter().map(|p| p.x_flat().to_vec()).collect())?;
    let defaults = BootstrapOptions::default();
    let opts = BootstrapOptions {
        replicates: args.replicates.unwrap_or(defaults.replicates),
        level: args.level.unwrap_or(defaults.level),
        seed,
        burn_in: args.burn_in.unwrap_or(defaults.burn_in),
        keep_replicates: args.keep_replicates,
        ..defaults
    };
    let ci = bootstrap_ci(&fit, &covariates, data.n(), data.horizon(), &opts)?;
    let dir = out_dir(&args.out_dir)?;
    write_json(&dir.join("bootstrap.json"), &ci)?;
    let pct = format!("{}% interval", num(100.0 * ci.level, 1).trim_end_matches(".0"));
    let rows: Vec<Vec<String>> = (0..ci.labels.len())
        .map(|m| {
            vec![
                ci.labels[m].clone(),
                num(ci.estimate[m], 3),
                format!("[{}, {}]", num(ci.lower[m], 3), num(ci.upper[m], 3)),
            ]
        })
        .collect();
    let table = format!(
        "replicates: {} ({} failed)\n\n{}",
        ci.replicates,
        ci.failed,
        render(&["parameter", "estimate", &pct], &rows)
    );
    write_text(&dir.join("bootstrap.txt"), &table)?;
    print!("{table}");
    let mut warnings = loaded.warnings;
    warnings.extend(fit.warnings());
    if ci.failed > 0 {
        warnings.push(format!("{} of {} bootstrap refits failed", ci.failed, ci.replicates));
    }
    Ok(warnings)
}

// ---------------------------------------------------------------- prep

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PrepArgs {
    /// Raw long-format CSV.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub responses: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covariates: Vec<String>,
    /// Binarization quantile (default 1/3).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantile: Option<f64>,
    /// Per-series quantile, repeatable: `SERIES=Q`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quantile_for: Vec<String>,
    /// Series kept continuous (typically covariates).
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub no_binarize: Vec<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

pub fn prep(args: PrepArgs) -> Outcome {
    let path = args.input.as_ref().ok_or_else(|| usage("--input is required"))?;
    let seed = args.seed.ok_or_else(|| usage("--seed is required"))?;
    if args.responses.is_empty() {
        return Err(usage("--responses is required"));
    }
    let mut spec = BinarizeSpec::uniform(args.quantile.unwrap_or(DEFAULT_QUANTILE));
    for item in &args.quantile_for {
        let (name, q) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("--quantile-for expects SERIES=Q, got `{item}`")))?;
        let q: f64 = q.trim().parse().map_err(|_| usage(format!("bad quantile in `{item}`")))?;
        spec.per_series.insert(name.trim().to_string(), q);
    }
    let raw = load_csv(path)?;
    let selected: Vec<String> = args.responses.iter().chain(&args.covariates).cloned().collect();
    let known = raw.series_names();
    if let Some(s) = selected.iter().find(|s| !known.contains(s)) {
        return Err(usage(format!("unknown series `{s}`")));
    }
    // only the selected series take part in the pipeline
    let kept = RawPanel::new(raw.into_records().into_iter().filter(|r| selected.contains(&r.series)).collect())?;
    let binary = binarize(&kept, &spec, &args.no_binarize)?;
    let imputed = impute_selected(&binary, seed, &args.no_binarize)?;
    let assembled = assemble(&imputed.0, &args.responses, &args.covariates)?;
    let dir = out_dir(&args.out_dir)?;
    save_csv(&assembled.to_raw(), dir.join("panel.csv"))?;
    save_mask_csv(&imputed.1, dir.join("mask.csv"))?;
    let data = &assembled.data;
    println!(
        "prepared n = {}, T = {} (from time {}), k = {}, d = {}; imputed {} cells",
        data.n(),
        data.horizon(),
        assembled.first_time,
        data.k(),
        data.d(),
        imputed.1.len()
    );
    Ok(assembled.warnings)
}

/// Imputes the binary series; continuous series must be complete.
fn impute_selected(
    panel: &RawPanel,
    seed: u64,
    continuous: &[String],
) -> Result<(RawPanel, Vec<probit_ar::panel_data::MaskEntry>), CliError> {
    if let Some(r) = panel.records().iter().find(|r| r.value.is_none() && continuous.contains(&r.series)) {
        return Err(usage(format!(
            "continuous series `{}` has a missing value at path `{}`, time {}",
            r.series, r.path_id, r.time
        )));
    }
    let (cont, bin): (Vec<_>, Vec<_>) =
        panel.records().iter().cloned().partition(|r| continuous.contains(&r.series));
    let out = impute(&RawPanel::new(bin)?, seed)?;
    let mut records = out.panel.into_records();
    records.extend(cont);
    Ok((RawPanel::new(records)?, out.mask))
}
