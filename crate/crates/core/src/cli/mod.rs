//! Command-line front end: `fit`, `simulate` and `mc`.
//!
//! Every command resolves its flags into a serializable config, optionally
//! overlays a JSON config file on top, and writes that resolved config into
//! `metadata.json`. Feeding a metadata file back through `--config` reruns the
//! same computation; the output directory is the only thing it does not fix.

pub mod ingest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::distributions::RngStream;
use crate::gibbs::{default_priors_from_data, run_chain, ChainConfig, PosteriorChains, PriorSpec};
use crate::inference::{
    format_table_cell, summarize, FitSummary, IntervalMode, ReplicateSummary, DEFAULT_MASS,
    PARAMETER_NAMES,
};
use crate::shrinkage::{FamilyKind, MIN_LEVEL_SIZE};
use crate::simgen::{
    generate_series, run_monte_carlo, weight_curve, ScenarioConfig, StudyResult, WeightCurve,
};
use crate::wavelet::WaveletFilter;
use crate::{Error, Result};

pub use ingest::{ingest_series, Aggregate, DateFormat, IngestOptions, Observations};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "DYNMIX_OUT_DIR";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Decimals in the Table-style Monte Carlo summary.
const TABLE_DECIMALS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LengthPolicy {
    /// Reject series whose length is not a power of two.
    #[default]
    Strict,
    /// Keep the most recent `2^floor(log2 n)` observations.
    Truncate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub input: PathBuf,
    pub ingest: IngestOptions,
    #[serde(default)]
    pub length_policy: LengthPolicy,
    pub chain: ChainConfig,
    #[serde(default = "default_mass")]
    pub hpd_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub curve: WeightCurve,
    pub n: usize,
    pub mu: [f64; 2],
    /// Precisions.
    pub tau2: [f64; 2],
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
}

fn default_mass() -> f64 {
    DEFAULT_MASS
}

/// Resolved configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    Fit(FitConfig),
    Simulate(SimulateConfig),
    Mc(ScenarioConfig),
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Fit(_) => "fit",
            RunConfig::Simulate(_) => "simulate",
            RunConfig::Mc(_) => "mc",
        }
    }
}

/// Contents of `metadata.json`. No timestamps or paths of the output
/// directory, so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub software: String,
    pub version: String,
    pub run: RunConfig,
    pub outputs: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "dynmix",
    version,
    about = "Gaussian mixtures with a time-varying weight"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the model to an observed series.
    Fit(FitArgs),
    /// Draw a synthetic series from a weight curve.
    Simulate(SimulateArgs),
    /// Monte Carlo study over synthetic replicates.
    Mc(McArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long, short, env = OUT_DIR_ENV, default_value = "dynmix-out")]
    pub out: PathBuf,
    /// JSON config, or a metadata.json from an earlier run. Its values override flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Slab of the coefficient prior: gaussian (SSG) or laplace (SSL).
    #[arg(long, default_value = "laplace")]
    pub family: FamilyKind,
    /// Wavelet filter: coif3, db4, db2 or haar.
    #[arg(long, default_value = "coif3", value_parser = WaveletFilter::by_name)]
    pub filter: WaveletFilter,
    #[arg(long, default_value_t = 6000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 5)]
    pub thin: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream_id: u64,
    /// Refit level hyperparameters every this many sweeps.
    #[arg(long, default_value_t = 1)]
    pub refit_every: usize,
    /// Levels smaller than this share the fit of a coarser, larger level.
    #[arg(long, default_value_t = MIN_LEVEL_SIZE)]
    pub min_level_size: usize,
}

impl ChainArgs {
    fn config(&self) -> ChainConfig {
        ChainConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            seed: self.seed,
            stream_id: self.stream_id,
            family: self.family,
            filter: self.filter.clone(),
            hyperparam_refit_every: self.refit_every,
            min_level_size: self.min_level_size,
            store_z: false,
            store_theta: false,
        }
    }
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// sinusoidal, blocks, bumps or constant:<level>.
    #[arg(long, default_value = "sinusoidal", value_parser = WeightCurve::parse)]
    pub curve: WeightCurve,
    /// Read the curve from a file with an `alpha` column instead.
    #[arg(long, conflicts_with = "curve")]
    pub curve_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu1: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub mu2: f64,
    /// Precision of component 1.
    #[arg(long = "tau2-1", default_value_t = 4.0)]
    pub tau2_1: f64,
    /// Precision of component 2.
    #[arg(long = "tau2-2", default_value_t = 4.0)]
    pub tau2_2: f64,
}

impl CurveArgs {
    fn curve(&self) -> Result<WeightCurve> {
        match &self.curve_file {
            None => Ok(self.curve.clone()),
            Some(path) => {
                let opts = IngestOptions {
                    value_column: "alpha".into(),
                    ..IngestOptions::default()
                };
                Ok(WeightCurve::Tabulated {
                    values: ingest_series(path, &opts)?.values,
                })
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Delimited text file with a header row.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "value")]
    pub value_column: String,
    #[arg(long)]
    pub date_column: Option<String>,
    #[arg(long, value_enum, default_value_t = DateFormat::Iso)]
    pub date_format: DateFormat,
    #[arg(long, value_enum, default_value_t = Aggregate::None)]
    pub aggregate: Aggregate,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Numbers use a decimal comma.
    #[arg(long)]
    pub decimal_comma: bool,
    #[arg(long, value_enum, default_value_t = LengthPolicy::Strict)]
    pub length_policy: LengthPolicy,
    #[arg(long, default_value_t = DEFAULT_MASS)]
    pub hpd_mass: f64,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stream `r` reproduces the data of Monte Carlo replicate `r`.
    #[arg(long, default_value_t = 0)]
    pub stream_id: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 30)]
    pub replicates: usize,
    #[arg(long, default_value_t = DEFAULT_MASS)]
    pub hpd_mass: f64,
    /// replicate-set or averaged-chain.
    #[arg(long, default_value = "replicate-set")]
    pub interval_mode: IntervalMode,
    /// Worker threads (default: all cores). Does not change results.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Recursively overwrites `base` with `overlay`; objects merge key by key.
pub fn merge_json(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge_json(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Overlays the config file (bare config or a metadata file) on the flag values.
fn resolve<T: Serialize + for<'de> Deserialize<'de>>(
    command: &str,
    mut base: Value,
    config: Option<&Path>,
) -> Result<T> {
    let mut from = "flags".to_string();
    if let Some(path) = config {
        let mut file = read_json(path)?;
        if let Some(run) = file.get_mut("run") {
            file = run.take();
        }
        if let Value::Object(map) = &mut file {
            if let Some(cmd) = map.remove("command") {
                if cmd.as_str() != Some(command) {
                    return Err(Error::Input {
                        path: path.to_path_buf(),
                        msg: format!("config is for command {cmd}, not '{command}'"),
                    });
                }
            }
        } else {
            return Err(Error::Input {
                path: path.to_path_buf(),
                msg: "config must be a JSON object".into(),
            });
        }
        merge_json(&mut base, file);
        from = path.display().to_string();
    }
    serde_json::from_value(base)
        .map_err(|e| Error::invalid(format!("bad {command} config from {from}: {e}")))
}

impl FitArgs {
    pub fn resolve(&self) -> Result<FitConfig> {
        let cfg = FitConfig {
            input: self.input.clone().unwrap_or_default(),
            ingest: IngestOptions {
                value_column: self.value_column.clone(),
                date_column: self.date_column.clone(),
                date_format: self.date_format,
                aggregate: self.aggregate,
                delimiter: self.delimiter,
                decimal_comma: self.decimal_comma,
            },
            length_policy: self.length_policy,
            chain: self.chain.config(),
            hpd_mass: self.hpd_mass,
        };
        let cfg: FitConfig = resolve("fit", to_value(&cfg), self.output.config.as_deref())?;
        if cfg.input.as_os_str().is_empty() {
            return Err(Error::invalid(
                "no input file: pass --input or set \"input\" in --config",
            ));
        }
        Ok(cfg)
    }
}

impl SimulateArgs {
    pub fn resolve(&self) -> Result<SimulateConfig> {
        let cfg = SimulateConfig {
            curve: self.curve.curve()?,
            n: self.n,
            mu: [self.curve.mu1, self.curve.mu2],
            tau2: [self.curve.tau2_1, self.curve.tau2_2],
            seed: self.seed,
            stream_id: self.stream_id,
        };
        resolve("simulate", to_value(&cfg), self.output.config.as_deref())
    }
}

impl McArgs {
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let cfg = ScenarioConfig {
            curve: self.curve.curve()?,
            n: self.n,
            mu: [self.curve.mu1, self.curve.mu2],
            tau2: [self.curve.tau2_1, self.curve.tau2_2],
            replicates: self.replicates,
            chain: self.chain.config(),
            hpd_mass: self.hpd_mass,
            interval_mode: self.interval_mode,
        };
        resolve("mc", to_value(&cfg), self.output.config.as_deref())
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("configs serialize to JSON")
}

/// Applies the length policy; returns the series and the number of leading
/// observations dropped.
pub fn apply_length_policy(
    obs: Observations,
    policy: LengthPolicy,
) -> Result<(Observations, usize)> {
    let n = obs.values.len();
    if n.is_power_of_two() {
        return Ok((obs, 0));
    }
    match policy {
        LengthPolicy::Strict => Err(Error::invalid(format!(
            "series has {n} observations, not a power of two (use --length-policy truncate to keep the most recent {})",
            1usize << n.ilog2()
        ))),
        LengthPolicy::Truncate => {
            let keep = 1usize << n.ilog2();
            let drop = n - keep;
            Ok((
                Observations {
                    values: obs.values[drop..].to_vec(),
                    labels: obs.labels.map(|l| l[drop..].to_vec()),
                },
                drop,
            ))
        }
    }
}

struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|source| Error::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        let mut f = fs::File::create(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        f.write_all(bytes)
            .map_err(|source| Error::Io { path, source })?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn csv(
        &mut self,
        name: &str,
        header: &[String],
        rows: impl Iterator<Item = Vec<String>>,
    ) -> Result<()> {
        let path = self.root.join(name);
        let err = |source| Error::Csv {
            path: path.clone(),
            source,
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(err)?;
        for row in rows {
            w.write_record(&row).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: path.clone(),
            source: e.into_error(),
        })?;
        self.write(name, &bytes)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
            path: self.root.join(name),
            source,
        })?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `metadata.json`, listing every file written so far.
    fn finish(mut self, run: RunConfig) -> Result<Vec<String>> {
        let mut outputs = self.written.clone();
        outputs.push("metadata.json".into());
        let meta = Metadata {
            software: env!("CARGO_PKG_NAME").into(),
            version: VERSION.into(),
            run,
            outputs: outputs.clone(),
        };
        self.json("metadata.json", &meta)?;
        Ok(outputs)
    }
}

fn num(v: f64) -> String {
    v.to_string()
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Column names of `chains.csv`.
pub fn chains_header(n: usize) -> Vec<String> {
    let mut h = header(&["iteration"]);
    h.extend(PARAMETER_NAMES.iter().map(|s| s.to_string()));
    h.extend((1..=n).map(|t| format!("alpha_{t}")));
    h
}

/// Body of `summary.json` for a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub observations: usize,
    /// Leading observations removed by the truncate policy.
    pub dropped_leading: usize,
    pub priors: PriorSpec,
    pub summary: FitSummary,
    /// Time labels of the change points, when the input had dates.
    #[serde(default)]
    pub change_point_labels: Option<Vec<String>>,
}

pub fn fit_command(cfg: &FitConfig, out: &Path) -> Result<FitReport> {
    cfg.chain.validate()?;
    let obs = ingest_series(&cfg.input, &cfg.ingest)?;
    let (obs, dropped) = apply_length_policy(obs, cfg.length_policy)?;
    if dropped > 0 {
        eprintln!(
            "warning: dropped the {dropped} oldest observations to keep {} (a power of two)",
            obs.values.len()
        );
    }
    let y = &obs.values;
    let priors = default_priors_from_data(y)?;
    let chains = run_chain(y, &cfg.chain, &priors)?;
    let summary = summarize(&chains, cfg.hpd_mass)?;
    let change_point_labels = obs.labels.as_ref().map(|l| {
        summary
            .regimes
            .change_points
            .iter()
            .map(|&t| l[t - 1].clone())
            .collect()
    });
    let report = FitReport {
        observations: y.len(),
        dropped_leading: dropped,
        priors,
        summary,
        change_point_labels,
    };

    let mut dir = OutDir::create(out)?;
    write_chains(&mut dir, &chains)?;
    let mut h = header(&["t", "alpha_hat", "hpd_lower", "hpd_upper", "regime"]);
    if obs.labels.is_some() {
        h.push("time_label".into());
    }
    let s = &report.summary;
    dir.csv(
        "alpha.csv",
        &h,
        s.alpha.iter().enumerate().map(|(i, e)| {
            let mut row = vec![
                (i + 1).to_string(),
                num(e.estimate),
                num(e.lower),
                num(e.upper),
                s.regimes.labels[i].to_string(),
            ];
            if let Some(l) = &obs.labels {
                row.push(l[i].clone());
            }
            row
        }),
    )?;
    dir.json("summary.json", &report)?;
    dir.finish(RunConfig::Fit(cfg.clone()))?;
    Ok(report)
}

fn write_chains(dir: &mut OutDir, chains: &PosteriorChains) -> Result<()> {
    dir.csv(
        "chains.csv",
        &chains_header(chains.n),
        (0..chains.len()).map(|i| {
            let mut row = vec![
                chains.iteration[i].to_string(),
                num(chains.mu[0][i]),
                num(chains.tau2[0][i]),
                num(chains.mu[1][i]),
                num(chains.tau2[1][i]),
            ];
            row.extend(chains.alpha_draw(i).iter().map(|&a| num(a)));
            row
        }),
    )
}

pub fn simulate_command(cfg: &SimulateConfig, out: &Path) -> Result<()> {
    let alpha = weight_curve(&cfg.curve, cfg.n)?;
    let mut rng = RngStream::new(cfg.seed, cfg.stream_id);
    let series = generate_series(&mut rng, &alpha, cfg.mu, cfg.tau2)?;
    let mut dir = OutDir::create(out)?;
    dir.csv(
        "series.csv",
        &header(&["t", "y", "z_true", "alpha_true"]),
        (0..cfg.n).map(|t| {
            vec![
                (t + 1).to_string(),
                num(series.y[t]),
                u8::from(series.z[t]).to_string(),
                num(alpha[t]),
            ]
        }),
    )?;
    dir.finish(RunConfig::Simulate(cfg.clone()))?;
    Ok(())
}

/// Body of `mc_summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub scenario: String,
    pub prior: String,
    pub replicates_ok: usize,
    pub failures: Vec<(usize, String)>,
    pub interval_method: String,
    /// In `mu1, tau2_1, mu2, tau2_2` order.
    pub parameters: Vec<ReplicateSummary>,
    pub alpha_band_coverage: f64,
}

pub fn mc_command(cfg: &ScenarioConfig, out: &Path, threads: Option<usize>) -> Result<McReport> {
    let study = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| run_monte_carlo(cfg))?,
        None => run_monte_carlo(cfg)?,
    };
    let report = McReport {
        scenario: cfg.curve.name().into(),
        prior: cfg.chain.family.acronym().into(),
        replicates_ok: study.replicates.len(),
        failures: study.failures.clone(),
        interval_method: study.interval_method.clone(),
        parameters: study.summary.clone(),
        alpha_band_coverage: crate::simgen::band_coverage(&study.alpha_band),
    };
    for (r, msg) in &study.failures {
        eprintln!("warning: replicate {r} failed: {msg}");
    }
    let mut dir = OutDir::create(out)?;
    write_replicates(&mut dir, &study)?;
    dir.csv(
        "alpha_band.csv",
        &header(&["t", "truth", "mean", "hpd_lower", "hpd_upper"]),
        study.alpha_band.iter().enumerate().map(|(i, b)| {
            vec![
                (i + 1).to_string(),
                num(b.truth),
                num(b.mean),
                num(b.lower),
                num(b.upper),
            ]
        }),
    )?;
    let mut table_header = header(&["scenario", "prior"]);
    table_header.extend(PARAMETER_NAMES.iter().map(|s| s.to_string()));
    let mut row = vec![report.scenario.clone(), report.prior.clone()];
    row.extend(
        report
            .parameters
            .iter()
            .map(|s| format_table_cell(s, TABLE_DECIMALS)),
    );
    dir.csv("mc_table.csv", &table_header, std::iter::once(row))?;
    dir.json("mc_summary.json", &report)?;
    dir.finish(RunConfig::Mc(cfg.clone()))?;
    Ok(report)
}

/// Column names of `replicates.csv`.
pub fn replicates_header() -> Vec<String> {
    let mut h = header(&["replicate"]);
    h.extend(PARAMETER_NAMES.iter().map(|s| s.to_string()));
    for p in PARAMETER_NAMES {
        h.push(format!("{p}_lower"));
        h.push(format!("{p}_upper"));
    }
    h
}

fn write_replicates(dir: &mut OutDir, study: &StudyResult) -> Result<()> {
    dir.csv(
        "replicates.csv",
        &replicates_header(),
        study.replicates.iter().map(|r| {
            let mut row = vec![r.replicate.to_string()];
            row.extend(r.estimates.iter().map(|&v| num(v)));
            for (lo, hi) in r.chain_intervals {
                row.push(num(lo));
                row.push(num(hi));
            }
            row
        }),
    )?;
    let n = study.truth.len();
    let mut h = header(&["replicate"]);
    h.extend((1..=n).map(|t| format!("alpha_hat_{t}")));
    dir.csv(
        "replicate_alpha.csv",
        &h,
        study.replicates.iter().map(|r| {
            let mut row = vec![r.replicate.to_string()];
            row.extend(r.alpha_hat.iter().map(|&a| num(a)));
            row
        }),
    )
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(args) => {
            let cfg = args.resolve()?;
            let report = fit_command(&cfg, &args.output.out)?;
            let s = &report.summary;
            println!(
                "{} observations, {} retained draws",
                report.observations, s.retained_draws
            );
            for (name, e) in PARAMETER_NAMES.iter().zip(s.scalars()) {
                println!(
                    "{name:>7} {:.4} ({:.4}; {:.4})",
                    e.estimate, e.lower, e.upper
                );
            }
            println!("change points: {:?}", s.regimes.change_points);
            println!("wrote {}", args.output.out.display());
        }
        Command::Simulate(args) => {
            let cfg = args.resolve()?;
            simulate_command(&cfg, &args.output.out)?;
            println!("wrote {}", args.output.out.display());
        }
        Command::Mc(args) => {
            let cfg = args.resolve()?;
            let report = mc_command(&cfg, &args.output.out, args.threads)?;
            println!(
                "{} {} ({} replicates, {})",
                report.scenario, report.prior, report.replicates_ok, report.interval_method
            );
            for (name, s) in PARAMETER_NAMES.iter().zip(&report.parameters) {
                println!("{name:>7} {}", format_table_cell(s, TABLE_DECIMALS));
            }
            println!("alpha band coverage {:.3}", report.alpha_band_coverage);
            println!("wrote {}", args.output.out.display());
        }
    }
    Ok(())
}
