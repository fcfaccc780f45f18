//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 statistical rejection (tail
//! estimate at or below `1 + ε`), 4 numeric non-convergence.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::direct::{gini_ordered, Normalization};
use crate::distributions::{Distribution, Family, Sample, TailDistribution};
use crate::error::{domain, Error, Result};
use crate::experiments::rng::{stream_rng, StreamDomain};
use crate::experiments::{
    emit_histogram, fmt_real, run_aggregation_experiment, run_convergence_study,
    run_std_decline_study, run_table_experiment, with_threads, AggregationConfig, ExperimentConfig,
    StdDeclineConfig,
};
use crate::tail_ml::{
    derived_gini, ml_alpha, pdf_alpha_hat, DerivedGiniDistribution, ScaleChoice, DEFAULT_EPSILON,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

pub const DEFAULT_SEED: u64 = 42;
pub const THREADS_ENV: &str = "GINI_TAIL_THREADS";
pub const PDF_CSV_HEADER: &str = "point,density";

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InfiniteMean { .. } => EXIT_REJECTED,
        Error::QuadratureNonConvergence { .. } | Error::SeriesNonConvergence { .. } => {
            EXIT_NONCONVERGENCE
        }
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gini-tail",
    version,
    about = "Direct and tail-exponent Gini estimation for fat-tailed data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the Gini coefficient of a data file.
    Gini(GiniArgs),
    /// Write a simulated sample, one value per line.
    Simulate(SimulateArgs),
    /// Evaluate an estimator density on a grid.
    Pdf(PdfArgs),
    /// Run a Monte Carlo or analytic experiment.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "pareto-i", alias = "pareto")]
    ParetoI,
    Lomax,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::ParetoI => Family::ParetoI,
            FamilyArg::Lomax => Family::Lomax,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    PairUnbiased,
    Plugin,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::PairUnbiased => Normalization::PairUnbiased,
            NormalizationArg::Plugin => Normalization::Plugin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Tail,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Data file: one value per line, or CSV with --csv.
    pub input: PathBuf,
    /// Parse the input as CSV with a header row.
    #[arg(long)]
    pub csv: bool,
    /// CSV column name, or zero-based index.
    #[arg(long, requires = "csv")]
    pub column: Option<String>,
}

#[derive(Debug, Args)]
pub struct GiniArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "direct")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "pair-unbiased")]
    pub normalization: NormalizationArg,
    /// Known lower bound L for the tail method; defaults to the sample minimum.
    #[arg(long = "scale-L", alias = "scale-l")]
    pub scale_l: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Print only the number.
    #[arg(long)]
    pub plain: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "pareto-i")]
    pub family: FamilyArg,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdfWhich {
    AlphaHat,
    AlphaTruncated,
    DerivedGini,
}

#[derive(Debug, Args)]
pub struct PdfArgs {
    #[arg(long, value_enum)]
    pub which: PdfWhich,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// First grid point; defaults to the lower end of the support.
    #[arg(long)]
    pub from: Option<f64>,
    /// Last grid point; defaults to the upper end of the support (5α for unbounded ones).
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the CSV rows here.
    #[arg(long = "csv-out")]
    pub csv_out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Direct versus ML-derived Gini by sample size.
    Table(TableArgs),
    /// Pooled versus per-unit direct Gini.
    Aggregate(AggregateArgs),
    /// Partial sums of the first-moment series.
    Convergence(ConvergenceArgs),
    /// Standard deviation of the ML-derived Gini by sample size.
    StdDecline(StdDeclineArgs),
}

/// Accepts `1000` as well as `1e3`.
fn parse_size(s: &str) -> std::result::Result<usize, String> {
    let t = s.trim();
    t.parse::<usize>().or_else(|_| match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(v as usize),
        _ => Err(format!("bad sample size {t:?}")),
    })
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum, default_value = "pareto-i")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 1.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Comma-separated sample sizes, e.g. 1000,10000 or 1e3,1e4.
    #[arg(long, value_parser = parse_size, value_delimiter = ',', default_value = "1000,10000")]
    pub sizes: Vec<usize>,
    /// Replications per size; desk-scale defaults when omitted.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "pair-unbiased")]
    pub normalization: NormalizationArg,
    /// Include every replication record in the JSON report.
    #[arg(long)]
    pub raw: bool,
    /// Write per-size histograms of both estimators into this directory.
    #[arg(long)]
    pub histogram_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long, default_value_t = 10)]
    pub units: usize,
    #[arg(long, default_value_t = 1000)]
    pub unit_size: usize,
    #[arg(long, value_enum, default_value = "pareto-i")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 1.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "pair-unbiased")]
    pub normalization: NormalizationArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, default_value_t = 1.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 60)]
    pub max_terms: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StdDeclineArgs {
    #[arg(long, default_value_t = 1.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, value_parser = parse_size, value_delimiter = ',', default_value = "1000,10000,100000")]
    pub sizes: Vec<usize>,
    /// Monte Carlo replications per size (0: analytic column only).
    #[arg(long, default_value_t = 0)]
    pub reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A parsed data file.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDataset {
    pub path: PathBuf,
    pub column: Option<String>,
    pub sample: Sample,
}

fn parse_value(raw: &str, line: usize) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {:?}", raw.trim()),
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Parse {
            line,
            message: format!("values must be finite and nonnegative, got {v}"),
        });
    }
    Ok(v)
}

/// Read a one-value-per-line file (blank lines and `#` comments skipped) or a
/// CSV file with a header row.
pub fn read_dataset(path: &Path, csv: bool, column: Option<&str>) -> Result<InputDataset> {
    let values = if csv {
        read_csv_column(path, column)?
    } else {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            values.push(parse_value(t, i + 1)?);
        }
        values
    };
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: values.len(),
        });
    }
    Ok(InputDataset {
        path: path.to_path_buf(),
        column: column.map(str::to_owned),
        sample: Sample::new(values)?,
    })
}

fn read_csv_column(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let index = match column {
        None => 0,
        Some(name) => match headers.iter().position(|h| h == name) {
            Some(i) => i,
            None => name
                .parse::<usize>()
                .ok()
                .filter(|i| *i < headers.len())
                .ok_or_else(|| domain(format!("no CSV column {name:?}")))?,
        },
    };
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let raw = record.get(index).ok_or_else(|| Error::Parse {
            line,
            message: format!("missing column {index}"),
        })?;
        values.push(parse_value(raw, line)?);
    }
    Ok(values)
}

fn write_output(path: Option<&Path>, body: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(body.as_bytes()).map_err(Error::from),
    }
}

fn seed_or_default(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let _ = writeln!(err, "no --seed given; using {DEFAULT_SEED}");
        DEFAULT_SEED
    })
}

fn cmd_gini(args: &GiniArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let data = read_dataset(
        &args.input.input,
        args.input.csv,
        args.input.column.as_deref(),
    )?;
    let (value, body) = match args.method {
        MethodArg::Direct => {
            let g = gini_ordered(data.sample.values(), args.normalization.into())?;
            (g.value, serde_json::to_value(g).expect("serializable"))
        }
        MethodArg::Tail => {
            let scale = match args.scale_l {
                Some(l) => ScaleChoice::Known(l),
                None => {
                    let _ = writeln!(
                        err,
                        "warning: scale L estimated as the sample minimum; the minimum is excluded from the likelihood"
                    );
                    ScaleChoice::SampleMinimum
                }
            };
            let est = ml_alpha(data.sample.values(), scale, args.epsilon)?;
            let g = derived_gini(&est)?;
            let mut body = serde_json::to_value(g).expect("serializable");
            body["tail_estimate"] = serde_json::to_value(est).expect("serializable");
            (g.value, body)
        }
    };
    if args.plain {
        writeln!(out, "{}", fmt_real(value))?;
    } else {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&body).expect("json")
        )?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, err: &mut dyn Write) -> Result<()> {
    let seed = seed_or_default(args.seed, err);
    let dist = Distribution::new(args.family.into(), args.alpha, args.scale)?;
    let mut rng = stream_rng(seed, StreamDomain::Simulate, args.n as u64, 0);
    let sample = dist.sample(args.n, &mut rng)?;
    let mut body = String::with_capacity(args.n * 20);
    for v in sample.values() {
        body.push_str(&format!("{v}\n"));
    }
    fs::write(&args.out, body).map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))
}

fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(domain("a grid needs at least 2 points"));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(domain(format!(
            "grid needs finite from < to, got [{from}, {to}]"
        )));
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                to
            } else {
                from + i as f64 * step
            }
        })
        .collect())
}

/// Evaluate the chosen density on a uniform grid; the grid must lie in the
/// closure of the support.
pub fn pdf_table(args: &PdfArgs) -> Result<Vec<(f64, f64)>> {
    match args.which {
        PdfWhich::AlphaHat => {
            let (lo, hi) = (
                args.from.unwrap_or(0.0),
                args.to.unwrap_or(5.0 * args.alpha),
            );
            if lo < 0.0 {
                return Err(domain("grid outside support (0, inf)"));
            }
            grid(lo, hi, args.points)?
                .into_iter()
                .map(|a| Ok((a, pdf_alpha_hat(a, args.alpha, args.n)?)))
                .collect()
        }
        PdfWhich::AlphaTruncated => {
            let dist = DerivedGiniDistribution::new(args.alpha, args.n, args.epsilon)?;
            let cutoff = 1.0 + args.epsilon;
            let (lo, hi) = (
                args.from.unwrap_or(cutoff),
                args.to.unwrap_or(5.0 * args.alpha),
            );
            if lo < cutoff {
                return Err(domain(format!(
                    "grid outside support [1+epsilon, inf) = [{}, inf)",
                    fmt_real(cutoff)
                )));
            }
            grid(lo, hi, args.points)?
                .into_iter()
                .map(|a| Ok((a, dist.pdf_alpha_truncated(a)?)))
                .collect()
        }
        PdfWhich::DerivedGini => {
            let dist = DerivedGiniDistribution::new(args.alpha, args.n, args.epsilon)?;
            let upper = dist.support_upper();
            let (lo, hi) = (args.from.unwrap_or(0.0), args.to.unwrap_or(upper));
            if lo < 0.0 || hi > upper {
                return Err(domain(format!(
                    "grid outside support (0, 1/(2 epsilon + 1)) = (0, {})",
                    fmt_real(upper)
                )));
            }
            grid(lo, hi, args.points)?
                .into_iter()
                .map(|g| Ok((g, dist.pdf(g)?)))
                .collect()
        }
    }
}

fn cmd_pdf(args: &PdfArgs, out: &mut dyn Write) -> Result<()> {
    let table = pdf_table(args)?;
    let mut body = format!("{PDF_CSV_HEADER}\n");
    for (x, d) in table {
        body.push_str(&format!("{},{}\n", fmt_real(x), fmt_real(d)));
    }
    write_output(args.out.as_deref(), &body, out)
}

fn finish_report(
    output: &OutputArgs,
    json: &str,
    csv: Option<String>,
    wall_time: Option<f64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let mut json = json.to_owned();
    json.push('\n');
    write_output(output.out.as_deref(), &json, out)?;
    if let (Some(path), Some(csv)) = (output.csv_out.as_deref(), csv) {
        write_output(Some(path), &csv, out)?;
    }
    if let Some(t) = wall_time {
        let _ = writeln!(err, "wall time: {t:.3}s");
    }
    Ok(())
}

fn cmd_experiment(cmd: &ExperimentCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        ExperimentCommand::Table(a) => {
            let config = ExperimentConfig {
                family: a.family.into(),
                alpha: a.alpha,
                scale: a.scale,
                sizes: a.sizes.clone(),
                replications: a.reps,
                epsilon: a.epsilon,
                master_seed: seed_or_default(a.seed, err),
                normalization: a.normalization.into(),
                keep_raw: a.raw || a.histogram_dir.is_some(),
            };
            let mut report = with_threads(a.output.threads, || run_table_experiment(&config))??;
            if let Some(dir) = &a.histogram_dir {
                fs::create_dir_all(dir)
                    .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                let raw = report.raw.as_deref().unwrap_or_default();
                for &n in &config.sizes {
                    let direct: Vec<f64> = raw
                        .iter()
                        .filter(|r| r.n == n)
                        .map(|r| r.direct_gini)
                        .collect();
                    let ml: Vec<f64> = raw
                        .iter()
                        .filter(|r| r.n == n)
                        .filter_map(|r| r.ml_gini)
                        .collect();
                    let h = emit_histogram(&direct, a.bins)?;
                    write_output(
                        Some(&dir.join(format!("direct_n{n}.csv"))),
                        &h.to_csv(),
                        out,
                    )?;
                    if !ml.is_empty() {
                        let h = emit_histogram(&ml, a.bins)?;
                        write_output(Some(&dir.join(format!("ml_n{n}.csv"))), &h.to_csv(), out)?;
                    }
                }
                if !a.raw {
                    report.raw = None;
                }
            }
            finish_report(
                &a.output,
                &report.to_json(),
                Some(report.to_csv()),
                Some(report.wall_time_secs),
                out,
                err,
            )
        }
        ExperimentCommand::Aggregate(a) => {
            let config = AggregationConfig {
                units: a.units,
                unit_size: a.unit_size,
                family: a.family.into(),
                alpha: a.alpha,
                scale: a.scale,
                replications: a.reps,
                master_seed: seed_or_default(a.seed, err),
                normalization: a.normalization.into(),
            };
            let report = with_threads(a.output.threads, || run_aggregation_experiment(&config))??;
            let csv = format!(
                "per_unit_mean_gini,pooled_gini,weighted_avg,superadditivity_gap,gap_std_error\n{},{},{},{},{}\n",
                fmt_real(report.per_unit_mean_gini),
                fmt_real(report.pooled_gini),
                fmt_real(report.weighted_avg),
                fmt_real(report.superadditivity_gap),
                fmt_real(report.gap_std_error),
            );
            finish_report(
                &a.output,
                &report.to_json(),
                Some(csv),
                Some(report.wall_time_secs),
                out,
                err,
            )
        }
        ExperimentCommand::Convergence(a) => {
            let dist = DerivedGiniDistribution::new(a.alpha, a.n, a.epsilon)?;
            let table = run_convergence_study(&dist, a.max_terms)?;
            finish_report(
                &a.output,
                &table.to_json(),
                Some(table.to_csv()),
                None,
                out,
                err,
            )
        }
        ExperimentCommand::StdDecline(a) => {
            let config = StdDeclineConfig {
                alpha: a.alpha,
                epsilon: a.epsilon,
                sizes: a.sizes.clone(),
                replications: a.reps,
                master_seed: if a.reps > 0 {
                    seed_or_default(a.seed, err)
                } else {
                    a.seed.unwrap_or(DEFAULT_SEED)
                },
            };
            let table = with_threads(a.output.threads, || run_std_decline_study(&config))??;
            finish_report(
                &a.output,
                &table.to_json(),
                Some(table.to_csv()),
                None,
                out,
                err,
            )
        }
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Gini(a) => cmd_gini(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, err),
        Command::Pdf(a) => cmd_pdf(a, out),
        Command::Experiment(c) => cmd_experiment(c, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::InfiniteMean { .. } = e {
                let _ = writeln!(
                    err,
                    "the tail exponent is too small for a finite mean, so the Gini is undefined"
                );
            }
            exit_code(&e)
        }
    }
}
