//! Command-line surface: `simulate`, `outlyingness`, `detect` and
//! `benchmark`, reading and writing CSV.
//!
//! Curves use a long format with header `curve_id,t,x1,...,xp`, rows grouped
//! by curve in ascending `t`, every curve on the same time column. Floats are
//! written with 17 significant digits so files round-trip exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::functional::outlyingness_summaries;
use crate::harness::{monte_carlo, MonteCarloConfig, MonteCarloSummary};
use crate::robust::{detect, DetectionConfig, HrConfig, HrMethod, McdConfig, DEFAULT_ALPHA, DEFAULT_H_FRAC};
use crate::simulate::{generate_model, ContaminationMode, ModelSpec};
use crate::types::{DepthConfig, FunctionalDataset, LabelSet, TimeGrid};

/// Two curves share a time column when their `t` values agree to this.
pub const GRID_TOL: f64 = 1e-12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dirout", version, about = "Directional outlyingness for functional data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate curves from a simulation model
    Simulate(SimulateArgs),
    /// Per-curve MO, VO and FO
    Outlyingness(OutlyingnessArgs),
    /// Flag outlying curves
    Detect(DetectArgs),
    /// Monte-Carlo correct and false detection rates
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: u8,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Contaminate each curve independently with probability eps
    #[arg(long)]
    pub bernoulli: bool,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    /// Random projection directions for p >= 2
    #[arg(long, default_value_t = 200)]
    pub directions: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OutlyingnessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub depth: DepthArgs,
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long = "h-frac", default_value_t = DEFAULT_H_FRAC)]
    pub h_frac: f64,
    #[arg(long = "mcd-starts", default_value_t = 500)]
    pub mcd_starts: usize,
    #[arg(long = "hr-method", default_value = "simulated")]
    pub hr_method: HrMethod,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Contaminate each curve independently with probability eps
    #[arg(long)]
    pub bernoulli: bool,
    #[command(flatten)]
    pub depth: DepthArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub model: u8,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Also write the table to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Contaminate each curve independently with probability eps
    #[arg(long)]
    pub bernoulli: bool,
    #[command(flatten)]
    pub depth: DepthArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Outlyingness(a) => cmd_outlyingness(&a),
        Command::Detect(a) => cmd_detect(&a),
        Command::Benchmark(a) => cmd_benchmark(&a),
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn model_spec(
    model: u8,
    eps: f64,
    seed: u64,
    n: Option<usize>,
    k: Option<usize>,
    bernoulli: bool,
) -> Result<ModelSpec> {
    let spec = ModelSpec::new(model, eps, seed)?;
    let (n, k) = (n.unwrap_or(spec.n), k.unwrap_or(spec.k));
    let mut spec = spec.with_size(n, k);
    if bernoulli {
        spec.contamination = ContaminationMode::Bernoulli;
    }
    spec.validate()?;
    Ok(spec)
}

fn depth_config(a: &DepthArgs) -> Result<DepthConfig> {
    DepthConfig::new(a.directions, resolve_seed(a.seed))
}

fn detection_config(a: &DetectorArgs, seed: u64) -> Result<DetectionConfig> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "--alpha {} must lie in (0, 1)",
            a.alpha
        )));
    }
    if !(a.h_frac > 0.0 && a.h_frac <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "--h-frac {} must lie in (0, 1]",
            a.h_frac
        )));
    }
    if a.mcd_starts == 0 {
        return Err(Error::InvalidParameter("--mcd-starts must be at least 1".into()));
    }
    let mcd = McdConfig {
        n_starts: a.mcd_starts,
        ..McdConfig::default()
    };
    Ok(DetectionConfig {
        alpha: a.alpha,
        h_frac: a.h_frac,
        seed,
        mcd: mcd.clone(),
        hr: HrConfig {
            method: a.hr_method,
            mcd,
            ..HrConfig::default()
        },
    })
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let seed = resolve_seed(a.seed);
    let spec = model_spec(a.model, a.eps, seed, a.n, a.k, a.bernoulli)?;
    let (data, labels) = generate_model(&spec)?;
    let ids: Vec<String> = (0..data.n()).map(|i| i.to_string()).collect();
    write_curves(&a.out, &ids, &data)?;
    if let Some(path) = &a.labels {
        write_labels(path, &ids, &labels)?;
    }
    Ok(())
}

pub fn cmd_outlyingness(a: &OutlyingnessArgs) -> Result<()> {
    let curves = read_curves(&a.input)?;
    let summaries = outlyingness_summaries(&curves.data, &depth_config(&a.depth)?)?;
    let p = curves.data.p();
    let mut header = vec!["curve_id".to_string()];
    header.extend((1..=p).map(|c| format!("mo_{c}")));
    header.extend(["vo".into(), "fo".into()]);
    let rows = curves.ids.iter().zip(&summaries).map(|(id, s)| {
        let mut row = vec![id.clone()];
        row.extend(s.mo.iter().map(|&v| fmt_f64(v)));
        row.extend([fmt_f64(s.vo), fmt_f64(s.fo)]);
        row
    });
    write_table(a.out.as_deref(), Some(&curves.range_comment()), &header, rows)
}

pub fn cmd_detect(a: &DetectArgs) -> Result<()> {
    let curves = read_curves(&a.input)?;
    let depth = depth_config(&a.depth)?;
    let cfg = detection_config(&a.detector, depth.seed)?;
    let summaries = outlyingness_summaries(&curves.data, &depth)?;
    let report = detect(&summaries, &cfg).map_err(|e| match e {
        Error::SingularScatter => {
            eprintln!(
                "diagnostic: the {} selected (MO, VO) rows span a degenerate subspace; \
                 the curves may be exact shifts or copies of each other",
                cfg.subset_size(curves.data.n())
            );
            e
        }
        e => e,
    })?;
    let header = ["curve_id", "rmd2", "scaled_rmd2", "cutoff", "is_outlier"].map(String::from);
    let rows = curves.ids.iter().enumerate().map(|(i, id)| {
        vec![
            id.clone(),
            fmt_f64(report.rmd2[i]),
            fmt_f64(report.scaled[i]),
            fmt_f64(report.cutoff),
            flag(report.flags[i]).into(),
        ]
    });
    write_table(a.out.as_deref(), Some(&curves.range_comment()), &header, rows)
}

pub fn cmd_benchmark(a: &BenchmarkArgs) -> Result<()> {
    let seed = resolve_seed(a.depth.seed);
    let spec = model_spec(a.model, a.eps, seed, a.n, a.k, a.bernoulli)?;
    let cfg = MonteCarloConfig {
        runs: a.runs,
        seed,
        n_directions: a.depth.directions,
        detection: detection_config(&a.detector, seed)?,
    };
    let summary = monte_carlo(&spec, &cfg)?;
    let header = [
        "model", "eps", "runs", "pc_mean", "pc_sd", "pf_mean", "pf_sd", "failures",
    ]
    .map(String::from);
    let row = benchmark_row(&summary);
    write_table(None, None, &header, std::iter::once(row.clone()))?;
    if let Some(path) = &a.out {
        write_table(Some(path), None, &header, std::iter::once(row))?;
    }
    Ok(())
}

fn benchmark_row(s: &MonteCarloSummary) -> Vec<String> {
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), fmt_f64);
    vec![
        s.model.to_string(),
        s.eps.to_string(),
        s.runs.to_string(),
        opt(s.pc_mean),
        opt(s.pc_sd),
        opt(s.pf_mean),
        opt(s.pf_sd),
        s.failures.to_string(),
    ]
}

/// 17 significant digits: enough for an exact `f64` round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// A curves file after reading: curve ids in file order, the dataset on the
/// normalized grid, and the original time range.
#[derive(Debug, Clone)]
pub struct CurvesFile {
    pub ids: Vec<String>,
    pub data: FunctionalDataset,
    pub t_range: (f64, f64),
}

impl CurvesFile {
    fn range_comment(&self) -> String {
        format!("# t_range={},{}", fmt_f64(self.t_range.0), fmt_f64(self.t_range.1))
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

fn write_table<I>(path: Option<&Path>, comment: Option<&str>, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = open_output(path)?;
    if let Some(c) = comment {
        writeln!(out, "{c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `data` in the long curves format.
pub fn write_curves(path: &Path, ids: &[String], data: &FunctionalDataset) -> Result<()> {
    if ids.len() != data.n() {
        return Err(Error::LengthMismatch {
            expected: data.n(),
            found: ids.len(),
        });
    }
    let mut header = vec!["curve_id".to_string(), "t".to_string()];
    header.extend((1..=data.p()).map(|c| format!("x{c}")));
    let t = data.grid().points();
    let rows = (0..data.n()).flat_map(|i| {
        (0..data.k()).map(move |j| {
            let mut row = vec![ids[i].clone(), fmt_f64(t[j])];
            row.extend(data.point(i, j).iter().map(|&v| fmt_f64(v)));
            row
        })
    });
    write_table(Some(path), None, &header, rows)
}

pub fn write_labels(path: &Path, ids: &[String], labels: &LabelSet) -> Result<()> {
    let header = ["curve_id", "is_outlier"].map(String::from);
    let rows = ids
        .iter()
        .zip(&labels.flags)
        .map(|(id, &f)| vec![id.clone(), flag(f).into()]);
    write_table(Some(path), None, &header, rows)
}

fn parse_f64(field: &str, line: u64, column: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        Error::Format(format!(
            "line {line}: column {column}: cannot parse {field:?} as a number"
        ))
    })
}

/// Reads a long-format curves file; `#` lines are comments. The time column
/// is renormalized to `[0, 1]`.
pub fn read_curves(path: &Path) -> Result<CurvesFile> {
    let file = File::open(path).map_err(|e| Error::Format(format!("cannot open {}: {e}", path.display())))?;
    parse_curves(file)
}

pub fn parse_curves<R: io::Read>(reader: R) -> Result<CurvesFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.len() < 3 || &header[0] != "curve_id" || &header[1] != "t" {
        return Err(Error::Format(format!(
            "header must be curve_id,t,x1,...,xp; found {:?}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let p = header.len() - 2;

    let mut ids: Vec<String> = Vec::new();
    let mut times: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != p + 2 {
            return Err(Error::Format(format!(
                "line {line}: expected {} fields, found {}",
                p + 2,
                rec.len()
            )));
        }
        let id = &rec[0];
        if ids.last().map(String::as_str) != Some(id) {
            if ids.iter().any(|seen| seen == id) {
                return Err(Error::Format(format!(
                    "line {line}: rows of curve {id:?} are not contiguous"
                )));
            }
            ids.push(id.to_string());
            times.push(Vec::new());
        }
        let t = parse_f64(&rec[1], line, "t")?;
        let ts = times.last_mut().expect("curve started");
        if ts.last().is_some_and(|&prev| !(t > prev)) {
            return Err(Error::Format(format!(
                "line {line}: t = {t} of curve {id:?} is not strictly ascending"
            )));
        }
        ts.push(t);
        for c in 0..p {
            values.push(parse_f64(&rec[c + 2], line, &header[c + 2])?);
        }
    }
    let Some(reference) = times.first() else {
        return Err(Error::Format("no data rows".into()));
    };
    for (id, ts) in ids.iter().zip(&times).skip(1) {
        if ts.len() != reference.len() {
            return Err(Error::GridMismatch(format!(
                "curve {id:?} has {} time points, curve {:?} has {}",
                ts.len(),
                ids[0],
                reference.len()
            )));
        }
        if let Some(j) = ts.iter().zip(reference).position(|(a, b)| (a - b).abs() > GRID_TOL) {
            return Err(Error::GridMismatch(format!(
                "curve {id:?}: t[{j}] = {} differs from curve {:?} t[{j}] = {}",
                ts[j], ids[0], reference[j]
            )));
        }
    }
    let (grid, t_range) = TimeGrid::normalized(reference).map_err(|e| Error::Format(e.to_string()))?;
    let data = FunctionalDataset::new(grid, ids.len(), p, values)?;
    Ok(CurvesFile { ids, data, t_range })
}
