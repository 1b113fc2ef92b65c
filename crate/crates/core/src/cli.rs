//! The `surp` command line.
//!
//! Every subcommand writes CSV (one header line) or binary output to
//! `--out` when given and to stdout otherwise, and echoes its fully
//! resolved configuration to stderr. Exit codes: 0 success, 2 usage,
//! 3 data, 4 invariant violation.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    beta_sweep, density_fit, fl_budget, surp_budget, table8_betas, FitReport, FitWinner,
};
use crate::codec::{self, Beta, IndexCodec, StopRule, SurpConfig, Variant};
use crate::error::{Error, Result};
use crate::nn_eval::{layer_norms, measure_perturbation, symmetric_bound, theorem1_bound, DenseNet};
use crate::rd_theory::{ExponentialModel, LaplacianModel, RdPoint, RdSource};
use crate::tensor_store::{
    denormalize, load_manifest, normalize, pass_through, save_manifest, Segment, WeightSet,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "surp", version, about = "Successive-refinement pruning codec for weight tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic Laplace or exponential weight set.
    Synth(SynthArgs),
    /// Compress a manifest into a SURP container.
    Encode(EncodeArgs),
    /// Reconstruct a manifest from a SURP container.
    Decode(DecodeArgs),
    /// Tabulate the rate-distortion function.
    Rd(RdArgs),
    /// Per-iteration trace of a container.
    Trace(TraceArgs),
    /// Iterations and refreshes across β values.
    Sweep(SweepArgs),
    /// Check a container against the weights it was made from.
    Verify(VerifyArgs),
    /// Laplace versus Gaussian fit of a weight set.
    Fit(FitArgs),
    /// Output perturbation bounds for two dense ReLU nets.
    BoundCheck(BoundCheckArgs),
    /// Container size against the naive index+value baseline.
    Budget(BudgetArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Laplacian,
    Exponential,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SynthSize {
    /// Single segment "w" of this many values.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated dense layer shapes, rows x cols, e.g. 16x8,4x16.
    #[arg(long)]
    layers: Option<String>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    size: SynthSize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = Family::Laplacian)]
    family: Family,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Manifest path; the blob is written next to it.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "weights.bin")]
    blob: String,
}

#[derive(Debug, Args)]
struct CodecArgs {
    #[arg(long, default_value = "laplacian")]
    variant: Variant,
    /// `auto` (ln n) or a number greater than 1.
    #[arg(long, default_value = "auto", value_parser = parse_beta)]
    beta: Beta,
    /// Initial λ; estimated from the input when omitted.
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// raw, unary or golomb.
    #[arg(long, default_value = "raw")]
    codec: IndexCodec,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct StopArgs {
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    target_sparsity: Option<f64>,
    #[arg(long)]
    target_distortion: Option<f64>,
}

impl StopArgs {
    fn rule(&self) -> StopRule {
        match (self.iterations, self.target_sparsity, self.target_distortion) {
            (Some(l), _, _) => StopRule::Iterations(l),
            (_, Some(s), _) => StopRule::TargetSparsity(s),
            (_, _, Some(d)) => StopRule::TargetDistortion(d),
            _ => unreachable!("clap enforces exactly one stop flag"),
        }
    }
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    #[command(flatten)]
    stop: StopArgs,
    /// Container output path.
    #[arg(long)]
    out: PathBuf,
    /// Trace CSV path; stdout when omitted.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    container: PathBuf,
    /// Output directory for manifest.json and weights.bin.
    #[arg(long)]
    out: PathBuf,
    /// Original manifest to copy skipped segments from.
    #[arg(long)]
    passthrough: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RdArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// start:stop:step.
    #[arg(long, value_parser = parse_grid)]
    dgrid: Grid,
    #[arg(long, value_enum, default_value_t = Family::Laplacian)]
    family: Family,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    container: PathBuf,
    /// Original manifest; re-runs the encoder so the trace carries
    /// distortion.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Comma-separated β values; defaults to √ln n, ½ ln n, ln n, 2 ln n, (ln n)².
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.95)]
    target_sparsity: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    container: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundCheckArgs {
    #[arg(long)]
    original: PathBuf,
    #[arg(long)]
    reconstructed: PathBuf,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    container: PathBuf,
    /// Entries for the baseline; defaults to the reconstruction's nonzero count.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_beta(s: &str) -> std::result::Result<Beta, String> {
    if s == "auto" {
        return Ok(Beta::Auto);
    }
    let b: f64 = s.parse().map_err(|_| format!("expected `auto` or a number, got {s:?}"))?;
    if !(b > 1.0 && b.is_finite()) {
        return Err(format!("beta must exceed 1, got {b}"));
    }
    Ok(Beta::Fixed(b))
}

/// `start:stop:step`, inclusive of `stop` when the step lands on it (to
/// within half a step, in which case the last point snaps to `stop`).
fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected start:stop:step, got {s:?}"));
    };
    let num = |x: &str| x.parse::<f64>().map_err(|_| format!("bad number {x:?} in {s:?}"));
    let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
    if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(format!("need finite start <= stop and step > 0, got {s:?}"));
    }
    let steps = ((stop - start) / step).round() as u64;
    if steps > 10_000_000 {
        return Err(format!("grid {s:?} has too many points"));
    }
    let mut grid: Vec<f64> = (0..=steps).map(|k| start + k as f64 * step).collect();
    if (grid[steps as usize] - stop).abs() <= step / 2.0 {
        grid[steps as usize] = stop;
    }
    Ok(Grid(grid))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) => EXIT_USAGE,
        Error::Invariant(_) => EXIT_INVARIANT,
        _ => EXIT_DATA,
    }
}

/// Parse `argv` (including the program name) and run the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("surp: error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth(a) => synth(a),
        Command::Encode(a) => encode_cmd(a),
        Command::Decode(a) => decode_cmd(a),
        Command::Rd(a) => rd_cmd(a),
        Command::Trace(a) => trace_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Fit(a) => fit_cmd(a),
        Command::BoundCheck(a) => bound_cmd(a),
        Command::Budget(a) => budget_cmd(a),
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::io(
            path,
            io::Error::new(io::ErrorKind::NotFound, "no such file"),
        ))
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| Error::io(p, e))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_rows<T: Serialize>(path: Option<&Path>, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(output(path)?);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path.unwrap_or(Path::new("<stdout>")), e))
}

fn csv_err(e: csv::Error) -> Error {
    Error::io("<csv>", io::Error::other(e.to_string()))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn display_path(p: Option<&Path>) -> String {
    p.map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn config_from(c: &CodecArgs, stop: StopRule) -> SurpConfig {
    SurpConfig {
        variant: c.variant,
        beta: c.beta,
        lambda0: c.lambda0,
        seed: c.seed,
        stop,
        index_codec: c.codec,
    }
}

fn stop_desc(stop: StopRule) -> String {
    match stop {
        StopRule::Iterations(l) => format!("iterations={l}"),
        StopRule::TargetSparsity(s) => format!("target_sparsity={s}"),
        StopRule::TargetDistortion(d) => format!("target_distortion={d}"),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let shapes: Vec<(String, Vec<usize>)> = match (&a.size.n, &a.size.layers) {
        (Some(n), _) => vec![("w".to_string(), vec![*n])],
        (_, Some(list)) => list
            .split(',')
            .enumerate()
            .map(|(k, s)| {
                let dims: Option<Vec<usize>> = s.split('x').map(|d| d.trim().parse().ok()).collect();
                match dims.as_deref() {
                    Some(&[r, c]) => Ok((format!("layer{k}"), vec![r, c])),
                    _ => Err(Error::param(format!("bad layer shape {s:?}; expected ROWSxCOLS"))),
                }
            })
            .collect::<Result<_>>()?,
        _ => unreachable!("clap enforces one size flag"),
    };
    eprintln!(
        "surp synth: family={:?} lambda={} seed={} shapes={:?} out={} blob={}",
        a.family,
        a.lambda,
        a.seed,
        shapes.iter().map(|s| &s.1).collect::<Vec<_>>(),
        a.out.display(),
        a.blob
    );
    let mut segments = Vec::with_capacity(shapes.len());
    for (k, (name, shape)) in shapes.into_iter().enumerate() {
        let len = shape.iter().product();
        let seed = a.seed.wrapping_add(k as u64);
        let values = match a.family {
            Family::Laplacian => LaplacianModel::new(a.lambda)?.sample_source(len, seed),
            Family::Exponential => ExponentialModel::new(a.lambda)?.sample_source(len, seed),
        };
        // Stored as f32; round here so the in-memory set matches the file.
        let values = values.into_iter().map(|v| v as f32 as f64).collect();
        segments.push(Segment::new(name, shape, values)?);
    }
    save_manifest(&WeightSet::new(segments)?, &a.out, &a.blob)
}

fn encode_cmd(a: EncodeArgs) -> Result<()> {
    require_file(&a.manifest)?;
    let ws = load_manifest(&a.manifest)?;
    let nv = normalize(&ws)?;
    let cfg = config_from(&a.codec, a.stop.rule());
    let beta = cfg.beta.resolve(nv.n());
    eprintln!(
        "surp encode: manifest={} n={} variant={} beta={beta}{} lambda0={} seed={} {} codec={} out={} trace={}",
        a.manifest.display(),
        nv.n(),
        cfg.variant,
        if cfg.beta == Beta::Auto { " (auto)" } else { "" },
        cfg.lambda0.map_or_else(|| "estimated".to_string(), |l| l.to_string()),
        cfg.seed,
        stop_desc(cfg.stop),
        cfg.index_codec,
        a.out.display(),
        display_path(a.trace.as_deref()),
    );
    let enc = codec::encode(&nv, &cfg)?;
    fs::write(&a.out, &enc.container).map_err(|e| Error::io(&a.out, e))?;
    eprintln!(
        "surp encode: lambda0={} iterations={} refreshes={} bytes={} distortion={}",
        enc.header.lambda0,
        enc.trace.iterations(),
        enc.trace.refresh_count,
        enc.container.len(),
        enc.final_distortion
    );
    enc.trace.write_csv(output(a.trace.as_deref())?)
}

fn decode_cmd(a: DecodeArgs) -> Result<()> {
    require_file(&a.container)?;
    if let Some(p) = &a.passthrough {
        require_file(p)?;
    }
    eprintln!(
        "surp decode: container={} out={} passthrough={} trace={}",
        a.container.display(),
        a.out.display(),
        display_path(a.passthrough.as_deref()),
        display_path(a.trace.as_deref()),
    );
    let dec = codec::decode(&read_bytes(&a.container)?)?;
    let mut ws = denormalize(dec.layout(), &dec.reconstruction)?;
    if let Some(p) = &a.passthrough {
        pass_through(&mut ws, &load_manifest(p)?)?;
    }
    fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    save_manifest(&ws, &a.out.join("manifest.json"), "weights.bin")?;
    if let Some(t) = &a.trace {
        dec.trace.write_csv(output(Some(t))?)?;
    }
    Ok(())
}

fn rd_cmd(a: RdArgs) -> Result<()> {
    eprintln!(
        "surp rd: family={:?} lambda={} points={} out={}",
        a.family,
        a.lambda,
        a.dgrid.0.len(),
        display_path(a.out.as_deref())
    );
    let rows: Vec<RdPoint> = match a.family {
        Family::Laplacian => crate::rd_theory::rd_table(&LaplacianModel::new(a.lambda)?, &a.dgrid.0)?,
        Family::Exponential => {
            crate::rd_theory::rd_table(&ExponentialModel::new(a.lambda)?, &a.dgrid.0)?
        }
    };
    #[derive(Serialize)]
    struct Row {
        distortion: f64,
        rate_nats: f64,
        rate_bits: f64,
        point_mass: f64,
    }
    let rows: Vec<Row> = rows
        .iter()
        .map(|p| Row {
            distortion: p.distortion,
            rate_nats: p.rate,
            rate_bits: p.rate / std::f64::consts::LN_2,
            point_mass: p.point_mass,
        })
        .collect();
    write_rows(a.out.as_deref(), &rows)
}

fn trace_cmd(a: TraceArgs) -> Result<()> {
    require_file(&a.container)?;
    if let Some(m) = &a.manifest {
        require_file(m)?;
    }
    eprintln!(
        "surp trace: container={} manifest={} out={}",
        a.container.display(),
        display_path(a.manifest.as_deref()),
        display_path(a.out.as_deref())
    );
    let bytes = read_bytes(&a.container)?;
    let trace = match &a.manifest {
        Some(m) => {
            let (header, _) = codec::parse_container(&bytes)?;
            codec::replay(&normalize(&load_manifest(m)?)?, &header)?.trace
        }
        None => codec::decode(&bytes)?.trace,
    };
    trace.write_csv(output(a.out.as_deref())?)
}

fn sweep_cmd(a: SweepArgs) -> Result<()> {
    let betas = a.betas.clone().unwrap_or_else(|| table8_betas(a.n));
    eprintln!(
        "surp sweep: n={} betas={betas:?} target_sparsity={} seed={} out={}",
        a.n,
        a.target_sparsity,
        a.seed,
        display_path(a.out.as_deref())
    );
    let rows = beta_sweep(a.n, &betas, a.target_sparsity, a.seed)?;
    write_rows(a.out.as_deref(), &rows)
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    passed: bool,
    detail: String,
}

fn verify_cmd(a: VerifyArgs) -> Result<()> {
    require_file(&a.container)?;
    require_file(&a.manifest)?;
    eprintln!(
        "surp verify: container={} manifest={} out={}",
        a.container.display(),
        a.manifest.display(),
        display_path(a.out.as_deref())
    );
    let bytes = read_bytes(&a.container)?;
    let dec = codec::decode(&bytes)?;
    let nv = normalize(&load_manifest(&a.manifest)?)?;
    let enc = codec::replay(&nv, &dec.header)?;

    let mut rows = Vec::new();
    let same_bytes = enc.container == bytes;
    rows.push(CheckRow {
        check: "container_reproduces",
        passed: same_bytes,
        detail: format!("{} vs {} bytes", enc.container.len(), bytes.len()),
    });
    let mismatch = enc
        .reconstruction
        .iter()
        .zip(&dec.reconstruction)
        .position(|(x, y)| x.to_bits() != y.to_bits());
    rows.push(CheckRow {
        check: "bit_exact_reconstruction",
        passed: mismatch.is_none(),
        detail: mismatch.map_or_else(|| format!("{} values", nv.n()), |i| format!("first mismatch at {i}")),
    });
    let violation = nv.values.iter().zip(&dec.reconstruction).position(|(u, r)| {
        r.abs() > u.abs() || (*r != 0.0 && r.signum() != u.signum())
    });
    rows.push(CheckRow {
        check: "elementwise_dominance",
        passed: violation.is_none(),
        detail: violation.map_or_else(String::new, |i| format!("violated at {i}")),
    });
    let monotone = enc.trace.check_monotone();
    rows.push(CheckRow {
        check: "monotone_trace",
        passed: monotone.is_ok(),
        detail: monotone.err().unwrap_or_default(),
    });
    write_rows(a.out.as_deref(), &rows)?;
    let failed: Vec<&str> = rows.iter().filter(|r| !r.passed).map(|r| r.check).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}

fn fit_cmd(a: FitArgs) -> Result<()> {
    require_file(&a.manifest)?;
    eprintln!(
        "surp fit: manifest={} out={}",
        a.manifest.display(),
        display_path(a.out.as_deref())
    );
    let ws = load_manifest(&a.manifest)?;
    // Spelled out field by field: the csv writer cannot flatten structs.
    #[derive(Serialize)]
    struct Row {
        segment: String,
        n: usize,
        laplace_loglik_per_sample: f64,
        gaussian_loglik_per_sample: f64,
        mle_lambda: f64,
        mle_mu: f64,
        mle_sigma: f64,
        winner: FitWinner,
    }
    fn row(segment: &str, values: &[f64]) -> Result<Row> {
        let r: FitReport = density_fit(values)?;
        Ok(Row {
            segment: segment.into(),
            n: r.n,
            laplace_loglik_per_sample: r.laplace_loglik_per_sample,
            gaussian_loglik_per_sample: r.gaussian_loglik_per_sample,
            mle_lambda: r.mle_lambda,
            mle_mu: r.mle_mu,
            mle_sigma: r.mle_sigma,
            winner: r.winner,
        })
    }
    let mut rows = Vec::new();
    let mut all = Vec::new();
    for s in ws.segments().iter().filter(|s| !s.skip) {
        all.extend_from_slice(&s.values);
        if s.len() >= 100 {
            rows.push(row(&s.name, &s.values)?);
        }
    }
    rows.push(row("*", &all)?);
    write_rows(a.out.as_deref(), &rows)
}

fn bound_cmd(a: BoundCheckArgs) -> Result<()> {
    require_file(&a.original)?;
    require_file(&a.reconstructed)?;
    eprintln!(
        "surp bound-check: original={} reconstructed={} samples={} seed={} out={}",
        a.original.display(),
        a.reconstructed.display(),
        a.samples,
        a.seed,
        display_path(a.out.as_deref())
    );
    let net = DenseNet::from_weight_set(&load_manifest(&a.original)?)?;
    let hat = DenseNet::from_weight_set(&load_manifest(&a.reconstructed)?)?;
    #[derive(Serialize)]
    struct Row {
        item: String,
        norm: Option<f64>,
        norm_hat: Option<f64>,
        diff_norm: Option<f64>,
        value: Option<f64>,
    }
    let mut rows: Vec<Row> = layer_norms(&net, &hat)?
        .into_iter()
        .map(|l| Row {
            item: format!("layer{}", l.layer),
            norm: Some(l.norm),
            norm_hat: Some(l.norm_hat),
            diff_norm: Some(l.diff_norm),
            value: None,
        })
        .collect();
    let summary = |item: &str, value: Option<f64>| Row {
        item: item.into(),
        norm: None,
        norm_hat: None,
        diff_norm: None,
        value,
    };
    let t1 = match theorem1_bound(&net, &hat) {
        Ok(b) => Some(b),
        Err(e) => {
            eprintln!("surp bound-check: theorem1 bound unavailable: {e}");
            None
        }
    };
    rows.push(summary(
        "measured_perturbation",
        Some(measure_perturbation(&net, &hat, a.samples, a.seed)?),
    ));
    rows.push(summary("theorem1_bound", t1));
    rows.push(summary("symmetric_bound", Some(symmetric_bound(&net, &hat)?)));
    write_rows(a.out.as_deref(), &rows)
}

fn budget_cmd(a: BudgetArgs) -> Result<()> {
    require_file(&a.container)?;
    let bytes = read_bytes(&a.container)?;
    let sb = surp_budget(&bytes)?;
    let (header, _) = codec::parse_container(&bytes)?;
    let n = header.n as usize;
    let k = match a.k {
        Some(k) => k,
        None => codec::decode(&bytes)?
            .reconstruction
            .iter()
            .filter(|v| **v != 0.0)
            .count(),
    };
    eprintln!(
        "surp budget: container={} n={n} k={k} out={}",
        a.container.display(),
        display_path(a.out.as_deref())
    );
    let fl = fl_budget(n, k)?;
    #[derive(Serialize)]
    struct Row {
        n: usize,
        k: usize,
        header_bytes: u64,
        payload_bits: u64,
        record_count: u64,
        total_bytes: u64,
        baseline_bits: f64,
        baseline_bytes: f64,
        advantage: f64,
    }
    write_rows(
        a.out.as_deref(),
        &[Row {
            n,
            k,
            header_bytes: sb.header_bytes,
            payload_bits: sb.payload_bits,
            record_count: sb.record_count,
            total_bytes: sb.total_bytes,
            baseline_bits: fl.baseline_bits,
            baseline_bytes: fl.baseline_bytes,
            advantage: fl.baseline_bytes / sb.total_bytes as f64,
        }],
    )
}
