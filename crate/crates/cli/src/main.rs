use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use steptda::detect::{count_series, rpm_persistence, PersistenceOptions, ResultRecord};
use steptda::harness::{bench_runtime, bench_scaling, run_sweep, BenchConfig, Plane, SweepConfig};
use steptda::image::{image_pulse_count, ImageGrid};
use steptda::io::{
    load_signal, write_diagram_csv, write_heatmap_csv, write_recording_csv, write_runtime_csv,
    write_series_csv, write_spectrum_csv, DEFAULT_THRESHOLD_VOLTS,
};
use steptda::persistence::{diagram_1d, extract_support};
use steptda::signal::{simulate_accordion, NominalTrain, PulseModel, TimeSeries};
use steptda::spectral::{one_sided_spectrum, rpm_fourier, DEFAULT_PEAK_DIVISOR};
use steptda::{Error, Method};

#[derive(Parser)]
#[command(name = "steptda", version, about = "Pulse counting and speed estimation for two-state signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a noisy pulse train.
    Simulate(SimulateArgs),
    /// Count pulses in a recording.
    Count(CountArgs),
    /// Estimate the speed with one method.
    Rpm(RpmArgs),
    /// Estimate the speed with both methods.
    Compare(CompareArgs),
    /// Run a robustness sweep and write the heatmap table.
    Sweep(SweepArgs),
    /// Time the estimators.
    Bench(BenchArgs),
    /// Count clusters in the product image of two recordings.
    ImageCount(ImageArgs),
}

#[derive(Args)]
struct InputArgs {
    /// CSV with header `time_s,volts` or `time_s,value`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Voltage threshold for `time_s,volts` files.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD_VOLTS)]
    threshold_volts: f64,
    /// Count the low intervals instead of the high ones.
    #[arg(long)]
    invert: bool,
    /// Minimum jump ratio for a split to be marked valid.
    #[arg(long, default_value_t = steptda::detect::DEFAULT_RHO_MIN)]
    rho_min: f64,
}

impl InputArgs {
    fn load(&self) -> steptda::Result<TimeSeries> {
        load_signal(&self.input, self.threshold_volts)
    }

    fn options(&self) -> PersistenceOptions {
        PersistenceOptions {
            invert: self.invert,
            rho_min: self.rho_min,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON model descriptor; overrides the nominal-train flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 3178.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = steptda::harness::DEFAULT_SEED)]
    seed: u64,
    /// Write a `time_s,volts` capture scaled to this high level instead of
    /// a `time_s,value` series.
    #[arg(long)]
    volts: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also write the gap diagram as CSV.
    #[arg(long)]
    diagram_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Persistence,
    Fourier,
}

#[derive(Args)]
struct RpmArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "persistence")]
    method: MethodArg,
    /// Peak divisor for the Fourier method.
    #[arg(long, default_value_t = DEFAULT_PEAK_DIVISOR)]
    w: f64,
    /// Also write the one-sided spectrum as CSV.
    #[arg(long)]
    spectrum_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_PEAK_DIVISOR)]
    w: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_plane)]
    plane: Plane,
    /// JSON sweep configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid size as ROWSxCOLS (noise values x speeds).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    rho_min: Option<f64>,
    /// Heatmap CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full result (including runtimes) as JSON.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON benchmark configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated signal lengths; switches to the scaling benchmark.
    #[arg(long, value_delimiter = ',')]
    lengths: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImageArgs {
    /// Signal along the image rows.
    #[arg(long)]
    rows: PathBuf,
    /// Signal along the image columns.
    #[arg(long)]
    cols: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD_VOLTS)]
    threshold_volts: f64,
    /// Super-level threshold on the product image.
    #[arg(long, default_value_t = 0.5)]
    level: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_plane(s: &str) -> Result<Plane, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(r)?, parse(c)?))
}

/// Exit status classes: estimator failures exit 1, bad input exits 2.
enum Failure {
    Usage(String),
    Estimator(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_estimator_failure() {
            Failure::Estimator(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> CliResult {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> steptda::Result<()>) -> CliResult {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn simulate(args: SimulateArgs) -> CliResult {
    let model: PulseModel = match &args.config {
        Some(path) => read_json(path)?,
        None => {
            let mut m = NominalTrain::default().model(args.omega, args.alpha, args.epsilon, args.seed);
            m.beta = args.beta;
            m
        }
    };
    let ts = simulate_accordion(&model)?;
    let mut w = sink(&args.out)?;
    match args.volts {
        Some(v) => write_recording_csv(&ts, v, &mut w)?,
        None => write_series_csv(&ts, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn count(args: CountArgs) -> CliResult {
    let ts = args.input.load()?;
    let opts = args.input.options();
    if let Some(path) = &args.diagram_out {
        let series = if opts.invert { ts.inverted() } else { ts.clone() };
        let dgm = diagram_1d(&extract_support(&series, opts.level)?)?;
        write_file(path, |w| write_diagram_csv(&dgm, w))?;
    }
    let c = count_series(&ts, &opts)?;
    write_json(&c, &args.out)
}

fn estimate(ts: &TimeSeries, method: Method, input: &InputArgs, w: f64) -> Result<ResultRecord, Failure> {
    let e = match method {
        Method::Persistence => rpm_persistence(ts, &input.options())?,
        Method::Fourier => {
            let series = if input.invert { ts.inverted() } else { ts.clone() };
            rpm_fourier(&series, w)?
        }
    };
    Ok(ResultRecord::from(&e))
}

fn rpm(args: RpmArgs) -> CliResult {
    let ts = args.input.load()?;
    if let Some(path) = &args.spectrum_out {
        let spec = one_sided_spectrum(&ts)?;
        write_file(path, |w| write_spectrum_csv(&spec, w))?;
    }
    let method = match args.method {
        MethodArg::Persistence => Method::Persistence,
        MethodArg::Fourier => Method::Fourier,
    };
    write_json(&estimate(&ts, method, &args.input, args.w)?, &args.out)
}

fn compare(args: CompareArgs) -> CliResult {
    let ts = args.input.load()?;
    let records = vec![
        estimate(&ts, Method::Persistence, &args.input, args.w)?,
        estimate(&ts, Method::Fourier, &args.input, args.w)?,
    ];
    write_json(&records, &args.out)
}

fn sweep(args: SweepArgs) -> CliResult {
    let mut cfg: SweepConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => SweepConfig::default(),
    };
    if let Some(g) = args.grid {
        cfg.grid = g;
    }
    if let Some(r) = args.reps {
        cfg.replicates = r;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if let Some(w) = args.w {
        cfg.peak_divisor = w;
    }
    if let Some(r) = args.rho_min {
        cfg.rho_min = r;
    }
    let res = run_sweep(&cfg, args.plane)?;
    if let Some(path) = &args.json_out {
        write_json(&res, &Some(path.clone()))?;
    }
    let mut w = sink(&args.out)?;
    write_heatmap_csv(&res, &mut w)?;
    w.flush()?;
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult {
    let mut cfg: BenchConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => BenchConfig::default(),
    };
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    let methods = [Method::Persistence, Method::Fourier];
    let rows = if args.lengths.is_empty() {
        bench_runtime(&cfg, &methods)?
    } else {
        bench_scaling(&args.lengths, cfg.runs, &methods, cfg.base_seed)?
    };
    let mut w = sink(&args.out)?;
    write_runtime_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(())
}

fn image_count(args: ImageArgs) -> CliResult {
    let rows = load_signal(&args.rows, args.threshold_volts)?;
    let cols = load_signal(&args.cols, args.threshold_volts)?;
    let img = ImageGrid::outer_product(&rows, &cols)?;
    write_json(&image_pulse_count(&img, args.level)?, &args.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Count(a) => count(a),
        Command::Rpm(a) => rpm(a),
        Command::Compare(a) => compare(a),
        Command::Sweep(a) => sweep(a),
        Command::Bench(a) => bench(a),
        Command::ImageCount(a) => image_count(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Estimator(msg)) => {
            eprintln!("steptda: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("steptda: {msg}");
            ExitCode::from(2)
        }
    }
}
