//! `eigenfid`: sweeps, bound checks, speed limits and file inspection.

mod config;
mod inspect;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eigenfid::experiments::{self, SweepMode, SweepResult, CSV_HEADER};
use eigenfid::qsl::{self, HamiltonianMoments, RotationTarget};
use eigenfid::validation::check_bounds;
use log::info;

use config::{ConfigError, Overrides, SweepFile};

#[derive(Parser, Debug)]
#[command(name = "eigenfid", version, about = "Eigenfidelity limits of driven qubit gates")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON sweep configuration (schema 1).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for every random draw; overrides the config file.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Haar samples per row for Monte Carlo columns (0 disables).
    #[arg(long = "mc-samples", global = true, value_name = "N")]
    mc_samples: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(short = 'o', global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenerror versus photon number, Fano factor and reduced time.
    Scaling,
    /// Repeated gate applications with fresh drives.
    Concat,
    /// Fixed photon budget split over several shorter pulses.
    Split,
    /// Randomized check of the state-level inequality chains.
    BoundsCheck {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Random pure states per matrix for the fidelity check.
        #[arg(long, default_value_t = 100)]
        probes: usize,
    },
    /// Speed-limit times and eigenerror floor for a coherent drive.
    Qsl {
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, allow_negative_numbers = true)]
        nbar: f64,
        /// Coupling g.
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
    },
    /// Diagnostics of a state or channel JSON file.
    Inspect {
        file: PathBuf,
        /// Write the parsed object back as canonical JSON.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
}

/// Failure classes with distinct exit codes.
enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<eigenfid::Error> for Failure {
    fn from(e: eigenfid::Error) -> Self {
        Failure::Numerical(format!("numerical error: {e}"))
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Numerical(format!("cannot write {}: {e}", path.display()))
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_failure(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_failure(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_failure(path, e))?;
    tmp.persist(path).map_err(|e| io_failure(path, e.error))?;
    Ok(())
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match output {
        Some(p) => write_atomic(p, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Numerical(format!("cannot write to stdout: {e}"))),
    }
}

fn csv_bytes(result: &SweepResult) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Numerical(format!("csv encoding failed: {e}"));
    w.write_record(CSV_HEADER).map_err(fail)?;
    for row in &result.rows {
        w.write_record(row.csv_fields()).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Failure::Numerical(format!("csv encoding failed: {e}")))
}

fn sidecar(result: &SweepResult, total_ms: f64) -> Vec<u8> {
    let value = serde_json::json!({
        "version": concat!("v", env!("CARGO_PKG_VERSION")),
        "config": result.config,
        "rows": result.rows.len(),
        "runtime_ms": total_ms,
        "row_runtime_ms": result.rows.iter().map(|r| r.runtime_ms).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string_pretty(&value).expect("sidecar serializes");
    s.push('\n');
    s.into_bytes()
}

fn run_sweep(mode: SweepMode, g: &Global) -> Result<(), Failure> {
    let path = g
        .config
        .as_ref()
        .ok_or_else(|| ConfigError::at("", "--config PATH is required for sweeps"))?;
    let file: SweepFile = config::read_json(path)?;
    let ov = Overrides {
        seed: g.seed,
        jobs: g.jobs,
        mc_samples: g.mc_samples,
    };
    let (cfg, file_output) = file.into_sweep(mode, &ov)?;
    let output = g.output.clone().or(file_output.map(PathBuf::from));
    let start = std::time::Instant::now();
    let result = experiments::run(&cfg)?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    info!("{} rows in {total_ms:.1} ms", result.rows.len());
    emit(output.as_deref(), &csv_bytes(&result)?)?;
    if let Some(out) = &output {
        let mut meta = out.clone().into_os_string();
        meta.push(".json");
        write_atomic(Path::new(&meta), &sidecar(&result, total_ms))?;
    }
    Ok(())
}

fn run_bounds_check(dim: usize, trials: usize, probes: usize, g: &Global) -> Result<(), Failure> {
    if dim == 0 {
        return Err(ConfigError::at("/dim", "must be positive").into());
    }
    let report = check_bounds(dim, trials, probes, g.seed.unwrap_or(0), 1e-10)?;
    let line = format!("{}\n", report.summary());
    emit(g.output.as_deref(), line.as_bytes())?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "inequality violations found (worst slack {:.3e})",
            report.worst
        )))
    }
}

fn run_qsl(theta: f64, nbar: f64, coupling: f64, g: &Global) -> Result<(), Failure> {
    let target = RotationTarget::new(theta).map_err(|e| ConfigError::at("/theta", e.to_string()))?;
    if !(nbar > 0.0) {
        return Err(ConfigError::at("/nbar", format!("must be positive, got {nbar}")).into());
    }
    let scale = coupling * nbar.sqrt();
    let moments = HamiltonianMoments::new(scale, scale)?;
    let lines = [
        ("theta", theta),
        ("nbar", nbar),
        ("eigenerror_bound", qsl::qsl_eigenerror_bound(theta, nbar)?),
        ("eigenerror_bound_small_angle", qsl::qsl_eigenerror_bound_small_angle(theta, nbar)?),
        ("mt_time", qsl::mt_time(target, moments)),
        ("ml_time", qsl::ml_time(target, moments)?),
    ];
    emit(g.output.as_deref(), inspect::render(&lines).as_bytes())
}

fn run_inspect(file: &Path, dump: Option<&Path>, g: &Global) -> Result<(), Failure> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| ConfigError::at("", format!("cannot read {}: {e}", file.display())))?;
    let item = inspect::parse(&text).map_err(|e| match e {
        inspect::InspectError::Schema(c) => Failure::from(c),
        inspect::InspectError::Numerical(n) => Failure::from(n),
    })?;
    let lines = inspect::report(&item)?;
    emit(g.output.as_deref(), inspect::render(&lines).as_bytes())?;
    if let Some(path) = dump {
        let mut json = inspect::dump(&item);
        json.push('\n');
        write_atomic(path, json.as_bytes())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EIGENFID_LOG", "warn")).init();
    let g = &cli.global;
    let outcome = match &cli.command {
        Command::Scaling => run_sweep(SweepMode::Scaling, g),
        Command::Concat => run_sweep(SweepMode::Concat, g),
        Command::Split => run_sweep(SweepMode::Split, g),
        Command::BoundsCheck { dim, trials, probes } => run_bounds_check(*dim, *trials, *probes, g),
        Command::Qsl { theta, nbar, coupling } => run_qsl(*theta, *nbar, *coupling, g),
        Command::Inspect { file, dump } => run_inspect(file, dump.as_deref(), g),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(msg) | Failure::Numerical(msg)) = &f;
            eprintln!("eigenfid: {msg}");
            ExitCode::from(f.code())
        }
    }
}
