//! Command-line front end.
//!
//! Exit codes: 0 success, 1 errata found (`verify`), 2 usage error,
//! 3 input-file error, 4 computation error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::design::{compute_report, verify_against_paper, CircuitSpec, DEFAULT_TOLERANCE};
use crate::export::{
    csv_bytes, wav_bytes, write_report, ReportFormat, ReportRef, WavError, WavParams,
};
use crate::sim::{
    self, monte_carlo_timeout, parse_scenario, ModulationModel, Retrigger, SimConfig, SimError,
};
use crate::units::{
    format_significant, parse_magnitude, snap_preferred, ESeries, Quantity, SnapMode, Unit,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERRATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_COMPUTE: i32 = 4;

/// Timeout measured on the built prototype with a stopwatch, in seconds.
pub const MEASURED_TIMEOUT: f64 = 10.60;

#[derive(Parser, Debug)]
#[command(
    name = "touch-alarm",
    version,
    about = "Touch alarm design calculator and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute every design quantity for a circuit.
    Design(DesignArgs),
    /// Simulate a scenario and export waveforms.
    Simulate(SimulateArgs),
    /// Snap a value to a preferred-number series.
    Snap(SnapArgs),
    /// Audit the published worked figures against recomputed values.
    Verify(VerifyArgs),
    /// Monte Carlo spread of the alarm timeout.
    Tolerance(ToleranceArgs),
}

#[derive(Args, Debug)]
struct DesignArgs {
    /// Circuit file; built-in component values when omitted.
    circuit: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long = "sample-rate", default_value_t = 16_000.0)]
    sample_rate: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    wav: Option<PathBuf>,
    #[arg(long = "one-shot")]
    one_shot: bool,
    /// Imposed carrier tones `f_lo,f_hi` in hertz.
    #[arg(long = "ideal-pair", value_parser = parse_pair)]
    ideal_pair: Option<(f64, f64)>,
}

#[derive(Args, Debug)]
struct SnapArgs {
    #[arg(long, default_value = "E12")]
    series: ESeries,
    #[arg(long, default_value = "nearest")]
    mode: SnapMode,
    value: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct ToleranceArgs {
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, default_value_t = 0.10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected f_lo,f_hi, got {s:?}"))?;
    let f = |x: &str| {
        parse_magnitude(x)
            .ok()
            .filter(|(_, u)| matches!(u, None | Some(Unit::Hertz)))
            .map(|(v, _)| v)
            .filter(|v| *v > 0.0)
            .ok_or_else(|| format!("bad frequency {x:?}"))
    };
    Ok((f(a)?, f(b)?))
}

/// A failure carrying its exit code and stderr message.
struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type Outcome = Result<i32, Failure>;

pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Design(a) => cmd_design(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Snap(a) => cmd_snap(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Tolerance(a) => cmd_tolerance(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_circuit(path: Option<&Path>) -> Result<CircuitSpec, Failure> {
    let Some(path) = path else {
        return Ok(CircuitSpec::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    CircuitSpec::from_config_str(&text)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

/// Writes via a temporary sibling and renames, so failures leave no partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_fail = |e: io::Error| fail(EXIT_INPUT, format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_fail)?;
    tmp.write_all(bytes).map_err(io_fail)?;
    tmp.persist(path).map_err(|e| io_fail(e.error))?;
    Ok(())
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| fail(EXIT_INPUT, format!("stdout: {e}")))
}

fn cmd_design(a: DesignArgs, out: &mut dyn Write) -> Outcome {
    let spec = load_circuit(a.circuit.as_deref())?;
    let report = compute_report(&spec).map_err(|e| fail(EXIT_COMPUTE, e.to_string()))?;
    let text = write_report(ReportRef::Design(&report), a.format);
    match a.out {
        Some(path) => write_atomic(&path, text.as_bytes())?,
        None => emit(out, &text)?,
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Outcome {
    if a.csv.is_none() && a.wav.is_none() {
        return Err(fail(EXIT_USAGE, "simulate needs --csv and/or --wav"));
    }
    let spec = load_circuit(a.circuit.as_deref())?;
    let scenario_text = fs::read_to_string(&a.scenario)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", a.scenario.display())))?;
    let scenario = parse_scenario(&scenario_text)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", a.scenario.display())))?;
    let config = SimConfig {
        sample_rate: a.sample_rate,
        retrigger: if a.one_shot {
            Retrigger::OneShot
        } else {
            Retrigger::LevelSensitive
        },
        modulation_model: match a.ideal_pair {
            Some((f_lo, f_hi)) => ModulationModel::IdealPair { f_lo, f_hi },
            None => ModulationModel::Thevenin,
        },
        ..SimConfig::default()
    };
    let trace = sim::run(&spec, &scenario, &config).map_err(|e| match e {
        SimError::Config(_) | SimError::Nyquist { .. } => fail(EXIT_USAGE, e.to_string()),
        SimError::Scenario(_) => fail(EXIT_INPUT, e.to_string()),
        SimError::Design(_) => fail(EXIT_COMPUTE, e.to_string()),
    })?;

    // Render everything before touching the filesystem.
    let wav = match &a.wav {
        Some(_) => Some(
            wav_bytes(&trace, WavParams::for_trace(&trace)).map_err(|e| match e {
                WavError::Io(_) => fail(EXIT_INPUT, e.to_string()),
                WavError::Encode(_) => fail(EXIT_COMPUTE, e.to_string()),
                _ => fail(EXIT_USAGE, e.to_string()),
            })?,
        ),
        None => None,
    };
    if let Some(path) = &a.csv {
        write_atomic(path, &csv_bytes(&trace))?;
    }
    if let (Some(path), Some(bytes)) = (&a.wav, wav) {
        write_atomic(path, &bytes)?;
    }
    let sounding = Quantity::new(trace.sounding_seconds, Unit::Second)
        .map(|q| format_significant(q, 6))
        .unwrap_or_else(|_| format!("{}s", trace.sounding_seconds));
    emit(
        out,
        &format!(
            "alarm_windows={} sounding={sounding}\n",
            trace.alarm_windows()
        ),
    )?;
    Ok(EXIT_OK)
}

fn cmd_snap(a: SnapArgs, out: &mut dyn Write) -> Outcome {
    let (value, _) = parse_magnitude(&a.value).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let snapped =
        snap_preferred(value, a.series, a.mode).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    emit(out, &format!("{value} -> {snapped}\n"))?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    if !(a.tolerance.is_finite() && a.tolerance >= 0.0) {
        return Err(fail(
            EXIT_USAGE,
            "tolerance must be a non-negative fraction",
        ));
    }
    let spec = load_circuit(a.circuit.as_deref())?;
    let report = compute_report(&spec).map_err(|e| fail(EXIT_COMPUTE, e.to_string()))?;
    let audit = verify_against_paper(&report, a.tolerance);
    emit(
        out,
        &write_report(ReportRef::Errata(&audit), ReportFormat::Text),
    )?;
    Ok(if audit.has_errata() {
        EXIT_ERRATA
    } else {
        EXIT_OK
    })
}

fn cmd_tolerance(a: ToleranceArgs, out: &mut dyn Write) -> Outcome {
    if a.runs == 0 {
        return Err(fail(EXIT_USAGE, "--runs must be at least 1"));
    }
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(fail(EXIT_USAGE, "--tol must lie in (0, 1)"));
    }
    let spec = load_circuit(a.circuit.as_deref())?;
    let r = monte_carlo_timeout(&spec, a.tol, a.runs, a.seed)
        .map_err(|e| fail(EXIT_COMPUTE, e.to_string()))?;
    let s = |v: f64| {
        Quantity::new(v, Unit::Second)
            .map(|q| format_significant(q, 6))
            .unwrap_or_else(|_| format!("{v}s"))
    };
    emit(
        out,
        &format!(
            "runs={} min={} mean={} max={} stddev={} contains_measured={}\n",
            r.runs,
            s(r.min),
            s(r.mean),
            s(r.max),
            s(r.stddev),
            r.contains(MEASURED_TIMEOUT)
        ),
    )?;
    Ok(EXIT_OK)
}
