//! Command-line front end.
//!
//! Every simulation in the crate is reachable as a subcommand. Angles are read
//! in degrees and converted to radians here; nothing below this module sees
//! degrees. Exit codes: 0 on success, 1 for usage and I/O errors, 2 for
//! numerical or convergence failures.

pub mod afga_txt;
pub mod tables;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::asymptotics::{
    fit_decay_rate, integrate_continuum, saturation_analysis_degs, tail_decay_rate,
    verify_saturation, AsymptoticsError,
};
use crate::qubit::{grover_step_angle, run_afga_qubit, run_grover_qubit};
use crate::schedule::{build_schedule, degs_to_rads, AfgaParams, ScheduleError};
use crate::search::{run_afga_search, run_afga_search_from_angle, SearchError, SearchTrace};

pub use afga_txt::{emit_afga_txt, format_sci, parse_afga_txt, AfgaTable, ParseError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> Self {
        match e {
            ScheduleError::NoConvergence { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Schedule(inner) => inner.into(),
            SearchError::NotConverged { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AsymptoticsError> for CliError {
    fn from(e: AsymptoticsError) -> Self {
        use AsymptoticsError::*;
        match e {
            Schedule(inner) => inner.into(),
            StepRejected { .. } | NotMonotone { .. } | NoAlternation { .. } | FitWindow { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    AfgaTxt,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "afga", version, about = "Adaptive fixed-point Grover search")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase schedule table (afga.txt or CSV).
    Schedule(ScheduleArgs),
    /// Single-qubit ERR trace of the adaptive algorithm (CSV).
    Qubit(QubitArgs),
    /// Multi-qubit statevector search.
    Search(SearchArgs),
    /// Single-qubit ERR trace of the original Grover iteration (CSV).
    Grover(GroverArgs),
    /// Trapped amplitude when del_lam = 180 degrees.
    Saturation(SaturationArgs),
    /// Continuum-limit g(t) (CSV) and fitted tail decay rate.
    Continuum(ContinuumArgs),
    /// gamma_j and alpha_j for one gamma over several del_lam values (CSV).
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long, value_parser = parse_degrees)]
    pub gamma_degs: f64,
    #[arg(long, value_parser = parse_degrees)]
    pub del_lam_degs: f64,
    #[arg(long, default_value_t = 20)]
    pub num_steps: usize,
    #[arg(long, value_enum, default_value_t = Format::AfgaTxt)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QubitArgs {
    #[arg(long, value_parser = parse_degrees)]
    pub gamma_degs: f64,
    #[arg(long, value_parser = parse_degrees)]
    pub del_lam_degs: f64,
    #[arg(long, default_value_t = 20)]
    pub num_steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub nb: usize,
    #[arg(long, default_value_t = 0)]
    pub target_index: usize,
    #[arg(long, value_parser = parse_degrees)]
    pub del_lam_degs: f64,
    #[arg(long, default_value_t = crate::search::DEFAULT_TOL)]
    pub tol: f64,
    /// Step budget; defaults to ten times the single-qubit prediction.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Start angle; defaults to the uniform superposition.
    #[arg(long, value_parser = parse_degrees)]
    pub gamma_degs: Option<f64>,
    /// Write the per-step success probabilities here as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroverArgs {
    #[arg(long, value_parser = parse_degrees, required_unless_present = "nb", conflicts_with = "nb")]
    pub gamma_degs: Option<f64>,
    /// Derive gamma from 2^nb items: cos(gamma/2) = 2^(-nb/2).
    #[arg(long)]
    pub nb: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub num_steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SaturationArgs {
    /// Start angle in degrees, read as an exact decimal.
    #[arg(long, value_parser = parse_exact_degrees)]
    pub gamma_degs: Ratio<i64>,
    #[arg(long, default_value_t = 10)]
    pub n_tail: usize,
}

#[derive(Debug, Args)]
pub struct ContinuumArgs {
    #[arg(long, value_parser = parse_degrees)]
    pub gamma_degs: f64,
    #[arg(long, value_parser = parse_degrees)]
    pub del_lam_degs: f64,
    #[arg(long, default_value_t = 60.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = crate::asymptotics::DEFAULT_H)]
    pub h: f64,
    /// Emit every n-th sample.
    #[arg(long, default_value_t = 10)]
    pub every: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_degrees)]
    pub gamma_degs: f64,
    #[arg(long, value_parser = parse_degrees, value_delimiter = ',', default_value = "0,45,90,135,180")]
    pub del_lam_degs: Vec<f64>,
    #[arg(long, default_value_t = 40)]
    pub num_steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_degrees(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=180.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 180] degrees"))
    }
}

/// Reads a plain decimal such as `169.15` as the exact ratio `16915/100`.
pub fn parse_exact_degrees(s: &str) -> Result<Ratio<i64>, String> {
    let bad = || format!("`{s}` is not a plain decimal number of degrees");
    let s = s.trim();
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
        || frac_part.len() > 12
    {
        return Err(bad());
    }
    let denom = 10i64.pow(frac_part.len() as u32);
    let int: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad())?
    };
    let numer = int
        .checked_mul(denom)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    let value = Ratio::new(if neg { -numer } else { numer }, denom);
    if value < Ratio::from_integer(0) || value > Ratio::from_integer(180) {
        return Err(format!("{s} is outside [0, 180] degrees"));
    }
    Ok(value)
}

/// Integers print bare, terminating decimals print exactly, anything else as `f64`.
pub fn format_ratio(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    let den = *r.denom();
    if let Some(places) = (1..=12u32).find(|&p| 10i64.pow(p) % den == 0) {
        let scale = 10i64.pow(places);
        if let Some(scaled) = r.numer().checked_mul(scale / den) {
            let sign = if scaled < 0 { "-" } else { "" };
            let abs = scaled.abs();
            return format!(
                "{sign}{}.{:0width$}",
                abs / scale,
                abs % scale,
                width = places as usize
            );
        }
    }
    format!("{}", r.to_f64().unwrap_or(f64::NAN))
}

fn open_out(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn io_err(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    }
}

fn csv_err(path: Option<&Path>) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source: io::Error::other(e),
    }
}

/// Writes `body` to `path` if given, otherwise to `stdout`.
fn emit_to(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut f = open_out(p)?;
            body(&mut f)?;
            f.flush().map_err(io_err(Some(p)))
        }
        None => body(stdout),
    }
}

/// Runs one subcommand, writing results to `stdout` or the requested file.
pub fn run_cli(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &config.command {
        Command::Schedule(a) => {
            let params = AfgaParams::from_degrees(a.gamma_degs, a.del_lam_degs, a.num_steps)?;
            let rows = build_schedule(&params);
            let out = a.out.as_deref();
            emit_to(out, stdout, |w| match a.format {
                Format::AfgaTxt => w
                    .write_all(emit_afga_txt(&rows, &params).as_bytes())
                    .map_err(io_err(out)),
                Format::Csv => tables::write_schedule(w, &rows).map_err(csv_err(out)),
            })
        }
        Command::Qubit(a) => {
            let params = AfgaParams::from_degrees(a.gamma_degs, a.del_lam_degs, a.num_steps)?;
            let trace = run_afga_qubit(&params);
            let out = a.out.as_deref();
            emit_to(out, stdout, |w| {
                tables::write_err_trace(w, &trace).map_err(csv_err(out))
            })?;
            if out.is_some() {
                let last = trace.last().expect("trace has the initial sample");
                writeln!(stdout, "final_err = {:e}", last.err).map_err(io_err(None))?;
            }
            Ok(())
        }
        Command::Search(a) => run_search(a, stdout),
        Command::Grover(a) => {
            let gamma = match (a.gamma_degs, a.nb) {
                (Some(g), _) => degs_to_rads(g),
                (None, Some(nb)) => {
                    if !(1..=crate::search::MAX_QUBITS).contains(&nb) {
                        return Err(SearchError::QubitCount(nb).into());
                    }
                    2.0 * (2f64.powi(-(nb as i32))).sqrt().acos()
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "one of --gamma-degs or --nb is required".into(),
                    ))
                }
            };
            if gamma <= 0.0 {
                return Err(CliError::Usage(
                    "grover needs gamma in (0, 180] degrees".into(),
                ));
            }
            let trace = run_grover_qubit(gamma, a.num_steps);
            let out = a.out.as_deref();
            emit_to(out, stdout, |w| {
                tables::write_err_trace(w, &trace).map_err(csv_err(out))
            })?;
            if out.is_some() {
                writeln!(
                    stdout,
                    "del_gamma(degs) = {}",
                    grover_step_angle(gamma).to_degrees()
                )
                .map_err(io_err(None))?;
            }
            Ok(())
        }
        Command::Saturation(a) => {
            let rep = saturation_analysis_degs(a.gamma_degs)?;
            let gamma = a.gamma_degs.to_f64().unwrap_or(f64::NAN).to_radians();
            let deviation = verify_saturation(gamma, a.n_tail)?;
            let mut s = String::new();
            s += &format!("j_sat = {}\n", rep.j_sat);
            s += &format!("del_gamma(degs) = {}\n", format_ratio(&rep.del_gamma));
            s += &format!("gamma_jsat(degs) = {}\n", format_ratio(&rep.gamma_jsat));
            s += &format!("Gamma(degs) = {}\n", format_ratio(&rep.big_gamma));
            s += &format!("max_tail_deviation(rads) = {deviation:e}\n");
            stdout.write_all(s.as_bytes()).map_err(io_err(None))
        }
        Command::Continuum(a) => {
            let gamma = degs_to_rads(a.gamma_degs);
            let del_lam = degs_to_rads(a.del_lam_degs);
            let trace = integrate_continuum(gamma, del_lam, a.t_max, a.h)?;
            let out = a.out.as_deref();
            emit_to(out, stdout, |w| {
                tables::write_continuum(w, &trace, a.every).map_err(csv_err(out))
            })?;
            if out.is_some() {
                let mut s = format!("predicted_rate = {}\n", tail_decay_rate(del_lam));
                match fit_decay_rate(&trace, 1e-12, 0.01) {
                    Ok(rate) => s += &format!("fitted_rate = {rate}\n"),
                    Err(e) => s += &format!("fitted_rate = n/a ({e})\n"),
                }
                stdout.write_all(s.as_bytes()).map_err(io_err(None))?;
            }
            Ok(())
        }
        Command::Sweep(a) => {
            let blocks = a
                .del_lam_degs
                .iter()
                .map(|&dl| {
                    let p = AfgaParams::from_degrees(a.gamma_degs, dl, a.num_steps)?;
                    Ok((p.del_lam(), build_schedule(&p)))
                })
                .collect::<Result<Vec<_>, ScheduleError>>()?;
            let out = a.out.as_deref();
            emit_to(out, stdout, |w| {
                tables::write_sweep(w, &blocks).map_err(csv_err(out))
            })
        }
    }
}

fn run_search(a: &SearchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let del_lam = degs_to_rads(a.del_lam_degs);
    let trace: SearchTrace = match a.gamma_degs {
        Some(g) => run_afga_search_from_angle(
            a.nb,
            a.target_index,
            degs_to_rads(g),
            del_lam,
            a.max_steps,
            a.tol,
        )?,
        None => run_afga_search(a.nb, a.target_index, del_lam, a.max_steps, a.tol)?,
    };
    if let Some(p) = a.out.as_deref() {
        let mut f = open_out(p)?;
        tables::write_success(&mut f, &trace.success).map_err(csv_err(Some(p)))?;
        f.flush().map_err(io_err(Some(p)))?;
    }
    let mut s = String::new();
    s += &format!("nb = {}\n", a.nb);
    s += &format!("target_index = {}\n", a.target_index);
    s += &format!("gamma(degs) = {}\n", trace.final_state.gamma().to_degrees());
    s += &format!("steps = {}\n", trace.steps());
    s += &format!("success = {}\n", trace.final_success());
    stdout.write_all(s.as_bytes()).map_err(io_err(None))
}
