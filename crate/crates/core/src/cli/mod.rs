//! `ptbound` command-line front end.
//!
//! Exit codes: 0 when every reported verdict holds, 1 when some verdict fails, 2 for
//! invalid input and 3 when a construction exceeds the dimension cap.

mod repro;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bell::{seesaw, BellBox, BellFunctional, BoundReport, SeesawConfig};
use crate::error::{Error, Result};
use crate::nlmeasure::{nonlocality_N, NlMode, NlResult};
use crate::qmat::{CMatrix, MatrixJson};
use crate::states::{hiding_state, max_entangled, ppt_pbit, private_bit, swap_x, HidingParams, StateFamilyResult};

#[derive(Debug, Parser)]
#[command(name = "ptbound", version, about = "Partial-transposition bounds on Bell-inequality violation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one of the closed-form bounds over a parameter grid.
    Repro { target: ReproTarget },
    /// Seesaw lower bound for a state and a Bell functional given as JSON files.
    Seesaw { state: PathBuf, functional: PathBuf },
    /// Relative entropy of nonlocality of a box given as JSON.
    Nonlocality {
        #[arg(value_name = "BOX")]
        box_file: PathBuf,
    },
    /// Write one of the built-in states as matrix JSON.
    MakeState {
        family: Family,
        /// Emit the separable companion instead of the state.
        #[arg(long)]
        candidate: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReproTarget {
    Eq8,
    Eq10,
    Prop1,
    Eq13,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Maximally entangled state of local dimension `--d`.
    PhiPlus,
    /// Private bit built on the normalized swap of dimension `--d`.
    SwapPbit,
    /// PPT private-bit mixture with shield dimension `--ds`.
    PptPbit,
    /// Recursive hiding state with `--m`, `--q`.
    Hiding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Uniform,
    Optimize,
}

#[derive(Debug, Args)]
pub struct Opts {
    /// Local dimensions (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub d: Option<Vec<usize>>,
    /// Shield dimensions (comma separated, perfect squares).
    #[arg(long, global = true, value_delimiter = ',')]
    pub ds: Option<Vec<usize>>,
    /// Recursion depth of the hiding state.
    #[arg(long, global = true, default_value_t = 1)]
    pub m: usize,
    /// Mixing weight of the hiding state, in (0, 1/2).
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Epsilon grid for the continuity bound (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long, global = true, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Slack allowed in every verdict.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Input-distribution mode for the nonlocality measure.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Optimize)]
    pub mode: ModeArg,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    pub out: OutFormat,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

/// Resolved configuration of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub d: Vec<usize>,
    pub ds: Vec<usize>,
    pub m: usize,
    pub q: f64,
    pub eps: Vec<f64>,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub mode: NlMode,
    pub out: OutFormat,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Fills per-command defaults for the grids that were not given.
    pub fn resolve(command: &Command, opts: &Opts) -> Result<Self> {
        let (name, default_d): (String, &[usize]) = match command {
            Command::Repro { target: ReproTarget::Eq13 } => ("repro eq13".into(), &[2, 4, 16]),
            Command::Repro { target } => (format!("repro {}", target_name(*target)), &[2, 3, 4]),
            Command::Seesaw { .. } => ("seesaw".into(), &[2]),
            Command::Nonlocality { .. } => ("nonlocality".into(), &[2]),
            Command::MakeState { .. } => ("make-state".into(), &[2]),
        };
        let cfg = Self {
            command: name,
            d: opts.d.clone().unwrap_or_else(|| default_d.to_vec()),
            ds: opts.ds.clone().unwrap_or_else(|| vec![4, 9]),
            m: opts.m,
            q: opts.q.unwrap_or(1.0 / 3.0),
            eps: opts.eps.clone().unwrap_or_else(|| vec![0.0, 0.05, 0.1, 0.25]),
            restarts: opts.restarts,
            seed: opts.seed,
            tol: opts.tol,
            mode: match opts.mode {
                ModeArg::Uniform => NlMode::Uniform,
                ModeArg::Optimize => NlMode::Optimize,
            },
            out: opts.out,
            output: opts.output.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Validation("--restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Validation(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

fn target_name(t: ReproTarget) -> &'static str {
    match t {
        ReproTarget::Eq8 => "eq8",
        ReproTarget::Eq10 => "eq10",
        ReproTarget::Prop1 => "prop1",
        ReproTarget::Eq13 => "eq13",
    }
}

/// Rendered output plus the overall verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub all_pass: bool,
}

pub fn run_repro(target: ReproTarget, cfg: &RunConfig) -> Result<Vec<BoundReport>> {
    match target {
        ReproTarget::Eq8 => repro::eq8(cfg),
        ReproTarget::Eq10 => repro::eq10(cfg),
        ReproTarget::Prop1 => repro::prop1(cfg),
        ReproTarget::Eq13 => repro::eq13(cfg),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeesawReport {
    pub value: f64,
    pub restarts: usize,
    pub seed: u64,
    pub best_restart: usize,
    pub iterations: usize,
    pub restart_values: Vec<f64>,
    pub alice: Vec<Vec<MatrixJson>>,
    pub bob: Vec<Vec<MatrixJson>>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn run_seesaw(state: &Path, functional: &Path, cfg: &RunConfig) -> Result<SeesawReport> {
    let rho = CMatrix::from_json_str(&read(state)?)?;
    let f = BellFunctional::from_json_str(&read(functional)?)?;
    let res = seesaw(&rho, &f, &SeesawConfig::new(cfg.restarts, cfg.seed))?;
    let to_json = |side: &[Vec<CMatrix>]| -> Vec<Vec<MatrixJson>> {
        side.iter().map(|p| p.iter().map(CMatrix::to_json).collect()).collect()
    };
    Ok(SeesawReport {
        value: res.value,
        restarts: cfg.restarts,
        seed: cfg.seed,
        best_restart: res.best_restart,
        iterations: res.iterations,
        restart_values: res.restart_values,
        alice: to_json(res.meas.alice()),
        bob: to_json(res.meas.bob()),
    })
}

pub fn run_nonlocality(box_file: &Path, cfg: &RunConfig) -> Result<NlResult> {
    let p = BellBox::from_json_str(&read(box_file)?)?;
    nonlocality_N(&p, cfg.mode)
}

fn make_state(family: Family, cfg: &RunConfig) -> Result<StateFamilyResult> {
    let first_d = *cfg.d.first().ok_or_else(|| Error::Validation("--d is empty".into()))?;
    match family {
        Family::PhiPlus => Ok(StateFamilyResult {
            rho: max_entangled(first_d)?,
            sigma_candidate: None,
            params: [("d".to_string(), first_d as f64)].into(),
            notes: "maximally entangled state".into(),
        }),
        Family::SwapPbit => Ok(StateFamilyResult {
            rho: private_bit(&swap_x(first_d)?)?,
            sigma_candidate: None,
            params: [("d".to_string(), first_d as f64)].into(),
            notes: "private bit of the normalized swap".into(),
        }),
        Family::PptPbit => ppt_pbit(*cfg.ds.first().ok_or_else(|| Error::Validation("--ds is empty".into()))?),
        Family::Hiding => hiding_state(HidingParams {
            m: cfg.m,
            q: cfg.q,
            ..HidingParams::default()
        }),
    }
}

#[derive(Serialize)]
struct ReproDoc<'a> {
    target: ReproTarget,
    config: &'a RunConfig,
    all_pass: bool,
    reports: &'a [BoundReport],
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Runs a parsed command and renders its output.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::resolve(&cli.command, &cli.opts)?;
    match &cli.command {
        Command::Repro { target } => {
            let reports = run_repro(*target, &cfg)?;
            let all_pass = reports.iter().all(|r| r.verdict);
            let text = match cfg.out {
                OutFormat::Json => json(&ReproDoc {
                    target: *target,
                    config: &cfg,
                    all_pass,
                    reports: &reports,
                })?,
                OutFormat::Csv => csv_text(
                    &BoundReport::CSV_HEADER,
                    &reports.iter().map(|r| r.csv_record().to_vec()).collect::<Vec<_>>(),
                )?,
            };
            Ok(Outcome { text, all_pass })
        }
        Command::Seesaw { state, functional } => {
            let rep = run_seesaw(state, functional, &cfg)?;
            let text = match cfg.out {
                OutFormat::Json => json(&rep)?,
                OutFormat::Csv => csv_text(
                    &["value", "restarts", "seed", "best_restart", "iterations"],
                    &[vec![
                        rep.value.to_string(),
                        rep.restarts.to_string(),
                        rep.seed.to_string(),
                        rep.best_restart.to_string(),
                        rep.iterations.to_string(),
                    ]],
                )?,
            };
            Ok(Outcome { text, all_pass: true })
        }
        Command::Nonlocality { box_file } => {
            let res = run_nonlocality(box_file, &cfg)?;
            let text = match cfg.out {
                OutFormat::Json => json(&res)?,
                OutFormat::Csv => csv_text(
                    &["value", "converged", "gap", "iterations"],
                    &[vec![
                        res.value.to_string(),
                        res.converged.to_string(),
                        res.gap.to_string(),
                        res.iterations.to_string(),
                    ]],
                )?,
            };
            Ok(Outcome {
                text,
                all_pass: res.converged,
            })
        }
        Command::MakeState { family, candidate } => {
            let fam = make_state(*family, &cfg)?;
            let m = if *candidate {
                fam.sigma_candidate
                    .ok_or_else(|| Error::Validation("this family has no separable companion".into()))?
            } else {
                fam.rho
            };
            Ok(Outcome {
                text: json(&m.to_json())?,
                all_pass: true,
            })
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DimensionCap { .. } => 3,
        _ => 2,
    }
}

/// Parses `args`, runs the command, writes the output and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("ptbound: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.opts.output {
        Some(path) => fs::write(path, &outcome.text),
        None => std::io::stdout().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("ptbound: {e}");
        return 2;
    }
    if outcome.all_pass {
        0
    } else {
        1
    }
}
