//! Command-line front end: argument parsing, dispatch and output files.
//!
//! Every experiment writes `trials.csv` (one row per solved instance),
//! `summary.jsonl` (one line per rung or trial) and `report.json` (the overall
//! summary) into the output directory, and prints the report.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ebmatch_core::solvers::solve;
use ebmatch_core::BipartiteInstance;
use serde::Serialize;
use serde_json::json;

use crate::checks::{glue_suite, oracle_suite, transport_suite, CheckReport};
use crate::config::{Command, RunConfig, SEED_ENV};
use crate::error::{exit, usage, Error, Result};
use crate::experiments::concentration::{run_concentration, tail_moments, ConcentrationParams};
use crate::experiments::d2log::{run_d2log, D2LogParams};
use crate::experiments::growth::{run_growth, GrowthParams};
use crate::experiments::mixture::{run_mixture, BadRule, MixtureParams};
use crate::experiments::scaling::{run_scaling, ScalingParams};
use crate::experiments::subadditivity::{run_subadditivity, SubadditivityParams};
use crate::experiments::{RunOptions, Verdict};
use crate::io::{read_points, write_solution};
use crate::records::{write_json_lines, write_trials, TrialRecord};

/// Means of the count laws in the moment check.
pub const MOMENT_MEANS: [u64; 5] = [10, 40, 160, 640, 2560];
pub const MOMENT_SAMPLES: usize = 20_000;

#[derive(Debug, Parser)]
#[command(name = "ebmatch", version, about = "Random Euclidean bipartite optimisation experiments")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Mean cost along a ladder of sizes, with log-log slope and bootstrap interval.
    RunScaling(Flags),
    /// Planar matching with and without the logarithmic correction.
    RunD2log(Flags),
    /// Defect of the cell decomposition and gluing on a Poisson sample.
    RunSubadditivity(Flags),
    /// Growth constants against matching plus n^(1-p/d) or a single-family tour.
    RunGrowth(Flags),
    /// Decay of the spread of the normalized cost, plus count moment checks.
    RunConcentration(Flags),
    /// Matching with bad points at opposite corners.
    RunMixture(Flags),
    /// Solves one instance read from two point files.
    SolveOne(Flags),
    /// Exact solvers against brute force, gluing and transport self-checks.
    VerifyOracles(Flags),
}

/// Flags shared by all commands; each may also be set in the `--config` file.
#[derive(Debug, Args)]
struct Flags {
    /// matching, tsp, kfactor:K, connected-kfactor:K or kmst:K
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated sizes, e.g. 250,500,1000
    #[arg(long = "n-list")]
    n_list: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Master seed; defaults to $EB_SEED, then 0
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// uniform or holder:<file>
    #[arg(long)]
    density: Option<String>,
    /// cube:<L> or polycube:<file>
    #[arg(long)]
    domain: Option<String>,
    /// auto, exact, heuristic or brute
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// Record solve times in the trial CSV
    #[arg(long)]
    timing: bool,
    /// Subcube side for run-subadditivity
    #[arg(long, alias = "L")]
    side: Option<String>,
    /// Subcubes per axis for run-subadditivity
    #[arg(long)]
    m: Option<String>,
    /// Thinning probability for run-subadditivity
    #[arg(long)]
    eta: Option<String>,
    /// zero, sqrt, full or a count, for run-mixture
    #[arg(long = "h-rule")]
    h_rule: Option<String>,
    /// uniform or adversarial, for run-growth
    #[arg(long)]
    layout: Option<String>,
    /// Side-1 points for solve-one
    #[arg(long)]
    x: Option<String>,
    /// Side-2 points for solve-one
    #[arg(long)]
    y: Option<String>,
    /// Flat key = value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn into_values(self) -> (BTreeMap<String, String>, Option<PathBuf>) {
        let mut v = BTreeMap::new();
        let pairs = [
            ("problem", self.problem),
            ("d", self.d),
            ("p", self.p),
            ("n-list", self.n_list),
            ("trials", self.trials),
            ("seed", self.seed),
            ("workers", self.workers),
            ("density", self.density),
            ("domain", self.domain),
            ("solver", self.solver),
            ("output", self.output),
            ("side", self.side),
            ("m", self.m),
            ("eta", self.eta),
            ("h-rule", self.h_rule),
            ("layout", self.layout),
            ("x", self.x),
            ("y", self.y),
        ];
        for (key, value) in pairs {
            if let Some(value) = value {
                v.insert(key.to_string(), value);
            }
        }
        if self.timing {
            v.insert("timing".into(), "true".into());
        }
        (v, self.config)
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let (command, flags) = match cli.command {
        CliCommand::RunScaling(f) => (Command::RunScaling, f),
        CliCommand::RunD2log(f) => (Command::RunD2log, f),
        CliCommand::RunSubadditivity(f) => (Command::RunSubadditivity, f),
        CliCommand::RunGrowth(f) => (Command::RunGrowth, f),
        CliCommand::RunConcentration(f) => (Command::RunConcentration, f),
        CliCommand::RunMixture(f) => (Command::RunMixture, f),
        CliCommand::SolveOne(f) => (Command::SolveOne, f),
        CliCommand::VerifyOracles(f) => (Command::VerifyOracles, f),
    };
    let (values, config_file) = flags.into_values();
    let result = RunConfig::resolve(command, values, config_file.as_deref(), std::env::var(SEED_ENV).ok())
        .and_then(|cfg| dispatch(&cfg, out));
    match result {
        Ok(true) => exit::SUCCESS,
        Ok(false) => {
            let _ = writeln!(err, "check failed");
            exit::CHECK_FAILED
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::Core(ebmatch_core::Error::SizeCap { .. }) = e {
                let _ = writeln!(err, "hint: use --solver auto or --solver heuristic, or reduce --n-list");
            }
            e.exit_code()
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes the three output files of an experiment.
fn write_outputs<L: Serialize, R: Serialize>(dir: &Path, records: &[TrialRecord], lines: &[L], report: &R) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut trials = create(&dir.join("trials.csv"))?;
    write_trials(&mut trials, records)?;
    trials.flush()?;
    let mut summary = create(&dir.join("summary.jsonl"))?;
    write_json_lines(&mut summary, lines)?;
    summary.flush()?;
    let mut full = create(&dir.join("report.json"))?;
    serde_json::to_writer_pretty(&mut full, report)?;
    full.write_all(b"\n")?;
    full.flush()?;
    Ok(())
}

fn print_report<R: Serialize>(out: &mut dyn Write, report: &R) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)?;
    Ok(())
}

fn print_check(out: &mut dyn Write, report: &CheckReport) -> Result<()> {
    let status = if report.passed() { "ok" } else { "FAILED" };
    writeln!(out, "{}: {} cases, {} failures: {status}", report.name, report.cases, report.failures.len())?;
    for f in report.failures.iter().take(10) {
        writeln!(out, "  {f}")?;
    }
    Ok(())
}

/// Runs a validated configuration; `Ok(false)` when the command's check fails.
pub fn dispatch(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let opts = RunOptions { workers: cfg.workers, timing: cfg.timing };
    match cfg.command {
        Command::RunScaling => {
            let params = ScalingParams {
                kind: cfg.problem,
                d: cfg.d,
                p: cfg.p,
                density: cfg.density.clone(),
                n_grid: cfg.n_grid.clone(),
                trials: cfg.trials,
                seed: cfg.seed,
                mode: cfg.solver,
            };
            let o = run_scaling(&params, opts)?;
            write_outputs(&cfg.output, &o.records, &o.summary.rungs, &o.summary)?;
            print_report(out, &o.summary)?;
            Ok(true)
        }
        Command::RunD2log => {
            let params = D2LogParams { d: cfg.d, n_grid: cfg.n_grid.clone(), trials: cfg.trials, seed: cfg.seed };
            let o = run_d2log(&params, opts)?;
            let s = &o.summary;
            let lines: Vec<_> = (0..s.n.len()).map(|i| json!({"n": s.n[i], "mean": s.mean_cost[i], "r1": s.r1[i], "r2": s.r2[i]})).collect();
            write_outputs(&cfg.output, &o.records, &lines, s)?;
            print_report(out, s)?;
            Ok(cfg.d != 2 || s.log_correction_supported != Some(false))
        }
        Command::RunSubadditivity => {
            let params = SubadditivityParams {
                kind: cfg.problem,
                d: cfg.d,
                p: cfg.p,
                side: cfg.side,
                m: cfg.m,
                eta: cfg.eta,
                trials: cfg.trials,
                seed: cfg.seed,
                mode: cfg.solver,
            };
            let o = run_subadditivity(&params, opts)?;
            write_outputs(&cfg.output, &o.records, &o.rows, &o.summary)?;
            print_report(out, &o.summary)?;
            Ok(o.summary.all_glued_feasible && o.summary.all_bounds_hold)
        }
        Command::RunGrowth => {
            let params = GrowthParams {
                kind: cfg.problem,
                d: cfg.d,
                p: cfg.p,
                n_grid: cfg.n_grid.clone(),
                trials: cfg.trials,
                seed: cfg.seed,
                layout: cfg.layout,
            };
            let o = run_growth(&params, opts)?;
            write_outputs(&cfg.output, &o.records, &o.summary.rungs, &o.summary)?;
            print_report(out, &o.summary)?;
            Ok(o.summary.stable)
        }
        Command::RunConcentration => {
            let params = ConcentrationParams {
                kind: cfg.problem,
                d: cfg.d,
                p: cfg.p,
                n_grid: cfg.n_grid.clone(),
                trials: cfg.trials,
                seed: cfg.seed,
                mode: cfg.solver,
            };
            let o = run_concentration(&params, opts)?;
            let moments = tail_moments(&MOMENT_MEANS, MOMENT_SAMPLES, cfg.seed, cfg.workers)?;
            let s = &o.summary;
            let lines: Vec<_> = s.n.iter().zip(&s.sd).map(|(n, sd)| json!({"n": n, "sd": sd})).collect();
            let report = json!({"spread": s, "moments": moments});
            write_outputs(&cfg.output, &o.records, &lines, &report)?;
            print_report(out, &report)?;
            Ok(s.verdict != Verdict::Fail && moments.bounded)
        }
        Command::RunMixture => {
            let params =
                MixtureParams { d: cfg.d, p: cfg.p, n_grid: cfg.n_grid.clone(), trials: cfg.trials, seed: cfg.seed, rule: cfg.h_rule };
            let o = run_mixture(&params, opts)?;
            write_outputs(&cfg.output, &o.records, &o.summary.rungs, &o.summary)?;
            print_report(out, &o.summary)?;
            Ok(cfg.h_rule != BadRule::Sqrt || o.summary.within_limit)
        }
        Command::SolveOne => {
            let x_path = cfg.x.as_ref().ok_or_else(|| usage("x", "solve-one needs --x <file>"))?;
            let y_path = cfg.y.as_ref().ok_or_else(|| usage("y", "solve-one needs --y <file>"))?;
            let x = read_points(x_path, "x")?;
            let y = read_points(y_path, "y")?;
            if x.dim() != y.dim() {
                return Err(usage("y", format!("points have dimension {}, expected {}", y.dim(), x.dim())));
            }
            let inst = BipartiteInstance::new(x, y, cfg.p, cfg.problem)?;
            let report = solve(&inst, cfg.solver)?;
            writeln!(out, "cost {}", report.cost())?;
            writeln!(out, "method {}", report.method)?;
            write_solution(&mut *out, cfg.problem, cfg.p, &report.solution)?;
            Ok(true)
        }
        Command::VerifyOracles => {
            let reports = [
                oracle_suite(&[2, 3], &[1.0, 2.0], 200, cfg.seed, cfg.workers)?,
                transport_suite(500, 50, cfg.seed, cfg.workers)?,
                glue_suite(1000, cfg.seed, cfg.workers)?,
            ];
            for r in &reports {
                print_check(out, r)?;
            }
            Ok(reports.iter().all(CheckReport::passed))
        }
    }
}
