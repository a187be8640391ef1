//! End-to-end acceptance run: one PASS/FAIL line per criterion, with the
//! measured quantities and wall time. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use ebmatch::checks::{glue_suite, oracle_suite, transport_suite};
use ebmatch::experiments::concentration::{run_concentration, ConcentrationParams};
use ebmatch::experiments::d2log::{run_d2log, D2LogParams};
use ebmatch::experiments::growth::{run_growth, GrowthParams, Layout};
use ebmatch::experiments::mixture::{run_mixture, BadRule, MixtureParams};
use ebmatch::experiments::scaling::{run_scaling, top_differences, ScalingOutcome, ScalingParams};
use ebmatch::experiments::subadditivity::{run_subadditivity, SubadditivityParams};
use ebmatch::experiments::{RunOptions, Verdict};
use ebmatch::records::{write_trials, TrialRecord};
use ebmatch::Result;
use ebmatch_core::solvers::SolverMode;
use ebmatch_core::ProblemKind;

const SEED: u64 = 1;

const OPTS: RunOptions = RunOptions { workers: 1, timing: false };

fn dyadic(lo: usize, rungs: u32) -> Vec<usize> {
    (0..rungs).map(|k| lo << k).collect()
}

fn oracles() -> Result<(bool, String)> {
    let r = oracle_suite(&[2, 3], &[1.0, 2.0], 200, SEED, 1)?;
    Ok((r.passed(), format!("{} cases, {} failures {:?}", r.cases, r.failures.len(), r.failures.first())))
}

fn transport() -> Result<(bool, String)> {
    let r = transport_suite(500, 50, SEED, 1)?;
    Ok((r.passed(), format!("{} cases, {} failures {:?}", r.cases, r.failures.len(), r.failures.first())))
}

fn scaling_run() -> Result<ScalingOutcome> {
    run_scaling(&ScalingParams::new(ProblemKind::Matching, 3, 1.0, dyadic(250, 5), 50, SEED), OPTS)
}

fn scaling_slope(run: &ScalingOutcome) -> (bool, String) {
    let s = &run.summary;
    let pass = s.slope_ci.is_some_and(|(lo, hi)| lo <= 2.0 / 3.0 && 2.0 / 3.0 <= hi);
    (pass, format!("slope {:?}, 99% CI {:?}, target 2/3", s.slope, s.slope_ci))
}

fn plane_log_correction() -> Result<(bool, String)> {
    let s = run_d2log(&D2LogParams { d: 2, n_grid: dyadic(512, 6), trials: 100, seed: SEED }, OPTS)?.summary;
    Ok((
        s.log_correction_supported == Some(true),
        format!("r1 trend {:?}, r2 top-half trend {:?}, r1 {:?}, r2 {:?}", s.r1_trend, s.r2_top_trend, s.r1, s.r2),
    ))
}

fn cauchy(run: &ScalingOutcome) -> (bool, String) {
    let diffs = top_differences(&run.summary.normalized_means, 3);
    let pass = diffs.len() == 2 && diffs[1] < diffs[0];
    (pass, format!("normalized means {:?}, top differences {diffs:?}", run.summary.normalized_means))
}

fn subadditivity() -> Result<(bool, String)> {
    let mut pass = true;
    let mut detail = Vec::new();
    for kind in [ProblemKind::Matching, ProblemKind::BipartiteTsp] {
        let params =
            SubadditivityParams { kind, d: 3, p: 1.0, side: 4.0, m: 2, eta: 0.2, trials: 100, seed: SEED, mode: SolverMode::Auto };
        let s = run_subadditivity(&params, OPTS)?.summary;
        pass &= s.all_bounds_hold && s.all_glued_feasible && s.skip_rate < 0.05;
        detail.push(format!(
            "{kind}: bounds {} feasible {} skip rate {} measured C {:.3} (bound {})",
            s.all_bounds_hold, s.all_glued_feasible, s.skip_rate, s.max_measured_constant, s.bound_constant
        ));
    }
    Ok((pass, detail.join("; ")))
}

fn growth() -> Result<(bool, String)> {
    let mut pass = true;
    let mut detail = Vec::new();
    for kind in [ProblemKind::BipartiteTsp, ProblemKind::KBoundedMst(3)] {
        for layout in [Layout::Uniform, Layout::Adversarial] {
            let params = GrowthParams { kind, d: 2, p: 1.0, n_grid: dyadic(100, 5), trials: 20, seed: SEED, layout };
            let s = run_growth(&params, OPTS)?.summary;
            pass &= s.stable;
            detail.push(format!(
                "{kind} {layout:?}: c {:.3} drift {:.3}, tour c {:.3} drift {:.3}",
                s.constant, s.drift, s.tour_constant, s.tour_drift
            ));
        }
    }
    Ok((pass, detail.join("; ")))
}

fn gluing() -> Result<(bool, String)> {
    let r = glue_suite(10_000, SEED, 1)?;
    Ok((r.passed(), format!("{} cases, {} failures {:?}", r.cases, r.failures.len(), r.failures.first())))
}

fn concentration() -> Result<(bool, String)> {
    let mut pass = true;
    let mut detail = Vec::new();
    for (d, p) in [(3, 1.0), (4, 2.0)] {
        let params = ConcentrationParams {
            kind: ProblemKind::Matching,
            d,
            p,
            n_grid: dyadic(250, 5),
            trials: 100,
            seed: SEED,
            mode: SolverMode::Auto,
        };
        let s = run_concentration(&params, OPTS)?.summary;
        pass &= s.verdict == Verdict::Pass;
        detail.push(format!(
            "d={d} p={p}: sd slope {:?} CI {:?} threshold {:.4} verdict {:?}",
            s.sd_slope, s.sd_slope_ci, s.threshold, s.verdict
        ));
    }
    Ok((pass, detail.join("; ")))
}

fn csv_bytes(records: &[TrialRecord]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_trials(&mut out, records)?;
    Ok(out)
}

/// CSV of every experiment kind under the given worker count.
fn all_experiments(workers: usize) -> Result<Vec<Vec<u8>>> {
    let opts = RunOptions { workers, timing: false };
    let mut scaling = ScalingParams::new(ProblemKind::ConnectedKFactor(3), 2, 1.5, vec![12, 24, 48], 6, SEED);
    scaling.mode = SolverMode::Heuristic;
    Ok(vec![
        csv_bytes(&run_scaling(&scaling, opts)?.records)?,
        csv_bytes(&run_d2log(&D2LogParams { d: 2, n_grid: vec![64, 128], trials: 6, seed: SEED }, opts)?.records)?,
        csv_bytes(
            &run_subadditivity(
                &SubadditivityParams {
                    kind: ProblemKind::BipartiteTsp,
                    d: 2,
                    p: 1.0,
                    side: 3.0,
                    m: 2,
                    eta: 0.2,
                    trials: 6,
                    seed: SEED,
                    mode: SolverMode::Auto,
                },
                opts,
            )?
            .records,
        )?,
        csv_bytes(
            &run_growth(
                &GrowthParams {
                    kind: ProblemKind::KBoundedMst(2),
                    d: 3,
                    p: 2.0,
                    n_grid: vec![20, 40],
                    trials: 6,
                    seed: SEED,
                    layout: Layout::Adversarial,
                },
                opts,
            )?
            .records,
        )?,
        csv_bytes(
            &run_concentration(
                &ConcentrationParams {
                    kind: ProblemKind::Matching,
                    d: 3,
                    p: 1.0,
                    n_grid: vec![20, 40],
                    trials: 100,
                    seed: SEED,
                    mode: SolverMode::Auto,
                },
                opts,
            )?
            .records,
        )?,
        csv_bytes(
            &run_mixture(
                &MixtureParams { d: 2, p: 1.0, n_grid: vec![50, 100], trials: 6, seed: SEED, rule: BadRule::Sqrt },
                opts,
            )?
            .records,
        )?,
    ])
}

fn determinism() -> Result<(bool, String)> {
    let one = all_experiments(1)?;
    let two = all_experiments(2)?;
    let four = all_experiments(4)?;
    let same = one.iter().zip(&two).zip(&four).filter(|((a, b), c)| a == b && a == c).count();
    Ok((same == one.len(), format!("{same}/{} experiments byte-identical across 1, 2 and 4 workers", one.len())))
}

fn report(index: usize, name: &str, start: Instant, outcome: Result<(bool, String)>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    println!("criterion {index:>2} {} {name} ({secs:.1} s): {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn main() -> ExitCode {
    let mut all = true;
    let t = Instant::now();
    all &= report(1, "oracle equivalence", t, oracles());
    let t = Instant::now();
    all &= report(2, "transport equals matching", t, transport());
    let t = Instant::now();
    let scaling = scaling_run();
    let scaling_secs = t.elapsed();
    let (slope, settle) = match &scaling {
        Ok(run) => (Ok(scaling_slope(run)), Ok(cauchy(run))),
        Err(e) => (Ok((false, format!("error: {e}"))), Ok((false, format!("error: {e}")))),
    };
    all &= report(3, "scaling slope for d = 3", t, slope);
    let t = Instant::now();
    all &= report(4, "logarithmic correction in the plane", t, plane_log_correction());
    // Shares the ladder of criterion 3; its time is that run's.
    all &= report(5, "normalized means settle", Instant::now() - scaling_secs, settle);
    let t = Instant::now();
    all &= report(6, "approximate subadditivity", t, subadditivity());
    let t = Instant::now();
    all &= report(7, "growth constant", t, growth());
    let t = Instant::now();
    all &= report(8, "gluing feasibility", t, gluing());
    let t = Instant::now();
    all &= report(9, "concentration", t, concentration());
    let t = Instant::now();
    all &= report(10, "determinism across workers", t, determinism());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
