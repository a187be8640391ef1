use ebmatch::experiments::concentration::{run_concentration, tail_moments, ConcentrationParams};
use ebmatch::experiments::d2log::{run_d2log, D2LogParams};
use ebmatch::experiments::growth::{run_growth, GrowthParams, Layout};
use ebmatch::experiments::mixture::{run_mixture, BadRule, MixtureParams};
use ebmatch::experiments::scaling::{run_scaling, top_differences, ScalingParams};
use ebmatch::experiments::subadditivity::{run_subadditivity, SubadditivityParams};
use ebmatch::experiments::{RunOptions, Verdict};
use ebmatch::Error;
use ebmatch_core::solvers::SolverMode;
use ebmatch_core::ProblemKind;

fn opts(workers: usize) -> RunOptions {
    RunOptions { workers, timing: false }
}

#[test]
fn one_dimensional_matching_grows_like_sqrt_n() {
    let params = ScalingParams::new(ProblemKind::Matching, 1, 1.0, vec![64, 256, 1024, 4096], 40, 11);
    let out = run_scaling(&params, opts(1)).unwrap();
    let slope = out.summary.slope.unwrap();
    assert!((slope - 0.5).abs() < 0.1, "slope {slope}");
    assert_eq!(out.records.len(), 160);
    assert_eq!(out.summary.label, "estimate");
    assert!(out.summary.outside_limit_range);
}

#[test]
fn single_rung_has_no_slope() {
    let params = ScalingParams::new(ProblemKind::Matching, 2, 1.0, vec![50], 5, 3);
    let out = run_scaling(&params, opts(2)).unwrap();
    assert!(out.summary.slope.is_none() && out.summary.slope_ci.is_none());
    assert!(!out.summary.se_reliable);
    assert_eq!(out.summary.rungs.len(), 1);
}

#[test]
fn heuristic_ladders_are_labelled_upper_bounds() {
    let params = ScalingParams::new(ProblemKind::BipartiteTsp, 2, 1.0, vec![20, 40], 3, 5);
    let out = run_scaling(&params, opts(1)).unwrap();
    assert_eq!(out.summary.label, "upper-bound estimate");
    assert!(out.records.iter().all(|r| r.method.starts_with("heuristic")));
}

#[test]
fn exact_request_over_the_cap_fails_before_running() {
    let mut params = ScalingParams::new(ProblemKind::BipartiteTsp, 2, 1.0, vec![5, 10], 3, 5);
    params.mode = SolverMode::Exact;
    match run_scaling(&params, opts(1)) {
        Err(e @ Error::Core(ebmatch_core::Error::SizeCap { .. })) => assert_eq!(e.exit_code(), 3),
        other => panic!("expected a size cap error, got {other:?}"),
    }
}

#[test]
fn invalid_parameters_name_their_key() {
    let bad_p = ScalingParams::new(ProblemKind::Matching, 2, 0.5, vec![10], 3, 1);
    assert!(matches!(run_scaling(&bad_p, opts(1)), Err(Error::Usage { key, .. }) if key == "p"));
    let bad_grid = ScalingParams::new(ProblemKind::Matching, 2, 1.0, vec![20, 10], 3, 1);
    assert!(matches!(run_scaling(&bad_grid, opts(1)), Err(Error::Usage { key, .. }) if key == "n-list"));
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let params = ScalingParams::new(ProblemKind::KBoundedMst(2), 2, 1.0, vec![10, 30], 6, 99);
    let a = run_scaling(&params, opts(1)).unwrap();
    let b = run_scaling(&params, opts(3)).unwrap();
    assert_eq!(a.records, b.records);
}

#[test]
fn top_differences_use_the_upper_rungs() {
    assert_eq!(top_differences(&[5.0, 1.0, 2.0, 2.5], 3), vec![1.0, 0.5]);
    assert_eq!(top_differences(&[1.0], 3), Vec::<f64>::new());
}

#[test]
fn d2log_reports_trends_and_undefined_sentinels() {
    let params = D2LogParams { d: 2, n_grid: vec![64, 128, 256, 512], trials: 10, seed: 4 };
    let out = run_d2log(&params, opts(1)).unwrap();
    let s = &out.summary;
    assert_eq!(s.r1.len(), 4);
    for ((r1, r2), n) in s.r1.iter().zip(&s.r2).zip(&s.n) {
        assert!((r1 / r2 - (*n as f64).ln().sqrt()).abs() < 1e-12);
    }
    assert!(s.r1_trend.is_some());
    let single = D2LogParams { d: 2, n_grid: vec![64], trials: 2, seed: 4 };
    let out = run_d2log(&single, opts(1)).unwrap();
    assert!(out.summary.r1_trend.is_none() && out.summary.log_correction_supported.is_none());
}

#[test]
fn concentration_needs_enough_trials() {
    let params =
        ConcentrationParams { kind: ProblemKind::Matching, d: 3, p: 1.0, n_grid: vec![20], trials: 10, seed: 1, mode: SolverMode::Auto };
    assert!(matches!(run_concentration(&params, opts(1)), Err(Error::Usage { key, .. }) if key == "trials"));
}

#[test]
fn concentration_of_small_matchings() {
    let params = ConcentrationParams {
        kind: ProblemKind::Matching,
        d: 3,
        p: 1.0,
        n_grid: vec![50, 200],
        trials: 100,
        seed: 8,
        mode: SolverMode::Auto,
    };
    let out = run_concentration(&params, opts(1)).unwrap();
    let s = &out.summary;
    assert!((s.threshold - (-(1.0 - 2.0 / 3.0) / 2.0 + 0.1)).abs() < 1e-15);
    assert!(s.sd.iter().all(|v| *v > 0.0));
    assert_ne!(s.verdict, Verdict::Undefined);
}

#[test]
fn count_moments_stay_bounded() {
    let m = tail_moments(&[10, 40, 160, 640], 20_000, 3, 1).unwrap();
    assert!(m.bounded, "{:?}", m.spread);
    let poisson_var = m.rows.iter().find(|r| r.law == "poisson" && r.q == 2 && r.h == 640).unwrap();
    assert!((poisson_var.ratio - 1.0).abs() < 0.05);
}

#[test]
fn identical_families_cost_at_most_one_tour() {
    // With x = y the matching term vanishes, so the tour ratio is at most one.
    use ebmatch_core::sampling::{iid_sample, Density, SeedStream};
    use ebmatch_core::solvers::{solve_heuristic, solve_mono_tsp, TourMode};
    use ebmatch_core::BipartiteInstance;
    let mut rng = SeedStream::new(21).rng(0);
    let x = iid_sample(&Density::uniform_cube(2), 200, &mut rng);
    let tour = solve_mono_tsp(&x, 1.0, TourMode::Heuristic).unwrap().cost;
    let inst = BipartiteInstance::new(x.clone(), x, 1.0, ProblemKind::BipartiteTsp).unwrap();
    let cost = solve_heuristic(&inst).unwrap().cost();
    assert!(cost <= tour * (1.0 + 1e-12), "{cost} > {tour}");
}

#[test]
fn growth_constants_are_reported_for_both_layouts() {
    let params = GrowthParams {
        kind: ProblemKind::BipartiteTsp,
        d: 2,
        p: 1.0,
        n_grid: vec![50, 100],
        trials: 4,
        seed: 2,
        layout: Layout::Uniform,
    };
    let out = run_growth(&params, opts(2)).unwrap();
    assert!(out.summary.tour_constant.is_finite() && out.summary.constant > 0.0);
    assert_eq!(out.records.len(), 8);
    for layout in [Layout::Uniform, Layout::Adversarial] {
        let p = GrowthParams { layout, kind: ProblemKind::KBoundedMst(2), ..params.clone() };
        let s = run_growth(&p, opts(1)).unwrap().summary;
        assert!(s.drift.is_finite() && s.tour_drift.is_finite());
    }
}

#[test]
fn mixture_ratios_and_rules() {
    let params = MixtureParams { d: 2, p: 1.0, n_grid: vec![100, 400], trials: 10, seed: 6, rule: BadRule::Zero };
    let out = run_mixture(&params, opts(1)).unwrap();
    assert!(out.summary.rungs.iter().all(|r| r.ratio == 1.0));
    let sqrt = MixtureParams { rule: BadRule::Sqrt, ..params.clone() };
    let out = run_mixture(&sqrt, opts(1)).unwrap();
    assert_eq!(out.summary.rungs[0].h, 10);
    assert!(out.summary.max_ratio >= 1.0);
    let too_many = MixtureParams { rule: BadRule::Fixed(101), ..params };
    assert!(matches!(run_mixture(&too_many, opts(1)), Err(Error::Usage { key, .. }) if key == "h-rule"));
}

fn defect_params(kind: ProblemKind) -> SubadditivityParams {
    SubadditivityParams { kind, d: 2, p: 1.0, side: 4.0, m: 2, eta: 0.2, trials: 6, seed: 17, mode: SolverMode::Auto }
}

#[test]
fn glued_solutions_are_feasible_and_within_the_bound() {
    for kind in [ProblemKind::Matching, ProblemKind::BipartiteTsp, ProblemKind::KFactor(2), ProblemKind::KBoundedMst(3)] {
        let out = run_subadditivity(&defect_params(kind), opts(1)).unwrap();
        let s = &out.summary;
        assert_eq!(s.skipped, 0, "{kind}");
        assert!(s.all_glued_feasible, "{kind}");
        assert!(s.all_bounds_hold, "{kind}: {:?}", out.rows);
        for r in &out.rows {
            assert!(r.lhs <= r.glued_cost + 1e-9);
        }
    }
}

#[test]
fn one_cell_has_no_defect() {
    let params = SubadditivityParams { m: 1, ..defect_params(ProblemKind::Matching) };
    let out = run_subadditivity(&params, opts(1)).unwrap();
    assert!(out.rows.iter().all(|r| r.defect == 0.0 && !r.skipped));
}

#[test]
fn tiny_reservoirs_are_skipped() {
    let params = SubadditivityParams { side: 1.0, m: 3, eta: 0.05, ..defect_params(ProblemKind::Matching) };
    let out = run_subadditivity(&params, opts(1)).unwrap();
    assert!(out.summary.skip_rate > 0.5);
}
