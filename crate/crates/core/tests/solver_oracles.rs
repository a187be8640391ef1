use ebmatch_core::combinatorial::{is_feasible, BipartiteInstance, ProblemKind};
use ebmatch_core::geometry::PointSet;
use ebmatch_core::solvers::{
    brute_force, optimal_assignment, prefers_exact, solve, solve_bipartite_tsp_exact, solve_exact, solve_heuristic, solve_matching_exact, solve_mono_tsp, within_exact_caps,
    Method, Optimality, SolverMode, TourMode,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    PointSet::from_flat(d, (0..n * d).map(|_| rng.random::<f64>()).collect()).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

const KINDS: [ProblemKind; 7] = [
    ProblemKind::Matching,
    ProblemKind::BipartiteTsp,
    ProblemKind::KFactor(1),
    ProblemKind::KFactor(2),
    ProblemKind::ConnectedKFactor(2),
    ProblemKind::ConnectedKFactor(3),
    ProblemKind::KBoundedMst(2),
];

fn pts(rows: &[[f64; 2]]) -> PointSet {
    PointSet::from_rows(2, rows).unwrap()
}

/// Exact and brute force agree on square and rectangular instances of every
/// kind, 200 seeds per (d, p).
#[test]
fn exact_agrees_with_brute_force() {
    for kind in KINDS.iter().copied().chain([ProblemKind::KBoundedMst(3), ProblemKind::KFactor(3)]) {
        for d in [2, 3] {
            for p in [1.0, 2.0] {
                for seed in 0..200u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed * 1000 + d as u64 * 10 + p as u64);
                    let cap = if kind == ProblemKind::Matching { 8 } else { 5 };
                    let n = rng.random_range(1..=cap);
                    let m = if seed % 4 == 0 { rng.random_range(1..=cap) } else { n };
                    let inst = BipartiteInstance::new(cloud(&mut rng, n, d), cloud(&mut rng, m, d), p, kind).unwrap();
                    let exact = solve_exact(&inst).unwrap();
                    let brute = brute_force(&inst).unwrap();
                    assert!(
                        rel_close(exact.cost(), brute.cost(), 1e-9),
                        "{kind} d={d} p={p} seed={seed} n={n} m={m}: exact {} brute {}",
                        exact.cost(),
                        brute.cost()
                    );
                    assert!(is_feasible(&inst, &exact.solution), "{kind} n={n} m={m}");
                    assert!(is_feasible(&inst, &brute.solution));
                    assert_eq!(exact.optimality, Optimality::Proven);
                    assert_eq!(brute.method, Method::Brute);
                }
            }
        }
    }
}

#[test]
fn heuristic_is_feasible_and_never_beats_exact() {
    for kind in KINDS {
        for seed in 0..60u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(1..=6);
            let m = if seed % 3 == 0 { rng.random_range(1..=7) } else { n };
            let inst = BipartiteInstance::new(cloud(&mut rng, n, 2), cloud(&mut rng, m, 2), 1.5, kind).unwrap();
            let heur = solve_heuristic(&inst).unwrap();
            let exact = solve_exact(&inst).unwrap();
            assert!(is_feasible(&inst, &heur.solution), "{kind} seed={seed} n={n} m={m}");
            assert!(heur.cost() >= exact.cost() * (1.0 - 1e-12), "{kind} seed={seed}");
        }
    }
}

#[test]
fn heuristic_is_feasible_on_larger_instances() {
    for kind in KINDS.iter().copied().chain([ProblemKind::KBoundedMst(3), ProblemKind::ConnectedKFactor(4)]) {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let inst = BipartiteInstance::new(cloud(&mut rng, 300, 2), cloud(&mut rng, 300, 2), 1.0, kind).unwrap();
        let heur = solve_heuristic(&inst).unwrap();
        assert!(is_feasible(&inst, &heur.solution), "{kind}");
        assert!(heur.cost().is_finite() && heur.cost() > 0.0);
        let rect = BipartiteInstance::new(cloud(&mut rng, 200, 3), cloud(&mut rng, 260, 3), 2.0, kind).unwrap();
        assert!(is_feasible(&rect, &solve_heuristic(&rect).unwrap().solution), "{kind}");
    }
}

#[test]
fn relocation_improves_on_the_plain_construction() {
    // Bipartite tours from the heuristic are never worse than the raw
    // construction from the same tour and matching.
    use ebmatch_core::combinatorial::tour_factor_construct;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst =
            BipartiteInstance::new(cloud(&mut rng, 200, 2), cloud(&mut rng, 200, 2), 1.0, ProblemKind::BipartiteTsp).unwrap();
        let sigma = solve_mono_tsp(&inst.x, 1.0, TourMode::Heuristic).unwrap().order;
        let rho = solve_matching_exact(&inst.x, &inst.y, 1.0).unwrap().solution;
        let mut perm = vec![0; 200];
        for &(i, j) in &rho.edges {
            perm[i] = j;
        }
        let plain = tour_factor_construct(&inst, &sigma, &perm, 2).unwrap();
        let heur = solve_heuristic(&inst).unwrap();
        assert!(heur.cost() <= plain.cost * (1.0 + 1e-12));
    }
}

#[test]
fn matching_examples() {
    let r = solve_matching_exact(&pts(&[[0.0, 0.0]]), &pts(&[[1.0, 0.0]]), 2.0).unwrap();
    assert_eq!(r.cost(), 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = cloud(&mut rng, 6, 2);
    let mut order: Vec<usize> = (0..6).collect();
    order.shuffle(&mut rng);
    for p in [1.0, 1.5, 3.0] {
        assert_eq!(solve_matching_exact(&x, &x.subset(&order), p).unwrap().cost(), 0.0);
    }
    let empty = solve_matching_exact(&PointSet::new(2), &x, 1.0).unwrap();
    assert_eq!(empty.cost(), 0.0);
    assert!(empty.solution.edges.is_empty());
}

#[test]
fn matching_seven_by_seven_equals_permutation_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (x, y) = (cloud(&mut rng, 7, 2), cloud(&mut rng, 7, 2));
    let mut best = f64::INFINITY;
    let mut perm: Vec<usize> = (0..7).collect();
    // Every permutation in lexicographic order.
    loop {
        best = best.min((0..7).map(|i| x.dist_pow(i, &y, perm[i], 1.5)).sum());
        let Some(k) = (0..6).rev().find(|&k| perm[k] < perm[k + 1]) else { break };
        let l = (k + 1..7).rev().find(|&l| perm[l] > perm[k]).unwrap();
        perm.swap(k, l);
        perm[k + 1..].reverse();
    }
    let got = solve_matching_exact(&x, &y, 1.5).unwrap().cost();
    assert!(rel_close(got, best, 1e-12), "{got} vs {best}");
}

#[test]
fn tsp_examples() {
    let x = pts(&[[0.0, 0.0], [1.0, 0.0]]);
    let y = pts(&[[0.0, 1.0], [1.0, 1.0]]);
    let r = solve_bipartite_tsp_exact(&x, &y, 1.0).unwrap();
    assert!(rel_close(r.cost(), 2.0 + 2.0 * 2f64.sqrt(), 1e-15), "{}", r.cost());
    // Unit-square corners with sides alternating around the square.
    let x = pts(&[[0.0, 0.0], [1.0, 1.0]]);
    let y = pts(&[[1.0, 0.0], [0.0, 1.0]]);
    let r = solve_bipartite_tsp_exact(&x, &y, 2.0).unwrap();
    assert_eq!(r.cost(), 4.0);
    assert_eq!(r.solution.edges, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    // Coincident points.
    let c = pts(&[[0.3, 0.3]; 4]);
    assert_eq!(solve_bipartite_tsp_exact(&c, &c, 1.0).unwrap().cost(), 0.0);
    // Equilateral layout, n = 3.
    let h = 3f64.sqrt() / 2.0;
    let x = pts(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]);
    let y = pts(&[[0.5, -0.2], [0.9, 0.6], [0.1, 0.6]]);
    let inst = BipartiteInstance::new(x.clone(), y.clone(), 1.0, ProblemKind::BipartiteTsp).unwrap();
    let exact = solve_bipartite_tsp_exact(&x, &y, 1.0).unwrap();
    assert!(rel_close(exact.cost(), brute_force(&inst).unwrap().cost(), 1e-12));
    // Size cap.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let big = cloud(&mut rng, 10, 2);
    assert!(matches!(solve_bipartite_tsp_exact(&big, &big, 1.0), Err(ebmatch_core::Error::SizeCap { .. })));
}

#[test]
fn mono_tour_examples() {
    let sq = pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    assert_eq!(solve_mono_tsp(&sq, 1.0, TourMode::Exact).unwrap().cost, 4.0);
    let line = PointSet::from_flat(1, vec![0.5, 3.0, -1.0, 2.0, 0.0, 1.5]).unwrap();
    let t = solve_mono_tsp(&line, 1.0, TourMode::Exact).unwrap();
    assert!(rel_close(t.cost, 8.0, 1e-15));
}

#[test]
fn tree_from_six_cycle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst =
        BipartiteInstance::new(cloud(&mut rng, 3, 2), cloud(&mut rng, 3, 2), 1.0, ProblemKind::KBoundedMst(2)).unwrap();
    for r in [solve_heuristic(&inst).unwrap(), solve_exact(&inst).unwrap(), brute_force(&inst).unwrap()] {
        assert_eq!(r.solution.edges.len(), 5);
        assert!(is_feasible(&inst, &r.solution));
        let (dx, dy) = r.solution.degrees();
        assert!(dx.iter().chain(&dy).all(|&k| k <= 2));
    }
}

#[test]
fn coincident_and_duplicated_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = cloud(&mut rng, 40, 2);
    let mut dup = x.clone();
    dup.extend(&x);
    let inst = BipartiteInstance::new(x.clone(), x.clone(), 1.0, ProblemKind::Matching).unwrap();
    assert_eq!(solve_heuristic(&inst).unwrap().cost(), 0.0);
    // Two positions, each holding two points per side: the best tour crosses
    // between them exactly twice.
    let small = pts(&[[0.1, 0.1], [0.1, 0.1], [0.7, 0.2], [0.7, 0.2]]);
    let inst = BipartiteInstance::new(small.clone(), small, 1.0, ProblemKind::BipartiteTsp).unwrap();
    assert!(rel_close(solve_exact(&inst).unwrap().cost(), 2.0 * 0.37f64.sqrt(), 1e-15));
}

#[test]
fn below_minimum_size_gives_empty_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let inst =
        BipartiteInstance::new(cloud(&mut rng, 1, 2), cloud(&mut rng, 4, 2), 1.0, ProblemKind::BipartiteTsp).unwrap();
    for mode in [SolverMode::Auto, SolverMode::Exact, SolverMode::Heuristic, SolverMode::Brute] {
        let r = solve(&inst, mode).unwrap();
        assert_eq!(r.cost(), 0.0);
        assert!(r.solution.edges.is_empty());
    }
}

#[test]
fn relaxations_are_ordered() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..=5);
        let (x, y) = (cloud(&mut rng, n, 2), cloud(&mut rng, n, 2));
        let c = |kind| solve_exact(&BipartiteInstance::new(x.clone(), y.clone(), 1.0, kind).unwrap()).unwrap().cost();
        for k in 2..=3.min(n) {
            let connected = c(ProblemKind::ConnectedKFactor(k));
            assert!(c(ProblemKind::KFactor(k)) <= connected * (1.0 + 1e-12));
            assert!(c(ProblemKind::KBoundedMst(k)) <= connected * (1.0 + 1e-12));
        }
    }
}

#[test]
fn scaling_multiplies_costs_by_lambda_to_the_p() {
    for kind in KINDS {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (x, y) = (cloud(&mut rng, 5, 3), cloud(&mut rng, 5, 3));
        for p in [1.0, 1.5, 2.0] {
            for lambda in [0.5, 4.0] {
                let a = BipartiteInstance::new(x.clone(), y.clone(), p, kind).unwrap();
                let b = BipartiteInstance::new(x.scaled(lambda), y.scaled(lambda), p, kind).unwrap();
                let (ca, cb) = (solve_exact(&a).unwrap().cost(), solve_exact(&b).unwrap().cost());
                assert!(rel_close(cb, lambda.powf(p) * ca, 1e-12), "{kind} p={p} lambda={lambda}");
            }
        }
    }
}

#[test]
fn shuffling_inputs_keeps_the_optimal_cost() {
    for kind in KINDS {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (x, y) = (cloud(&mut rng, 5, 2), cloud(&mut rng, 5, 2));
        let mut order: Vec<usize> = (0..5).collect();
        order.shuffle(&mut rng);
        let a = BipartiteInstance::new(x.clone(), y.clone(), 1.0, kind).unwrap();
        let b = BipartiteInstance::new(x.subset(&order), y.subset(&[4, 2, 0, 1, 3]), 1.0, kind).unwrap();
        assert!(rel_close(solve_exact(&a).unwrap().cost(), solve_exact(&b).unwrap().cost(), 1e-12), "{kind}");
    }
}

#[test]
fn solve_modes_dispatch() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inst = BipartiteInstance::new(cloud(&mut rng, 4, 2), cloud(&mut rng, 4, 2), 1.0, ProblemKind::BipartiteTsp).unwrap();
    assert_eq!(solve(&inst, SolverMode::Auto).unwrap().method, Method::Exact);
    assert_eq!(solve(&inst, SolverMode::Brute).unwrap().method, Method::Brute);
    assert!(matches!(solve(&inst, SolverMode::Heuristic).unwrap().method, Method::Heuristic(_)));
    let big = BipartiteInstance::new(cloud(&mut rng, 20, 2), cloud(&mut rng, 20, 2), 1.0, ProblemKind::BipartiteTsp).unwrap();
    assert_eq!(solve(&big, SolverMode::Auto).unwrap().optimality, Optimality::Heuristic);
    assert!(matches!(solve(&big, SolverMode::Exact), Err(ebmatch_core::Error::SizeCap { .. })));
    assert!(matches!(solve(&big, SolverMode::Brute), Err(ebmatch_core::Error::SizeCap { .. })));
}

#[test]
fn line_matching_agrees_with_brute_force() {
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=7);
        let p = [1.0, 1.5, 2.0][seed as usize % 3];
        let (x, y) = (cloud(&mut rng, n, 1), cloud(&mut rng, n, 1));
        let fast = optimal_assignment(&x, &y, p).unwrap().cost;
        let inst = BipartiteInstance::new(x, y, p, ProblemKind::Matching).unwrap();
        let slow = brute_force(&inst).unwrap().cost();
        assert!(rel_close(fast, slow, 1e-12), "seed {seed}: {fast} vs {slow}");
    }
}

#[test]
fn automatic_mode_respects_the_work_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let square8 = BipartiteInstance::new(cloud(&mut rng, 8, 2), cloud(&mut rng, 8, 2), 1.0, ProblemKind::BipartiteTsp).unwrap();
    assert!(prefers_exact(&square8));
    let square9 = BipartiteInstance::new(cloud(&mut rng, 9, 2), cloud(&mut rng, 9, 2), 1.0, ProblemKind::BipartiteTsp).unwrap();
    assert!(within_exact_caps(&square9) && !prefers_exact(&square9));
    assert_eq!(solve(&square9, SolverMode::Auto).unwrap().optimality, Optimality::Heuristic);
    let wide = BipartiteInstance::new(cloud(&mut rng, 7, 2), cloud(&mut rng, 12, 2), 1.0, ProblemKind::BipartiteTsp).unwrap();
    assert!(within_exact_caps(&wide) && !prefers_exact(&wide));
}
