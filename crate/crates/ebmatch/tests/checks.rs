use ebmatch::checks::{glue_suite, oracle_suite, transport_suite};

#[test]
fn exact_solvers_match_brute_force() {
    let r = oracle_suite(&[1, 2, 3], &[1.0, 1.5, 2.0], 15, 5, 1).unwrap();
    assert_eq!(r.cases, 3 * 3 * 7 * 15);
    assert!(r.passed(), "{:?}", r.failures);
}

#[test]
fn random_gluings_are_feasible_and_local() {
    let r = glue_suite(300, 6, 2).unwrap();
    assert!(r.passed(), "{:?}", &r.failures[..r.failures.len().min(5)]);
}

#[test]
fn unit_atom_transport_equals_matching() {
    let r = transport_suite(100, 30, 7, 1).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
}
