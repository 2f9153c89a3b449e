mod common;

use common::rng;
use proptest::prelude::*;
use qfe_core::bound::{solve, LinearProblem, DEFAULT_TOL};
use qfe_core::operator::{local_pauli, GeneratorSet, Pauli};
use qfe_core::oracles::*;
use rand::Rng;

#[test]
fn full_matrix_passes() {
    let table = validate(&catalog(), 50, DEFAULT_TOL, 1e-6, 2024);
    assert!(table.all_passed(), "\n{table}");
    assert_eq!(table.rows.len(), catalog().len() + 1);
}

#[test]
fn loose_solver_is_reported() {
    // At a loose tolerance the solver may land anywhere within 1e-3, so a
    // 1e-12 agreement threshold must flag failures rather than pass silently.
    let table = validate(&[OracleCase::TwoQubitZxz], 20, 1e-3, 1e-12, 1);
    assert!(!table.all_passed());
}

#[test]
fn orthonormal_matches_qubit_form() {
    let gs = normalized_qubit_paulis().unwrap();
    let mut r = rng(4);
    for _ in 0..20 {
        let a: [f64; 3] = std::array::from_fn(|_| 2.0 * r.gen::<f64>() - 1.0);
        let scaled = a.map(|v| v * 2f64.sqrt());
        let lhs = gamma_orthonormal(&gs, &a).unwrap();
        assert!((lhs - gamma_single_qubit(scaled)).abs() < 1e-12);
    }
}

#[test]
fn padded_superset_is_no_easier() {
    // Extra generators with zero coefficient can only raise γ.
    let mut gens: Vec<_> = (1..=2).map(|k| local_pauli(Pauli::Z, k, 2).unwrap()).collect();
    gens.push(local_pauli(Pauli::X, 1, 2).unwrap());
    let gs = GeneratorSet::new(gens).unwrap();
    let mut r = rng(9);
    for _ in 0..20 {
        let a = [2.0 * r.gen::<f64>() - 1.0, 2.0 * r.gen::<f64>() - 1.0];
        let p = LinearProblem::new(gs.clone(), vec![a[0], a[1], 0.0]).unwrap();
        let g = solve(&p, DEFAULT_TOL).unwrap().gamma;
        assert!(g >= gamma_commuting_z(&a) - 1e-8);
    }
}

proptest! {
    #[test]
    fn zxz_symmetries(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0) {
        let g = gamma_two_qubit_zxz([a, b, c]);
        prop_assert_eq!(g, gamma_two_qubit_zxz([c, b, a]));
        prop_assert_eq!(g, gamma_two_qubit_zxz([-a, b, c]));
        prop_assert_eq!(g, gamma_two_qubit_zxz([a, -b, c]));
        prop_assert_eq!(g, gamma_two_qubit_zxz([a, b, -c]));
    }
}
