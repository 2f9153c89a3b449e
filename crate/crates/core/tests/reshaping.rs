mod common;

use common::{median, random_hermitian, rng};
use proptest::prelude::*;
use qfe_core::operator::*;
use qfe_core::reshaping::*;

fn basis_strategy() -> impl Strategy<Value = (HermitianOperator, EigenDecomposition)> {
    (2usize..=16, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = rng(seed);
        let h = random_hermitian(n, &mut r);
        let b = eig_hermitian(&random_hermitian(n, &mut r)).unwrap();
        (h, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn twirl_equals_dephasing_average((h, b) in basis_strategy()) {
        let exact = twirl_exact(&h, &b).unwrap();
        let avg = twirl_average(&h, &build_dephasing_set(&b)).unwrap();
        prop_assert!((exact.matrix() - avg.matrix()).max_abs() < 1e-10);
    }

    #[test]
    fn twirl_idempotent_and_trace_preserving((h, b) in basis_strategy()) {
        let once = twirl_exact(&h, &b).unwrap();
        let twice = twirl_exact(&once, &b).unwrap();
        prop_assert!((once.matrix() - twice.matrix()).max_abs() < 1e-10);
        prop_assert!((once.trace() - h.trace()).abs() < 1e-12 * h.trace().abs().max(1.0) + 1e-12);
    }

    #[test]
    fn diagonal_hamiltonians_are_fixed_points(
        seed in any::<u64>(),
        steps in 1usize..40,
        t in 0.1f64..5.0,
    ) {
        let mut r = rng(seed);
        let b = eig_hermitian(&random_hermitian(4, &mut r)).unwrap();
        let d: Vec<f64> = (0..4).map(|k| (k as f64) - 1.3 * (seed % 7) as f64).collect();
        let h = HermitianOperator::new(b.with_values(&d)).unwrap();
        let set = build_dephasing_set(&b);
        let plan = ReshapingPlan::sample(t, steps, 4, seed).unwrap();
        let v = qdrift_unitary(&h, &plan, &set).unwrap();
        prop_assert!(reshaping_error(&v, &h, t).unwrap() <= 1e-10);
    }
}

#[test]
fn sampled_indices_depend_only_on_seed_and_step() {
    let a = ReshapingPlan::sample(1.0, 50, 4, 77).unwrap();
    let b = ReshapingPlan::sample(1.0, 80, 4, 77).unwrap();
    assert_eq!(a.sampled_indices[..], b.sampled_indices[..50]);
    let c = ReshapingPlan::sample(1.0, 50, 4, 78).unwrap();
    assert_ne!(a.sampled_indices, c.sampled_indices);
}

#[test]
fn required_steps_meet_target() {
    let h = pauli_sum(&[(1.0, "X"), (1.0, "Z")]).unwrap();
    let comp = EigenDecomposition::computational(2);
    let h_eff = twirl_exact(&h, &comp).unwrap();
    let lam = spectral_norm(&h).unwrap();
    let l = required_steps(2, lam, 1.0, 0.1, 1.0).unwrap();
    let set = build_dephasing_set(&comp);
    let mut errs: Vec<f64> = (0..20)
        .map(|seed| {
            let plan = ReshapingPlan::sample(1.0, l, 2, seed).unwrap();
            reshaping_error(&qdrift_unitary(&h, &plan, &set).unwrap(), &h_eff, 1.0).unwrap()
        })
        .collect();
    assert!(median(&mut errs) < 0.1);
}

#[test]
fn more_steps_reduce_error() {
    let h = pauli_sum(&[(0.7, "Z"), (0.4, "X")]).unwrap();
    let comp = EigenDecomposition::computational(2);
    let h_eff = twirl_exact(&h, &comp).unwrap();
    let set = build_dephasing_set(&comp);
    let med = |l: usize| {
        let mut e: Vec<f64> = (0..20)
            .map(|seed| {
                let plan = ReshapingPlan::sample(2.0, l, 2, seed).unwrap();
                reshaping_error(&qdrift_unitary(&h, &plan, &set).unwrap(), &h_eff, 2.0).unwrap()
            })
            .collect();
        median(&mut e)
    };
    let (e1, e100) = (med(1), med(100));
    assert!(e100 < e1, "{e100} vs {e1}");
}
