mod common;

use common::{median, paulis, random_traceless, rng, slope};
use qfe_core::adaptive::*;
use qfe_core::operator::GeneratorSet;
use rand::Rng;

fn square_problem() -> GeneralProblem {
    let f = PolynomialCouplings::new(
        2,
        vec![
            Polynomial::new(vec![Monomial { coeff: 1.0, powers: vec![2, 0] }]),
            Polynomial::linear(&[0.0, 1.0]),
        ],
    )
    .unwrap();
    let q = Polynomial::new(vec![Monomial { coeff: 1.0, powers: vec![1, 1] }]);
    GeneralProblem::new(paulis(&["Z", "X"]), Box::new(f), Box::new(q), 2.0, 1.0).unwrap()
}

fn random_polynomial(r: usize, rng: &mut impl Rng) -> Polynomial {
    let terms = (0..3)
        .map(|_| Monomial {
            coeff: 2.0 * rng.gen::<f64>() - 1.0,
            powers: (0..r).map(|_| rng.gen_range(0..=2)).collect(),
        })
        .collect();
    let mut p = Polynomial::new(terms);
    // A linear part keeps the Jacobian generically full rank.
    let lin: Vec<f64> = (0..r).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
    p.terms.extend(Polynomial::linear(&lin).terms);
    p
}

#[test]
fn mismatch_never_exceeds_telescoping_bound() {
    let mut r = rng(13);
    let (mut checked, mut informative) = (0, 0);
    while checked < 50 {
        let n = r.gen_range(2..=4);
        let m = r.gen_range(2..=4);
        let k = r.gen_range(1..=m);
        let gs = GeneratorSet::new((0..m).map(|_| random_traceless(n, &mut r)).collect()).unwrap();
        let comps: Vec<Polynomial> = (0..m).map(|_| random_polynomial(k, &mut r)).collect();
        let theta: Vec<f64> = (0..k).map(|_| 2.0 * r.gen::<f64>() - 1.0).collect();
        let t1 = 10.0 * (1.0 + r.gen::<f64>());
        let c = 1.0 + 2.0 * r.gen::<f64>();
        let delta = c / t1;
        let f = PolynomialCouplings::new(k, comps).unwrap();
        let l_f = f.hessian_bound(&theta, delta);
        let q = Polynomial::linear(&vec![1.0; k]);
        let Ok(p) = GeneralProblem::new(gs, Box::new(f), Box::new(q), l_f, 0.0) else {
            continue;
        };
        let tt = stage1_oracle(&theta, t1, c, checked as u64).unwrap();
        let t2 = 5.0 * t1;
        let Ok((u_true, u_lin)) = stage_two_unitaries(&p, &theta, &tt, t2) else {
            continue;
        };
        let bound = mismatch_bound(t2, remainder_bounds(&p, delta).unwrap().hamiltonian).unwrap();
        let seen = (&u_true - &u_lin).spectral_norm();
        assert!(seen <= bound + 1e-12, "{seen} > {bound}");
        informative += usize::from(bound < 2.0);
        checked += 1;
    }
    // ‖U − V‖ ≤ 2 always, so only bounds below 2 test anything.
    assert!(informative >= 10, "only {informative} informative instances");
}

#[test]
fn time_split_ratios_shrink() {
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for t in [1e2, 1e3, 1e4, 1e5, 1e6] {
        let (t1, t2) = TwoStepConfig::new(t, 10, 0).split().unwrap();
        let ratios = (t2 / (t1 * t1), t1 / t2);
        assert!(ratios.0 < prev.0 && ratios.1 < prev.1);
        prev = ratios;
    }
    assert!(prev.0 < 0.01 && prev.1 < 0.1);
}

#[test]
fn linear_problems_reduce_to_linear_protocol() {
    let p = GeneralProblem::new(
        paulis(&["ZI", "XI", "ZZ"]),
        Box::new(PolynomialCouplings::identity(3)),
        Box::new(Polynomial::linear(&[1.0, 1.0, 1.0])),
        0.0,
        0.0,
    )
    .unwrap();
    let theta = [0.2, -0.1, 0.3];
    for seed in 0..5 {
        let run = run_two_step(&p, &theta, &TwoStepConfig::new(200.0, 1000, seed)).unwrap();
        let d = &run.diagnostics;
        assert!((d.gamma_tilde - d.gamma_true).abs() < 1e-8);
        assert_eq!(d.remainders.hamiltonian, 0.0);
        assert!((d.locked_mse_per_shot * d.t2 * d.t2 - 0.5).abs() < 1e-6);
    }
}

#[test]
fn gamma_error_scales_inversely_with_first_stage() {
    let p = square_problem();
    let theta = [1.0, 2.0];
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for t1 in [10.0f64, 100.0, 1000.0] {
        let t = t1.powf(1.0 / DEFAULT_EXPONENT);
        let mut errs: Vec<f64> = (0..30)
            .map(|seed| {
                let run = run_two_step(&p, &theta, &TwoStepConfig::new(t, 100, seed)).unwrap();
                let d = &run.diagnostics;
                assert_eq!(d.gamma_tilde_in_interval, Some(true));
                (d.gamma_tilde - d.gamma_true).abs()
            })
            .collect();
        xs.push(t1.ln());
        ys.push(median(&mut errs).ln());
    }
    let s = slope(&xs, &ys);
    assert!((-1.3..=-0.7).contains(&s), "slope {s}");
}

#[test]
fn runs_are_reproducible() {
    let p = square_problem();
    let cfg = TwoStepConfig::new(500.0, 5000, 8);
    let a = run_two_step(&p, &[1.0, 2.0], &cfg).unwrap();
    let b = run_two_step(&p, &[1.0, 2.0], &cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&a.result.record()).unwrap(),
        serde_json::to_string(&b.result.record()).unwrap()
    );
    assert_eq!(a.diagnostics, b.diagnostics);
}
