#![allow(dead_code)]

use qfe_core::bound::LinearProblem;
use qfe_core::operator::{pauli_from_label, CMatrix, GeneratorSet, HermitianOperator, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> HermitianOperator {
    let m = CMatrix::from_fn(n, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    HermitianOperator::new(m.hermitian_part()).unwrap()
}

pub fn random_traceless(n: usize, rng: &mut impl Rng) -> HermitianOperator {
    let h = random_hermitian(n, rng);
    let shift = -h.trace() / n as f64;
    h.shifted(shift)
}

pub fn paulis(labels: &[&str]) -> GeneratorSet {
    GeneratorSet::new(labels.iter().map(|l| pauli_from_label(l).unwrap()).collect()).unwrap()
}

pub fn problem(labels: &[&str], alpha: &[f64]) -> LinearProblem {
    LinearProblem::new(paulis(labels), alpha.to_vec()).unwrap()
}

/// Random dense instance: N from `dims`, 1 ≤ m ≤ max_m, α uniform in [−1, 1].
pub fn random_problem(rng: &mut impl Rng, dims: &[usize], max_m: usize) -> LinearProblem {
    let n = dims[rng.gen_range(0..dims.len())];
    let m = rng.gen_range(1..=max_m.min(n * n - 1));
    let gs = GeneratorSet::new((0..m).map(|_| random_traceless(n, rng)).collect()).unwrap();
    let alpha = (0..m).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
    LinearProblem::new(gs, alpha).unwrap()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Least-squares slope of y against x.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
