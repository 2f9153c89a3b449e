//! The precision constant γ(ĝ|α): the trace-norm program
//!
//! minimize ½‖Â‖₁  subject to  Tr(Â ĝ_j) = α_j,  Tr(Â) = 0
//!
//! solved through its (m+1)-dimensional dual, with an explicit primal witness
//! of rank at most m+1 and a duality-gap certificate.

mod brute;
mod dual;
mod kappa;
pub mod lp;
mod perturbation;
mod primal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{EigenDecomposition, GeneratorSet, HermitianOperator};

pub use brute::{brute_force_gamma, BRUTE_MAX_DIM, BRUTE_MAX_GENERATORS};
pub use dual::{gamma_dual_solve, INITIAL_WEIGHT, WEIGHT_FACTOR};
pub use kappa::{conditioning_kappa, KAPPA_MAX_GENERATORS};
pub use perturbation::{perturbation_interval, PerturbationReport};
pub use primal::{
    gamma_fixed_basis, primal_recover, sparsify_support, witness_from_weights, SUPPORT_EPS,
};

/// Default relative tolerance on the duality gap.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Bound on the affine-constraint residual of a recovered witness.
pub const RECOVERY_RESIDUAL_TOL: f64 = 1e-7;
const RETRIES: usize = 3;
const RECOVERY_LEVELS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProblem {
    pub generators: GeneratorSet,
    pub alpha: Vec<f64>,
}

impl LinearProblem {
    pub fn new(generators: GeneratorSet, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != generators.len() {
            return Err(Error::DimensionMismatch {
                expected: generators.len(),
                found: alpha.len(),
            });
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { generators, alpha })
    }

    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    /// α = 0: γ vanishes and there is nothing to estimate.
    pub fn is_degenerate(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0.0)
    }

    pub fn with_alpha(&self, alpha: Vec<f64>) -> Result<Self> {
        Self::new(self.generators.clone(), alpha)
    }
}

/// Dual point `(y, μ)` with ‖Σ y_j ĝ_j + μÎ‖ ≤ ½; its value y·α lower-bounds γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub y: Vec<f64>,
    pub mu: f64,
    pub value: f64,
    /// Barrier weight of the interior iterate this point came from, or 0
    /// when it is not a barrier iterate.
    pub barrier_weight: f64,
}

impl DualCertificate {
    pub(crate) fn new(problem: &LinearProblem, y: Vec<f64>, mu: f64, barrier_weight: f64) -> Self {
        let value = dot(&problem.alpha, &y);
        Self {
            y,
            mu,
            value,
            barrier_weight,
        }
    }

    pub fn zero(m: usize) -> Self {
        Self {
            y: vec![0.0; m],
            mu: 0.0,
            value: 0.0,
            barrier_weight: 0.0,
        }
    }

    /// ‖Σ y_j ĝ_j + μÎ‖, which must not exceed ½.
    pub fn constraint_norm(&self, problem: &LinearProblem) -> Result<f64> {
        crate::operator::spectral_norm(&problem.generators.combine(&self.y, self.mu))
    }

    pub fn l1_norm(&self) -> f64 {
        self.y.iter().map(|v| v.abs()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSolution {
    pub gamma: f64,
    pub witness: HermitianOperator,
    /// Eigenbasis 𝒦 of the witness, eigenvalues ascending.
    pub basis: EigenDecomposition,
    /// Eigenvalues a_k of the witness (equal to `basis.values`).
    pub weights: Vec<f64>,
    /// 𝒳 = {k | a_k > ε_supp}
    pub support_pos: Vec<usize>,
    /// 𝒴 = {k | a_k < −ε_supp}
    pub support_neg: Vec<usize>,
    pub dual: DualCertificate,
    pub gap: f64,
    pub degenerate: bool,
    pub kappa: Option<f64>,
}

impl BoundSolution {
    pub(crate) fn degenerate(problem: &LinearProblem) -> Result<Self> {
        let n = problem.dim();
        Ok(Self {
            gamma: 0.0,
            witness: HermitianOperator::zeros(n)?,
            basis: EigenDecomposition::computational(n),
            weights: vec![0.0; n],
            support_pos: Vec::new(),
            support_neg: Vec::new(),
            dual: DualCertificate::zero(problem.m()),
            gap: 0.0,
            degenerate: true,
            kappa: None,
        })
    }

    pub fn support_size(&self) -> usize {
        self.support_pos.len() + self.support_neg.len()
    }

    /// max_j |Tr(Â ĝ_j) − α_j| together with |Tr Â|.
    pub fn constraint_residual(&self, problem: &LinearProblem) -> f64 {
        let mut r = self.witness.trace().abs();
        for (g, a) in problem.generators.generators().iter().zip(&problem.alpha) {
            r = r.max((self.witness.trace_with(g) - a).abs());
        }
        r
    }

    pub fn record(&self) -> BoundRecord {
        BoundRecord {
            gamma: self.gamma,
            gap: self.gap,
            degenerate: self.degenerate,
            kappa: self.kappa,
            weights: self.weights.clone(),
            support_pos: self.support_pos.clone(),
            support_neg: self.support_neg.clone(),
            dual_y: self.dual.y.clone(),
            dual_mu: self.dual.mu,
            dual_value: self.dual.value,
        }
    }
}

/// Serializable summary of a [`BoundSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub gamma: f64,
    pub gap: f64,
    pub degenerate: bool,
    pub kappa: Option<f64>,
    pub weights: Vec<f64>,
    pub support_pos: Vec<usize>,
    pub support_neg: Vec<usize>,
    pub dual_y: Vec<f64>,
    pub dual_mu: f64,
    pub dual_value: f64,
}

/// Dual solve, primal recovery and sparsification, tightening the barrier
/// tolerance until the certified gap meets `tol·max(1, γ)`.
pub fn solve(problem: &LinearProblem, tol: f64) -> Result<BoundSolution> {
    dual::check_tolerance(tol)?;
    if problem.is_degenerate() {
        return BoundSolution::degenerate(problem);
    }
    // The barrier runs a decade tighter than the target so that the
    // certified gap, which also carries the primal rounding, usually passes
    // on the first attempt.
    let mut inner = (tol / 10.0).max(1e-12);
    let mut last = None;
    for _ in 0..=RETRIES {
        let path = dual::barrier_path(problem, inner)?;
        let sol = recover_along_path(problem, &path, inner)?;
        if sol.gap.abs() <= tol * sol.gamma.max(1.0) {
            return Ok(sol);
        }
        last = Some(sol);
        inner = (inner / 100.0).max(1e-12);
    }
    let sol = last.expect("at least one attempt");
    Err(Error::SolverNonConvergence {
        iterations: RETRIES + 1,
        gap: sol.gap,
        objective: sol.gamma,
        residual: sol.constraint_residual(problem),
    })
}

/// Primal recovery from the last few centered iterates. Very large weights
/// resolve the dual sharply but lose relative precision in the slack
/// inverses, so the smallest recovered γ among them is kept, certified
/// against the largest dual value seen.
fn recover_along_path(
    problem: &LinearProblem,
    path: &[DualCertificate],
    tol: f64,
) -> Result<BoundSolution> {
    let mut best: Option<BoundSolution> = None;
    let mut best_dual: Option<DualCertificate> = None;
    let mut first_err = None;
    for cert in path.iter().rev().take(RECOVERY_LEVELS) {
        match primal_recover(problem, cert, tol) {
            Ok(sol) => {
                if best_dual.as_ref().map_or(true, |d| sol.dual.value > d.value) {
                    best_dual = Some(sol.dual.clone());
                }
                if best.as_ref().map_or(true, |b| sol.gamma < b.gamma) {
                    best = Some(sol);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, best_dual) {
        (Some(mut sol), Some(dual)) => {
            sol.gap = sol.gamma - dual.value;
            sol.dual = dual;
            Ok(sol)
        }
        _ => Err(first_err.unwrap_or(Error::RecoveryFailure { residual: f64::NAN })),
    }
}

/// γ alone, at the default tolerance.
pub fn gamma(problem: &LinearProblem) -> Result<f64> {
    Ok(solve(problem, DEFAULT_TOL)?.gamma)
}

/// min ‖β·ĝ‖_s subject to α·β = 1; the optimal value is 1/γ.
pub fn seminorm_min_beta(problem: &LinearProblem) -> Result<(Vec<f64>, f64)> {
    if problem.is_degenerate() {
        return Err(Error::InvalidInput(
            "α = 0 admits no β with α·β = 1".into(),
        ));
    }
    let sol = solve(problem, DEFAULT_TOL)?;
    let y = &sol.dual.y;
    let value = dot(&problem.alpha, y);
    let beta: Vec<f64> = y.iter().map(|v| v / value).collect();
    let s = crate::operator::seminorm(&problem.generators.combine(&beta, 0.0))?;
    Ok((beta, s))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli_from_label;

    fn problem(labels: &[&str], alpha: &[f64]) -> LinearProblem {
        let gs = GeneratorSet::new(labels.iter().map(|l| pauli_from_label(l).unwrap()).collect())
            .unwrap();
        LinearProblem::new(gs, alpha.to_vec()).unwrap()
    }

    #[test]
    fn single_z() {
        let s = solve(&problem(&["Z"], &[1.0]), 1e-9).unwrap();
        assert!((s.gamma - 0.5).abs() < 1e-9);
        assert_eq!(s.support_size(), 2);
        assert!(s.gap <= 1e-9);
    }

    #[test]
    fn single_qubit_pauli_frame() {
        let s = solve(&problem(&["X", "Y", "Z"], &[3.0, 4.0, 0.0]), 1e-9).unwrap();
        assert!((s.gamma - 2.5).abs() < 1e-8);
        assert!((s.weights[0] + 2.5).abs() < 1e-7);
        assert!((s.weights[1] - 2.5).abs() < 1e-7);
        assert!(s.constraint_residual(&problem(&["X", "Y", "Z"], &[3.0, 4.0, 0.0])) < 1e-8);
    }

    #[test]
    fn dual_examples() {
        let p = problem(&["X", "Y", "Z"], &[1.0, 0.0, 0.0]);
        let s = solve(&p, 1e-9).unwrap();
        assert!((s.dual.value - 0.5).abs() < 1e-9);
        assert!((s.dual.y[0] - 0.5).abs() < 1e-6);
        assert!(s.dual.mu.abs() < 1e-6);

        let p = problem(&["ZI", "XI", "ZZ"], &[1.0, 1.0, 1.0]);
        let s = solve(&p, 1e-9).unwrap();
        assert!((s.gamma - 0.5 * 2f64.sqrt()).abs() < 1e-8);
        assert!(s.support_size() <= 4);
    }

    #[test]
    fn degenerate_alpha() {
        let s = solve(&problem(&["Z"], &[0.0]), 1e-9).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.gamma, 0.0);
    }

    #[test]
    fn beta_form() {
        let (beta, v) = seminorm_min_beta(&problem(&["Z"], &[1.0])).unwrap();
        assert!((beta[0] - 1.0).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-7);
        let (_, v) = seminorm_min_beta(&problem(&["ZI", "IZ"], &[1.0, 1.0])).unwrap();
        assert!((v - 2.0).abs() < 1e-7);
    }

    #[test]
    fn bad_tolerance() {
        assert!(matches!(
            solve(&problem(&["Z"], &[1.0]), 1e-2),
            Err(Error::InvalidInput(_))
        ));
    }
}
