//! Two-step protocol for nonlinear couplings Ĥ₀ = Σ_j f_j(θ)ĝ_j and a
//! nonlinear target q(θ): a coarse estimate θ̃ from a short first stage, then
//! the linear protocol for the linearized problem around θ̃.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bound::{
    conditioning_kappa, perturbation_interval, solve, BoundSolution, LinearProblem,
    PerturbationReport, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::operator::{spectral_norm, CMatrix, GeneratorSet, HermitianOperator};
use crate::protocol::{
    classify, estimate_from_samples, evolve_ideal, outcome_probabilities, plan_schedule,
    sample_outcomes, SimulationResult, MIN_SLOPE,
};
use crate::reshaping::twirl_exact;
use crate::stream::{Domain, SeedStream};

/// Relative accuracy demanded of supplied derivatives against central
/// differences.
pub const DERIVATIVE_TOL: f64 = 1e-5;
/// Rank threshold for the Jacobian, relative to its largest singular value.
pub const RANK_TOL: f64 = 1e-10;
pub const DEFAULT_EXPONENT: f64 = 0.75;
/// Largest |Φ_ref| the pilot may return; keeps |cos Φ_ref| above the slope
/// floor.
const PILOT_PHASE_CLAMP: f64 = 1.4;

/// f: ℝ^r → ℝ^m with Jacobian F_ij = ∂f_j/∂θ_i.
pub trait Couplings: Send + Sync {
    fn inputs(&self) -> usize;
    fn outputs(&self) -> usize;
    fn values(&self, theta: &[f64]) -> Vec<f64>;
    /// r rows of length m.
    fn jacobian(&self, theta: &[f64]) -> Vec<Vec<f64>>;
}

/// q: ℝ^r → ℝ with gradient.
pub trait Target: Send + Sync {
    fn value(&self, theta: &[f64]) -> f64;
    fn gradient(&self, theta: &[f64]) -> Vec<f64>;
}

/// Σ_terms c·Π_i θ_i^{p_i}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<Monomial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

fn monomial_at(powers: &[u32], theta: &[f64], skip: &[usize]) -> f64 {
    // Product with the listed variables differentiated once each.
    let mut p: Vec<u32> = powers.to_vec();
    let mut factor = 1.0;
    for &i in skip {
        if p[i] == 0 {
            return 0.0;
        }
        factor *= f64::from(p[i]);
        p[i] -= 1;
    }
    p.iter()
        .zip(theta)
        .fold(factor, |acc, (&k, &x)| acc * x.powi(k as i32))
}

impl Polynomial {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms }
    }

    /// c·θ_i
    pub fn linear(coeffs: &[f64]) -> Self {
        let r = coeffs.len();
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let mut powers = vec![0; r];
                    powers[i] = 1;
                    Monomial { coeff: c, powers }
                })
                .collect(),
        )
    }

    pub fn variables(&self) -> usize {
        self.terms.iter().map(|t| t.powers.len()).max().unwrap_or(0)
    }

    fn check(&self, r: usize) -> Result<()> {
        for t in &self.terms {
            if t.powers.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: t.powers.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * monomial_at(&t.powers, theta, &[]))
            .sum()
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        (0..theta.len())
            .map(|i| {
                self.terms
                    .iter()
                    .map(|t| t.coeff * monomial_at(&t.powers, theta, &[i]))
                    .sum()
            })
            .collect()
    }

    pub fn hessian(&self, theta: &[f64]) -> Vec<Vec<f64>> {
        let r = theta.len();
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|k| {
                        self.terms
                            .iter()
                            .map(|t| t.coeff * monomial_at(&t.powers, theta, &[i, k]))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Upper bound on max_{ik} |∂²p/∂θ_i∂θ_k| over the box |θ_i − c_i| ≤ radius.
    pub fn hessian_bound(&self, center: &[f64], radius: f64) -> f64 {
        let corner: Vec<f64> = center.iter().map(|c| c.abs() + radius).collect();
        let r = center.len();
        let mut best = 0.0f64;
        for i in 0..r {
            for k in 0..r {
                let s: f64 = self
                    .terms
                    .iter()
                    .map(|t| t.coeff.abs() * monomial_at(&t.powers, &corner, &[i, k]))
                    .sum();
                best = best.max(s);
            }
        }
        best
    }
}

impl Target for Polynomial {
    fn value(&self, theta: &[f64]) -> f64 {
        Polynomial::value(self, theta)
    }

    fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        Polynomial::gradient(self, theta)
    }
}

/// One polynomial per coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialCouplings {
    pub inputs: usize,
    pub components: Vec<Polynomial>,
}

impl PolynomialCouplings {
    pub fn new(inputs: usize, components: Vec<Polynomial>) -> Result<Self> {
        for p in &components {
            p.check(inputs)?;
        }
        Ok(Self { inputs, components })
    }

    /// f_j(θ) = θ_j
    pub fn identity(m: usize) -> Self {
        let components = (0..m)
            .map(|j| {
                let mut c = vec![0.0; m];
                c[j] = 1.0;
                Polynomial::linear(&c)
            })
            .collect();
        Self {
            inputs: m,
            components,
        }
    }

    /// max_j of [`Polynomial::hessian_bound`].
    pub fn hessian_bound(&self, center: &[f64], radius: f64) -> f64 {
        self.components
            .iter()
            .map(|p| p.hessian_bound(center, radius))
            .fold(0.0, f64::max)
    }
}

impl Couplings for PolynomialCouplings {
    fn inputs(&self) -> usize {
        self.inputs
    }

    fn outputs(&self) -> usize {
        self.components.len()
    }

    fn values(&self, theta: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.value(theta)).collect()
    }

    fn jacobian(&self, theta: &[f64]) -> Vec<Vec<f64>> {
        let grads: Vec<Vec<f64>> = self.components.iter().map(|p| p.gradient(theta)).collect();
        (0..self.inputs)
            .map(|i| grads.iter().map(|g| g[i]).collect())
            .collect()
    }
}

pub struct GeneralProblem {
    pub generators: GeneratorSet,
    pub couplings: Box<dyn Couplings>,
    pub target: Box<dyn Target>,
    /// Bound on every second derivative of every f_j near θ.
    pub l_f: f64,
    /// Bound on every second derivative of q near θ.
    pub l_q: f64,
    pub g_max: f64,
}

impl std::fmt::Debug for GeneralProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneralProblem")
            .field("m", &self.m())
            .field("r", &self.r())
            .field("l_f", &self.l_f)
            .field("l_q", &self.l_q)
            .field("g_max", &self.g_max)
            .finish()
    }
}

fn relative_close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= DERIVATIVE_TOL * scale.max(1.0)
}

impl GeneralProblem {
    /// Checks shapes, r ≤ m, and the supplied derivatives against central
    /// differences at a few seeded points in [−2, 2]^r.
    pub fn new(
        generators: GeneratorSet,
        couplings: Box<dyn Couplings>,
        target: Box<dyn Target>,
        l_f: f64,
        l_q: f64,
    ) -> Result<Self> {
        let (r, m) = (couplings.inputs(), couplings.outputs());
        if m != generators.len() {
            return Err(Error::DimensionMismatch {
                expected: generators.len(),
                found: m,
            });
        }
        if r == 0 || r > m {
            return Err(Error::InvalidInput(format!(
                "parameter count {r} must be between 1 and the coupling count {m}"
            )));
        }
        for (name, v) in [("L_f", l_f), ("L_q", l_q)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be finite and ≥ 0")));
            }
        }
        let g_max = generators.g_max()?;
        let p = Self {
            generators,
            couplings,
            target,
            l_f,
            l_q,
            g_max,
        };
        let mut cursor = SeedStream::new(0x5eed).cursor(Domain::Test, 0);
        for _ in 0..3 {
            let theta: Vec<f64> = (0..r).map(|_| 4.0 * cursor.uniform() - 2.0).collect();
            p.check_derivatives(&theta)?;
        }
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.couplings.outputs()
    }

    pub fn r(&self) -> usize {
        self.couplings.inputs()
    }

    pub fn check_derivatives(&self, theta: &[f64]) -> Result<()> {
        let jac = self.couplings.jacobian(theta);
        let grad = self.target.gradient(theta);
        for i in 0..self.r() {
            let h = 1e-5 * theta[i].abs().max(1.0);
            let mut up = theta.to_vec();
            let mut down = theta.to_vec();
            up[i] += h;
            down[i] -= h;
            let (fu, fd) = (self.couplings.values(&up), self.couplings.values(&down));
            for j in 0..self.m() {
                let fd_ij = (fu[j] - fd[j]) / (2.0 * h);
                if !relative_close(jac[i][j], fd_ij, fd_ij.abs()) {
                    return Err(Error::InvalidInput(format!(
                        "coupling Jacobian entry ({i},{j}) = {} disagrees with finite difference {fd_ij}",
                        jac[i][j]
                    )));
                }
            }
            let fd_q = (self.target.value(&up) - self.target.value(&down)) / (2.0 * h);
            if !relative_close(grad[i], fd_q, fd_q.abs()) {
                return Err(Error::InvalidInput(format!(
                    "target gradient entry {i} = {} disagrees with finite difference {fd_q}",
                    grad[i]
                )));
            }
        }
        Ok(())
    }

    /// Σ_j f_j(θ) ĝ_j
    pub fn hamiltonian(&self, theta: &[f64]) -> HermitianOperator {
        self.generators.combine(&self.couplings.values(theta), 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Linearization {
    pub problem: LinearProblem,
    /// q(θ̃)
    pub offset: f64,
    pub jacobian: Vec<Vec<f64>>,
}

/// ĥ_i = Σ_j F_ij(θ̃) ĝ_j, α = ∇q(θ̃), offset q(θ̃).
pub fn linearize_at(problem: &GeneralProblem, theta_tilde: &[f64]) -> Result<Linearization> {
    let r = problem.r();
    if theta_tilde.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: theta_tilde.len(),
        });
    }
    let jacobian = problem.couplings.jacobian(theta_tilde);
    let f = DMatrix::from_fn(r, problem.m(), |i, j| jacobian[i][j]);
    let sv = f.singular_values();
    let top = sv.max();
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * top && s > 0.0).count();
    if rank < r {
        return Err(Error::IllPosedLinearization { rank, expected: r });
    }
    let generators = problem.generators.transformed(&jacobian)?;
    let alpha = problem.target.gradient(theta_tilde);
    Ok(Linearization {
        problem: LinearProblem::new(generators, alpha)?,
        offset: problem.target.value(theta_tilde),
        jacobian,
    })
}

/// θ̃ = θ + δ, δ_i uniform on [−c/t₁, c/t₁].
pub fn stage1_oracle(theta: &[f64], t1: f64, c: f64, seed: u64) -> Result<Vec<f64>> {
    if !(t1 > 0.0 && t1.is_finite()) {
        return Err(Error::InvalidInput(format!("t1 must be positive, got {t1}")));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("c must be finite and ≥ 0, got {c}")));
    }
    let mut cursor = SeedStream::new(seed).cursor(Domain::StageOne, 0);
    let half = c / t1;
    Ok(theta
        .iter()
        .map(|x| x + half * (2.0 * cursor.uniform() - 1.0))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderBounds {
    /// ½ m G_max L_f r² δ²
    pub hamiltonian: f64,
    /// ½ L_q r² δ²
    pub target: f64,
    /// m G_max r L_f δ
    pub generator_shift: f64,
}

pub fn remainder_bounds(problem: &GeneralProblem, delta_inf: f64) -> Result<RemainderBounds> {
    if !(delta_inf >= 0.0) {
        return Err(Error::InvalidInput(format!("δ must be ≥ 0, got {delta_inf}")));
    }
    let (m, r) = (problem.m() as f64, problem.r() as f64);
    let d2 = delta_inf * delta_inf;
    Ok(RemainderBounds {
        hamiltonian: 0.5 * m * problem.g_max * problem.l_f * r * r * d2,
        target: 0.5 * problem.l_q * r * r * d2,
        generator_shift: m * problem.g_max * r * problem.l_f * delta_inf,
    })
}

/// ‖Û_true − Û_lin‖ ≤ t₂ ‖R̂_H‖
pub fn mismatch_bound(t2: f64, remainder: f64) -> Result<f64> {
    if !(t2 >= 0.0 && remainder >= 0.0) {
        return Err(Error::InvalidInput("mismatch bound needs nonnegative inputs".into()));
    }
    Ok(t2 * remainder)
}

/// Stage-2 propagators after subtracting the known term Σ_j f_j(θ̃)ĝ_j: the
/// true one and the one of the linearized Hamiltonian Σ_i δθ_i ĥ_i.
pub fn stage_two_unitaries(
    problem: &GeneralProblem,
    theta: &[f64],
    theta_tilde: &[f64],
    t2: f64,
) -> Result<(CMatrix, CMatrix)> {
    let lin = linearize_at(problem, theta_tilde)?;
    let delta: Vec<f64> = theta.iter().zip(theta_tilde).map(|(a, b)| a - b).collect();
    let h_true = problem
        .hamiltonian(theta)
        .minus(&problem.hamiltonian(theta_tilde));
    let h_lin = lin.problem.generators.combine(&delta, 0.0);
    Ok((h_true.evolution(t2)?, h_lin.evolution(t2)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStepConfig {
    pub total_time: f64,
    pub exponent: f64,
    pub stage1_constant: f64,
    pub shots: usize,
    /// Shots spent locating the reference phase; 0 uses Φ_ref = 0.
    pub pilot_shots: usize,
    pub seed: u64,
    pub tol: f64,
}

impl TwoStepConfig {
    pub fn new(total_time: f64, shots: usize, seed: u64) -> Self {
        Self {
            total_time,
            exponent: DEFAULT_EXPONENT,
            stage1_constant: 0.05,
            shots,
            pilot_shots: shots / 10,
            seed,
            tol: DEFAULT_TOL,
        }
    }

    /// (t₁, t₂) = (t^p, t − t^p).
    pub fn split(&self) -> Result<(f64, f64)> {
        if !(self.exponent > 0.5 && self.exponent < 1.0) {
            return Err(Error::InvalidInput(format!(
                "exponent must lie in (1/2, 1), got {}",
                self.exponent
            )));
        }
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(Error::InvalidInput("total time must be positive".into()));
        }
        let t1 = self.total_time.powf(self.exponent);
        let t2 = self.total_time - t1;
        if t2 <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "t = {} leaves no time for the second stage",
                self.total_time
            )));
        }
        Ok((t1, t2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStepDiagnostics {
    pub t1: f64,
    pub t2: f64,
    pub theta_tilde: Vec<f64>,
    /// Realized ‖θ − θ̃‖∞.
    pub delta_inf: f64,
    /// c/t₁, the error bound stage 1 guarantees.
    pub delta_bound: f64,
    pub gamma_tilde: f64,
    pub gamma_true: f64,
    pub remainders: RemainderBounds,
    pub mismatch_bound: f64,
    /// Stability interval around γ at θ with the measured ε_g, ε_α; `None`
    /// when ε_g ≥ κ.
    pub perturbation: Option<PerturbationReport>,
    pub gamma_tilde_in_interval: Option<bool>,
    pub q_true: f64,
    pub offset: f64,
    pub phi_true: f64,
    /// (E q_est − q)² + Var q_est for one shot, from the exact outcome
    /// probabilities and the pilot's reference phase.
    pub exact_mse_per_shot: f64,
    /// The same with the reference phase set to the true Φ, which isolates
    /// the linearization error from pilot noise.
    pub locked_mse_per_shot: f64,
    /// |Φ| < π/2, so the arcsin pilot can locate the phase.
    pub phase_resolved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepRun {
    pub result: SimulationResult,
    pub diagnostics: TwoStepDiagnostics,
    pub solution: BoundSolution,
}

fn pilot_phase(probs: &[f64; 3], shots: usize, seed: u64) -> f64 {
    if shots == 0 {
        return 0.0;
    }
    let mut cursor = SeedStream::new(seed).cursor(Domain::Pilot, 0);
    let sum: f64 = (0..shots)
        .map(|_| f64::from(classify(probs, cursor.uniform())))
        .sum();
    let mean = sum / shots as f64;
    mean.clamp(-1.0, 1.0)
        .asin()
        .clamp(-PILOT_PHASE_CLAMP, PILOT_PHASE_CLAMP)
}

pub fn run_two_step(
    problem: &GeneralProblem,
    theta: &[f64],
    config: &TwoStepConfig,
) -> Result<TwoStepRun> {
    if theta.len() != problem.r() {
        return Err(Error::DimensionMismatch {
            expected: problem.r(),
            found: theta.len(),
        });
    }
    if config.shots < 2 {
        return Err(Error::InvalidInput("at least two shots are required".into()));
    }
    let (t1, t2) = config.split()?;
    let theta_tilde = stage1_oracle(theta, t1, config.stage1_constant, config.seed)?;
    let delta_bound = config.stage1_constant / t1;
    let delta: Vec<f64> = theta.iter().zip(&theta_tilde).map(|(a, b)| a - b).collect();
    let delta_inf = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));

    let lin = linearize_at(problem, &theta_tilde)?;
    let solution = solve(&lin.problem, config.tol)?;
    if solution.degenerate {
        return Err(Error::Degenerate);
    }
    let truth = linearize_at(problem, theta)?;
    let gamma_true = solve(&truth.problem, config.tol)?.gamma;

    let eps_g = lin
        .problem
        .generators
        .generators()
        .iter()
        .zip(truth.problem.generators.generators())
        .map(|(a, b)| spectral_norm(&a.minus(b)))
        .try_fold(0.0f64, |acc, n| Ok::<_, Error>(acc.max(n?)))?;
    let eps_alpha = lin
        .problem
        .alpha
        .iter()
        .zip(&truth.problem.alpha)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let perturbation = if problem.r() <= crate::bound::KAPPA_MAX_GENERATORS {
        let kappa = conditioning_kappa(&truth.problem.generators)?;
        perturbation_interval(gamma_true, kappa, eps_g, eps_alpha).ok()
    } else {
        None
    };
    let gamma_tilde_in_interval = perturbation.as_ref().map(|p| p.contains(solution.gamma));

    // Stage 2 runs under the true couplings with the known term subtracted.
    let schedule = plan_schedule(&solution, t2)?;
    let h_stage2 = problem
        .hamiltonian(theta)
        .minus(&problem.hamiltonian(&theta_tilde));
    let h_eff = twirl_exact(&h_stage2, &solution.basis)?;
    let ev = evolve_ideal(&schedule, &h_eff, &solution.basis)?;
    let probs = outcome_probabilities(&ev.state, schedule.final_pair);

    let phi_ref = pilot_phase(&probs, config.pilot_shots, config.seed);
    let cos = phi_ref.cos();
    if cos.abs() < MIN_SLOPE {
        return Err(Error::SlopeDegenerate { cos });
    }
    let samples = sample_outcomes(&probs, config.shots, config.seed, true);
    let mut result = estimate_from_samples(samples, solution.gamma, t2, phi_ref, config.seed);
    result.q_estimate += lin.offset;
    let q_true = problem.target.value(theta);
    result.bias_estimate = Some(result.q_estimate - q_true);

    let scale = solution.gamma / t2;
    let mean = probs[2] - probs[0];
    let second = probs[2] + probs[0];
    let expected = lin.offset + scale * phi_ref + scale * (mean - phi_ref.sin()) / cos;
    let var = scale * scale * (second - mean * mean) / (cos * cos);
    let exact_mse_per_shot = var + (expected - q_true).powi(2);
    let locked_mse_per_shot = {
        let (c, sn) = (ev.phi.cos(), ev.phi.sin());
        let expected = lin.offset + scale * ev.phi + scale * (mean - sn) / c;
        scale * scale * (second - mean * mean) / (c * c) + (expected - q_true).powi(2)
    };

    let remainders = remainder_bounds(problem, delta_bound)?;
    let diagnostics = TwoStepDiagnostics {
        t1,
        t2,
        theta_tilde,
        delta_inf,
        delta_bound,
        gamma_tilde: solution.gamma,
        gamma_true,
        mismatch_bound: mismatch_bound(t2, remainders.hamiltonian)?,
        remainders,
        perturbation,
        gamma_tilde_in_interval,
        q_true,
        offset: lin.offset,
        phi_true: ev.phi,
        exact_mse_per_shot,
        locked_mse_per_shot,
        phase_resolved: ev.phi.abs() < std::f64::consts::FRAC_PI_2,
    };
    Ok(TwoStepRun {
        result,
        diagnostics,
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli_from_label;

    fn zx() -> GeneratorSet {
        GeneratorSet::new(vec![
            pauli_from_label("Z").unwrap(),
            pauli_from_label("X").unwrap(),
        ])
        .unwrap()
    }

    fn square_problem() -> GeneralProblem {
        let f = PolynomialCouplings::new(
            2,
            vec![
                Polynomial::new(vec![Monomial {
                    coeff: 1.0,
                    powers: vec![2, 0],
                }]),
                Polynomial::linear(&[0.0, 1.0]),
            ],
        )
        .unwrap();
        let q = Polynomial::new(vec![Monomial {
            coeff: 1.0,
            powers: vec![1, 1],
        }]);
        GeneralProblem::new(zx(), Box::new(f), Box::new(q), 2.0, 1.0).unwrap()
    }

    #[test]
    fn chain_rule_linearization() {
        let p = square_problem();
        let lin = linearize_at(&p, &[1.0, 2.0]).unwrap();
        assert_eq!(lin.jacobian, vec![vec![2.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(lin.problem.alpha, vec![2.0, 1.0]);
        assert_eq!(lin.offset, 2.0);
        let z2 = pauli_from_label("Z").unwrap().scaled(2.0);
        assert!((lin.problem.generators.get(0).matrix() - z2.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn identity_couplings_are_unchanged() {
        let p = GeneralProblem::new(
            zx(),
            Box::new(PolynomialCouplings::identity(2)),
            Box::new(Polynomial::linear(&[0.3, -0.7])),
            0.0,
            0.0,
        )
        .unwrap();
        let lin = linearize_at(&p, &[0.4, 0.1]).unwrap();
        assert_eq!(lin.problem.alpha, vec![0.3, -0.7]);
        for j in 0..2 {
            let d = lin.problem.generators.get(j).minus(p.generators.get(j));
            assert_eq!(d.matrix().max_abs(), 0.0);
        }
    }

    #[test]
    fn rank_deficient_jacobian() {
        let p = square_problem();
        assert!(matches!(
            linearize_at(&p, &[0.0, 2.0]),
            Err(Error::IllPosedLinearization { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn wrong_derivatives_refused() {
        struct Bad;
        impl Target for Bad {
            fn value(&self, t: &[f64]) -> f64 {
                t[0] * t[0]
            }
            fn gradient(&self, t: &[f64]) -> Vec<f64> {
                vec![t[0], 0.0]
            }
        }
        let r = GeneralProblem::new(
            zx(),
            Box::new(PolynomialCouplings::identity(2)),
            Box::new(Bad),
            0.0,
            2.0,
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn stage_one_support() {
        let theta = [1.0, -2.0, 0.5];
        assert_eq!(stage1_oracle(&theta, 3.0, 0.0, 9).unwrap(), theta.to_vec());
        for seed in 0..50 {
            let tt = stage1_oracle(&theta, 10.0, 1.0, seed).unwrap();
            for (a, b) in tt.iter().zip(&theta) {
                assert!((a - b).abs() <= 0.1);
            }
        }
        let far = stage1_oracle(&theta, 1e12, 1.0, 3).unwrap();
        assert!(far.iter().zip(&theta).all(|(a, b)| (a - b).abs() < 1e-11));
    }

    #[test]
    fn bound_formulas() {
        let p = GeneralProblem::new(
            zx(),
            Box::new(PolynomialCouplings::identity(2)),
            Box::new(Polynomial::linear(&[1.0, 1.0])),
            1.0,
            0.0,
        )
        .unwrap();
        let b = remainder_bounds(&p, 0.1).unwrap();
        assert!((b.hamiltonian - 0.04).abs() < 1e-15);
        assert!((b.generator_shift - 0.4).abs() < 1e-15);
        assert_eq!(remainder_bounds(&p, 0.0).unwrap().hamiltonian, 0.0);
        assert!((mismatch_bound(10.0, 0.04).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(mismatch_bound(10.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn split_window() {
        let c = TwoStepConfig::new(1e4, 10, 0);
        let (t1, t2) = c.split().unwrap();
        assert!((t1 - 1e3).abs() < 1e-9);
        assert!((t2 - 9e3).abs() < 1e-9);
        let mut bad = c.clone();
        bad.exponent = 0.5;
        assert!(bad.split().is_err());
    }

    #[test]
    fn two_step_runs() {
        let p = square_problem();
        let run = run_two_step(&p, &[1.0, 2.0], &TwoStepConfig::new(1e3, 2000, 4)).unwrap();
        let d = &run.diagnostics;
        assert!((d.gamma_true - 0.5f64.sqrt()).abs() < 1e-7);
        assert!(d.delta_inf <= d.delta_bound);
        assert_eq!(d.gamma_tilde_in_interval, Some(true));
        assert!(run.result.bias_estimate.unwrap().abs() < 10.0 * d.gamma_true / d.t2);
    }
}
