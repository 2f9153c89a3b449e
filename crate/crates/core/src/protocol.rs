//! Branch-swap protocol: a two-branch superposition over basis states of 𝒦
//! whose left branch dwells on the positive support of the witness and whose
//! right branch dwells on the negative support, so the accumulated relative
//! phase is Φ = q t / γ.
//!
//! Conventions: evolution is e^{−iĤt}; states are written
//! (|x⟩ + e^{iΦ}|y⟩)/√2 so Φ = (Σ_x dwell_x h_xx) − (Σ_y dwell_y h_yy); the
//! readout is M̂ = i|y″⟩⟨x″| − i|x″⟩⟨y″| with ⟨M̂⟩ = sin Φ.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{BoundSolution, LinearProblem};
use crate::error::{Error, Result};
use crate::operator::{CMatrix, EigenDecomposition, HermitianOperator, C64};
use crate::reshaping::{build_dephasing_set, twirl_exact, DephasingSet, ReshapingPlan, StepPropagator};
use crate::stream::{Domain, SeedStream};

/// Tolerance on off-diagonal weight of Ĥ_eff in 𝒦 for ideal evolution.
pub const DIAGONAL_TOL: f64 = 1e-10;
/// Smallest |cos Φ_ref| accepted by the linearized estimator.
pub const MIN_SLOPE: f64 = 0.1;
/// Largest relative dwell-time change allowed when snapping swaps to steps.
pub const DWELL_ROUNDING_TOL: f64 = 1e-3;
const SHOT_CHUNK: usize = 4096;

/// Ŝ_{k,k′} = |k⟩⟨k′| + |k′⟩⟨k| + Σ_{k″≠k,k′} |k″⟩⟨k″| in the computational frame.
/// `k == k2` yields the identity.
pub fn swap_unitary(k: usize, k2: usize, basis: &EigenDecomposition) -> Result<CMatrix> {
    let n = basis.dim();
    if k >= n || k2 >= n {
        return Err(Error::InvalidInput(format!(
            "swap indices ({k}, {k2}) outside 0..{n}"
        )));
    }
    let perm = |i: usize| {
        if i == k {
            k2
        } else if i == k2 {
            k
        } else {
            i
        }
    };
    let p = CMatrix::from_fn(n, |i, j| {
        if perm(j) == i {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(basis.from_basis_coords(&p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapEvent {
    pub time: f64,
    pub branch: Branch,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSchedule {
    pub pair0: (usize, usize),
    /// Sorted by time; at equal times left events precede right events.
    pub swaps: Vec<SwapEvent>,
    pub total_time: f64,
    pub final_pair: (usize, usize),
    /// (index, dwell time) in visiting order.
    pub left_dwell: Vec<(usize, f64)>,
    pub right_dwell: Vec<(usize, f64)>,
}

fn branch_plan(support: &[usize], weights: &[f64], t: f64) -> Vec<(usize, f64)> {
    let total: f64 = support.iter().map(|&k| weights[k].abs()).sum();
    support
        .iter()
        .map(|&k| (k, weights[k].abs() * t / total))
        .collect()
}

fn branch_events(dwell: &[(usize, f64)], branch: Branch) -> Vec<SwapEvent> {
    let mut clock = 0.0;
    dwell
        .windows(2)
        .map(|w| {
            clock += w[0].1;
            SwapEvent {
                time: clock,
                branch,
                from: w[0].0,
                to: w[1].0,
            }
        })
        .collect()
}

pub fn plan_schedule(solution: &BoundSolution, t: f64) -> Result<ProtocolSchedule> {
    if solution.degenerate || solution.gamma == 0.0 {
        return Err(Error::Degenerate);
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("total time must be positive, got {t}")));
    }
    if solution.support_pos.is_empty() || solution.support_neg.is_empty() {
        return Err(Error::InvalidInput(
            "witness must have both positive and negative support".into(),
        ));
    }
    let left = branch_plan(&solution.support_pos, &solution.weights, t);
    let right = branch_plan(&solution.support_neg, &solution.weights, t);
    let mut swaps = branch_events(&left, Branch::Left);
    swaps.extend(branch_events(&right, Branch::Right));
    swaps.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then((a.branch == Branch::Right).cmp(&(b.branch == Branch::Right)))
    });
    Ok(ProtocolSchedule {
        pair0: (left[0].0, right[0].0),
        final_pair: (left[left.len() - 1].0, right[right.len() - 1].0),
        swaps,
        total_time: t,
        left_dwell: left,
        right_dwell: right,
    })
}

impl ProtocolSchedule {
    /// Φ for a Hamiltonian with diagonal `h` in 𝒦.
    pub fn phase(&self, h: &[f64]) -> f64 {
        let l: f64 = self.left_dwell.iter().map(|&(k, d)| d * h[k]).sum();
        let r: f64 = self.right_dwell.iter().map(|&(k, d)| d * h[k]).sum();
        l - r
    }

    /// (|x₀⟩ + |y₀⟩)/√2 in 𝒦 coordinates.
    pub fn initial_state(&self, n: usize) -> Vec<C64> {
        let mut psi = vec![C64::new(0.0, 0.0); n];
        let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[self.pair0.0] = a;
        psi[self.pair0.1] = a;
        psi
    }
}

fn apply_swap(psi: &mut [C64], e: &SwapEvent) {
    psi.swap(e.from, e.to);
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealEvolution {
    /// Final amplitudes in 𝒦 coordinates.
    pub state: Vec<C64>,
    pub phi: f64,
    /// Smallest weight of the state on its current branch pair, checked
    /// at every event.
    pub min_branch_weight: f64,
}

/// Evolves under Ĥ_eff (diagonal in 𝒦) with the scheduled swaps.
pub fn evolve_ideal(
    schedule: &ProtocolSchedule,
    h_eff: &HermitianOperator,
    basis: &EigenDecomposition,
) -> Result<IdealEvolution> {
    let n = basis.dim();
    let hk = basis.to_basis(h_eff.matrix());
    let off = hk.off_diagonal_norm();
    if off > DIAGONAL_TOL * hk.frobenius_norm().max(1.0) {
        return Err(Error::NonDiagonal { off_norm: off });
    }
    let h: Vec<f64> = hk.diagonal().iter().map(|z| z.re).collect();
    let mut psi = schedule.initial_state(n);
    let mut pair = schedule.pair0;
    let mut clock = 0.0;
    let mut min_weight = 1.0f64;
    let advance = |psi: &mut Vec<C64>, dt: f64| {
        for (a, &e) in psi.iter_mut().zip(&h) {
            *a *= C64::from_polar(1.0, -e * dt);
        }
    };
    for ev in &schedule.swaps {
        advance(&mut psi, ev.time - clock);
        clock = ev.time;
        min_weight = min_weight.min(psi[pair.0].norm_sqr() + psi[pair.1].norm_sqr());
        apply_swap(&mut psi, ev);
        match ev.branch {
            Branch::Left => pair.0 = ev.to,
            Branch::Right => pair.1 = ev.to,
        }
    }
    advance(&mut psi, schedule.total_time - clock);
    min_weight = min_weight.min(psi[pair.0].norm_sqr() + psi[pair.1].norm_sqr());
    Ok(IdealEvolution {
        state: psi,
        phi: schedule.phase(&h),
        min_branch_weight: min_weight,
    })
}

/// Relative phase arg(ψ_y / ψ_x) of the final pair, unwrapped to the branch
/// nearest `reference`.
pub fn relative_phase(state: &[C64], pair: (usize, usize), reference: f64) -> f64 {
    let raw = (state[pair.1] * state[pair.0].conj()).arg();
    reference + wrap(raw - reference)
}

fn wrap(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    x - tau * ((x + std::f64::consts::PI) / tau).floor()
}

/// Outcome probabilities (p₋₁, p₀, p₊₁) of M̂ on `state`.
pub fn outcome_probabilities(state: &[C64], pair: (usize, usize)) -> [f64; 3] {
    let (x, y) = (state[pair.0], state[pair.1]);
    let i = C64::new(0.0, 1.0);
    let plus = 0.5 * (x - i * y).norm_sqr();
    let minus = 0.5 * (x + i * y).norm_sqr();
    let total: f64 = state.iter().map(|a| a.norm_sqr()).sum();
    [minus, (total - plus - minus).max(0.0), plus]
}

/// ⟨M̂⟩ on `state`.
pub fn readout_expectation(state: &[C64], pair: (usize, usize)) -> f64 {
    let p = outcome_probabilities(state, pair);
    p[2] - p[0]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// Outcomes in {−1, 0, +1}; 0 marks population outside the branch pair.
    pub samples: Vec<i8>,
    pub mean: f64,
    pub q_estimate: f64,
    /// Single-shot variance of the estimator, so Var(q_est) ≈ this / shots.
    pub variance_estimate: f64,
    /// q_est − q when the true value is known to the caller.
    pub bias_estimate: Option<f64>,
    pub shots: usize,
    pub seed: u64,
    pub phi_ref: f64,
}

impl SimulationResult {
    pub fn counts(&self) -> [u64; 3] {
        let mut c = [0u64; 3];
        for &s in &self.samples {
            c[(s + 1) as usize] += 1;
        }
        c
    }

    pub fn record(&self) -> SimulationRecord {
        SimulationRecord {
            q_estimate: self.q_estimate,
            variance_estimate: self.variance_estimate,
            bias_estimate: self.bias_estimate,
            mean: self.mean,
            shots: self.shots,
            seed: self.seed,
            phi_ref: self.phi_ref,
            counts: self.counts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub q_estimate: f64,
    pub variance_estimate: f64,
    pub bias_estimate: Option<f64>,
    pub mean: f64,
    pub shots: usize,
    pub seed: u64,
    pub phi_ref: f64,
    /// Outcome counts for −1, 0, +1.
    pub counts: [u64; 3],
}

/// Samples `shots` outcomes; each depends only on (seed, shot index), so the
/// parallel result is identical to the sequential one.
pub fn sample_outcomes(probs: &[f64; 3], shots: usize, seed: u64, parallel: bool) -> Vec<i8> {
    let stream = SeedStream::new(seed);
    if parallel {
        let mut out = vec![0i8; shots];
        out.par_chunks_mut(SHOT_CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                let start = (c * SHOT_CHUNK) as u64;
                let mut cursor = stream.cursor(Domain::Shots, start);
                for s in chunk.iter_mut() {
                    *s = classify(probs, cursor.uniform());
                }
            });
        out
    } else {
        let mut cursor = stream.cursor(Domain::Shots, 0);
        (0..shots).map(|_| classify(probs, cursor.uniform())).collect()
    }
}

pub(crate) fn classify(probs: &[f64; 3], u: f64) -> i8 {
    if u < probs[2] {
        1
    } else if u < probs[2] + probs[0] {
        -1
    } else {
        0
    }
}

/// Method-of-moments estimate of q around the reference phase Φ_ref:
/// q_est = γΦ_ref/t + (γ/t)(mean − sin Φ_ref)/cos Φ_ref.
pub fn measure_and_estimate(
    final_pair: (usize, usize),
    state: &[C64],
    gamma: f64,
    t: f64,
    phi_ref: f64,
    shots: usize,
    seed: u64,
) -> Result<SimulationResult> {
    if shots < 2 {
        return Err(Error::InvalidInput("at least two shots are required".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::Degenerate);
    }
    let cos = phi_ref.cos();
    if cos.abs() < MIN_SLOPE {
        return Err(Error::SlopeDegenerate { cos });
    }
    let probs = outcome_probabilities(state, final_pair);
    let samples = sample_outcomes(&probs, shots, seed, true);
    Ok(estimate_from_samples(samples, gamma, t, phi_ref, seed))
}

pub(crate) fn estimate_from_samples(
    samples: Vec<i8>,
    gamma: f64,
    t: f64,
    phi_ref: f64,
    seed: u64,
) -> SimulationResult {
    let shots = samples.len();
    let sum: i64 = samples.iter().map(|&s| i64::from(s)).sum();
    let mean = sum as f64 / shots as f64;
    let ss: f64 = samples
        .iter()
        .map(|&s| (f64::from(s) - mean).powi(2))
        .sum();
    let sample_var = ss / (shots - 1) as f64;
    let scale = gamma / t;
    let cos = phi_ref.cos();
    let q_estimate = scale * phi_ref + scale * (mean - phi_ref.sin()) / cos;
    SimulationResult {
        samples,
        mean,
        q_estimate,
        variance_estimate: scale * scale * sample_var / (cos * cos),
        bias_estimate: None,
        shots,
        seed,
        phi_ref,
    }
}

/// Steps at which each swap is applied, or a grid-alignment error when
/// snapping to the step grid moves some dwell time by more than
/// [`DWELL_ROUNDING_TOL`].
pub fn snap_to_grid(schedule: &ProtocolSchedule, steps: usize) -> Result<Vec<usize>> {
    let dt = schedule.total_time / steps as f64;
    let idx: Vec<usize> = schedule
        .swaps
        .iter()
        .map(|e| (e.time / dt).round() as usize)
        .collect();
    for branch in [Branch::Left, Branch::Right] {
        let dwell = match branch {
            Branch::Left => &schedule.left_dwell,
            Branch::Right => &schedule.right_dwell,
        };
        let mut bounds = vec![0usize];
        bounds.extend(
            schedule
                .swaps
                .iter()
                .zip(&idx)
                .filter(|(e, _)| e.branch == branch)
                .map(|(_, &i)| i),
        );
        bounds.push(steps);
        for (k, w) in bounds.windows(2).enumerate() {
            let got = w[1].saturating_sub(w[0]) as f64 * dt;
            let want = dwell[k].1;
            if (got - want).abs() > DWELL_ROUNDING_TOL * want || w[1] < w[0] {
                let (index, time) = schedule
                    .swaps
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.branch == branch)
                    .nth(k.min(dwell.len().saturating_sub(2)))
                    .map(|(i, e)| (i, e.time))
                    .unwrap_or((0, 0.0));
                return Err(Error::GridAlignment { index, time, dt });
            }
        }
    }
    Ok(idx)
}

/// Smallest step count ≥ `min_steps` on which every dwell time is
/// represented to within [`DWELL_ROUNDING_TOL`].
pub fn aligned_steps(schedule: &ProtocolSchedule, min_steps: usize) -> Result<usize> {
    let min_steps = min_steps.max(1);
    if schedule.swaps.is_empty() {
        return Ok(min_steps);
    }
    // Every dwell needs at least 1/tol steps' worth of resolution.
    let shortest = schedule
        .left_dwell
        .iter()
        .chain(&schedule.right_dwell)
        .map(|d| d.1)
        .fold(f64::INFINITY, f64::min);
    let floor = (schedule.total_time / (shortest * DWELL_ROUNDING_TOL)).ceil() as usize;
    let limit = min_steps.max(floor).saturating_mul(4);
    let mut last_err = None;
    for l in min_steps..=limit {
        match snap_to_grid(schedule, l) {
            Ok(_) => return Ok(l),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("loop ran"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReshapedEvolution {
    pub state: Vec<C64>,
    /// Relative phase of the final pair, unwrapped toward the ideal Φ.
    pub phi: f64,
    pub phi_ideal: f64,
}

/// Interleaves the product-formula steps under Ĥ₀ with the scheduled swaps,
/// applying the swaps due at a step boundary before that step.
pub fn evolve_with_reshaping(
    schedule: &ProtocolSchedule,
    h0: &HermitianOperator,
    plan: &ReshapingPlan,
    dephasing: &DephasingSet,
) -> Result<ReshapedEvolution> {
    if (plan.total_time - schedule.total_time).abs() > 1e-12 * schedule.total_time.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "plan time {} differs from schedule time {}",
            plan.total_time, schedule.total_time
        )));
    }
    let idx = snap_to_grid(schedule, plan.steps)?;
    let n = dephasing.dim();
    let prop = StepPropagator::new(h0, plan.dt(), dephasing)?;
    let mut psi = schedule.initial_state(n);
    let mut next = 0;
    for (l, &s) in plan.sampled_indices.iter().enumerate() {
        while next < schedule.swaps.len() && idx[next] <= l {
            apply_swap(&mut psi, &schedule.swaps[next]);
            next += 1;
        }
        prop.apply(s, &mut psi);
    }
    while next < schedule.swaps.len() {
        apply_swap(&mut psi, &schedule.swaps[next]);
        next += 1;
    }
    let h_eff = twirl_exact(h0, &dephasing.basis)?;
    let phi_ideal = schedule.phase(&dephasing.basis.diagonal_of(&h_eff));
    let phi = relative_phase(&psi, schedule.final_pair, phi_ideal);
    Ok(ReshapedEvolution {
        state: psi,
        phi,
        phi_ideal,
    })
}

/// Options for [`simulate_linear`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRunConfig {
    pub total_time: f64,
    pub shots: usize,
    pub seed: u64,
    /// Product-formula steps; `None` evolves under the exact twirl.
    pub reshape_steps: Option<usize>,
    /// Reference phase; `None` uses the ideal phase of the true parameters.
    pub phi_ref: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRun {
    pub result: SimulationResult,
    pub schedule: ProtocolSchedule,
    pub q_true: f64,
    pub phi_ideal: f64,
    pub phi_final: f64,
    /// Product-formula step count actually used, after grid alignment.
    pub steps: Option<usize>,
}

/// Full linear pipeline: schedule from the witness, evolve under
/// Ĥ₀ = Σ θ_j ĝ_j (+ `extra`), read out, estimate.
pub fn simulate_linear(
    problem: &LinearProblem,
    solution: &BoundSolution,
    theta: &[f64],
    extra: Option<&HermitianOperator>,
    config: &LinearRunConfig,
) -> Result<LinearRun> {
    if theta.len() != problem.m() {
        return Err(Error::DimensionMismatch {
            expected: problem.m(),
            found: theta.len(),
        });
    }
    let schedule = plan_schedule(solution, config.total_time)?;
    let mut h0 = problem.generators.combine(theta, 0.0);
    if let Some(e) = extra {
        h0 = h0.plus(e);
    }
    let q_true = crate::bound::dot(&problem.alpha, theta);
    let basis = &solution.basis;
    let (state, phi_ideal, phi_final, steps) = match config.reshape_steps {
        None => {
            let h_eff = twirl_exact(&h0, basis)?;
            let ev = evolve_ideal(&schedule, &h_eff, basis)?;
            (ev.state, ev.phi, ev.phi, None)
        }
        Some(min_steps) => {
            let steps = aligned_steps(&schedule, min_steps)?;
            let set = build_dephasing_set(basis);
            let plan = ReshapingPlan::sample(config.total_time, steps, basis.dim(), config.seed)?;
            let ev = evolve_with_reshaping(&schedule, &h0, &plan, &set)?;
            (ev.state, ev.phi_ideal, ev.phi, Some(steps))
        }
    };
    let phi_ref = config.phi_ref.unwrap_or(phi_ideal);
    let mut result = measure_and_estimate(
        schedule.final_pair,
        &state,
        solution.gamma,
        config.total_time,
        phi_ref,
        config.shots,
        config.seed,
    )?;
    result.bias_estimate = Some(result.q_estimate - q_true);
    Ok(LinearRun {
        result,
        schedule,
        q_true,
        phi_ideal,
        phi_final,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{solve, DualCertificate};
    use crate::operator::{pauli_from_label, GeneratorSet};

    fn solution_with_weights(a: &[f64]) -> BoundSolution {
        let n = a.len();
        let basis = EigenDecomposition {
            values: a.to_vec(),
            vectors: CMatrix::identity(n),
        };
        BoundSolution {
            gamma: a.iter().filter(|v| **v > 0.0).sum(),
            witness: HermitianOperator::new(basis.reconstruct()).unwrap(),
            weights: a.to_vec(),
            support_pos: (0..n).filter(|&k| a[k] > 0.0).collect(),
            support_neg: (0..n).filter(|&k| a[k] < 0.0).collect(),
            basis,
            dual: DualCertificate::zero(1),
            gap: 0.0,
            degenerate: false,
            kappa: None,
        }
    }

    #[test]
    fn swap_examples() {
        let comp = EigenDecomposition::computational(2);
        let x = pauli_from_label("X").unwrap();
        assert!((&swap_unitary(0, 1, &comp).unwrap() - x.matrix()).max_abs() < 1e-15);
        let s = swap_unitary(0, 2, &EigenDecomposition::computational(3)).unwrap();
        assert_eq!(s[(1, 1)], C64::new(1.0, 0.0));
        assert_eq!(s[(0, 2)], C64::new(1.0, 0.0));
        assert!((&(&s * &s) - &CMatrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn schedule_examples() {
        let s = plan_schedule(&solution_with_weights(&[0.5, -0.5]), 1.0).unwrap();
        assert!(s.swaps.is_empty());
        assert_eq!((s.pair0, s.final_pair), ((0, 1), (0, 1)));

        let s = plan_schedule(&solution_with_weights(&[0.5, -0.3, -0.2]), 1.0).unwrap();
        assert_eq!(s.swaps.len(), 1);
        let e = &s.swaps[0];
        assert_eq!((e.branch, e.from, e.to), (Branch::Right, 1, 2));
        assert!((e.time - 0.6).abs() < 1e-15);
        let h = [0.3, -1.1, 0.7];
        let want = 0.3 - (0.6 * -1.1 + 0.4 * 0.7);
        assert!((s.phase(&h) - want).abs() < 1e-15);
    }

    #[test]
    fn qubit_phase_and_readout() {
        let gs = GeneratorSet::new(vec![pauli_from_label("Z").unwrap()]).unwrap();
        let p = LinearProblem::new(gs, vec![1.0]).unwrap();
        let sol = solve(&p, 1e-9).unwrap();
        let (theta, t) = (0.3, 0.8);
        let sch = plan_schedule(&sol, t).unwrap();
        let h = pauli_from_label("Z").unwrap().scaled(theta);
        let ev = evolve_ideal(&sch, &h, &sol.basis).unwrap();
        assert!((ev.phi - 2.0 * theta * t).abs() < 1e-12);
        let seen = relative_phase(&ev.state, sch.final_pair, 0.0);
        assert!((seen - ev.phi).abs() < 1e-12);
        let m = readout_expectation(&ev.state, sch.final_pair);
        assert!((m - ev.phi.sin()).abs() < 1e-12);
    }

    #[test]
    fn extremal_phase_gives_constant_outcomes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let state = [C64::new(h, 0.0), C64::new(0.0, h)]; // Φ = π/2
        let probs = outcome_probabilities(&state, (0, 1));
        assert!((probs[2] - 1.0).abs() < 1e-15);
        let s = sample_outcomes(&probs, 1000, 3, true);
        assert!(s.iter().all(|&v| v == 1));
    }

    #[test]
    fn parallel_sampling_is_sequential_sampling() {
        let probs = [0.3, 0.05, 0.65];
        let a = sample_outcomes(&probs, 20_000, 11, true);
        let b = sample_outcomes(&probs, 20_000, 11, false);
        assert_eq!(a, b);
        assert_eq!(a[12_345], classify(&probs, SeedStream::new(11).uniform(Domain::Shots, 12_345)));
    }

    #[test]
    fn slope_guard() {
        let state = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let r = measure_and_estimate((0, 1), &state, 0.5, 1.0, 1.55, 10, 0);
        assert!(matches!(r, Err(Error::SlopeDegenerate { .. })));
    }

    #[test]
    fn degenerate_refused() {
        let gs = GeneratorSet::new(vec![pauli_from_label("Z").unwrap()]).unwrap();
        let p = LinearProblem::new(gs, vec![0.0]).unwrap();
        let sol = solve(&p, 1e-9).unwrap();
        assert_eq!(plan_schedule(&sol, 1.0), Err(Error::Degenerate));
    }
}
