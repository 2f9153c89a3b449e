//! Projection of a Hamiltonian onto its diagonal in a chosen basis 𝒦, exactly
//! (twirl) or approximately through the randomized product
//! V̂ = Π_l Û†_{s_l} e^{−iĤΔt} Û_{s_l} with Û_s = Σ_k ω^{sk}|k⟩⟨k|.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{eig_hermitian, CMatrix, EigenDecomposition, HermitianOperator, C64};
use crate::stream::{Domain, SeedStream};

/// The N cyclic-character unitaries, stored as their phases in 𝒦.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingSet {
    pub basis: EigenDecomposition,
    /// `phases[s][k] = ω^{sk}`, ω = e^{2πi/N}
    pub phases: Vec<Vec<C64>>,
}

impl DephasingSet {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Û_s in the computational frame.
    pub fn unitary(&self, s: usize) -> CMatrix {
        self.basis
            .from_basis_coords(&CMatrix::from_diagonal(&self.phases[s]))
    }
}

pub fn build_dephasing_set(basis: &EigenDecomposition) -> DephasingSet {
    let n = basis.dim();
    let phases = (0..n)
        .map(|s| {
            (0..n)
                .map(|k| C64::from_polar(1.0, 2.0 * PI * ((s * k) % n) as f64 / n as f64))
                .collect()
        })
        .collect();
    DephasingSet {
        basis: basis.clone(),
        phases,
    }
}

/// Σ_k ⟨k|H|k⟩ |k⟩⟨k|
pub fn twirl_exact(h: &HermitianOperator, basis: &EigenDecomposition) -> Result<HermitianOperator> {
    if h.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: h.dim(),
        });
    }
    let d = basis.diagonal_of(h);
    HermitianOperator::new(basis.with_values(&d))
}

/// (1/N) Σ_s Û_s† H Û_s, the same channel written as an explicit average.
pub fn twirl_average(h: &HermitianOperator, set: &DephasingSet) -> Result<HermitianOperator> {
    let n = set.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.dim(),
        });
    }
    let hk = set.basis.to_basis(h.matrix());
    let mut acc = CMatrix::zeros(n);
    for phases in &set.phases {
        acc = &acc + &hk.conjugate_by_diagonal(phases);
    }
    HermitianOperator::new(set.basis.from_basis_coords(&acc.scale_real(1.0 / n as f64)))
}

/// L = ceil(C·ln(N)·λ²t²/ε²), at least 1.
pub fn required_steps(n: usize, lam: f64, t: f64, eps: f64, constant: f64) -> Result<usize> {
    for (name, v) in [("λ", lam), ("t", t), ("ε", eps), ("C", constant)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {n}")));
    }
    let l = (constant * (n as f64).ln() * lam * lam * t * t / (eps * eps)).ceil();
    if l > usize::MAX as f64 / 2.0 {
        return Err(Error::InvalidInput(format!("step count {l:e} overflows")));
    }
    Ok((l as usize).max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReshapingPlan {
    pub steps: usize,
    pub total_time: f64,
    pub sampled_indices: Vec<usize>,
    pub seed: u64,
}

impl ReshapingPlan {
    /// Draws s_l uniformly from {0, …, N−1}; draw l depends only on (seed, l).
    pub fn sample(total_time: f64, steps: usize, n: usize, seed: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidInput("step count must be positive".into()));
        }
        if !(total_time >= 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid total time {total_time}")));
        }
        let stream = SeedStream::new(seed);
        let mut cursor = stream.cursor(Domain::Qdrift, 0);
        let sampled_indices = (0..steps).map(|_| cursor.index_below(n)).collect();
        Ok(Self {
            steps,
            total_time,
            sampled_indices,
            seed,
        })
    }

    /// A plan with caller-chosen indices (for instance all zeros).
    pub fn with_indices(total_time: f64, sampled_indices: Vec<usize>, seed: u64) -> Result<Self> {
        if sampled_indices.is_empty() {
            return Err(Error::InvalidInput("step count must be positive".into()));
        }
        Ok(Self {
            steps: sampled_indices.len(),
            total_time,
            sampled_indices,
            seed,
        })
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }
}

/// One product-formula step in 𝒦 coordinates: ψ ↦ D_s† e^{−iĤΔt} D_s ψ.
#[derive(Debug, Clone)]
pub struct StepPropagator {
    /// e^{−iĤΔt} in 𝒦 coordinates.
    pub step: CMatrix,
    phases: Vec<Vec<C64>>,
}

impl StepPropagator {
    pub fn new(h: &HermitianOperator, dt: f64, set: &DephasingSet) -> Result<Self> {
        if h.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                found: h.dim(),
            });
        }
        let hk = HermitianOperator::new(set.basis.to_basis(h.matrix()))?;
        let step = eig_hermitian(&hk)?.exp_i(-dt);
        Ok(Self {
            step,
            phases: set.phases.clone(),
        })
    }

    pub fn apply(&self, s: usize, psi: &mut [C64]) {
        let d = &self.phases[s];
        let rotated: Vec<C64> = psi.iter().zip(d).map(|(a, p)| a * p).collect();
        let out = self.step.matvec(&rotated);
        for ((x, o), p) in psi.iter_mut().zip(out).zip(d) {
            *x = o * p.conj();
        }
    }

    /// The step as a matrix in 𝒦 coordinates.
    pub fn matrix(&self, s: usize) -> CMatrix {
        self.step.conjugate_by_diagonal(&self.phases[s])
    }
}

/// V̂ in the computational frame.
pub fn qdrift_unitary(
    h: &HermitianOperator,
    plan: &ReshapingPlan,
    set: &DephasingSet,
) -> Result<CMatrix> {
    let prop = StepPropagator::new(h, plan.dt(), set)?;
    let n = set.dim();
    let mut v = CMatrix::identity(n);
    for &s in &plan.sampled_indices {
        if s >= n {
            return Err(Error::InvalidInput(format!("sample index {s} outside 0..{n}")));
        }
        v = &prop.matrix(s) * &v;
    }
    Ok(set.basis.from_basis_coords(&v))
}

/// ‖V̂ − e^{−iĤ_eff t}‖ (global phase counted).
pub fn reshaping_error(v: &CMatrix, h_eff: &HermitianOperator, t: f64) -> Result<f64> {
    let u = h_eff.evolution(t)?;
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok((v - &u).spectral_norm())
}

/// min_φ ‖e^{iφ}V̂ − e^{−iĤ_eff t}‖.
pub fn reshaping_error_phase_min(v: &CMatrix, h_eff: &HermitianOperator, t: f64) -> Result<f64> {
    let u = h_eff.evolution(t)?;
    let err = |phi: f64| (&v.scale(C64::from_polar(1.0, phi)) - &u).spectral_norm();
    // A good starting phase aligns the traces; refine by ternary search in a
    // window around it (the objective is unimodal near the optimum).
    let overlap = v.hs_inner(&u);
    let phi0 = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
    let mut best = (err(phi0), phi0);
    for k in 1..64 {
        let phi = phi0 + 2.0 * PI * k as f64 / 64.0;
        let e = err(phi);
        if e < best.0 {
            best = (e, phi);
        }
    }
    let (mut lo, mut hi) = (best.1 - PI / 32.0, best.1 + PI / 32.0);
    for _ in 0..80 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if err(a) < err(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    Ok(best.0.min(err(0.5 * (lo + hi))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli_from_label, pauli_sum};

    #[test]
    fn qubit_set_is_identity_and_z() {
        let set = build_dephasing_set(&EigenDecomposition::computational(2));
        assert!((&set.unitary(0) - &CMatrix::identity(2)).max_abs() < 1e-15);
        let z = pauli_from_label("Z").unwrap();
        assert!((&set.unitary(1) - z.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn twirl_examples() {
        let comp = EigenDecomposition::computational(2);
        let x = pauli_from_label("X").unwrap();
        assert!(twirl_exact(&x, &comp).unwrap().matrix().max_abs() < 1e-15);
        let xz = pauli_sum(&[(1.0, "X"), (1.0, "Z")]).unwrap();
        let z = pauli_from_label("Z").unwrap();
        assert!((twirl_exact(&xz, &comp).unwrap().matrix() - z.matrix()).max_abs() < 1e-15);
        let xb = eig_hermitian(&x).unwrap();
        assert!(twirl_exact(&z, &xb).unwrap().matrix().max_abs() < 1e-12);
        let set = build_dephasing_set(&xb);
        assert!(twirl_average(&z, &set).unwrap().matrix().max_abs() < 1e-12);
    }

    #[test]
    fn step_counts() {
        assert_eq!(required_steps(2, 1.0, 1.0, 0.1, 1.0).unwrap(), 70);
        assert_eq!(required_steps(2, 1.0, 1.0, 0.05, 1.0).unwrap(), 278);
        assert_eq!(required_steps(2, 1.0, 2.0, 0.1, 1.0).unwrap(), 278);
    }

    #[test]
    fn trivial_plans() {
        let z = pauli_from_label("Z").unwrap().scaled(0.7);
        let set = build_dephasing_set(&EigenDecomposition::computational(2));
        let plan = ReshapingPlan::sample(1.3, 17, 2, 5).unwrap();
        let v = qdrift_unitary(&z, &plan, &set).unwrap();
        assert!(reshaping_error(&v, &z, 1.3).unwrap() < 1e-12);

        let xz = pauli_sum(&[(0.4, "X"), (1.0, "Z")]).unwrap();
        let plan = ReshapingPlan::with_indices(0.9, vec![0], 0).unwrap();
        let v = qdrift_unitary(&xz, &plan, &set).unwrap();
        assert!(reshaping_error(&v, &xz, 0.9).unwrap() < 1e-12);
    }

    #[test]
    fn phase_counted_then_removed() {
        let z = pauli_from_label("Z").unwrap();
        let u = z.evolution(0.4).unwrap();
        let minus = u.scale(C64::new(-1.0, 0.0));
        assert!((reshaping_error(&minus, &z, 0.4).unwrap() - 2.0).abs() < 1e-12);
        assert!(reshaping_error_phase_min(&minus, &z, 0.4).unwrap() < 1e-9);
    }
}
