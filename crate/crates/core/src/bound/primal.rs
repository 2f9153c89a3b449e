//! Witness recovery from the barrier's terminal slacks, the fixed-basis
//! linear program, and the basic-solution sparsification that brings the
//! witness down to at most m+1 nonzero eigenvalues.

use nalgebra::{DMatrix, DVector};

use super::dual::SlackSpectrum;
use super::lp::{self, LpOutcome};
use super::{dot, BoundSolution, DualCertificate, LinearProblem, RECOVERY_RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::operator::{eig_hermitian, CMatrix, EigenDecomposition, HermitianOperator, C64};

/// Relative threshold separating the supports from numerical zeros.
pub const SUPPORT_EPS: f64 = 1e-9;

struct FixedBasis {
    a: Vec<f64>,
    value: f64,
    /// Multipliers of the m generator rows followed by the trace row.
    duals: Vec<f64>,
}

fn fixed_basis_lp(problem: &LinearProblem, basis: &EigenDecomposition) -> Result<FixedBasis> {
    let n = basis.dim();
    if n != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: n,
        });
    }
    let m = problem.m();
    let diags: Vec<Vec<f64>> = problem
        .generators
        .generators()
        .iter()
        .map(|g| basis.diagonal_of(g))
        .collect();
    let a = DMatrix::from_fn(m + 1, 2 * n, |r, c| {
        let k = c % n;
        let v = if r < m { diags[r][k] } else { 1.0 };
        if c < n {
            v
        } else {
            -v
        }
    });
    let mut b = problem.alpha.clone();
    b.push(0.0);
    let cost = vec![0.5; 2 * n];
    match lp::solve(&a, &b, &cost) {
        LpOutcome::Optimal(s) => {
            let w: Vec<f64> = (0..n).map(|k| s.x[k] - s.x[n + k]).collect();
            let residual = (0..m)
                .map(|r| (dot(&diags[r], &w) - problem.alpha[r]).abs())
                .chain(std::iter::once(w.iter().sum::<f64>().abs()))
                .fold(0.0, f64::max);
            if !(residual <= RECOVERY_RESIDUAL_TOL) {
                return Err(Error::InfeasibleBasis);
            }
            let value = 0.5 * w.iter().map(|v| v.abs()).sum::<f64>();
            Ok(FixedBasis {
                a: w,
                value,
                duals: s.duals,
            })
        }
        LpOutcome::Infeasible | LpOutcome::Unbounded => Err(Error::InfeasibleBasis),
    }
}

/// Optimal diagonal weights in a fixed orthonormal basis: minimize ½‖a‖₁
/// subject to Σ_k a_k⟨k|ĝ_j|k⟩ = α_j and Σ_k a_k = 0. The result is a basic
/// feasible solution with at most m+1 nonzeros.
pub fn gamma_fixed_basis(
    problem: &LinearProblem,
    basis: &EigenDecomposition,
) -> Result<(Vec<f64>, f64)> {
    let fb = fixed_basis_lp(problem, basis)?;
    Ok((fb.a, fb.value))
}

/// Hilbert–Schmidt projection of `a` onto {Tr(Â ĝ_j) = α_j, Tr Â = 0}.
fn project_affine(problem: &LinearProblem, a: &CMatrix) -> Result<(CMatrix, f64)> {
    let n = problem.dim();
    let m = problem.m();
    let mut ops: Vec<&CMatrix> = Vec::with_capacity(m + 1);
    let id = CMatrix::identity(n);
    ops.push(&id);
    ops.extend(problem.generators.generators().iter().map(|g| g.matrix()));

    let gram = DMatrix::from_fn(m + 1, m + 1, |i, j| ops[i].trace_product(ops[j]).re);
    let target = |i: usize| if i == 0 { 0.0 } else { problem.alpha[i - 1] };
    let r = DVector::from_fn(m + 1, |i, _| target(i) - a.trace_product(ops[i]).re);
    let c = gram
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&r))
        .or_else(|| gram.svd(true, true).solve(&r, 1e-14).ok())
        .ok_or(Error::RecoveryFailure { residual: f64::NAN })?;

    let mut out = a.clone();
    for (i, op) in ops.iter().enumerate() {
        out = &out + &op.scale_real(c[i]);
    }
    let residual = (0..=m)
        .map(|i| (out.trace_product(ops[i]).re - target(i)).abs())
        .fold(0.0, f64::max);
    Ok((out, residual))
}

/// Reorders the basis so the weights are ascending and assembles the witness.
fn assemble(
    basis: &EigenDecomposition,
    weights: &[f64],
    dual: DualCertificate,
) -> Result<BoundSolution> {
    let n = basis.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| weights[i].total_cmp(&weights[j]).then(i.cmp(&j)));
    let a: Vec<f64> = order.iter().map(|&k| weights[k]).collect();
    let vectors = CMatrix::from_fn(n, |i, j| basis.vectors[(i, order[j])]);
    let basis = EigenDecomposition {
        values: a.clone(),
        vectors,
    };
    let witness = HermitianOperator::new(basis.reconstruct())?;
    let l1: f64 = a.iter().map(|v| v.abs()).sum();
    let eps = SUPPORT_EPS * l1;
    let support_pos = (0..n).filter(|&k| a[k] > eps).collect();
    let support_neg = (0..n).filter(|&k| a[k] < -eps).collect();
    let gamma = 0.5 * l1;
    Ok(BoundSolution {
        gamma,
        witness,
        basis,
        weights: a,
        support_pos,
        support_neg,
        gap: gamma - dual.value,
        dual,
        degenerate: false,
        kappa: None,
    })
}

/// Largest-value feasible point among the rescalings of the candidate
/// multiplier vectors. Each candidate `y` is scaled to unit seminorm and
/// paired with the centering shift, which makes it feasible exactly.
fn best_dual(
    problem: &LinearProblem,
    interior: &DualCertificate,
    extra: &[Vec<f64>],
) -> Result<DualCertificate> {
    let mut best = interior.clone();
    let candidates = std::iter::once(&interior.y).chain(extra.iter());
    for y in candidates {
        let v = dot(&problem.alpha, y);
        if !(v > 0.0) {
            continue;
        }
        let e = eig_hermitian(&problem.generators.combine(y, 0.0))?;
        let (lo, hi) = (e.values[0], e.values[e.dim() - 1]);
        let s = hi - lo;
        if !(s > 0.0) {
            continue;
        }
        let value = v / s;
        if value > best.value {
            best = DualCertificate {
                y: y.iter().map(|c| c / s).collect(),
                mu: -(hi + lo) / (2.0 * s),
                value,
                barrier_weight: 0.0,
            };
        }
    }
    Ok(best)
}

/// Builds the witness (Ŝ₁⁻¹ − Ŝ₂⁻¹)/t from a barrier iterate, projects it onto
/// the constraints, sparsifies it to a basic solution in its own eigenbasis,
/// and certifies the result against the best available dual point.
pub fn primal_recover(
    problem: &LinearProblem,
    dual: &DualCertificate,
    tol: f64,
) -> Result<BoundSolution> {
    super::dual::check_tolerance(tol)?;
    if problem.is_degenerate() {
        return BoundSolution::degenerate(problem);
    }
    if !(dual.barrier_weight > 0.0) {
        return Err(Error::InvalidInput(
            "primal recovery needs a barrier iterate (positive barrier weight)".into(),
        ));
    }
    let spec = SlackSpectrum::new(problem, &dual.y, dual.mu)?.ok_or_else(|| {
        Error::InvalidInput("dual point is not strictly feasible".into())
    })?;
    let diff: Vec<f64> = spec
        .d1
        .iter()
        .zip(&spec.d2)
        .map(|(a, b)| (a - b) / dual.barrier_weight)
        .collect();
    let raw = spec.eig.with_values(&diff);
    let (projected, residual) = project_affine(problem, &raw)?;
    if !(residual <= RECOVERY_RESIDUAL_TOL) {
        return Err(Error::RecoveryFailure { residual });
    }
    let witness = HermitianOperator::new(projected)?;
    let k = eig_hermitian(&witness)?;

    // Complementary slackness places the optimal witness on the ±½
    // eigenspaces of the optimal dual operator, so the dual's eigenbasis
    // (resolved inside degenerate clusters by the approximate witness) is an
    // exact optimal basis whenever the dual point is.
    let seed_dual = best_dual(problem, dual, &[])?;
    let aligned = aligned_basis(problem, &seed_dual, witness.matrix())?;
    let mut bases = vec![k, aligned];
    bases.extend(slackness_basis(problem, &seed_dual)?);

    let mut best: Option<(EigenDecomposition, Vec<f64>, f64)> = None;
    let mut extra = Vec::new();
    for basis in bases {
        if let Ok(fb) = fixed_basis_lp(problem, &basis) {
            extra.push(fb.duals[..problem.m()].to_vec());
            if best.as_ref().map_or(true, |b| fb.value < b.2) {
                best = Some((basis, fb.a, fb.value));
            }
        }
    }
    let (basis, weights) = match best {
        Some((b, a, _)) => (b, a),
        // The projected witness's own spectrum is always feasible in its
        // eigenbasis; the LP only fails here through round-off.
        None => {
            let k = eig_hermitian(&witness)?;
            let a = k.values.clone();
            (k, a)
        }
    };
    let best = best_dual(problem, &seed_dual, &extra)?;
    assemble(&basis, &weights, best)
}

const CLUSTER_TOL: f64 = 1e-6;

/// Eigenbasis of Σ y_j ĝ_j + μÎ with each near-degenerate eigenvalue cluster
/// rotated to diagonalize the compression of `witness`.
fn aligned_basis(
    problem: &LinearProblem,
    dual: &DualCertificate,
    witness: &CMatrix,
) -> Result<EigenDecomposition> {
    let e = eig_hermitian(&problem.generators.combine(&dual.y, dual.mu))?;
    let n = e.dim();
    let mut vectors = e.vectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && e.values[end] - e.values[end - 1] < CLUSTER_TOL {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            let cols: Vec<Vec<C64>> = (start..end).map(|c| e.vectors.column(c)).collect();
            let wv: Vec<Vec<C64>> = cols.iter().map(|c| witness.matvec(c)).collect();
            let comp = CMatrix::from_fn(size, |i, j| {
                cols[i].iter().zip(&wv[j]).map(|(a, b)| a.conj() * b).sum()
            });
            let sub = eig_hermitian(&HermitianOperator::new(comp)?)?;
            for r in 0..n {
                for j in 0..size {
                    vectors[(r, start + j)] =
                        (0..size).map(|i| cols[i][r] * sub.vectors[(i, j)]).sum();
                }
            }
        }
        start = end;
    }
    Ok(EigenDecomposition {
        values: e.values,
        vectors,
    })
}

const ACTIVE_TOL: f64 = 1e-6;

/// Real coordinates of a p×p Hermitian block: diagonal entries, then the
/// real and imaginary parts of each upper off-diagonal entry.
fn hermitian_coords(p: usize) -> Vec<(usize, usize, bool)> {
    let mut out: Vec<(usize, usize, bool)> = (0..p).map(|a| (a, a, false)).collect();
    for a in 0..p {
        for b in a + 1..p {
            out.push((a, b, false));
            out.push((a, b, true));
        }
    }
    out
}

/// Tr(E C) for the coordinate matrix E of `coord` and Hermitian C.
fn coord_trace(c: &CMatrix, coord: (usize, usize, bool)) -> f64 {
    let (a, b, imag) = coord;
    if a == b {
        c[(a, a)].re
    } else if imag {
        2.0 * c[(a, b)].im
    } else {
        2.0 * c[(a, b)].re
    }
}

fn coord_matrix(p: usize, coords: &[(usize, usize, bool)], values: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(p);
    for (&(a, b, imag), &v) in coords.iter().zip(values) {
        if a == b {
            m[(a, a)] += C64::new(v, 0.0);
        } else if imag {
            m[(a, b)] += C64::new(0.0, v);
            m[(b, a)] += C64::new(0.0, -v);
        } else {
            m[(a, b)] += C64::new(v, 0.0);
            m[(b, a)] += C64::new(v, 0.0);
        }
    }
    m
}

fn compress(cols: &[Vec<C64>], g: &CMatrix) -> CMatrix {
    let gv: Vec<Vec<C64>> = cols.iter().map(|c| g.matvec(c)).collect();
    CMatrix::from_fn(cols.len(), |i, j| {
        cols[i].iter().zip(&gv[j]).map(|(a, b)| a.conj() * b).sum()
    })
}

fn rotate(cols: &[Vec<C64>], block: &CMatrix) -> Result<Vec<Vec<C64>>> {
    if cols.len() == 1 {
        return Ok(cols.to_vec());
    }
    let sub = eig_hermitian(&HermitianOperator::new(block.clone())?)?;
    let n = cols[0].len();
    Ok((0..cols.len())
        .map(|j| {
            (0..n)
                .map(|r| (0..cols.len()).map(|i| cols[i][r] * sub.vectors[(i, j)]).sum())
                .collect()
        })
        .collect())
}

/// Basis from complementary slackness: the optimal witness is X̂ − Ŷ with
/// X̂ ⪰ 0 on the +½ eigenspace of the dual operator and Ŷ ⪰ 0 on the −½
/// eigenspace. The blocks are fitted to the constraints by least squares and
/// diagonalized; the remaining vectors come from the dual operator. Returns
/// `None` when the fit is inconsistent or not positive.
fn slackness_basis(
    problem: &LinearProblem,
    dual: &DualCertificate,
) -> Result<Option<EigenDecomposition>> {
    let e = eig_hermitian(&problem.generators.combine(&dual.y, dual.mu))?;
    let n = e.dim();
    let top: Vec<usize> = (0..n).filter(|&k| e.values[k] > 0.5 - ACTIVE_TOL).collect();
    let bottom: Vec<usize> = (0..n).filter(|&k| e.values[k] < -0.5 + ACTIVE_TOL).collect();
    if top.is_empty() || bottom.is_empty() {
        return Ok(None);
    }
    let pcols: Vec<Vec<C64>> = top.iter().map(|&k| e.vectors.column(k)).collect();
    let qcols: Vec<Vec<C64>> = bottom.iter().map(|&k| e.vectors.column(k)).collect();
    let (pc, qc) = (hermitian_coords(top.len()), hermitian_coords(bottom.len()));
    let m = problem.m();
    let unknowns = pc.len() + qc.len();

    let mut a = DMatrix::zeros(m + 1, unknowns);
    let mut rhs = DVector::zeros(m + 1);
    for (j, g) in problem.generators.generators().iter().enumerate() {
        let (gp, gq) = (compress(&pcols, g.matrix()), compress(&qcols, g.matrix()));
        for (r, &c) in pc.iter().enumerate() {
            a[(j, r)] = coord_trace(&gp, c);
        }
        for (r, &c) in qc.iter().enumerate() {
            a[(j, pc.len() + r)] = -coord_trace(&gq, c);
        }
        rhs[j] = problem.alpha[j];
    }
    for (r, &(x, y, _)) in pc.iter().enumerate() {
        a[(m, r)] = if x == y { 1.0 } else { 0.0 };
    }
    for (r, &(x, y, _)) in qc.iter().enumerate() {
        a[(m, pc.len() + r)] = if x == y { -1.0 } else { 0.0 };
    }
    let Ok(c) = a.clone().svd(true, true).solve(&rhs, 1e-13) else {
        return Ok(None);
    };
    let scale = problem.alpha.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    if (&a * &c - &rhs).amax() > 1e-8 * scale {
        return Ok(None);
    }
    let cv: Vec<f64> = c.iter().copied().collect();
    let x = coord_matrix(top.len(), &pc, &cv[..pc.len()]);
    let y = coord_matrix(bottom.len(), &qc, &cv[pc.len()..]);

    let mut vectors = e.vectors.clone();
    for (idx, cols) in [
        (&top, rotate(&pcols, &x)?),
        (&bottom, rotate(&qcols, &y)?),
    ] {
        for (j, &k) in idx.iter().enumerate() {
            for r in 0..n {
                vectors[(r, k)] = cols[j][r];
            }
        }
    }
    Ok(Some(EigenDecomposition {
        values: e.values,
        vectors,
    }))
}

/// Re-solves the fixed-basis program in the solution's own basis and keeps
/// the basic solution when it is no worse. Constraints stay satisfied and
/// at most m+1 weights remain nonzero.
pub fn sparsify_support(solution: &BoundSolution, problem: &LinearProblem) -> Result<BoundSolution> {
    if solution.degenerate {
        return Ok(solution.clone());
    }
    let fb = match fixed_basis_lp(problem, &solution.basis) {
        Ok(fb) => fb,
        Err(_) => return Ok(solution.clone()),
    };
    if fb.value > solution.gamma * (1.0 + 1e-12) + 1e-15 {
        return Ok(solution.clone());
    }
    let extra = vec![fb.duals[..problem.m()].to_vec()];
    let dual = best_dual(problem, &solution.dual, &extra)?;
    let mut out = assemble(&solution.basis, &fb.a, dual)?;
    out.kappa = solution.kappa;
    Ok(out)
}

/// Â = V diag(a) V† for given weights, used when callers build witnesses
/// directly (for instance to test sparsification).
pub fn witness_from_weights(basis: &EigenDecomposition, weights: &[f64]) -> Result<HermitianOperator> {
    HermitianOperator::new(basis.with_values(weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli_from_label, GeneratorSet};

    fn problem(labels: &[&str], alpha: &[f64]) -> LinearProblem {
        let gs = GeneratorSet::new(labels.iter().map(|l| pauli_from_label(l).unwrap()).collect())
            .unwrap();
        LinearProblem::new(gs, alpha.to_vec()).unwrap()
    }

    #[test]
    fn fixed_basis_examples() {
        let (a, v) = gamma_fixed_basis(&problem(&["Z"], &[1.0]), &EigenDecomposition::computational(2)).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!((a[0] - 0.5).abs() < 1e-12 && (a[1] + 0.5).abs() < 1e-12);

        let p = problem(&["ZII", "IZI", "IIZ"], &[1.0, 0.5, -0.25]);
        let (a, v) = gamma_fixed_basis(&p, &EigenDecomposition::computational(8)).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!(a.iter().filter(|x| x.abs() > 1e-12).count() <= 4);

        let r = gamma_fixed_basis(&problem(&["X"], &[1.0]), &EigenDecomposition::computational(2));
        assert_eq!(r, Err(Error::InfeasibleBasis));
    }

    #[test]
    fn sparsify_collapses_padding() {
        // A witness for {Z ⊗ I}, α = (2) spread over all four levels.
        let p = problem(&["ZI"], &[2.0]);
        let basis = EigenDecomposition::computational(4);
        let weights = [0.5, 0.5, -0.5, -0.5];
        let witness = witness_from_weights(&basis, &weights).unwrap();
        let sol = BoundSolution {
            gamma: 1.0,
            witness,
            basis: EigenDecomposition {
                values: weights.to_vec(),
                vectors: CMatrix::identity(4),
            },
            weights: weights.to_vec(),
            support_pos: vec![0, 1],
            support_neg: vec![2, 3],
            dual: DualCertificate::zero(1),
            gap: 1.0,
            degenerate: false,
            kappa: None,
        };
        let s = sparsify_support(&sol, &p).unwrap();
        assert!((s.gamma - 1.0).abs() < 1e-12);
        assert_eq!(s.support_size(), 2);
        assert!(s.constraint_residual(&p) < 1e-12);
        assert!(s.gap.abs() < 1e-12);
    }

    #[test]
    fn recovery_needs_barrier_point() {
        let p = problem(&["Z"], &[1.0]);
        let r = primal_recover(&p, &DualCertificate::zero(1), 1e-9);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
