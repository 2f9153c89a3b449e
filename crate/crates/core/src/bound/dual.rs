//! Log-det barrier path following over the dual variables `(y, μ)`.
//!
//! maximize  α·y  subject to  −½I ≼ M ≼ ½I,   M = Σ_j y_j ĝ_j + μ Î
//!
//! For barrier weight `t` the centering objective (minimized) is
//! `φ_t(z) = −t α·y − log det(½I − M) − log det(½I + M)`, whose exact
//! minimizer has duality gap at most `2N / t`.

use nalgebra::{DMatrix, DVector};

use super::{DualCertificate, LinearProblem};
use crate::error::{Error, Result};
use crate::operator::{eig_hermitian, validate_generator_set, CMatrix, EigenDecomposition};

pub const INITIAL_WEIGHT: f64 = 1.0;
pub const WEIGHT_FACTOR: f64 = 10.0;
const MAX_NEWTON_PER_CENTER: usize = 200;
const MAX_TOTAL_NEWTON: usize = 4000;
const DECREMENT_TOL: f64 = 1e-12;
const QUADRATIC_REGION: f64 = 1e-2;
/// Largest barrier weight tried; beyond this the Newton system is
/// numerically meaningless in double precision.
const MAX_WEIGHT: f64 = 1e15;

/// Spectral data of `M(z)` needed by the barrier.
pub(crate) struct SlackSpectrum {
    pub eig: EigenDecomposition,
    /// 1/(½ − λ_i)
    pub d1: Vec<f64>,
    /// 1/(½ + λ_i)
    pub d2: Vec<f64>,
}

impl SlackSpectrum {
    pub fn new(problem: &LinearProblem, y: &[f64], mu: f64) -> Result<Option<Self>> {
        let m = problem.generators.combine(y, mu);
        let eig = eig_hermitian(&m)?;
        if eig.values.iter().any(|&l| !(l.abs() < 0.5)) {
            return Ok(None);
        }
        let d1 = eig.values.iter().map(|l| 1.0 / (0.5 - l)).collect();
        let d2 = eig.values.iter().map(|l| 1.0 / (0.5 + l)).collect();
        Ok(Some(Self { eig, d1, d2 }))
    }

    pub fn log_barrier(&self) -> f64 {
        self.eig
            .values
            .iter()
            .map(|l| (0.5 - l).ln() + (0.5 + l).ln())
            .sum()
    }
}

struct Newton {
    gradient: DVector<f64>,
    /// Factor B with Hessian BᵀB: row (block, i, j, re/im), column k holds
    /// √(d_i d_j)·G̃_k[ij] for generator k (last column: the identity).
    factor: DMatrix<f64>,
}

fn newton_system(problem: &LinearProblem, spec: &SlackSpectrum, t: f64) -> Newton {
    let m = problem.m();
    let n = problem.dim();
    let rotated: Vec<CMatrix> = problem
        .generators
        .generators()
        .iter()
        .map(|g| spec.eig.to_basis(g.matrix()))
        .collect();

    let mut gradient = DVector::zeros(m + 1);
    let diff: Vec<f64> = spec.d1.iter().zip(&spec.d2).map(|(a, b)| a - b).collect();
    for (k, gk) in rotated.iter().enumerate() {
        let lin: f64 = (0..n).map(|i| gk[(i, i)].re * diff[i]).sum();
        gradient[k] = lin - t * problem.alpha[k];
    }
    gradient[m] = diff.iter().sum();

    let mut factor = DMatrix::zeros(4 * n * n, m + 1);
    for (b, d) in [&spec.d1, &spec.d2].into_iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let w = (d[i] * d[j]).sqrt();
                let row = 2 * ((b * n + i) * n + j);
                for (k, gk) in rotated.iter().enumerate() {
                    factor[(row, k)] = w * gk[(i, j)].re;
                    factor[(row + 1, k)] = w * gk[(i, j)].im;
                }
                if i == j {
                    factor[(row, m)] = w;
                }
            }
        }
    }
    Newton { gradient, factor }
}

/// Solves BᵀB dz = −g through the SVD of B, which keeps the accuracy of the
/// small curvature directions that squaring into the Hessian would lose.
fn newton_direction(sys: &Newton) -> DVector<f64> {
    let svd = sys.factor.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &v| a.max(v));
    let proj = &vt * &sys.gradient;
    let mut coeff = DVector::zeros(proj.len());
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv > 1e-15 * smax {
            coeff[k] = -proj[k] / (sv * sv);
        }
    }
    vt.transpose() * coeff
}

/// Terminal state of a path-following run.
#[derive(Debug, Clone)]
pub(crate) struct BarrierRun {
    pub y: Vec<f64>,
    pub mu: f64,
    pub weight: f64,
}

/// Centered iterates for increasing weights; the last one is the answer.
pub(crate) fn run_barrier(problem: &LinearProblem, tol: f64) -> Result<Vec<BarrierRun>> {
    let m = problem.m();
    let n = problem.dim() as f64;
    let mut z = vec![0.0; m + 1];
    let mut t = INITIAL_WEIGHT;
    let mut total = 0usize;

    let phi = |z: &[f64], t: f64| -> Result<Option<f64>> {
        let spec = SlackSpectrum::new(problem, &z[..m], z[m])?;
        Ok(spec.map(|s| {
            let lin: f64 = problem.alpha.iter().zip(&z[..m]).map(|(a, y)| a * y).sum();
            -t * lin - s.log_barrier()
        }))
    };

    // Fully centered iterates so far; a numerical breakdown at a larger
    // weight falls back to them, since the certificate is checked
    // independently.
    let mut path: Vec<BarrierRun> = Vec::new();
    let fail = |path: Vec<BarrierRun>, z: &[f64], t: f64, total: usize| {
        if path.is_empty() {
            Err(nonconvergence(problem, z, t, total))
        } else {
            Ok(path)
        }
    };

    loop {
        // Centering.
        let mut inner = 0;
        let mut previous = f64::INFINITY;
        loop {
            let spec = SlackSpectrum::new(problem, &z[..m], z[m])?
                .expect("iterate left the strictly feasible region");
            let sys = newton_system(problem, &spec, t);
            let dz = newton_direction(&sys);
            let decrement = -sys.gradient.dot(&dz);
            if !decrement.is_finite() {
                return fail(path, &z, t, total);
            }
            if decrement / 2.0 <= DECREMENT_TOL {
                break;
            }
            // Inside the quadratic-convergence region the full step is taken
            // unchecked: the barrier values are too large for an Armijo test
            // to resolve decrements this small. Convergence stalls only at the
            // floating-point floor.
            if decrement < QUADRATIC_REGION {
                if decrement > 0.5 * previous {
                    break;
                }
                previous = decrement;
                let trial: Vec<f64> = z.iter().zip(dz.iter()).map(|(a, d)| a + d).collect();
                if phi(&trial, t)?.is_none() {
                    break;
                }
                z = trial;
                inner += 1;
                total += 1;
                continue;
            }
            let f0 = phi(&z, t)?.expect("current iterate feasible");
            let mut step = 1.0;
            let mut accepted = false;
            while step > 1e-16 {
                let trial: Vec<f64> = z.iter().zip(dz.iter()).map(|(a, d)| a + step * d).collect();
                if let Some(f1) = phi(&trial, t)? {
                    if f1 <= f0 - 0.25 * step * decrement {
                        z = trial;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            inner += 1;
            total += 1;
            if !accepted {
                // Line search stalled: the iterate is as centered as floating
                // point allows at this weight.
                break;
            }
            if inner >= MAX_NEWTON_PER_CENTER || total >= MAX_TOTAL_NEWTON {
                return fail(path, &z, t, total);
            }
        }

        let run = BarrierRun {
            y: z[..m].to_vec(),
            mu: z[m],
            weight: t,
        };
        let value: f64 = problem.alpha.iter().zip(&run.y).map(|(a, y)| a * y).sum();
        let proxy = 2.0 * n / t;
        path.push(run);
        if proxy <= 0.5 * tol * value.abs().max(1.0) || t >= MAX_WEIGHT {
            return Ok(path);
        }
        t *= WEIGHT_FACTOR;
    }
}

fn nonconvergence(problem: &LinearProblem, z: &[f64], t: f64, iterations: usize) -> Error {
    let m = problem.m();
    let objective: f64 = problem.alpha.iter().zip(&z[..m]).map(|(a, y)| a * y).sum();
    Error::SolverNonConvergence {
        iterations,
        gap: 2.0 * problem.dim() as f64 / t,
        objective,
        residual: f64::NAN,
    }
}

/// Feasible `(y, μ)` within `tol·max(1, value)` of the optimum of the dual.
pub fn gamma_dual_solve(problem: &LinearProblem, tol: f64) -> Result<DualCertificate> {
    Ok(barrier_path(problem, tol)?
        .pop()
        .unwrap_or_else(|| DualCertificate::zero(problem.m())))
}

/// All centered barrier iterates as certificates, in order of weight.
pub(crate) fn barrier_path(problem: &LinearProblem, tol: f64) -> Result<Vec<DualCertificate>> {
    check_tolerance(tol)?;
    if problem.is_degenerate() {
        return Ok(vec![DualCertificate::zero(problem.m())]);
    }
    let report = validate_generator_set(&problem.generators);
    if report.identity_independence_ratio <= crate::operator::INDEPENDENCE_TOL {
        return Err(Error::UnboundedMultipliers {
            kappa: report.identity_independence_ratio,
        });
    }
    Ok(run_barrier(problem, tol)?
        .into_iter()
        .map(|r| DualCertificate::new(problem, r.y, r.mu, r.weight))
        .collect())
}

pub(crate) fn check_tolerance(tol: f64) -> Result<()> {
    if !(1e-12..=1e-3).contains(&tol) {
        return Err(Error::InvalidInput(format!(
            "solver tolerance {tol:e} outside [1e-12, 1e-3]"
        )));
    }
    Ok(())
}
