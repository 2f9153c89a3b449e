//! Dense two-phase simplex for the small standard-form programs that arise
//! when the witness basis is fixed: `min c·x  s.t.  A x = b, x ≥ 0`.
//!
//! Pivoting follows Bland's rule, so the returned basic feasible solution is
//! a deterministic function of the input. The final basic variables are
//! re-solved directly from the constraint columns to remove tableau drift.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Basic columns of the original problem (artificials removed).
    pub basis: Vec<usize>,
    /// Equality multipliers `w` with `c − Aᵀw ≥ 0` at optimality, in the
    /// caller's row orientation.
    pub duals: Vec<f64>,
}

const MAX_PIVOTS: usize = 10_000;

struct Tableau {
    rows: usize,
    cols: usize, // structural + artificial, excluding rhs
    t: Vec<f64>, // (rows + 1) × (cols + 1), last row = reduced costs
    basis: Vec<usize>,
    eps: f64,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.t[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.cols + 1;
        let p = self.at(row, col);
        for j in 0..w {
            self.t[row * w + j] /= p;
        }
        for i in 0..=self.rows {
            if i == row {
                continue;
            }
            let f = self.at(i, col);
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.t[row * w + j];
                self.t[i * w + j] -= f * v;
            }
        }
        self.basis[row] = col;
    }

    /// Runs Bland pivots over columns `0..allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> Option<bool> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..allowed).find(|&j| self.at(self.rows, j) < -self.eps);
            let Some(col) = entering else {
                return Some(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, col);
                if a > self.eps {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14 * br.abs().max(1.0)
                                || ((ratio - br).abs() <= 1e-14 * br.abs().max(1.0)
                                    && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Some(false),
                Some((row, _)) => self.pivot(row, col),
            }
        }
        None
    }
}

pub fn solve(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> LpOutcome {
    let (rows, n) = a.shape();
    assert_eq!(b.len(), rows);
    assert_eq!(c.len(), n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let eps = 1e-11 * scale;

    let sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let cols = n + rows;
    let mut tab = Tableau {
        rows,
        cols,
        t: vec![0.0; (rows + 1) * (cols + 1)],
        basis: (n..n + rows).collect(),
        eps,
    };
    for i in 0..rows {
        for j in 0..n {
            *tab.at_mut(i, j) = sign[i] * a[(i, j)];
        }
        *tab.at_mut(i, n + i) = 1.0;
        *tab.at_mut(i, cols) = sign[i] * b[i];
    }
    // Phase 1 reduced costs: minimize the sum of artificials.
    for j in 0..=cols {
        if (n..n + rows).contains(&j) {
            continue;
        }
        let s: f64 = (0..rows).map(|i| tab.at(i, j)).sum();
        *tab.at_mut(rows, j) = -s;
    }
    if tab.optimize(cols) != Some(true) {
        return LpOutcome::Infeasible;
    }
    let bnorm = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if -tab.at(rows, cols) > 1e-9 * bnorm {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out; rows where that fails are redundant.
    let mut redundant = vec![false; rows];
    for i in 0..rows {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| tab.at(i, j).abs() > eps) {
                Some(j) => tab.pivot(i, j),
                None => redundant[i] = true,
            }
        }
    }

    // Phase 2 reduced costs.
    for j in 0..=cols {
        let cj = if j < n { c[j] } else { 0.0 };
        let s: f64 = (0..rows)
            .filter(|&i| !redundant[i])
            .map(|i| {
                let bj = tab.basis[i];
                let cb = if bj < n { c[bj] } else { 0.0 };
                cb * tab.at(i, j)
            })
            .sum();
        *tab.at_mut(rows, j) = if j == cols { -s } else { cj - s };
    }
    match tab.optimize(n) {
        None => return LpOutcome::Infeasible,
        Some(false) => return LpOutcome::Unbounded,
        Some(true) => {}
    }

    let basis: Vec<usize> = (0..rows)
        .filter(|&i| !redundant[i] && tab.basis[i] < n)
        .map(|i| tab.basis[i])
        .collect();
    let kept_rows: Vec<usize> = (0..rows).filter(|&i| !redundant[i]).collect();

    // Re-solve x_B from the original columns, keeping the tableau's values
    // when the basis is too ill-conditioned for the re-solve to be accurate.
    let residual = |x: &[f64]| {
        (0..rows)
            .map(|i| ((0..n).map(|j| a[(i, j)] * x[j]).sum::<f64>() - b[i]).abs())
            .fold(0.0, f64::max)
    };
    let mut x = vec![0.0; n];
    for i in 0..rows {
        if !redundant[i] && tab.basis[i] < n {
            x[tab.basis[i]] = tab.at(i, cols).max(0.0);
        }
    }
    if !basis.is_empty() {
        let bmat = DMatrix::from_fn(rows, basis.len(), |i, k| a[(i, basis[k])]);
        let rhs = DVector::from_column_slice(b);
        if let Ok(xb) = bmat.svd(true, true).solve(&rhs, 1e-13) {
            let mut refined = vec![0.0; n];
            for (k, &j) in basis.iter().enumerate() {
                refined[j] = xb[k].max(0.0);
            }
            if residual(&refined) <= residual(&x) {
                x = refined;
            }
        }
    }
    if residual(&x) > 1e-8 * bnorm * scale {
        return LpOutcome::Infeasible;
    }
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();

    // Duals: Bᵀ w = c_B over the kept rows.
    let bt = DMatrix::from_fn(basis.len(), kept_rows.len(), |k, r| a[(kept_rows[r], basis[k])]);
    let cb = DVector::from_iterator(basis.len(), basis.iter().map(|&j| c[j]));
    let mut duals = vec![0.0; rows];
    if !basis.is_empty() {
        if let Ok(w) = bt.svd(true, true).solve(&cb, 1e-13) {
            for (r, &row) in kept_rows.iter().enumerate() {
                duals[row] = w[r];
            }
        }
    }

    LpOutcome::Optimal(LpSolution {
        x,
        objective,
        basis,
        duals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_program() {
        // min x0 + x1 + x2  s.t. x0 + x1 = 1, x1 + x2 = 1  → x1 = 1, objective 1.
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let LpOutcome::Optimal(s) = solve(&a, &[1.0, 1.0], &[1.0, 1.0, 1.0]) else {
            panic!("expected optimum")
        };
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!((s.x[1] - 1.0).abs() < 1e-12);
        // Dual feasibility c − Aᵀw ≥ 0 and strong duality b·w = objective.
        let bw: f64 = s.duals.iter().sum();
        assert!((bw - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_program() {
        // x0 = 1 and x0 = 2
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        assert_eq!(solve(&a, &[1.0, 2.0], &[1.0]), LpOutcome::Infeasible);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let LpOutcome::Optimal(s) = solve(&a, &[1.0, 2.0], &[1.0, 3.0]) else {
            panic!("expected optimum")
        };
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert_eq!(s.basis, vec![0]);
    }

    #[test]
    fn negative_rhs() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let LpOutcome::Optimal(s) = solve(&a, &[-2.0], &[1.0, 1.0]) else {
            panic!("expected optimum")
        };
        assert!((s.x[1] - 2.0).abs() < 1e-12);
        assert!((s.objective - 2.0).abs() < 1e-12);
    }
}
