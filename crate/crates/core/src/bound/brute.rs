//! Direction-search oracle for γ, independent of the barrier solver.
//!
//! Every nonzero direction u gives the feasible dual point
//! y = u/seminorm(u·ĝ) with the centering shift, so α·u/seminorm(u·ĝ) is a
//! rigorous lower bound on γ whose maximum over directions is γ itself. A
//! uniform angular grid is followed by coordinate refinement around the
//! best few grid points.

use super::LinearProblem;
use crate::error::{Error, Result};
use crate::operator::seminorm;

pub const BRUTE_MAX_GENERATORS: usize = 3;
pub const BRUTE_MAX_DIM: usize = 4;
const REFINE_SEEDS: usize = 4;
const REFINE_ROUNDS: usize = 40;

fn direction(angles: &[f64]) -> Vec<f64> {
    match angles.len() {
        0 => vec![1.0],
        1 => vec![angles[0].cos(), angles[0].sin()],
        _ => {
            let (th, ph) = (angles[0], angles[1]);
            vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]
        }
    }
}

fn value(problem: &LinearProblem, u: &[f64]) -> Result<f64> {
    let v: f64 = problem.alpha.iter().zip(u).map(|(a, b)| a * b).sum();
    let s = seminorm(&problem.generators.combine(u, 0.0))?;
    Ok(if s > 0.0 { v / s } else { 0.0 })
}

/// Lower estimate of γ whose error decreases as O(1/resolution) or faster.
pub fn brute_force_gamma(problem: &LinearProblem, resolution: usize) -> Result<f64> {
    let m = problem.m();
    if m > BRUTE_MAX_GENERATORS || problem.dim() > BRUTE_MAX_DIM {
        return Err(Error::OracleRefused(format!(
            "brute-force search is limited to m ≤ {BRUTE_MAX_GENERATORS}, N ≤ {BRUTE_MAX_DIM} (got m = {m}, N = {})",
            problem.dim()
        )));
    }
    if resolution < 4 {
        return Err(Error::OracleRefused("resolution must be at least 4".into()));
    }
    if m == 1 {
        return Ok(value(problem, &[1.0])?.max(value(problem, &[-1.0])?));
    }
    let pi = std::f64::consts::PI;
    let mut grid: Vec<(f64, Vec<f64>)> = Vec::new();
    if m == 2 {
        for k in 0..resolution {
            let a = [2.0 * pi * k as f64 / resolution as f64];
            grid.push((value(problem, &direction(&a))?, a.to_vec()));
        }
    } else {
        for i in 0..=resolution {
            for k in 0..2 * resolution {
                let a = [pi * i as f64 / resolution as f64, pi * k as f64 / resolution as f64];
                grid.push((value(problem, &direction(&a))?, a.to_vec()));
            }
        }
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = grid[0].0;
    for (v0, a0) in grid.into_iter().take(REFINE_SEEDS) {
        let (mut v, mut a) = (v0, a0);
        let mut step = pi / resolution as f64;
        for _ in 0..REFINE_ROUNDS {
            let mut moved = false;
            for d in 0..a.len() {
                for sgn in [-1.0, 1.0] {
                    let mut trial = a.clone();
                    trial[d] += sgn * step;
                    let tv = value(problem, &direction(&trial))?;
                    if tv > v {
                        v = tv;
                        a = trial;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.max(v);
    }
    Ok(best)
}
