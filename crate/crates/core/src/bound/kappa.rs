//! Conditioning constant κ = min_{‖y‖₁=1} min_μ ‖y·ĝ + μÎ‖.
//!
//! The inner minimum over μ is seminorm(y·ĝ)/2, and by homogeneity
//! 1/(2κ) = max_y ‖y‖₁ / seminorm(y·ĝ) = max_{s∈{±1}^m} γ(ĝ|s),
//! since γ(ĝ|α) = max_y α·y / seminorm(y·ĝ). The sign vectors with s₁ = −1
//! repeat the others up to an overall sign, so 2^{m−1} solves suffice.

use super::{solve, LinearProblem};
use crate::error::{Error, Result};
use crate::operator::{validate_generator_set, GeneratorSet, INDEPENDENCE_TOL};

pub const KAPPA_MAX_GENERATORS: usize = 12;
const KAPPA_TOL: f64 = 1e-10;

pub fn conditioning_kappa(gs: &GeneratorSet) -> Result<f64> {
    let m = gs.len();
    if m > KAPPA_MAX_GENERATORS {
        return Err(Error::InvalidInput(format!(
            "κ enumerates 2^(m−1) sign patterns; m = {m} exceeds {KAPPA_MAX_GENERATORS}"
        )));
    }
    let report = validate_generator_set(gs);
    if report.identity_independence_ratio <= INDEPENDENCE_TOL {
        return Err(Error::UnboundedMultipliers {
            kappa: report.identity_independence_ratio,
        });
    }
    let mut worst = 0.0f64;
    for mask in 0..(1usize << (m - 1)) {
        let s: Vec<f64> = (0..m)
            .map(|j| if j > 0 && mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let p = LinearProblem::new(gs.clone(), s)?;
        worst = worst.max(solve(&p, KAPPA_TOL)?.gamma);
    }
    Ok(1.0 / (2.0 * worst))
}
