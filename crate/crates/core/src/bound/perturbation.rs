//! Two-sided stability interval for γ under perturbations of the generators
//! (‖ĝ_j − ĝ′_j‖ ≤ ε_g) and of the coefficients (‖α − α′‖∞ ≤ ε_α).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub kappa: f64,
    pub eps_g: f64,
    pub eps_alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub abs_bound: f64,
    /// 2γε_g/κ + ε_α/κ, reported when ε_g ≤ κ/2.
    pub simplified: Option<f64>,
}

impl PerturbationReport {
    pub fn contains(&self, gamma: f64) -> bool {
        self.lower <= gamma && gamma <= self.upper
    }
}

pub fn perturbation_interval(
    gamma: f64,
    kappa: f64,
    eps_g: f64,
    eps_alpha: f64,
) -> Result<PerturbationReport> {
    for (name, v) in [("γ", gamma), ("κ", kappa), ("ε_g", eps_g), ("ε_α", eps_alpha)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} must be finite and ≥ 0, got {v}")));
        }
    }
    if eps_g >= kappa {
        return Err(Error::BoundInapplicable { eps_g, kappa });
    }
    let lower = (gamma - eps_alpha / (2.0 * kappa)) / (1.0 + eps_g / kappa);
    let upper = (1.0 + eps_g / (kappa - eps_g)) * gamma + eps_alpha / (2.0 * (kappa - eps_g));
    let abs_bound = eps_g * gamma / (kappa - eps_g) + eps_alpha / (2.0 * (kappa - eps_g));
    let simplified = (eps_g <= kappa / 2.0).then(|| 2.0 * gamma * eps_g / kappa + eps_alpha / kappa);
    Ok(PerturbationReport {
        kappa,
        eps_g,
        eps_alpha,
        lower,
        upper,
        abs_bound,
        simplified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed() {
        let r = perturbation_interval(0.7, 0.5, 0.0, 0.0).unwrap();
        assert_eq!((r.lower, r.upper, r.abs_bound), (0.7, 0.7, 0.0));
    }

    #[test]
    fn substitution() {
        let r = perturbation_interval(1.0, 1.0, 0.1, 0.2).unwrap();
        assert!((r.abs_bound - (0.1 / 0.9 + 0.2 / 1.8)).abs() < 1e-15);
        assert!((r.abs_bound - 0.2222222222222222).abs() < 1e-12);
        assert!(r.lower <= r.upper);
        assert!(r.simplified.unwrap() >= r.abs_bound);
    }

    #[test]
    fn at_kappa() {
        assert!(matches!(
            perturbation_interval(1.0, 0.5, 0.5, 0.0),
            Err(Error::BoundInapplicable { .. })
        ));
    }
}
