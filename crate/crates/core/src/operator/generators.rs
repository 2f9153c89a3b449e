use std::fmt;

use nalgebra::DMatrix;

use super::{spectral_norm, HermitianOperator};
use crate::error::{Error, Result};

pub const TRACE_TOL: f64 = 1e-10;
pub const INDEPENDENCE_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Ordered generators ĝ_1..ĝ_m acting on one N-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    dim: usize,
    generators: Vec<HermitianOperator>,
}

impl GeneratorSet {
    /// Checks only shape; call [`GeneratorSet::validated`] to enforce the
    /// tracelessness and independence invariants.
    pub fn new(generators: Vec<HermitianOperator>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidGenerators("empty generator list".into()))?;
        let dim = first.dim();
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
        }
        Ok(Self { dim, generators })
    }

    pub fn validated(generators: Vec<HermitianOperator>) -> Result<Self> {
        let set = Self::new(generators)?;
        let report = validate_generator_set(&set);
        if report.passed() {
            Ok(set)
        } else {
            Err(Error::InvalidGenerators(report.to_string()))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }

    pub fn get(&self, j: usize) -> &HermitianOperator {
        &self.generators[j]
    }

    /// Σ_j y_j ĝ_j + μ Î
    pub fn combine(&self, y: &[f64], mu: f64) -> HermitianOperator {
        HermitianOperator::linear_combination(y, &self.generators, mu)
    }

    /// G_max = max_j ‖ĝ_j‖
    pub fn g_max(&self) -> Result<f64> {
        self.generators
            .iter()
            .map(spectral_norm)
            .try_fold(0.0f64, |acc, n| Ok(acc.max(n?)))
    }

    /// Rows ĥ_i = Σ_j F_ij ĝ_j for an r×m matrix given row by row.
    pub fn transformed(&self, f: &[Vec<f64>]) -> Result<Self> {
        let rows = f
            .iter()
            .map(|row| {
                if row.len() != self.len() {
                    return Err(Error::DimensionMismatch {
                        expected: self.len(),
                        found: row.len(),
                    });
                }
                Ok(self.combine(row, 0.0))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// Real vectorization (Re, Im of every entry) as columns of a 2N²×m matrix,
    /// optionally preceded by the identity.
    pub(crate) fn vectorized(&self, with_identity: bool) -> DMatrix<f64> {
        let n2 = self.dim * self.dim;
        let offset = usize::from(with_identity);
        let cols = self.len() + offset;
        let mut m = DMatrix::zeros(2 * n2, cols);
        if with_identity {
            for i in 0..self.dim {
                m[(i * self.dim + i, 0)] = 1.0;
            }
        }
        for (j, g) in self.generators.iter().enumerate() {
            for (k, z) in g.matrix().as_slice().iter().enumerate() {
                m[(k, j + offset)] = z.re;
                m[(n2 + k, j + offset)] = z.im;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    /// 1-based generator number with |Tr ĝ_j|.
    NotTraceless { generator: usize, trace: f64 },
    /// First 1-based generator that is a combination of its predecessors.
    Dependent { generator: usize, ratio: f64 },
    /// Dependence only appears once the identity is included.
    DependentWithIdentity { generator: usize, ratio: f64 },
    /// Ingested matrix deviated from Hermitian by more than 1e-12.
    NotHermitian { generator: usize, residual: f64 },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotTraceless { generator, trace } => {
                write!(f, "generator {generator} is not traceless (|Tr| = {trace:.3e})")
            }
            Self::Dependent { generator, ratio } => write!(
                f,
                "generator {generator} is linearly dependent on earlier generators (σ_min/σ_max = {ratio:.3e})"
            ),
            Self::DependentWithIdentity { generator, ratio } => write!(
                f,
                "generator {generator} is dependent on the identity and earlier generators (σ_min/σ_max = {ratio:.3e})"
            ),
            Self::NotHermitian { generator, residual } => write!(
                f,
                "generator {generator} was not Hermitian on ingest (residual {residual:.3e})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    /// Pre-symmetrization Hermiticity residual of each generator.
    pub hermiticity_residuals: Vec<f64>,
    /// σ_min/σ_max of the vectorized generators.
    pub independence_ratio: f64,
    /// Same, with the identity prepended.
    pub identity_independence_ratio: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "all generator checks passed");
        }
        let parts: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn singular_ratio(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    sv.iter().copied().fold(f64::INFINITY, f64::min) / max
}

/// Ratio for the first `cols` columns; columns are normalized so scale
/// differences between generators do not masquerade as dependence.
fn prefix_ratio(full: &DMatrix<f64>, cols: usize) -> f64 {
    let mut m = full.columns(0, cols).into_owned();
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= n;
        }
    }
    singular_ratio(&m)
}

fn first_dependent(full: &DMatrix<f64>, start: usize) -> Option<(usize, f64)> {
    (start..full.ncols()).find_map(|c| {
        let r = prefix_ratio(full, c + 1);
        (r <= INDEPENDENCE_TOL).then_some((c, r))
    })
}

pub fn validate_generator_set(gs: &GeneratorSet) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (j, g) in gs.generators().iter().enumerate() {
        let residual = g.ingest_residual();
        report.hermiticity_residuals.push(residual);
        if residual > HERMITICITY_TOL {
            report.issues.push(ValidationIssue::NotHermitian {
                generator: j + 1,
                residual,
            });
        }
        let trace = g.trace().abs();
        if trace > TRACE_TOL {
            report.issues.push(ValidationIssue::NotTraceless {
                generator: j + 1,
                trace,
            });
        }
    }

    let plain = gs.vectorized(false);
    report.independence_ratio = prefix_ratio(&plain, plain.ncols());
    let dependent = first_dependent(&plain, 0);
    if let Some((c, ratio)) = dependent {
        report.issues.push(ValidationIssue::Dependent {
            generator: c + 1,
            ratio,
        });
    }

    let with_id = gs.vectorized(true);
    report.identity_independence_ratio = prefix_ratio(&with_id, with_id.ncols());
    if dependent.is_none() {
        if let Some((c, ratio)) = first_dependent(&with_id, 1) {
            report.issues.push(ValidationIssue::DependentWithIdentity {
                generator: c,
                ratio,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli_from_label;

    fn set(labels: &[&str]) -> GeneratorSet {
        GeneratorSet::new(labels.iter().map(|l| pauli_from_label(l).unwrap()).collect()).unwrap()
    }

    #[test]
    fn zxz_set_passes() {
        let r = validate_generator_set(&set(&["ZI", "XI", "ZZ"]));
        assert!(r.passed(), "{r}");
        assert!(r.independence_ratio > 0.5);
    }

    #[test]
    fn duplicate_fails_at_index_two() {
        let r = validate_generator_set(&set(&["Z", "Z"]));
        assert_eq!(r.issues.len(), 1);
        assert!(matches!(r.issues[0], ValidationIssue::Dependent { generator: 2, .. }));
    }

    #[test]
    fn identity_fails_tracelessness() {
        let r = validate_generator_set(&set(&["I"]));
        assert!(r
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::NotTraceless { generator: 1, .. })));
        assert!(r
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::DependentWithIdentity { generator: 1, .. })));
    }

    #[test]
    fn scale_does_not_affect_independence() {
        let gs = GeneratorSet::new(vec![
            pauli_from_label("Z").unwrap().scaled(1e-6),
            pauli_from_label("X").unwrap().scaled(1e6),
        ])
        .unwrap();
        assert!(validate_generator_set(&gs).passed());
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let r = GeneratorSet::new(vec![pauli_from_label("Z").unwrap(), pauli_from_label("ZZ").unwrap()]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
