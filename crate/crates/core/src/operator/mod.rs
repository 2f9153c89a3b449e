//! Dense Hermitian linear algebra shared by every other module.

mod generators;
mod ingest;
pub mod jacobi;
mod matrix;
pub mod pauli;

pub use generators::{
    validate_generator_set, GeneratorSet, ValidationIssue, ValidationReport, INDEPENDENCE_TOL,
    TRACE_TOL,
};
pub use ingest::{OperatorRecord, PauliTerm};
pub use matrix::{CMatrix, C64};
pub use pauli::{local_pauli, pauli_from_label, pauli_string, pauli_sum, Pauli};

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 4096;

/// Dense N×N Hermitian matrix. Construction symmetrizes the input and keeps
/// the pre-symmetrization residual for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
    ingest_residual: f64,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_dim(m.dim())?;
        if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("operator has non-finite entries".into()));
        }
        let ingest_residual = m.hermiticity_residual();
        Ok(Self {
            m: m.hermitian_part(),
            ingest_residual,
        })
    }

    pub fn from_row_major(dim: usize, entries: Vec<C64>) -> Result<Self> {
        let found = entries.len();
        let m = CMatrix::from_row_major(dim, entries).ok_or(Error::EntryCount {
            dim,
            expected: dim * dim,
            found,
        })?;
        Self::new(m)
    }

    /// Wraps a matrix known to be Hermitian by construction (Pauli products,
    /// real diagonals, `V diag V†`). Still symmetrizes to clear round-off.
    pub(crate) fn from_hermitian_unchecked(m: CMatrix) -> Self {
        Self {
            m: m.hermitian_part(),
            ingest_residual: 0.0,
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real_diagonal(diag))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(CMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(n))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn ingest_residual(&self) -> f64 {
        self.ingest_residual
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Tr(self · other), real for Hermitian pairs.
    pub fn trace_with(&self, other: &HermitianOperator) -> f64 {
        self.m.trace_product(&other.m).re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_hermitian_unchecked(self.m.scale_real(s))
    }

    pub fn plus(&self, other: &HermitianOperator) -> Self {
        Self::from_hermitian_unchecked(&self.m + &other.m)
    }

    pub fn minus(&self, other: &HermitianOperator) -> Self {
        Self::from_hermitian_unchecked(&self.m - &other.m)
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self::from_hermitian_unchecked(&self.m + &CMatrix::identity(self.dim()).scale_real(c))
    }

    /// Σ_j w_j · ops_j (+ shift·I); all operators share one dimension.
    pub fn linear_combination(weights: &[f64], ops: &[HermitianOperator], shift: f64) -> Self {
        let n = ops.first().map(|o| o.dim()).unwrap_or(MIN_DIM);
        let mut acc = CMatrix::identity(n).scale_real(shift);
        for (w, op) in weights.iter().zip(ops) {
            if *w != 0.0 {
                acc = &acc + &op.m.scale_real(*w);
            }
        }
        Self::from_hermitian_unchecked(acc)
    }

    /// `U† self U`
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_unchecked(&(&u.adjoint() * &self.m) * u)
    }

    /// e^{-i self t} via the eigendecomposition.
    pub fn evolution(&self, t: f64) -> Result<CMatrix> {
        Ok(eig_hermitian(self)?.exp_i(-t))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::Dimension {
            dim,
            min: MIN_DIM,
            max: MAX_DIM,
        });
    }
    Ok(())
}

/// Ascending eigenvalues with orthonormal eigenvector columns (the basis 𝒦).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// The computational basis with zero eigenvalues.
    pub fn computational(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            vectors: CMatrix::identity(n),
        }
    }

    /// A basis given by the columns of `u`, with placeholder eigenvalues.
    pub fn from_basis(u: CMatrix) -> Result<Self> {
        check_dim(u.dim())?;
        let defect = u.unitarity_defect();
        if defect > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "basis columns are not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            values: vec![0.0; u.dim()],
            vectors: u,
        })
    }

    pub fn basis_vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// V diag(values) V†
    pub fn reconstruct(&self) -> CMatrix {
        self.with_values(&self.values)
    }

    /// V diag(w) V† for arbitrary real weights.
    pub fn with_values(&self, w: &[f64]) -> CMatrix {
        let n = self.dim();
        let v = &self.vectors;
        CMatrix::from_fn(n, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                if w[k] != 0.0 {
                    s += v[(i, k)] * v[(j, k)].conj() * w[k];
                }
            }
            s
        })
    }

    /// V diag(e^{i s λ_k}) V†
    pub fn exp_i(&self, s: f64) -> CMatrix {
        let n = self.dim();
        let phases: Vec<C64> = self
            .values
            .iter()
            .map(|&l| C64::from_polar(1.0, s * l))
            .collect();
        let v = &self.vectors;
        CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj())
                .sum()
        })
    }

    /// ⟨k|H|k⟩ for every basis vector.
    pub fn diagonal_of(&self, h: &HermitianOperator) -> Vec<f64> {
        let rotated = self.to_basis(h.matrix());
        rotated.diagonal().iter().map(|z| z.re).collect()
    }

    /// V† M V: coordinates of `m` in this basis.
    pub fn to_basis(&self, m: &CMatrix) -> CMatrix {
        &(&self.vectors.adjoint() * m) * &self.vectors
    }

    /// V M V†: back to the computational frame.
    pub fn from_basis_coords(&self, m: &CMatrix) -> CMatrix {
        &(&self.vectors * m) * &self.vectors.adjoint()
    }
}

pub fn eig_hermitian(h: &HermitianOperator) -> Result<EigenDecomposition> {
    let (values, vectors) = jacobi::eigen(h.matrix())?;
    Ok(EigenDecomposition { values, vectors })
}

/// λ_max − λ_min
pub fn seminorm(h: &HermitianOperator) -> Result<f64> {
    let e = eig_hermitian(h)?;
    Ok(e.values[e.dim() - 1] - e.values[0])
}

pub fn trace_norm(h: &HermitianOperator) -> Result<f64> {
    Ok(eig_hermitian(h)?.values.iter().map(|v| v.abs()).sum())
}

pub fn spectral_norm(h: &HermitianOperator) -> Result<f64> {
    let e = eig_hermitian(h)?;
    Ok(e.values[0].abs().max(e.values[e.dim() - 1].abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> HermitianOperator {
        pauli_from_label("X").unwrap()
    }

    #[test]
    fn eig_of_diagonal_is_permuted_identity() {
        let h = HermitianOperator::from_real_diagonal(&[3.0, 1.0, -2.0]).unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert_eq!(e.values, vec![-2.0, 1.0, 3.0]);
        for (col, row) in [(0, 2), (1, 1), (2, 0)] {
            assert!((e.vectors[(row, col)].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_of_pauli_x() {
        let e = eig_hermitian(&x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn seminorm_examples() {
        let z = pauli_from_label("Z").unwrap();
        assert!((seminorm(&z).unwrap() - 2.0).abs() < 1e-14);
        for n in [2, 3, 5] {
            assert!(seminorm(&HermitianOperator::identity(n).unwrap()).unwrap().abs() < 1e-14);
        }
        let d = HermitianOperator::from_real_diagonal(&[3.0, 1.0, -2.0]).unwrap();
        assert!((seminorm(&d).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_examples() {
        let d = HermitianOperator::from_real_diagonal(&[1.0, -1.0]).unwrap();
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(trace_norm(&HermitianOperator::zeros(3).unwrap()).unwrap(), 0.0);
        // ½ α·σ with ‖α‖₂ = 1 has eigenvalues ±½.
        let a = pauli_sum(&[(0.6, "X"), (0.8, "Y")]).unwrap().scaled(0.5);
        assert!((trace_norm(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_examples() {
        let z = pauli_from_label("Z").unwrap();
        assert!((spectral_norm(&z).unwrap() - 1.0).abs() < 1e-14);
        let two_i = HermitianOperator::identity(4).unwrap().scaled(2.0);
        assert!((spectral_norm(&two_i).unwrap() - 2.0).abs() < 1e-14);
        let zx = pauli_sum(&[(1.0, "ZI"), (1.0, "XI")]).unwrap();
        assert!((spectral_norm(&zx).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn construction_symmetrizes_and_records_residual() {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 0)] = C64::new(1.0 + 1e-13, 0.0);
        let h = HermitianOperator::new(m).unwrap();
        assert!(h.ingest_residual() > 0.0 && h.ingest_residual() < 1e-12);
        assert_eq!(h.matrix().hermiticity_residual(), 0.0);
    }

    #[test]
    fn dimension_limits() {
        assert!(matches!(
            HermitianOperator::new(CMatrix::zeros(1)),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            HermitianOperator::from_row_major(2, vec![C64::new(0.0, 0.0); 3]),
            Err(Error::EntryCount { .. })
        ));
    }

    #[test]
    fn evolution_is_unitary_and_matches_diagonal_phases() {
        let h = HermitianOperator::from_real_diagonal(&[0.5, -1.5]).unwrap();
        let u = h.evolution(2.0).unwrap();
        assert!(u.unitarity_defect() < 1e-14);
        assert!((u[(0, 0)] - C64::from_polar(1.0, -1.0)).norm() < 1e-14);
        assert!((u[(1, 1)] - C64::from_polar(1.0, 3.0)).norm() < 1e-14);
    }
}
