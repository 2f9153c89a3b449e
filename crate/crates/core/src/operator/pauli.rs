use num_complex::Complex64 as C64;

use super::matrix::CMatrix;
use super::HermitianOperator;
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::PauliParse(c.to_string())),
        }
    }

    pub fn matrix(self) -> CMatrix {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let data = match self {
            Pauli::I => vec![one, z, z, one],
            Pauli::X => vec![z, one, one, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![one, z, z, -one],
        };
        CMatrix::from_row_major(2, data).expect("2x2")
    }
}

/// Parses labels such as `"XIZ"`; qubit 1 is the leftmost (most significant) factor.
pub fn parse_label(label: &str) -> Result<Vec<Pauli>> {
    let symbols: Vec<Pauli> = label
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(Pauli::from_char)
        .collect::<Result<_>>()
        .map_err(|_| Error::PauliParse(label.to_string()))?;
    if symbols.is_empty() || symbols.len() > MAX_QUBITS {
        return Err(Error::PauliParse(label.to_string()));
    }
    Ok(symbols)
}

/// Kronecker product of single-qubit Paulis.
pub fn pauli_string(labels: &[Pauli]) -> Result<HermitianOperator> {
    if labels.is_empty() || labels.len() > MAX_QUBITS {
        return Err(Error::InvalidInput(format!(
            "Pauli strings support 1..={MAX_QUBITS} qubits, got {}",
            labels.len()
        )));
    }
    let mut m = labels[0].matrix();
    for p in &labels[1..] {
        m = m.kron(&p.matrix());
    }
    Ok(HermitianOperator::from_hermitian_unchecked(m))
}

pub fn pauli_from_label(label: &str) -> Result<HermitianOperator> {
    pauli_string(&parse_label(label)?)
}

/// Σ c_k P_k for `(c_k, label_k)` pairs sharing one qubit count.
pub fn pauli_sum(terms: &[(f64, &str)]) -> Result<HermitianOperator> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidInput("empty Pauli sum".into()))?;
    let n = parse_label(first.1)?.len();
    let mut acc = CMatrix::zeros(1 << n);
    for &(coef, label) in terms {
        let labels = parse_label(label)?;
        if labels.len() != n {
            return Err(Error::InvalidInput(format!(
                "Pauli label {label:?} has {} qubits, expected {n}",
                labels.len()
            )));
        }
        acc = &acc + &pauli_string(&labels)?.matrix().scale_real(coef);
    }
    Ok(HermitianOperator::from_hermitian_unchecked(acc))
}

/// Single-qubit Pauli `p` on qubit `k` (1-based) of an `n`-qubit register.
pub fn local_pauli(p: Pauli, k: usize, n: usize) -> Result<HermitianOperator> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("qubit {k} outside 1..={n}")));
    }
    let labels: Vec<Pauli> = (1..=n).map(|q| if q == k { p } else { Pauli::I }).collect();
    pauli_string(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_diag(op: &HermitianOperator) -> Vec<f64> {
        op.matrix().diagonal().iter().map(|z| z.re).collect()
    }

    #[test]
    fn z_is_diag_one_minus_one() {
        let z = pauli_from_label("Z").unwrap();
        assert_eq!(real_diag(&z), vec![1.0, -1.0]);
        assert_eq!(z.matrix().off_diagonal_norm(), 0.0);
    }

    #[test]
    fn zz_diagonal() {
        let zz = pauli_from_label("ZZ").unwrap();
        assert_eq!(real_diag(&zz), vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn xi_is_block_antidiagonal() {
        let xi = pauli_from_label("XI").unwrap();
        let m = xi.matrix();
        let one = C64::new(1.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i + 2) % 4 == j { one } else { C64::new(0.0, 0.0) };
                assert_eq!(m[(i, j)], expected, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn rejects_bad_symbols() {
        assert!(matches!(parse_label("XQ"), Err(Error::PauliParse(_))));
        assert!(parse_label("").is_err());
        assert!(parse_label(&"Z".repeat(13)).is_err());
    }

    #[test]
    fn distinct_strings_are_trace_orthogonal() {
        let labels = ["IX", "XI", "ZZ", "YZ", "XY"];
        for a in labels {
            for b in labels {
                let pa = pauli_from_label(a).unwrap();
                let pb = pauli_from_label(b).unwrap();
                let tr = pa.matrix().trace_product(pb.matrix());
                let expected = if a == b { 4.0 } else { 0.0 };
                assert!((tr - C64::new(expected, 0.0)).norm() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn strings_square_to_identity() {
        for label in ["X", "YZ", "XYZ", "ZIXY"] {
            let p = pauli_from_label(label).unwrap();
            let sq = p.matrix() * p.matrix();
            assert_eq!(sq, CMatrix::identity(p.dim()));
        }
    }
}
