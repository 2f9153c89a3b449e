use serde::{Deserialize, Serialize};

use super::{pauli_sum, HermitianOperator, C64};
use crate::error::{Error, Result};

/// `(coefficient, label)` such as `(0.5, "ZX")`.
pub type PauliTerm = (f64, String);

/// Text form of an operator: either raw row-major `(re, im)` entries or a
/// Pauli-sum shorthand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorRecord {
    Raw { dim: usize, entries: Vec<(f64, f64)> },
    Pauli { pauli: Vec<PauliTerm> },
}

impl OperatorRecord {
    pub fn to_operator(&self) -> Result<HermitianOperator> {
        match self {
            Self::Raw { dim, entries } => HermitianOperator::from_row_major(
                *dim,
                entries.iter().map(|&(re, im)| C64::new(re, im)).collect(),
            ),
            Self::Pauli { pauli } => {
                if pauli.is_empty() {
                    return Err(Error::InvalidInput("empty Pauli sum".into()));
                }
                let terms: Vec<(f64, &str)> = pauli.iter().map(|(c, l)| (*c, l.as_str())).collect();
                pauli_sum(&terms)
            }
        }
    }

    pub fn from_operator(op: &HermitianOperator) -> Self {
        Self::Raw {
            dim: op.dim(),
            entries: op.matrix().as_slice().iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli_from_label;

    #[test]
    fn pauli_shorthand_matches_raw() {
        let rec: OperatorRecord = serde_json::from_str(r#"{"pauli": [[1.0, "X"]]}"#).unwrap();
        let raw: OperatorRecord =
            serde_json::from_str(r#"{"dim": 2, "entries": [[0,0],[1,0],[1,0],[0,0]]}"#).unwrap();
        assert_eq!(rec.to_operator().unwrap(), raw.to_operator().unwrap());
        assert_eq!(rec.to_operator().unwrap(), pauli_from_label("X").unwrap());
    }

    #[test]
    fn raw_round_trips() {
        let y = pauli_from_label("Y").unwrap();
        let rec = OperatorRecord::from_operator(&y);
        assert_eq!(rec.to_operator().unwrap(), y);
    }

    #[test]
    fn wrong_entry_count() {
        let rec = OperatorRecord::Raw {
            dim: 2,
            entries: vec![(1.0, 0.0); 3],
        };
        assert!(matches!(rec.to_operator(), Err(Error::EntryCount { .. })));
    }
}
