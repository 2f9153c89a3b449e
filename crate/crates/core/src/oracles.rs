//! Closed-form values of γ for structured families, and a validation matrix
//! comparing them (and the direction-search oracle) with the solver.

use serde::{Deserialize, Serialize};

use crate::bound::{brute_force_gamma, solve, LinearProblem};
use crate::error::{Error, Result};
use crate::operator::{
    local_pauli, pauli_from_label, trace_norm, GeneratorSet, HermitianOperator, Pauli,
};
use crate::stream::{Cursor, Domain, SeedStream};

/// Bumped whenever a case is added, removed or its sampling changes.
pub const CATALOG_VERSION: u32 = 1;
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Grid resolution of the direction-search rows.
pub const BRUTE_RESOLUTION: usize = 48;
/// Shortfall of the direction search below γ that still counts as agreement.
pub const BRUTE_SLACK: f64 = 1e-4;

/// ‖α‖₂/2 for generators (X, Y, Z).
pub fn gamma_single_qubit(alpha: [f64; 3]) -> f64 {
    alpha.iter().map(|a| a * a).sum::<f64>().sqrt() / 2.0
}

/// ½‖Σ α_j ĝ_j‖₁ for a traceless Hilbert–Schmidt orthonormal basis
/// (m = N² − 1).
pub fn gamma_orthonormal(generators: &GeneratorSet, alpha: &[f64]) -> Result<f64> {
    let n = generators.dim();
    let m = generators.len();
    if m != n * n - 1 {
        return Err(Error::OracleRefused(format!(
            "orthonormal basis needs N² − 1 = {} generators, got {m}",
            n * n - 1
        )));
    }
    if alpha.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: alpha.len(),
        });
    }
    let gs = generators.generators();
    for (i, a) in gs.iter().enumerate() {
        if a.trace().abs() > ORTHONORMAL_TOL {
            return Err(Error::OracleRefused(format!("generator {i} is not traceless")));
        }
        for (j, b) in gs.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            if (a.trace_with(b) - want).abs() > ORTHONORMAL_TOL {
                return Err(Error::OracleRefused(format!(
                    "generators {i} and {j} are not orthonormal"
                )));
            }
        }
    }
    Ok(trace_norm(&generators.combine(alpha, 0.0))? / 2.0)
}

/// γ for a set of distinct Pauli strings and α = e_j: always ½.
pub fn gamma_single_pauli_coeff() -> f64 {
    0.5
}

/// ‖α‖∞/2 for local Z generators on distinct qubits.
pub fn gamma_commuting_z(alpha: &[f64]) -> f64 {
    alpha.iter().fold(0.0f64, |m, a| m.max(a.abs())) / 2.0
}

/// ½√(α₂² + max(|α₁|, |α₃|)²) for generators (Z⊗I, X⊗I, Z⊗Z).
pub fn gamma_two_qubit_zxz(alpha: [f64; 3]) -> f64 {
    let side = alpha[0].abs().max(alpha[2].abs());
    0.5 * (alpha[1] * alpha[1] + side * side).sqrt()
}

fn paulis(labels: &[&str]) -> Result<GeneratorSet> {
    GeneratorSet::new(
        labels
            .iter()
            .map(|l| pauli_from_label(l))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// (X, Y, Z)/√2
pub fn normalized_qubit_paulis() -> Result<GeneratorSet> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    GeneratorSet::new(
        ["X", "Y", "Z"]
            .iter()
            .map(|l| Ok(pauli_from_label(l)?.scaled(s)))
            .collect::<Result<Vec<HermitianOperator>>>()?,
    )
}

/// Z on each of `n` qubits.
pub fn local_z(n: usize) -> Result<GeneratorSet> {
    GeneratorSet::new(
        (0..n)
            .map(|k| local_pauli(Pauli::Z, k + 1, n))
            .collect::<Result<Vec<_>>>()?,
    )
}

pub fn zxz() -> Result<GeneratorSet> {
    paulis(&["ZI", "XI", "ZZ"])
}

const TWO_QUBIT_PAULIS: [&str; 15] = [
    "IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ",
];

fn coefficient(c: &mut Cursor) -> f64 {
    // Mixed magnitudes, occasionally exactly zero.
    if c.uniform() < 0.1 {
        0.0
    } else {
        (2.0 * c.uniform() - 1.0) * 3.0f64.powf(2.0 * c.uniform() - 1.0)
    }
}

fn coefficients<const K: usize>(c: &mut Cursor) -> [f64; K] {
    std::array::from_fn(|_| coefficient(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleCase {
    SingleQubit,
    Orthonormal,
    SinglePauliCoefficient,
    CommutingZ,
    TwoQubitZxz,
}

/// One instance with its closed-form value.
#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub problem: LinearProblem,
    pub expected: f64,
}

impl OracleCase {
    pub fn name(self) -> &'static str {
        match self {
            Self::SingleQubit => "single_qubit",
            Self::Orthonormal => "orthonormal",
            Self::SinglePauliCoefficient => "single_pauli_coefficient",
            Self::CommutingZ => "commuting_z",
            Self::TwoQubitZxz => "two_qubit_zxz",
        }
    }

    /// Random instance of the family; sizes stay within N ≤ 4, m ≤ 4.
    pub fn draw(self, c: &mut Cursor) -> Result<OracleInstance> {
        let (problem, expected) = match self {
            Self::SingleQubit => {
                let a: [f64; 3] = coefficients(c);
                let p = LinearProblem::new(paulis(&["X", "Y", "Z"])?, a.to_vec())?;
                (p, gamma_single_qubit(a))
            }
            Self::Orthonormal => {
                let a: [f64; 3] = coefficients(c);
                let gs = normalized_qubit_paulis()?;
                let expected = gamma_orthonormal(&gs, &a)?;
                (LinearProblem::new(gs, a.to_vec())?, expected)
            }
            Self::SinglePauliCoefficient => {
                let m = 1 + c.index_below(4);
                let mut pool: Vec<&str> = TWO_QUBIT_PAULIS.to_vec();
                let mut labels = Vec::with_capacity(m);
                for _ in 0..m {
                    labels.push(pool.swap_remove(c.index_below(pool.len())));
                }
                let mut alpha = vec![0.0; m];
                alpha[c.index_below(m)] = 1.0;
                (LinearProblem::new(paulis(&labels)?, alpha)?, gamma_single_pauli_coeff())
            }
            Self::CommutingZ => {
                let a: [f64; 2] = coefficients(c);
                (LinearProblem::new(local_z(2)?, a.to_vec())?, gamma_commuting_z(&a))
            }
            Self::TwoQubitZxz => {
                let a: [f64; 3] = coefficients(c);
                (LinearProblem::new(zxz()?, a.to_vec())?, gamma_two_qubit_zxz(a))
            }
        };
        Ok(OracleInstance { problem, expected })
    }
}

pub fn catalog() -> Vec<OracleCase> {
    vec![
        OracleCase::SingleQubit,
        OracleCase::Orthonormal,
        OracleCase::SinglePauliCoefficient,
        OracleCase::CommutingZ,
        OracleCase::TwoQubitZxz,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub case: String,
    pub draws: usize,
    pub failures: usize,
    /// Largest |γ_solver − γ_oracle| / max(1, γ_oracle).
    pub worst_error: f64,
    pub tolerance: f64,
    /// First failure message, if any draw errored.
    pub error: Option<String>,
}

impl ValidationRow {
    pub fn passed(&self) -> bool {
        self.draws > 0 && self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationTable {
    pub catalog_version: u32,
    pub solver_tol: f64,
    pub rel_tol: f64,
    pub seed: u64,
    pub rows: Vec<ValidationRow>,
}

impl ValidationTable {
    /// False for an empty table.
    pub fn all_passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(ValidationRow::passed)
    }
}

impl std::fmt::Display for ValidationTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:<30} {:>6} {:>9} {:>11} {:>11}  status",
            "case", "draws", "failures", "worst", "tolerance"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<30} {:>6} {:>9} {:>11.3e} {:>11.1e}  {}",
                r.case,
                r.draws,
                r.failures,
                r.worst_error,
                r.tolerance,
                if r.passed() { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn row(
    case: &str,
    draws: usize,
    mut check: impl FnMut() -> Result<f64>,
    tolerance: f64,
) -> ValidationRow {
    let mut out = ValidationRow {
        case: case.to_string(),
        draws,
        failures: 0,
        worst_error: 0.0,
        tolerance,
        error: None,
    };
    for _ in 0..draws {
        match check() {
            Ok(e) => {
                out.worst_error = out.worst_error.max(e);
                if !(e <= tolerance) {
                    out.failures += 1;
                }
            }
            Err(err) => {
                out.failures += 1;
                out.error.get_or_insert_with(|| err.to_string());
            }
        }
    }
    out
}

/// Runs every case of `cases` for `draws` random instances, plus a row
/// checking that the direction search never exceeds the solver's γ and
/// falls short by at most [`BRUTE_SLACK`].
pub fn validate(
    cases: &[OracleCase],
    draws: usize,
    solver_tol: f64,
    rel_tol: f64,
    seed: u64,
) -> ValidationTable {
    let stream = SeedStream::new(seed);
    let mut rows: Vec<ValidationRow> = cases
        .iter()
        .enumerate()
        .map(|(i, &case)| {
            let mut cursor = stream.derive(i as u64).cursor(Domain::Test, 0);
            row(
                case.name(),
                draws,
                || {
                    let inst = case.draw(&mut cursor)?;
                    let g = solve(&inst.problem, solver_tol)?.gamma;
                    Ok((g - inst.expected).abs() / inst.expected.max(1.0))
                },
                rel_tol,
            )
        })
        .collect();
    if !cases.is_empty() {
        let mut cursor = stream.derive(cases.len() as u64).cursor(Domain::Test, 0);
        rows.push(row(
            "direction_search_lower_bound",
            draws,
            || {
                let m = 1 + cursor.index_below(3);
                let mut pool: Vec<&str> = TWO_QUBIT_PAULIS.to_vec();
                let labels: Vec<&str> = (0..m)
                    .map(|_| pool.swap_remove(cursor.index_below(pool.len())))
                    .collect();
                let alpha: Vec<f64> = (0..m).map(|_| coefficient(&mut cursor)).collect();
                let p = LinearProblem::new(paulis(&labels)?, alpha)?;
                let g = solve(&p, solver_tol)?.gamma;
                let b = brute_force_gamma(&p, BRUTE_RESOLUTION)?;
                let scale = g.max(1.0);
                if b > g + rel_tol * scale {
                    return Ok(f64::INFINITY);
                }
                Ok((g - b).max(0.0) / scale)
            },
            BRUTE_SLACK,
        ));
    }
    ValidationTable {
        catalog_version: CATALOG_VERSION,
        solver_tol,
        rel_tol,
        seed,
        rows,
    }
}
