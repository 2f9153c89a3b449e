//! Problem files: TOML describing generators plus either a coefficient vector
//! (linear mode) or polynomial couplings and a target (general mode).

use std::path::Path;

use qfe_core::adaptive::{GeneralProblem, Polynomial, PolynomialCouplings};
use qfe_core::bound::LinearProblem;
use qfe_core::operator::{GeneratorSet, OperatorRecord};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// Hilbert-space dimension; checked against the generators when present.
    pub dim: Option<usize>,
    /// Alternative to `dim`: N = 2^qubits.
    pub qubits: Option<u32>,
    pub generators: Vec<OperatorRecord>,
    pub alpha: Option<Vec<f64>>,
    pub couplings: Option<PolynomialCouplings>,
    pub target: Option<Polynomial>,
    pub l_f: Option<f64>,
    pub l_q: Option<f64>,
    pub theta: Option<Vec<f64>>,
    pub time: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    /// Product-formula steps; overrides `reshape_eps`.
    pub steps: Option<usize>,
    /// Target reshaping error used to choose the step count.
    pub reshape_eps: Option<f64>,
    pub exponent: Option<f64>,
    pub stage1_constant: Option<f64>,
    pub pilot_shots: Option<usize>,
}

pub enum Mode {
    Linear(LinearProblem),
    General(GeneralProblem),
}

pub struct Loaded {
    pub file: ProblemFile,
    pub mode: Mode,
    pub digest: String,
}

/// 1-based line of the first line that introduces `key`, for error anchoring.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
            || l.starts_with(&format!("[[{key}]]"))
            || l.starts_with(&format!("[{key}]"))
            || l.starts_with(&format!("[{key}."))
    })
    .map(|i| i + 1)
}

pub fn anchored(path: &Path, text: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    match line_of(text, key) {
        Some(line) => CliError::Input(format!("{}:{line}: {key}: {msg}", path.display())),
        None => CliError::Input(format!("{}: {key}: {msg}", path.display())),
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let file: ProblemFile = toml::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let bad = |key: &str, msg: &dyn std::fmt::Display| anchored(path, &text, key, msg);

    let ops = file
        .generators
        .iter()
        .map(|g| g.to_operator())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| bad("generators", &e))?;
    let generators = GeneratorSet::validated(ops).map_err(|e| bad("generators", &e))?;
    let n = generators.dim();
    if let Some(d) = file.dim {
        if d != n {
            return Err(bad("dim", &format!("declared {d}, generators act on {n}")));
        }
    }
    if let Some(q) = file.qubits {
        if 1usize.checked_shl(q) != Some(n) {
            return Err(bad("qubits", &format!("declared {q}, generators act on dimension {n}")));
        }
    }

    let mode = match (&file.alpha, &file.couplings, &file.target) {
        (Some(alpha), None, None) => Mode::Linear(
            LinearProblem::new(generators, alpha.clone()).map_err(|e| bad("alpha", &e))?,
        ),
        (None, Some(f), Some(q)) => {
            let l_f = file.l_f.ok_or_else(|| bad("couplings", &"general mode requires l_f"))?;
            let l_q = file.l_q.ok_or_else(|| bad("target", &"general mode requires l_q"))?;
            let p = GeneralProblem::new(generators, Box::new(f.clone()), Box::new(q.clone()), l_f, l_q)
                .map_err(|e| bad("couplings", &e))?;
            Mode::General(p)
        }
        (Some(_), _, _) => {
            return Err(bad("alpha", &"give either alpha or couplings and target, not both"))
        }
        _ => {
            return Err(CliError::Input(format!(
                "{}: problem needs either alpha or both couplings and target",
                path.display()
            )))
        }
    };

    if let Some(theta) = &file.theta {
        let want = match &mode {
            Mode::Linear(p) => p.m(),
            Mode::General(p) => p.r(),
        };
        if theta.len() != want {
            return Err(bad("theta", &format!("expected {want} entries, found {}", theta.len())));
        }
    }
    Ok(Loaded {
        file,
        mode,
        digest: digest(text.as_bytes()),
    })
}
