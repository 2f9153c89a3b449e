use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {dim} outside supported range [{min}, {max}]")]
    Dimension { dim: usize, min: usize, max: usize },

    #[error("expected {expected} entries for a {dim}x{dim} operator, found {found}")]
    EntryCount {
        dim: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "Jacobi eigensolver did not converge after {sweeps} sweeps \
         (off-diagonal norm {off_norm:.3e}, matrix norm {norm:.3e}); \
         input is likely non-finite or badly scaled"
    )]
    EigenNoConvergence {
        sweeps: usize,
        off_norm: f64,
        norm: f64,
    },

    #[error("invalid Pauli label {0:?}")]
    PauliParse(String),

    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate problem: coefficient vector is zero")]
    Degenerate,

    #[error("conditioning constant {kappa:.3e} at or below the independence threshold; dual multipliers are unbounded")]
    UnboundedMultipliers { kappa: f64 },

    #[error(
        "dual solver did not converge after {iterations} iterations \
         (gap proxy {gap:.3e}, last objective {objective:.6e}, residual {residual:.3e})"
    )]
    SolverNonConvergence {
        iterations: usize,
        gap: f64,
        objective: f64,
        residual: f64,
    },

    #[error("primal recovery failed: constraint residual {residual:.3e} exceeds 1e-7; tighten the dual tolerance")]
    RecoveryFailure { residual: f64 },

    #[error("no feasible diagonal weights exist in the supplied basis")]
    InfeasibleBasis,

    #[error("perturbation bound inapplicable: eps_g = {eps_g:.3e} is not below kappa = {kappa:.3e}")]
    BoundInapplicable { eps_g: f64, kappa: f64 },

    #[error("swap event {index} at time {time} does not align with the step grid (dt = {dt})")]
    GridAlignment { index: usize, time: f64, dt: f64 },

    #[error("effective Hamiltonian is not diagonal in the schedule basis (off-diagonal norm {off_norm:.3e})")]
    NonDiagonal { off_norm: f64 },

    #[error("estimator slope degenerate: |cos(phi_ref)| = {cos:.3e} < 0.1")]
    SlopeDegenerate { cos: f64 },

    #[error("linearization ill-posed: Jacobian has rank {rank} < {expected}")]
    IllPosedLinearization { rank: usize, expected: usize },

    #[error("oracle refused: {0}")]
    OracleRefused(String),
}
