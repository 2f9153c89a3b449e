use std::path::Path;

use qfe_core::adaptive::{linearize_at, run_two_step, TwoStepConfig, TwoStepDiagnostics};
use qfe_core::bound::{conditioning_kappa, solve, BoundRecord, BoundSolution, LinearProblem, DEFAULT_TOL};
use qfe_core::operator::spectral_norm;
use qfe_core::oracles::{catalog, validate as run_validation};
use qfe_core::protocol::{simulate_linear, LinearRunConfig, SimulationRecord, SwapEvent};
use qfe_core::reshaping::{
    build_dephasing_set, qdrift_unitary, required_steps, reshaping_error, twirl_exact, ReshapingPlan,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::Records;
use crate::problem::{load, Loaded, Mode};
use crate::{Axis, CliError, RunFlags, Switch};

const DEFAULT_SHOTS: usize = 10_000;
const DEFAULT_RESHAPE_EPS: f64 = 0.1;
/// Refuse automatically chosen step counts above this; pass --steps instead.
const MAX_AUTO_STEPS: usize = 1_000_000;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn tolerance(flag: Option<f64>, loaded: &Loaded) -> f64 {
    flag.or(loaded.file.tol).unwrap_or(DEFAULT_TOL)
}

#[derive(Serialize)]
struct BoundOutput {
    #[serde(flatten)]
    bound: BoundRecord,
    tol: f64,
    certified: bool,
    constraint_residual: f64,
    /// Coefficients of the linearized problem in general mode.
    alpha: Vec<f64>,
}

/// The linear problem the bound refers to: the file's own, or the
/// linearization at θ in general mode.
fn linear_problem(loaded: &Loaded) -> Result<LinearProblem, CliError> {
    match &loaded.mode {
        Mode::Linear(p) => Ok(p.clone()),
        Mode::General(g) => {
            let theta = loaded
                .file
                .theta
                .as_ref()
                .ok_or_else(|| input("general mode needs theta to linearize the bound"))?;
            Ok(linearize_at(g, theta)?.problem)
        }
    }
}

pub fn bound(file: &Path, tol: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let loaded = load(file)?;
    let tol = tolerance(tol, &loaded);
    let p = linear_problem(&loaded)?;
    let sol = solve(&p, tol)?;
    let mut bound = sol.record();
    if bound.kappa.is_none() && !sol.degenerate {
        bound.kappa = conditioning_kappa(&p.generators).ok();
    }
    let certified = sol.gap.abs() <= tol * sol.gamma.max(1.0);
    let output = BoundOutput {
        bound,
        tol,
        certified,
        constraint_residual: sol.constraint_residual(&p),
        alpha: p.alpha.clone(),
    };
    println!("gamma     {:.12}", sol.gamma);
    println!("gap       {:.3e} (tol {tol:.1e})", sol.gap);
    match output.bound.kappa {
        Some(k) => println!("kappa     {k:.6}"),
        None => println!("kappa     n/a"),
    }
    println!("support   +{:?} -{:?}", sol.support_pos, sol.support_neg);
    println!("dual y    {:?}", sol.dual.y);
    println!("dual mu   {:.6e}", sol.dual.mu + 0.0);
    if sol.degenerate {
        println!("degenerate coefficient vector");
    }
    let mut rec = Records::new("bound", Some(&loaded.digest));
    rec.push(None, &output)?;
    rec.write(out)?;
    if certified {
        Ok(())
    } else {
        Err(CliError::NonConvergence(format!(
            "gap {:.3e} exceeds {tol:.1e}·max(1, γ)",
            sol.gap
        )))
    }
}

/// Per-run settings after merging flags, file values and defaults.
#[derive(Clone)]
struct Settings {
    tol: f64,
    seed: u64,
    shots: usize,
    time: Option<f64>,
    steps: Option<usize>,
    reshape: Switch,
    exponent: Option<f64>,
}

impl Settings {
    fn new(flags: &RunFlags, loaded: &Loaded) -> Self {
        let f = &loaded.file;
        Self {
            tol: tolerance(flags.tol, loaded),
            seed: flags.seed.or(f.seed).unwrap_or(0),
            shots: flags.shots.or(f.shots).unwrap_or(DEFAULT_SHOTS),
            time: f.time,
            steps: flags.steps.or(f.steps),
            reshape: flags.reshape.unwrap_or(Switch::On),
            exponent: f.exponent,
        }
    }

    fn time(&self) -> Result<f64, CliError> {
        self.time.ok_or_else(|| input("problem file has no time"))
    }
}

#[derive(Serialize)]
struct ScheduleSummary {
    pair0: (usize, usize),
    final_pair: (usize, usize),
    swap_count: usize,
    left_dwell: Vec<(usize, f64)>,
    right_dwell: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    events: Option<Vec<SwapEvent>>,
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum RunOutput {
    Linear {
        gamma: f64,
        q_true: f64,
        phi_ideal: f64,
        /// qt/γ, which `phi_ideal` reproduces.
        phi_identity: f64,
        phi_final: f64,
        steps: Option<usize>,
        simulation: SimulationRecord,
        schedule: ScheduleSummary,
    },
    TwoStep {
        config: TwoStepConfig,
        simulation: SimulationRecord,
        diagnostics: TwoStepDiagnostics,
    },
}

fn theta(loaded: &Loaded) -> Result<&[f64], CliError> {
    loaded
        .file
        .theta
        .as_deref()
        .ok_or_else(|| input("problem file has no theta"))
}

/// Step count: explicit, or chosen from the target error `reshape_eps`.
fn step_count(p: &LinearProblem, theta: &[f64], t: f64, s: &Settings, eps: Option<f64>) -> Result<usize, CliError> {
    if let Some(l) = s.steps {
        return Ok(l);
    }
    let lam = p
        .generators
        .generators()
        .iter()
        .zip(theta)
        .map(|(g, th)| Ok(th.abs() * spectral_norm(g)?))
        .sum::<qfe_core::Result<f64>>()?;
    if lam == 0.0 {
        return Ok(1);
    }
    let l = required_steps(p.dim(), lam, t, eps.unwrap_or(DEFAULT_RESHAPE_EPS), 1.0)?;
    if l > MAX_AUTO_STEPS {
        return Err(input(format!(
            "reshaping would need {l} steps; pass --steps or raise reshape_eps"
        )));
    }
    Ok(l)
}

fn linear_run(
    loaded: &Loaded,
    p: &LinearProblem,
    sol: &BoundSolution,
    s: &Settings,
    events: bool,
) -> Result<RunOutput, CliError> {
    let theta = theta(loaded)?;
    let t = s.time()?;
    let reshape_steps = match s.reshape {
        Switch::On => Some(step_count(p, theta, t, s, loaded.file.reshape_eps)?),
        Switch::Off => None,
    };
    let cfg = LinearRunConfig {
        total_time: t,
        shots: s.shots,
        seed: s.seed,
        reshape_steps,
        phi_ref: None,
    };
    let run = simulate_linear(p, sol, theta, None, &cfg)?;
    let sch = run.schedule;
    Ok(RunOutput::Linear {
        gamma: sol.gamma,
        q_true: run.q_true,
        phi_ideal: run.phi_ideal,
        phi_identity: run.q_true * t / sol.gamma,
        phi_final: run.phi_final,
        steps: run.steps,
        simulation: run.result.record(),
        schedule: ScheduleSummary {
            pair0: sch.pair0,
            final_pair: sch.final_pair,
            swap_count: sch.swaps.len(),
            left_dwell: sch.left_dwell,
            right_dwell: sch.right_dwell,
            events: events.then_some(sch.swaps),
        },
    })
}

fn two_step_run(loaded: &Loaded, s: &Settings) -> Result<RunOutput, CliError> {
    let Mode::General(g) = &loaded.mode else {
        unreachable!("two-step runs need general mode")
    };
    let f = &loaded.file;
    let mut cfg = TwoStepConfig::new(s.time()?, s.shots, s.seed);
    cfg.tol = s.tol;
    if let Some(p) = s.exponent {
        cfg.exponent = p;
    }
    if let Some(c) = f.stage1_constant {
        cfg.stage1_constant = c;
    }
    if let Some(n) = f.pilot_shots {
        cfg.pilot_shots = n;
    }
    let run = run_two_step(g, theta(loaded)?, &cfg)?;
    Ok(RunOutput::TwoStep {
        config: cfg,
        simulation: run.result.record(),
        diagnostics: run.diagnostics,
    })
}

/// One protocol run; `linear` carries the pre-solved problem in linear mode.
fn run(
    loaded: &Loaded,
    linear: Option<&(LinearProblem, BoundSolution)>,
    s: &Settings,
    events: bool,
) -> Result<RunOutput, CliError> {
    match linear {
        Some((p, sol)) => linear_run(loaded, p, sol, s, events),
        None => two_step_run(loaded, s),
    }
}

fn presolve(loaded: &Loaded, tol: f64) -> Result<Option<(LinearProblem, BoundSolution)>, CliError> {
    match &loaded.mode {
        Mode::Linear(p) => Ok(Some((p.clone(), solve(p, tol)?))),
        Mode::General(_) => Ok(None),
    }
}

pub fn simulate(file: &Path, flags: &RunFlags, events: bool) -> Result<(), CliError> {
    let loaded = load(file)?;
    let s = Settings::new(flags, &loaded);
    if matches!(loaded.mode, Mode::General(_)) && flags.reshape == Some(Switch::On) {
        eprintln!("note: the two-step protocol evolves under the exact twirl; --reshape is ignored");
    }
    let linear = presolve(&loaded, s.tol)?;
    let out = run(&loaded, linear.as_ref(), &s, events)?;
    match &out {
        RunOutput::Linear {
            gamma,
            q_true,
            phi_ideal,
            phi_final,
            steps,
            simulation,
            ..
        } => {
            println!("gamma       {gamma:.10}");
            println!("q true      {q_true:.10}");
            println!("q estimate  {:.10}", simulation.q_estimate);
            println!("variance    {:.6e} per shot (bound {:.6e})", simulation.variance_estimate, (gamma / s.time()?).powi(2));
            println!("phase       ideal {phi_ideal:.10}, evolved {phi_final:.10}");
            match steps {
                Some(l) => println!("reshaping   {l} steps"),
                None => println!("reshaping   exact twirl"),
            }
        }
        RunOutput::TwoStep {
            simulation,
            diagnostics: d,
            ..
        } => {
            println!("t1, t2      {:.6}, {:.6}", d.t1, d.t2);
            println!("gamma       {:.10} at θ, {:.10} at θ̃", d.gamma_true, d.gamma_tilde);
            println!("q true      {:.10}", d.q_true);
            println!("q estimate  {:.10}", simulation.q_estimate);
            println!("remainders  H {:.3e}, q {:.3e}", d.remainders.hamiltonian, d.remainders.target);
            println!("mismatch    ≤ {:.3e}", d.mismatch_bound);
        }
    }
    let mut rec = Records::new("simulate", Some(&loaded.digest));
    rec.push(Some(s.seed), &out)?;
    rec.write(flags.out.as_deref())
}

#[derive(Serialize, Default)]
struct SweepRecord {
    axis: &'static str,
    value: f64,
    seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_mean: Option<f64>,
    /// Sample variance of q_est across seeds.
    #[serde(skip_serializing_if = "Option::is_none")]
    q_spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_variance_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_abs_bias: Option<f64>,
    /// Two-step: median of the locked-reference MSE per shot times t₂².
    #[serde(skip_serializing_if = "Option::is_none")]
    median_mse_t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_gamma_error: Option<f64>,
    /// Reshaping sweep: error for each seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    errors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_error: Option<f64>,
}

fn axis_name(a: Axis) -> &'static str {
    match a {
        Axis::T => "t",
        Axis::L => "L",
        Axis::Shots => "shots",
        Axis::P => "p",
    }
}

fn positive_count(v: f64, what: &str) -> Result<usize, CliError> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e12 {
        Ok(v as usize)
    } else {
        Err(input(format!("{what} must be a positive integer, got {v}")))
    }
}

fn reshaping_errors(loaded: &Loaded, linear: &(LinearProblem, BoundSolution), steps: usize, seeds: &[u64]) -> Result<Vec<f64>, CliError> {
    let (p, sol) = linear;
    let h = p.generators.combine(theta(loaded)?, 0.0);
    let t = loaded.file.time.ok_or_else(|| input("problem file has no time"))?;
    let set = build_dephasing_set(&sol.basis);
    let h_eff = twirl_exact(&h, &sol.basis)?;
    seeds
        .par_iter()
        .map(|&seed| {
            let plan = ReshapingPlan::sample(t, steps, p.dim(), seed)?;
            Ok(reshaping_error(&qdrift_unitary(&h, &plan, &set)?, &h_eff, t)?)
        })
        .collect()
}

pub fn sweep(file: &Path, axis: Axis, values: &[f64], repeats: u64, flags: &RunFlags) -> Result<(), CliError> {
    let loaded = load(file)?;
    let base = Settings::new(flags, &loaded);
    if repeats == 0 {
        return Err(input("--repeats must be at least 1"));
    }
    let general = matches!(loaded.mode, Mode::General(_));
    match axis {
        Axis::L if general => return Err(input("the L axis needs a linear-mode file")),
        Axis::P if !general => return Err(input("the p axis needs a general-mode file")),
        _ => {}
    }
    let linear = presolve(&loaded, base.tol)?;
    let seeds: Vec<u64> = (0..repeats).map(|i| base.seed.wrapping_add(i)).collect();
    let mut rec = Records::new("sweep", Some(&loaded.digest));
    println!("{:>12}  {:>14}  {:>14}", axis_name(axis), "median", "spread");
    for &value in values {
        let mut r = SweepRecord {
            axis: axis_name(axis),
            value,
            seeds: seeds.clone(),
            ..Default::default()
        };
        if axis == Axis::L {
            let steps = positive_count(value, "L")?;
            let mut errs = reshaping_errors(&loaded, linear.as_ref().unwrap(), steps, &seeds)?;
            r.errors = Some(errs.clone());
            r.median_error = Some(median(&mut errs));
            println!("{value:>12}  {:>14.6e}  {:>14}", r.median_error.unwrap(), "");
            rec.push(Some(base.seed), &r)?;
            continue;
        }
        let mut s = base.clone();
        match axis {
            Axis::T => s.time = Some(value),
            Axis::Shots => s.shots = positive_count(value, "shots")?,
            Axis::P => s.exponent = Some(value),
            Axis::L => unreachable!(),
        }
        let runs: Vec<RunOutput> = seeds
            .par_iter()
            .map(|&seed| {
                let mut s = s.clone();
                s.seed = seed;
                run(&loaded, linear.as_ref(), &s, false)
            })
            .collect::<Result<_, _>>()?;
        let sims: Vec<&SimulationRecord> = runs
            .iter()
            .map(|o| match o {
                RunOutput::Linear { simulation, .. } | RunOutput::TwoStep { simulation, .. } => simulation,
            })
            .collect();
        let n = sims.len() as f64;
        let mean = sims.iter().map(|s| s.q_estimate).sum::<f64>() / n;
        let spread = if sims.len() > 1 {
            sims.iter().map(|s| (s.q_estimate - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        r.q_mean = Some(mean);
        r.q_spread = Some(spread);
        r.median_variance_estimate = Some(median(&mut sims.iter().map(|s| s.variance_estimate).collect::<Vec<_>>()));
        r.median_abs_bias = Some(median(
            &mut sims.iter().filter_map(|s| s.bias_estimate.map(f64::abs)).collect::<Vec<_>>(),
        ));
        if general {
            let diags: Vec<&TwoStepDiagnostics> = runs
                .iter()
                .filter_map(|o| match o {
                    RunOutput::TwoStep { diagnostics, .. } => Some(diagnostics),
                    RunOutput::Linear { .. } => None,
                })
                .collect();
            r.median_mse_t2 = Some(median(
                &mut diags.iter().map(|d| d.locked_mse_per_shot * d.t2 * d.t2).collect::<Vec<_>>(),
            ));
            r.median_gamma_error = Some(median(
                &mut diags.iter().map(|d| (d.gamma_tilde - d.gamma_true).abs()).collect::<Vec<_>>(),
            ));
            println!("{value:>12}  {:>14.6e}  {:>14.6e}", r.median_mse_t2.unwrap(), spread);
        } else {
            println!("{value:>12}  {:>14.6e}  {:>14.6e}", r.median_variance_estimate.unwrap(), spread);
        }
        rec.push(Some(base.seed), &r)?;
    }
    rec.write(flags.out.as_deref())
}

pub fn validate(draws: usize, tol: f64, rel_tol: f64, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let table = run_validation(&catalog(), draws, tol, rel_tol, seed);
    print!("{table}");
    for row in &table.rows {
        if let Some(e) = &row.error {
            eprintln!("{}: {e}", row.case);
        }
    }
    let mut rec = Records::new("validate", None);
    rec.push(Some(seed), &table)?;
    rec.write(out)?;
    if table.all_passed() {
        return Ok(());
    }
    let failing: Vec<&str> = table
        .rows
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.case.as_str())
        .collect();
    Err(CliError::Mismatch(format!(
        "validation failed for: {}",
        if failing.is_empty() { "empty catalog".to_string() } else { failing.join(", ") }
    )))
}
