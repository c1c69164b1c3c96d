//! ERM and EV solves: projected gradient descent over `x >= 0` with
//! smoothing continuation for MIN and seeded multistart.
//!
//! For MIN the descent runs once per `mu` in the schedule, warm-started;
//! FB is smooth away from the origin and runs a single stage. Every
//! accepted iterate is scored with the exact (`mu = 0`) objective and the
//! best one is returned, so the reported objective is always the exact
//! merit at `x_star` and the trace never increases.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descent::{self, Armijo, StopRule};
use crate::error::{Error, Result};
use crate::ncp::{NcpKind, ResidualConfig};
use crate::objective::{erm_value, value_and_gradient};
use crate::simplex::random_box_point;
use crate::stochastic::SampleSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmijoParams {
    pub initial_step: f64,
    pub backtrack: f64,
    pub sufficient_decrease: f64,
}

impl Default for ArmijoParams {
    fn default() -> Self {
        ArmijoParams {
            initial_step: 1.0,
            backtrack: 0.5,
            sufficient_decrease: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Per smoothing stage.
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub objective_tolerance: f64,
    pub armijo: ArmijoParams,
    /// Used for MIN only; empty means a single stage at the config's `mu`.
    pub mu_schedule: Vec<f64>,
    pub multistart_count: usize,
    /// Starts are drawn uniformly from `[0, start_box]^I`.
    pub start_box: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 2000,
            gradient_tolerance: 1e-8,
            objective_tolerance: 1e-20,
            armijo: ArmijoParams::default(),
            mu_schedule: vec![1e-1, 1e-2, 1e-3, 1e-4],
            multistart_count: 8,
            start_box: 2.0,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.gradient_tolerance > 0.0) || !(self.objective_tolerance > 0.0) {
            return bad("tolerances must be positive".into());
        }
        let a = &self.armijo;
        if !(a.initial_step > 0.0) || !a.initial_step.is_finite() {
            return bad(format!("initial step must be positive, got {}", a.initial_step));
        }
        if !(a.backtrack > 0.0 && a.backtrack < 1.0) {
            return bad(format!("backtrack factor must lie in (0, 1), got {}", a.backtrack));
        }
        if !(a.sufficient_decrease > 0.0 && a.sufficient_decrease < 1.0) {
            return bad(format!(
                "sufficient-decrease constant must lie in (0, 1), got {}",
                a.sufficient_decrease
            ));
        }
        if self.mu_schedule.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return bad("mu_schedule entries must be positive".into());
        }
        if self.mu_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return bad("mu_schedule must be strictly decreasing".into());
        }
        if self.multistart_count == 0 {
            return bad("multistart_count must be at least 1".into());
        }
        if !(self.start_box > 0.0) || !self.start_box.is_finite() {
            return bad(format!("start_box must be positive, got {}", self.start_box));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub start_index: usize,
    pub x0: Vec<f64>,
    pub x: Vec<f64>,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub x_star: Vec<f64>,
    /// Exact merit (`mu = 0`) at `x_star`.
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub start_index: usize,
    /// `(iteration, best exact objective so far)` for the winning start.
    pub trace: Vec<(usize, f64)>,
    pub projected_gradient_norm: f64,
    pub starts: Vec<StartSummary>,
}

struct StartRun {
    summary: StartSummary,
    trace: Vec<(usize, f64)>,
    projected_gradient_norm: f64,
}

fn stages(config: &ResidualConfig, options: &SolverOptions) -> Result<Vec<ResidualConfig>> {
    match config.ncp_kind {
        NcpKind::Fb => Ok(vec![*config]),
        NcpKind::Min if !options.mu_schedule.is_empty() => {
            Ok(options.mu_schedule.iter().map(|&m| config.with_mu(m)).collect())
        }
        NcpKind::Min if config.smoothing_mu > 0.0 => Ok(vec![*config]),
        NcpKind::Min => Err(Error::InvalidArgument(
            "MIN needs a smoothing schedule or a positive smoothing_mu".into(),
        )),
    }
}

fn run_start(
    space: &SampleSpace,
    stages: &[ResidualConfig],
    exact: &ResidualConfig,
    options: &SolverOptions,
    k: usize,
) -> StartRun {
    let x0 = random_box_point(space.dim(), 0.0, options.start_box, options.seed, k);
    let score = |x: &[f64]| erm_value(space, x, exact).expect("dimension fixed");
    let mut best_x = x0.clone();
    let mut best_f = score(&x0);
    let mut trace = vec![(0, best_f)];
    let mut global = 0;
    let mut x = x0.clone();
    let mut pg = f64::INFINITY;
    let mut converged = false;
    for stage in stages {
        let offset = global;
        let out = descent::minimize(
            x,
            |v| value_and_gradient(space, v, stage),
            descent::project_orthant,
            Armijo {
                initial_step: options.armijo.initial_step,
                backtrack: options.armijo.backtrack,
                sufficient_decrease: options.armijo.sufficient_decrease,
            },
            StopRule {
                max_iterations: options.max_iterations,
                gradient_tolerance: options.gradient_tolerance,
                objective_tolerance: options.objective_tolerance,
            },
            |it, v| {
                let f = score(v);
                if f < best_f {
                    best_f = f;
                    best_x = v.to_vec();
                }
                trace.push((offset + it, best_f));
            },
        );
        global += out.iterations;
        pg = out.projected_gradient_norm;
        converged = pg <= options.gradient_tolerance || out.value <= options.objective_tolerance;
        x = out.x;
    }
    converged |= best_f <= options.objective_tolerance;
    StartRun {
        summary: StartSummary {
            start_index: k,
            x0,
            x: best_x,
            objective: best_f,
            converged,
            iterations: global,
        },
        trace,
        projected_gradient_norm: pg,
    }
}

/// Minimizes `G` over `x >= 0`; the best multistart wins (ties go to the
/// lowest start index).
pub fn solve_erm(space: &SampleSpace, config: &ResidualConfig, options: &SolverOptions) -> Result<SolveResult> {
    options.validate()?;
    let stages = stages(config, options)?;
    let exact = config.exact();
    let runs: Vec<StartRun> = (0..options.multistart_count)
        .into_par_iter()
        .map(|k| run_start(space, &stages, &exact, options, k))
        .collect();
    let best = runs
        .iter()
        .min_by(|a, b| {
            a.summary
                .objective
                .total_cmp(&b.summary.objective)
                .then(a.summary.start_index.cmp(&b.summary.start_index))
        })
        .expect("at least one start");
    Ok(SolveResult {
        x_star: best.summary.x.clone(),
        objective: best.summary.objective,
        converged: best.summary.converged,
        iterations: best.summary.iterations,
        start_index: best.summary.start_index,
        trace: best.trace.clone(),
        projected_gradient_norm: best.projected_gradient_norm,
        starts: runs.iter().map(|r| r.summary.clone()).collect(),
    })
}

/// Expected-value method: the same solve on the mean data.
pub fn solve_ev(space: &SampleSpace, config: &ResidualConfig, options: &SolverOptions) -> Result<SolveResult> {
    solve_erm(&space.mean_space(), config, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;

    fn identity_space(q: Vec<f64>) -> SampleSpace {
        SampleSpace::singleton(Tensor::identity(3, 2).unwrap(), q).unwrap()
    }

    #[test]
    fn complementarity_instance() {
        let r = solve_erm(
            &identity_space(vec![-1.0, -4.0]),
            &ResidualConfig::min(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!((r.x_star[0] - 1.0).abs() < 1e-4 && (r.x_star[1] - 2.0).abs() < 1e-4);
        assert!(r.objective <= 1e-10);
        assert!(r.trace.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn nonnegative_q_gives_zero() {
        let r = solve_erm(
            &identity_space(vec![0.5, 2.0]),
            &ResidualConfig::fb(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(r.objective <= 1e-10);
        assert!(r.x_star.iter().all(|&v| v.abs() < 1e-4));
    }

    #[test]
    fn singleton_ev_matches_erm() {
        let s = identity_space(vec![-1.0, -4.0]);
        let o = SolverOptions::default();
        assert_eq!(
            solve_ev(&s, &ResidualConfig::fb(), &o).unwrap(),
            solve_erm(&s, &ResidualConfig::fb(), &o).unwrap()
        );
    }

    #[test]
    fn option_validation() {
        let s = identity_space(vec![0.0, 0.0]);
        let o = SolverOptions {
            mu_schedule: vec![1e-2, 1e-1],
            ..SolverOptions::default()
        };
        assert!(solve_erm(&s, &ResidualConfig::min(), &o).is_err());
        let o = SolverOptions {
            mu_schedule: vec![],
            ..SolverOptions::default()
        };
        assert!(solve_erm(&s, &ResidualConfig::min(), &o).is_err());
        assert!(solve_erm(&s, &ResidualConfig::smoothed_min(1e-3).unwrap(), &o).is_ok());
        let o = SolverOptions {
            armijo: ArmijoParams {
                backtrack: 1.0,
                ..ArmijoParams::default()
            },
            ..SolverOptions::default()
        };
        assert!(o.validate().is_err());
    }
}
