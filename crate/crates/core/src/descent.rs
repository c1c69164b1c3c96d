//! Projected gradient descent with spectral (Barzilai-Borwein) trial steps
//! and Armijo backtracking along the projection arc. Shared by the ERM
//! solver (projection onto the nonnegative orthant) and the structure
//! checkers (projection onto the unit simplex).

use crate::tensor::dot;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Armijo {
    pub initial_step: f64,
    pub backtrack: f64,
    pub sufficient_decrease: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StopRule {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub objective_tolerance: f64,
}

pub(crate) struct DescentOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub projected_gradient_norm: f64,
}

const MAX_BACKTRACKS: usize = 60;
const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 1e12;

pub(crate) fn project_orthant(v: &mut [f64]) {
    for c in v.iter_mut() {
        if *c < 0.0 {
            *c = 0.0;
        }
    }
}

/// Euclidean projection onto `{x >= 0, sum x = 1}`.
pub(crate) fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    for c in v.iter_mut() {
        *c = (*c - theta).max(0.0);
    }
}

fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Norm of `x - P(x - g)`, the projected-gradient stationarity measure.
pub(crate) fn projected_gradient_norm(x: &[f64], g: &[f64], project: &impl Fn(&mut [f64])) -> f64 {
    let mut p: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi - gi).collect();
    project(&mut p);
    x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Minimizes from `x0`. `on_accept` sees every accepted iterate.
pub(crate) fn minimize(
    x0: Vec<f64>,
    eval: impl Fn(&[f64]) -> (f64, Vec<f64>),
    project: impl Fn(&mut [f64]),
    armijo: Armijo,
    stop: StopRule,
    mut on_accept: impl FnMut(usize, &[f64]),
) -> DescentOutcome {
    let mut x = x0;
    project(&mut x);
    let (mut f, mut g) = eval(&x);
    let mut step = armijo.initial_step;
    let mut iterations = 0;
    let mut pg = projected_gradient_norm(&x, &g, &project);
    while iterations < stop.max_iterations {
        if f <= stop.objective_tolerance || pg <= stop.gradient_tolerance {
            break;
        }
        let mut t = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            project(&mut trial);
            let d: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            let slope = dot(&g, &d);
            if slope >= 0.0 {
                // no descent along the arc at this step length
                t *= armijo.backtrack;
                continue;
            }
            let (ft, gt) = eval(&trial);
            if ft.is_finite() && ft <= f + armijo.sufficient_decrease * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            t *= armijo.backtrack;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            break;
        };
        iterations += 1;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        step = if sy > 0.0 {
            (dot(&s, &s) / sy).clamp(STEP_MIN, STEP_MAX)
        } else {
            armijo.initial_step
        };
        let moved = inf_norm_diff(&x_new, &x);
        x = x_new;
        f = f_new;
        g = g_new;
        pg = projected_gradient_norm(&x, &g, &project);
        on_accept(iterations, &x);
        if moved == 0.0 {
            break;
        }
    }
    DescentOutcome {
        x,
        value: f,
        iterations,
        projected_gradient_norm: pg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection() {
        let mut v = vec![0.5, 0.5, 0.0];
        project_simplex(&mut v);
        assert_eq!(v, vec![0.5, 0.5, 0.0]);
        let mut v = vec![2.0, 0.0, -1.0];
        project_simplex(&mut v);
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
        let mut v = vec![0.1, 0.1, 0.1];
        project_simplex(&mut v);
        assert!(v.iter().all(|c| (c - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn quadratic_on_orthant() {
        // min (x0 - 1)^2 + (x1 + 2)^2 over x >= 0 -> (1, 0)
        let out = minimize(
            vec![5.0, 5.0],
            |x| {
                let v = (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2);
                (v, vec![2.0 * (x[0] - 1.0), 2.0 * (x[1] + 2.0)])
            },
            project_orthant,
            Armijo {
                initial_step: 1.0,
                backtrack: 0.5,
                sufficient_decrease: 1e-4,
            },
            StopRule {
                max_iterations: 200,
                gradient_tolerance: 1e-12,
                objective_tolerance: 0.0,
            },
            |_, _| {},
        );
        assert!((out.x[0] - 1.0).abs() < 1e-10 && out.x[1] == 0.0);
    }
}
