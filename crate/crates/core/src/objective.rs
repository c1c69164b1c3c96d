//! The expected residual `G(x) = sum_k w_k ||Phi(x, w_k)||^2` and the
//! expected-value merit `||Phi_bar(x)||^2`, where `Phi_bar` uses the mean
//! tensor and mean `q`.
//!
//! Contributions are reduced in sorted order, so the value does not depend
//! on how realizations are listed and repeated evaluations are bit-identical.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::ncp::{phi_config, phi_with_partials, ResidualConfig};
use crate::stochastic::{Realization, SampleSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub value: f64,
    /// `(weight, ||Phi(x, w_k)||^2)` in realization order.
    pub per_realization: Vec<(f64, f64)>,
}

/// Spaces at least this large are evaluated in parallel.
const PARALLEL_THRESHOLD: usize = 256;

fn per_realization<T: Send>(space: &SampleSpace, f: impl Fn(&Realization) -> T + Send + Sync) -> Vec<T> {
    let rs = space.realizations();
    if rs.len() >= PARALLEL_THRESHOLD {
        rs.par_iter().map(f).collect()
    } else {
        rs.iter().map(f).collect()
    }
}

/// Sum that is invariant under permutation of `terms`.
pub(crate) fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

fn realization_sq_norm(r: &Realization, x: &[f64], config: &ResidualConfig) -> f64 {
    let ax = r.tensor.contract_to_vector(x).expect("dimension checked by caller");
    ax.iter()
        .zip(&r.q)
        .zip(x)
        .map(|((axi, qi), xi)| {
            let p = phi_config(config, axi + qi, *xi);
            p * p
        })
        .sum()
}

/// Gradient of `||Phi(x)||^2` for one realization.
fn realization_gradient(r: &Realization, x: &[f64], config: &ResidualConfig) -> (f64, Vec<f64>) {
    let (ax, jac) = r.tensor.contract_with_jacobian(x).expect("dimension checked by caller");
    let dim = x.len();
    let mut value = 0.0;
    let mut through_a = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    for i in 0..dim {
        let (p, da, db) = phi_with_partials(config, ax[i] + r.q[i], x[i]);
        value += p * p;
        through_a[i] = 2.0 * p * da;
        grad[i] = 2.0 * p * db;
    }
    for (g, t) in grad.iter_mut().zip(jac.transpose_mul(&through_a)) {
        *g += t;
    }
    (value, grad)
}

pub fn erm_objective(space: &SampleSpace, x: &[f64], config: &ResidualConfig) -> Result<ObjectiveValue> {
    check_len(space.dim(), x.len())?;
    let per_realization: Vec<(f64, f64)> = per_realization(space, |r| (r.weight, realization_sq_norm(r, x, config)));
    let value = canonical_sum(per_realization.iter().map(|(w, v)| w * v).collect());
    Ok(ObjectiveValue { value, per_realization })
}

/// Objective value only, without the per-realization breakdown.
pub fn erm_value(space: &SampleSpace, x: &[f64], config: &ResidualConfig) -> Result<f64> {
    check_len(space.dim(), x.len())?;
    let terms: Vec<f64> = per_realization(space, |r| r.weight * realization_sq_norm(r, x, config));
    Ok(canonical_sum(terms))
}

/// Value and gradient without the smoothness precondition; exact MIN uses
/// the gradient of the active branch.
pub(crate) fn value_and_gradient(space: &SampleSpace, x: &[f64], config: &ResidualConfig) -> (f64, Vec<f64>) {
    let parts: Vec<(f64, Vec<f64>)> = per_realization(space, |r| {
        let (v, g) = realization_gradient(r, x, config);
        (r.weight * v, g.into_iter().map(|gi| r.weight * gi).collect())
    });
    let dim = x.len();
    let value = canonical_sum(parts.iter().map(|(v, _)| *v).collect());
    let grad = (0..dim)
        .map(|i| canonical_sum(parts.iter().map(|(_, g)| g[i]).collect()))
        .collect();
    (value, grad)
}

/// Gradient of `G` under a smooth configuration (FB, or MIN with `mu > 0`).
pub fn erm_gradient(space: &SampleSpace, x: &[f64], config: &ResidualConfig) -> Result<Vec<f64>> {
    if !config.is_smooth() {
        return Err(Error::Nonsmooth);
    }
    check_len(space.dim(), x.len())?;
    Ok(value_and_gradient(space, x, config).1)
}

/// `||Phi_bar(x)||^2` built from the mean tensor and mean `q`.
pub fn ev_objective(space: &SampleSpace, x: &[f64], config: &ResidualConfig) -> Result<ObjectiveValue> {
    erm_objective(&space.mean_space(), x, config)
}

pub fn ev_gradient(space: &SampleSpace, x: &[f64], config: &ResidualConfig) -> Result<Vec<f64>> {
    erm_gradient(&space.mean_space(), x, config)
}
