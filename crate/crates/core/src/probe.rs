//! Ray and level-set probes: `G(lambda d)` along nonnegative rays.
//!
//! Coercivity is asymptotic, so the probes classify a finite `lambda` grid
//! with explicit thresholds. With `g1 = G(d)` and the last five values
//! `t`:
//!
//! * `GROWS`: `t` strictly increasing and `t[4] >= max(1e6 eps, 1e3 g1)`;
//! * `BOUNDED`: `t` varies by less than 1% and no value exceeds
//!   `2 g1 + mean(t)`;
//! * `INCONCLUSIVE` otherwise.
//!
//! Values above `1e300` are clamped and force `GROWS`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::ncp::{support_sets, ResidualConfig, SupportSets, DEFAULT_SUPPORT_TOL};
use crate::objective::erm_value;
use crate::simplex::{capped_resolution, random_simplex_point, simplex_grid};
use crate::stochastic::SampleSpace;
use crate::structure::{check_theorem41_conditions, NEGATIVITY_TOL};
use crate::tensor::norm2;

pub const CLAMP: f64 = 1e300;
const TAIL: usize = 5;
const FLAT_REL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProbeVerdict {
    Grows,
    Bounded,
    Inconclusive,
}

impl std::fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProbeVerdict::Grows => "GROWS",
            ProbeVerdict::Bounded => "BOUNDED",
            ProbeVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// `10^(k/2)` for `k = 0..=8`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=8).map(|k| 10f64.powf(k as f64 / 2.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayProbeReport {
    /// Unit 2-norm.
    pub direction: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub verdict: ProbeVerdict,
    /// Largest value seen on the grid.
    pub bound_estimate: f64,
    /// `G(direction)`, the `lambda = 1` reference.
    pub reference_value: f64,
    pub clamped: bool,
}

fn validate_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    if lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidArgument("lambda grid values must be positive".into()));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("lambda grid must be increasing".into()));
    }
    Ok(())
}

fn unit_direction(d: &[f64]) -> Result<Vec<f64>> {
    if d.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
        return Err(Error::InvalidArgument(
            "direction must be finite and nonnegative".into(),
        ));
    }
    let n = norm2(d);
    if n == 0.0 {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    Ok(d.iter().map(|c| c / n).collect())
}

fn along(space: &SampleSpace, d: &[f64], lambda: f64, config: &ResidualConfig) -> f64 {
    let x: Vec<f64> = d.iter().map(|c| lambda * c).collect();
    erm_value(space, &x, config).expect("dimension checked")
}

/// Classifies a value sequence against the reference value `g1`.
pub fn classify(values: &[f64], g1: f64, clamped: bool) -> ProbeVerdict {
    if clamped {
        return ProbeVerdict::Grows;
    }
    if values.len() < TAIL {
        return ProbeVerdict::Inconclusive;
    }
    let tail = &values[values.len() - TAIL..];
    let last = tail[TAIL - 1];
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    if increasing && last >= (1e6 * f64::EPSILON).max(1e3 * g1) {
        return ProbeVerdict::Grows;
    }
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let plateau = tail.iter().sum::<f64>() / TAIL as f64;
    let flat = if hi == 0.0 {
        lo == 0.0
    } else {
        hi - lo < FLAT_REL * hi.abs()
    };
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if flat && peak <= 2.0 * g1 + plateau {
        ProbeVerdict::Bounded
    } else {
        ProbeVerdict::Inconclusive
    }
}

pub fn ray_probe(
    space: &SampleSpace,
    direction: &[f64],
    lambdas: &[f64],
    config: &ResidualConfig,
) -> Result<RayProbeReport> {
    check_len(space.dim(), direction.len())?;
    validate_lambdas(lambdas)?;
    let d = unit_direction(direction)?;
    let mut clamped = false;
    let values: Vec<f64> = lambdas
        .iter()
        .map(|&l| {
            let v = along(space, &d, l, config);
            if !(v <= CLAMP) {
                clamped = true;
                CLAMP
            } else {
                v
            }
        })
        .collect();
    let reference_value = along(space, &d, 1.0, config).min(CLAMP);
    Ok(RayProbeReport {
        verdict: classify(&values, reference_value, clamped),
        bound_estimate: values.iter().copied().fold(0.0, f64::max),
        direction: d,
        lambdas: lambdas.to_vec(),
        values,
        reference_value,
        clamped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionGridSpec {
    /// `None` picks by dimension.
    pub resolution: Option<usize>,
    pub random_directions: usize,
    pub seed: u64,
    pub lambdas: Vec<f64>,
}

impl Default for DirectionGridSpec {
    fn default() -> Self {
        DirectionGridSpec {
            resolution: None,
            random_directions: 100,
            seed: 0,
            lambdas: default_lambda_grid(),
        }
    }
}

/// 8 for `I <= 4`, 5 for `I = 5`, capped beyond.
pub fn default_direction_resolution(dim: usize) -> usize {
    match dim {
        0..=4 => 8,
        5 => 5,
        _ => capped_resolution(dim, 5),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    pub aggregate: ProbeVerdict,
    /// First `BOUNDED` direction in scan order.
    pub witness: Option<Vec<f64>>,
    pub resolution: usize,
    pub grid_directions: usize,
    pub random_directions: usize,
    pub counts: VerdictCounts,
    pub probes: Vec<RayProbeReport>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub grows: usize,
    pub bounded: usize,
    pub inconclusive: usize,
}

/// Probes every simplex-grid direction plus seeded random ones. The
/// aggregate is `GROWS` only when every direction grows.
pub fn coercivity_scan(
    space: &SampleSpace,
    config: &ResidualConfig,
    spec: &DirectionGridSpec,
) -> Result<CoercivityReport> {
    validate_lambdas(&spec.lambdas)?;
    let dim = space.dim();
    let resolution = spec.resolution.unwrap_or_else(|| default_direction_resolution(dim));
    let mut directions = simplex_grid(dim, resolution);
    let grid_directions = directions.len();
    directions.extend((0..spec.random_directions).map(|k| random_simplex_point(dim, spec.seed, k)));
    let probes: Vec<RayProbeReport> = directions
        .par_iter()
        .map(|d| ray_probe(space, d, &spec.lambdas, config))
        .collect::<Result<_>>()?;
    let mut counts = VerdictCounts::default();
    for p in &probes {
        match p.verdict {
            ProbeVerdict::Grows => counts.grows += 1,
            ProbeVerdict::Bounded => counts.bounded += 1,
            ProbeVerdict::Inconclusive => counts.inconclusive += 1,
        }
    }
    let witness = probes
        .iter()
        .find(|p| p.verdict == ProbeVerdict::Bounded)
        .map(|p| p.direction.clone());
    let aggregate = if counts.grows == probes.len() {
        ProbeVerdict::Grows
    } else if witness.is_some() {
        ProbeVerdict::Bounded
    } else {
        ProbeVerdict::Inconclusive
    };
    Ok(CoercivityReport {
        aggregate,
        witness,
        resolution,
        grid_directions,
        random_directions: spec.random_directions,
        counts,
        probes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundednessRegime {
    /// `G(0)` is strictly below the large-`lambda` plateau.
    OriginBelowPlateau,
    /// `G(lambda x)` reaches (numerically) zero.
    VanishingAlongRay,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub witness: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub g_zero: f64,
    /// `sum_i E[q_i^2 ; q_i < 0]`, which must equal `g_zero`.
    pub g_zero_from_moments: f64,
    /// Mean of the last five values.
    pub plateau_estimate: f64,
    /// `sum_{i in J(x)} E[q_i^2]`.
    pub predicted_plateau: f64,
    pub support: SupportSets,
    /// Both per-direction conditions fail at the witness.
    pub degenerate: bool,
    pub regime: BoundednessRegime,
}

/// Value at which a ray counts as vanishing.
pub const VANISHING_TOL: f64 = 1e-6;

/// Compares `G(0)` with the behaviour of `G(lambda x)` along a witness ray.
/// The witness is used as given (not normalized).
pub fn boundedness_probe(
    space: &SampleSpace,
    config: &ResidualConfig,
    witness: &[f64],
    lambdas: &[f64],
) -> Result<BoundednessReport> {
    check_len(space.dim(), witness.len())?;
    validate_lambdas(lambdas)?;
    unit_direction(witness)?;
    let dim = space.dim();
    let g_zero = erm_value(space, &vec![0.0; dim], config)?;
    let moments = space.expected_q_moments();
    let values: Vec<f64> = lambdas.iter().map(|&l| along(space, witness, l, config)).collect();
    let tail = &values[values.len().saturating_sub(TAIL)..];
    let plateau_estimate = tail.iter().sum::<f64>() / tail.len() as f64;
    let support = support_sets(witness, DEFAULT_SUPPORT_TOL);
    let predicted_plateau = support
        .nonzero_indices
        .iter()
        .fold(0.0, |acc, &i| acc + moments.second_moments[i]);
    let degenerate = check_theorem41_conditions(space, witness, NEGATIVITY_TOL)?.degenerate();
    let last = *values.last().expect("nonempty grid");
    let regime = if last <= VANISHING_TOL {
        BoundednessRegime::VanishingAlongRay
    } else if g_zero < plateau_estimate * (1.0 - 1e-9) {
        BoundednessRegime::OriginBelowPlateau
    } else {
        BoundednessRegime::Indeterminate
    };
    Ok(BoundednessReport {
        witness: witness.to_vec(),
        lambdas: lambdas.to_vec(),
        values,
        g_zero,
        g_zero_from_moments: moments.negative_total(),
        plateau_estimate,
        predicted_plateau,
        support,
        degenerate,
        regime,
    })
}
