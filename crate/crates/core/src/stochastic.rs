//! Finite representations of the random data `(A(w), q(w))`.
//!
//! A [`SampleSpace`] is a nonempty list of weighted realizations whose
//! weights sum to one. Expectations are weighted sums, so a continuous
//! distribution is represented by its sample-average approximation: draw
//! `n` realizations from a [`GeneratorSpec`] and weight each by `1/n`.
//! "Almost every realization" means "every realization in the list", since
//! all weights are positive.
//!
//! Generated tensors are affine in transformed coordinates of `w`:
//!
//! ```text
//! A(w) = base + sum_t  f_t(w[c_t]) * C_t        f_t in {w, |w|}
//! q(w) = q_base + sum_j  w[j] * q_j
//! ```
//!
//! Draws are counter based: coordinate `j` of realization `k` depends only on
//! `(seed, k, j)`, so materialization gives the same result in any order.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::tensor::Tensor;

/// Tolerance on `sum of weights = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub weight: f64,
    pub tensor: Tensor,
    pub q: Vec<f64>,
}

impl Realization {
    pub fn new(weight: f64, tensor: Tensor, q: Vec<f64>) -> Result<Self> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidWeights(format!(
                "realization weight must lie in (0, 1], got {weight}"
            )));
        }
        check_len(tensor.dim(), q.len())?;
        Ok(Realization { weight, tensor, q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "lowercase")]
pub enum OmegaDist {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, stddev: f64 },
}

impl OmegaDist {
    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            OmegaDist::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                    return Err(Error::InvalidDistribution(format!(
                        "uniform needs finite lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            OmegaDist::Normal { mean, stddev } => {
                if !(mean.is_finite() && stddev.is_finite() && stddev > 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "normal needs finite mean and stddev > 0, got ({mean}, {stddev})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            OmegaDist::Uniform { lo, hi } => 0.5 * (lo + hi),
            OmegaDist::Normal { mean, .. } => mean,
        }
    }

    /// Whether the support is unbounded below and above.
    pub fn is_unbounded(&self) -> bool {
        matches!(self, OmegaDist::Normal { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EntryTransform {
    #[default]
    Linear,
    Abs,
}

impl EntryTransform {
    pub fn apply(self, w: f64) -> f64 {
        match self {
            EntryTransform::Linear => w,
            EntryTransform::Abs => w.abs(),
        }
    }
}

/// One `f(w[coordinate]) * tensor` term of a generated tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTerm {
    pub coordinate: usize,
    pub transform: EntryTransform,
    pub tensor: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub base: Tensor,
    pub terms: Vec<CoefficientTerm>,
    pub q_base: Vec<f64>,
    /// One vector per coordinate of `w`.
    pub q_coefficients: Vec<Vec<f64>>,
    pub omega: Vec<OmegaDist>,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let dim = self.base.dim();
        check_len(dim, self.q_base.len())?;
        if self.q_coefficients.len() != self.omega.len() {
            return Err(Error::InvalidArgument(format!(
                "{} q coefficient vectors for {} omega coordinates",
                self.q_coefficients.len(),
                self.omega.len()
            )));
        }
        for q in &self.q_coefficients {
            check_len(dim, q.len())?;
        }
        for term in &self.terms {
            self.base.check_shape(&term.tensor)?;
            if term.coordinate >= self.omega.len() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient term refers to coordinate {} of a {}-dimensional omega",
                    term.coordinate,
                    self.omega.len()
                )));
            }
        }
        for dist in &self.omega {
            dist.validate()?;
        }
        Ok(())
    }

    pub fn omega_dim(&self) -> usize {
        self.omega.len()
    }

    pub fn tensor_at(&self, omega: &[f64]) -> Result<Tensor> {
        check_len(self.omega.len(), omega.len())?;
        let mut terms: Vec<(f64, &Tensor)> = vec![(1.0, &self.base)];
        for t in &self.terms {
            terms.push((t.transform.apply(omega[t.coordinate]), &t.tensor));
        }
        Tensor::linear_combination(self.base.order(), self.base.dim(), &terms)
    }

    pub fn q_at(&self, omega: &[f64]) -> Result<Vec<f64>> {
        check_len(self.omega.len(), omega.len())?;
        let mut q = self.q_base.clone();
        for (w, coef) in omega.iter().zip(&self.q_coefficients) {
            for (qi, ci) in q.iter_mut().zip(coef) {
                *qi += w * ci;
            }
        }
        Ok(q)
    }

    /// Analytic mean tensor `base + sum_t E[f_t(w)] C_t` when every term is
    /// linear; `None` if an ABS term is present.
    pub fn analytic_mean_tensor(&self) -> Option<Result<Tensor>> {
        if self.terms.iter().any(|t| t.transform == EntryTransform::Abs) {
            return None;
        }
        let mean: Vec<f64> = self.omega.iter().map(OmegaDist::mean).collect();
        Some(self.tensor_at(&mean))
    }

    pub fn has_unbounded_coordinate(&self) -> bool {
        self.omega.iter().any(OmegaDist::is_unbounded)
    }
}

/// How a sample space came to be.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Explicit,
    Generated {
        spec: Box<GeneratorSpec>,
        seed: u64,
        count: usize,
    },
    /// Generator evaluated at caller-supplied coordinates.
    Fixed {
        spec: Box<GeneratorSpec>,
        omega_values: Vec<Vec<f64>>,
    },
    /// Derived from other spaces (mixtures, sums, centering, scaling).
    Derived,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpace {
    realizations: Vec<Realization>,
    provenance: Provenance,
}

/// `(E||q||^2, E[q_i^2], E[q_i^2 1{q_i < 0}])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMoments {
    pub total_second_moment: f64,
    pub second_moments: Vec<f64>,
    pub negative_second_moments: Vec<f64>,
}

impl QMoments {
    /// `sum_i E[q_i^2 1{q_i < 0}]`, which equals the MIN objective at zero.
    pub fn negative_total(&self) -> f64 {
        self.negative_second_moments.iter().sum()
    }
}

fn draw(dist: &OmegaDist, seed: u64, realization: usize, coordinate: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization as u64);
    // two u64 (four 32-bit words) per coordinate
    rng.set_word_pos(coordinate as u128 * 4);
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    match *dist {
        OmegaDist::Uniform { lo, hi } => lo + (hi - lo) * u1,
        OmegaDist::Normal { mean, stddev } => {
            let r = (-2.0 * (1.0 - u1).ln()).sqrt();
            mean + stddev * r * (2.0 * PI * u2).cos()
        }
    }
}

/// Coordinates of `w` for realization `k`.
pub fn draw_omega(spec: &GeneratorSpec, seed: u64, k: usize) -> Vec<f64> {
    spec.omega
        .iter()
        .enumerate()
        .map(|(j, d)| draw(d, seed, k, j))
        .collect()
}

/// `n` equally weighted realizations drawn from `spec`.
pub fn materialize(spec: &GeneratorSpec, n: usize, seed: u64) -> Result<SampleSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    spec.validate()?;
    let weight = 1.0 / n as f64;
    let realizations = (0..n)
        .into_par_iter()
        .map(|k| {
            let omega = draw_omega(spec, seed, k);
            Ok(Realization {
                weight,
                tensor: spec.tensor_at(&omega)?,
                q: spec.q_at(&omega)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSpace {
        realizations,
        provenance: Provenance::Generated {
            spec: Box::new(spec.clone()),
            seed,
            count: n,
        },
    })
}

/// Equally weighted realizations at the given coordinates of `w`.
pub fn materialize_at(spec: &GeneratorSpec, omega_values: &[Vec<f64>]) -> Result<SampleSpace> {
    if omega_values.is_empty() {
        return Err(Error::InvalidArgument("at least one omega value is required".into()));
    }
    spec.validate()?;
    let weight = 1.0 / omega_values.len() as f64;
    let realizations = omega_values
        .iter()
        .map(|omega| {
            Ok(Realization {
                weight,
                tensor: spec.tensor_at(omega)?,
                q: spec.q_at(omega)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSpace {
        realizations,
        provenance: Provenance::Fixed {
            spec: Box::new(spec.clone()),
            omega_values: omega_values.to_vec(),
        },
    })
}

impl SampleSpace {
    /// Validates shapes and the weight sum.
    pub fn new(realizations: Vec<Realization>) -> Result<Self> {
        Self::with_provenance(realizations, Provenance::Explicit)
    }

    fn with_provenance(realizations: Vec<Realization>, provenance: Provenance) -> Result<Self> {
        let first = realizations
            .first()
            .ok_or_else(|| Error::InvalidArgument("a sample space needs at least one realization".into()))?;
        for r in &realizations {
            first.tensor.check_shape(&r.tensor)?;
            check_len(first.tensor.dim(), r.q.len())?;
            if !(r.weight > 0.0 && r.weight <= 1.0) {
                return Err(Error::InvalidWeights(format!(
                    "realization weight must lie in (0, 1], got {}",
                    r.weight
                )));
            }
        }
        let total: f64 = realizations.iter().map(|r| r.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, expected 1")));
        }
        Ok(SampleSpace {
            realizations,
            provenance,
        })
    }

    pub fn singleton(tensor: Tensor, q: Vec<f64>) -> Result<Self> {
        Self::new(vec![Realization::new(1.0, tensor, q)?])
    }

    /// Equal weights `1/n` over the given `(tensor, q)` pairs.
    pub fn uniform(pairs: Vec<(Tensor, Vec<f64>)>) -> Result<Self> {
        let w = 1.0 / pairs.len().max(1) as f64;
        let realizations = pairs
            .into_iter()
            .map(|(t, q)| Realization::new(w, t, q))
            .collect::<Result<Vec<_>>>()?;
        Self::new(realizations)
    }

    pub fn realizations(&self) -> &[Realization] {
        &self.realizations
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }

    pub fn order(&self) -> usize {
        self.realizations[0].tensor.order()
    }

    pub fn dim(&self) -> usize {
        self.realizations[0].tensor.dim()
    }

    /// Weighted entry-wise mean tensor.
    pub fn expectation_tensor(&self) -> Tensor {
        let terms: Vec<(f64, &Tensor)> = self.realizations.iter().map(|r| (r.weight, &r.tensor)).collect();
        Tensor::linear_combination(self.order(), self.dim(), &terms).expect("realizations share one shape")
    }

    pub fn expectation_q(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim()];
        for r in &self.realizations {
            for (m, qi) in mean.iter_mut().zip(&r.q) {
                *m += r.weight * qi;
            }
        }
        mean
    }

    pub fn expected_q_moments(&self) -> QMoments {
        let dim = self.dim();
        let mut second = vec![0.0; dim];
        let mut negative = vec![0.0; dim];
        for r in &self.realizations {
            for (i, qi) in r.q.iter().enumerate() {
                let sq = r.weight * qi * qi;
                second[i] += sq;
                if *qi < 0.0 {
                    negative[i] += sq;
                }
            }
        }
        QMoments {
            total_second_moment: second.iter().sum(),
            second_moments: second,
            negative_second_moments: negative,
        }
    }

    /// Single realization holding the mean tensor and mean `q`.
    pub fn mean_space(&self) -> SampleSpace {
        SampleSpace {
            realizations: vec![Realization {
                weight: 1.0,
                tensor: self.expectation_tensor(),
                q: self.expectation_q(),
            }],
            provenance: Provenance::Derived,
        }
    }

    /// Same tensors with `q = 0` everywhere.
    pub fn with_zero_q(&self) -> SampleSpace {
        let dim = self.dim();
        self.map_realizations(|r| Realization {
            weight: r.weight,
            tensor: r.tensor.clone(),
            q: vec![0.0; dim],
        })
    }

    /// Every tensor multiplied by `c`.
    pub fn scale_tensors(&self, c: f64) -> SampleSpace {
        self.map_realizations(|r| Realization {
            weight: r.weight,
            tensor: r.tensor.scale(c),
            q: r.q.clone(),
        })
    }

    /// Subtracts the mean tensor from every realization, leaving `q` alone.
    pub fn centered(&self) -> SampleSpace {
        let mean = self.expectation_tensor();
        self.map_realizations(|r| Realization {
            weight: r.weight,
            tensor: r.tensor.sub(&mean).expect("shapes agree"),
            q: r.q.clone(),
        })
    }

    fn map_realizations(&self, f: impl Fn(&Realization) -> Realization) -> SampleSpace {
        SampleSpace {
            realizations: self.realizations.iter().map(f).collect(),
            provenance: Provenance::Derived,
        }
    }

    /// Space of `A(w0) + B(w1)`, `q(w0) + q(w1)` with `w0`, `w1` independent:
    /// every pair of realizations, weighted by the product of weights.
    pub fn independent_sum(&self, other: &SampleSpace) -> Result<SampleSpace> {
        self.realizations[0].tensor.check_shape(&other.realizations[0].tensor)?;
        let mut realizations = Vec::with_capacity(self.len() * other.len());
        for a in &self.realizations {
            for b in &other.realizations {
                realizations.push(Realization {
                    weight: a.weight * b.weight,
                    tensor: a.tensor.add(&b.tensor)?,
                    q: a.q.iter().zip(&b.q).map(|(x, y)| x + y).collect(),
                });
            }
        }
        Self::with_provenance(realizations, Provenance::Derived)
    }

    /// Mixture `sum_j c_j S_j` with nonnegative `c_j` summing to one.
    pub fn mixture(components: &[(f64, &SampleSpace)]) -> Result<SampleSpace> {
        let mut realizations = Vec::new();
        for (c, space) in components {
            if !(*c > 0.0) {
                return Err(Error::InvalidWeights(format!("mixture weight {c} is not positive")));
            }
            for r in &space.realizations {
                realizations.push(Realization {
                    weight: c * r.weight,
                    ..r.clone()
                });
            }
        }
        Self::with_provenance(realizations, Provenance::Derived)
    }

    /// Realization `k` as a one-point space.
    pub fn realization_space(&self, k: usize) -> Result<SampleSpace> {
        let r = self.realizations.get(k).ok_or_else(|| {
            Error::InvalidArgument(format!("realization {k} out of range (space has {})", self.len()))
        })?;
        Ok(SampleSpace {
            realizations: vec![Realization {
                weight: 1.0,
                ..r.clone()
            }],
            provenance: Provenance::Derived,
        })
    }

    /// Whether any generator coordinate has unbounded support.
    pub fn has_unbounded_coordinate(&self) -> bool {
        match &self.provenance {
            Provenance::Generated { spec, .. } | Provenance::Fixed { spec, .. } => spec.has_unbounded_coordinate(),
            _ => false,
        }
    }
}
