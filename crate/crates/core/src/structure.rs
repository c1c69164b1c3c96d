//! Numerical R0 / stochastic-R0 decisions.
//!
//! A tensor `A` is R0 when `x >= 0`, `A x^{N-1} >= 0` and `A x^N = 0` force
//! `x = 0`. For `x >= 0` those three conditions hold exactly when every
//! component of `min(x, A x^{N-1})` vanishes, so the checker minimizes
//!
//! ```text
//! r(x) = || min(x, A x^{N-1}) ||^2
//! ```
//!
//! and its weighted counterpart `G0(x) = sum_k w_k || min(x, A_k x^{N-1}) ||^2`
//! for a sample space. Positive scaling of `x` preserves the zero set of the
//! merit (though not its value), so the search is restricted to the unit
//! simplex: a lattice grid is evaluated, the most promising grid points and a
//! batch of seeded random points are polished by projected gradient
//! descent, and the smallest merit decides the verdict:
//!
//! * `NOT_R0` if the minimum is at most `1e-10` (the minimizer is a witness),
//! * `IS_R0` if it exceeds `1e-6`,
//! * `INCONCLUSIVE` in between.
//!
//! The search is not exhaustive; `IS_R0` means no witness was found at the
//! configured resolution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descent::{self, Armijo, StopRule};
use crate::error::{check_len, Error, Result};
use crate::ncp::{support_sets, ResidualConfig, SupportSets, DEFAULT_SUPPORT_TOL};
use crate::objective::{erm_value, value_and_gradient};
use crate::simplex::{capped_resolution, grid_size, normalize_l1, random_simplex_point, simplex_grid};
use crate::stochastic::SampleSpace;
use crate::tensor::Tensor;

pub const NOT_R0_THRESHOLD: f64 = 1e-10;
pub const IS_R0_THRESHOLD: f64 = 1e-6;
/// Strict-negativity threshold for condition (b)-type tests.
pub const NEGATIVITY_TOL: f64 = 1e-10;
/// Witnesses closer than this (max-norm) are merged.
const WITNESS_MERGE_TOL: f64 = 1e-6;
/// Coordinates below this are zeroed when snapping a polished point.
const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    IsR0,
    NotR0,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::IsR0 => "IS_R0",
            Verdict::NotR0 => "NOT_R0",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Lattice spacing is `1/resolution`; `None` picks by dimension.
    pub grid_resolution: Option<usize>,
    pub random_starts: usize,
    /// Number of lowest-merit grid points that are polished.
    pub grid_polish: usize,
    pub polish_iterations: usize,
    pub seed: u64,
    pub zero_tolerance: f64,
    pub decision_tolerance: f64,
    pub max_witnesses: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            grid_resolution: None,
            random_starts: 200,
            grid_polish: 16,
            polish_iterations: 300,
            seed: 0,
            zero_tolerance: NOT_R0_THRESHOLD,
            decision_tolerance: IS_R0_THRESHOLD,
            max_witnesses: 64,
        }
    }
}

/// 20 for `I <= 3`, 10 for `I = 4`, 8 for `I = 5`; larger dimensions use the
/// finest resolution whose grid stays small.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        0..=3 => 20,
        4 => 10,
        5 => 8,
        _ => capped_resolution(dim, 8),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub grid_points: u64,
    pub random_starts: usize,
    pub grid_polish: usize,
    pub polish_iterations: usize,
    pub seed: u64,
    pub zero_tolerance: f64,
    pub decision_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub claimed: Verdict,
    pub observed: Verdict,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    /// Simplex point with the smallest merit among the witnesses.
    pub witness: Option<Vec<f64>>,
    /// Merit at the witness, or the overall minimum when there is none.
    pub certificate_residual: f64,
    /// Distinct zero-merit points found, grid points first.
    pub witnesses: Vec<Vec<f64>>,
    pub grid_minimum: f64,
    pub grid_spec: GridSpec,
    pub claim: Option<ClaimCheck>,
    pub notes: Vec<String>,
}

impl CheckReport {
    /// Records a verdict stated by an external reference and flags any
    /// disagreement with the computed one.
    pub fn compare_claim(&mut self, claimed: Verdict) {
        let agrees = claimed == self.verdict;
        if !agrees {
            let at = self
                .witness
                .as_ref()
                .map(|w| format!(" (witness {w:?}, merit {:e})", self.certificate_residual))
                .unwrap_or_default();
            self.notes.push(format!(
                "reference claim {claimed} disagrees with direct evaluation {}{at}",
                self.verdict
            ));
        }
        self.claim = Some(ClaimCheck {
            claimed,
            observed: self.verdict,
            agrees,
        });
    }
}

#[derive(Debug, Clone)]
struct ScanPoint {
    x: Vec<f64>,
    merit: f64,
}

struct Scan {
    grid: Vec<ScanPoint>,
    polished: Vec<ScanPoint>,
    spec: GridSpec,
}

impl Scan {
    fn all(&self) -> impl Iterator<Item = &ScanPoint> {
        self.grid.iter().chain(&self.polished)
    }
}

fn merit(space: &SampleSpace, x: &[f64]) -> f64 {
    erm_value(space, x, &ResidualConfig::min()).expect("dimension fixed by the scan")
}

fn polish(space: &SampleSpace, x0: Vec<f64>, opts: &CheckOptions) -> ScanPoint {
    let config = ResidualConfig::min();
    let out = descent::minimize(
        x0,
        |x| value_and_gradient(space, x, &config),
        descent::project_simplex,
        Armijo {
            initial_step: 1.0,
            backtrack: 0.5,
            sufficient_decrease: 1e-4,
        },
        StopRule {
            max_iterations: opts.polish_iterations,
            gradient_tolerance: 1e-15,
            objective_tolerance: opts.zero_tolerance * 1e-6,
        },
        |_, _| {},
    );
    let mut best = ScanPoint {
        merit: merit(space, &out.x),
        x: out.x,
    };
    let snapped: Vec<f64> = best.x.iter().map(|&c| if c <= SNAP_TOL { 0.0 } else { c }).collect();
    if let Some(snapped) = normalize_l1(&snapped) {
        let m = merit(space, &snapped);
        if m <= best.merit {
            best = ScanPoint { x: snapped, merit: m };
        }
    }
    best
}

fn scan(space: &SampleSpace, opts: &CheckOptions) -> Scan {
    let dim = space.dim();
    let resolution = opts.grid_resolution.unwrap_or_else(|| default_resolution(dim));
    let grid: Vec<ScanPoint> = simplex_grid(dim, resolution)
        .into_par_iter()
        .map(|x| ScanPoint {
            merit: merit(space, &x),
            x,
        })
        .collect();

    let mut order: Vec<usize> = (0..grid.len())
        .filter(|&i| grid[i].merit > opts.zero_tolerance)
        .collect();
    order.sort_by(|&a, &b| grid[a].merit.total_cmp(&grid[b].merit).then(a.cmp(&b)));
    let mut seeds: Vec<Vec<f64>> = order
        .iter()
        .take(opts.grid_polish)
        .map(|&i| grid[i].x.clone())
        .collect();
    seeds.extend((0..opts.random_starts).map(|k| random_simplex_point(dim, opts.seed, k)));
    let polished: Vec<ScanPoint> = seeds.into_par_iter().map(|x0| polish(space, x0, opts)).collect();

    Scan {
        spec: GridSpec {
            resolution,
            grid_points: grid_size(dim, resolution) as u64,
            random_starts: opts.random_starts,
            grid_polish: opts.grid_polish,
            polish_iterations: opts.polish_iterations,
            seed: opts.seed,
            zero_tolerance: opts.zero_tolerance,
            decision_tolerance: opts.decision_tolerance,
        },
        grid,
        polished,
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn push_distinct(list: &mut Vec<Vec<f64>>, x: &[f64]) -> bool {
    if list.iter().any(|w| max_abs_diff(w, x) <= WITNESS_MERGE_TOL) {
        false
    } else {
        list.push(x.to_vec());
        true
    }
}

fn check_space(space_zero_q: &SampleSpace, opts: &CheckOptions) -> CheckReport {
    let scan = scan(space_zero_q, opts);
    let grid_minimum = scan.grid.iter().map(|p| p.merit).fold(f64::INFINITY, f64::min);
    let overall = scan.all().map(|p| p.merit).fold(f64::INFINITY, f64::min);

    let mut witnesses: Vec<Vec<f64>> = Vec::new();
    let mut best: Option<&ScanPoint> = None;
    for p in scan.all().filter(|p| p.merit <= opts.zero_tolerance) {
        if best.is_none_or(|b| p.merit < b.merit) {
            best = Some(p);
        }
        if witnesses.len() < opts.max_witnesses {
            push_distinct(&mut witnesses, &p.x);
        }
    }

    let verdict = if overall <= opts.zero_tolerance {
        Verdict::NotR0
    } else if overall > opts.decision_tolerance {
        Verdict::IsR0
    } else {
        Verdict::Inconclusive
    };
    let mut notes = Vec::new();
    match verdict {
        Verdict::IsR0 => notes.push(format!(
            "no witness at grid resolution 1/{} with {} polished starts; minimum merit {:e}",
            scan.spec.resolution,
            scan.polished.len(),
            overall
        )),
        Verdict::Inconclusive => notes.push(format!(
            "minimum merit {overall:e} lies between the zero and decision tolerances"
        )),
        Verdict::NotR0 => {}
    }
    CheckReport {
        verdict,
        witness: best.map(|p| p.x.clone()),
        certificate_residual: best.map_or(overall, |p| p.merit),
        witnesses,
        grid_minimum,
        grid_spec: scan.spec,
        claim: None,
        notes,
    }
}

/// Decides whether a single tensor is R0.
pub fn check_r0(a: &Tensor, opts: &CheckOptions) -> CheckReport {
    let space = SampleSpace::singleton(a.clone(), vec![0.0; a.dim()]).expect("valid singleton");
    check_space(&space, opts)
}

/// Decides whether the random tensor of `space` is stochastic R0; `q` is
/// ignored. On one-realization spaces this is exactly [`check_r0`].
pub fn check_stochastic_r0(space: &SampleSpace, opts: &CheckOptions) -> CheckReport {
    let mut report = check_space(&space.with_zero_q(), opts);
    if report.verdict == Verdict::NotR0 && space.len() > 1 {
        report
            .notes
            .push("the witness is a common degenerate direction of every realization".into());
    }
    report
}

/// Largest deviation of `x` from the conditions `(A x^{N-1})_i = 0` on the
/// support of `x` and `(A x^{N-1})_i >= 0` off it.
pub fn xi_violation(a: &Tensor, x: &[f64]) -> Result<f64> {
    let y = a.contract_to_vector(x)?;
    let s = support_sets(x, DEFAULT_SUPPORT_TOL);
    let on_support = s.nonzero_indices.iter().map(|&i| y[i].abs());
    let off_support = s.zero_indices.iter().map(|&i| (-y[i]).max(0.0));
    Ok(on_support.chain(off_support).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiPoint {
    /// Normalized to the unit simplex.
    pub x: Vec<f64>,
    pub max_violation: f64,
}

/// Points of the degenerate set found on the simplex grid or by polishing.
///
/// Not exhaustive: an empty result means nothing was found at the grid
/// resolution, not that the set is empty.
pub fn find_xi_points(a: &Tensor, opts: &CheckOptions, tol: f64) -> Vec<XiPoint> {
    let space = SampleSpace::singleton(a.clone(), vec![0.0; a.dim()]).expect("valid singleton");
    let scan = scan(&space, opts);
    let mut seen: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::new();
    for p in scan.all() {
        let Some(x) = normalize_l1(&p.x) else { continue };
        let v = xi_violation(a, &x).expect("dimension fixed");
        if v <= tol && push_distinct(&mut seen, &x) {
            out.push(XiPoint { x, max_violation: v });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem41Conditions {
    /// Some realization has `(A x^{N-1})_i != 0` for some `i` in the support.
    pub cond_a: bool,
    /// Some realization has `(A x^{N-1})_i < 0` for some `i` off the support.
    pub cond_b: bool,
    pub support: SupportSets,
}

impl Theorem41Conditions {
    /// Both conditions fail: `x` is a degenerate direction for the space.
    pub fn degenerate(&self) -> bool {
        !self.cond_a && !self.cond_b
    }
}

fn validate_direction(x: &[f64]) -> Result<()> {
    if x.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
        return Err(Error::InvalidArgument("vector must be finite and nonnegative".into()));
    }
    if x.iter().all(|&c| c == 0.0) {
        return Err(Error::InvalidArgument("vector must be nonzero".into()));
    }
    Ok(())
}

/// Evaluates the two per-direction alternatives whose joint failure at some
/// nonzero `x >= 0` is exactly the failure of stochastic R0.
pub fn check_theorem41_conditions(space: &SampleSpace, x: &[f64], tol: f64) -> Result<Theorem41Conditions> {
    check_len(space.dim(), x.len())?;
    validate_direction(x)?;
    let support = support_sets(x, DEFAULT_SUPPORT_TOL);
    let mut cond_a = false;
    let mut cond_b = false;
    for r in space.realizations() {
        let y = r.tensor.contract_to_vector(x)?;
        cond_a |= support.nonzero_indices.iter().any(|&i| y[i].abs() > tol);
        cond_b |= support.zero_indices.iter().any(|&i| y[i] < -tol);
        if cond_a && cond_b {
            break;
        }
    }
    Ok(Theorem41Conditions {
        cond_a,
        cond_b,
        support,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop42Point {
    pub x: Vec<f64>,
    /// Degenerate-set violation of `x` for the base tensor.
    pub base_violation: f64,
    /// `max_{i in J(x)} E[((A0 x^{N-1})_i)^2]`.
    pub cond1_value: f64,
    pub cond1: bool,
    /// For each `b`: largest weight, over `i` off the support, of
    /// `{(A0 x^{N-1})_i < -b}`.
    pub cond2_weights: Vec<(f64, f64)>,
    pub cond2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop42Report {
    pub points: Vec<Prop42Point>,
    pub b_max: f64,
    pub notes: Vec<String>,
}

/// For each degenerate point of the base tensor, checks whether the
/// mean-zero perturbation space rules it out: either some support component
/// of `A0 x^{N-1}` has positive second moment, or some off-support component
/// is below `-b` with positive weight for every `b` in `b_grid`.
///
/// The second condition quantifies over all `b > 0`; on a finite sample it
/// is only evaluated up to `max(b_grid)`.
pub fn check_prop42_conditions(
    base: &Tensor,
    perturbation: &SampleSpace,
    xi_points: &[XiPoint],
    b_grid: &[f64],
) -> Result<Prop42Report> {
    base.check_shape(&perturbation.realizations()[0].tensor)?;
    let mean_norm = perturbation.expectation_tensor().frobenius_norm();
    if mean_norm > 1e-10 {
        return Err(Error::Precondition(format!(
            "perturbation mean tensor has Frobenius norm {mean_norm:e}, expected at most 1e-10"
        )));
    }
    if b_grid.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::InvalidArgument("b_grid values must be positive".into()));
    }
    let mut points = Vec::with_capacity(xi_points.len());
    for p in xi_points {
        check_len(base.dim(), p.x.len())?;
        let support = support_sets(&p.x, DEFAULT_SUPPORT_TOL);
        let ys: Vec<(f64, Vec<f64>)> = perturbation
            .realizations()
            .iter()
            .map(|r| Ok((r.weight, r.tensor.contract_to_vector(&p.x)?)))
            .collect::<Result<_>>()?;
        let cond1_value = support
            .nonzero_indices
            .iter()
            .map(|&i| ys.iter().map(|(w, y)| w * y[i] * y[i]).sum::<f64>())
            .fold(0.0, f64::max);
        let weight_below =
            |i: usize, b: f64| -> f64 { ys.iter().filter(|(_, y)| y[i] < -b).fold(0.0, |acc, (w, _)| acc + w) };
        let cond2_weights = b_grid
            .iter()
            .map(|&b| {
                let w = support
                    .zero_indices
                    .iter()
                    .map(|&i| weight_below(i, b))
                    .fold(0.0, f64::max);
                (b, w)
            })
            .collect();
        let cond2 = !b_grid.is_empty()
            && support
                .zero_indices
                .iter()
                .any(|&i| b_grid.iter().all(|&b| weight_below(i, b) > 0.0));
        points.push(Prop42Point {
            x: p.x.clone(),
            base_violation: xi_violation(base, &p.x)?,
            cond1_value,
            cond1: cond1_value > 1e-10,
            cond2_weights,
            cond2,
        });
    }
    let b_max = b_grid.iter().copied().fold(0.0, f64::max);
    let mut notes = vec![format!("condition (2) is empirical, evaluated up to b_max = {b_max}")];
    if perturbation.has_unbounded_coordinate() {
        notes.push(
            "a generator coordinate has unbounded (normal) support, so a linear dependence on it \
             exceeds every threshold with positive probability"
                .into(),
        );
    }
    Ok(Prop42Report { points, b_max, notes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop41Report {
    pub mean_is_r0: bool,
    pub mean_report: CheckReport,
    pub stochastic: CheckReport,
}

/// Checks the mean tensor and the space together; an R0 mean implies a
/// stochastic-R0 space.
pub fn check_prop41(space: &SampleSpace, opts: &CheckOptions) -> Prop41Report {
    let mean_report = check_r0(&space.expectation_tensor(), opts);
    let stochastic = check_stochastic_r0(space, opts);
    Prop41Report {
        mean_is_r0: mean_report.verdict == Verdict::IsR0,
        mean_report,
        stochastic,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub radius: f64,
    pub draws: usize,
    pub survivors: usize,
    pub fraction: f64,
    /// Verdict of each perturbed tensor, in draw order.
    pub verdicts: Vec<Verdict>,
}

/// Frobenius-radius-`radius` random perturbation number `k`: a dense
/// Gaussian direction scaled to norm `radius * u`, `u` uniform in `[0, 1)`.
pub fn random_perturbation(order: usize, dim: usize, radius: f64, seed: u64, k: usize) -> Result<Tensor> {
    let len = (dim as u128).saturating_pow(order as u32);
    if len > crate::tensor::DENSE_LIMIT {
        return Err(Error::TooLarge(len));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let scale_u: f64 = rng.random();
    let mut values: Vec<f64> = (0..len)
        .map(|_| {
            let u1: f64 = rng.random();
            let u2: f64 = rng.random();
            (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        })
        .collect();
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = radius * scale_u;
    if norm > 0.0 {
        for v in values.iter_mut() {
            *v *= target / norm;
        }
    }
    Tensor::from_dense(order, dim, &values)
}

/// Fraction of random perturbations of Frobenius norm at most `radius`
/// under which an R0 tensor stays R0.
pub fn perturbation_stability_test(
    a: &Tensor,
    radius: f64,
    draws: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<StabilityReport> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "radius must be finite and nonnegative, got {radius}"
        )));
    }
    let base = check_r0(a, opts);
    if base.verdict != Verdict::IsR0 {
        return Err(Error::Precondition(format!(
            "the tensor must be R0 before perturbation, checker says {}",
            base.verdict
        )));
    }
    let verdicts = (0..draws)
        .map(|k| {
            let e = random_perturbation(a.order(), a.dim(), radius, seed, k)?;
            Ok(check_r0(&a.add(&e)?, opts).verdict)
        })
        .collect::<Result<Vec<_>>>()?;
    let survivors = verdicts.iter().filter(|v| **v == Verdict::IsR0).count();
    Ok(StabilityReport {
        radius,
        draws,
        survivors,
        fraction: if draws == 0 {
            1.0
        } else {
            survivors as f64 / draws as f64
        },
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> CheckOptions {
        CheckOptions {
            random_starts: 40,
            ..CheckOptions::default()
        }
    }

    #[test]
    fn identity_and_zero() {
        for (n, i) in [(2, 2), (3, 3), (4, 2), (3, 5)] {
            let r = check_r0(&Tensor::identity(n, i).unwrap(), &quick());
            assert_eq!(r.verdict, Verdict::IsR0, "identity N={n} I={i}");
            assert!(r.witness.is_none());
        }
        let r = check_r0(&Tensor::zeros(3, 3).unwrap(), &quick());
        assert_eq!(r.verdict, Verdict::NotR0);
        assert_eq!(r.witness.unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(r.certificate_residual, 0.0);
    }

    #[test]
    fn theorem41_conditions_examples() {
        let id = SampleSpace::singleton(Tensor::identity(3, 2).unwrap(), vec![0.0; 2]).unwrap();
        let c = check_theorem41_conditions(&id, &[1.0, 0.0], 1e-10).unwrap();
        assert!(c.cond_a);
        let z = SampleSpace::singleton(Tensor::zeros(3, 2).unwrap(), vec![0.0; 2]).unwrap();
        let c = check_theorem41_conditions(&z, &[0.3, 0.7], 1e-10).unwrap();
        assert!(c.degenerate());
        assert!(check_theorem41_conditions(&z, &[0.0, 0.0], 1e-10).is_err());
        assert!(check_theorem41_conditions(&z, &[-1.0, 1.0], 1e-10).is_err());
    }

    #[test]
    fn xi_points_of_identity_and_zero() {
        assert!(find_xi_points(&Tensor::identity(3, 3).unwrap(), &quick(), 1e-8).is_empty());
        let z = find_xi_points(&Tensor::zeros(3, 2).unwrap(), &quick(), 1e-8);
        assert!(z.len() >= 21);
    }

    #[test]
    fn prop42_rejects_nonzero_mean() {
        let id = Tensor::identity(3, 2).unwrap();
        let s = SampleSpace::singleton(id.clone(), vec![0.0; 2]).unwrap();
        assert!(matches!(
            check_prop42_conditions(&id, &s, &[], &[1.0]),
            Err(Error::Precondition(_))
        ));
        let zero = SampleSpace::singleton(Tensor::zeros(3, 2).unwrap(), vec![0.0; 2]).unwrap();
        let pts = [XiPoint {
            x: vec![1.0, 0.0],
            max_violation: 0.0,
        }];
        let r = check_prop42_conditions(&Tensor::zeros(3, 2).unwrap(), &zero, &pts, &[0.5]).unwrap();
        assert!(!r.points[0].cond1 && !r.points[0].cond2);
    }

    #[test]
    fn stability_requires_r0() {
        let z = Tensor::zeros(3, 2).unwrap();
        assert!(matches!(
            perturbation_stability_test(&z, 0.1, 3, 0, &quick()),
            Err(Error::Precondition(_))
        ));
        let id = Tensor::identity(3, 2).unwrap();
        let r = perturbation_stability_test(&id, 0.0, 5, 0, &quick()).unwrap();
        assert_eq!(r.fraction, 1.0);
    }

    #[test]
    fn perturbation_norm_is_bounded() {
        for k in 0..20 {
            let e = random_perturbation(3, 3, 0.5, 4, k).unwrap();
            assert!(e.frobenius_norm() <= 0.5 + 1e-12);
        }
    }
}
