//! NCP functions and the per-realization residual `Phi(x, w)`.
//!
//! An NCP function satisfies `phi(a, b) = 0  <=>  a >= 0, b >= 0, ab = 0`.
//! Two are provided:
//!
//! * `MIN`: `phi(a, b) = min(a, b)`
//! * `FB` (Fischer-Burmeister): `phi(a, b) = a + b - sqrt(a^2 + b^2)`
//!
//! and they are related by the growth bounds
//!
//! ```text
//! 2/(sqrt2 + 2) |min(a,b)|  <=  |a + b - sqrt(a^2 + b^2)|  <=  (sqrt2 + 2) |min(a,b)|
//! ```
//!
//! The residual of one realization `(A, q)` at `x` is the vector with
//! components `phi((A x^{N-1})_i + q_i, x_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::tensor::Tensor;

/// Default threshold below which a coordinate counts as zero.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NcpKind {
    Min,
    Fb,
}

impl std::fmt::Display for NcpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NcpKind::Min => f.write_str("min"),
            NcpKind::Fb => f.write_str("fb"),
        }
    }
}

impl std::str::FromStr for NcpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(NcpKind::Min),
            "fb" => Ok(NcpKind::Fb),
            other => Err(Error::InvalidArgument(format!("unknown NCP function `{other}`"))),
        }
    }
}

/// Choice of NCP function plus the smoothing parameter `mu`.
///
/// `mu = 0` is the exact residual. A positive `mu` replaces `min(a, b)` with
/// `(a + b - sqrt((a - b)^2 + 4 mu^2)) / 2`, which differs from the exact
/// value by at most `mu`. FB is differentiable in squared form and ignores
/// `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualConfig {
    pub ncp_kind: NcpKind,
    pub smoothing_mu: f64,
}

impl ResidualConfig {
    pub fn new(ncp_kind: NcpKind, smoothing_mu: f64) -> Result<Self> {
        if !(smoothing_mu >= 0.0) || !smoothing_mu.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "smoothing parameter must be finite and nonnegative, got {smoothing_mu}"
            )));
        }
        Ok(ResidualConfig { ncp_kind, smoothing_mu })
    }

    pub fn min() -> Self {
        ResidualConfig {
            ncp_kind: NcpKind::Min,
            smoothing_mu: 0.0,
        }
    }

    pub fn fb() -> Self {
        ResidualConfig {
            ncp_kind: NcpKind::Fb,
            smoothing_mu: 0.0,
        }
    }

    pub fn smoothed_min(mu: f64) -> Result<Self> {
        Self::new(NcpKind::Min, mu)
    }

    /// Same NCP function with `mu = 0`.
    pub fn exact(self) -> Self {
        ResidualConfig {
            smoothing_mu: 0.0,
            ..self
        }
    }

    /// True when the squared residual is differentiable everywhere.
    pub fn is_smooth(&self) -> bool {
        match self.ncp_kind {
            NcpKind::Fb => true,
            NcpKind::Min => self.smoothing_mu > 0.0,
        }
    }

    pub(crate) fn with_mu(self, mu: f64) -> Self {
        ResidualConfig {
            smoothing_mu: mu,
            ..self
        }
    }
}

/// Three-valued sign with `sign(0) = 0`.
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn phi(kind: NcpKind, a: f64, b: f64) -> f64 {
    match kind {
        NcpKind::Min => a.min(b),
        NcpKind::Fb => fischer_burmeister(a, b),
    }
}

pub fn fischer_burmeister(a: f64, b: f64) -> f64 {
    a + b - a.hypot(b)
}

pub fn smoothed_min(a: f64, b: f64, mu: f64) -> f64 {
    let d = a - b;
    0.5 * (a + b - (d * d + 4.0 * mu * mu).sqrt())
}

/// `phi` under `config`, honoring the smoothing parameter for MIN.
pub fn phi_config(config: &ResidualConfig, a: f64, b: f64) -> f64 {
    match config.ncp_kind {
        NcpKind::Min if config.smoothing_mu > 0.0 => smoothed_min(a, b, config.smoothing_mu),
        kind => phi(kind, a, b),
    }
}

/// Value and partial derivatives `(phi, d phi/da, d phi/db)`.
///
/// For exact MIN the partials are those of the active branch (`a` on ties),
/// valid wherever `a != b`. FB at the origin uses `(1 - 1/sqrt2)` for both
/// partials.
pub(crate) fn phi_with_partials(config: &ResidualConfig, a: f64, b: f64) -> (f64, f64, f64) {
    match config.ncp_kind {
        NcpKind::Fb => {
            let r = a.hypot(b);
            if r == 0.0 {
                let g = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
                (0.0, g, g)
            } else {
                (a + b - r, 1.0 - a / r, 1.0 - b / r)
            }
        }
        NcpKind::Min => {
            let mu = config.smoothing_mu;
            if mu > 0.0 {
                let d = a - b;
                let s = (d * d + 4.0 * mu * mu).sqrt();
                (0.5 * (a + b - s), 0.5 * (1.0 - d / s), 0.5 * (1.0 + d / s))
            } else if a <= b {
                (a, 1.0, 0.0)
            } else {
                (b, 0.0, 1.0)
            }
        }
    }
}

/// `Phi(x)` for one realization `(A, q)`.
pub fn residual(a: &Tensor, q: &[f64], x: &[f64], config: &ResidualConfig) -> Result<Vec<f64>> {
    check_len(a.dim(), q.len())?;
    let ax = a.contract_to_vector(x)?;
    Ok(ax
        .iter()
        .zip(q)
        .zip(x)
        .map(|((axi, qi), xi)| phi_config(config, axi + qi, *xi))
        .collect())
}

pub fn squared_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum()
}

/// Checks the MIN/FB growth bounds at `(a, b)` with `1e-12` absolute slack.
pub fn growth_bounds_holds(a: f64, b: f64) -> bool {
    const SLACK: f64 = 1e-12;
    let root2 = std::f64::consts::SQRT_2;
    let m = a.min(b).abs();
    let fb = fischer_burmeister(a, b).abs();
    let lower = 2.0 / (root2 + 2.0) * m;
    let upper = (root2 + 2.0) * m;
    lower <= fb + SLACK && fb <= upper + SLACK
}

/// Squared MIN residual written as a quadratic form in the sign matrix
/// `D = diag(sign(A x^{N-1} + q - x))`:
///
/// ```text
/// 1/2 (Ax^{N-1} + q)^T (I - D) (Ax^{N-1} + q) + 1/2 x^T (I + D) x
/// ```
///
/// Agrees with `||residual(.., MIN)||^2` up to rounding.
pub fn quadratic_form_residual(a: &Tensor, q: &[f64], x: &[f64]) -> Result<f64> {
    check_len(a.dim(), q.len())?;
    let ax = a.contract_to_vector(x)?;
    let mut total = 0.0;
    for ((axi, qi), xi) in ax.iter().zip(q).zip(x) {
        let u = axi + qi;
        let d = sign(u - xi);
        total += 0.5 * u * (1.0 - d) * u + 0.5 * xi * (1.0 + d) * xi;
    }
    Ok(total)
}

/// `zero_indices = {i : |x_i| <= tol}` and its complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSets {
    pub zero_indices: Vec<usize>,
    pub nonzero_indices: Vec<usize>,
    pub tolerance: f64,
}

impl SupportSets {
    pub fn is_zero(&self, i: usize) -> bool {
        self.zero_indices.binary_search(&i).is_ok()
    }
}

pub fn support_sets(x: &[f64], tol: f64) -> SupportSets {
    let (zero, nonzero): (Vec<usize>, Vec<usize>) = (0..x.len()).partition(|&i| x[i].abs() <= tol);
    SupportSets {
        zero_indices: zero,
        nonzero_indices: nonzero,
        tolerance: tol,
    }
}
