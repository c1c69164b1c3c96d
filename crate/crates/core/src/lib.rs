//! Expected residual minimization for stochastic tensor complementarity
//! problems, with numerical R0 / stochastic-R0 checkers and coercivity
//! probes.
//!
//! ```
//! use stcp::{ResidualConfig, SampleSpace, SolverOptions, Tensor};
//!
//! let a = Tensor::identity(3, 2).unwrap();
//! let space = SampleSpace::singleton(a, vec![-1.0, -4.0]).unwrap();
//! let r = stcp::solve_erm(&space, &ResidualConfig::min(), &SolverOptions::default()).unwrap();
//! assert!((r.x_star[0] - 1.0).abs() < 1e-4 && (r.x_star[1] - 2.0).abs() < 1e-4);
//! ```

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod descent;
pub mod error;
pub mod io;
pub mod ncp;
pub mod objective;
pub mod probe;
pub mod simplex;
pub mod solver;
pub mod stochastic;
pub mod structure;
pub mod tensor;

pub use error::{Error, Result};
pub use ncp::{NcpKind, ResidualConfig};
pub use objective::{erm_gradient, erm_objective, ev_gradient, ev_objective};
pub use probe::{boundedness_probe, coercivity_scan, ray_probe, ProbeVerdict};
pub use solver::{solve_erm, solve_ev, SolveResult, SolverOptions};
pub use stochastic::{GeneratorSpec, SampleSpace};
pub use structure::{check_r0, check_stochastic_r0, CheckOptions, CheckReport, Verdict};
pub use tensor::Tensor;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tensors.md")]
    mod tensors {}
    #[doc = include_str!("../../../book/src/residuals.md")]
    mod residuals {}
    #[doc = include_str!("../../../book/src/sample_spaces.md")]
    mod sample_spaces {}
    #[doc = include_str!("../../../book/src/objective.md")]
    mod objective {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/r0_checks.md")]
    mod r0_checks {}
    #[doc = include_str!("../../../book/src/probes.md")]
    mod probes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
