//! Special functions and numerical integration used by the closed-form model.
//!
//! Everything here is a pure function of its arguments and safe to call from
//! any number of threads.

mod erf;
mod expint;
mod gamma;
mod hypergeometric;
mod quadrature;

pub use erf::{erfc_c, erfcx, q_function};
pub use expint::{expint_e1, expint_ei};
pub use gamma::{gamma, ln_gamma, rgamma};
pub use hypergeometric::hyp2f1;
pub use quadrature::{integrate, integrate_semi_infinite, QuadratureSpec};

use thiserror::Error;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("{function}: argument outside the domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("{function}: series did not converge after {iterations} terms")]
    SeriesDivergence {
        function: &'static str,
        iterations: usize,
    },
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Convergence { estimate: f64, error_bound: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> SpecfunError {
    SpecfunError::Domain {
        function,
        detail: detail.into(),
    }
}
