//! Special functions: complex log-gamma and Fox-H / Meijer-G evaluation by
//! Mellin-Barnes contour quadrature.

mod bivariate;
mod control;
mod fox;
mod gamma;
mod hyper;
mod kernel;
mod residue;

pub use bivariate::{fox_h_bivariate, BivariateEstimate, BivariateFoxHSpec, JointParam};
pub use control::QuadratureControl;
pub use fox::{fox_h, meijer_g, FoxHSpec, PoleTerm};
pub use gamma::{binomial, digamma, factorial, gamma, ln_binomial, ln_gamma, ln_gamma_complex};
pub use hyper::ln_hyp1f1;
pub use kernel::MellinEstimate;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("gamma function pole at {at}")]
    GammaPole { at: f64 },
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no contour separates the pole families (strip {lo}..{hi})")]
    PoleCollision { lo: f64, hi: f64 },
    #[error("Mellin-Barnes integral diverges (convergence exponent {exponent})")]
    Divergent { exponent: f64 },
    #[error("contour quadrature missed tolerance: relative error {rel_error:e} at {nodes} nodes")]
    NonConvergence { rel_error: f64, nodes: usize },
    #[error("pole of order {order} at s={at} is not supported")]
    HighOrderPole { order: i32, at: f64 },
    #[error("series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },
}
