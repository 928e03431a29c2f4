//! Ergodic capacity, outage probability and high-SNR diversity analysis for a
//! [`Scenario`](crate::channel::Scenario).

mod capacity;
mod diversity;
mod outage;

use thiserror::Error;

use crate::channel::ChannelError;
use crate::quad::QuadError;
use crate::specfun::SpecFunError;

pub use capacity::{
    ergodic_capacity_asymptotic, ergodic_capacity_exact, ergodic_capacity_quadrature,
    t_function, CapacityMethod, CapacityResult,
};
pub use diversity::{diversity_order, BindingTerm, DiversityReport};
pub use outage::{
    outage_asymptotic, outage_exact, outage_gg_nakagami_asymptotic, outage_quadrature,
    OutageMethod, OutageResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("T(theta={theta}, l={l}, order={order}) for mixture term k={k}: {source}")]
    TFunction {
        k: u32,
        theta: f64,
        l: u32,
        order: u32,
        source: SpecFunError,
    },
    #[error("{0} is not available in closed form; use the quadrature path")]
    NotImplemented(&'static str),
    #[error("truncated series left [0, 1]: value {value}, outer-shell magnitude {tail_estimate:e}")]
    TruncationFailure { value: f64, tail_estimate: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}
