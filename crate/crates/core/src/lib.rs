//! Dual-hop mixed FSO/RF relaying: channel models, performance metrics and
//! Monte Carlo checks.

pub mod channel;
pub mod mc;
pub mod metrics;
pub mod quad;
pub mod specfun;
pub mod sweep;
