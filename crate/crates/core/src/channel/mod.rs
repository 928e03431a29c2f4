//! Channel models for the two hops: Malaga-M turbulence with pointing errors (FSO)
//! and kappa-mu shadowed fading (RF).

mod fso;
mod rf;

use thiserror::Error;

use crate::quad::QuadError;
use crate::specfun::SpecFunError;

pub use fso::{electrical_snr, Detection, MalagaFsoLink, MalagaParams};
pub use rf::{KappaMuShadowedRfLink, RfParams, RfRegime, RfSeriesCoeffs};
pub(crate) use rf::lower_gamma_p;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("mixture weights do not match the closed form (gap {gap:e})")]
    WeightMismatch { gap: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

impl ChannelError {
    pub(crate) fn invalid(name: &'static str, reason: String) -> Self {
        Self::InvalidParameter { name, reason }
    }
}

/// Series truncation for the outage and capacity sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub q_max: u32,
    pub l_max: u32,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { q_max: 10, l_max: 5 }
    }
}

/// A complete dual-hop configuration: both links plus the outage threshold.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub fso: MalagaFsoLink,
    pub rf: KappaMuShadowedRfLink,
    /// Outage threshold, linear scale.
    pub gamma_th: f64,
    pub truncation: Truncation,
}

impl Scenario {
    pub fn new(
        fso: MalagaParams,
        rf: RfParams,
        gamma_th: f64,
        truncation: Truncation,
    ) -> Result<Self, ChannelError> {
        if !(gamma_th > 0.0 && gamma_th.is_finite()) {
            return Err(ChannelError::invalid(
                "gamma_th",
                format!("must be positive and finite, got {gamma_th}"),
            ));
        }
        Ok(Self {
            fso: MalagaFsoLink::new(fso)?,
            rf: KappaMuShadowedRfLink::new(rf)?,
            gamma_th,
            truncation,
        })
    }

    /// Same scenario with new average SNRs (linear) on both hops. The FSO value
    /// is the heterodyne-equivalent `gamma_bar_1`; quadrature settings carry over.
    pub fn with_snr(&self, fso_snr: f64, rf_snr: f64) -> Result<Self, ChannelError> {
        let mut fso = self.fso.params().clone();
        fso.avg_snr = fso_snr;
        let mut rf = self.rf.params().clone();
        rf.avg_snr = rf_snr;
        let mut next = Self::new(fso, rf, self.gamma_th, self.truncation)?;
        next.fso = next.fso.with_control(self.fso.control().clone());
        Ok(next)
    }
}

/// Decibels to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
