//! Malaga-M turbulence with zero-boresight pointing errors (FSO hop).

use crate::specfun::{binomial, gamma, ln_binomial, ln_gamma, FoxHSpec, QuadratureControl};

use super::ChannelError;

/// Detection technique at the relay; `r` is the SNR-irradiance power law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Detection {
    Heterodyne,
    ImDd,
}

impl Detection {
    pub fn r(self) -> u32 {
        match self {
            Detection::Heterodyne => 1,
            Detection::ImDd => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Detection::Heterodyne => "heterodyne",
            Detection::ImDd => "imdd",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MalagaParams {
    pub alpha: f64,
    pub beta: u32,
    pub g: f64,
    pub omega: f64,
    pub xi: f64,
    pub a0: f64,
    pub detection: Detection,
    /// Average electrical SNR of the heterodyne reference, linear scale.
    pub avg_snr: f64,
}

impl MalagaParams {
    /// Malaga link with `g = Omega = 0.5`, `A0 = 1` and the given turbulence pair.
    pub fn malaga(alpha: f64, beta: u32, xi: f64, detection: Detection, avg_snr: f64) -> Self {
        Self {
            alpha,
            beta,
            g: 0.5,
            omega: 0.5,
            xi,
            a0: 1.0,
            detection,
            avg_snr,
        }
    }

    pub fn strong_turbulence(xi: f64, detection: Detection, avg_snr: f64) -> Self {
        Self::malaga(2.29, 2, xi, detection, avg_snr)
    }

    pub fn moderate_turbulence(xi: f64, detection: Detection, avg_snr: f64) -> Self {
        Self::malaga(4.2, 3, xi, detection, avg_snr)
    }

    /// Gamma-Gamma limit. `g` is kept at 1e-6 because `A` is singular at `g = 0`.
    pub fn gamma_gamma(alpha: f64, beta: u32, xi: f64, detection: Detection, avg_snr: f64) -> Self {
        Self {
            g: 1e-6,
            omega: 1.0,
            ..Self::malaga(alpha, beta, xi, detection, avg_snr)
        }
    }

    /// K-distribution limit (`Omega = 0`): only the `k = 1` term survives.
    pub fn k_distribution(alpha: f64, xi: f64, detection: Detection, avg_snr: f64) -> Self {
        Self {
            g: 1.0,
            omega: 0.0,
            ..Self::malaga(alpha, 1, xi, detection, avg_snr)
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ChannelError::invalid(name, format!("must be positive and finite, got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("xi", self.xi)?;
        positive("a0", self.a0)?;
        positive("avg_snr", self.avg_snr)?;
        if self.beta == 0 {
            return Err(ChannelError::invalid("beta", "must be an integer >= 1".into()));
        }
        for (name, v) in [("g", self.g), ("omega", self.omega)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ChannelError::invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        if !(self.g + self.omega > 0.0) {
            return Err(ChannelError::invalid("g + omega", "must be positive".into()));
        }
        Ok(())
    }
}

/// `mu_r`: electrical SNR entering `gamma_1 = mu_r (I / E[I])^r`.
pub fn electrical_snr(p: &MalagaParams) -> Result<f64, ChannelError> {
    match p.detection {
        Detection::Heterodyne => Ok(p.avg_snr),
        Detection::ImDd => {
            let (g, om) = (p.g, p.omega);
            let xi2 = p.xi * p.xi;
            let den = (p.alpha + 1.0) * (2.0 * g * (g + 2.0 * om) + om * om * (1.0 + 1.0 / p.beta as f64));
            if den == 0.0 {
                return Err(ChannelError::DivisionByZero("IM/DD electrical SNR needs g + omega > 0"));
            }
            Ok(p.avg_snr * p.alpha * xi2 * (xi2 + 2.0) * (g + om) / ((xi2 + 1.0).powi(2) * den))
        }
    }
}

/// Immutable FSO hop with derived constants.
#[derive(Clone, Debug)]
pub struct MalagaFsoLink {
    params: MalagaParams,
    /// `A * b_k`, k = 1..beta. These are binomial mixture weights.
    weights: Vec<f64>,
    ln_a: f64,
    ln_b: Vec<f64>,
    h: f64,
    big_b: f64,
    mu_r: f64,
    ctl: QuadratureControl,
}

impl MalagaFsoLink {
    pub fn new(params: MalagaParams) -> Result<Self, ChannelError> {
        params.validate()?;
        let MalagaParams {
            alpha,
            beta,
            g,
            omega,
            xi,
            ..
        } = params;
        let bf = beta as f64;
        let s = g * bf + omega;

        // Closed-form constants, in logs so the Gamma-Gamma limit g -> 0 stays finite.
        let ln_a = 0.5 * alpha * alpha.ln() + (bf + 0.5 * alpha) * (g * bf / s).ln()
            - (1.0 + 0.5 * alpha) * g.ln();
        let ln_b: Vec<f64> = (1..=beta)
            .map(|k| {
                let kf = k as f64;
                let ratio_term = if k == 1 { 0.0 } else { (kf - 1.0) * (omega / g).ln() };
                ln_binomial(beta - 1, k - 1)
                    + (1.0 - 0.5 * kf) * s.ln()
                    + 0.5 * (alpha + kf) * (s / (alpha * bf)).ln()
                    + ratio_term
                    + 0.5 * kf * (alpha / bf).ln()
            })
            .collect();

        // Same products as binomial weights with p = g beta / (g beta + Omega).
        let p = g * bf / s;
        let weights: Vec<f64> = (1..=beta)
            .map(|k| {
                binomial(beta - 1, k - 1)
                    * p.powi((beta - k) as i32)
                    * (1.0 - p).powi((k - 1) as i32)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut gap = (total - 1.0).abs();
        for (w, lb) in weights.iter().zip(&ln_b) {
            let direct = (ln_a + lb).exp();
            if direct.is_finite() {
                gap = gap.max((direct - w).abs());
            }
        }
        if gap > 1e-10 {
            return Err(ChannelError::WeightMismatch { gap });
        }

        let xi2 = xi * xi;
        let h = xi2 / (xi2 + 1.0);
        let big_b = alpha * bf * h * (g + omega) / s;
        let mu_r = electrical_snr(&params)?;
        Ok(Self {
            params,
            weights,
            ln_a,
            ln_b,
            h,
            big_b,
            mu_r,
            ctl: QuadratureControl::with_tol(1e-10),
        })
    }

    /// Replace the contour-quadrature settings used by every evaluation.
    pub fn with_control(mut self, ctl: QuadratureControl) -> Self {
        self.ctl = ctl;
        self
    }

    pub fn params(&self) -> &MalagaParams {
        &self.params
    }

    pub fn control(&self) -> &QuadratureControl {
        &self.ctl
    }

    pub fn r(&self) -> u32 {
        self.params.detection.r()
    }

    /// Mixture weights `A b_k`, k = 1..beta; they sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `A` as printed; may be huge or tiny near the Gamma-Gamma limit.
    pub fn a_const(&self) -> f64 {
        self.ln_a.exp()
    }

    pub fn b_k(&self) -> Vec<f64> {
        self.ln_b.iter().map(|l| l.exp()).collect()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn big_b(&self) -> f64 {
        self.big_b
    }

    pub fn mu_r(&self) -> f64 {
        self.mu_r
    }

    pub fn xi_sq(&self) -> f64 {
        self.params.xi * self.params.xi
    }

    /// `alpha beta / (g beta + Omega)`, the inverse scale of the turbulence part.
    pub fn turbulence_rate(&self) -> f64 {
        let p = &self.params;
        p.alpha * p.beta as f64 / (p.g * p.beta as f64 + p.omega)
    }

    /// `E[I] = A0 h (g + Omega)`.
    pub fn mean_irradiance(&self) -> f64 {
        self.params.a0 * self.h * (self.params.g + self.params.omega)
    }

    /// `E[I^n]` for real `n > -min(xi^2, alpha, 1)`.
    pub fn irradiance_moment(&self, n: f64) -> f64 {
        let p = &self.params;
        let xi2 = self.xi_sq();
        let pointing = p.a0.powf(n) * xi2 / (xi2 + n);
        let turbulence: f64 = self
            .terms()
            .map(|(k, w)| {
                w * (ln_gamma(p.alpha + n) - ln_gamma(p.alpha) + ln_gamma(k + n) - ln_gamma(k)).exp()
            })
            .sum::<f64>()
            / self.turbulence_rate().powf(n);
        pointing * turbulence
    }

    /// `E[gamma_1] = mu_r E[I^r] / E[I]^r`.
    pub fn snr_mean(&self) -> f64 {
        let r = self.r() as f64;
        self.mu_r * self.irradiance_moment(r) / self.mean_irradiance().powf(r)
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, &w)| ((i + 1) as f64, w))
    }

    fn check_positive(x: f64, what: &'static str) -> Result<(), ChannelError> {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(ChannelError::invalid(what, format!("must be positive and finite, got {x}")))
        }
    }

    /// Irradiance density `f_I(x)`.
    pub fn irradiance_pdf(&self, x: f64) -> Result<f64, ChannelError> {
        Self::check_positive(x, "x")?;
        let p = &self.params;
        let xi2 = self.xi_sq();
        let z = self.turbulence_rate() * x / p.a0;
        let mut acc = 0.0;
        for (k, w) in self.terms() {
            let spec = FoxHSpec::meijer(3, 0, &[xi2 + 1.0], &[xi2, p.alpha, k])?;
            acc += w / gamma(k) * spec.eval(z, &self.ctl)?;
        }
        Ok(xi2 / (x * gamma(p.alpha)) * acc)
    }

    /// `P[I > y]`.
    pub fn irradiance_ccdf(&self, y: f64) -> Result<f64, ChannelError> {
        Self::check_positive(y, "y")?;
        self.ccdf_at(self.turbulence_rate() * y / self.params.a0)
    }

    fn ccdf_at(&self, z: f64) -> Result<f64, ChannelError> {
        let p = &self.params;
        let xi2 = self.xi_sq();
        let mut acc = 0.0;
        for (k, w) in self.terms() {
            let spec = FoxHSpec::meijer(4, 0, &[xi2 + 1.0, 1.0], &[0.0, xi2, p.alpha, k])?;
            acc += w / gamma(k) * spec.eval(z, &self.ctl)?;
        }
        Ok(xi2 / gamma(p.alpha) * acc)
    }

    fn cdf_at(&self, z: f64) -> Result<f64, ChannelError> {
        let p = &self.params;
        let xi2 = self.xi_sq();
        let mut acc = 0.0;
        for (k, w) in self.terms() {
            let spec = FoxHSpec::meijer(3, 1, &[1.0, xi2 + 1.0], &[xi2, p.alpha, k, 0.0])?;
            acc += w / gamma(k) * spec.eval(z, &self.ctl)?;
        }
        Ok(xi2 / gamma(p.alpha) * acc)
    }

    /// Argument `B (x / mu_r)^{1/r}` shared by the SNR distribution functions.
    fn snr_argument(&self, x: f64) -> f64 {
        self.big_b * (x / self.mu_r).powf(1.0 / self.r() as f64)
    }

    /// `P[gamma_1 > x]`.
    pub fn snr_ccdf(&self, x: f64) -> Result<f64, ChannelError> {
        Self::check_positive(x, "x")?;
        self.ccdf_at(self.snr_argument(x))
    }

    /// `P[gamma_1 <= x]`, computed directly so small probabilities keep their
    /// relative accuracy.
    pub fn snr_cdf(&self, x: f64) -> Result<f64, ChannelError> {
        Self::check_positive(x, "x")?;
        self.cdf_at(self.snr_argument(x))
    }

    /// The H^{3,0}_{1,3} block of the SNR density for mixture index `k`.
    pub(crate) fn snr_pdf_block(&self, k: f64) -> Result<FoxHSpec, ChannelError> {
        let r = self.r() as f64;
        let xi2 = self.xi_sq();
        Ok(FoxHSpec::new(
            vec![(xi2 + 1.0 - r, r)],
            vec![(xi2 - r, r), (self.params.alpha - r, r), (k - r, r)],
            0,
            3,
        )?)
    }

    /// Mixture terms `(k, A b_k)` with non-zero weight.
    pub(crate) fn mixture(&self) -> Vec<(f64, f64)> {
        self.terms().collect()
    }

    /// `B^r / mu_r`, the scale of the SNR density argument.
    pub(crate) fn snr_scale(&self) -> f64 {
        self.big_b.powi(self.r() as i32) / self.mu_r
    }

    /// SNR density `f_{gamma_1}(x)`.
    pub fn snr_pdf(&self, x: f64) -> Result<f64, ChannelError> {
        Self::check_positive(x, "x")?;
        let scale = self.snr_scale();
        let mut acc = 0.0;
        for (k, w) in self.terms() {
            acc += w / gamma(k) * self.snr_pdf_block(k)?.eval(scale * x, &self.ctl)?;
        }
        Ok(self.xi_sq() * scale / gamma(self.params.alpha) * acc)
    }

    /// The H^{1,4}_{4,3} block of the CMGF for mixture index `k`.
    pub(crate) fn cmgf_block(&self, k: f64) -> Result<FoxHSpec, ChannelError> {
        let r = self.r() as f64;
        let xi2 = self.xi_sq();
        let a = self.params.alpha;
        Ok(FoxHSpec::new(
            vec![(1.0 - r, r), (1.0 - xi2 - r, r), (1.0 - a - r, r), (1.0 - k - r, r)],
            vec![(0.0, 1.0), (-xi2 - r, r), (-r, r)],
            4,
            1,
        )?)
    }

    /// `xi^2 r mu_r / (Gamma(alpha) B^r)`, the CMGF prefactor without weights.
    pub(crate) fn cmgf_prefactor(&self) -> f64 {
        self.xi_sq() * self.r() as f64 / (gamma(self.params.alpha) * self.snr_scale())
    }

    /// `integral_0^inf e^{-s x} P[gamma_1 > x] dx`.
    pub fn cmgf(&self, s: f64) -> Result<f64, ChannelError> {
        Self::check_positive(s, "s")?;
        let z = s / self.snr_scale();
        let mut acc = 0.0;
        for (k, w) in self.terms() {
            acc += w / gamma(k) * self.cmgf_block(k)?.eval(z, &self.ctl)?;
        }
        Ok(self.cmgf_prefactor() * acc)
    }
}
