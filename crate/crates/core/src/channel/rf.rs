//! kappa-mu shadowed fading (RF hop) with integer mu and m.

use crate::specfun::{binomial, ln_gamma, ln_hyp1f1};

use super::ChannelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfRegime {
    MGeMu,
    MLtMu,
}

/// Coefficients of the finite-sum forms of the RF CMGF and CCDF.
#[derive(Clone, Debug, PartialEq)]
pub struct RfSeriesCoeffs {
    pub regime: RfRegime,
    /// `chi_l`, l = 1..m (m >= mu only).
    pub chi: Vec<f64>,
    /// `Delta_{1i}`, i = 1..mu-m (m < mu only).
    pub delta1: Vec<f64>,
    /// `Delta_{2i}`, i = 1..m (m < mu only).
    pub delta2: Vec<f64>,
    /// `Upsilon_i`, i = 0..m-mu (m >= mu only).
    pub upsilon: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RfParams {
    pub kappa: f64,
    pub mu: u32,
    pub m: u32,
    /// Average SNR, linear scale.
    pub avg_snr: f64,
}

impl RfParams {
    pub fn rician_shadowed(avg_snr: f64) -> Self {
        Self {
            kappa: 5.0,
            mu: 1,
            m: 2,
            avg_snr,
        }
    }

    /// Nakagami-m limit (`mu = m`, `kappa -> 0`).
    pub fn nakagami(m: u32, avg_snr: f64) -> Self {
        Self {
            kappa: 1e-8,
            mu: m,
            m,
            avg_snr,
        }
    }

    pub fn rayleigh(avg_snr: f64) -> Self {
        Self::nakagami(1, avg_snr)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(ChannelError::invalid(
                "kappa",
                format!("must be positive and finite, got {}", self.kappa),
            ));
        }
        if self.mu == 0 {
            return Err(ChannelError::invalid("mu", "must be an integer >= 1".into()));
        }
        if self.m == 0 {
            return Err(ChannelError::invalid("m", "must be an integer >= 1".into()));
        }
        if !(self.avg_snr > 0.0 && self.avg_snr.is_finite()) {
            return Err(ChannelError::invalid(
                "avg_snr",
                format!("must be positive and finite, got {}", self.avg_snr),
            ));
        }
        Ok(())
    }
}

/// Immutable RF hop with derived constants.
#[derive(Clone, Debug)]
pub struct KappaMuShadowedRfLink {
    params: RfParams,
    theta1: f64,
    theta2: f64,
    coeffs: RfSeriesCoeffs,
}

/// `Q(n, y) = e^{-y} sum_{j<n} y^j / j!` for integer `n >= 1`.
pub(crate) fn upper_gamma_q(n: u32, y: f64) -> f64 {
    if y < n as f64 {
        return 1.0 - lower_gamma_p(n, y);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..n {
        term *= y / j as f64;
        sum += term;
    }
    (-y).exp() * sum
}

/// `P(n, y) = e^{-y} sum_{j>=n} y^j / j!`, summed directly for small `y`.
pub(crate) fn lower_gamma_p(n: u32, y: f64) -> f64 {
    if y >= n as f64 {
        return 1.0 - upper_gamma_q(n, y);
    }
    let mut term = (n as f64 * y.ln() - y - ln_gamma(n as f64 + 1.0)).exp();
    let mut sum = term;
    let mut j = n;
    loop {
        j += 1;
        term *= y / j as f64;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    sum
}

impl KappaMuShadowedRfLink {
    pub fn new(params: RfParams) -> Result<Self, ChannelError> {
        params.validate()?;
        let RfParams {
            kappa,
            mu,
            m,
            avg_snr,
        } = params;
        let (muf, mf) = (mu as f64, m as f64);
        let theta1 = avg_snr / (muf * (1.0 + kappa));
        let theta2 = avg_snr * (muf * kappa + mf) / (muf * mf * (1.0 + kappa));
        let shadow = mf / (muf * kappa + mf);
        let los = muf * kappa / (muf * kappa + mf);

        let coeffs = if m >= mu {
            let d = m - mu;
            let chi = (1..=m)
                .map(|l| {
                    let own = binomial(m, l) * theta2.powi(l as i32);
                    if l <= d {
                        own - binomial(d, l) * theta1.powi(l as i32)
                    } else {
                        own
                    }
                })
                .collect();
            let upsilon = (0..=d)
                .map(|i| binomial(d, i) * shadow.powi(i as i32) * los.powi((d - i) as i32))
                .collect();
            RfSeriesCoeffs {
                regime: RfRegime::MGeMu,
                chi,
                delta1: vec![],
                delta2: vec![],
                upsilon,
            }
        } else {
            let d = mu - m;
            let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
            let delta1 = (1..=d)
                .map(|i| {
                    sign_m
                        * binomial(m + i - 2, i - 1)
                        * shadow.powi(m as i32)
                        * los.powi(-(m as i32) - i as i32 + 1)
                })
                .collect();
            let delta2 = (1..=m)
                .map(|i| {
                    let sign = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binomial(d + i - 2, i - 1)
                        * shadow.powi(i as i32 - 1)
                        * los.powi(m as i32 - mu as i32 - i as i32 + 1)
                })
                .collect();
            RfSeriesCoeffs {
                regime: RfRegime::MLtMu,
                chi: vec![],
                delta1,
                delta2,
                upsilon: vec![],
            }
        };
        Ok(Self {
            params,
            theta1,
            theta2,
            coeffs,
        })
    }

    pub fn params(&self) -> &RfParams {
        &self.params
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn series_coeffs(&self) -> &RfSeriesCoeffs {
        &self.coeffs
    }

    pub fn mu(&self) -> u32 {
        self.params.mu
    }

    pub fn m(&self) -> u32 {
        self.params.m
    }

    /// SNR density with the confluent hypergeometric factor summed as a power series.
    pub fn snr_pdf(&self, x: f64) -> Result<f64, ChannelError> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(ChannelError::invalid("x", format!("must be positive, got {x}")));
        }
        let RfParams {
            kappa,
            mu,
            m,
            avg_snr,
        } = self.params;
        let (muf, mf) = (mu as f64, m as f64);
        let t = x / avg_snr;
        let ln_pre = muf * muf.ln() + mf * mf.ln() + muf * (1.0 + kappa).ln()
            - ln_gamma(muf)
            - avg_snr.ln()
            - mf * (muf * kappa + mf).ln()
            + (muf - 1.0) * t.ln()
            - muf * (1.0 + kappa) * t;
        let arg = muf * muf * kappa * (1.0 + kappa) / (muf * kappa + mf) * t;
        match ln_hyp1f1(mf, muf, arg) {
            Ok(ln_f) => Ok((ln_pre + ln_f).exp()),
            // far tail: the Erlang mixture has no cancellation problem there
            Err(_) => Ok(self.snr_pdf_mixture(x)),
        }
    }

    /// Density as the derivative of the Erlang-mixture CCDF.
    fn snr_pdf_mixture(&self, x: f64) -> f64 {
        let erlang = |n: u32, theta: f64| {
            let y = x / theta;
            ((n as f64 - 1.0) * y.ln() - y - ln_gamma(n as f64)).exp() / theta
        };
        let (mu, m) = (self.params.mu, self.params.m);
        let c = &self.coeffs;
        match c.regime {
            RfRegime::MGeMu => c
                .upsilon
                .iter()
                .enumerate()
                .map(|(i, u)| u * erlang(m - i as u32, self.theta2))
                .sum(),
            RfRegime::MLtMu => {
                let d = mu - m;
                let a: f64 = c
                    .delta1
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * erlang(d - i as u32, self.theta1))
                    .sum();
                let b: f64 = c
                    .delta2
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * erlang(m - i as u32, self.theta2))
                    .sum();
                a + b
            }
        }
    }

    /// `E[e^{-s gamma_2}] = (1 + theta1 s)^{m-mu} / (1 + theta2 s)^m`.
    pub fn mgf(&self, s: f64) -> f64 {
        let (mu, m) = (self.params.mu as i32, self.params.m as i32);
        (1.0 + self.theta1 * s).powi(m - mu) / (1.0 + self.theta2 * s).powi(m)
    }

    /// CMGF from the rational MGF, `(1 - M(s)) / s`, with `1 - M` formed
    /// through `expm1` so small `s` keeps full precision.
    pub fn cmgf_rational(&self, s: f64) -> f64 {
        let (mu, m) = (self.params.mu as f64, self.params.m as f64);
        let ln_m = (m - mu) * (self.theta1 * s).ln_1p() - m * (self.theta2 * s).ln_1p();
        -ln_m.exp_m1() / s
    }

    /// CMGF from the regime's finite-sum representation.
    pub fn cmgf(&self, s: f64) -> f64 {
        let (mu, m) = (self.params.mu, self.params.m);
        let (t1, t2) = (self.theta1, self.theta2);
        match self.coeffs.regime {
            RfRegime::MGeMu => {
                let base = (1.0 + t2 * s).powi(-(m as i32));
                self.coeffs
                    .chi
                    .iter()
                    .enumerate()
                    .map(|(i, chi)| chi * s.powi(i as i32))
                    .sum::<f64>()
                    * base
            }
            RfRegime::MLtMu => {
                let d = mu - m;
                let mix = self.partial_fraction_mgf(s);
                let mut acc = 0.0;
                for p in 0..=m {
                    for q in 0..=d {
                        if p + q == 0 {
                            continue;
                        }
                        acc += binomial(m, p)
                            * binomial(d, q)
                            * t2.powi(p as i32)
                            * t1.powi(q as i32)
                            * s.powi((p + q) as i32 - 1);
                    }
                }
                acc * mix
            }
        }
    }

    /// `M(s)` assembled from the partial fractions (m < mu).
    fn partial_fraction_mgf(&self, s: f64) -> f64 {
        let (mu, m) = (self.params.mu, self.params.m);
        let d = mu - m;
        let a: f64 = self
            .coeffs
            .delta1
            .iter()
            .enumerate()
            .map(|(i, c)| c * (1.0 + self.theta1 * s).powi(-((d - i as u32) as i32)))
            .sum();
        let b: f64 = self
            .coeffs
            .delta2
            .iter()
            .enumerate()
            .map(|(i, c)| c * (1.0 + self.theta2 * s).powi(-((m - i as u32) as i32)))
            .sum();
        a + b
    }

    /// `P[gamma_2 > x]` as a finite mixture of Erlang tails.
    pub fn snr_ccdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let (mu, m) = (self.params.mu, self.params.m);
        let v = match self.coeffs.regime {
            RfRegime::MGeMu => self
                .coeffs
                .upsilon
                .iter()
                .enumerate()
                .map(|(i, u)| u * upper_gamma_q(m - i as u32, x / self.theta2))
                .sum(),
            RfRegime::MLtMu => {
                let d = mu - m;
                let a: f64 = self
                    .coeffs
                    .delta1
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * upper_gamma_q(d - i as u32, x / self.theta1))
                    .sum();
                let b: f64 = self
                    .coeffs
                    .delta2
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * upper_gamma_q(m - i as u32, x / self.theta2))
                    .sum();
                a + b
            }
        };
        v.clamp(0.0, 1.0)
    }

    /// `P[gamma_2 <= x]`, summed from the lower tails to keep small values accurate.
    pub fn snr_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let (mu, m) = (self.params.mu, self.params.m);
        let v = match self.coeffs.regime {
            RfRegime::MGeMu => self
                .coeffs
                .upsilon
                .iter()
                .enumerate()
                .map(|(i, u)| u * lower_gamma_p(m - i as u32, x / self.theta2))
                .sum(),
            RfRegime::MLtMu => {
                let d = mu - m;
                let a: f64 = self
                    .coeffs
                    .delta1
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * lower_gamma_p(d - i as u32, x / self.theta1))
                    .sum();
                let b: f64 = self
                    .coeffs
                    .delta2
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * lower_gamma_p(m - i as u32, x / self.theta2))
                    .sum();
                a + b
            }
        };
        v.clamp(0.0, 1.0)
    }
}
