use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::LN_2;

use crate::channel::{MalagaFsoLink, RfRegime, Scenario};
use crate::quad::{integrate, QuadConfig};
use crate::specfun::{
    binomial, gamma, BivariateEstimate, BivariateFoxHSpec, FoxHSpec, JointParam,
    QuadratureControl, SpecFunError,
};

use super::MetricError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CapacityMethod {
    ExactClosedForm,
    Quadrature,
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityResult {
    /// Bits per channel use, half-duplex pre-log included.
    pub value: f64,
    pub method: CapacityMethod,
    pub est_error: f64,
}

/// Contour settings for the bivariate evaluations.
fn bivariate_control() -> QuadratureControl {
    QuadratureControl::with_tol(1e-7)
}

/// `T(theta, l, order) = ∫_0^∞ s^l e^{-s} H_FSO,k[mu_r s / B^r] H^{1,1}_{1,1}[theta s | (1-order,1); (0,1)] ds`
/// as a bivariate Fox-H value at `(mu_r / B^r, theta)`.
pub fn t_function(
    fso: &MalagaFsoLink,
    k: f64,
    theta: f64,
    l: u32,
    order: u32,
    ctl: &QuadratureControl,
) -> Result<BivariateEstimate, SpecFunError> {
    let first = fso
        .cmgf_block(k)
        .map_err(|e| SpecFunError::InvalidSpec(e.to_string()))?;
    let second = FoxHSpec::new(vec![(1.0 - order as f64, 1.0)], vec![(0.0, 1.0)], 1, 1)?;
    let spec = BivariateFoxHSpec::new(
        vec![JointParam::new(-(l as f64), 1.0, 1.0)],
        1,
        vec![],
        first,
        second,
    )?;
    spec.eval_detailed(1.0 / fso.snr_scale(), theta, ctl)
}

/// Memoized `T` values for one scenario; keys are `(k, which theta, l, order)`.
struct TCache<'a> {
    sc: &'a Scenario,
    ctl: QuadratureControl,
    values: HashMap<(u32, u8, u32, u32), BivariateEstimate>,
}

impl<'a> TCache<'a> {
    fn new(sc: &'a Scenario) -> Self {
        Self {
            sc,
            ctl: bivariate_control(),
            values: HashMap::new(),
        }
    }

    fn get(&mut self, k: u32, second: bool, l: u32, order: u32) -> Result<BivariateEstimate, MetricError> {
        let key = (k, second as u8, l, order);
        if let Some(v) = self.values.get(&key) {
            return Ok(*v);
        }
        let theta = if second {
            self.sc.rf.theta2()
        } else {
            self.sc.rf.theta1()
        };
        let est = t_function(&self.sc.fso, k as f64, theta, l, order, &self.ctl).map_err(|source| {
            MetricError::TFunction {
                k,
                theta,
                l,
                order,
                source,
            }
        })?;
        self.values.insert(key, est);
        Ok(est)
    }
}

/// Closed-form capacity through the bivariate Fox-H function, dispatched on
/// the sign of `m - mu`.
pub fn ergodic_capacity_exact(sc: &Scenario) -> Result<CapacityResult, MetricError> {
    let fso = &sc.fso;
    let rf = &sc.rf;
    let (mu, m) = (rf.mu(), rf.m());
    let coeffs = rf.series_coeffs();
    let pre = fso.cmgf_prefactor() / (2.0 * LN_2);
    let mut cache = TCache::new(sc);
    let mut value = 0.0;
    let mut abs_err = 0.0;
    // the m < mu partial fractions cancel heavily for small kappa
    let mut magnitude = 0.0;
    let mut add = |scale: f64, est: BivariateEstimate| {
        value += scale * est.value;
        abs_err += (scale * est.value).abs() * est.rel_error;
        magnitude += (scale * est.value).abs();
    };
    for (k, w) in fso.mixture() {
        let kk = k as u32;
        let wk = pre * w / gamma(k);
        match coeffs.regime {
            RfRegime::MGeMu => {
                for (idx, chi) in coeffs.chi.iter().enumerate() {
                    let l = idx as u32 + 1;
                    add(wk * chi / gamma(m as f64), cache.get(kk, true, l, m)?);
                }
            }
            RfRegime::MLtMu => {
                let d = mu - m;
                for p in 0..=m {
                    for q in 0..=d {
                        if p + q == 0 {
                            continue;
                        }
                        let c = wk
                            * binomial(m, p)
                            * binomial(d, q)
                            * rf.theta2().powi(p as i32)
                            * rf.theta1().powi(q as i32);
                        for (idx, delta) in coeffs.delta1.iter().enumerate() {
                            let order = d - idx as u32;
                            add(c * delta / gamma(order as f64), cache.get(kk, false, p + q, order)?);
                        }
                        for (idx, delta) in coeffs.delta2.iter().enumerate() {
                            let order = m - idx as u32;
                            add(c * delta / gamma(order as f64), cache.get(kk, true, p + q, order)?);
                        }
                    }
                }
            }
        }
    }
    Ok(CapacityResult {
        value,
        method: CapacityMethod::ExactClosedForm,
        est_error: abs_err + f64::EPSILON * magnitude,
    })
}

/// Integrate a fallible integrand, surfacing the first inner error instead of
/// a non-finite-value report.
pub(crate) fn integrate_fallible<F>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<crate::quad::QuadResult, MetricError>
where
    F: Fn(f64) -> Result<f64, MetricError>,
{
    let failure = RefCell::new(None);
    let out = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        cfg,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(out?)
}

/// `(1 / 2 ln 2) ∫_0^∞ s e^{-s} M^c_1(s) M^c_2(s) ds`, integrated in `ln s`.
pub fn ergodic_capacity_quadrature(sc: &Scenario) -> Result<CapacityResult, MetricError> {
    let cfg = QuadConfig::rel(1e-9);
    let res = integrate_fallible(
        |x| {
            let s = x.exp();
            let rf = sc.rf.cmgf_rational(s);
            let fso = sc.fso.cmgf(s)?;
            Ok(s * s * (-s).exp() * fso * rf)
        },
        (1e-13f64).ln(),
        (750.0f64).ln(),
        &cfg,
    )?;
    Ok(CapacityResult {
        value: res.value / (2.0 * LN_2),
        method: CapacityMethod::Quadrature,
        est_error: res.abs_error / (2.0 * LN_2),
    })
}

/// High-`gamma_bar_2` capacity from the residues at `{-m, -1-l}`; only the
/// `m >= mu` branch exists in closed form.
pub fn ergodic_capacity_asymptotic(sc: &Scenario) -> Result<CapacityResult, MetricError> {
    let fso = &sc.fso;
    let rf = &sc.rf;
    let coeffs = rf.series_coeffs();
    if coeffs.regime == RfRegime::MLtMu {
        return Err(MetricError::NotImplemented("asymptotic capacity for m < mu"));
    }
    let m = rf.m() as f64;
    let theta2 = rf.theta2();
    let x = 1.0 / fso.snr_scale();
    let ctl = fso.control().clone();
    let pre = fso.cmgf_prefactor() / (2.0 * LN_2);
    let mut value = 0.0;
    let mut abs_err = 0.0;
    for (k, w) in fso.mixture() {
        let block = fso.cmgf_block(k)?;
        for (idx, chi) in coeffs.chi.iter().enumerate() {
            let l = (idx + 1) as f64;
            let mut upper = vec![(-l, 1.0)];
            upper.extend_from_slice(block.upper());
            let mut lower = vec![(m - 1.0 - l, 1.0)];
            lower.extend_from_slice(block.lower());
            let first = FoxHSpec::new(upper, lower, 5, 2)?.eval_in_strip(x / theta2, 0.0, 1.0, &ctl)?;

            let mut upper = vec![(m - l, 1.0)];
            upper.extend_from_slice(block.upper());
            let second = FoxHSpec::new(upper, block.lower().to_vec(), 5, 1)?
                .eval_in_strip(x, 0.0, 1.0, &ctl)?;

            let c = pre * w * chi / gamma(k);
            let a = c * first.value / (theta2.powf(1.0 + l) * gamma(m));
            let b = c * second.value * theta2.powf(-m);
            value += a + b;
            abs_err += a.abs() * first.rel_error + b.abs() * second.rel_error;
        }
    }
    Ok(CapacityResult {
        value,
        method: CapacityMethod::Asymptotic,
        est_error: abs_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Detection, MalagaParams, RfParams, Truncation};

    fn scenario(alpha: f64, beta: u32, fso_snr: f64) -> Scenario {
        let fso = MalagaParams::malaga(alpha, beta, 6.7, Detection::Heterodyne, fso_snr);
        Scenario::new(fso, RfParams::rician_shadowed(10.0), 1.0, Truncation::default()).unwrap()
    }

    #[test]
    fn t_function_matches_direct_integral() {
        let cases = [
            (4.2, 3, 10.0, [
                (1, 1, 0.005_304_244_222_376_91),
                (1, 2, 0.001_838_233_816_632_75),
                (2, 1, 0.007_602_662_161_760_49),
                (2, 2, 0.002_317_292_665_893_99),
                (3, 1, 0.017_723_294_399_223_8),
                (3, 2, 0.004_995_548_002_270_14),
            ]
            .to_vec()),
            (2.29, 2, 100.0, [
                (1, 1, 7.359_072_266_787_76e-5),
                (1, 2, 1.842_709_765_348_57e-5),
                (2, 1, 8.533_476_522_829_55e-5),
                (2, 2, 1.958_515_408_094_07e-5),
            ]
            .to_vec()),
        ];
        let ctl = QuadratureControl::with_tol(1e-8);
        for (alpha, beta, snr, refs) in cases {
            let sc = scenario(alpha, beta, snr);
            for (k, l, want) in refs {
                let got = t_function(&sc.fso, k as f64, sc.rf.theta2(), l, 2, &ctl).unwrap();
                assert!((got.value / want - 1.0).abs() < 1e-6, "k={k} l={l}: {}", got.value);
            }
        }
    }

    #[test]
    fn exact_and_quadrature_agree() {
        let sc = scenario(4.2, 3, 10.0);
        let exact = ergodic_capacity_exact(&sc).unwrap();
        let quad = ergodic_capacity_quadrature(&sc).unwrap();
        assert!((exact.value / quad.value - 1.0).abs() < 1e-5, "{exact:?} {quad:?}");
    }

    #[test]
    fn asymptotic_rejects_m_below_mu() {
        let fso = MalagaParams::malaga(4.2, 3, 6.7, Detection::Heterodyne, 10.0);
        let rf = RfParams { kappa: 2.0, mu: 3, m: 1, avg_snr: 10.0 };
        let sc = Scenario::new(fso, rf, 1.0, Truncation::default()).unwrap();
        assert!(matches!(
            ergodic_capacity_asymptotic(&sc),
            Err(MetricError::NotImplemented(_))
        ));
    }
}
