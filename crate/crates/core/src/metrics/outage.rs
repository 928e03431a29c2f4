use std::collections::HashMap;

use log::warn;

use crate::channel::{lower_gamma_p, RfRegime, Scenario};
use crate::quad::QuadConfig;
use crate::specfun::{binomial, factorial, gamma, FoxHSpec, SpecFunError};

use super::capacity::integrate_fallible;
use super::MetricError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutageMethod {
    ExactSeries,
    Asymptotic,
    SpecialCaseGg,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageResult {
    pub value: f64,
    pub method: OutageMethod,
    /// `(q_max, l_max)` actually summed; `(0, 0)` for paths without a series.
    pub truncation_used: (u32, u32),
    /// Magnitude of the outermost `(q, l)` shell of the series.
    pub tail_estimate: f64,
    /// Set when `tail_estimate > 1e-3 * value`.
    pub truncation_warning: bool,
    /// Set when a closed form was unavailable and another path stood in.
    pub fallback: bool,
}

impl OutageResult {
    fn plain(value: f64, method: OutageMethod) -> Self {
        Self {
            value,
            method,
            truncation_used: (0, 0),
            tail_estimate: 0.0,
            truncation_warning: false,
            fallback: false,
        }
    }
}

fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (a + i as f64))
}

/// One exponential branch of the RF CCDF: `e^{-x/theta} sum_items c sum_{j<=jmax} (x/theta)^j / j!`.
struct Branch {
    theta: f64,
    /// `(coefficient, largest j)`.
    items: Vec<(f64, u32)>,
}

fn rf_branches(sc: &Scenario) -> Vec<Branch> {
    let rf = &sc.rf;
    let c = rf.series_coeffs();
    let (mu, m) = (rf.mu(), rf.m());
    match c.regime {
        RfRegime::MGeMu => vec![Branch {
            theta: rf.theta2(),
            items: c
                .upsilon
                .iter()
                .enumerate()
                .map(|(i, u)| (*u, m - i as u32 - 1))
                .collect(),
        }],
        RfRegime::MLtMu => {
            let d = mu - m;
            vec![
                Branch {
                    theta: rf.theta1(),
                    items: c
                        .delta1
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (*v, d - i as u32 - 1))
                        .collect(),
                },
                Branch {
                    theta: rf.theta2(),
                    items: c
                        .delta2
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (*v, m - i as u32 - 1))
                        .collect(),
                },
            ]
        }
    }
}

/// `H^{4,0}_{2,4}[z | (xi^2+1-r, r), (L, 1); (L-1, 1), (xi^2-r, r), (alpha-r, r), (k-r, r)]`.
fn outage_block(sc: &Scenario, k: f64, big_l: u32) -> Result<FoxHSpec, SpecFunError> {
    let r = sc.fso.r() as f64;
    let xi2 = sc.fso.xi_sq();
    let alpha = sc.fso.params().alpha;
    let l = big_l as f64;
    FoxHSpec::new(
        vec![(xi2 + 1.0 - r, r), (l, 1.0)],
        vec![(l - 1.0, 1.0), (xi2 - r, r), (alpha - r, r), (k - r, r)],
        0,
        4,
    )
}

/// Leftmost edge of the strip between the `s = 1` pole of the `L = 0` block and
/// the turbulence/pointing poles.
fn reduced_strip_floor(sc: &Scenario, k: f64) -> f64 {
    let r = sc.fso.r() as f64;
    let alpha = sc.fso.params().alpha;
    [sc.fso.xi_sq(), alpha, k]
        .iter()
        .map(|b| 1.0 - b / r)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Truncated double series in `(q, l)`. The constant `s = 1` residue of the
/// `L = 0` block is summed analytically into the RF CDF, so no `1 - (...)`
/// cancellation occurs at small outage values.
pub fn outage_exact(sc: &Scenario) -> Result<OutageResult, MetricError> {
    let gth = sc.gamma_th;
    let (q_max, l_max) = (sc.truncation.q_max, sc.truncation.l_max);
    let fso = &sc.fso;
    let z = fso.snr_scale() * gth;
    let ctl = fso.control().clone();
    let branches = rf_branches(sc);
    let j_top = branches
        .iter()
        .flat_map(|b| b.items.iter().map(|(_, j)| *j))
        .max()
        .unwrap_or(0);
    let l_top = j_top + q_max + l_max;
    let pre = fso.xi_sq() * z / gamma(fso.params().alpha);

    let mut rest = 0.0;
    let mut tail = 0.0;
    for (k, w) in fso.mixture() {
        let mut blocks: HashMap<u32, f64> = HashMap::new();
        for big_l in 0..=l_top {
            let spec = outage_block(sc, k, big_l)?;
            let value = if big_l == 0 {
                spec.eval_in_strip(z, reduced_strip_floor(sc, k), 1.0, &ctl)?.value
            } else {
                spec.eval(z, &ctl)?
            };
            blocks.insert(big_l, value);
        }
        let wk = pre * w / gamma(k);
        for br in &branches {
            let x = br.theta;
            let damp = (-gth / x).exp();
            for &(coef, j_max) in &br.items {
                for j in 0..=j_max {
                    let outer = wk * damp * coef / (x.powi(j as i32) * factorial(j));
                    for p in 0..=j {
                        let pj = binomial(j, p) * gth.powi((j - p) as i32) * (gth + 1.0).powi(p as i32);
                        for q in 0..=q_max {
                            let pq = pj * (-(gth + 1.0) / x).powi(q as i32) / factorial(q);
                            for l in 0..=l_max {
                                let term = outer * pq * pochhammer((p + q) as f64, l) / factorial(l)
                                    * blocks[&(l + p + q)];
                                rest += term;
                                if q == q_max || l == l_max {
                                    tail += term.abs();
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let value = sc.rf.snr_cdf(gth) - rest;
    if !(0.0..=1.0).contains(&value) || !value.is_finite() {
        return Err(MetricError::TruncationFailure {
            value,
            tail_estimate: tail,
        });
    }
    let truncation_warning = tail > 1e-3 * value;
    if truncation_warning {
        warn!("outage series tail {tail:e} exceeds 1e-3 of value {value:e} at gamma_th={gth}");
    }
    Ok(OutageResult {
        value,
        method: OutageMethod::ExactSeries,
        truncation_used: (q_max, l_max),
        tail_estimate: tail,
        truncation_warning,
        fallback: false,
    })
}

/// Direct integral over the first-hop density:
/// `P_out = F_1(g) + ∫_g^∞ f_1(x) F_2(g (x + 1) / (x - g)) dx`, `g = gamma_th`.
pub fn outage_quadrature(sc: &Scenario) -> Result<OutageResult, MetricError> {
    let gth = sc.gamma_th;
    let fso = &sc.fso;
    let cfg = QuadConfig {
        rel_tol: 1e-9,
        abs_tol: 1e-17,
        max_subdivisions: 400,
    };
    // y = x - g on a log scale, in two-decade pieces so no feature is skipped
    let lo = (gth * 1e-14).ln();
    let hi = (gth + 1e6 * fso.snr_mean()).ln();
    let width = 2.0 * std::f64::consts::LN_10;
    let pieces = ((hi - lo) / width).ceil() as usize;
    let mut value = fso.snr_cdf(gth)?;
    let mut abs_err = 0.0;
    for i in 0..pieces {
        let a = lo + i as f64 * width;
        let b = (a + width).min(hi);
        let res = integrate_fallible(
            |u| {
                let y = u.exp();
                let x = gth + y;
                Ok(y * fso.snr_pdf(x)? * sc.rf.snr_cdf(gth * (x + 1.0) / y))
            },
            a,
            b,
            &cfg,
        )?;
        value += res.value;
        abs_err += res.abs_error;
    }
    let mut out = OutageResult::plain(value, OutageMethod::Quadrature);
    out.tail_estimate = abs_err;
    Ok(out)
}

/// High-SNR outage from the first pole of each family of the `q = l = 0`
/// blocks (only elementary functions and gamma ratios). For `m < mu` the
/// exact series stands in and the result carries the fallback flag.
pub fn outage_asymptotic(sc: &Scenario) -> Result<OutageResult, MetricError> {
    if sc.rf.series_coeffs().regime == RfRegime::MLtMu {
        let mut out = outage_exact(sc)?;
        out.fallback = true;
        return Ok(out);
    }
    let gth = sc.gamma_th;
    let fso = &sc.fso;
    let z = fso.snr_scale() * gth;
    let br = &rf_branches(sc)[0];
    let theta2 = br.theta;
    let j_top = br.items.iter().map(|(_, j)| *j).max().unwrap_or(0);
    let r = fso.r() as f64;
    let fp = fso.params();
    let fso_order = (fso.xi_sq() / r).min(fp.alpha / r).min(fp.beta as f64 / r);
    if j_top >= 1 && fso_order.min(sc.rf.mu() as f64) > 2.0 {
        // the p = 1 residues and the dropped q = 1 terms are both O(SNR^-2)
        warn!("asymptotic outage is dominated by incomplete O(SNR^-2) terms when the diversity order exceeds 2");
    }
    let pre = fso.xi_sq() * z / gamma(fp.alpha) * (-gth / theta2).exp();
    let mut rest = 0.0;
    for (k, w) in fso.mixture() {
        let mut leading = Vec::with_capacity(j_top as usize + 1);
        for p in 0..=j_top {
            let terms = outage_block(sc, k, p)?.leading_residues(z)?;
            let pole_one = 1.0 - p as f64;
            let sum: f64 = terms
                .iter()
                .filter(|t| !(p == 0 && (t.pole - pole_one).abs() < 1e-9))
                .map(|t| t.residue)
                .sum();
            leading.push(sum);
        }
        let wk = pre * w / gamma(k);
        for &(coef, j_max) in &br.items {
            for j in 0..=j_max {
                for p in 0..=j {
                    rest += wk * coef * binomial(j, p) * gth.powi((j - p) as i32)
                        * (gth + 1.0).powi(p as i32)
                        / (theta2.powi(j as i32) * factorial(j))
                        * leading[p as usize];
                }
            }
        }
    }
    Ok(OutageResult::plain(sc.rf.snr_cdf(gth) - rest, OutageMethod::Asymptotic))
}

fn near_pole(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-9
}

/// Gamma-Gamma / Nakagami-m reduction of the asymptotic outage, written with
/// the explicit first-pole gamma ratios.
pub fn outage_gg_nakagami_asymptotic(sc: &Scenario) -> Result<OutageResult, MetricError> {
    let fp = sc.fso.params();
    let rp = sc.rf.params();
    let reduction = rp.mu == rp.m && rp.kappa <= 1e-4 && fp.g <= 1e-4 && (fp.omega - 1.0).abs() < 1e-12;
    if !reduction {
        return Err(MetricError::Precondition(format!(
            "needs mu = m, kappa -> 0, g -> 0, Omega = 1; got mu={}, m={}, kappa={}, g={}, Omega={}",
            rp.mu, rp.m, rp.kappa, fp.g, fp.omega
        )));
    }
    let gth = sc.gamma_th;
    let r = sc.fso.r() as f64;
    let (alpha, beta) = (fp.alpha, fp.beta as f64);
    let xi2 = sc.fso.xi_sq();
    let m = rp.m;
    let mf = m as f64;
    let gbar2 = rp.avg_snr;
    let big_z = (alpha * beta * sc.fso.h()).powf(r) * gth / sc.fso.mu_r();

    let mut rest = 0.0;
    for j in 0..m {
        for p in 0..=j {
            let pf = p as f64;
            let phi = [(pf - 1.0, 1.0), (xi2 - r, r), (alpha - r, r), (beta - r, r)];
            let sigma = [(xi2 + 1.0 - r, r), (pf, 1.0)];
            let mut inner = 0.0;
            for (t, &(pt, wt)) in phi.iter().enumerate() {
                if p == 0 && t == 0 {
                    continue;
                }
                let ratio = pt / wt;
                let mut num = 1.0;
                for (s, &(ps, ws)) in phi.iter().enumerate() {
                    if s != t {
                        let arg = ps - ratio * ws;
                        if near_pole(arg) {
                            return Err(MetricError::Precondition(format!(
                                "coincident poles at s = {}; the simple-pole form does not apply",
                                -ratio
                            )));
                        }
                        num *= gamma(arg);
                    }
                }
                let den: f64 = sigma.iter().map(|&(a, w)| gamma(a - ratio * w)).product();
                // 1/Gamma at a pole is zero
                if den.is_infinite() {
                    continue;
                }
                inner += num / (den * wt) * big_z.powf(ratio + 1.0);
            }
            rest += binomial(j, p) * mf.powi(j as i32) * gth.powi(-(p as i32))
                * (gth + 1.0).powi(p as i32)
                / factorial(j)
                * (gth / gbar2).powi(j as i32)
                * inner;
        }
    }
    rest *= xi2 * (-mf * gth / gbar2).exp() / (gamma(alpha) * gamma(beta));
    let constant_part = lower_gamma_p(m, mf * gth / gbar2);
    Ok(OutageResult::plain(constant_part - rest, OutageMethod::SpecialCaseGg))
}
