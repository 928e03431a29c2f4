//! Fox-H function of two variables as a double Mellin-Barnes integral.
//!
//! Layout: a joint gamma block coupling `u` and `v` (no left-pole factors),
//! and one univariate Fox-H kernel per variable:
//!
//! ```text
//! H[x; y] = (2 pi i)^{-2} ∫∫ J(u, v) Θ1(u) Θ2(v) x^{-u} y^{-v} du dv
//! J(u, v) = prod_{j<n} Γ(1 - a_j - w1 u - w2 v)
//!         / (prod_{j>=n} Γ(a_j + w1 u + w2 v) * prod_lower Γ(1 - b_j - w1 u - w2 v))
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fox::FoxHSpec;
use super::gamma::ln_gamma_raw;
use super::kernel::{log_sum_exp, minimize_1d, MellinKernel};
use super::{QuadratureControl, SpecFunError};

/// `(coefficient, weight on u, weight on v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointParam {
    pub coeff: f64,
    pub w1: f64,
    pub w2: f64,
}

impl JointParam {
    pub fn new(coeff: f64, w1: f64, w2: f64) -> Self {
        Self { coeff, w1, w2 }
    }
}

/// `Γ(offset + s1 u + s2 v)`.
#[derive(Clone, Copy, Debug)]
struct JointFactor {
    offset: f64,
    s1: f64,
    s2: f64,
}

impl JointFactor {
    fn arg(&self, u: Complex64, v: Complex64) -> Complex64 {
        u * self.s1 + v * self.s2 + self.offset
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BivariateFoxHSpec {
    joint_upper: Vec<JointParam>,
    joint_n: usize,
    joint_lower: Vec<JointParam>,
    first: FoxHSpec,
    second: FoxHSpec,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BivariateEstimate {
    pub value: f64,
    /// Sum of the last per-variable step-halving changes.
    pub rel_error: f64,
    pub nodes: (usize, usize),
    pub contour: (f64, f64),
}

struct Setup {
    k1: MellinKernel,
    k2: MellinKernel,
    num: Vec<JointFactor>,
    den: Vec<JointFactor>,
    ln_x: f64,
    ln_y: f64,
}

impl Setup {
    fn ln_joint(&self, u: Complex64, v: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for f in &self.num {
            acc += ln_gamma_raw(f.arg(u, v));
        }
        for f in &self.den {
            acc -= ln_gamma_raw(f.arg(u, v));
        }
        acc
    }

    fn ln_u(&self, u: Complex64) -> Complex64 {
        self.k1.ln_value(u) - u * self.ln_x
    }

    fn ln_v(&self, v: Complex64) -> Complex64 {
        self.k2.ln_value(v) - v * self.ln_y
    }

    fn ln_integrand(&self, u: Complex64, v: Complex64) -> Complex64 {
        self.ln_u(u) + self.ln_v(v) + self.ln_joint(u, v)
    }

    fn objective(&self, cu: f64, cv: f64) -> f64 {
        const TU: [f64; 5] = [-2.0, -0.5, 0.0, 0.5, 2.0];
        const TV: [(f64, f64); 3] = [(0.0, 0.5), (0.5, 1.0), (2.0, 1.0)];
        let mut vals = Vec::with_capacity(TU.len() * TV.len());
        for &tu in &TU {
            for &(tv, w) in &TV {
                let z = self.ln_integrand(Complex64::new(cu, tu), Complex64::new(cv, tv));
                vals.push(w.ln() + z.re);
            }
        }
        let v = log_sum_exp(&vals);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    /// Feasible interval for `c_u` at fixed `c_v`.
    fn u_interval(&self, cv: f64) -> (f64, f64) {
        let (mut lo, mut hi) = self.k1.natural_strip();
        for f in &self.num {
            let rest = f.offset + f.s2 * cv;
            if f.s1 < 0.0 {
                hi = hi.min(rest / -f.s1);
            } else if f.s1 > 0.0 {
                lo = lo.max(-rest / f.s1);
            } else if rest <= 0.0 {
                return (1.0, 0.0);
            }
        }
        (lo, hi)
    }

    fn v_interval(&self, cu: f64) -> (f64, f64) {
        let (mut lo, mut hi) = self.k2.natural_strip();
        for f in &self.num {
            let rest = f.offset + f.s1 * cu;
            if f.s2 < 0.0 {
                hi = hi.min(rest / -f.s2);
            } else if f.s2 > 0.0 {
                lo = lo.max(-rest / f.s2);
            } else if rest <= 0.0 {
                return (1.0, 0.0);
            }
        }
        (lo, hi)
    }

    fn distance_u(&self, cu: f64, cv: f64) -> f64 {
        let mut d = self.k1.pole_distance(cu);
        for f in &self.num {
            if f.s1 != 0.0 {
                d = d.min((f.offset + f.s1 * cu + f.s2 * cv).abs() / f.s1.abs());
            }
        }
        d
    }

    fn distance_v(&self, cu: f64, cv: f64) -> f64 {
        let mut d = self.k2.pole_distance(cv);
        for f in &self.num {
            if f.s2 != 0.0 {
                d = d.min((f.offset + f.s1 * cu + f.s2 * cv).abs() / f.s2.abs());
            }
        }
        d
    }
}

fn interior_point(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    }
}

/// Imaginary cutoff where the marginal envelope has fallen below `rel` of its peak.
fn truncation(
    ln_env: &dyn Fn(f64) -> f64,
    start: f64,
    rel: f64,
) -> Result<f64, SpecFunError> {
    let ln_rel = rel.ln();
    let mut peak = ln_env(0.0);
    let mut prev = peak;
    let mut t = 0.0;
    while t < 5_000.0 {
        t += 0.5;
        let e = ln_env(t);
        peak = peak.max(e);
        if t >= start && e <= prev && e - peak <= ln_rel {
            return Ok(t);
        }
        prev = e;
    }
    Err(SpecFunError::NonConvergence {
        rel_error: f64::INFINITY,
        nodes: 0,
    })
}

impl BivariateFoxHSpec {
    pub fn new(
        joint_upper: Vec<JointParam>,
        joint_n: usize,
        joint_lower: Vec<JointParam>,
        first: FoxHSpec,
        second: FoxHSpec,
    ) -> Result<Self, SpecFunError> {
        if joint_n > joint_upper.len() {
            return Err(SpecFunError::InvalidSpec(format!(
                "joint split n={joint_n} exceeds {} upper parameters",
                joint_upper.len()
            )));
        }
        for p in joint_upper.iter().chain(joint_lower.iter()) {
            if !p.coeff.is_finite() || !(p.w1 >= 0.0) || !(p.w2 >= 0.0) {
                return Err(SpecFunError::InvalidSpec(format!(
                    "joint parameter {p:?} needs a finite coefficient and non-negative weights"
                )));
            }
        }
        let spec = Self {
            joint_upper,
            joint_n,
            joint_lower,
            first,
            second,
        };
        let (e1, e2) = spec.convergence_exponents();
        if !(e1 > 0.0) {
            return Err(SpecFunError::Divergent { exponent: e1 });
        }
        if !(e2 > 0.0) {
            return Err(SpecFunError::Divergent { exponent: e2 });
        }
        Ok(spec)
    }

    /// Marginal exponent plus joint numerator weights minus joint denominator
    /// weights, per variable. Both must be positive.
    pub fn convergence_exponents(&self) -> (f64, f64) {
        let (mut e1, mut e2) = (self.first.a_star(), self.second.a_star());
        for (j, p) in self.joint_upper.iter().enumerate() {
            let sign = if j < self.joint_n { 1.0 } else { -1.0 };
            e1 += sign * p.w1;
            e2 += sign * p.w2;
        }
        for p in &self.joint_lower {
            e1 -= p.w1;
            e2 -= p.w2;
        }
        (e1, e2)
    }

    fn setup(&self, x: f64, y: f64) -> Setup {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (j, p) in self.joint_upper.iter().enumerate() {
            if j < self.joint_n {
                num.push(JointFactor {
                    offset: 1.0 - p.coeff,
                    s1: -p.w1,
                    s2: -p.w2,
                });
            } else {
                den.push(JointFactor {
                    offset: p.coeff,
                    s1: p.w1,
                    s2: p.w2,
                });
            }
        }
        for p in &self.joint_lower {
            den.push(JointFactor {
                offset: 1.0 - p.coeff,
                s1: -p.w1,
                s2: -p.w2,
            });
        }
        Setup {
            k1: self.first.kernel(),
            k2: self.second.kernel(),
            num,
            den,
            ln_x: x.ln(),
            ln_y: y.ln(),
        }
    }

    fn choose_contour(&self, st: &Setup) -> Result<(f64, f64), SpecFunError> {
        let (lo1, hi1) = st.k1.natural_strip();
        let (lo2, hi2) = st.k2.natural_strip();
        if !(lo1 < hi1) {
            return Err(SpecFunError::PoleCollision { lo: lo1, hi: hi1 });
        }
        if !(lo2 < hi2) {
            return Err(SpecFunError::PoleCollision { lo: lo2, hi: hi2 });
        }
        let mut cu = interior_point(lo1, hi1);
        let mut cv = f64::NAN;
        for _ in 0..60 {
            let (lo, hi) = st.v_interval(cu);
            if lo < hi {
                cv = interior_point(lo, hi);
                break;
            }
            cu = if lo1.is_finite() {
                lo1 + 0.5 * (cu - lo1)
            } else {
                cu - 1.0
            };
        }
        if cv.is_nan() {
            return Err(SpecFunError::PoleCollision { lo: lo2, hi: hi2 });
        }
        for _ in 0..8 {
            let (lo, hi) = st.u_interval(cv);
            cu = minimize_1d(&|c| st.objective(c, cv), lo, hi);
            let (lo, hi) = st.v_interval(cu);
            cv = minimize_1d(&|c| st.objective(cu, c), lo, hi);
        }
        Ok((cu, cv))
    }

    fn grid_sum(st: &Setup, cu: f64, cv: f64, hu: f64, nu: usize, hv: f64, nv: usize) -> f64 {
        let us: Vec<(Complex64, Complex64)> = (-(nu as i64)..=nu as i64)
            .map(|j| {
                let u = Complex64::new(cu, j as f64 * hu);
                (u, st.ln_u(u))
            })
            .collect();
        let rows: Vec<f64> = (0..=nv)
            .into_par_iter()
            .map(|k| {
                let v = Complex64::new(cv, k as f64 * hv);
                let lv = st.ln_v(v);
                let w = if k == 0 { 0.5 } else { 1.0 };
                let mut acc = 0.0;
                for &(u, lu) in &us {
                    let z = lu + lv + st.ln_joint(u, v);
                    if z.re.is_finite() {
                        acc += z.exp().re;
                    }
                }
                w * acc
            })
            .collect();
        let total: f64 = rows.iter().sum();
        2.0 * hu * hv * total / (4.0 * PI * PI)
    }

    pub fn eval(&self, x: f64, y: f64, ctl: &QuadratureControl) -> Result<f64, SpecFunError> {
        self.eval_detailed(x, y, ctl).map(|e| e.value)
    }

    /// Product-grid trapezoid on the two vertical lines, halving each step
    /// until its own change is below `ctl.target_rel_tol`.
    pub fn eval_detailed(
        &self,
        x: f64,
        y: f64,
        ctl: &QuadratureControl,
    ) -> Result<BivariateEstimate, SpecFunError> {
        ctl.validate()?;
        for (name, val) in [("x", x), ("y", y)] {
            if !(val > 0.0 && val.is_finite()) {
                return Err(SpecFunError::InvalidArgument(format!(
                    "{name} must be positive and finite, got {val}"
                )));
            }
        }
        let st = self.setup(x, y);
        let (cu, cv) = self.choose_contour(&st)?;
        let tol = ctl.target_rel_tol;

        let den_w1: f64 = st.den.iter().map(|f| f.s1.abs()).sum();
        let den_w2: f64 = st.den.iter().map(|f| f.s2.abs()).sum();
        let env_u = |t: f64| st.ln_u(Complex64::new(cu, t)).re + 0.5 * PI * den_w1 * t;
        let env_v = |t: f64| st.ln_v(Complex64::new(cv, t)).re + 0.5 * PI * den_w2 * t;
        let tu = truncation(&env_u, ctl.truncation_height, 1e-3 * tol)?;
        let tv = truncation(&env_v, ctl.truncation_height, 1e-3 * tol)?;

        let du0 = st.distance_u(cu, cv);
        let dv0 = st.distance_v(cu, cv);
        if !(du0 > 1e-10 && dv0 > 1e-10) {
            return Err(SpecFunError::PoleCollision { lo: cu, hi: cv });
        }
        let mut hu = du0.min(1.0).min(PI / (st.ln_x.abs() + 1.0));
        let mut hv = dv0.min(1.0).min(PI / (st.ln_y.abs() + 1.0));
        let mut nu = (tu / hu).ceil() as usize;
        let mut nv = (tv / hv).ceil() as usize;
        let mut value = Self::grid_sum(&st, cu, cv, hu, nu, hv, nv);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE);
        let (mut err_u, mut err_v) = (f64::INFINITY, f64::INFINITY);
        let (mut levels_u, mut levels_v) = (0, 0);
        loop {
            if err_u > tol || levels_u < 2 {
                if 2 * nu > ctl.max_nodes {
                    return Err(SpecFunError::NonConvergence {
                        rel_error: err_u + err_v,
                        nodes: nu,
                    });
                }
                hu *= 0.5;
                nu *= 2;
                let next = Self::grid_sum(&st, cu, cv, hu, nu, hv, nv);
                err_u = rel(next, value);
                value = next;
                levels_u += 1;
            }
            if err_v > tol || levels_v < 2 {
                if 2 * nv > ctl.max_nodes {
                    return Err(SpecFunError::NonConvergence {
                        rel_error: err_u + err_v,
                        nodes: nv,
                    });
                }
                hv *= 0.5;
                nv *= 2;
                let next = Self::grid_sum(&st, cu, cv, hu, nu, hv, nv);
                err_v = rel(next, value);
                value = next;
                levels_v += 1;
            }
            if err_u <= tol && err_v <= tol && levels_u >= 2 && levels_v >= 2 {
                break;
            }
        }
        Ok(BivariateEstimate {
            value,
            rel_error: err_u + err_v,
            nodes: (2 * nu + 1, nv + 1),
            contour: (cu, cv),
        })
    }
}

/// `H[x; y]` of two variables for `x, y > 0`.
pub fn fox_h_bivariate(
    spec: &BivariateFoxHSpec,
    x: f64,
    y: f64,
    ctl: &QuadratureControl,
) -> Result<f64, SpecFunError> {
    spec.eval(x, y, ctl)
}
