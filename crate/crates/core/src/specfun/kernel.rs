//! Gamma-product kernels and trapezoidal integration along a vertical line.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::ln_gamma_raw;
use super::{QuadratureControl, SpecFunError};

/// `Γ(offset + slope * s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct GammaFactor {
    pub offset: f64,
    pub slope: f64,
}

impl GammaFactor {
    pub fn new(offset: f64, slope: f64) -> Self {
        Self { offset, slope }
    }

    #[inline]
    pub fn arg(&self, s: Complex64) -> Complex64 {
        s * self.slope + self.offset
    }

    /// Distance (in `s` units) from real `c` to the nearest pole of this factor.
    pub fn pole_distance(&self, c: f64) -> f64 {
        if self.slope == 0.0 {
            return f64::INFINITY;
        }
        let x = self.offset + self.slope * c;
        let d = if x >= 0.0 {
            x
        } else {
            (x - x.floor()).min(x.ceil() - x)
        };
        d / self.slope.abs()
    }
}

/// `prod Γ(num) / prod Γ(den)`, the Mellin transform of a Fox-H type function.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct MellinKernel {
    pub num: Vec<GammaFactor>,
    pub den: Vec<GammaFactor>,
}

impl MellinKernel {
    pub fn ln_value(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for f in &self.num {
            acc += ln_gamma_raw(f.arg(s));
        }
        for f in &self.den {
            acc -= ln_gamma_raw(f.arg(s));
        }
        acc
    }

    /// Open interval of real `c` keeping every left pole family on the left
    /// and every right family on the right.
    pub fn natural_strip(&self) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for f in &self.num {
            let first = -f.offset / f.slope;
            if f.slope > 0.0 {
                lo = lo.max(first);
            } else if f.slope < 0.0 {
                hi = hi.min(first);
            }
        }
        (lo, hi)
    }

    /// Sum of |slopes| over numerator minus denominator factors. The kernel
    /// decays like `exp(-pi * a_star * |t| / 2)` along a vertical line.
    pub fn a_star(&self) -> f64 {
        let n: f64 = self.num.iter().map(|f| f.slope.abs()).sum();
        let d: f64 = self.den.iter().map(|f| f.slope.abs()).sum();
        n - d
    }

    pub fn pole_distance(&self, c: f64) -> f64 {
        self.num
            .iter()
            .map(|f| f.pole_distance(c))
            .fold(f64::INFINITY, f64::min)
    }
}

const PROBE_NODES: [(f64, f64); 7] = [
    (0.0, 0.125),
    (0.25, 0.25),
    (0.5, 0.375),
    (1.0, 0.75),
    (2.0, 1.5),
    (4.0, 3.0),
    (8.0, 4.0),
];

/// Log of a coarse L1 proxy of the integrand on the line `Re s = c`.
fn contour_objective(kernel: &MellinKernel, ln_z: f64, c: f64) -> f64 {
    let vals: Vec<f64> = PROBE_NODES
        .iter()
        .map(|&(t, w)| w.ln() + kernel.ln_value(Complex64::new(c, t)).re)
        .collect();
    log_sum_exp(&vals) - c * ln_z
}

pub(crate) fn log_sum_exp(vals: &[f64]) -> f64 {
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + vals.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..100 {
        if (b - a) <= 1e-7 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2);
        }
    }
    0.5 * (a + b)
}

/// Minimise a (roughly convex) function over the open interval `(lo, hi)`,
/// either end possibly infinite.
pub(crate) fn minimize_1d(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let finite_margin = |w: f64| 1e-9 + 1e-7 * w.min(1.0);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let eps = finite_margin(hi - lo);
            golden_section(f, lo + eps, hi - eps)
        }
        (true, false) => {
            let (a, b) = bracket_outward(f, lo, 1.0);
            golden_section(f, a.max(lo + 1e-9), b)
        }
        (false, true) => {
            let g = |x: f64| f(-x);
            let (a, b) = bracket_outward(&g, -hi, 1.0);
            -golden_section(&g, a.max(-hi + 1e-9), b)
        }
        (false, false) => {
            if f(0.5) < f(0.0) {
                let (a, b) = bracket_outward(f, 0.0, 1.0);
                golden_section(f, a, b)
            } else {
                let g = |x: f64| f(-x);
                let (a, b) = bracket_outward(&g, -0.5, 1.0);
                -golden_section(&g, a, b)
            }
        }
    }
}

/// Walk right from `start` in doubling steps until `f` stops decreasing.
fn bracket_outward(f: &dyn Fn(f64) -> f64, start: f64, step0: f64) -> (f64, f64) {
    let mut step = step0;
    let mut prev_x = start;
    let mut x = start + 0.5 * step;
    let mut fx = f(x);
    for _ in 0..60 {
        let next = start + step;
        let fnext = f(next);
        if !(fnext < fx) {
            return (prev_x, next);
        }
        prev_x = x;
        x = next;
        fx = fnext;
        step *= 2.0;
    }
    (prev_x, start + step)
}

pub(crate) fn choose_contour(kernel: &MellinKernel, ln_z: f64, lo: f64, hi: f64) -> f64 {
    let f = |c: f64| contour_objective(kernel, ln_z, c);
    minimize_1d(&f, lo, hi)
}

/// Result of a single contour quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinEstimate {
    pub value: f64,
    /// `|I(h) - I(h/2)| / |I(h/2)|` at the final step.
    pub rel_error: f64,
    pub nodes: usize,
    /// Real part of the contour actually used.
    pub contour: f64,
}

/// `(1 / 2 pi i) * integral of kernel(s) z^{-s} ds` along `Re s = c`, where `c` is
/// either `ctl.contour_shift` or chosen inside `(lo, hi)`.
pub(crate) fn integrate_line(
    kernel: &MellinKernel,
    ln_z: f64,
    lo: f64,
    hi: f64,
    ctl: &QuadratureControl,
) -> Result<MellinEstimate, SpecFunError> {
    ctl.validate()?;
    let a_star = kernel.a_star();
    if !(a_star > 0.0) {
        return Err(SpecFunError::Divergent { exponent: a_star });
    }
    let decay = 0.5 * PI * a_star;
    let c = match ctl.contour_shift {
        Some(c) => c,
        None => {
            if !(lo < hi) {
                return Err(SpecFunError::PoleCollision { lo, hi });
            }
            choose_contour(kernel, ln_z, lo, hi)
        }
    };
    let dist = kernel.pole_distance(c);
    if !(dist > 1e-10) {
        return Err(SpecFunError::PoleCollision { lo: c, hi: c });
    }

    let ln_integrand = |t: f64| {
        let s = Complex64::new(c, t);
        kernel.ln_value(s) - s * ln_z
    };
    let re_f = |t: f64| {
        let v = ln_integrand(t);
        if v.re.is_nan() {
            0.0
        } else {
            v.exp().re
        }
    };
    let envelope = |t: f64| ln_integrand(t).re.exp();

    let tol = ctl.target_rel_tol;
    let h0 = dist.min(1.0).min(PI / (ln_z.abs() + 1.0));
    let trapezoid = |h: f64, n: usize| 0.5 * re_f(0.0) + (1..=n).map(|j| re_f(j as f64 * h)).sum::<f64>();
    let tail_ok = |t_end: f64, value: f64| {
        let tail = envelope(t_end).max(envelope(0.75 * t_end)) / decay;
        let decreasing = envelope(t_end) <= envelope(0.5 * t_end);
        (decreasing && tail <= 0.01 * tol * value.abs()) || tail == 0.0
    };

    // Cutoff first: with the integrand still sizeable at the end of the line,
    // step halving only converges linearly.
    let mut n = (ctl.truncation_height / h0).ceil() as usize;
    loop {
        if n > ctl.max_nodes {
            return Err(SpecFunError::NonConvergence {
                rel_error: f64::INFINITY,
                nodes: n,
            });
        }
        let coarse = h0 * trapezoid(h0, n) / PI;
        if tail_ok(n as f64 * h0, coarse) {
            break;
        }
        n *= 2;
    }

    let mut h = h0;
    let mut sum = trapezoid(h, n);
    let mut value = h * sum / PI;
    let mut levels = 0;
    let mut err = f64::INFINITY;
    loop {
        if 2 * n > ctl.max_nodes {
            return Err(SpecFunError::NonConvergence { rel_error: err, nodes: n });
        }
        let half = 0.5 * h;
        sum += (0..n).map(|j| re_f((2 * j + 1) as f64 * half)).sum::<f64>();
        h = half;
        n *= 2;
        let next = h * sum / PI;
        err = (next - value).abs() / next.abs().max(f64::MIN_POSITIVE);
        value = next;
        levels += 1;
        if levels >= 2 && err <= tol {
            if !tail_ok(n as f64 * h, value) {
                // Coarse value underestimated the result scale; extend and redo.
                let mut wider = ctl.clone();
                wider.truncation_height = 2.0 * n as f64 * h;
                wider.contour_shift = Some(c);
                return integrate_line(kernel, ln_z, lo, hi, &wider);
            }
            return Ok(MellinEstimate {
                value,
                rel_error: err,
                nodes: n,
                contour: c,
            });
        }
    }
}
