//! Residues of gamma-product kernels at real poles.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{digamma, factorial, gamma};
use super::kernel::MellinKernel;
use super::SpecFunError;

const INTEGER_SNAP: f64 = 1e-9;

/// If `x` is (numerically) a non-positive integer, return `-x` as an integer.
fn pole_index(x: f64) -> Option<u32> {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() < INTEGER_SNAP {
        Some((-r) as u32)
    } else {
        None
    }
}

/// Residue of `kernel(s) * z^{-s}` at the real point `s0`.
///
/// Writes the integrand near `s0` as `P * eps^{-order} * (1 + D eps + ...)` and
/// returns `P` for simple poles and `P * D` for double poles; zero if `s0` is
/// regular. Higher orders fall back to a contour integral on a small circle.
pub(crate) fn residue(kernel: &MellinKernel, ln_z: f64, s0: f64) -> Result<f64, SpecFunError> {
    let mut order: i32 = 0;
    let mut ln_abs = -s0 * ln_z;
    let mut sign = 1.0;
    let mut slope_sum = -ln_z;

    let mut push = |x0: f64, slope: f64, is_num: bool| {
        let dir = if is_num { 1.0 } else { -1.0 };
        match pole_index(x0) {
            Some(n) => {
                // Γ(-n + A eps) = (-1)^n / (n! A eps) * (1 + A eps ψ(n+1) + ...)
                order += if is_num { 1 } else { -1 };
                let lead = factorial(n) * slope.abs();
                ln_abs -= dir * lead.ln();
                if n % 2 == 1 {
                    sign = -sign;
                }
                if slope < 0.0 {
                    sign = -sign;
                }
                slope_sum += dir * slope * digamma(n as f64 + 1.0);
            }
            None => {
                let g = gamma(x0);
                ln_abs += dir * g.abs().ln();
                if g < 0.0 {
                    sign = -sign;
                }
                slope_sum += dir * slope * digamma(x0);
            }
        }
    };
    for f in &kernel.num {
        push(f.offset + f.slope * s0, f.slope, true);
    }
    for f in &kernel.den {
        push(f.offset + f.slope * s0, f.slope, false);
    }
    match order {
        o if o <= 0 => Ok(0.0),
        1 => Ok(sign * ln_abs.exp()),
        2 => Ok(sign * ln_abs.exp() * slope_sum),
        o => circle_residue(kernel, ln_z, s0).ok_or(SpecFunError::HighOrderPole { order: o, at: s0 }),
    }
}

/// Distance from `s0` to the nearest pole of any numerator factor that is not
/// at `s0` itself.
fn isolation_radius(kernel: &MellinKernel, s0: f64) -> f64 {
    let mut best = f64::INFINITY;
    for f in &kernel.num {
        let x0 = f.offset + f.slope * s0;
        let spacing = 1.0 / f.slope.abs();
        let base = (-x0).floor().max(0.0);
        for n in [base - 1.0, base, base + 1.0, base + 2.0] {
            if n < 0.0 {
                continue;
            }
            let d = (x0 + n).abs() * spacing;
            if d > INTEGER_SNAP {
                best = best.min(d);
            }
        }
        best = best.min(spacing);
    }
    best
}

/// `(1 / 2 pi i) ∮ kernel(s) z^{-s} ds` around `s0` by the periodic trapezoid
/// rule, doubling nodes until two levels agree.
fn circle_residue(kernel: &MellinKernel, ln_z: f64, s0: f64) -> Option<f64> {
    let rho = (0.5 * isolation_radius(kernel, s0)).min(2.0 / (1.0 + ln_z.abs()));
    let eval = |n: usize| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            // half-step offset keeps nodes off the real axis
            let e = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / n as f64);
            let s = Complex64::new(s0, 0.0) + e * rho;
            acc += (kernel.ln_value(s) - s * ln_z).exp() * e;
        }
        (acc * rho / n as f64).re
    };
    let mut n = 32;
    let mut prev = eval(n);
    while n < 1 << 14 {
        n *= 2;
        let next = eval(n);
        if (next - prev).abs() <= 1e-13 * next.abs().max(f64::MIN_POSITIVE) {
            return Some(next);
        }
        prev = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::kernel::GammaFactor;
    use super::*;

    #[test]
    fn exp_series_residues() {
        // Γ(s) z^{-s}: residue at -n is (-z)^n / n!
        let k = MellinKernel {
            num: vec![GammaFactor::new(0.0, 1.0)],
            den: vec![],
        };
        let z: f64 = 0.7;
        for n in 0..5u32 {
            let r = residue(&k, z.ln(), -(n as f64)).unwrap();
            let want = (-z).powi(n as i32) / factorial(n);
            assert!((r - want).abs() < 1e-14, "n={n}: {r} vs {want}");
        }
        assert_eq!(residue(&k, z.ln(), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn double_pole_matches_bessel_k0_log_term() {
        // Γ(s)^2 z^{-s} at s=0 gives -ln z - 2γ
        let k = MellinKernel {
            num: vec![GammaFactor::new(0.0, 1.0), GammaFactor::new(0.0, 1.0)],
            den: vec![],
        };
        let z: f64 = 0.3;
        let r = residue(&k, z.ln(), 0.0).unwrap();
        let want = -z.ln() - 2.0 * 0.577_215_664_901_532_9;
        assert!((r - want).abs() < 1e-13);
    }

    #[test]
    fn reversed_slope_sign() {
        // Γ(1 - s) has a pole at s = 1 with residue -1 in s; times z^{-1}
        let k = MellinKernel {
            num: vec![GammaFactor::new(1.0, -1.0)],
            den: vec![],
        };
        let z: f64 = 2.0;
        let r = residue(&k, z.ln(), 1.0).unwrap();
        assert!((r + 0.5).abs() < 1e-15);
    }

    #[test]
    fn triple_pole_by_contour() {
        // Γ(s)^3 z^{-s} at s=0: (ln z)^2/2 + 3γ ln z + 9γ^2/2 + π^2/4
        let f = GammaFactor::new(0.0, 1.0);
        let k = MellinKernel {
            num: vec![f, f, f],
            den: vec![],
        };
        let z: f64 = 0.4;
        let eg = 0.577_215_664_901_532_9;
        let lz = z.ln();
        let want = 0.5 * lz * lz + 3.0 * eg * lz + 0.5 * (9.0 * eg * eg + PI * PI / 2.0);
        let r = residue(&k, lz, 0.0).unwrap();
        assert!((r - want).abs() < 1e-11, "{r} vs {want}");
    }
}
