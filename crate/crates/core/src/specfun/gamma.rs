//! Complex log-gamma, real gamma and digamma.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::SpecFunError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + acc.ln() + LN_SQRT_2PI
}

/// Principal-branch `ln sin(pi z)`, stable for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    let i = Complex64::i();
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}) for Im z > 0, mirrored below.
    let raw = if z.im > 0.0 {
        (i * 0.5).ln() - i * PI * z + (1.0 - (i * 2.0 * PI * z).exp()).ln()
    } else {
        (-i * 0.5).ln() + i * PI * z + (1.0 - (-i * 2.0 * PI * z).exp()).ln()
    };
    let two_pi = 2.0 * PI;
    let mut im = raw.im - two_pi * (raw.im / two_pi).round();
    if im <= -PI {
        im += two_pi;
    }
    Complex64::new(raw.re, im)
}

/// Log-gamma without the pole check. Returns a non-finite value at poles.
pub(crate) fn ln_gamma_raw(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        return lanczos(z);
    }
    let base = LN_PI - ln_sin_pi(z) - lanczos(1.0 - z);
    // Reflection lands on a different sheet; shift back to the principal branch.
    let k = (0.5 * z.re + 0.25).floor();
    let sign = if z.im < 0.0 { -1.0 } else { 1.0 };
    base + Complex64::new(0.0, 2.0 * PI * sign * k)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Principal branch of `ln Γ(z)`.
///
/// Accurate to about 1e-14 (relative to `max(1, |ln Γ|)`) for `|z| <= 100`.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64, SpecFunError> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return Err(SpecFunError::GammaPole { at: z.re });
    }
    Ok(ln_gamma_raw(z))
}

/// `ln |Γ(x)|` for real `x` that is not a pole.
pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_raw(Complex64::new(x, 0.0)).re
}

/// Real gamma function. Infinite at poles.
pub fn gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    let lg = ln_gamma_raw(Complex64::new(x, 0.0));
    // Imaginary part is a multiple of pi; its parity carries the sign.
    let sign = if (lg.im / PI).round().rem_euclid(2.0) == 0.0 {
        1.0
    } else {
        -1.0
    };
    sign * lg.re.exp()
}

/// Digamma for real arguments; NaN at poles.
pub fn digamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x < 0.0 {
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 16.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let series = x2
        * (1.0 / 12.0
            - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 / 132.0))));
    acc + x.ln() - 0.5 / x - series
}

/// `ln C(n, k)` for non-negative integers.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Exact binomial coefficient as a float (exact up to 2^53).
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}
