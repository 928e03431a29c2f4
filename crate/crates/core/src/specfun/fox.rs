//! Univariate Fox-H and Meijer-G functions.

use super::kernel::{integrate_line, GammaFactor, MellinEstimate, MellinKernel};
use super::residue::residue;
use super::{QuadratureControl, SpecFunError};

/// Parameter block of `H^{m,n}_{p,q}[z | (a_j, A_j); (b_j, B_j)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FoxHSpec {
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
    n: usize,
    m: usize,
}

/// One term of the leading residue expansion: pole location and residue of
/// the integrand there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleTerm {
    pub pole: f64,
    pub residue: f64,
}

impl FoxHSpec {
    pub fn new(
        upper: Vec<(f64, f64)>,
        lower: Vec<(f64, f64)>,
        n: usize,
        m: usize,
    ) -> Result<Self, SpecFunError> {
        if n > upper.len() || m > lower.len() {
            return Err(SpecFunError::InvalidSpec(format!(
                "index split (m={m}, n={n}) exceeds list lengths (p={}, q={})",
                upper.len(),
                lower.len()
            )));
        }
        for &(c, w) in upper.iter().chain(lower.iter()) {
            if !c.is_finite() || !(w > 0.0 && w.is_finite()) {
                return Err(SpecFunError::InvalidSpec(format!(
                    "parameter pair ({c}, {w}) needs a finite coefficient and positive weight"
                )));
            }
        }
        Ok(Self { upper, lower, n, m })
    }

    /// Meijer-G parameters as a Fox-H block with unit weights.
    pub fn meijer(m: usize, n: usize, upper: &[f64], lower: &[f64]) -> Result<Self, SpecFunError> {
        Self::new(
            upper.iter().map(|&a| (a, 1.0)).collect(),
            lower.iter().map(|&b| (b, 1.0)).collect(),
            n,
            m,
        )
    }

    pub fn upper(&self) -> &[(f64, f64)] {
        &self.upper
    }

    pub fn lower(&self) -> &[(f64, f64)] {
        &self.lower
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn kernel(&self) -> MellinKernel {
        let mut k = MellinKernel::default();
        for (j, &(b, bw)) in self.lower.iter().enumerate() {
            if j < self.m {
                k.num.push(GammaFactor::new(b, bw));
            } else {
                k.den.push(GammaFactor::new(1.0 - b, -bw));
            }
        }
        for (j, &(a, aw)) in self.upper.iter().enumerate() {
            if j < self.n {
                k.num.push(GammaFactor::new(1.0 - a, -aw));
            } else {
                k.den.push(GammaFactor::new(a, aw));
            }
        }
        k
    }

    /// Convergence exponent; the contour integral exists for `a_star > 0`.
    pub fn a_star(&self) -> f64 {
        self.kernel().a_star()
    }

    /// Pole-free strip for the standard contour.
    pub fn natural_strip(&self) -> (f64, f64) {
        self.kernel().natural_strip()
    }

    pub fn eval(&self, z: f64, ctl: &QuadratureControl) -> Result<f64, SpecFunError> {
        self.eval_detailed(z, ctl).map(|e| e.value)
    }

    pub fn eval_detailed(
        &self,
        z: f64,
        ctl: &QuadratureControl,
    ) -> Result<MellinEstimate, SpecFunError> {
        let (lo, hi) = self.natural_strip();
        self.eval_in_strip(z, lo, hi, ctl)
    }

    /// Evaluate along a line chosen inside `(lo, hi)` instead of the natural
    /// strip. Used when a residue expansion fixes which poles sit on which side
    /// of the contour; no separation check is made.
    pub fn eval_in_strip(
        &self,
        z: f64,
        lo: f64,
        hi: f64,
        ctl: &QuadratureControl,
    ) -> Result<MellinEstimate, SpecFunError> {
        check_argument(z)?;
        integrate_line(&self.kernel(), z.ln(), lo, hi, ctl)
    }

    /// Residues at the first pole of each left family `Γ(b_j + B_j s)`,
    /// coincident poles merged. Summed, these are the leading terms of the
    /// small-`z` expansion.
    pub fn leading_residues(&self, z: f64) -> Result<Vec<PoleTerm>, SpecFunError> {
        check_argument(z)?;
        let kernel = self.kernel();
        let mut poles: Vec<f64> = Vec::new();
        for &(b, bw) in self.lower.iter().take(self.m) {
            let p = -b / bw;
            if !poles.iter().any(|&q| (q - p).abs() < 1e-9) {
                poles.push(p);
            }
        }
        poles
            .into_iter()
            .map(|pole| {
                residue(&kernel, z.ln(), pole).map(|residue| PoleTerm { pole, residue })
            })
            .collect()
    }
}

fn check_argument(z: f64) -> Result<(), SpecFunError> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(SpecFunError::InvalidArgument(format!(
            "argument must be positive and finite, got {z}"
        )))
    }
}

/// `H^{m,n}_{p,q}[z]` for `z > 0`.
pub fn fox_h(spec: &FoxHSpec, z: f64, ctl: &QuadratureControl) -> Result<f64, SpecFunError> {
    spec.eval(z, ctl)
}

/// `G^{m,n}_{p,q}(z | upper; lower)` for `z > 0`.
pub fn meijer_g(
    m: usize,
    n: usize,
    upper: &[f64],
    lower: &[f64],
    z: f64,
    ctl: &QuadratureControl,
) -> Result<f64, SpecFunError> {
    FoxHSpec::meijer(m, n, upper, lower)?.eval(z, ctl)
}
