//! Monte Carlo estimates of outage and capacity from physical samplers of both
//! hops, combined through `gamma_1 gamma_2 / (gamma_1 + gamma_2 + 1)`.
//!
//! Trials run in fixed-size batches; batch `b` of stream `s` draws from a
//! ChaCha8 generator on stream `(s << 32) | b`, so results depend only on
//! `(seed, stream_id, trials)` and not on the thread count.

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::channel::{KappaMuShadowedRfLink, MalagaFsoLink, Scenario};

/// Trials per batch; fixed so that the batch-to-stream mapping never changes.
pub const BATCH: u64 = 1 << 14;

/// Outage estimates with fewer hits than this are flagged unreliable.
pub const MIN_EVENTS: u64 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u32,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u32) -> Self {
        Self { seed, stream_id }
    }

    /// Generator for one batch of this stream.
    pub fn batch_rng(&self, batch: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((self.stream_id as u64) << 32) | batch as u64);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub elapsed: Duration,
    /// Fewer than [`MIN_EVENTS`] outage events were observed.
    pub unreliable: bool,
}

/// Running `(count, sum, sum of squares)`; merging is associative up to
/// floating-point rounding and is always done in batch order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean from the unbiased sample variance.
    pub fn std_error(&self) -> f64 {
        let n = self.count as f64;
        if self.count < 2 {
            return 0.0;
        }
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Draws `trials` values of `draw` over deterministic batches and merges them
/// in batch order.
pub fn run_batches<F>(trials: u64, stream: &RngStream, draw: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let batches = trials.div_ceil(BATCH);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.batch_rng(b as u32);
            let n = BATCH.min(trials - b * BATCH);
            let mut acc = Moments::default();
            for _ in 0..n {
                acc.push(draw(&mut rng));
            }
            acc
        })
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

/// Sampler for the FSO hop: binomial mixture index, generalized-K turbulence
/// and power-law pointing loss.
#[derive(Clone, Debug)]
pub struct FsoSampler {
    index: Binomial,
    large: Gamma<f64>,
    small: Vec<Gamma<f64>>,
    rate: f64,
    a0: f64,
    inv_xi_sq: f64,
    mu_r: f64,
    mean_i: f64,
    r: i32,
}

impl FsoSampler {
    pub fn new(link: &MalagaFsoLink) -> Self {
        let p = link.params();
        let s = p.g * p.beta as f64 + p.omega;
        let success = (p.omega / s).clamp(0.0, 1.0);
        Self {
            index: Binomial::new((p.beta - 1) as u64, success).expect("probability in [0, 1]"),
            large: Gamma::new(p.alpha, 1.0).expect("alpha > 0"),
            small: (1..=p.beta)
                .map(|k| Gamma::new(k as f64, 1.0).expect("k >= 1"))
                .collect(),
            rate: link.turbulence_rate(),
            a0: p.a0,
            inv_xi_sq: 1.0 / link.xi_sq(),
            mu_r: link.mu_r(),
            mean_i: link.mean_irradiance(),
            r: link.r() as i32,
        }
    }

    /// Turbulence-only irradiance `I_a`.
    pub fn turbulence<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let k = self.index.sample(rng) as usize;
        self.large.sample(rng) * self.small[k].sample(rng) / self.rate
    }

    /// Pointing loss `I_p` on `(0, A0)` with density `xi^2 w^{xi^2-1} / A0^{xi^2}`.
    pub fn pointing<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.a0 * u.powf(self.inv_xi_sq)
    }

    pub fn irradiance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.turbulence(rng) * self.pointing(rng)
    }

    /// `gamma_1 = mu_r (I / E[I])^r`.
    pub fn snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.mu_r * (self.irradiance(rng) / self.mean_i).powi(self.r)
    }
}

/// Physical kappa-mu shadowed sampler: `mu` clusters of in-phase/quadrature
/// Gaussians (variance 1/2) with a shared Nakagami-m shadowed dominant part.
#[derive(Clone, Debug)]
pub struct RfSampler {
    shadow: Gamma<f64>,
    mu: u32,
    los: f64,
    scale: f64,
}

impl RfSampler {
    pub fn new(link: &KappaMuShadowedRfLink) -> Self {
        let p = link.params();
        let m = p.m as f64;
        Self {
            shadow: Gamma::new(m, 1.0 / m).expect("m >= 1"),
            mu: p.mu,
            los: p.kappa.sqrt(),
            scale: p.avg_snr / (p.mu as f64 * (1.0 + p.kappa)),
        }
    }

    pub fn snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let zeta = self.shadow.sample(rng).sqrt();
        let mean = zeta * self.los;
        let mut w = 0.0;
        for _ in 0..self.mu {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let xi = x * std::f64::consts::FRAC_1_SQRT_2 + mean;
            let yi = y * std::f64::consts::FRAC_1_SQRT_2;
            w += xi * xi + yi * yi;
        }
        self.scale * w
    }
}

pub fn sample_malaga_irradiance<R: Rng + ?Sized>(link: &MalagaFsoLink, rng: &mut R) -> f64 {
    FsoSampler::new(link).irradiance(rng)
}

pub fn sample_rf_snr<R: Rng + ?Sized>(link: &KappaMuShadowedRfLink, rng: &mut R) -> f64 {
    RfSampler::new(link).snr(rng)
}

pub fn end_to_end_snr(g1: f64, g2: f64) -> f64 {
    g1 * g2 / (g1 + g2 + 1.0)
}

/// Fraction of trials with end-to-end SNR below `gamma_th`, with the binomial
/// standard error.
pub fn estimate_outage(sc: &Scenario, trials: u64, stream: &RngStream) -> McEstimate {
    let start = Instant::now();
    let fso = FsoSampler::new(&sc.fso);
    let rf = RfSampler::new(&sc.rf);
    let gth = sc.gamma_th;
    let acc = run_batches(trials, stream, |rng| {
        let g = end_to_end_snr(fso.snr(rng), rf.snr(rng));
        if g < gth {
            1.0
        } else {
            0.0
        }
    });
    let n = acc.count as f64;
    let p = acc.mean();
    McEstimate {
        mean: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
        trials: acc.count,
        elapsed: start.elapsed(),
        unreliable: (acc.sum as u64) < MIN_EVENTS,
    }
}

/// Sample mean of `ln(1 + gamma) / (2 ln 2)`.
pub fn estimate_capacity(sc: &Scenario, trials: u64, stream: &RngStream) -> McEstimate {
    let start = Instant::now();
    let fso = FsoSampler::new(&sc.fso);
    let rf = RfSampler::new(&sc.rf);
    let acc = run_batches(trials, stream, |rng| {
        end_to_end_snr(fso.snr(rng), rf.snr(rng)).ln_1p() / (2.0 * LN_2)
    });
    McEstimate {
        mean: acc.mean(),
        std_error: acc.std_error(),
        trials: acc.count,
        elapsed: start.elapsed(),
        unreliable: false,
    }
}
