use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;

use crate::channel::{db_to_linear, MalagaParams, RfParams, Scenario, Truncation};
use crate::mc::{estimate_capacity, estimate_outage, RngStream};
use crate::metrics::{
    ergodic_capacity_asymptotic, ergodic_capacity_exact, ergodic_capacity_quadrature,
    outage_asymptotic, outage_exact, outage_quadrature, MetricError,
};

use super::config::{Metric, Path, SweepSpec, SweepVar};

/// One grid point. `None` means the path was not requested or failed; the
/// status flags say which.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub exact: Option<f64>,
    pub asymptotic: Option<f64>,
    pub quadrature: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub tail_estimate: Option<f64>,
    /// Empty means `ok`.
    pub flags: Vec<String>,
    /// Wall time per computed path.
    pub timings: Vec<(Path, Duration)>,
}

impl ResultRow {
    /// True if any requested path failed numerically.
    pub fn has_failure(&self) -> bool {
        self.flags.iter().any(|f| f.ends_with("_failed"))
    }

    pub fn status(&self) -> String {
        if self.flags.is_empty() {
            "ok".to_string()
        } else {
            self.flags.join(";")
        }
    }
}

impl SweepSpec {
    /// Scenario at one grid point, with dB converted to linear scale here only.
    pub fn scenario_at(&self, snr_db: f64) -> Result<Scenario, MetricError> {
        let (fso_db, rf_db) = match self.sweep {
            SweepVar::AvgElectricalSnr => (snr_db, self.rf_snr_db),
            SweepVar::RfAvgSnr => (self.fso_snr_db, snr_db),
            SweepVar::BothLocked => (snr_db, snr_db),
        };
        let fso = MalagaParams {
            alpha: self.alpha,
            beta: self.beta,
            g: self.g,
            omega: self.omega,
            xi: self.xi,
            a0: self.a0,
            detection: self.detection,
            avg_snr: db_to_linear(fso_db),
        };
        let rf = RfParams {
            kappa: self.kappa,
            mu: self.mu,
            m: self.m,
            avg_snr: db_to_linear(rf_db),
        };
        let trunc = Truncation {
            q_max: self.trunc_q,
            l_max: self.trunc_l,
        };
        Ok(Scenario::new(fso, rf, db_to_linear(self.gamma_th_db), trunc)?)
    }
}

fn timed<T>(timings: &mut Vec<(Path, Duration)>, path: Path, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.push((path, start.elapsed()));
    out
}

fn record(
    row: &mut ResultRow,
    path: Path,
    result: Result<f64, MetricError>,
) -> Option<f64> {
    match result {
        Ok(v) => Some(v),
        Err(e) => {
            warn!("{} dB, {} path: {e}", row.snr_db, path.name());
            row.flags.push(format!("{}_failed", path.name()));
            None
        }
    }
}

fn evaluate(spec: &SweepSpec, index: usize, snr_db: f64) -> ResultRow {
    let mut row = ResultRow {
        snr_db,
        exact: None,
        asymptotic: None,
        quadrature: None,
        mc_mean: None,
        mc_stderr: None,
        tail_estimate: None,
        flags: Vec::new(),
        timings: Vec::new(),
    };
    let sc = match spec.scenario_at(snr_db) {
        Ok(sc) => sc,
        Err(e) => {
            warn!("{snr_db} dB: {e}");
            row.flags.push("scenario_failed".into());
            return row;
        }
    };
    let mut timings = Vec::new();
    let stream = RngStream::new(spec.seed, index as u32);
    for &path in &spec.paths {
        match (spec.metric, path) {
            (Metric::Capacity, Path::Exact) => {
                let r = timed(&mut timings, path, || ergodic_capacity_exact(&sc));
                row.exact = record(&mut row, path, r.map(|c| c.value));
            }
            (Metric::Capacity, Path::Asymptotic) => {
                let r = timed(&mut timings, path, || match ergodic_capacity_asymptotic(&sc) {
                    Err(MetricError::NotImplemented(what)) => {
                        info!("{snr_db} dB: {what}; asymptotic column uses the quadrature path");
                        row.flags.push("asymptotic_fallback_quadrature".into());
                        ergodic_capacity_quadrature(&sc)
                    }
                    other => other,
                });
                row.asymptotic = record(&mut row, path, r.map(|c| c.value));
            }
            (Metric::Capacity, Path::Quadrature) => {
                let r = timed(&mut timings, path, || ergodic_capacity_quadrature(&sc));
                row.quadrature = record(&mut row, path, r.map(|c| c.value));
            }
            (Metric::Capacity, Path::MonteCarlo) => {
                let est = timed(&mut timings, path, || estimate_capacity(&sc, spec.mc_trials, &stream));
                row.mc_mean = Some(est.mean);
                row.mc_stderr = Some(est.std_error);
            }
            (Metric::Outage, Path::Exact) => {
                let r = timed(&mut timings, path, || outage_exact(&sc));
                if let Ok(o) = &r {
                    row.tail_estimate = Some(o.tail_estimate);
                    if o.truncation_warning {
                        row.flags.push("truncation_warning".into());
                    }
                }
                if let Err(MetricError::TruncationFailure { tail_estimate, .. }) = &r {
                    row.tail_estimate = Some(*tail_estimate);
                }
                row.exact = record(&mut row, path, r.map(|o| o.value));
            }
            (Metric::Outage, Path::Asymptotic) => {
                let r = timed(&mut timings, path, || outage_asymptotic(&sc));
                if let Ok(o) = &r {
                    if o.fallback {
                        info!("{snr_db} dB: no closed-form asymptote for m < mu; using the exact series");
                        row.flags.push("asymptotic_fallback_exact".into());
                    }
                }
                row.asymptotic = record(&mut row, path, r.map(|o| o.value));
            }
            (Metric::Outage, Path::Quadrature) => {
                let r = timed(&mut timings, path, || outage_quadrature(&sc));
                row.quadrature = record(&mut row, path, r.map(|o| o.value));
            }
            (Metric::Outage, Path::MonteCarlo) => {
                let est = timed(&mut timings, path, || estimate_outage(&sc, spec.mc_trials, &stream));
                if est.unreliable {
                    row.flags.push("mc_unreliable".into());
                }
                row.mc_mean = Some(est.mean);
                row.mc_stderr = Some(est.std_error);
            }
        }
    }
    row.timings = timings;
    row
}

/// Evaluate every grid point (in parallel) and return rows in grid order.
/// Failures are recorded per row and never abort the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Vec<ResultRow> {
    spec.grid_db
        .par_iter()
        .enumerate()
        .map(|(i, &db)| evaluate(spec, i, db))
        .collect()
}
