use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::channel::Detection;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: expected {expected}")]
    InvalidValue {
        key: String,
        value: String,
        expected: String,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
}

fn invalid(key: &str, value: &str, expected: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        expected: expected.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Capacity,
    Outage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SweepVar {
    AvgElectricalSnr,
    RfAvgSnr,
    BothLocked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Path {
    Exact,
    Asymptotic,
    Quadrature,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    StrongTurbulence,
    ModerateTurbulence,
    RicianShadowedRf,
    GammaGamma,
    NakagamiRf,
    RayleighRf,
    KDistribution,
}

macro_rules! named {
    ($ty:ty { $($var:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$(<$ty>::$var),+];

            pub fn name(self) -> &'static str {
                match self { $(<$ty>::$var => $name),+ }
            }

            pub fn parse(s: &str) -> Option<Self> {
                match s { $($name => Some(<$ty>::$var),)+ _ => None }
            }

            fn choices() -> String {
                Self::ALL.iter().map(|v| v.name()).collect::<Vec<_>>().join("|")
            }
        }
    };
}

named!(Metric { Capacity => "capacity", Outage => "outage" });
named!(SweepVar {
    AvgElectricalSnr => "avg_electrical_snr",
    RfAvgSnr => "rf_avg_snr",
    BothLocked => "both_locked",
});
named!(Path {
    Exact => "exact",
    Asymptotic => "asymptotic",
    Quadrature => "quadrature",
    MonteCarlo => "monte_carlo",
});
named!(Preset {
    StrongTurbulence => "strong_turbulence",
    ModerateTurbulence => "moderate_turbulence",
    RicianShadowedRf => "rician_shadowed_rf",
    GammaGamma => "gamma_gamma",
    NakagamiRf => "nakagami_rf",
    RayleighRf => "rayleigh_rf",
    KDistribution => "k_distribution",
});

/// A fully resolved sweep. All SNR-like values are in dB here; conversion to
/// linear scale happens when scenarios are built.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub metric: Metric,
    pub presets: Vec<Preset>,
    pub detection: Detection,
    pub alpha: f64,
    pub beta: u32,
    pub g: f64,
    pub omega: f64,
    pub xi: f64,
    pub a0: f64,
    pub kappa: f64,
    pub mu: u32,
    pub m: u32,
    pub sweep: SweepVar,
    pub grid_db: Vec<f64>,
    /// Heterodyne-reference FSO SNR when the FSO hop is not swept.
    pub fso_snr_db: f64,
    /// RF average SNR when the RF hop is not swept.
    pub rf_snr_db: f64,
    pub gamma_th_db: f64,
    pub paths: BTreeSet<Path>,
    pub mc_trials: u64,
    pub seed: u64,
    pub trunc_q: u32,
    pub trunc_l: u32,
    pub out: Option<String>,
}

/// Keys accepted in config files and as flag overrides, in echo order.
const KEYS: &[&str] = &[
    "metric", "preset", "detection", "alpha", "beta", "g", "omega", "xi", "a0", "kappa", "mu",
    "m", "sweep", "snr_grid", "fso_snr_db", "rf_snr_db", "gamma_th", "paths", "mc_trials",
    "seed", "trunc_q", "trunc_l", "out",
];

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            metric: Metric::Outage,
            presets: Vec::new(),
            detection: Detection::Heterodyne,
            alpha: 2.29,
            beta: 2,
            g: 0.5,
            omega: 0.5,
            // example value; the pointing-error ratio is a user input
            xi: 6.7,
            a0: 1.0,
            kappa: 5.0,
            mu: 1,
            m: 2,
            sweep: SweepVar::BothLocked,
            grid_db: (0..=8).map(|i| 5.0 * i as f64).collect(),
            fso_snr_db: 20.0,
            rf_snr_db: 20.0,
            gamma_th_db: 5.0,
            paths: [Path::Exact].into_iter().collect(),
            mc_trials: 1_000_000,
            seed: 1,
            trunc_q: 10,
            trunc_l: 5,
            out: None,
        }
    }
}

/// Parse `start:step:stop` or a comma-separated list of dB values; the result
/// must be non-empty and strictly increasing.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = |why: &str| invalid("snr_grid", text, why);
    let num = |s: &str| -> Result<f64, ConfigError> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad("finite numbers in dB"))
    };
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("start:step:stop"));
        }
        let (start, step, stop) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(bad("step > 0 and stop >= start"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if n > 100_000 {
            return Err(bad("at most 100000 points"));
        }
        (0..n).map(|i| start + step * i as f64).collect()
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err(bad("a non-empty grid"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("strictly increasing values"));
    }
    Ok(grid)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, expected: &str) -> Result<T, ConfigError> {
    value.parse::<T>().map_err(|_| invalid(key, value, expected))
}

fn positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    parse_num::<f64>(key, value, "a positive number")
        .ok()
        .filter(|v| *v > 0.0 && v.is_finite())
        .ok_or_else(|| invalid(key, value, "a positive number in (0, inf)"))
}

fn non_negative(key: &str, value: &str) -> Result<f64, ConfigError> {
    parse_num::<f64>(key, value, "a number")
        .ok()
        .filter(|v| *v >= 0.0 && v.is_finite())
        .ok_or_else(|| invalid(key, value, "a number in [0, inf)"))
}

fn finite(key: &str, value: &str) -> Result<f64, ConfigError> {
    parse_num::<f64>(key, value, "a number")
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(key, value, "a finite number (dB)"))
}

fn count(key: &str, value: &str, min: u64) -> Result<u64, ConfigError> {
    parse_num::<u64>(key, value, "an integer")
        .ok()
        .filter(|v| *v >= min)
        .ok_or_else(|| invalid(key, value, format!("an integer >= {min}")))
}

fn small_count(key: &str, value: &str, min: u32) -> Result<u32, ConfigError> {
    count(key, value, min as u64).and_then(|v| {
        u32::try_from(v).map_err(|_| invalid(key, value, format!("an integer in [{min}, {}]", u32::MAX)))
    })
}

impl SweepSpec {
    fn apply_preset(&mut self, p: Preset) {
        match p {
            Preset::StrongTurbulence => (self.alpha, self.beta) = (2.29, 2),
            Preset::ModerateTurbulence => (self.alpha, self.beta) = (4.2, 3),
            Preset::RicianShadowedRf => (self.kappa, self.mu, self.m) = (5.0, 1, 2),
            Preset::GammaGamma => (self.g, self.omega) = (1e-6, 1.0),
            Preset::NakagamiRf => (self.kappa, self.mu) = (1e-8, self.m),
            Preset::RayleighRf => (self.kappa, self.mu, self.m) = (1e-8, 1, 1),
            Preset::KDistribution => (self.g, self.omega, self.beta) = (1.0, 0.0, 1),
        }
    }

    /// Set one key. Presets are applied immediately, so later keys override them.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "metric" => {
                self.metric = Metric::parse(value).ok_or_else(|| invalid(key, value, Metric::choices()))?
            }
            "preset" => {
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let p = Preset::parse(name).ok_or_else(|| invalid(key, name, Preset::choices()))?;
                    self.presets.push(p);
                    self.apply_preset(p);
                }
            }
            "detection" => {
                self.detection = match value {
                    "heterodyne" => Detection::Heterodyne,
                    "imdd" => Detection::ImDd,
                    _ => return Err(invalid(key, value, "heterodyne|imdd")),
                }
            }
            "alpha" => self.alpha = positive(key, value)?,
            "beta" => self.beta = small_count(key, value, 1)?,
            "g" => self.g = non_negative(key, value)?,
            "omega" => self.omega = non_negative(key, value)?,
            "xi" => self.xi = positive(key, value)?,
            "a0" => self.a0 = positive(key, value)?,
            "kappa" => self.kappa = positive(key, value)?,
            "mu" => self.mu = small_count(key, value, 1)?,
            "m" => self.m = small_count(key, value, 1)?,
            "sweep" => {
                self.sweep = SweepVar::parse(value).ok_or_else(|| invalid(key, value, SweepVar::choices()))?
            }
            "snr_grid" => self.grid_db = parse_grid(value)?,
            "fso_snr_db" => self.fso_snr_db = finite(key, value)?,
            "rf_snr_db" => self.rf_snr_db = finite(key, value)?,
            "gamma_th" => self.gamma_th_db = finite(key, value)?,
            "paths" => {
                let mut set = BTreeSet::new();
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    set.insert(Path::parse(name).ok_or_else(|| invalid(key, name, Path::choices()))?);
                }
                if set.is_empty() {
                    return Err(invalid(key, value, "at least one path"));
                }
                self.paths = set;
            }
            "mc_trials" => self.mc_trials = count(key, value, 1_000)?,
            "seed" => self.seed = count(key, value, 0)?,
            "trunc_q" => self.trunc_q = small_count(key, value, 0)?,
            "trunc_l" => self.trunc_l = small_count(key, value, 0)?,
            "out" => self.out = (!value.is_empty()).then(|| value.to_string()),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Cross-field checks that single keys cannot express.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.g + self.omega > 0.0) {
            return Err(invalid("omega", &self.omega.to_string(), "g + omega > 0"));
        }
        if self.g == 0.0 {
            return Err(invalid("g", "0", "g > 0 (use the gamma_gamma preset, g = 1e-6)"));
        }
        Ok(())
    }

    /// Effective configuration as `key = value` lines; parsing it back yields
    /// an identical spec.
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        let list = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(",");
        for key in KEYS {
            let value = match *key {
                "metric" => self.metric.name().to_string(),
                "preset" => {
                    if self.presets.is_empty() {
                        continue;
                    }
                    list(&mut self.presets.iter().map(|p| p.name().to_string()))
                }
                "detection" => self.detection.name().to_string(),
                "alpha" => self.alpha.to_string(),
                "beta" => self.beta.to_string(),
                "g" => self.g.to_string(),
                "omega" => self.omega.to_string(),
                "xi" => self.xi.to_string(),
                "a0" => self.a0.to_string(),
                "kappa" => self.kappa.to_string(),
                "mu" => self.mu.to_string(),
                "m" => self.m.to_string(),
                "sweep" => self.sweep.name().to_string(),
                "snr_grid" => list(&mut self.grid_db.iter().map(|v| v.to_string())),
                "fso_snr_db" => self.fso_snr_db.to_string(),
                "rf_snr_db" => self.rf_snr_db.to_string(),
                "gamma_th" => self.gamma_th_db.to_string(),
                "paths" => list(&mut self.paths.iter().map(|p| p.name().to_string())),
                "mc_trials" => self.mc_trials.to_string(),
                "seed" => self.seed.to_string(),
                "trunc_q" => self.trunc_q.to_string(),
                "trunc_l" => self.trunc_l.to_string(),
                "out" => match &self.out {
                    Some(p) => p.clone(),
                    None => continue,
                },
                _ => unreachable!("every key is echoed"),
            };
            writeln!(s, "{key} = {value}").expect("writing to a String cannot fail");
        }
        s
    }
}

/// Parse config text, then apply `overrides` (e.g. from flags) in order.
///
/// Lines are `key = value`; `#` starts a comment. Presets apply when their
/// line is reached, so keys after a preset override it. All overrides are
/// applied after the file, which means a flag always wins.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<SweepSpec, ConfigError> {
    let mut spec = SweepSpec::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        spec.set(key.trim(), value)?;
    }
    for (key, value) in overrides {
        spec.set(key, value)?;
    }
    spec.validate()?;
    Ok(spec)
}
