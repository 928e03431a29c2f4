//! `fsorf`: SNR sweeps of capacity and outage for mixed FSO/RF relaying.

use std::fs;
use std::io;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use fsorf::sweep::{gnuplot_script, parse_config, run_sweep, write_csv, SweepSpec};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "fsorf", version, about = "Capacity and outage sweeps for mixed FSO/RF relaying")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ergodic capacity sweep.
    Capacity(SweepArgs),
    /// Outage probability sweep.
    Outage(SweepArgs),
    /// Sweep of the metric named by --metric or the config file.
    Sweep(SweepArgs),
}

/// Every flag mirrors a config-file key and overrides it.
#[derive(Args, Debug, Default)]
struct SweepArgs {
    /// Flat `key = value` config file.
    #[arg(long, value_name = "PATH")]
    config: Option<String>,
    /// capacity | outage (sweep subcommand only).
    #[arg(long)]
    metric: Option<String>,
    /// heterodyne | imdd
    #[arg(long)]
    detection: Option<String>,
    /// Parameter preset; repeatable, applied in order.
    #[arg(long = "preset", value_name = "NAME")]
    presets: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// avg_electrical_snr | rf_avg_snr | both_locked
    #[arg(long)]
    sweep: Option<String>,
    /// `start:step:stop` or a comma list, in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr_grid: Option<String>,
    /// FSO SNR (dB) when only the RF hop is swept.
    #[arg(long, allow_hyphen_values = true)]
    fso_snr_db: Option<String>,
    /// RF SNR (dB) when only the FSO hop is swept.
    #[arg(long, allow_hyphen_values = true)]
    rf_snr_db: Option<String>,
    /// Outage threshold in dB.
    #[arg(long, allow_hyphen_values = true)]
    gamma_th: Option<String>,
    #[arg(long)]
    trunc_q: Option<String>,
    #[arg(long)]
    trunc_l: Option<String>,
    /// Comma list of exact, asymptotic, quadrature, monte_carlo.
    #[arg(long)]
    paths: Option<String>,
    #[arg(long)]
    mc_trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// CSV output path; stdout if absent.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// Also write a gnuplot script for the CSV.
    #[arg(long, value_name = "PATH")]
    plot: Option<String>,
    /// Write the effective configuration to PATH (`-` for stderr).
    #[arg(long, value_name = "PATH")]
    emit_config: Option<String>,
}

impl SweepArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |key: &str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((key.to_string(), v.clone()));
            }
        };
        push("metric", &self.metric);
        push("detection", &self.detection);
        push("alpha", &self.alpha);
        push("beta", &self.beta);
        push("g", &self.g);
        push("omega", &self.omega);
        push("xi", &self.xi);
        push("a0", &self.a0);
        push("kappa", &self.kappa);
        push("mu", &self.mu);
        push("m", &self.m);
        push("sweep", &self.sweep);
        push("snr_grid", &self.snr_grid);
        push("fso_snr_db", &self.fso_snr_db);
        push("rf_snr_db", &self.rf_snr_db);
        push("gamma_th", &self.gamma_th);
        push("trunc_q", &self.trunc_q);
        push("trunc_l", &self.trunc_l);
        push("paths", &self.paths);
        push("mc_trials", &self.mc_trials);
        push("seed", &self.seed);
        push("out", &self.out);
        // presets go first so explicit parameter flags override them
        let mut all: Vec<(String, String)> =
            self.presets.iter().map(|p| ("preset".to_string(), p.clone())).collect();
        all.extend(out);
        all
    }
}

fn load(args: &SweepArgs, metric: Option<&str>) -> Result<SweepSpec, String> {
    let text = match &args.config {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?,
        None => String::new(),
    };
    let mut overrides = args.overrides();
    if let Some(m) = metric {
        overrides.push(("metric".to_string(), m.to_string()));
    }
    parse_config(&text, &overrides).map_err(|e| e.to_string())
}

fn run(args: SweepArgs, metric: Option<&str>) -> Result<ExitCode, (u8, String)> {
    let spec = load(&args, metric).map_err(|e| (EXIT_CONFIG, e))?;
    let echo = spec.to_config();
    info!("effective configuration:\n{echo}");
    if let Some(path) = &args.emit_config {
        if path == "-" {
            eprint!("{echo}");
        } else {
            fs::write(path, &echo).map_err(|e| (1, format!("cannot write {path}: {e}")))?;
        }
    }

    let rows = run_sweep(&spec);
    for r in &rows {
        for (path, t) in &r.timings {
            info!("{} dB {}: {:.3} s", r.snr_db, path.name(), t.as_secs_f64());
        }
    }
    let written = match &spec.out {
        Some(path) => fs::File::create(path)
            .map_err(|e| e.to_string())
            .and_then(|f| write_csv(&rows, f).map_err(|e| e.to_string())),
        None => write_csv(&rows, io::stdout().lock()).map_err(|e| e.to_string()),
    };
    written.map_err(|e| (1, format!("cannot write CSV: {e}")))?;
    if let Some(plot) = &args.plot {
        let csv = spec.out.as_deref().unwrap_or("results.csv");
        fs::write(plot, gnuplot_script(&spec, csv)).map_err(|e| (1, format!("cannot write {plot}: {e}")))?;
    }

    let failed = rows.iter().filter(|r| r.has_failure()).count();
    if failed > 0 {
        error!("{failed} of {} rows had a numeric failure; see the status column", rows.len());
        return Ok(ExitCode::from(EXIT_NUMERIC));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Capacity(a) => run(a, Some("capacity")),
        Command::Outage(a) => run(a, Some("outage")),
        Command::Sweep(a) => run(a, None),
    };
    match result {
        Ok(code) => code,
        Err((code, msg)) => {
            error!("{msg}");
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
