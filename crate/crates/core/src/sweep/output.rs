use std::io::Write;

use super::config::{Metric, SweepSpec};
use super::run::ResultRow;

pub const CSV_HEADER: [&str; 8] = [
    "snr_db",
    "exact",
    "asymptotic",
    "quadrature",
    "mc_mean",
    "mc_stderr",
    "tail_estimate",
    "status",
];

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// Write rows as CSV with the fixed header. Missing values are `NA`.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.snr_db.to_string(),
            cell(r.exact),
            cell(r.asymptotic),
            cell(r.quadrature),
            cell(r.mc_mean),
            cell(r.mc_stderr),
            cell(r.tail_estimate),
            r.status(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV as a string.
pub fn emit_csv(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// A gnuplot script plotting every CSV column against SNR.
pub fn gnuplot_script(spec: &SweepSpec, csv_path: &str) -> String {
    let (ylabel, logscale) = match spec.metric {
        Metric::Capacity => ("Ergodic capacity (bits/channel use)", ""),
        Metric::Outage => ("Outage probability", "set logscale y\nset format y '10^{%L}'\n"),
    };
    format!(
        "set datafile separator ','\n\
         set datafile missing 'NA'\n\
         set key autotitle columnhead\n\
         set xlabel 'SNR (dB)'\n\
         set ylabel '{ylabel}'\n\
         {logscale}\
         set grid\n\
         plot '{csv_path}' using 1:2 with lines, \\\n\
         \x20    '' using 1:3 with lines dashtype 2, \\\n\
         \x20    '' using 1:4 with points pointtype 6, \\\n\
         \x20    '' using 1:5:6 with yerrorbars pointtype 2\n"
    )
}
