//! Report, plot-data, manifest and SVG writers for rate studies.

use std::fmt::Write as _;
use std::io::Write;

use anyhow::Result;
use krigrate::csvio::format_sig;
use krigrate::experiments::{StudyRun, TheoreticalSlope};
use krigrate::ExperimentConfig;
use serde::Serialize;
use sha2::{Digest, Sha256};

const SIG: usize = 6;

pub const REPORT_HEADER: &str = "nu0,nu,scheme,n_list,estimated_slope,theoretical_slope,\
relative_difference,r_squared,dropped_replications,convergence";

fn convergence_tag(ts: &TheoreticalSlope) -> &'static str {
    match ts {
        TheoreticalSlope::Rate(_) => "rate",
        TheoreticalSlope::RateWithLogFactor(_) => "rate_up_to_log",
        TheoreticalSlope::NoConvergence(_) => "none",
    }
}

pub fn write_report<W: Write>(mut out: W, runs: &[StudyRun]) -> Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for run in runs {
        let row = run.row();
        let n_list: Vec<String> = row.sample_sizes.iter().map(usize::to_string).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.nu0,
            row.nu,
            row.scheme,
            n_list.join(";"),
            format_sig(row.estimated_slope, SIG),
            format_sig(row.theoretical_slope.value(), SIG),
            row.relative_difference.map(|v| format_sig(v, SIG)).unwrap_or_else(|| "NA".into()),
            format_sig(row.r_squared, SIG),
            row.dropped_replications,
            convergence_tag(&row.theoretical_slope),
        )?;
    }
    Ok(())
}

/// Long-format regression data: one line per (study, n).
pub fn write_plot_data<W: Write>(mut out: W, runs: &[StudyRun]) -> Result<()> {
    writeln!(out, "nu0,nu,scheme,n,log_inv_n,log_mean_error")?;
    for run in runs {
        for (&(n, _), (x, y)) in run.fit.per_n_mean_error.iter().zip(run.fit.plot_points()) {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                run.config.nu0,
                run.config.nu,
                run.config.scheme,
                n,
                format_sig(x, SIG),
                format_sig(y, SIG)
            )?;
        }
    }
    Ok(())
}

/// Hex SHA-256 of the canonical JSON of the resolved configurations.
pub fn config_hash(configs: &[ExperimentConfig]) -> Result<String> {
    let bytes = serde_json::to_vec(configs)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool_version: &'static str,
    pub config_hash: String,
    pub base_seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub threads: usize,
    pub configs: &'a [ExperimentConfig],
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn svg_file_name(run: &StudyRun) -> String {
    format!("rate_{}_{}_{}.svg", run.config.scheme, run.config.nu0, run.config.nu)
}

/// Scatter of `(log(1/n), log mean error)` with the fitted line.
pub fn render_svg(run: &StudyRun) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const PAD: f64 = 48.0;
    let pts = run.fit.plot_points();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let line = |x: f64| run.fit.intercept + run.fit.slope * x;
    y0 = y0.min(line(x0)).min(line(x1));
    y1 = y1.max(line(x0)).max(line(x1));
    let dx = (x1 - x0).max(1e-12);
    let dy = (y1 - y0).max(1e-12);
    let sx = |x: f64| PAD + (x - x0) / dx * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / dy * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for &(x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y));
    }
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-width="1.5"/>"#,
        sx(x0),
        sy(line(x0)),
        sx(x1),
        sy(line(x1))
    );
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{}" font-family="sans-serif" font-size="13">{} nu0={} nu={}: slope {} (R2 {})</text>"#,
        PAD - 12.0,
        run.config.scheme,
        run.config.nu0,
        run.config.nu,
        format_sig(run.fit.slope, 4),
        format_sig(run.fit.r_squared, 3)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log(1/n)</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">log mean error</text>"#,
        H / 2.0,
        H / 2.0
    );
    s.push_str("</svg>\n");
    s
}
