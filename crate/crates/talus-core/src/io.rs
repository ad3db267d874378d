//! CSV persistence for snapshots, diagnostics and reports.
//!
//! Floats are rendered with Rust's shortest round-trip formatting, so reading
//! a file back reproduces every node value exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::diagnostics::{ConvergenceReport, Snapshot, Snapshot2D, StepRecord};
use crate::error::{Error, Result};
use crate::field::LayerState;
use crate::grid::{Grid1D, Grid2D};
use crate::reference::GeyserReport;
use crate::scenario::{render_scenario, ScenarioSpec};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: PathBuf::from(path),
        source,
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(content.as_bytes()).map_err(io_err(path))?;
    Ok(())
}

/// 1-D snapshot: '#' metadata lines, then "x,u,v" rows in ascending x.
pub fn write_snapshot_1d(path: &Path, snap: &Snapshot, grid: &Grid1D) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# scheduled_t = {}\n", snap.scheduled_t));
    out.push_str(&format!("# t = {}\n", snap.state.t));
    out.push_str("x,u,v\n");
    for i in 0..=grid.intervals() {
        out.push_str(&format!(
            "{},{},{}\n",
            grid.x(i),
            snap.state.u[i],
            snap.state.v[i]
        ));
    }
    write_file(path, &out)
}

/// Reads a 1-D snapshot back; returns (scheduled_t, state).
pub fn read_snapshot_1d(path: &Path) -> Result<(f64, LayerState)> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let fail = |line: usize, message: String| Error::Format {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut scheduled_t = f64::NAN;
    let mut t = f64::NAN;
    let mut u = Vec::new();
    let mut v = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if let Some(meta) = raw.strip_prefix('#') {
            if let Some((key, value)) = meta.split_once('=') {
                let value = value
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| fail(lineno, format!("invalid number '{}'", value.trim())))?;
                match key.trim() {
                    "scheduled_t" => scheduled_t = value,
                    "t" => t = value,
                    _ => {}
                }
            }
            continue;
        }
        if !saw_header {
            if raw != "x,u,v" {
                return Err(fail(lineno, format!("expected header x,u,v, got '{raw}'")));
            }
            saw_header = true;
            continue;
        }
        let mut cols = raw.split(',');
        let mut next = |name: &str| -> Result<f64> {
            cols.next()
                .ok_or_else(|| fail(lineno, format!("missing column {name}")))?
                .parse::<f64>()
                .map_err(|_| fail(lineno, format!("invalid number in column {name}")))
        };
        let _x = next("x")?;
        u.push(next("u")?);
        v.push(next("v")?);
    }
    if u.is_empty() {
        return Err(fail(1, "snapshot has no data rows".into()));
    }
    Ok((scheduled_t, LayerState::new(u, v, t)))
}

/// 2-D snapshot: per-field heightmap CSVs (row index = y node ascending)
/// plus a metadata sidecar.
pub fn write_snapshot_2d(dir: &Path, label: &str, snap: &Snapshot2D, grid: &Grid2D) -> Result<()> {
    let n = grid.intervals();
    let dump = |field: &[f64]| {
        let mut out = String::new();
        for k in 0..=n {
            let row: Vec<String> = (0..=n)
                .map(|i| field[k * (n + 1) + i].to_string())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    };
    write_file(&dir.join(format!("{label}_u.csv")), &dump(&snap.state.u))?;
    write_file(&dir.join(format!("{label}_v.csv")), &dump(&snap.state.v))?;
    let meta = format!(
        "scheduled_t = {}\nt = {}\nn = {}\n",
        snap.scheduled_t, snap.state.t, n
    );
    write_file(&dir.join(format!("{label}.meta")), &meta)
}

/// Diagnostics series: one row per accepted step.
pub fn write_diagnostics(path: &Path, series: &[StepRecord]) -> Result<()> {
    let mut out = String::from("t,max_uv,max_slope,min_u,min_v,volume,dt,retries\n");
    for r in series {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.t, r.max_uv, r.max_slope, r.min_u, r.min_v, r.volume, r.dt, r.retries
        ));
    }
    write_file(path, &out)
}

/// Run manifest: the canonical scenario rendering, every dt used, and the
/// checker verdicts.
pub fn write_manifest(
    path: &Path,
    spec: &ScenarioSpec,
    series: &[StepRecord],
    verdicts: &[(&str, bool)],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("scheme_version = {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str("# resolved scenario\n");
    out.push_str(&render_scenario(spec));
    out.push_str("# steps\n");
    let dts: Vec<String> = series.iter().map(|r| r.dt.to_string()).collect();
    out.push_str(&format!("dt_used = {}\n", dts.join(",")));
    if !verdicts.is_empty() {
        out.push_str("# checks\n");
        for (name, pass) in verdicts {
            out.push_str(&format!(
                "check.{name} = {}\n",
                if *pass { "pass" } else { "fail" }
            ));
        }
    }
    write_file(path, &out)
}

pub fn write_convergence_report(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let mut out = String::from("coarse_n,fine_n,u_sup_gap,v_l2_gap\n");
    for (i, pair) in report.meshes.windows(2).enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            pair[0], pair[1], report.u_gaps[i], report.v_gaps_l2[i]
        ));
    }
    write_file(path, &out)
}

pub fn write_geyser_report(path: &Path, report: &GeyserReport) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("x0 = {}\n", report.x0));
    out.push_str(&format!("x0_node = {}\n", report.x0_node));
    out.push_str(&format!("initial_max = {}\n", report.initial_max));
    out.push_str(&format!("predicted_rate = {}\n", report.predicted_rate));
    out.push_str(&format!("measured_rate = {}\n", report.measured_rate));
    out.push_str(&format!("tolerance = {}\n", report.tolerance));
    match report.exceedance {
        Some((t, mag)) => {
            out.push_str(&format!(
                "exceedance = yes\nexceedance_t = {t}\nexceedance_magnitude = {mag}\n"
            ));
        }
        None => out.push_str("exceedance = no\n"),
    }
    write_file(path, &out)
}
