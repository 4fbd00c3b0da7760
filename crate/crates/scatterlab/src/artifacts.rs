//! Report files: the JSON report, run metadata, CSV tables and the residual
//! heatmap.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use scatterlab_core::energy::ResidualGrid;
use serde_json::json;

use crate::error::AppError;
use crate::run::{ConvergenceTable, RunOutput, RunReport};

pub const REPORT: &str = "report.json";
pub const METADATA: &str = "metadata.json";
pub const RESIDUAL_CSV: &str = "residual_grid.csv";
pub const CHORDS_CSV: &str = "chords.csv";
pub const CONVERGE_CSV: &str = "converge.csv";
pub const HEATMAP: &str = "heatmap.svg";

/// Heatmaps larger than this are block-averaged down to it.
const MAX_CELLS: usize = 128;

/// The report as pretty JSON. Keys are sorted and floats printed in
/// shortest round-trip form, so equal reports give equal bytes.
pub fn report_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn csv_err(e: csv::Error) -> AppError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => AppError::Io(io),
        other => AppError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// `i, j, s, t, residual` for every node pair, `N_b²` rows.
pub fn residual_csv(grid: &ResidualGrid, s: &[f64]) -> Result<Vec<u8>, AppError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "j", "s", "t", "residual"])
        .map_err(csv_err)?;
    for i in 0..grid.n {
        for j in 0..grid.n {
            w.serialize((i, j, s[i], s[j], grid.get(i, j)))
                .map_err(csv_err)?;
        }
    }
    w.into_inner().map_err(|e| AppError::Io(e.into_error()))
}

fn rows_csv<T: serde::Serialize>(rows: &[T]) -> Result<Vec<u8>, AppError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| AppError::Io(e.into_error()))
}

pub fn convergence_csv(t: &ConvergenceTable) -> Result<Vec<u8>, AppError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["level".to_string(), "n_boundary".to_string()];
    header.extend(t.quantities.iter().cloned());
    header.extend(
        t.orders
            .iter()
            .enumerate()
            .map(|(q, _)| format!("{}_order", t.quantities[q])),
    );
    w.write_record(&header).map_err(csv_err)?;
    for (k, (level, n, vals)) in t.rows.iter().enumerate() {
        let mut rec = vec![level.to_string(), n.to_string()];
        rec.extend(vals.iter().map(|v| v.to_string()));
        // the order column of a row compares it with the previous level
        rec.extend(t.orders.iter().map(|o| {
            if k == 0 {
                String::new()
            } else {
                o[k - 1].to_string()
            }
        }));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| AppError::Io(e.into_error()))
}

/// Piecewise-linear approximation of the viridis ramp on `[0, 1]`.
fn ramp(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let x = t * (STOPS.len() - 1) as f64;
    let k = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Standalone SVG heatmap of `|ν_x − 𝖱ν_y|²` over boundary arclengths
/// `(s, t)`, with axis ticks and a color bar.
pub fn heatmap_svg(grid: &ResidualGrid, length: f64) -> String {
    let n = grid.n;
    let cells = n.min(MAX_CELLS);
    let block = n.div_ceil(cells);
    let cells = n.div_ceil(block);
    let mut avg = vec![0.0; cells * cells];
    for a in 0..cells {
        for b in 0..cells {
            let (mut sum, mut count) = (0.0, 0);
            for i in a * block..((a + 1) * block).min(n) {
                for j in b * block..((b + 1) * block).min(n) {
                    sum += grid.get(i, j);
                    count += 1;
                }
            }
            avg[a * cells + b] = sum / count as f64;
        }
    }
    let vmax = avg.iter().copied().fold(0.0, f64::max);
    let (left, top, size) = (70.0, 30.0, 480.0);
    let cell = size / cells as f64;
    let bar_x = left + size + 30.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">"#,
        bar_x + 110.0,
        top + size + 60.0
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<g shape-rendering="crispEdges">"#);
    for a in 0..cells {
        for b in 0..cells {
            let v = avg[a * cells + b];
            let (r, g, bl) = ramp(if vmax > 0.0 { v / vmax } else { 0.0 });
            // s (the y node) runs along x, t (the x node) up the page
            let _ = writeln!(
                svg,
                r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#{r:02x}{g:02x}{bl:02x}"/>"##,
                left + b as f64 * cell,
                top + size - (a + 1) as f64 * cell,
                cell,
                cell
            );
        }
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{size}" height="{size}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let label = format!("{:.3}", f * length);
        let x = left + f * size;
        let y = top + size - f * size;
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
            top + size,
            top + size + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" text-anchor="middle">{label}</text>"#,
            top + size + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y}" x2="{left}" y2="{y}" stroke="black"/>"#,
            left - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#,
            left - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">s (arclength of y)</text>"#,
        left + size / 2.0,
        top + size + 40.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">t (arclength of x)</text>"#,
        top + size / 2.0,
        top + size / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle">|ν_x − Rν_y|²</text>"#,
        left + size / 2.0
    );
    let steps = 64;
    for k in 0..steps {
        let f = k as f64 / steps as f64;
        let (r, g, b) = ramp(f + 0.5 / steps as f64);
        let h = size / steps as f64;
        let _ = writeln!(
            svg,
            r##"<rect x="{bar_x}" y="{:.3}" width="20" height="{:.3}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
            top + size - (k + 1) as f64 * h,
            h + 0.5
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{bar_x}" y="{top}" width="20" height="{size}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}">{vmax:.4e}</text>"#,
        bar_x + 26.0,
        top + 4.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}">0</text>"#,
        bar_x + 26.0,
        top + size + 4.0
    );
    let _ = writeln!(svg, "</svg>");
    svg
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, AppError> {
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}

/// Writes the report, metadata and whichever tables the run produced.
/// Returns the written paths.
pub fn emit(out: &RunOutput, dir: &Path, threads: usize) -> Result<Vec<PathBuf>, AppError> {
    fs::create_dir_all(dir)?;
    let mut paths = vec![write(dir, REPORT, report_json(&out.report).as_bytes())?];
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let timings: serde_json::Map<String, serde_json::Value> = out
        .timings
        .iter()
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "threads": threads,
        "finished_unix_seconds": unix,
        "task_seconds": timings,
        "total_seconds": out.timings.iter().map(|t| t.1).sum::<f64>(),
    });
    let mut meta = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    meta.push('\n');
    paths.push(write(dir, METADATA, meta.as_bytes())?);
    if let Some((grid, s, length)) = &out.tables.residual_grid {
        paths.push(write(dir, RESIDUAL_CSV, &residual_csv(grid, s)?)?);
        paths.push(write(dir, HEATMAP, heatmap_svg(grid, *length).as_bytes())?);
    }
    if !out.tables.chords.is_empty() {
        paths.push(write(dir, CHORDS_CSV, &rows_csv(&out.tables.chords)?)?);
    }
    if let Some(t) = &out.tables.convergence {
        paths.push(write(dir, CONVERGE_CSV, &convergence_csv(t)?)?);
    }
    Ok(paths)
}
