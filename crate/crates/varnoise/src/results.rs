//! Precision-recall tables and SVG plots.
//!
//! Layout under the output directory:
//!
//! ```text
//! <class>/<shape>/<method>_<points>.csv   shape,method,points,recall_pos,precision
//! <class>/<shape>/descriptors.svg         descriptor series of the base contour
//! <class>/average.csv                     class,method,points,recall_pos,precision
//! <class>/pr.svg                          class-average curves, one panel per level
//! manifest.txt                            every file above, one per line
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use varnoise_core::evaluation::average_pr;
use varnoise_core::{Method, PrCurve};

use crate::error::{Error, Result};

pub const RESULT_COLUMNS: [&str; 5] = ["shape", "method", "points", "recall_pos", "precision"];
pub const AVERAGE_COLUMNS: [&str; 5] = ["class", "method", "points", "recall_pos", "precision"];
pub const MANIFEST_NAME: &str = "manifest.txt";

/// One precision-recall curve of one method at one noising level.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub method: Method,
    pub points: usize,
    pub pr: PrCurve,
}

/// A per-point series to plot, with marked indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRecord {
    pub name: String,
    pub values: Vec<f64>,
    pub marks: Vec<usize>,
}

/// Everything produced for one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub class: String,
    pub shape: String,
    pub curves: Vec<CurveRecord>,
    pub series: Vec<SeriesRecord>,
}

/// Files written, relative to the output directory, in write order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub files: Vec<PathBuf>,
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir`, so a
/// reader never sees a partial file.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(&target).map_err(|e| Error::io(&target, e.error))?;
    Ok(target)
}

fn relative(out_dir: &Path, path: &Path) -> PathBuf {
    path.strip_prefix(out_dir).unwrap_or(path).to_path_buf()
}

/// Header then one row per recall position of each curve.
fn pr_table<'a>(label: &str, columns: [&str; 5], curves: impl IntoIterator<Item = &'a CurveRecord>) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for curve in curves {
        let (method, points) = (curve.method.name(), curve.points.to_string());
        for (m, value) in curve.pr.values.iter().enumerate() {
            w.write_record([label, method, &points, &(m + 1).to_string(), &value.to_string()])?;
        }
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

fn curve_file_name(curve: &CurveRecord) -> String {
    format!("{}_{}.csv", curve.method.name(), curve.points)
}

/// Writes one shape's tables and descriptor plot.
pub fn write_shape(report: &ShapeReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let dir = out_dir.join(&report.class).join(&report.shape);
    let mut files = Vec::new();
    for curve in &report.curves {
        let name = curve_file_name(curve);
        let bytes = pr_table(&report.shape, RESULT_COLUMNS, [curve]).map_err(|e| Error::csv(dir.join(&name), e))?;
        files.push(relative(out_dir, &write_atomic(&dir, &name, &bytes)?));
    }
    if !report.series.is_empty() {
        let svg = series_svg(&format!("{}/{}", report.class, report.shape), &report.series);
        files.push(relative(out_dir, &write_atomic(&dir, "descriptors.svg", svg.as_bytes())?));
    }
    Ok(files)
}

/// Point-wise class averages over every shape with a curve for the method
/// and level, ordered by method then level. Classes without any curve are
/// left out.
pub fn class_averages(reports: &[ShapeReport]) -> Result<BTreeMap<String, Vec<CurveRecord>>> {
    let mut grouped: BTreeMap<&str, BTreeMap<(usize, usize), (Method, Vec<PrCurve>)>> = BTreeMap::new();
    for report in reports {
        let class = grouped.entry(&report.class).or_default();
        for curve in report.curves.iter().filter(|c| !c.pr.is_empty()) {
            let order = Method::DETECTORS.iter().position(|&m| m == curve.method).unwrap_or(Method::DETECTORS.len());
            class
                .entry((order, curve.points))
                .or_insert_with(|| (curve.method, Vec::new()))
                .1
                .push(curve.pr.clone());
        }
    }
    let mut out = BTreeMap::new();
    for (class, curves) in grouped {
        let averaged = curves
            .into_iter()
            .map(|((_, points), (method, prs))| Ok(CurveRecord { method, points, pr: average_pr(&prs)? }))
            .collect::<Result<Vec<_>>>()?;
        if !averaged.is_empty() {
            out.insert(class.to_string(), averaged);
        }
    }
    Ok(out)
}

/// Writes the class averages and their plots.
pub fn write_class_summaries(reports: &[ShapeReport], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for (class, curves) in class_averages(reports)? {
        let dir = out_dir.join(&class);
        let table = pr_table(&class, AVERAGE_COLUMNS, &curves).map_err(|e| Error::csv(dir.join("average.csv"), e))?;
        files.push(relative(out_dir, &write_atomic(&dir, "average.csv", &table)?));
        let svg = pr_svg(&class, &curves);
        files.push(relative(out_dir, &write_atomic(&dir, "pr.svg", svg.as_bytes())?));
    }
    Ok(files)
}

/// Writes every shape, then the class summaries, then `manifest.txt`.
pub fn write_results(reports: &[ShapeReport], out_dir: &Path) -> Result<Manifest> {
    let mut files = Vec::new();
    for report in reports {
        files.extend(write_shape(report, out_dir)?);
    }
    files.extend(write_class_summaries(reports, out_dir)?);
    let manifest = Manifest { files };
    write_manifest(&manifest, out_dir)?;
    Ok(manifest)
}

pub fn write_manifest(manifest: &Manifest, out_dir: &Path) -> Result<()> {
    let mut text = String::new();
    for f in &manifest.files {
        let _ = writeln!(text, "{}", f.display());
    }
    write_atomic(out_dir, MANIFEST_NAME, text.as_bytes()).map(|_| ())
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 220.0;
const MARGIN: f64 = 40.0;

struct Panel<'a> {
    title: String,
    x_label: &'a str,
    lines: Vec<(String, Vec<(f64, f64)>)>,
    marks: &'a [usize],
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn draw_panel(svg: &mut String, panel: &Panel, left: f64, top: f64) {
    let (x0, x1) = extent(panel.lines.iter().flat_map(|(_, l)| l.iter().map(|p| p.0)));
    let (y0, y1) = extent(panel.lines.iter().flat_map(|(_, l)| l.iter().map(|p| p.1)));
    let (w, h) = (PANEL_W - 2.0 * MARGIN, PANEL_H - 2.0 * MARGIN);
    let sx = |x: f64| left + MARGIN + (x - x0) / (x1 - x0) * w;
    let sy = |y: f64| top + MARGIN + (y1 - y) / (y1 - y0) * h;
    let _ = writeln!(
        svg,
        r##"<rect x="{:.1}" y="{:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#888"/>"##,
        left + MARGIN,
        top + MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        left + PANEL_W / 2.0,
        top + MARGIN - 12.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#,
        left + PANEL_W / 2.0,
        top + PANEL_H - 10.0,
        escape(panel.x_label)
    );
    for (y, anchor) in [(y0, top + MARGIN + h), (y1, top + MARGIN + 8.0)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{anchor:.1}" font-size="9" text-anchor="end">{}</text>"#,
            left + MARGIN - 3.0,
            short(y)
        );
    }
    for &m in panel.marks {
        let x = sx(m as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#bbb" stroke-dasharray="2,2"/>"##,
            top + MARGIN,
            top + MARGIN + h
        );
    }
    for (k, (label, line)) in panel.lines.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = line.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="9" fill="{colour}">{}</text>"#,
            left + PANEL_W - MARGIN + 3.0,
            top + MARGIN + 10.0 + 11.0 * k as f64,
            escape(label)
        );
    }
}

fn short(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn document(panels: &[Panel]) -> String {
    let width = (PANEL_W + 40.0) * panels.len().max(1) as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL_H:.0}" viewBox="0 0 {width:.0} {PANEL_H:.0}" font-family="sans-serif">"#
    );
    for (k, panel) in panels.iter().enumerate() {
        draw_panel(&mut svg, panel, k as f64 * (PANEL_W + 40.0), 0.0);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Class-average precision against recall position, one panel per level.
pub fn pr_svg(class: &str, curves: &[CurveRecord]) -> String {
    let mut levels: Vec<usize> = curves.iter().map(|c| c.points).collect();
    levels.sort_unstable();
    levels.dedup();
    let panels: Vec<Panel> = levels
        .iter()
        .map(|&points| Panel {
            title: format!("{class}, {points} points"),
            x_label: "GT index",
            lines: curves
                .iter()
                .filter(|c| c.points == points)
                .map(|c| {
                    let line = c.pr.values.iter().enumerate().map(|(m, &v)| ((m + 1) as f64, v)).collect();
                    (c.method.name().to_string(), line)
                })
                .collect(),
            marks: &[],
        })
        .collect();
    document(&panels)
}

/// Per-point series, each scaled to its own range, sharing one panel.
pub fn series_svg(title: &str, series: &[SeriesRecord]) -> String {
    let lines = series
        .iter()
        .map(|s| {
            let (lo, hi) = extent(s.values.iter().copied());
            let line = s
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as f64, (v - lo) / (hi - lo)))
                .collect();
            (s.name.clone(), line)
        })
        .collect();
    let marks = series.first().map_or(&[][..], |s| &s.marks[..]);
    document(&[Panel {
        title: title.to_string(),
        x_label: "point index",
        lines,
        marks,
    }])
}
