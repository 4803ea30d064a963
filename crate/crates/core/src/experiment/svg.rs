//! Minimal line plots: polylines on a fixed 800×600 canvas.

use std::fmt::Write as _;
use std::path::Path;

use super::table::{Cell, SweepTable};
use crate::error::{invalid, Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 10;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// What to draw from a table.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    /// One series per y column and group value.
    pub y: Vec<String>,
    /// Rows are split into series by the value of this column.
    pub group: Option<String>,
    pub y_label: String,
}

impl PlotSpec {
    pub fn new(title: &str, x: &str, y: &[&str]) -> Self {
        PlotSpec {
            title: title.to_string(),
            x: x.to_string(),
            y: y.iter().map(|s| s.to_string()).collect(),
            group: None,
            y_label: y.join(", "),
        }
    }

    pub fn grouped_by(mut self, column: &str) -> Self {
        self.group = Some(column.to_string());
        self
    }

    pub fn y_label(mut self, label: &str) -> Self {
        self.y_label = label.to_string();
        self
    }
}

struct Series {
    label: String,
    /// Contiguous runs of finite points.
    runs: Vec<Vec<(f64, f64)>>,
}

fn cell_label(c: &Cell) -> String {
    match c {
        Cell::Real(v) => super::table::format_real(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn collect_series(table: &SweepTable, spec: &PlotSpec) -> Result<Vec<Series>> {
    let xi = table
        .column_index(&spec.x)
        .ok_or_else(|| Error::InvalidInput(format!("no column '{}'", spec.x)))?;
    let gi = match &spec.group {
        Some(g) => Some(
            table
                .column_index(g)
                .ok_or_else(|| Error::InvalidInput(format!("no column '{g}'")))?,
        ),
        None => None,
    };
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for (r, row) in table.rows().iter().enumerate() {
        let key = gi.map(|g| cell_label(&row[g])).unwrap_or_default();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, rows)) => rows.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    let mut series = Vec::new();
    for y in &spec.y {
        let yi = table
            .column_index(y)
            .ok_or_else(|| Error::InvalidInput(format!("no column '{y}'")))?;
        for (key, rows) in &groups {
            let mut runs = vec![Vec::new()];
            for &r in rows {
                let row = &table.rows()[r];
                let (x, v) = (row[xi].as_f64(), row[yi].as_f64());
                match (x, v) {
                    (Some(x), Some(v)) if x.is_finite() && v.is_finite() => {
                        runs.last_mut().expect("run").push((x, v))
                    }
                    _ => {
                        if !runs.last().expect("run").is_empty() {
                            runs.push(Vec::new());
                        }
                    }
                }
            }
            runs.retain(|r| !r.is_empty());
            let label = match (&spec.group, spec.y.len()) {
                (Some(g), 1) => format!("{g}={key}"),
                (Some(g), _) => format!("{y}, {g}={key}"),
                (None, _) => y.clone(),
            };
            series.push(Series { label, runs });
        }
    }
    Ok(series)
}

/// Expands `[lo, hi]` to a nondegenerate range.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Renders the plot; fails when the table has no finite points to draw.
pub fn render_svg(table: &SweepTable, spec: &PlotSpec) -> Result<String> {
    if table.is_empty() {
        return invalid("empty table: nothing to plot");
    }
    let series = collect_series(table, spec)?;
    let points = series.iter().flat_map(|s| s.runs.iter().flatten());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return invalid("no finite points to plot");
    }
    let (x0, x1) = padded(x0, x1);
    let (y0, y1) = padded(y0, y1);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(&spec.x)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&spec.y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for run in &ser.runs {
            let pts: Vec<String> = run
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(table: &SweepTable, spec: &PlotSpec, path: &Path) -> Result<()> {
    let svg = render_svg(table, spec)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepTable {
        let mut t = SweepTable::new(["w", "alpha", "c0"]);
        for a in [0.0, 1.0] {
            for w in [0.0, 0.5, 1.0] {
                t.push(vec![w.into(), a.into(), (1.0 + a * w).into()]).unwrap();
            }
        }
        t
    }

    #[test]
    fn deterministic_and_grouped() {
        let spec = PlotSpec::new("C0", "w", &["c0"]).grouped_by("alpha");
        let a = render_svg(&sample(), &spec).unwrap();
        let b = render_svg(&sample(), &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polyline").count(), 2);
        assert!(a.contains("alpha=1"));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
    }

    #[test]
    fn empty_table_is_an_error() {
        let t = SweepTable::new(["w", "c0"]);
        assert!(render_svg(&t, &PlotSpec::new("x", "w", &["c0"])).is_err());
    }

    #[test]
    fn nan_breaks_the_line() {
        let mut t = SweepTable::new(["w", "c0"]);
        for (w, c) in [(0.0, 1.0), (0.5, f64::NAN), (1.0, 2.0), (1.5, 3.0)] {
            t.push(vec![w.into(), c.into()]).unwrap();
        }
        let svg = render_svg(&t, &PlotSpec::new("x", "w", &["c0"])).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
