//! Deterministic CSV and SVG emitters for sweep tables.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Fixed float formatting so identical inputs yield identical bytes.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.12e}", v)
    }
}

/// A simple rectangular table with a header row.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    std::fs::write(path, table.to_csv()).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))
}

/// One polyline of a line plot.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Render a deterministic standalone SVG line plot.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let width = 800.0;
    let height = 560.0;
    let margin_left = 78.0;
    let margin_right = 24.0;
    let margin_top = 48.0;
    let margin_bottom = 64.0;
    let plot_w = width - margin_left - margin_right;
    let plot_h = height - margin_top - margin_bottom;

    let finite_points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &finite_points {
        x_min = x_min.min(*x);
        x_max = x_max.max(*x);
        y_min = y_min.min(*y);
        y_max = y_max.max(*y);
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
    }
    if !y_min.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max - x_min).abs() < 1e-15 {
        x_max = x_min + 1.0;
    }
    if (y_max - y_min).abs() < 1e-15 {
        y_max = y_min + 1.0;
    }
    let pad_y = 0.06 * (y_max - y_min);
    y_min -= pad_y;
    y_max += pad_y;

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            margin_left + (x - x_min) / (x_max - x_min) * plot_w,
            margin_top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">",
        width, height, width, height
    );
    let _ = writeln!(svg, "  <rect width=\"{:.0}\" height=\"{:.0}\" fill=\"white\"/>", width, height);
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"26\" font-family=\"sans-serif\" font-size=\"17\" text-anchor=\"middle\">{}</text>",
        margin_left + plot_w / 2.0,
        title
    );

    // Axes with 5 ticks each.
    let _ = writeln!(
        svg,
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        margin_left,
        margin_top + plot_h,
        margin_left + plot_w,
        margin_top + plot_h
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        margin_left, margin_top, margin_left, margin_top + plot_h
    );
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let (px, _) = to_px(fx, y_min);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
            px,
            margin_top + plot_h,
            px,
            margin_top + plot_h + 6.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{:.3}</text>",
            px,
            margin_top + plot_h + 22.0,
            fx
        );
        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let (_, py) = to_px(x_min, fy);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
            margin_left - 6.0,
            py,
            margin_left,
            py
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{:.3}</text>",
            margin_left - 10.0,
            py + 4.0,
            fy
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        margin_left + plot_w / 2.0,
        height - 16.0,
        x_label
    );
    let _ = writeln!(
        svg,
        "  <text x=\"20\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">{}</text>",
        margin_top + plot_h / 2.0,
        margin_top + plot_h / 2.0,
        y_label
    );

    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| {
                let (px, py) = to_px(x, y);
                format!("{:.2},{:.2}", px, py)
            })
            .collect();
        let _ = writeln!(
            svg,
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
            color,
            pts.join(" ")
        );
        // Legend entry.
        let ly = margin_top + 10.0 + 20.0 * idx as f64;
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" stroke-width=\"2\"/>",
            margin_left + plot_w - 150.0,
            ly,
            margin_left + plot_w - 120.0,
            ly,
            color
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
            margin_left + plot_w - 112.0,
            ly + 4.0,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    path: &Path,
) -> Result<()> {
    std::fs::write(path, render_svg(title, x_label, y_label, series))
        .map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_through_a_parser() {
        let mut t = Table::new(&["a", "b"]);
        t.push_row(vec![fmt_f64(0.5), fmt_f64(1.25e-3)]);
        t.push_row(vec![fmt_f64(-2.0), fmt_f64(7.0)]);
        let text = t.to_csv();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "a,b");
        let parsed: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
            .collect();
        assert_eq!(parsed.len(), 2);
        assert!((parsed[0][1] - 1.25e-3).abs() < 1e-18);
        assert!((parsed[1][0] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn svg_is_well_formed_and_deterministic() {
        let series = vec![
            Series {
                name: "one".into(),
                points: vec![(0.0, 1.0), (0.5, 0.8), (1.0, 1.2)],
            },
            Series {
                name: "two".into(),
                points: vec![(0.0, 0.5), (1.0, 0.9)],
            },
        ];
        let a = render_svg("t", "x", "y", &series);
        let b = render_svg("t", "x", "y", &series);
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml"));
        assert!(a.trim_end().ends_with("</svg>"));
        // Tag balance for the elements we emit.
        assert_eq!(a.matches("<svg").count(), a.matches("</svg>").count());
        assert_eq!(a.matches("<text").count(), a.matches("</text>").count());
        assert_eq!(a.matches("<polyline").count(), 2);
    }
}
