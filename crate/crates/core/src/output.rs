//! CSV and SVG emission.
//!
//! CSV is the canonical output format: one comment line carrying the
//! resolved-config hash, a header row, then the data. Floats are written
//! with Rust's shortest round-trip formatting, so identical inputs produce
//! byte-identical files. The SVG emitter is a deliberately small polyline
//! renderer for quick looks at the figures; it has no styling ambitions.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::Result;

/// Render a CSV document: `# config=<hash>`, header, rows.
pub fn render_csv(config_hash: &str, header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config={config_hash}");
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn write_csv(path: &Path, config_hash: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_csv(config_hash, header, rows).as_bytes())?;
    Ok(())
}

/// How a series is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStyle {
    Line,
    Dots,
}

/// One plotted series.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: SeriesStyle,
}

const PALETTE: [&str; 5] = ["#1f6fb2", "#c44e52", "#2d8659", "#8172b2", "#937860"];

/// A single panel with axes, labels and its series.
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Write one SVG file with the given panels side by side.
pub fn write_svg(path: &Path, panels: &[Panel]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let panel_w = 360.0;
    let panel_h = 300.0;
    let margin = 48.0;
    let total_w = panels.len() as f64 * panel_w;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w}\" height=\"{panel_h}\" \
         viewBox=\"0 0 {total_w} {panel_h}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(svg, "<rect width=\"{total_w}\" height=\"{panel_h}\" fill=\"white\"/>");

    for (pi, panel) in panels.iter().enumerate() {
        let x0 = pi as f64 * panel_w + margin;
        let y0 = margin;
        let plot_w = panel_w - 1.6 * margin;
        let plot_h = panel_h - 2.0 * margin;

        // data bounds with a small pad
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &panel.series {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        if xs.is_empty() {
            continue;
        }
        let (x_min, x_max) = bounds(&xs);
        let (y_min, y_max) = bounds(&ys);
        let to_px = |x: f64, y: f64| -> (f64, f64) {
            (
                x0 + (x - x_min) / (x_max - x_min) * plot_w,
                y0 + plot_h - (y - y_min) / (y_max - y_min) * plot_h,
            )
        };

        // frame and labels
        let _ = writeln!(
            svg,
            "<rect x=\"{x0}\" y=\"{y0}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" \
             stroke=\"#444\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>",
            x0 + plot_w / 2.0,
            y0 - 10.0,
            xml_escape(&panel.title)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            x0 + plot_w / 2.0,
            y0 + plot_h + 30.0,
            xml_escape(&panel.x_label)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>",
            x0 - 34.0,
            y0 + plot_h / 2.0,
            x0 - 34.0,
            y0 + plot_h / 2.0,
            xml_escape(&panel.y_label)
        );
        // min/max tick labels
        let _ = writeln!(
            svg,
            "<text x=\"{x0}\" y=\"{}\" font-size=\"9\">{}</text>",
            y0 + plot_h + 12.0,
            short(x_min)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"9\">{}</text>",
            x0 + plot_w,
            y0 + plot_h + 12.0,
            short(x_max)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"9\">{}</text>",
            x0 - 4.0,
            y0 + plot_h,
            short(y_min)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"9\">{}</text>",
            x0 - 4.0,
            y0 + 8.0,
            short(y_max)
        );

        for (si, s) in panel.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            match s.style {
                SeriesStyle::Line => {
                    let mut d = String::new();
                    for (k, &(x, y)) in s.points.iter().enumerate() {
                        let (px, py) = to_px(x, y);
                        let _ = write!(d, "{}{px:.2},{py:.2} ", if k == 0 { "M" } else { "L" });
                    }
                    let _ = writeln!(
                        svg,
                        "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\"/>"
                    );
                }
                SeriesStyle::Dots => {
                    for &(x, y) in &s.points {
                        let (px, py) = to_px(x, y);
                        let _ = writeln!(
                            svg,
                            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"1.8\" fill=\"{color}\"/>"
                        );
                    }
                }
            }
            // legend entry
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"{color}\">{}</text>",
                x0 + 6.0,
                y0 + 14.0 + 12.0 * si as f64,
                xml_escape(&s.label)
            );
        }
    }
    let _ = writeln!(svg, "</svg>");
    std::fs::write(path, svg)?;
    Ok(())
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

fn short(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 10000.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_hash_comment_and_header() {
        let text = render_csv("deadbeef", &["x", "rho"], &[vec![1.0, 2.5], vec![3.0, 0.125]]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# config=deadbeef"));
        assert_eq!(lines.next(), Some("x,rho"));
        assert_eq!(lines.next(), Some("1,2.5"));
        assert_eq!(lines.next(), Some("3,0.125"));
    }

    #[test]
    fn csv_is_byte_stable() {
        let rows = vec![vec![0.1, 1.0 / 3.0], vec![6.378_914_120_1e2, -4.5]];
        let a = render_csv("h", &["a", "b"], &rows);
        let b = render_csv("h", &["a", "b"], &rows);
        assert_eq!(a, b);
    }

    #[test]
    fn svg_writes_panels() {
        let dir = std::env::temp_dir().join("eulerflow_svg_test");
        let path = dir.join("test.svg");
        let panel = Panel {
            title: "demo".to_string(),
            x_label: "x".to_string(),
            y_label: "rho".to_string(),
            series: vec![Series {
                label: "t=0".to_string(),
                points: (0..50).map(|i| (i as f64, (i as f64 * 0.3).sin())).collect(),
                style: SeriesStyle::Line,
            }],
        };
        write_svg(&path, &[panel]).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert!(body.starts_with("<svg"));
        assert!(body.contains("<path"));
        assert!(body.trim_end().ends_with("</svg>"));
    }
}
