//! Minimal static SVG plots: polyline charts, histograms, and a rectangle
//! heat map. CSV files carry the data contract; these are conveniences for
//! eyeballing results without external tooling.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_bounds(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        let pad = |lo: f64, hi: f64| {
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, lo + 0.5)
            }
        };
        let (x_min, x_max) = pad(x_min, x_max);
        let (y_min, y_max) = pad(y_min, y_max);
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN;
    let x1 = WIDTH - MARGIN;
    let y0 = HEIGHT - MARGIN;
    let y1 = MARGIN;
    let _ = write!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>\n\
         <text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{y_label}</text>\n\
         <text x=\"{x0}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\">{}</text>\n\
         <text x=\"{x1}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">{}</text>\n\
         <text x=\"{}\" y=\"{y0}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 18.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y0 + 14.0,
        fmt_tick(frame.x_min),
        y0 + 14.0,
        fmt_tick(frame.x_max),
        x0 - 4.0,
        fmt_tick(frame.y_min),
        x0 - 4.0,
        y1 + 4.0,
        fmt_tick(frame.y_max),
    );
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 10_000.0 {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Polyline chart with one or more named series.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(&str, &[(f64, f64)])],
) -> String {
    let mut pts = series.iter().flat_map(|(_, s)| s.iter());
    let first = pts.next().copied().unwrap_or((0.0, 0.0));
    let mut bounds = (first.0, first.0, first.1, first.1);
    for (x, y) in series.iter().flat_map(|(_, s)| s.iter()) {
        bounds.0 = bounds.0.min(*x);
        bounds.1 = bounds.1.max(*x);
        bounds.2 = bounds.2.min(*y);
        bounds.3 = bounds.3.max(*y);
    }
    let frame = Frame::from_bounds(bounds.0, bounds.1, bounds.2, bounds.3);
    let mut out = header(title);
    axes(&mut out, &frame, x_label, y_label);
    for (i, (name, points)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", frame.x(*x), frame.y(*y)))
            .collect();
        let _ = write!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{name}</text>\n",
            path.join(" "),
            WIDTH - MARGIN - 120.0,
            MARGIN + 16.0 * (i as f64 + 1.0),
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Histogram from precomputed bins `(left, right, count)`.
pub fn histogram(title: &str, x_label: &str, bins: &[(f64, f64, usize)]) -> String {
    let x_min = bins.first().map(|b| b.0).unwrap_or(0.0);
    let x_max = bins.last().map(|b| b.1).unwrap_or(1.0);
    let y_max = bins.iter().map(|b| b.2).max().unwrap_or(1) as f64;
    let frame = Frame::from_bounds(x_min, x_max, 0.0, y_max);
    let mut out = header(title);
    axes(&mut out, &frame, x_label, "count");
    for (left, right, count) in bins {
        let x = frame.x(*left);
        let w = (frame.x(*right) - x).max(0.5);
        let y = frame.y(*count as f64);
        let h = frame.y(0.0) - y;
        let _ = write!(
            out,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
             fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n"
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heat map of `values[row][col]` over row/col coordinate vectors.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
) -> String {
    let frame = Frame::from_bounds(
        xs.first().copied().unwrap_or(0.0),
        xs.last().copied().unwrap_or(1.0),
        ys.first().copied().unwrap_or(0.0),
        ys.last().copied().unwrap_or(1.0),
    );
    let v_max = values
        .iter()
        .flat_map(|row| row.iter())
        .fold(1e-12f64, |m, v| m.max(*v));
    let mut out = header(title);
    axes(&mut out, &frame, x_label, y_label);
    for (j, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let x0 = frame.x(if i == 0 {
                xs[0]
            } else {
                (xs[i - 1] + xs[i]) / 2.0
            });
            let x1 = frame.x(if i + 1 == xs.len() {
                xs[i]
            } else {
                (xs[i] + xs[i + 1]) / 2.0
            });
            let y0 = frame.y(if j + 1 == ys.len() {
                ys[j]
            } else {
                (ys[j] + ys[j + 1]) / 2.0
            });
            let y1 = frame.y(if j == 0 {
                ys[0]
            } else {
                (ys[j - 1] + ys[j]) / 2.0
            });
            let intensity = (v / v_max).clamp(0.0, 1.0);
            let shade = (255.0 - intensity * 220.0) as u8;
            let _ = write!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({shade},{shade},255)\"/>\n",
                x0,
                y0,
                (x1 - x0).abs().max(0.5),
                (y1 - y0).abs().max(0.5),
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
