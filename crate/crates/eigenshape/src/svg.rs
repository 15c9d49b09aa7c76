//! Minimal static SVG line charts.
//!
//! The output is a single self-contained `<svg>` document: no scripts, no
//! external resources, explicit colors. Intended for plotting eigenvalue
//! curves against the two-ball envelope, but generic over any line series.

/// One polyline in a chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Any SVG color string, e.g. `#1f77b4`.
    pub color: String,
    pub width: f64,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>, color: &str) -> Self {
        Series {
            label: label.to_string(),
            points,
            color: color.to_string(),
            width: 1.6,
            dashed: false,
        }
    }

    pub fn with_width(mut self, width: f64) -> Self {
        self.width = width;
        self
    }

    pub fn with_dashes(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// Fixed palette for successive curves, chosen for contrast on white.
pub const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 58.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Largest "round" tick step (1, 2, or 5 times a power of ten) giving at
/// most `target` intervals over `span`.
fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let n = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    n * mag
}

fn tick_values(min: f64, max: f64) -> (Vec<f64>, usize) {
    let step = nice_step(max - min, 6);
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    let mut t = (min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= max + 1e-9 * (max - min) {
        // Snap values like -0.0000001 to zero so labels stay clean.
        let snapped = if t.abs() < step * 1e-6 { 0.0 } else { t };
        out.push(snapped);
        t += step;
    }
    (out, decimals)
}

fn fmt_tick(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

/// Renders series into a complete standalone SVG document.
///
/// Nonfinite points are dropped. Axis ranges cover all remaining points,
/// with 5% vertical padding. Returns a fixed 860x540 viewport.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &finite {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if finite.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - (y - y0) / (y1 - y0) * (HEIGHT - TOP - BOTTOM);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"Helvetica, Arial, sans-serif\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"26\" text-anchor=\"middle\" font-size=\"17\" fill=\"#111111\">{}</text>\n",
        WIDTH / 2.0,
        esc(title)
    ));

    // Gridlines and ticks.
    let (xticks, xdec) = tick_values(x0, x1);
    let (yticks, ydec) = tick_values(y0, y1);
    for t in &xticks {
        let x = px(*t);
        out.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            py(y1),
            py(y0)
        ));
        out.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\" fill=\"#333333\">{}</text>\n",
            HEIGHT - BOTTOM + 18.0,
            fmt_tick(*t, xdec)
        ));
    }
    for t in &yticks {
        let y = py(*t);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            px(x0),
            px(x1)
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"12\" fill=\"#333333\">{}</text>\n",
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(*t, ydec)
        ));
    }

    // Axes.
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#111111\" stroke-width=\"1.5\"/>\n",
        px(x0),
        py(y0),
        px(x1),
        py(y0)
    ));
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#111111\" stroke-width=\"1.5\"/>\n",
        px(x0),
        py(y0),
        px(x0),
        py(y1)
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"14\" fill=\"#111111\">{}</text>\n",
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 14.0,
        esc(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"14\" fill=\"#111111\" \
         transform=\"rotate(-90 20 {:.2})\">{}</text>\n",
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        esc(y_label)
    ));

    // Curves.
    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let dash = if s.dashed {
            " stroke-dasharray=\"7,4\""
        } else {
            ""
        };
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{} points=\"{}\"/>\n",
            esc(&s.color),
            s.width,
            dash,
            pts.join(" ")
        ));
    }

    // Legend, top-left inside the plot area.
    let lx = LEFT + 14.0;
    let mut ly = TOP + 10.0;
    for s in series {
        let dash = if s.dashed {
            " stroke-dasharray=\"7,4\""
        } else {
            ""
        };
        out.push_str(&format!(
            "<line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"{}\"{}/>\n",
            ly + 4.0,
            lx + 26.0,
            ly + 4.0,
            esc(&s.color),
            s.width,
            dash
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12.5\" fill=\"#111111\">{}</text>\n",
            lx + 32.0,
            ly + 8.0,
            esc(&s.label)
        ));
        ly += 18.0;
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> Vec<Series> {
        vec![
            Series::new("bound", vec![(0.0, 1.0), (1.0, 2.0), (2.0, 2.0)], "#000000")
                .with_width(2.5),
            Series::new(
                "disk <r>",
                vec![(0.0, 1.1), (1.0, 2.2), (2.0, 2.3)],
                PALETTE[0],
            ),
        ]
    }

    #[test]
    fn chart_contains_curves_axes_and_legend() {
        let svg = line_chart("values", "alpha", "mu", &demo());
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("disk &lt;r&gt;"), "legend labels are escaped");
        assert!(svg.contains(">alpha<"));
        assert!(svg.contains(">mu<"));
        // No external references, no scripting.
        assert!(!svg.contains("href"));
        assert!(!svg.contains("<script"));
    }

    #[test]
    fn output_is_deterministic() {
        let a = line_chart("t", "x", "y", &demo());
        let b = line_chart("t", "x", "y", &demo());
        assert_eq!(a, b);
    }

    #[test]
    fn nonfinite_points_are_dropped() {
        let s = vec![Series::new(
            "s",
            vec![(0.0, 1.0), (f64::NAN, 5.0), (1.0, 2.0)],
            "#123456",
        )];
        let svg = line_chart("t", "x", "y", &s);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn degenerate_ranges_still_render() {
        let s = vec![Series::new("s", vec![(1.0, 3.0), (1.0, 3.0)], "#123456")];
        let svg = line_chart("t", "x", "y", &s);
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn tick_steps_are_round_numbers() {
        assert_eq!(nice_step(10.0, 6), 2.0);
        assert_eq!(nice_step(36.0, 6), 10.0);
        assert_eq!(nice_step(0.7, 6), 0.2);
        let (ticks, dec) = tick_values(0.0, 36.3);
        assert!(ticks.contains(&10.0) && ticks.contains(&30.0));
        assert_eq!(dec, 0);
    }
}
