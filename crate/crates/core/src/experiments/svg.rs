//! Minimal static SVG 1.1 line plots.

use std::fmt::Write;

use crate::integrator::Trajectory;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Self { x: pad(x0, x1), y: pad(y0, y1) }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    }
}

/// Coordinate of every particle against time (d = 1, 3) or the plan view
/// of each particle's path (d = 2).
pub fn trajectory_plot(title: &str, trajectories: &[Trajectory]) -> String {
    let plan = trajectories.first().map(|t| t.dim() == 2).unwrap_or(false);
    let curves: Vec<Vec<(f64, f64)>> = trajectories
        .iter()
        .flat_map(|traj| {
            let d = traj.dim();
            (0..traj.particles()).map(move |k| {
                traj.samples
                    .iter()
                    .map(|s| if plan { (s.x.coords()[k * d], s.x.coords()[k * d + 1]) } else { (s.t, s.x.coords()[k * d]) })
                    .collect()
            })
        })
        .collect();
    let frame = Frame::fit(curves.iter().flatten().copied());
    let (xlabel, ylabel) = if plan { ("x", "y") } else { ("t", "x") };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ax0, ay0) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{ax0} {m} V{ay0} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        r = WIDTH - MARGIN
    );
    for (v, anchor_x, anchor_y, pos) in [
        (frame.x.0, ax0, ay0 + 18.0, "middle"),
        (frame.x.1, WIDTH - MARGIN, ay0 + 18.0, "middle"),
    ] {
        let _ = writeln!(svg, r#"<text x="{anchor_x:.1}" y="{anchor_y:.1}" font-size="12" text-anchor="{pos}">{v:.3}</text>"#);
    }
    for (v, y) in [(frame.y.0, ay0), (frame.y.1, MARGIN)] {
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{v:.3}</text>"#, ax0 - 6.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{xlabel}</text>"#, WIDTH / 2.0, HEIGHT - 15.0);
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.1}" font-size="14" text-anchor="middle" transform="rotate(-90 15 {:.1})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(svg, r#"<text x="{:.1}" y="30" font-size="16" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let per = trajectories.first().map(|t| t.particles()).unwrap_or(1);
    for (i, curve) in curves.iter().enumerate() {
        let mut pts = String::new();
        for &(x, y) in curve {
            let (px, py) = frame.map(x, y);
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
            pts.trim_end(),
            COLOURS[(i % per) % COLOURS.len()]
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::Configuration;
    use crate::integrator::Sample;

    #[test]
    fn plot_contains_one_polyline_per_particle() {
        let mut t = Trajectory::single(Configuration::new(2, 1, vec![0.0, 1.0]).unwrap(), 0.0);
        t.samples.push(Sample { t: 1.0, x: Configuration::new(2, 1, vec![0.5, 2.0]).unwrap() });
        let svg = trajectory_plot("a<b", &[t]);
        assert!(svg.starts_with("<?xml"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
