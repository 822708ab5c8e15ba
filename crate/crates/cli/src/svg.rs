//! Minimal SVG phase portraits.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// A phase portrait: one polyline in the `(ρ, ζ)` plane plus an optional marker.
#[derive(Debug, Clone, Default)]
pub struct Portrait {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    pub marker: Option<(f64, f64)>,
}

struct Viewport {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Viewport {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for (x, y) in points.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return Self {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            };
        }
        let pad = |lo: f64, hi: f64| {
            let w = (hi - lo).max(1e-9) * 0.05;
            (lo - w, hi + w)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Portrait {
    pub fn to_svg(&self) -> String {
        let view = Viewport::fit(self.points.iter().copied().chain(self.marker));
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let (left, bottom) = (MARGIN, HEIGHT - MARGIN);
        let (right, top) = (WIDTH - MARGIN, MARGIN);
        let _ = writeln!(
            s,
            r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
        );
        for (value, anchor, px, py) in [
            (view.x0, "start", left, bottom + 16.0),
            (view.x1, "end", right, bottom + 16.0),
        ] {
            let _ = writeln!(
                s,
                r#"<text x="{px}" y="{py}" font-size="11" text-anchor="{anchor}">{value:.3}</text>"#
            );
        }
        for (value, py) in [(view.y0, bottom), (view.y1, top + 10.0)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{py}" font-size="11" text-anchor="end">{value:.3}</text>"#,
                left - 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        let mut poly = String::new();
        for &(x, y) in self
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
        {
            let (px, py) = view.map(x, y);
            let _ = write!(poly, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.2"/>"#,
            poly.trim_end()
        );
        if let Some((x, y)) = self.marker {
            let (px, py) = view.map(x, y);
            let _ = writeln!(
                s,
                r#"<circle cx="{px:.2}" cy="{py:.2}" r="5" fill="darkorange"/>"#
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
