//! SVG rendering of `F0` with horizontal level lines.

use std::fmt::Write;

use isorigid::poly::Extremum;

pub struct Level {
    pub label: String,
    pub height: f64,
}

pub struct Plot<'a> {
    pub title: String,
    pub samples: &'a [(f64, f64)],
    pub levels: &'a [Level],
    pub critical: &'a [Extremum],
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
    (lo - pad, hi + pad)
}

impl Plot<'_> {
    pub fn render(&self) -> String {
        let (x0, x1) = bounds(self.samples.iter().map(|s| s.0));
        let (y0, y1) = bounds(
            self.samples
                .iter()
                .map(|s| s.1)
                .chain(self.levels.iter().map(|l| l.height)),
        );
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<title>{}</title>"#, escape(&self.title));
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        if x0 < 0.0 && x1 > 0.0 {
            let _ = writeln!(
                s,
                r##"<line x1="{0:.3}" y1="{MARGIN}" x2="{0:.3}" y2="{1}" stroke="#bbbbbb"/>"##,
                px(0.0),
                HEIGHT - MARGIN
            );
        }
        for l in self.levels {
            let y = py(l.height);
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#c03030" stroke-dasharray="6 4"/>"##,
                WIDTH - MARGIN
            );
            let _ = writeln!(
                s,
                r##"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" fill="#c03030" text-anchor="end">{}</text>"##,
                WIDTH - MARGIN - 4.0,
                y - 4.0,
                escape(&l.label)
            );
        }
        let points: Vec<String> = self
            .samples
            .iter()
            .map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="2" points="{}"/>"##,
            points.join(" ")
        );
        for c in self.critical {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#,
                px(c.x),
                py(c.value)
            );
        }
        let ticks = [(x0, y0), (x1, y1)];
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="{:.3}" font-family="sans-serif" font-size="11">x = {:.4}</text>"#,
            HEIGHT - MARGIN + 16.0,
            ticks[0].0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="end">x = {:.4}</text>"#,
            WIDTH - MARGIN,
            HEIGHT - MARGIN + 16.0,
            ticks[1].0
        );
        let _ = writeln!(
            s,
            r#"<text x="4" y="{:.3}" font-family="sans-serif" font-size="11">{:.4}</text>"#,
            HEIGHT - MARGIN,
            ticks[0].1
        );
        let _ = writeln!(
            s,
            r#"<text x="4" y="{:.3}" font-family="sans-serif" font-size="11">{:.4}</text>"#,
            MARGIN + 10.0,
            ticks[1].1
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        s.push_str("</svg>\n");
        s
    }
}
