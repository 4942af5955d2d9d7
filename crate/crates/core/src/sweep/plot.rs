//! Static SVG plots of the maximal norm term against eccentricity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::report::{fmt_sig6, ResultPoint};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = ["#2ca02c", "#ff7f0e", "#1f77b4", "#d62728", "#9467bd", "#8c564b"];

/// One curve: points sorted by eccentricity for a fixed `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub gamma: f64,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    /// Smallest eccentricity whose norm is at least one.
    pub fn first_crossing(&self) -> Option<f64> {
        self.points.iter().find(|(_, n)| *n >= 1.0).map(|(e, _)| *e)
    }
}

/// Groups points by `γ` (descending, as in the usual legend order), sorting
/// each series by eccentricity and dropping duplicate eccentricities.
pub fn group_series(points: &[ResultPoint]) -> Vec<Series> {
    let mut by_gamma: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for p in points {
        by_gamma
            .entry(p.gamma.to_bits())
            .or_default()
            .push((p.eccentricity, p.max_norm));
    }
    let mut series: Vec<Series> = by_gamma
        .into_iter()
        .map(|(bits, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.dedup_by(|a, b| a.0 == b.0);
            Series {
                gamma: f64::from_bits(bits),
                points: pts,
            }
        })
        .collect();
    series.sort_by(|a, b| b.gamma.total_cmp(&a.gamma));
    series
}

/// Plain-text data behind the plot: `gamma eccentricity max_norm` per line.
pub fn plot_data(series: &[Series]) -> String {
    let mut out = String::from("# gamma eccentricity max_norm\n");
    for s in series {
        for (e, n) in &s.points {
            let _ = writeln!(out, "{} {} {}", fmt_sig6(s.gamma), fmt_sig6(*e), fmt_sig6(*n));
        }
    }
    out
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let pow = 10f64.powf(raw.log10().floor());
    let frac = raw / pow;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * pow
}

/// Renders an SVG 1.1 document with one polyline per series and a dashed
/// reference line at norm 1.
pub fn render_svg(series: &[Series], title: &str) -> String {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (mut x_lo, mut x_hi) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    if !x_lo.is_finite() {
        (x_lo, x_hi) = (0.0, 1.0);
    }
    if x_hi - x_lo < 1e-9 {
        x_lo -= 0.05;
        x_hi += 0.05;
    }
    let y_top = all.iter().map(|p| p.1).fold(1.0f64, f64::max) * 1.1;
    let y_lo = 0.0;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (1.0 - (y - y_lo) / (y_top - y_lo)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );

    // axes
    let (x0, x1, y0, y1) = (sx(x_lo), sx(x_hi), sy(y_lo), sy(y_top));
    let _ = writeln!(
        svg,
        r#"<path d="M {x0:.1} {y1:.1} L {x0:.1} {y0:.1} L {x1:.1} {y0:.1}" stroke="black" fill="none"/>"#
    );
    let xs = nice_step(x_hi - x_lo);
    let mut t = (x_lo / xs).ceil() * xs;
    while t <= x_hi + 1e-12 {
        let px = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            trim_tick(t)
        );
        t += xs;
    }
    let ys = nice_step(y_top - y_lo);
    let mut t = 0.0;
    while t <= y_top + 1e-12 {
        let py = sy(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            trim_tick(t)
        );
        t += ys;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">eccentricity</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">max norm term</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    let one = sy(1.0);
    let _ = writeln!(
        svg,
        r##"<line x1="{x0:.1}" y1="{one:.1}" x2="{x1:.1}" y2="{one:.1}" stroke="#555555" stroke-dasharray="6 4"/>"##
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.points.len() > 1 {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|(e, n)| format!("{:.2},{:.2}", sx(*e), sy(*n)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" stroke="{color}" stroke-width="1.5" fill="none"/>"#,
                pts.join(" ")
            );
        }
        for (e, n) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sx(*e),
                sy(*n)
            );
        }
        let ly = MARGIN_TOP + 16.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">γ = {}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            s.gamma
        );
    }
    let _ = writeln!(svg, "</svg>");
    svg
}

fn trim_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_plot_is_valid_svg() {
        let svg = render_svg(&[], "empty");
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<circle"));
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn grouping_and_crossing() {
        let pts = [
            (0.3, 3.5, 1.07),
            (0.1, 3.5, 0.72),
            (0.2, 3.5, 0.72),
            (0.33, 3.1, 1.01),
            (0.32, 3.1, 0.97),
        ]
        .map(|(e, g, n)| ResultPoint {
            eccentricity: e,
            gamma: g,
            max_norm: n,
        });
        let s = group_series(&pts);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].gamma, 3.5);
        assert_eq!(s[0].points[0].0, 0.1);
        assert_eq!(s[0].first_crossing(), Some(0.3));
        assert_eq!(s[1].first_crossing(), Some(0.33));
        let data = plot_data(&s);
        assert_eq!(data.lines().count(), 6);
        let svg = render_svg(&s, "t");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 5);
    }
}
