//! A tiny SVG writer, just rectangles, lines, polygons and text. Numbers are
//! printed with fixed precision so output is byte-stable.

use std::fmt::Write;

use react_core::{Decision, Ellipsoid, ForestData};

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, attrs: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" {attrs}/>"#
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, attrs: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {attrs}/>"#
        );
    }

    pub fn polygon(&mut self, points: &[(f64, f64)], attrs: &str) {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(self.body, r#"<polygon points="{}" {attrs}/>"#, pts.join(" "));
    }

    pub fn text(&mut self, x: f64, y: f64, content: &str, attrs: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" {attrs}>{}</text>"#,
            esc(content)
        );
    }

    pub fn finish(self) -> Vec<u8> {
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#,
                "\n{body}</svg>\n"
            ),
            w = self.width,
            h = self.height,
            body = self.body
        )
        .into_bytes()
    }
}

fn decision_colour(d: Decision) -> &'static str {
    match d {
        Decision::Accept => "#1b7837",
        Decision::Agnostic => "#7f7f7f",
        Decision::Reject => "#b2182b",
    }
}

/// Linear map from data to pixels.
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn at(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Forest plot: shaded equivalence region, one row per study with a square
/// marker sized by inverse variance, pooled rows last as diamonds.
pub fn forest(data: &ForestData<f64>) -> Vec<u8> {
    let row_h = 26.0;
    let (left, plot_w, right) = (170.0, 420.0, 110.0);
    let top = 40.0;
    let height = top + row_h * (data.rows.len() as f64 + 1.0) + 30.0;
    let mut svg = Svg::new(left + plot_w + right, height);

    let [region_lo, region_hi] = data.region;
    let mut lo = data.rows.iter().map(|r| r.lower).fold(0.0, f64::min);
    let mut hi = data.rows.iter().map(|r| r.upper).fold(region_hi, f64::max);
    let pad = 0.05 * (hi - lo).max(1e-6);
    lo -= pad;
    hi += pad;
    let x = Axis {
        lo,
        hi,
        px_lo: left,
        px_hi: left + plot_w,
    };
    let bottom = top + row_h * data.rows.len() as f64 + 10.0;

    let shade_lo = x.at(region_lo.max(lo));
    svg.rect(
        shade_lo,
        top - 10.0,
        x.at(region_hi) - shade_lo,
        bottom - top + 10.0,
        r##"class="region" fill="#d9f0d3" fill-opacity="0.6""##,
    );
    svg.line(
        x.at(region_hi),
        top - 10.0,
        x.at(region_hi),
        bottom,
        &format!(r##"class="region-boundary" data-value="{region_hi:.6}" stroke="#1b7837" stroke-dasharray="4 3""##),
    );
    svg.line(x.at(0.0), top - 10.0, x.at(0.0), bottom, r##"stroke="#444""##);
    svg.text(
        x.at(region_hi),
        top - 16.0,
        &format!("upper bound {region_hi:.4}"),
        r#"text-anchor="middle""#,
    );

    for (k, row) in data.rows.iter().enumerate() {
        let y = top + row_h * (k as f64 + 0.5);
        let colour = decision_colour(row.decision);
        svg.text(8.0, y + 4.0, &row.label, "");
        svg.line(x.at(row.lower), y, x.at(row.upper), y, &format!(r#"stroke="{colour}" stroke-width="1.5""#));
        let s = 3.0 + 9.0 * row.marker_size.sqrt();
        let cx = x.at(row.effect);
        if row.pooled.is_some() {
            svg.polygon(
                &[(x.at(row.lower), y), (cx, y - 7.0), (x.at(row.upper), y), (cx, y + 7.0)],
                &format!(r#"class="pooled" fill="{colour}""#),
            );
        } else {
            svg.rect(cx - s / 2.0, y - s / 2.0, s, s, &format!(r#"class="study" fill="{colour}""#));
        }
        svg.text(left + plot_w + 10.0, y + 4.0, row.decision.as_str(), &format!(r#"fill="{colour}""#));
    }

    svg.line(left, bottom, left + plot_w, bottom, r##"stroke="#000""##);
    for v in [lo, 0.0, region_hi, hi] {
        svg.line(x.at(v), bottom, x.at(v), bottom + 4.0, r##"stroke="#000""##);
        svg.text(x.at(v), bottom + 16.0, &format!("{v:.3}"), r#"text-anchor="middle""#);
    }
    svg.text(left + plot_w / 2.0, bottom + 28.0, "risk difference", r#"text-anchor="middle""#);
    svg.finish()
}

/// One panel per pair of groups: the projected ellipse and the band
/// `|θ_i - θ_j| ≤ Δ`, titled with the decision.
pub fn pairwise_panels(
    region: &Ellipsoid,
    names: &[String],
    delta: f64,
    decisions: &[((usize, usize), Decision)],
) -> Vec<u8> {
    let size = 240.0;
    let gap = 30.0;
    let n = decisions.len().max(1) as f64;
    let mut svg = Svg::new(gap + n * (size + gap), size + 2.0 * gap + 20.0);
    for (k, &((i, j), decision)) in decisions.iter().enumerate() {
        let shadow = react_core::project_ellipsoid(region, (i, j)).expect("valid pair");
        let cov = shadow.covariance();
        let r = shadow.radius_sq().sqrt();
        let (ci, cj) = (shadow.center()[0], shadow.center()[1]);
        let (hw_i, hw_j) = (r * cov.get(0, 0).sqrt(), r * cov.get(1, 1).sqrt());
        let half = 1.15 * hw_i.max(hw_j).max(delta);
        let x0 = gap + k as f64 * (size + gap);
        let y0 = gap + 10.0;
        let xa = Axis {
            lo: ci - half,
            hi: ci + half,
            px_lo: x0,
            px_hi: x0 + size,
        };
        let ya = Axis {
            lo: cj - half,
            hi: cj + half,
            px_lo: y0 + size,
            px_hi: y0,
        };
        svg.rect(x0, y0, size, size, r##"fill="none" stroke="#000""##);
        // band edges θ_j = θ_i ± Δ, clipped to the panel square
        for sign in [-1.0, 1.0] {
            let off = sign * delta;
            let (a, b) = (xa.lo.max(ya.lo - off), xa.hi.min(ya.hi - off));
            if a < b {
                svg.line(
                    xa.at(a),
                    ya.at(a + off),
                    xa.at(b),
                    ya.at(b + off),
                    r##"class="band" stroke="#1b7837" stroke-dasharray="4 3""##,
                );
            }
        }
        // boundary of the shadow: centre + r L u for unit u
        let (l11, l21) = (cov.get(0, 0).sqrt(), cov.get(1, 0) / cov.get(0, 0).sqrt());
        let l22 = (cov.get(1, 1) - l21 * l21).max(0.0).sqrt();
        let pts: Vec<(f64, f64)> = (0..120)
            .map(|s| {
                let t = s as f64 / 120.0 * std::f64::consts::TAU;
                let (u, v) = (t.cos(), t.sin());
                (xa.at(ci + r * l11 * u), ya.at(cj + r * (l21 * u + l22 * v)))
            })
            .collect();
        let colour = decision_colour(decision);
        svg.polygon(&pts, &format!(r#"class="region" fill="{colour}" fill-opacity="0.3" stroke="{colour}""#));
        svg.text(
            x0 + size / 2.0,
            y0 - 8.0,
            &format!("{} vs {}: {}", names[i], names[j], decision),
            r#"text-anchor="middle""#,
        );
    }
    svg.finish()
}
