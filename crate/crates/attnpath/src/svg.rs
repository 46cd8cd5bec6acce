//! Scanpath overlays as SVG 1.1.
//!
//! Circles are sized by fixation duration and numbered in order; arrows
//! connect consecutive fixations (a loop when the same AOI is named twice
//! in a row). Coordinates are written with two decimals and attributes in
//! a fixed order, so output is byte-stable.

use std::fmt::Write as _;

use attnpath_core::{AoiRegistry, Scanpath};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub base_px: f64,
    pub scale_px_per_s: f64,
    /// Optional image reference drawn under the scanpath.
    pub background: Option<String>,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            base_px: 6.0,
            scale_px_per_s: 40.0,
            background: None,
        }
    }
}

pub const MIN_RADIUS_PX: f64 = 4.0;
pub const MAX_RADIUS_PX: f64 = 60.0;

impl SvgStyle {
    pub fn display_radius(&self, time_spent_s: f64) -> f64 {
        (self.base_px + self.scale_px_per_s * time_spent_s).clamp(MIN_RADIUS_PX, MAX_RADIUS_PX)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_scanpath_svg(path: &Scanpath, registry: &AoiRegistry, style: &SvgStyle) -> String {
    let (w, h) = (registry.canvas_w(), registry.canvas_h());
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    let _ = writeln!(
        out,
        "<!-- attnpath scanpath session={} fixations={} base_px={:.6} scale_px_per_s={:.6} -->",
        escape(&path.session_id),
        path.len(),
        style.base_px,
        style.scale_px_per_s
    );
    let _ = writeln!(
        out,
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto"><path d="M 0 0 L 10 5 L 0 10 z" fill="#b2182b"/></marker></defs>"##
    );
    let _ = writeln!(
        out,
        r##"<rect x="0.00" y="0.00" width="{w:.2}" height="{h:.2}" fill="#ffffff"/>"##
    );
    if let Some(bg) = &style.background {
        let _ = writeln!(
            out,
            r#"<image x="0.00" y="0.00" width="{w:.2}" height="{h:.2}" preserveAspectRatio="none" xlink:href="{}"/>"#,
            escape(bg)
        );
    }

    let radii: Vec<f64> = path
        .fixations
        .iter()
        .map(|f| style.display_radius(f.time_spent_s))
        .collect();

    out.push_str("<g class=\"saccades\" fill=\"none\" stroke=\"#b2182b\" stroke-width=\"2.00\">\n");
    for (i, pair) in path.fixations.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let (ra, rb) = (radii[i], radii[i + 1]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let dist = (dx * dx + dy * dy).sqrt();
        let number = i + 1;
        if dist <= ra + rb {
            // Same or overlapping AOI: loop out of the top of the circle.
            let top = a.y - ra;
            let _ = writeln!(
                out,
                r#"<path class="saccade" d="M {:.2} {:.2} C {:.2} {:.2} {:.2} {:.2} {:.2} {:.2}" marker-end="url(#arrow)"/>"#,
                a.x - ra * 0.5,
                top + ra * 0.13,
                a.x - ra,
                top - ra,
                b.x + rb,
                b.y - rb - rb,
                b.x + rb * 0.5,
                b.y - rb * 0.87
            );
            let _ = writeln!(
                out,
                r##"<text class="saccade-number" x="{:.2}" y="{:.2}" font-size="12" fill="#b2182b" stroke="none">{number}</text>"##,
                (a.x + b.x) * 0.5,
                top - ra * 0.8
            );
        } else {
            let (ux, uy) = (dx / dist, dy / dist);
            let (x1, y1) = (a.x + ux * ra, a.y + uy * ra);
            let (x2, y2) = (b.x - ux * rb, b.y - uy * rb);
            let _ = writeln!(
                out,
                r#"<path class="saccade" d="M {x1:.2} {y1:.2} L {x2:.2} {y2:.2}" marker-end="url(#arrow)"/>"#
            );
            let _ = writeln!(
                out,
                r##"<text class="saccade-number" x="{:.2}" y="{:.2}" font-size="12" fill="#b2182b" stroke="none">{number}</text>"##,
                (x1 + x2) * 0.5 - uy * 8.0,
                (y1 + y2) * 0.5 + ux * 8.0
            );
        }
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"fixations\">\n");
    for (i, (f, r)) in path.fixations.iter().zip(&radii).enumerate() {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="#2166ac" fill-opacity="0.35" stroke="#2166ac" stroke-width="1.50"><title>{} #{} {:.2}s</title></circle>"##,
            f.x,
            f.y,
            escape(&f.aoi_name),
            f.visit_index,
            f.time_spent_s
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" fill="#08306b">{}</text>"##,
            f.x,
            f.y + 4.0,
            i + 1
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
