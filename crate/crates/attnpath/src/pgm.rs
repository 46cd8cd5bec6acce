//! Plain (P2) grayscale images of heat grids.

use std::fmt::Write as _;

use attnpath_core::heatmap::{HeatGrid, SignedGrid};

pub const MAX_GRAY: u32 = 255;
const VALUES_PER_LINE: usize = 16;

/// Scales `values` linearly so `scale_max` maps to 255. `comment` lines are
/// written after the magic number.
pub fn encode_pgm(width: usize, height: usize, values: &[f64], scale_max: f64, comment: &str) -> String {
    let mut out = String::from("P2\n");
    for line in comment.lines() {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{width} {height}\n{MAX_GRAY}");
    for row in values.chunks(width.max(1)) {
        for chunk in row.chunks(VALUES_PER_LINE) {
            let line: Vec<String> = chunk
                .iter()
                .map(|&v| {
                    let g = if scale_max > 0.0 {
                        (v / scale_max * f64::from(MAX_GRAY)).round().clamp(0.0, f64::from(MAX_GRAY))
                    } else {
                        0.0
                    };
                    (g as u32).to_string()
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn heat_pgm(grid: &HeatGrid, comment: &str) -> String {
    encode_pgm(grid.width, grid.height, &grid.values(), grid.max_value(), comment)
}

/// Positive and negative parts, both scaled by the largest magnitude.
pub fn signed_pgms(grid: &SignedGrid, comment: &str) -> (String, String) {
    let (pos, neg) = grid.split();
    let scale = grid.max_abs();
    (
        encode_pgm(grid.width, grid.height, &pos, scale, &format!("{comment}\npart=positive")),
        encode_pgm(grid.width, grid.height, &neg, scale, &format!("{comment}\npart=negative")),
    )
}
