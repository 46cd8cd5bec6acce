//! AOI registry TSV.
//!
//! ```text
//! canvas  750  575
//! # name  x    y    radius  lemmas
//! boy     175  165  55      boy|kid|kids
//! ```

use std::fmt::Write as _;

use attnpath_core::{Aoi, AoiRegistry};

use crate::error::{Error, Result};

pub fn load_registry(text: &str) -> Result<AoiRegistry> {
    let mut canvas: Option<(f64, f64)> = None;
    let mut aois = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let num = |s: &str, name: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse("registry", line, format!("{name} {s:?} is not a number")))
        };
        match canvas {
            None => {
                if fields.len() != 3 || fields[0] != "canvas" {
                    return Err(Error::parse(
                        "registry",
                        line,
                        "first row must be `canvas <width> <height>`",
                    ));
                }
                canvas = Some((num(fields[1], "width")?, num(fields[2], "height")?));
            }
            Some(_) => {
                if fields.len() != 5 {
                    return Err(Error::parse(
                        "registry",
                        line,
                        format!("expected `name x y radius lemmas`, found {} fields", fields.len()),
                    ));
                }
                let radius = num(fields[3], "radius")?;
                if radius <= 0.0 {
                    return Err(Error::parse("registry", line, format!("radius {radius} must be > 0")));
                }
                aois.push(Aoi::new(
                    fields[0],
                    num(fields[1], "x")?,
                    num(fields[2], "y")?,
                    radius,
                    fields[4].split('|'),
                ));
            }
        }
    }
    let (w, h) = canvas.ok_or_else(|| Error::parse("registry", 1, "missing canvas row"))?;
    Ok(AoiRegistry::new(w, h, aois)?)
}

pub fn write_registry(registry: &AoiRegistry) -> String {
    let mut out = format!("canvas\t{}\t{}\n", registry.canvas_w(), registry.canvas_h());
    out.push_str("# name\tx\ty\tradius\tlemmas\n");
    for a in registry.aois() {
        let lemmas: Vec<&str> = a.lemmas.iter().map(String::as_str).collect();
        let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", a.name, a.x, a.y, a.radius, lemmas.join("|"));
    }
    out
}
