//! Line-oriented curve text format.
//!
//! ```text
//! vertex <id> genus=<n>
//! edge <id> <vid> <vid>
//! point <label> on <vid>
//! base <label-or-edge-id>
//! ```
//!
//! Blank lines and `#` comments are ignored.

use std::collections::HashMap;
use std::fmt::Write;

use crate::curve::{Curve, CurveBuilder};
use crate::error::{Error, Result};

pub fn parse_curve(text: &str) -> Result<Curve> {
    let mut b = CurveBuilder::new();
    // first line on which each identifier was declared
    let mut declared: HashMap<String, usize> = HashMap::new();
    let mut vertices: HashMap<String, usize> = HashMap::new();
    let mut has_vertex = false;
    let mut has_base = false;

    let err = |line: usize, message: String| Error::Parse { line, message };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let mut declare = |id: &str| -> Result<()> {
            if let Some(first) = declared.get(id) {
                return Err(err(
                    line,
                    format!("duplicate identifier `{id}` (first declared on line {first})"),
                ));
            }
            declared.insert(id.to_string(), line);
            Ok(())
        };
        match words.as_slice() {
            ["vertex", id, genus] => {
                let g = genus
                    .strip_prefix("genus=")
                    .ok_or_else(|| err(line, format!("expected genus=<n>, found `{genus}`")))?;
                let g: u32 = g
                    .parse()
                    .map_err(|_| err(line, format!("invalid genus `{g}`")))?;
                declare(id)?;
                vertices.insert(id.to_string(), line);
                has_vertex = true;
                b = b.vertex(id, g);
            }
            ["edge", id, a, c] => {
                for v in [a, c] {
                    if !vertices.contains_key(*v) {
                        return Err(err(line, format!("unknown vertex `{v}`")));
                    }
                }
                declare(id)?;
                b = b.edge(id, a, c);
            }
            ["point", label, "on", v] => {
                if !vertices.contains_key(*v) {
                    return Err(err(line, format!("unknown vertex `{v}`")));
                }
                declare(label)?;
                b = b.point(label, v);
            }
            ["base", label] => {
                if has_base {
                    return Err(err(line, "base declared twice".to_string()));
                }
                has_base = true;
                b = b.base(label);
            }
            _ => return Err(err(line, format!("cannot parse `{content}`"))),
        }
    }
    if !has_vertex {
        return Err(Error::NoVertices);
    }
    b.build().map_err(|e| match e {
        Error::UnknownPoint(p) => err(0, format!("base `{p}` is neither a point label nor an edge")),
        other => other,
    })
}

pub fn parse_curve_file(path: &std::path::Path) -> Result<Curve> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_curve(&text)
}

/// Prints a curve in the text format; `parse_curve(&print_curve(c)) == c`.
pub fn print_curve(curve: &Curve) -> String {
    let mut out = String::new();
    for v in curve.vertices() {
        writeln!(out, "vertex {} genus={}", v.id, v.genus).unwrap();
    }
    for e in curve.edges() {
        writeln!(
            out,
            "edge {} {} {}",
            e.id,
            curve.vertex(e.ends[0]).id,
            curve.vertex(e.ends[1]).id
        )
        .unwrap();
    }
    for v in curve.vertices() {
        for p in &v.points {
            writeln!(out, "point {} on {}", p, v.id).unwrap();
        }
    }
    if let Some(b) = curve.base() {
        writeln!(out, "base {b}").unwrap();
    }
    out
}
