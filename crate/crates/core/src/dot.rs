//! Graphviz output for dual graphs and Abel images.

use std::fmt::Write;

use crate::abel::{GeneralizedCurve, SingularKind};
use crate::curve::Curve;
use crate::structure::{maximal_line_trees, separating_lines, separating_nodes, TailTable};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Dual graph; bridges bold, separating lines shaded, small tails and line
/// trees boxed as clusters.
pub fn curve_dot(curve: &Curve, table: Option<&TailTable>) -> String {
    let bridges = separating_nodes(curve);
    let lines = separating_lines(curve);
    let mut out = String::from("graph curve {\n  node [shape=circle];\n");
    let mut cluster = 0;
    let mut open = |out: &mut String, label: &str, style: &str| {
        let _ = writeln!(out, "  subgraph cluster_{cluster} {{\n    label={};\n    style={style};", quote(label));
        cluster += 1;
    };
    if let Some(t) = table {
        for e in &t.entries {
            let kind = if e.splitting { "splitting tail" } else { "small tail" };
            open(&mut out, &format!("{kind} at {}", curve.edge(e.bridge).id), "dashed");
            for v in e.small.vertices.iter() {
                let _ = writeln!(out, "    {};", quote(&curve.vertex(v).id));
            }
            out.push_str("  }\n");
        }
    }
    for t in maximal_line_trees(curve) {
        open(&mut out, "line tree", "dotted");
        for v in t.vertices.iter() {
            let _ = writeln!(out, "    {};", quote(&curve.vertex(v).id));
        }
        out.push_str("  }\n");
    }
    for (i, v) in curve.vertices().iter().enumerate() {
        let mut label = format!("{}\\ng={}", v.id, v.genus);
        for p in &v.points {
            let _ = write!(label, "\\n{p}");
        }
        let shade = if lines.contains(i) { ", style=filled, fillcolor=lightgray" } else { "" };
        let _ = writeln!(out, "  {} [label={}{shade}];", quote(&v.id), quote(&label));
    }
    for (i, e) in curve.edges().iter().enumerate() {
        let bold = if bridges.contains(&i) { ", style=bold, penwidth=2" } else { "" };
        let _ = writeln!(
            out,
            "  {} -- {} [label={}{bold}];",
            quote(&curve.vertex(e.ends[0]).id),
            quote(&curve.vertex(e.ends[1]).id),
            quote(&e.id)
        );
    }
    out.push_str("}\n");
    out
}

/// Image curve; contracted points drawn as stars joined to every branch.
pub fn image_dot(image: &GeneralizedCurve) -> String {
    let mut out = String::from("graph image {\n  node [shape=circle];\n");
    for (id, g) in &image.components {
        let _ = writeln!(out, "  {} [label={}];", quote(id), quote(&format!("{id}\\ng={g}")));
    }
    for p in &image.points {
        match p.kind {
            SingularKind::Node => {
                let [(a, _), (b, _)] = [&p.branches[0], &p.branches[1]];
                let _ = writeln!(
                    out,
                    "  {} -- {} [label={}];",
                    quote(&image.components[*a].0),
                    quote(&image.components[*b].0),
                    quote(&p.id)
                );
            }
            SingularKind::Contracted => {
                let _ = writeln!(out, "  {} [shape=star, label=\"\"];", quote(&p.id));
                for (c, s) in &p.branches {
                    let _ = writeln!(
                        out,
                        "  {} -- {} [label={}];",
                        quote(&p.id),
                        quote(&image.components[*c].0),
                        quote(&s.to_string())
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
