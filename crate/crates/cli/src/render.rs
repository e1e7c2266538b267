//! DOT rendering of a decomposition.
//!
//! Each component gets one color. Its support edges are drawn in that color
//! inside a subgraph of their own, so an edge shared by two components shows
//! up twice, side by side. Vertices carry `id` and the input value; modes
//! are double circles in their component's color.

use std::fmt::Write;

use num_traits::Zero;

use ucat_core::rational::format_rational;
use ucat_core::{Decomposition, VertexId};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub fn color(component: usize) -> &'static str {
    PALETTE[component % PALETTE.len()]
}

fn quoted(v: &VertexId) -> String {
    // Ids are restricted to [A-Za-z0-9_-], so there is nothing to escape.
    format!("\"{v}\"")
}

pub fn render_dot(d: &Decomposition) -> String {
    let tree = &d.refined_tree;
    let f = &d.input_on_refined;
    let mut out = String::new();
    out.push_str("graph decomposition {\n");
    out.push_str("  node [shape=circle, fontname=\"Helvetica\"];\n");
    for v in tree.vertices() {
        let _ = writeln!(
            out,
            "  {} [label=\"{}\\nf={}\"];",
            quoted(v),
            v,
            format_rational(f.at(v))
        );
    }

    let mut covered = std::collections::BTreeSet::new();
    for (i, c) in d.components.iter().enumerate() {
        let col = color(i);
        let _ = writeln!(out, "  subgraph component_{i} {{");
        let _ = writeln!(out, "    edge [color=\"{col}\", penwidth=2];");
        let _ = writeln!(
            out,
            "    {} [shape=doublecircle, color=\"{col}\"];",
            quoted(&c.mode)
        );
        for (u, w, _) in tree.edges() {
            let positive = |v: &VertexId| c.values.get(v).is_some_and(|x| !x.is_zero());
            if positive(u) || positive(w) {
                covered.insert((u.clone(), w.clone()));
                let _ = writeln!(out, "    {} -- {};", quoted(u), quoted(w));
            }
        }
        out.push_str("  }\n");
    }
    for (u, w, _) in tree.edges() {
        if !covered.contains(&(u.clone(), w.clone())) {
            let _ = writeln!(
                out,
                "  {} -- {} [color=\"#cccccc\", style=dashed];",
                quoted(u),
                quoted(w)
            );
        }
    }
    out.push_str("}\n");
    out
}
