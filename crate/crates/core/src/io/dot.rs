use std::fmt::Write;

use crate::fotree::{FoDtree, FoNodeKind, FoProps, SymSet};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn set(s: &SymSet) -> String {
    s.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Graphviz rendering. DPG nodes are labelled `∀x:C`; with properties each
/// internal node also shows `cutset, [context]`.
pub fn tree_dot(t: &FoDtree, props: Option<&FoProps>) -> String {
    let mut out = String::from("digraph fodtree {\n  node [shape=box, fontname=\"monospace\"];\n");
    for n in t.preorder() {
        let mut label = t.label(n);
        let shape = match t.nodes[n].kind {
            FoNodeKind::Dpg(_) => "ellipse",
            FoNodeKind::Leaf(_) => "box",
            FoNodeKind::Internal => "circle",
        };
        if let Some(p) = props {
            if !t.is_leaf(n) {
                label = format!("{label}\n{}, [{}]", set(&p.cutset[n]), set(&p.context[n]));
            }
        }
        writeln!(out, "  n{n} [shape={shape}, label=\"{}\"];", escape(&label)).unwrap();
    }
    for n in t.preorder() {
        for c in &t.nodes[n].children {
            writeln!(out, "  n{n} -> n{c};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}
