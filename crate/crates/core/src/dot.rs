//! Graphviz export. Conjugate edges share a colour; vertices are labelled by
//! their degree.

use std::fmt::Write;

use crate::canonical::canonical_code_unchecked;
use crate::tree::DoublePointTree;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders `tree` as a DOT digraph named by its canonical code (when valid).
pub fn to_dot(tree: &DoublePointTree) -> String {
    let name = if tree.is_valid() {
        canonical_code_unchecked(tree).to_hex()
    } else {
        "invalid".to_string()
    };
    let mut color = vec![None; tree.edge_count()];
    let pairs = tree.pairs();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        let hue = format!("{:.6} 0.850 0.750", i as f64 / pairs.len() as f64);
        color[a] = Some(hue.clone());
        color[b] = Some(hue);
    }

    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(&name)).unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in tree.vertices() {
        writeln!(out, "  {} [label={}];", quote(&v.id), quote(&v.delta.to_string())).unwrap();
    }
    for (i, e) in tree.edges().iter().enumerate() {
        let color = color[i].as_deref().unwrap_or("black");
        writeln!(
            out,
            "  {} -> {} [label={}, color={}];",
            quote(&tree.vertices()[e.tail].id),
            quote(&tree.vertices()[e.head].id),
            quote(&e.id),
            quote(color)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
