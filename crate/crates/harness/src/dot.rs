//! Graphviz DOT export.

use std::fmt::Write as _;
use std::path::Path;

use netrobust_core::{Graph, NodePair};

use crate::error::{HarnessError, Result};

/// Undirected DOT text listing every live node and edge; edges in `highlight`
/// are drawn red and dashed.
pub fn to_dot(g: &Graph, highlight: &[NodePair]) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.live_nodes() {
        let _ = writeln!(out, "  {v};");
    }
    for e in g.edges() {
        if highlight.contains(&e) {
            let _ = writeln!(out, "  {} -- {} [color=red, style=dashed];", e.u(), e.v());
        } else {
            let _ = writeln!(out, "  {} -- {};", e.u(), e.v());
        }
    }
    out.push_str("}\n");
    out
}

pub fn export_dot(g: &Graph, path: &Path) -> Result<()> {
    export_dot_highlighted(g, &[], path)
}

pub fn export_dot_highlighted(g: &Graph, highlight: &[NodePair], path: &Path) -> Result<()> {
    std::fs::write(path, to_dot(g, highlight)).map_err(|source| HarnessError::File {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_path() {
        assert_eq!(
            to_dot(&Graph::path(2), &[]),
            "graph G {\n  0;\n  1;\n  0 -- 1;\n}\n"
        );
    }

    #[test]
    fn highlighted_edge_is_styled() {
        let g = Graph::cycle(3);
        let text = to_dot(&g, &[NodePair::new(0, 2).unwrap()]);
        assert!(text.contains("  0 -- 2 [color=red, style=dashed];\n"));
        assert!(text.contains("  0 -- 1;\n"));
    }

    #[test]
    fn removed_nodes_are_omitted() {
        let g = Graph::star(4).without_node(0).unwrap();
        assert_eq!(to_dot(&g, &[]), "graph G {\n  1;\n  2;\n  3;\n}\n");
    }
}
