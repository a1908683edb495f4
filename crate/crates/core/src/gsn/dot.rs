use std::fmt::Write as _;

use thiserror::Error;

use super::{check_graph, EdgeKind, Flag, GsnGraph, NodeKind, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DotError {
    #[error("graph is not well formed ({} violations)", .0.len())]
    NotWellFormed(Vec<Violation>),
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

fn shape(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Goal => "shape=box",
        NodeKind::Strategy => "shape=parallelogram",
        NodeKind::Solution => "shape=circle",
        NodeKind::Context => "shape=box, style=rounded",
        NodeKind::Justification | NodeKind::Assumption => "shape=ellipse",
    }
}

/// Renders a well-formed graph in DOT. Claim points are labelled with a black
/// square; attached confidence arguments appear as dashed edges.
pub fn to_dot(g: &GsnGraph) -> Result<String, DotError> {
    let violations = check_graph(g);
    if !violations.is_empty() {
        return Err(DotError::NotWellFormed(violations));
    }
    Ok(render(g))
}

/// DOT text without the well-formedness gate, used for patterns.
pub(crate) fn render(g: &GsnGraph) -> String {
    let mut out = String::from("digraph gsn {\n  rankdir=TB;\n");
    for n in &g.nodes {
        let mut label = format!("{}\\n{}", escape(&n.id), escape(&n.statement));
        if n.has(Flag::Undeveloped) {
            label.push_str("\\n(undeveloped)");
        }
        if n.has(Flag::Optional) {
            label.push_str("\\n(optional)");
        }
        let suffix = match n.kind {
            NodeKind::Justification => "\\nJ",
            NodeKind::Assumption => "\\nA",
            _ => "",
        };
        let _ = writeln!(
            out,
            "  \"{}\" [{}, label=\"{}{}\"];",
            escape(&n.id),
            shape(n.kind),
            label,
            suffix
        );
    }
    for e in &g.edges {
        let mut attrs = Vec::new();
        if e.kind == EdgeKind::InContextOf {
            attrs.push("arrowhead=empty".to_string());
        }
        if let Some(acp) = &e.acp {
            attrs.push(format!("label=\"\u{25a0} {}\"", escape(acp)));
        }
        let attrs = if attrs.is_empty() {
            String::new()
        } else {
            format!(" [{}]", attrs.join(", "))
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\"{};",
            escape(&e.from),
            escape(&e.to),
            attrs
        );
    }
    for a in &g.acp_attachments {
        if a.anchor == a.root {
            continue;
        }
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [style=dashed, label=\"{}\"];",
            escape(&a.anchor),
            escape(&a.root),
            escape(&a.acp)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsn::GsnNode;

    #[test]
    fn single_goal() {
        let g = GsnGraph::single(
            GsnNode::new("G0", NodeKind::Goal, "claim \"quoted\"").with_flag(Flag::Undeveloped),
        );
        let dot = to_dot(&g).unwrap();
        assert!(dot.starts_with("digraph gsn {"));
        assert!(dot.contains("\"G0\" [shape=box"));
        assert!(dot.contains("\\\"quoted\\\""));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn rejects_ill_formed() {
        let g = GsnGraph::single(GsnNode::new("G0", NodeKind::Strategy, "s"));
        assert!(to_dot(&g).is_err());
    }
}
