use std::collections::BTreeSet;

use thiserror::Error;

use super::{check_graph, AcpAttachment, Flag, GsnGraph, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttachError {
    #[error("no edge carries assurance claim point `{0}`")]
    UnknownAcp(String),
    #[error("assurance claim point `{0}` labels more than one edge")]
    DuplicateAcp(String),
    #[error("assurance claim point `{0}` already has a confidence argument")]
    AlreadySatisfied(String),
    #[error("confidence argument for `{acp}` is not well formed ({} violations)", violations.len())]
    NotWellFormed {
        acp: String,
        violations: Vec<Violation>,
    },
    #[error("confidence argument for `{acp}` reuses node id `{id}`")]
    IdCollision { acp: String, id: String },
}

/// Hangs `confidence` off the claim point labelled `acp`.
///
/// The anchor is the edge's target when it is a goal, strategy or solution,
/// and its source otherwise (claim points on context links qualify the claim
/// that uses the context). A confidence argument whose root has the anchor's
/// id develops the anchor in place; any other root is linked as an
/// attachment. Either way the anchor stops being undeveloped.
pub fn attach_confidence(
    g: &GsnGraph,
    acp: &str,
    confidence: &GsnGraph,
) -> Result<GsnGraph, AttachError> {
    let labelled: Vec<_> = g
        .edges
        .iter()
        .filter(|e| e.acp.as_deref() == Some(acp))
        .collect();
    let edge = match labelled.as_slice() {
        [] => return Err(AttachError::UnknownAcp(acp.to_string())),
        [one] => *one,
        _ => return Err(AttachError::DuplicateAcp(acp.to_string())),
    };
    if g.is_acp_satisfied(acp) {
        return Err(AttachError::AlreadySatisfied(acp.to_string()));
    }
    let violations = check_graph(confidence);
    if !violations.is_empty() {
        return Err(AttachError::NotWellFormed {
            acp: acp.to_string(),
            violations,
        });
    }

    let target_kind = g.node(&edge.to).map(|n| n.kind);
    let anchor = if target_kind.is_some_and(|k| k.is_supportable()) {
        edge.to.clone()
    } else {
        edge.from.clone()
    };
    let merge = confidence.root == anchor;

    let existing: BTreeSet<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
    for n in &confidence.nodes {
        if merge && n.id == anchor {
            continue;
        }
        if existing.contains(n.id.as_str()) {
            return Err(AttachError::IdCollision {
                acp: acp.to_string(),
                id: n.id.clone(),
            });
        }
    }

    let mut out = g.clone();
    for n in &confidence.nodes {
        if merge && n.id == anchor {
            continue;
        }
        out.nodes.push(n.clone());
    }
    out.edges.extend(confidence.edges.iter().cloned());
    out.acp_attachments
        .extend(confidence.acp_attachments.iter().cloned());
    out.acp_attachments.push(AcpAttachment {
        acp: acp.to_string(),
        anchor: anchor.clone(),
        root: confidence.root.clone(),
    });
    if let Some(node) = out.node_mut(&anchor) {
        node.flags.remove(&Flag::Undeveloped);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsn::{GsnEdge, GsnNode, NodeKind};

    fn base() -> GsnGraph {
        GsnGraph {
            root: "G0".into(),
            nodes: vec![
                GsnNode::new("G0", NodeKind::Goal, "top"),
                GsnNode::new("G1", NodeKind::Goal, "sub").with_flag(Flag::Undeveloped),
            ],
            edges: vec![GsnEdge::supported_by("G0", "G1").with_acp("ACP-a")],
            acp_attachments: vec![],
        }
    }

    fn confidence(root: &str) -> GsnGraph {
        GsnGraph {
            root: root.into(),
            nodes: vec![
                GsnNode::new(root, NodeKind::Goal, "confident"),
                GsnNode::new("Sn9", NodeKind::Solution, "report"),
            ],
            edges: vec![GsnEdge::supported_by(root, "Sn9")],
            acp_attachments: vec![],
        }
    }

    #[test]
    fn attaches_and_reports_satisfied() {
        let merged = attach_confidence(&base(), "ACP-a", &confidence("G9")).unwrap();
        assert!(merged.is_acp_satisfied("ACP-a"));
        assert!(check_graph(&merged).is_empty());
        assert!(!merged.node("G1").unwrap().has(Flag::Undeveloped));
    }

    #[test]
    fn same_root_develops_anchor() {
        let merged = attach_confidence(&base(), "ACP-a", &confidence("G1")).unwrap();
        assert_eq!(merged.nodes.len(), 3);
        assert!(check_graph(&merged).is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(
            attach_confidence(&base(), "nope", &confidence("G9")),
            Err(AttachError::UnknownAcp("nope".into()))
        );
        let once = attach_confidence(&base(), "ACP-a", &confidence("G9")).unwrap();
        assert_eq!(
            attach_confidence(&once, "ACP-a", &confidence("G8")),
            Err(AttachError::AlreadySatisfied("ACP-a".into()))
        );
        let mut dup = base();
        dup.nodes
            .push(GsnNode::new("G2", NodeKind::Goal, "x").with_flag(Flag::Undeveloped));
        dup.edges
            .push(GsnEdge::supported_by("G0", "G2").with_acp("ACP-a"));
        assert_eq!(
            attach_confidence(&dup, "ACP-a", &confidence("G9")),
            Err(AttachError::DuplicateAcp("ACP-a".into()))
        );
    }
}
