//! Goal Structuring Notation graphs and patterns.
//!
//! Graphs and patterns share one interchange shape (`nodes` and `edges`
//! arrays). Assurance claim points are labels on edges; a confidence argument
//! satisfying one is recorded in `acp_attachments`.

mod attach;
mod check;
mod dot;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::artifact::ArtifactId;
use crate::registry::Status;

pub use attach::{attach_confidence, AttachError};
pub use check::{check_graph, check_pattern, placeholders, Violation};
pub use dot::{to_dot, DotError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Goal,
    Strategy,
    Solution,
    Context,
    Justification,
    Assumption,
}

impl NodeKind {
    pub fn is_supportable(self) -> bool {
        matches!(
            self,
            NodeKind::Goal | NodeKind::Strategy | NodeKind::Solution
        )
    }

    pub fn is_contextual(self) -> bool {
        matches!(
            self,
            NodeKind::Context | NodeKind::Justification | NodeKind::Assumption
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flag {
    Undeveloped,
    Uninstantiated,
    Optional,
}

/// Evidence attached to an instantiated solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceRef {
    pub artifact: ArtifactId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<u32>,
    pub path: String,
    pub checksum: String,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsnNode {
    pub id: String,
    pub kind: NodeKind,
    pub statement: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub flags: BTreeSet<Flag>,
    /// Artifact a pattern solution cites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifact: Option<ArtifactId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceRef>,
}

impl GsnNode {
    pub fn new(id: impl Into<String>, kind: NodeKind, statement: impl Into<String>) -> Self {
        GsnNode {
            id: id.into(),
            kind,
            statement: statement.into(),
            flags: BTreeSet::new(),
            artifact: None,
            evidence: None,
        }
    }

    pub fn with_flag(mut self, flag: Flag) -> Self {
        self.flags.insert(flag);
        self
    }

    pub fn citing(mut self, artifact: ArtifactId) -> Self {
        self.artifact = Some(artifact);
        self
    }

    pub fn has(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    SupportedBy,
    InContextOf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsnEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acp: Option<String>,
}

impl GsnEdge {
    pub fn supported_by(from: impl Into<String>, to: impl Into<String>) -> Self {
        GsnEdge {
            from: from.into(),
            to: to.into(),
            kind: EdgeKind::SupportedBy,
            acp: None,
        }
    }

    pub fn in_context_of(from: impl Into<String>, to: impl Into<String>) -> Self {
        GsnEdge {
            from: from.into(),
            to: to.into(),
            kind: EdgeKind::InContextOf,
            acp: None,
        }
    }

    pub fn with_acp(mut self, label: impl Into<String>) -> Self {
        self.acp = Some(label.into());
        self
    }
}

/// A confidence argument linked to an assurance claim point. When `root`
/// equals `anchor` the confidence argument developed the anchor in place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcpAttachment {
    pub acp: String,
    pub anchor: String,
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsnGraph {
    pub root: String,
    pub nodes: Vec<GsnNode>,
    pub edges: Vec<GsnEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub acp_attachments: Vec<AcpAttachment>,
}

impl GsnGraph {
    pub fn single(node: GsnNode) -> Self {
        GsnGraph {
            root: node.id.clone(),
            nodes: vec![node],
            edges: Vec::new(),
            acp_attachments: Vec::new(),
        }
    }

    pub fn node(&self, id: &str) -> Option<&GsnNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_mut(&mut self, id: &str) -> Option<&mut GsnNode> {
        self.nodes.iter_mut().find(|n| n.id == id)
    }

    /// Labels of every assurance claim point on an edge.
    pub fn acp_labels(&self) -> Vec<&str> {
        self.edges.iter().filter_map(|e| e.acp.as_deref()).collect()
    }

    pub fn is_acp_satisfied(&self, label: &str) -> bool {
        self.acp_attachments.iter().any(|a| a.acp == label)
    }

    pub fn unsatisfied_acps(&self) -> Vec<&str> {
        self.acp_labels()
            .into_iter()
            .filter(|l| !self.is_acp_satisfied(l))
            .collect()
    }

    /// Children reached through SupportedBy edges and attachments.
    pub fn supporters<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        let via_edges = self
            .edges
            .iter()
            .filter(move |e| e.kind == EdgeKind::SupportedBy && e.from == id)
            .map(|e| e.to.as_str());
        let via_attach = self
            .acp_attachments
            .iter()
            .filter(move |a| a.anchor == id && a.root != a.anchor)
            .map(|a| a.root.as_str());
        via_edges.chain(via_attach)
    }

    /// All node ids reachable from `id` by support and context links,
    /// including `id`.
    pub fn subtree(&self, id: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id.to_string()];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur.clone()) {
                continue;
            }
            for e in self.edges.iter().filter(|e| e.from == cur) {
                stack.push(e.to.clone());
            }
            for a in self.acp_attachments.iter().filter(|a| a.anchor == cur) {
                stack.push(a.root.clone());
            }
        }
        seen
    }

    /// Pattern nodes whose id (before any clone or tier suffix) is `base`.
    pub fn instances_of<'a>(&'a self, base: &'a str) -> impl Iterator<Item = &'a GsnNode> + 'a {
        self.nodes.iter().filter(move |n| base_id(&n.id) == base)
    }
}

/// Strips `#k` clone and `@n` tier suffixes from an instantiated node id.
pub fn base_id(id: &str) -> &str {
    let end = id.find(['#', '@']).unwrap_or(id.len());
    &id[..end]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoleType {
    Int,
    Text,
    Collection,
    Map,
    Artifact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Role {
    pub name: String,
    #[serde(rename = "type")]
    pub role_type: RoleType,
}

/// One clone of the `to` subtree per element of the `role` collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub from: String,
    pub to: String,
    pub role: String,
    #[serde(default)]
    pub mandatory: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub parent: String,
    pub options: Vec<String>,
    pub min: usize,
    pub max: usize,
}

/// An optional node kept only when `key` (a `Role.field` path) is bound to a
/// non-empty value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guard {
    pub node: String,
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsnPattern {
    pub id: String,
    pub root: String,
    pub nodes: Vec<GsnNode>,
    pub edges: Vec<GsnEdge>,
    #[serde(default)]
    pub multiplicities: Vec<Multiplicity>,
    #[serde(default)]
    pub choices: Vec<Choice>,
    #[serde(default)]
    pub roles: Vec<Role>,
    #[serde(default)]
    pub guards: Vec<Guard>,
    /// Node standing for "repeat this pattern at the next tier".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursion: Option<String>,
    /// Node statements paraphrase a figure rather than quote it.
    #[serde(default)]
    pub reconstructed: bool,
}

impl GsnPattern {
    pub fn node(&self, id: &str) -> Option<&GsnNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn role(&self, name: &str) -> Option<&Role> {
        self.roles.iter().find(|r| r.name == name)
    }

    pub fn choice(&self, parent: &str) -> Option<&Choice> {
        self.choices.iter().find(|c| c.parent == parent)
    }

    pub fn multiplicity(&self, from: &str, to: &str) -> Option<&Multiplicity> {
        self.multiplicities
            .iter()
            .find(|m| m.from == from && m.to == to)
    }

    pub fn guard(&self, node: &str) -> Option<&Guard> {
        self.guards.iter().find(|g| g.node == node)
    }

    /// The pattern's nodes and edges viewed as a plain graph, for rendering.
    pub fn as_graph(&self) -> GsnGraph {
        GsnGraph {
            root: self.root.clone(),
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            acp_attachments: Vec::new(),
        }
    }

    /// DOT rendering of the pattern, placeholders and all.
    pub fn to_dot(&self) -> String {
        dot::render(&self.as_graph())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_id_strips_suffixes() {
        assert_eq!(base_id("G3.2#3"), "G3.2");
        assert_eq!(base_id("G5#2@1"), "G5");
        assert_eq!(base_id("S3@0"), "S3");
        assert_eq!(base_id("G0"), "G0");
    }

    #[test]
    fn interchange_round_trip() {
        let mut g = GsnGraph::single(GsnNode::new("G0", NodeKind::Goal, "top claim"));
        g.nodes
            .push(GsnNode::new("Sn1", NodeKind::Solution, "evidence"));
        g.edges
            .push(GsnEdge::supported_by("G0", "Sn1").with_acp("ACP-x"));
        let text = serde_json::to_string(&g).unwrap();
        let back: GsnGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }
}
