use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{AcpAttachment, EdgeKind, Flag, GsnEdge, GsnGraph, GsnNode, GsnPattern, NodeKind};

/// A structural problem with a stable code and the node or edge it concerns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub locus: String,
    pub message: String,
}

impl Violation {
    fn new(code: &str, locus: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            code: code.to_string(),
            locus: locus.into(),
            message: message.into(),
        }
    }
}

/// Placeholder names inside `{...}` in a statement, in order of appearance.
/// `{Role.field}` and `{Map[Role]}` both report their full text.
pub fn placeholders(statement: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = statement;
    while let Some(start) = rest.find('{') {
        let after = &rest[start + 1..];
        match after.find('}') {
            Some(end) => {
                out.push(after[..end].to_string());
                rest = &after[end + 1..];
            }
            None => {
                out.push(after.to_string());
                break;
            }
        }
    }
    out
}

/// Role names a placeholder refers to.
pub(crate) fn placeholder_roles(ph: &str) -> Vec<&str> {
    if let Some(open) = ph.find('[') {
        let map = &ph[..open];
        let key = ph[open + 1..].trim_end_matches(']');
        vec![map, key]
    } else {
        vec![ph.split('.').next().unwrap_or(ph)]
    }
}

enum Mode<'a> {
    Graph,
    Pattern(&'a GsnPattern),
}

pub fn check_graph(g: &GsnGraph) -> Vec<Violation> {
    check(&g.root, &g.nodes, &g.edges, &g.acp_attachments, Mode::Graph)
}

pub fn check_pattern(p: &GsnPattern) -> Vec<Violation> {
    check(&p.root, &p.nodes, &p.edges, &[], Mode::Pattern(p))
}

fn check(
    root: &str,
    nodes: &[GsnNode],
    edges: &[GsnEdge],
    attachments: &[AcpAttachment],
    mode: Mode<'_>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut by_id: BTreeMap<&str, &GsnNode> = BTreeMap::new();
    for n in nodes {
        if by_id.insert(n.id.as_str(), n).is_some() {
            out.push(Violation::new("GSN007", &n.id, "duplicate node id"));
        }
    }

    // Support adjacency, including confidence arguments hung off ACP anchors.
    let mut support: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut links: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in edges {
        let locus = format!("{}->{}", e.from, e.to);
        let (Some(from), Some(to)) = (by_id.get(e.from.as_str()), by_id.get(e.to.as_str())) else {
            out.push(Violation::new(
                "GSN002",
                locus,
                "edge endpoint does not exist",
            ));
            continue;
        };
        links.entry(&e.from).or_default().push(&e.to);
        match e.kind {
            EdgeKind::SupportedBy => {
                support.entry(&e.from).or_default().push(&e.to);
                if from.kind == NodeKind::Solution {
                    out.push(Violation::new(
                        "GSN003",
                        &e.from,
                        "solution has a supporting child",
                    ));
                } else if !matches!(from.kind, NodeKind::Goal | NodeKind::Strategy) {
                    out.push(Violation::new(
                        "GSN006",
                        locus.clone(),
                        format!("{:?} cannot be supported", from.kind),
                    ));
                }
                if !to.kind.is_supportable() {
                    out.push(Violation::new(
                        "GSN006",
                        locus,
                        format!("SupportedBy target is a {:?}", to.kind),
                    ));
                }
            }
            EdgeKind::InContextOf => {
                if !to.kind.is_contextual() {
                    out.push(Violation::new(
                        "GSN006",
                        locus,
                        format!("InContextOf target is a {:?}", to.kind),
                    ));
                }
            }
        }
    }
    for a in attachments {
        if !by_id.contains_key(a.anchor.as_str()) || !by_id.contains_key(a.root.as_str()) {
            out.push(Violation::new(
                "GSN002",
                &a.acp,
                "attachment refers to a missing node",
            ));
            continue;
        }
        if a.root != a.anchor {
            support.entry(&a.anchor).or_default().push(&a.root);
            links.entry(&a.anchor).or_default().push(&a.root);
        }
    }

    for n in nodes {
        let supported = support.get(n.id.as_str()).is_some_and(|c| !c.is_empty());
        let needs_support =
            matches!(n.kind, NodeKind::Goal | NodeKind::Strategy) && !n.has(Flag::Undeveloped);
        if needs_support && !supported {
            out.push(Violation::new(
                "GSN002",
                &n.id,
                format!("{:?} has no supporting element", n.kind),
            ));
        }
    }

    for cycle in cycles(&by_id, &support) {
        out.push(Violation::new(
            "GSN001",
            cycle.join(","),
            "SupportedBy cycle",
        ));
    }

    if by_id.contains_key(root) {
        let mut seen = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(cur) = stack.pop() {
            if seen.insert(cur) {
                if let Some(next) = links.get(cur) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        for n in nodes {
            if !seen.contains(n.id.as_str()) {
                out.push(Violation::new(
                    "GSN004",
                    &n.id,
                    "not reachable from the root",
                ));
            }
        }
    } else {
        out.push(Violation::new("GSN004", root, "root node does not exist"));
    }

    match mode {
        Mode::Graph => {
            for n in nodes {
                if n.has(Flag::Uninstantiated) || !placeholders(&n.statement).is_empty() {
                    out.push(Violation::new(
                        "GSN005",
                        &n.id,
                        "uninstantiated content in an argument",
                    ));
                }
            }
        }
        Mode::Pattern(p) => check_pattern_extras(p, &by_id, &mut out),
    }

    out.sort();
    out.dedup();
    out
}

fn check_pattern_extras(
    p: &GsnPattern,
    by_id: &BTreeMap<&str, &GsnNode>,
    out: &mut Vec<Violation>,
) {
    let declared: BTreeSet<&str> = p.roles.iter().map(|r| r.name.as_str()).collect();
    for n in &p.nodes {
        for ph in placeholders(&n.statement) {
            for role in placeholder_roles(&ph) {
                if !declared.contains(role) {
                    out.push(Violation::new(
                        "GSN005",
                        &n.id,
                        format!("placeholder `{{{ph}}}` uses undeclared role `{role}`"),
                    ));
                }
            }
        }
    }
    let has_support = |from: &str, to: &str| {
        p.edges
            .iter()
            .any(|e| e.kind == EdgeKind::SupportedBy && e.from == from && e.to == to)
    };
    for m in &p.multiplicities {
        if !has_support(&m.from, &m.to) {
            out.push(Violation::new(
                "GSN008",
                format!("{}->{}", m.from, m.to),
                "multiplicity is not on a SupportedBy edge",
            ));
        }
        if !declared.contains(m.role.as_str()) {
            out.push(Violation::new(
                "GSN008",
                format!("{}->{}", m.from, m.to),
                format!("multiplicity role `{}` is undeclared", m.role),
            ));
        }
    }
    for c in &p.choices {
        if !by_id.contains_key(c.parent.as_str()) {
            out.push(Violation::new("GSN008", &c.parent, "choice parent missing"));
        }
        for o in &c.options {
            if !has_support(&c.parent, o) {
                out.push(Violation::new(
                    "GSN008",
                    &c.parent,
                    format!("choice option {o} is not a supported child"),
                ));
            }
        }
        if c.min > c.max || c.max == 0 || c.max > c.options.len() {
            out.push(Violation::new(
                "GSN008",
                &c.parent,
                format!("choice bounds {}..{} are inconsistent", c.min, c.max),
            ));
        }
    }
    for g in &p.guards {
        if !by_id.contains_key(g.node.as_str()) {
            out.push(Violation::new("GSN008", &g.node, "guarded node missing"));
        }
        let role = g.key.split('.').next().unwrap_or("");
        if !declared.contains(role) {
            out.push(Violation::new(
                "GSN008",
                &g.node,
                format!("guard role `{role}` is undeclared"),
            ));
        }
    }
    if let Some(r) = &p.recursion {
        if !by_id.contains_key(r.as_str()) {
            out.push(Violation::new("GSN008", r, "recursion marker missing"));
        }
    }
}

/// Nodes on SupportedBy cycles, grouped by strongly connected component.
fn cycles<'a>(
    by_id: &BTreeMap<&'a str, &GsnNode>,
    support: &BTreeMap<&'a str, Vec<&'a str>>,
) -> Vec<Vec<String>> {
    // Tarjan's algorithm, iterative to stay safe on deep graphs.
    let ids: Vec<&str> = by_id.keys().copied().collect();
    let index_of: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let n = ids.len();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|id| {
            support
                .get(id)
                .map(|v| v.iter().filter_map(|t| index_of.get(t).copied()).collect())
                .unwrap_or_default()
        })
        .collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut out = Vec::new();
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(top) = work.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    let self_loop = comp.len() == 1 && adj[v].contains(&v);
                    if comp.len() > 1 || self_loop {
                        let mut names: Vec<String> =
                            comp.iter().map(|&i| ids[i].to_string()).collect();
                        names.sort();
                        out.push(names);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsn::{GsnEdge, GsnNode};

    fn codes(v: &[Violation]) -> Vec<&str> {
        v.iter().map(|v| v.code.as_str()).collect()
    }

    #[test]
    fn undeveloped_goal_alone_is_fine() {
        let g = GsnGraph::single(
            GsnNode::new("G0", NodeKind::Goal, "claim").with_flag(Flag::Undeveloped),
        );
        assert!(check_graph(&g).is_empty());
    }

    #[test]
    fn support_loop_is_a_cycle() {
        let g = GsnGraph {
            root: "G1".into(),
            nodes: vec![
                GsnNode::new("G1", NodeKind::Goal, "a"),
                GsnNode::new("S1", NodeKind::Strategy, "b"),
                GsnNode::new("G2", NodeKind::Goal, "c"),
            ],
            edges: vec![
                GsnEdge::supported_by("G1", "S1"),
                GsnEdge::supported_by("S1", "G2"),
                GsnEdge::supported_by("G2", "G1"),
            ],
            acp_attachments: vec![],
        };
        assert_eq!(codes(&check_graph(&g)), vec!["GSN001"]);
    }

    #[test]
    fn solution_children_and_bad_targets() {
        let g = GsnGraph {
            root: "G1".into(),
            nodes: vec![
                GsnNode::new("G1", NodeKind::Goal, "a"),
                GsnNode::new("Sn1", NodeKind::Solution, "e"),
                GsnNode::new("C1", NodeKind::Context, "c"),
                GsnNode::new("G2", NodeKind::Goal, "g").with_flag(Flag::Undeveloped),
            ],
            edges: vec![
                GsnEdge::supported_by("G1", "Sn1"),
                GsnEdge::supported_by("Sn1", "G2"),
                GsnEdge::supported_by("G1", "C1"),
            ],
            acp_attachments: vec![],
        };
        let found = check_graph(&g);
        let v = codes(&found);
        assert!(v.contains(&"GSN003"));
        assert!(v.contains(&"GSN006"));
    }

    #[test]
    fn unreachable_and_placeholder() {
        let g = GsnGraph {
            root: "G1".into(),
            nodes: vec![
                GsnNode::new("G1", NodeKind::Goal, "a").with_flag(Flag::Undeveloped),
                GsnNode::new("G9", NodeKind::Goal, "{Thing} holds").with_flag(Flag::Undeveloped),
            ],
            edges: vec![],
            acp_attachments: vec![],
        };
        assert_eq!(codes(&check_graph(&g)), vec!["GSN004", "GSN005"]);
    }

    #[test]
    fn placeholder_parsing() {
        assert_eq!(
            placeholders("a {X} b {Y.id} {M[Y]}"),
            vec!["X".to_string(), "Y.id".into(), "M[Y]".into()]
        );
        assert_eq!(placeholder_roles("M[Y]"), vec!["M", "Y"]);
        assert_eq!(placeholder_roles("Y.id"), vec!["Y"]);
    }
}
