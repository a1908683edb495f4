//! Expands patterns into concrete arguments: role binding, multiplicity
//! cloning, choice resolution, optional nodes and tier recursion.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::artifact::ArtifactId;
use crate::gsn::{
    check_graph, check_pattern, placeholders, EdgeKind, EvidenceRef, Flag, GsnEdge, GsnGraph,
    GsnNode, GsnPattern, NodeKind, RoleType, Violation,
};
use crate::patterns::{get_pattern, PatternId};
use crate::registry::Status;

/// Values bound to a pattern's roles.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    #[serde(default)]
    pub scalars: BTreeMap<String, String>,
    #[serde(default)]
    pub collections: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
    /// Selected options per choice point; keys are either the pattern node id
    /// (`G6.4`) or a clone id (`G6.4#2`), the latter taking precedence.
    #[serde(default)]
    pub choices: BTreeMap<String, Vec<String>>,
    /// Evidence for solutions, keyed by the artifact they cite.
    #[serde(default)]
    pub evidence: BTreeMap<ArtifactId, EvidenceRef>,
}

impl Binding {
    pub fn scalar(mut self, role: &str, value: impl Into<String>) -> Self {
        self.scalars.insert(role.to_string(), value.into());
        self
    }

    pub fn collection(mut self, role: &str, values: Vec<Value>) -> Self {
        self.collections.insert(role.to_string(), values);
        self
    }

    pub fn map(mut self, role: &str, entries: BTreeMap<String, String>) -> Self {
        self.maps.insert(role.to_string(), entries);
        self
    }

    pub fn choose(mut self, point: &str, options: &[&str]) -> Self {
        self.choices.insert(
            point.to_string(),
            options.iter().map(|s| s.to_string()).collect(),
        );
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub node: String,
    pub pattern_node: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clone: Vec<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bound: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstantiatedArgument {
    pub graph: GsnGraph,
    pub trace: Vec<TraceRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("role `{0}` is not bound")]
    MissingRole(String),
    #[error("`{0}` is not a role of this pattern")]
    UnexpectedRole(String),
    #[error("role `{role}` expects a {expected:?} binding")]
    WrongRoleType { role: String, expected: RoleType },
    #[error("choice at {point} selects {selected} options, allowed {min}..{max}")]
    ChoiceCardinality {
        point: String,
        selected: usize,
        min: usize,
        max: usize,
    },
    #[error("`{0}` is not a choice point of this pattern")]
    UnknownChoicePoint(String),
    #[error("`{option}` is not an option of choice {point}")]
    UnknownOption { point: String, option: String },
    #[error("collection `{0}` is empty but the pattern requires at least one element")]
    EmptyCollection(String),
    #[error("node {node}: placeholder `{{{placeholder}}}` has no value")]
    UnboundPlaceholder { node: String, placeholder: String },
    #[error("pattern is not well formed: {0:?}")]
    PatternNotWellFormed(Vec<Violation>),
    #[error("instantiated argument is not well formed: {0:?}")]
    IllFormed(Vec<Violation>),
    #[error("tier {tier} requirement {id} has neither evidence nor a decomposition")]
    DanglingRequirement { tier: u32, id: String },
    #[error("tier {tier} requirement {id} has unknown parent `{parent}`")]
    UnknownParent {
        tier: u32,
        id: String,
        parent: String,
    },
    #[error("tiers must be numbered 0, 1, 2, ... without gaps")]
    TierGap,
    #[error("cannot build the {0} sub-argument: {1}")]
    MissingSubArgument(PatternId, String),
    #[error("attaching {0}: {1}")]
    Attach(PatternId, crate::gsn::AttachError),
}

/// Renders a collection element for a bare `{Role}` placeholder.
fn element_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(map) => ["text", "name", "id"]
            .iter()
            .find_map(|k| map.get(*k))
            .map(render_value)
            .unwrap_or_default(),
        other => render_value(other),
    }
}

fn element_key(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .get("id")
            .or_else(|| map.get("name"))
            .map(render_value)
            .unwrap_or_default(),
        other => element_label(other),
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => if *b { "yes" } else { "no" }.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(render_value)
            .collect::<Vec<_>>()
            .join(", "),
        Value::Object(_) => element_label(v),
    }
}

fn is_empty_value(v: Option<&Value>) -> bool {
    match v {
        None | Some(Value::Null) | Some(Value::Bool(false)) => true,
        Some(Value::String(s)) => s.trim().is_empty(),
        Some(Value::Array(a)) => a.is_empty(),
        Some(Value::Object(o)) => o.is_empty(),
        Some(Value::Number(_)) | Some(Value::Bool(true)) => false,
    }
}

/// Roles bound by enclosing multiplicities, innermost last.
type Env<'b> = Vec<(&'b str, usize, &'b Value)>;

struct Expander<'b> {
    pattern: &'b GsnPattern,
    binding: &'b Binding,
    graph: GsnGraph,
    trace: Vec<TraceRecord>,
    warnings: Vec<String>,
    built: BTreeSet<String>,
}

impl<'b> Expander<'b> {
    fn lookup(&self, ph: &str, env: &Env<'b>) -> Option<String> {
        if let Some(open) = ph.find('[') {
            let map = &ph[..open];
            let key_role = ph[open + 1..].trim_end_matches(']');
            let (_, _, elem) = env.iter().rev().find(|(r, _, _)| *r == key_role)?;
            return self.binding.maps.get(map)?.get(&element_key(elem)).cloned();
        }
        let (role, field) = match ph.split_once('.') {
            Some((r, f)) => (r, Some(f)),
            None => (ph, None),
        };
        if let Some((_, _, elem)) = env.iter().rev().find(|(r, _, _)| *r == role) {
            return match field {
                None => Some(element_label(elem)),
                Some(f) => match elem.get(f) {
                    Some(v) if !v.is_null() => Some(render_value(v)),
                    _ => None,
                },
            };
        }
        if field.is_none() {
            return self.binding.scalars.get(role).cloned();
        }
        None
    }

    fn substitute(
        &self,
        node: &str,
        text: &str,
        env: &Env<'b>,
    ) -> Result<String, InstantiateError> {
        let mut out = text.to_string();
        for ph in placeholders(text) {
            let value =
                self.lookup(&ph, env)
                    .ok_or_else(|| InstantiateError::UnboundPlaceholder {
                        node: node.to_string(),
                        placeholder: ph.clone(),
                    })?;
            out = out.replacen(&format!("{{{ph}}}"), &value, 1);
        }
        Ok(out)
    }

    fn instance_id(tid: &str, env: &Env<'b>) -> String {
        let mut id = tid.to_string();
        for (_, k, _) in env {
            id.push_str(&format!("#{k}"));
        }
        id
    }

    fn selection(&self, instance: &str, tid: &str) -> Option<&'b Vec<String>> {
        self.binding
            .choices
            .get(instance)
            .or_else(|| self.binding.choices.get(tid))
    }

    fn guard_holds(&self, key: &str, env: &Env<'b>) -> bool {
        let (role, field) = key.split_once('.').unwrap_or((key, ""));
        match env.iter().rev().find(|(r, _, _)| *r == role) {
            Some((_, _, elem)) if field.is_empty() => !is_empty_value(Some(elem)),
            Some((_, _, elem)) => !is_empty_value(elem.get(field)),
            None => self
                .binding
                .scalars
                .get(role)
                .is_some_and(|s| !s.trim().is_empty()),
        }
    }

    fn keep_optional(&self, tid: &str, instance: &str, statement: &str, env: &Env<'b>) -> bool {
        if self.pattern.choice(tid).is_some() {
            return self.selection(instance, tid).is_some_and(|s| !s.is_empty());
        }
        if let Some(g) = self.pattern.guard(tid) {
            return self.guard_holds(&g.key, env);
        }
        placeholders(statement)
            .iter()
            .all(|ph| self.lookup(ph, env).is_some())
    }

    fn expand(&mut self, tid: &str, env: &Env<'b>) -> Result<Option<String>, InstantiateError> {
        let template = self
            .pattern
            .node(tid)
            .expect("pattern edges reference existing nodes");
        let instance = Self::instance_id(tid, env);
        if template.has(Flag::Optional)
            && !self.keep_optional(tid, &instance, &template.statement, env)
        {
            return Ok(None);
        }
        if !self.built.insert(instance.clone()) {
            return Ok(Some(instance));
        }

        let statement = self.substitute(&instance, &template.statement, env)?;
        let mut node = GsnNode::new(&instance, template.kind, statement);
        node.flags = template.flags.clone();
        node.flags.remove(&Flag::Optional);
        node.flags.remove(&Flag::Uninstantiated);
        if template.kind == NodeKind::Solution {
            if let Some(artifact) = template.artifact {
                node.artifact = Some(artifact);
                match self.binding.evidence.get(&artifact) {
                    Some(ev) => {
                        if ev.status != Status::Validated {
                            self.warnings.push(format!(
                                "{instance}: evidence {} is {:?}, not Validated",
                                artifact, ev.status
                            ));
                        }
                        node.evidence = Some(ev.clone());
                    }
                    None => self
                        .warnings
                        .push(format!("{instance}: no evidence bound for {artifact}")),
                }
            }
        }
        let mut bound = BTreeMap::new();
        for ph in placeholders(&template.statement) {
            if let Some(v) = self.lookup(&ph, env) {
                bound.insert(ph, v);
            }
        }
        self.trace.push(TraceRecord {
            node: instance.clone(),
            pattern_node: tid.to_string(),
            clone: env.iter().map(|(_, k, _)| *k).collect(),
            bound,
        });
        self.graph.nodes.push(node);

        let selected: Option<BTreeSet<String>> = match self.pattern.choice(tid) {
            Some(choice) => {
                let sel = self.selection(&instance, tid).cloned().unwrap_or_default();
                if sel.len() < choice.min || sel.len() > choice.max {
                    return Err(InstantiateError::ChoiceCardinality {
                        point: instance,
                        selected: sel.len(),
                        min: choice.min,
                        max: choice.max,
                    });
                }
                for o in &sel {
                    if !choice.options.contains(o) {
                        return Err(InstantiateError::UnknownOption {
                            point: instance,
                            option: o.clone(),
                        });
                    }
                }
                Some(sel.into_iter().collect())
            }
            None => None,
        };

        let edges: Vec<&GsnEdge> = self
            .pattern
            .edges
            .iter()
            .filter(|e| e.from == tid)
            .collect();
        for e in edges {
            if e.kind == EdgeKind::SupportedBy {
                if let Some(sel) = &selected {
                    if !sel.contains(&e.to) {
                        continue;
                    }
                }
            }
            let mult = if e.kind == EdgeKind::SupportedBy {
                self.pattern.multiplicity(tid, &e.to)
            } else {
                None
            };
            match mult {
                Some(m) => {
                    let binding = self.binding;
                    let items = binding
                        .collections
                        .get(&m.role)
                        .map(|v| v.as_slice())
                        .unwrap_or(&[]);
                    if items.is_empty() && m.mandatory {
                        return Err(InstantiateError::EmptyCollection(m.role.clone()));
                    }
                    for (i, item) in items.iter().enumerate() {
                        let mut child_env = env.clone();
                        child_env.push((m.role.as_str(), i + 1, item));
                        if let Some(child) = self.expand(&e.to, &child_env)? {
                            self.push_edge(&instance, &child, e);
                        }
                    }
                }
                None => {
                    if let Some(child) = self.expand(&e.to, env)? {
                        self.push_edge(&instance, &child, e);
                    }
                }
            }
        }
        Ok(Some(instance))
    }

    fn push_edge(&mut self, from: &str, to: &str, template: &GsnEdge) {
        self.graph.edges.push(GsnEdge {
            from: from.to_string(),
            to: to.to_string(),
            kind: template.kind,
            acp: template.acp.clone(),
        });
    }
}

fn validate_binding(p: &GsnPattern, b: &Binding) -> Result<(), InstantiateError> {
    for role in &p.roles {
        let name = &role.name;
        let wrong = || InstantiateError::WrongRoleType {
            role: name.clone(),
            expected: role.role_type,
        };
        match role.role_type {
            RoleType::Int | RoleType::Text | RoleType::Artifact => match b.scalars.get(name) {
                Some(v) => {
                    if role.role_type == RoleType::Int && v.trim().parse::<i64>().is_err() {
                        return Err(wrong());
                    }
                }
                None if b.collections.contains_key(name) || b.maps.contains_key(name) => {
                    return Err(wrong())
                }
                None => return Err(InstantiateError::MissingRole(name.clone())),
            },
            RoleType::Collection => {
                if !b.collections.contains_key(name) {
                    if b.scalars.contains_key(name) || b.maps.contains_key(name) {
                        return Err(wrong());
                    }
                    return Err(InstantiateError::MissingRole(name.clone()));
                }
            }
            RoleType::Map => {
                if !b.maps.contains_key(name) {
                    if b.scalars.contains_key(name) || b.collections.contains_key(name) {
                        return Err(wrong());
                    }
                    return Err(InstantiateError::MissingRole(name.clone()));
                }
            }
        }
    }
    let declared: BTreeSet<&str> = p.roles.iter().map(|r| r.name.as_str()).collect();
    for name in b
        .scalars
        .keys()
        .chain(b.collections.keys())
        .chain(b.maps.keys())
    {
        if !declared.contains(name.as_str()) {
            return Err(InstantiateError::UnexpectedRole(name.clone()));
        }
    }
    for key in b.choices.keys() {
        let base = key.split('#').next().unwrap_or(key);
        if p.choice(base).is_none() {
            return Err(InstantiateError::UnknownChoicePoint(key.clone()));
        }
    }
    Ok(())
}

/// Expands `pattern` under `binding`.
pub fn instantiate(
    pattern: &GsnPattern,
    binding: &Binding,
) -> Result<InstantiatedArgument, InstantiateError> {
    let violations = check_pattern(pattern);
    if !violations.is_empty() {
        return Err(InstantiateError::PatternNotWellFormed(violations));
    }
    validate_binding(pattern, binding)?;
    let mut ex = Expander {
        pattern,
        binding,
        graph: GsnGraph {
            root: pattern.root.clone(),
            nodes: Vec::new(),
            edges: Vec::new(),
            acp_attachments: Vec::new(),
        },
        trace: Vec::new(),
        warnings: Vec::new(),
        built: BTreeSet::new(),
    };
    ex.expand(&pattern.root, &Vec::new())?;
    let violations = check_graph(&ex.graph);
    if !violations.is_empty() {
        return Err(InstantiateError::IllFormed(violations));
    }
    Ok(InstantiatedArgument {
        graph: ex.graph,
        trace: ex.trace,
        warnings: ex.warnings,
        notes: Vec::new(),
    })
}

/// Instantiates a built-in pattern by id.
pub fn instantiate_builtin(
    id: PatternId,
    binding: &Binding,
) -> Result<InstantiatedArgument, InstantiateError> {
    instantiate(&get_pattern(id), binding)
}

/// Appends `@tier` to every node id and claim point label.
pub fn with_tier_suffix(mut arg: InstantiatedArgument, tier: u32) -> InstantiatedArgument {
    let sfx = |s: &mut String| s.push_str(&format!("@{tier}"));
    sfx(&mut arg.graph.root);
    for n in &mut arg.graph.nodes {
        sfx(&mut n.id);
    }
    for e in &mut arg.graph.edges {
        sfx(&mut e.from);
        sfx(&mut e.to);
        if let Some(a) = &mut e.acp {
            sfx(a);
        }
    }
    for a in &mut arg.graph.acp_attachments {
        sfx(&mut a.acp);
        sfx(&mut a.anchor);
        sfx(&mut a.root);
    }
    for t in &mut arg.trace {
        sfx(&mut t.node);
    }
    arg
}

/// One safety requirement as seen by the decomposition expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierRequirement {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub parents: Vec<String>,
    /// Whether verification evidence demonstrates the requirement.
    #[serde(default)]
    pub evidence: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TierInput {
    pub tier: u32,
    pub requirements: Vec<TierRequirement>,
    /// Values for the Q, W and RR artifact roles.
    #[serde(default)]
    pub artifacts: BTreeMap<String, String>,
    #[serde(default)]
    pub evidence: BTreeMap<ArtifactId, EvidenceRef>,
}

/// The synthetic parent of tier-0 requirements, which come from the SOC.
pub const SOC_PARENT: &str = "SOC";

/// Children of each requirement at `tiers[i]`, taken from tier `i + 1`.
pub fn children_by_tier(tiers: &[TierInput]) -> Vec<BTreeMap<String, Vec<String>>> {
    let mut out = vec![BTreeMap::new(); tiers.len()];
    for i in 1..tiers.len() {
        for r in &tiers[i].requirements {
            for p in &r.parents {
                out[i - 1]
                    .entry(p.clone())
                    .or_insert_with(Vec::new)
                    .push(r.id.clone());
            }
        }
    }
    out
}

/// Checks parent links and evidence before expansion.
pub fn check_tiers(tiers: &[TierInput]) -> Result<(), InstantiateError> {
    if tiers.is_empty() || tiers.iter().enumerate().any(|(i, t)| t.tier != i as u32) {
        return Err(InstantiateError::TierGap);
    }
    let children = children_by_tier(tiers);
    for (i, t) in tiers.iter().enumerate() {
        let previous: BTreeSet<&str> = if i == 0 {
            BTreeSet::new()
        } else {
            tiers[i - 1]
                .requirements
                .iter()
                .map(|r| r.id.as_str())
                .collect()
        };
        for r in &t.requirements {
            if i == 0 {
                if let Some(p) = r.parents.iter().find(|p| p.as_str() != SOC_PARENT) {
                    return Err(InstantiateError::UnknownParent {
                        tier: t.tier,
                        id: r.id.clone(),
                        parent: p.clone(),
                    });
                }
            } else {
                if r.parents.is_empty() {
                    return Err(InstantiateError::UnknownParent {
                        tier: t.tier,
                        id: r.id.clone(),
                        parent: String::new(),
                    });
                }
                if let Some(p) = r.parents.iter().find(|p| !previous.contains(p.as_str())) {
                    return Err(InstantiateError::UnknownParent {
                        tier: t.tier,
                        id: r.id.clone(),
                        parent: p.clone(),
                    });
                }
            }
            let has_children = children[i].get(&r.id).is_some_and(|c| !c.is_empty());
            if !r.evidence && !has_children {
                return Err(InstantiateError::DanglingRequirement {
                    tier: t.tier,
                    id: r.id.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Expands the decomposition pattern once per tier and links each recursion
/// marker to the next tier's strategy.
pub fn instantiate_decomposition(
    tiers: &[TierInput],
) -> Result<InstantiatedArgument, InstantiateError> {
    check_tiers(tiers)?;
    let children = children_by_tier(tiers);
    let pattern = get_pattern(PatternId::Decomposition);
    let mut merged: Option<InstantiatedArgument> = None;
    let mut previous_markers: Vec<String> = Vec::new();
    for (i, t) in tiers.iter().enumerate() {
        let reqs: Vec<Value> = t
            .requirements
            .iter()
            .map(|r| {
                serde_json::json!({
                    "id": r.id,
                    "text": r.text,
                    "evidence": r.evidence,
                    "children": children[i].get(&r.id).cloned().unwrap_or_default(),
                })
            })
            .collect();
        let mut b = Binding::default()
            .scalar("Tier", t.tier.to_string())
            .collection("SafetyRequirement", reqs);
        for role in ["Q", "W", "RR"] {
            let v = t
                .artifacts
                .get(role)
                .cloned()
                .unwrap_or_else(|| format!("{role}@{}", t.tier));
            b = b.scalar(role, v);
        }
        b.evidence = t.evidence.clone();
        let arg = with_tier_suffix(instantiate(&pattern, &b)?, t.tier);
        let strategy = arg.graph.root.clone();
        let markers: Vec<String> = arg.graph.instances_of("G9").map(|n| n.id.clone()).collect();
        merged = Some(match merged.take() {
            None => arg,
            Some(mut acc) => {
                acc.graph.nodes.extend(arg.graph.nodes);
                acc.graph.edges.extend(arg.graph.edges);
                acc.trace.extend(arg.trace);
                acc.warnings.extend(arg.warnings);
                for m in &previous_markers {
                    acc.graph
                        .edges
                        .push(GsnEdge::supported_by(m.clone(), strategy.clone()));
                    if let Some(n) = acc.graph.node_mut(m) {
                        n.flags.remove(&Flag::Undeveloped);
                    }
                }
                acc
            }
        });
        previous_markers = markers;
    }
    let arg = merged.expect("at least one tier");
    let violations = check_graph(&arg.graph);
    if !violations.is_empty() {
        return Err(InstantiateError::IllFormed(violations));
    }
    Ok(arg)
}
