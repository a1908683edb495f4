//! Cross-artifact lint: mitigation coverage, tier-to-tier intent links with
//! rationale, hazardous failure mitigations, claim point coverage and
//! verification coverage. Also derives the requirement trace matrix.
//!
//! | code | severity | finding |
//! |------|----------|---------|
//! | E101 | error | hazardous scenario without a mitigation from the SOC |
//! | E102 | error | tier n ≥ 1 requirement without a known parent |
//! | E103 | error | trace link without rationale |
//! | E104 | error | hazardous failure without mitigations |
//! | E105 | error | derived-requirement mitigation naming an unknown requirement |
//! | E106 | error | operating-concept mitigation naming no ROD |
//! | E107 | error | claim point whose sub-argument cannot be built for lack of sources |
//! | W100 | warning | artifact a rule needs is missing |
//! | W201 | warning | requirement with no test case and no formal property |
//! | W202 | warning | ODM leaf feature no test case exercises |
//! | W203 | warning | operating scenario no test case exercises |
//! | W204 | warning | no test case tagged `edge-case` |
//! | W205 | warning | leaf requirement without a passing result |
//! | W206 | warning | sub-argument that failed for reasons other than missing sources |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::artifact::{ArtifactId, ArtifactRef};
use crate::assemble::{assemble, Shortfall};
use crate::instantiate::SOC_PARENT;
use crate::project::{MitigationForm, MitigationRoute, Project, ProjectError};

pub const EDGE_CASE_TAG: &str = "edge-case";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub code: String,
    pub severity: Severity,
    pub locus: String,
    pub message: String,
}

impl Finding {
    fn new(code: &str, locus: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            code: code.to_string(),
            severity: if code.starts_with('E') {
                Severity::Error
            } else {
                Severity::Warning
            },
            locus: locus.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.code, self.locus, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkKind {
    Decomposes,
    Mitigates,
    Evidences,
    Constrains,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Endpoint {
    pub kind: String,
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<u32>,
}

impl Endpoint {
    fn new(kind: &str, id: &str, tier: Option<u32>) -> Self {
        Endpoint {
            kind: kind.to_string(),
            id: id.to_string(),
            tier,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tier {
            Some(t) => write!(f, "{}:{}@{}", self.kind, self.id, t),
            None => write!(f, "{}:{}", self.kind, self.id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraceLink {
    pub from: Endpoint,
    pub to: Endpoint,
    pub rationale: String,
    pub kind: LinkKind,
}

fn route_kind(r: MitigationRoute) -> &'static str {
    match r {
        MitigationRoute::Requirement => "requirement",
        MitigationRoute::Rod => "rod",
        MitigationRoute::CapabilityReduction => "capability_reduction",
    }
}

fn form_kind(f: MitigationForm) -> &'static str {
    match f {
        MitigationForm::DerivedRequirement => "requirement",
        MitigationForm::OperatingConceptLimitation => "rod",
        MitigationForm::DesignChange | MitigationForm::ExistingDesignSufficient => "design",
    }
}

/// Every trace link the project records, in a stable order.
pub fn trace_links(p: &Project) -> Vec<TraceLink> {
    let mut out = Vec::new();
    if let Some(soc) = &p.soc {
        for m in &soc.mitigations {
            let tier = (m.route == MitigationRoute::Requirement).then_some(0);
            out.push(TraceLink {
                from: Endpoint::new(route_kind(m.route), &m.target, tier),
                to: Endpoint::new("scenario", &m.scenario, None),
                rationale: m.rationale.clone(),
                kind: LinkKind::Mitigates,
            });
        }
    }
    for (&t, reqs) in &p.requirements {
        for r in reqs {
            for parent in &r.parents {
                let to = if t == 0 {
                    Endpoint::new("soc", parent, None)
                } else {
                    Endpoint::new("requirement", parent, Some(t - 1))
                };
                out.push(TraceLink {
                    from: Endpoint::new("requirement", &r.id, Some(t)),
                    to,
                    rationale: r.rationale.clone(),
                    kind: LinkKind::Decomposes,
                });
            }
        }
    }
    if let Some(log) = &p.verification_log {
        for c in &log.test_cases {
            for r in &c.requirements {
                out.push(TraceLink {
                    from: Endpoint::new("test", &c.id, None),
                    to: Endpoint::new("requirement", r, None),
                    rationale: c.description.clone(),
                    kind: LinkKind::Evidences,
                });
            }
        }
        for prop in &log.properties {
            for r in &prop.requirements {
                out.push(TraceLink {
                    from: Endpoint::new("property", &prop.id, None),
                    to: Endpoint::new("requirement", r, None),
                    rationale: prop.statement.clone(),
                    kind: LinkKind::Evidences,
                });
            }
        }
    }
    for (&t, records) in &p.failures {
        for f in records {
            for m in &f.mitigations {
                out.push(TraceLink {
                    from: Endpoint::new("failure", &f.id, Some(t)),
                    to: Endpoint::new(form_kind(m.form), &m.target, Some(t)),
                    rationale: m.justification.clone(),
                    kind: LinkKind::Constrains,
                });
            }
        }
    }
    out
}

fn needed_artifacts(p: &Project) -> Vec<ArtifactRef> {
    let mut out = vec![
        ArtifactRef::untiered(ArtifactId::B),
        ArtifactRef::untiered(ArtifactId::E),
        ArtifactRef::untiered(ArtifactId::L),
        ArtifactRef::untiered(ArtifactId::XX),
        ArtifactRef::untiered(ArtifactId::SS),
        ArtifactRef::untiered(ArtifactId::TT),
    ];
    for t in 0..p.tiers() {
        out.push(ArtifactRef::at(ArtifactId::Q, t));
        out.push(ArtifactRef::at(ArtifactId::BB, t));
    }
    out
}

/// Runs every rule. Findings are sorted by code, then locus.
pub fn lint(p: &Project) -> Result<Vec<Finding>, ProjectError> {
    let mut out = Vec::new();
    let (_, scenarios) = p.hazard_analysis()?;

    for r in needed_artifacts(p) {
        if p.is_missing(r) {
            out.push(Finding::new(
                "W100",
                r.to_string(),
                format!("{} ({}) is missing", r.id.title(), p.rel_path(r.id, r.tier)),
            ));
        }
    }

    // E101: every hazardous scenario needs a mitigation with a real target.
    let soc = p.soc.clone().unwrap_or_default();
    let tier0 = p.requirement_ids(0);
    let rods: BTreeSet<&str> = soc.rods.iter().map(|r| r.id.as_str()).collect();
    let reductions: BTreeSet<&str> = soc
        .capability_reductions
        .iter()
        .map(|c| c.id.as_str())
        .collect();
    for s in &scenarios {
        let mitigated = soc.mitigations.iter().any(|m| {
            m.scenario == s.id
                && match m.route {
                    MitigationRoute::Requirement => tier0.contains(m.target.as_str()),
                    MitigationRoute::Rod => rods.contains(m.target.as_str()),
                    MitigationRoute::CapabilityReduction => reductions.contains(m.target.as_str()),
                }
        });
        if !mitigated {
            out.push(Finding::new(
                "E101",
                &s.id,
                format!(
                    "hazardous scenario {} has no mitigation in the SOC",
                    s.statement
                ),
            ));
        }
    }

    // E102: tier n >= 1 requirements trace to known parents.
    for (&t, reqs) in &p.requirements {
        if t == 0 {
            continue;
        }
        let parents = p.requirement_ids(t - 1);
        for r in reqs {
            let unknown: Vec<&String> = r
                .parents
                .iter()
                .filter(|x| !parents.contains(x.as_str()))
                .collect();
            if r.parents.is_empty() || !unknown.is_empty() {
                let detail = if r.parents.is_empty() {
                    "names no parent".to_string()
                } else {
                    format!(
                        "names parents not at tier {}: {}",
                        t - 1,
                        unknown
                            .iter()
                            .map(|s| s.as_str())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                };
                out.push(Finding::new("E102", format!("tier-{t}/{}", r.id), detail));
            }
        }
    }

    // E103: links carry a rationale, except the synthetic SOC roots.
    for l in trace_links(p) {
        let synthetic =
            l.kind == LinkKind::Decomposes && l.to.kind == "soc" && l.to.id == SOC_PARENT;
        if !synthetic && l.rationale.trim().is_empty() {
            out.push(Finding::new(
                "E103",
                format!("{}->{}", l.from, l.to),
                format!("{:?} link has no rationale", l.kind),
            ));
        }
    }

    // E104-E106: hazardous failure mitigations.
    for (&t, records) in &p.failures {
        let reqs = p.requirement_ids(t);
        for f in records {
            let locus = format!("tier-{t}/{}", f.id);
            if f.hazardous && f.mitigations.is_empty() {
                out.push(Finding::new(
                    "E104",
                    &locus,
                    format!("hazardous failure \"{}\" has no mitigation", f.deviation),
                ));
            }
            for m in &f.mitigations {
                match m.form {
                    MitigationForm::DerivedRequirement if !reqs.contains(m.target.as_str()) => out
                        .push(Finding::new(
                            "E105",
                            &locus,
                            format!(
                                "derived requirement {} is not a tier {t} requirement",
                                m.target
                            ),
                        )),
                    MitigationForm::OperatingConceptLimitation
                        if !rods.contains(m.target.as_str()) =>
                    {
                        out.push(Finding::new(
                            "E106",
                            &locus,
                            format!("operating concept limitation {} is not a ROD", m.target),
                        ))
                    }
                    _ => {}
                }
            }
        }
    }

    // E107 and W206: claim points left without confidence arguments.
    let assembly = assemble(p)?;
    for u in &assembly.unattached {
        match &u.shortfall {
            Shortfall::MissingSources { artifacts } if u.site != "G4" => out.push(Finding::new(
                "E107",
                &u.site,
                format!(
                    "{} not attached: missing {}",
                    u.pattern,
                    artifacts
                        .iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            )),
            Shortfall::MissingSources { artifacts } => out.push(Finding::new(
                "W206",
                &u.site,
                format!(
                    "{} not built: missing {}",
                    u.pattern,
                    artifacts
                        .iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            )),
            Shortfall::Failed { reason } => out.push(Finding::new(
                "W206",
                &u.site,
                format!("{} not attached: {reason}", u.pattern),
            )),
        }
    }

    // W201-W205: verification coverage.
    let log = p.verification_log.clone().unwrap_or_default();
    let children = children_ids(p);
    for (&t, reqs) in &p.requirements {
        for r in reqs {
            if p.verification_of(&r.id).is_empty() {
                out.push(Finding::new(
                    "W201",
                    format!("tier-{t}/{}", r.id),
                    "no test case or formal property covers this requirement",
                ));
            }
            let leaf = children
                .get(&(t, r.id.clone()))
                .is_none_or(|c| c.is_empty());
            if leaf && p.passing_evidence(&r.id).is_empty() {
                out.push(Finding::new(
                    "W205",
                    format!("tier-{t}/{}", r.id),
                    "leaf requirement has no passing verification result",
                ));
            }
        }
    }
    let exercised: BTreeSet<&str> = log
        .test_cases
        .iter()
        .flat_map(|c| c.features.iter().map(|s| s.as_str()))
        .collect();
    if let Some(odm) = &p.odm {
        for leaf in odm.leaf_paths() {
            if !exercised.contains(leaf.as_str()) {
                out.push(Finding::new(
                    "W202",
                    &leaf,
                    "ODM leaf feature is not exercised by any test case",
                ));
            }
        }
    }
    let visited: BTreeSet<&str> = log
        .test_cases
        .iter()
        .flat_map(|c| c.scenarios.iter().map(|s| s.as_str()))
        .collect();
    if let Some(cat) = &p.scenarios {
        for s in &cat.scenarios {
            if !visited.contains(s.id.as_str()) {
                out.push(Finding::new(
                    "W203",
                    &s.id,
                    "operating scenario is not exercised by any test case",
                ));
            }
        }
    }
    if !log
        .test_cases
        .iter()
        .any(|c| c.tags.iter().any(|t| t == EDGE_CASE_TAG))
    {
        out.push(Finding::new(
            "W204",
            p.rel_path(ArtifactId::SS, None),
            "no test case is tagged edge-case",
        ));
    }

    out.sort();
    out.dedup();
    Ok(out)
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

/// Children of each (tier, requirement) at the next tier.
fn children_ids(p: &Project) -> BTreeMap<(u32, String), Vec<String>> {
    let mut out: BTreeMap<(u32, String), Vec<String>> = BTreeMap::new();
    for (&t, reqs) in &p.requirements {
        if t == 0 {
            continue;
        }
        for r in reqs {
            for parent in &r.parents {
                out.entry((t - 1, parent.clone()))
                    .or_default()
                    .push(r.id.clone());
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub tier: u32,
    pub id: String,
    pub parents: Vec<String>,
    pub children: Vec<String>,
    pub evidence: Vec<String>,
    pub scenarios: Vec<String>,
}

/// One row per requirement across all tiers, in tier then file order.
pub fn trace_matrix(p: &Project) -> Vec<TraceRow> {
    let children = children_ids(p);
    let links = trace_links(p);
    let mut rows = Vec::new();
    for (&t, reqs) in &p.requirements {
        for r in reqs {
            let from = Endpoint::new("requirement", &r.id, Some(t));
            let mut scenarios: Vec<String> = links
                .iter()
                .filter(|l| l.kind == LinkKind::Mitigates && l.from == from)
                .map(|l| l.to.id.clone())
                .collect();
            scenarios.sort();
            scenarios.dedup();
            rows.push(TraceRow {
                tier: t,
                id: r.id.clone(),
                parents: r.parents.clone(),
                children: children
                    .get(&(t, r.id.clone()))
                    .cloned()
                    .unwrap_or_default(),
                evidence: p
                    .passing_evidence(&r.id)
                    .into_iter()
                    .map(String::from)
                    .collect(),
                scenarios,
            });
        }
    }
    rows
}

/// Trace matrix as CSV with `;`-joined list cells.
pub fn trace_matrix_csv(rows: &[TraceRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tier", "id", "parents", "children", "evidence", "scenarios"])?;
    for r in rows {
        w.write_record([
            r.tier.to_string(),
            r.id.clone(),
            r.parents.join(";"),
            r.children.join(";"),
            r.evidence.join(";"),
            r.scenarios.join(";"),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}
