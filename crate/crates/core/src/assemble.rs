//! Builds the complete safety case of a project: the baseline argument, the
//! per-tier decomposition under G4, and every confidence sub-argument hung
//! off its assurance claim point.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::artifact::{ArtifactId, ArtifactRef};
use crate::gsn::{attach_confidence, check_graph, Flag, GsnEdge, RoleType};
use crate::instantiate::{
    instantiate_builtin, instantiate_decomposition, with_tier_suffix, Binding, InstantiateError,
    InstantiatedArgument, TierInput, TierRequirement, SOC_PARENT,
};
use crate::patterns::{get_pattern, PatternId};
use crate::project::{MitigationForm, MitigationRoute, Project, ProjectError};

/// Where each untiered sub-argument attaches.
pub const TOP_LEVEL_SITES: [(PatternId, &str); 4] = [
    (PatternId::OperatingContext, "ACP-context"),
    (PatternId::HazardousScenarios, "ACP-hazards"),
    (PatternId::Soc, "ACP-soc"),
    (PatternId::OutOfContext, "ACP-ooc"),
];

/// Where each per-tier sub-argument attaches, before the `@n` suffix.
pub const TIER_SITES: [(PatternId, &str); 4] = [
    (PatternId::SafetyRequirements, "ACP-requirements"),
    (PatternId::DesignAssurance, "ACP-design"),
    (PatternId::HazardousFailures, "ACP-failures"),
    (PatternId::Verification, "ACP-verification"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shortfall {
    /// Source artifacts of the sub-argument are absent or blank.
    MissingSources { artifacts: Vec<ArtifactRef> },
    /// The sources exist but the sub-argument could not be built or attached.
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unattached {
    pub pattern: PatternId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<u32>,
    /// Claim point label, or `G4` for the decomposition itself.
    pub site: String,
    pub shortfall: Shortfall,
}

/// The assembled argument plus every sub-argument that could not be added.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assembly {
    pub argument: InstantiatedArgument,
    pub unattached: Vec<Unattached>,
}

/// Source artifacts a pattern's roles draw on.
pub fn pattern_sources(id: PatternId, tier: Option<u32>) -> Vec<ArtifactRef> {
    get_pattern(id)
        .roles
        .iter()
        .filter(|r| r.role_type == RoleType::Artifact)
        .filter_map(|r| r.name.parse::<ArtifactId>().ok())
        .map(|a| {
            if a.is_tier_indexed() {
                ArtifactRef::new(a, tier)
            } else {
                ArtifactRef::untiered(a)
            }
        })
        .collect()
}

fn artifact_binding(p: &Project, id: PatternId, tier: Option<u32>) -> Binding {
    let mut b = Binding::default();
    for r in pattern_sources(id, tier) {
        b.scalars
            .insert(r.id.code().to_string(), p.rel_path(r.id, r.tier));
        b.evidence.insert(r.id, p.evidence(r.id, r.tier));
    }
    b
}

fn failed(e: impl ToString) -> Shortfall {
    Shortfall::Failed {
        reason: e.to_string(),
    }
}

fn missing_sources(p: &Project, id: PatternId, tier: Option<u32>) -> Option<Shortfall> {
    let artifacts: Vec<ArtifactRef> = pattern_sources(id, tier)
        .into_iter()
        .filter(|r| p.is_missing(*r))
        .collect();
    (!artifacts.is_empty()).then_some(Shortfall::MissingSources { artifacts })
}

fn baseline(p: &Project, scenario_count: usize) -> Result<InstantiatedArgument, InstantiateError> {
    let b = artifact_binding(p, PatternId::Baseline, None)
        .scalar("System", p.name())
        .scalar(
            "OperatingContext",
            format!(
                "the Operational Domain Model in {}",
                p.rel_path(ArtifactId::B, None)
            ),
        )
        .scalar(
            "HazardousScenarios",
            format!(
                "{scenario_count} hazardous scenarios from the decision analysis in {}",
                p.rel_path(ArtifactId::XX, None)
            ),
        );
    instantiate_builtin(PatternId::Baseline, &b)
}

/// Tier inputs for the decomposition, with requirement evidence taken from
/// passing verification results.
pub fn tier_inputs(p: &Project) -> Vec<TierInput> {
    (0..p.tiers())
        .map(|t| {
            let requirements = p
                .requirements
                .get(&t)
                .map(|rs| {
                    rs.iter()
                        .map(|r| TierRequirement {
                            id: r.id.clone(),
                            text: r.text.clone(),
                            parents: r.parents.clone(),
                            evidence: !p.passing_evidence(&r.id).is_empty(),
                        })
                        .collect()
                })
                .unwrap_or_default();
            let mut artifacts = BTreeMap::new();
            let mut evidence = BTreeMap::new();
            for id in [ArtifactId::Q, ArtifactId::W, ArtifactId::RR, ArtifactId::TT] {
                artifacts.insert(id.code().to_string(), p.rel_path(id, Some(t)));
                evidence.insert(id, p.evidence(id, Some(t)));
            }
            artifacts.remove("TT");
            TierInput {
                tier: t,
                requirements,
                artifacts,
                evidence,
            }
        })
        .collect()
}

fn sub_argument(
    p: &Project,
    id: PatternId,
    tier: Option<u32>,
    scenarios: &[crate::hazard::HazardousScenario],
) -> Result<InstantiatedArgument, Shortfall> {
    if let Some(s) = missing_sources(p, id, tier) {
        return Err(s);
    }
    let mut b = artifact_binding(p, id, tier);
    let t = tier.unwrap_or(0);
    if let Some(n) = tier {
        b = b.scalar("Tier", n.to_string());
    }
    let mut notes = Vec::new();
    match id {
        PatternId::OperatingContext => {
            let odm = p.odm.as_ref().ok_or_else(|| failed("ODM not loaded"))?;
            let features = odm
                .leaf_paths()
                .into_iter()
                .map(|path| {
                    let rationale = odm
                        .find(&path)
                        .and_then(|f| f.granularity_rationale.clone())
                        .unwrap_or_default();
                    json!({"name": path, "rationale": rationale})
                })
                .collect();
            b = b.collection("OdmFeature", features);
        }
        PatternId::Soc => {
            let soc = p.soc.clone().unwrap_or_default();
            let items = scenarios
                .iter()
                .map(|s| json!({"id": s.id, "text": s.statement}))
                .collect();
            b = b.collection("HazardousScenario", items);
            for (k, s) in scenarios.iter().enumerate() {
                let routes: BTreeSet<MitigationRoute> = soc
                    .mitigations
                    .iter()
                    .filter(|m| m.scenario == s.id)
                    .map(|m| m.route)
                    .collect();
                let mut sel = Vec::new();
                if routes.contains(&MitigationRoute::Rod) {
                    sel.push("G3.5".to_string());
                }
                if routes.contains(&MitigationRoute::CapabilityReduction) {
                    sel.push("G3.6".to_string());
                }
                if !sel.is_empty() {
                    b.choices.insert(format!("G3.4#{}", k + 1), sel);
                }
            }
        }
        PatternId::SafetyRequirements => {
            let (parents, map) = if t == 0 {
                let ids: Vec<String> = p
                    .requirements
                    .get(&0)
                    .map(|rs| rs.iter().map(|r| r.id.clone()).collect())
                    .unwrap_or_default();
                (
                    vec![json!({"id": SOC_PARENT})],
                    BTreeMap::from([(SOC_PARENT.to_string(), ids.join(", "))]),
                )
            } else {
                let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
                for r in p.requirements.get(&t).into_iter().flatten() {
                    for parent in &r.parents {
                        children
                            .entry(parent.clone())
                            .or_default()
                            .push(r.id.clone());
                    }
                }
                let parents = p
                    .requirements
                    .get(&(t - 1))
                    .into_iter()
                    .flatten()
                    .filter(|r| children.contains_key(&r.id))
                    .map(|r| json!({"id": r.id, "text": r.text}))
                    .collect();
                let map = children
                    .into_iter()
                    .map(|(k, v)| (k, v.join(", ")))
                    .collect();
                (parents, map)
            };
            b = b
                .collection("ParentRequirement", parents)
                .map("TierRequirementMap", map);
        }
        PatternId::DesignAssurance => {
            let decisions = p
                .design_logs
                .get(&t)
                .map(|log| {
                    log.decisions
                        .iter()
                        .filter(|d| d.safety_relevant)
                        .map(|d| serde_json::to_value(d).unwrap_or(Value::Null))
                        .collect()
                })
                .unwrap_or_default();
            b = b.collection("DesignDecision", decisions);
            notes.push(format!(
                "tier {t}: design decisions limited to those flagged safety_relevant"
            ));
        }
        PatternId::HazardousFailures => {
            let hazardous: Vec<_> = p
                .failures
                .get(&t)
                .into_iter()
                .flatten()
                .filter(|f| f.hazardous)
                .collect();
            for (k, f) in hazardous.iter().enumerate() {
                let forms: BTreeSet<MitigationForm> =
                    f.mitigations.iter().map(|m| m.form).collect();
                let mut sel = Vec::new();
                for (form, option) in [
                    (MitigationForm::DerivedRequirement, "Sn6.3"),
                    (MitigationForm::DesignChange, "Sn6.2"),
                    (MitigationForm::ExistingDesignSufficient, "Sn6.2"),
                    (MitigationForm::OperatingConceptLimitation, "Sn6.5"),
                ] {
                    if forms.contains(&form) && !sel.contains(&option.to_string()) {
                        sel.push(option.to_string());
                    }
                }
                b.choices.insert(format!("G6.4#{}", k + 1), sel);
            }
            let items = hazardous
                .iter()
                .map(|f| json!({"id": f.id, "deviation": f.deviation}))
                .collect();
            b = b.collection("HazardousFailure", items);
        }
        PatternId::Verification => {
            let reqs: Vec<_> = p.requirements.get(&t).into_iter().flatten().collect();
            let log = p.verification_log.clone().unwrap_or_default();
            let tested = reqs.iter().any(|r| {
                log.test_cases
                    .iter()
                    .any(|c| c.requirements.contains(&r.id))
            });
            let proven = reqs.iter().any(|r| {
                log.properties
                    .iter()
                    .any(|c| c.requirements.contains(&r.id))
            });
            let mut sel = Vec::new();
            if tested {
                sel.push("G8.2".to_string());
            }
            if proven {
                sel.push("G8.6".to_string());
            }
            b.choices.insert("S8.1".into(), sel);
            let items = reqs
                .iter()
                .map(|r| json!({"id": r.id, "text": r.text}))
                .collect();
            b = b.collection("SafetyRequirement", items);
        }
        _ => {}
    }
    let mut arg = instantiate_builtin(id, &b).map_err(failed)?;
    arg.notes.extend(notes);
    Ok(match tier {
        Some(n) => with_tier_suffix(arg, n),
        None => arg,
    })
}

/// Builds one pattern's argument from the project sources. The decomposition
/// covers every tier and ignores `tier`.
pub fn build_sub_argument(
    p: &Project,
    id: PatternId,
    tier: Option<u32>,
) -> Result<InstantiatedArgument, Shortfall> {
    let (_, scenarios) = p.hazard_analysis().map_err(failed)?;
    match id {
        PatternId::Baseline => baseline(p, scenarios.len()).map_err(failed),
        PatternId::Decomposition => {
            let missing: Vec<ArtifactRef> = (0..p.tiers())
                .flat_map(|t| pattern_sources(PatternId::Decomposition, Some(t)))
                .filter(|r| p.is_missing(*r))
                .collect();
            if !missing.is_empty() {
                return Err(Shortfall::MissingSources { artifacts: missing });
            }
            instantiate_decomposition(&tier_inputs(p)).map_err(failed)
        }
        _ if id.is_tiered() && tier.is_none() => Err(failed(format!("{id} needs a tier"))),
        _ => sub_argument(p, id, if id.is_tiered() { tier } else { None }, &scenarios),
    }
}

fn absorb(acc: &mut InstantiatedArgument, part: InstantiatedArgument, graph: crate::gsn::GsnGraph) {
    acc.graph = graph;
    acc.trace.extend(part.trace);
    acc.warnings.extend(part.warnings);
    acc.notes.extend(part.notes);
}

/// Assembles as much of the case as the project supports. Only a failure of
/// the baseline itself is an error.
pub fn assemble(p: &Project) -> Result<Assembly, ProjectError> {
    let (_, scenarios) = p.hazard_analysis()?;
    let mut arg = baseline(p, scenarios.len()).map_err(|e| ProjectError::Parse {
        path: crate::registry::MANIFEST_FILE.into(),
        message: e.to_string(),
    })?;
    let mut unattached = Vec::new();

    let mut decomposed = false;
    {
        match build_sub_argument(p, PatternId::Decomposition, None) {
            Ok(d) => {
                let mut g = arg.graph.clone();
                g.nodes.extend(d.graph.nodes.iter().cloned());
                g.edges.extend(d.graph.edges.iter().cloned());
                g.edges
                    .push(GsnEdge::supported_by("G4", d.graph.root.clone()));
                if let Some(n) = g.node_mut("G4") {
                    n.flags.remove(&Flag::Undeveloped);
                }
                absorb(&mut arg, d, g);
                decomposed = true;
            }
            Err(shortfall) => unattached.push(Unattached {
                pattern: PatternId::Decomposition,
                tier: None,
                site: "G4".into(),
                shortfall,
            }),
        }
    }

    let mut sites: Vec<(PatternId, Option<u32>, String)> = TOP_LEVEL_SITES
        .iter()
        .map(|(id, acp)| (*id, None, acp.to_string()))
        .collect();
    if decomposed {
        for t in 0..p.tiers() {
            for (id, acp) in TIER_SITES {
                sites.push((id, Some(t), format!("{acp}@{t}")));
            }
        }
    }
    for (id, tier, acp) in sites {
        let outcome = sub_argument(p, id, tier, &scenarios).and_then(|sub| {
            attach_confidence(&arg.graph, &acp, &sub.graph)
                .map(|g| (sub, g))
                .map_err(failed)
        });
        match outcome {
            Ok((sub, g)) => absorb(&mut arg, sub, g),
            Err(shortfall) => unattached.push(Unattached {
                pattern: id,
                tier,
                site: acp,
                shortfall,
            }),
        }
    }
    Ok(Assembly {
        argument: arg,
        unattached,
    })
}

/// The complete case, failing on the first sub-argument that is absent.
pub fn assemble_full_case(p: &Project) -> Result<InstantiatedArgument, InstantiateError> {
    let assembly = assemble(p)
        .map_err(|e| InstantiateError::MissingSubArgument(PatternId::Baseline, e.to_string()))?;
    if let Some(u) = assembly.unattached.first() {
        let why = match &u.shortfall {
            Shortfall::MissingSources { artifacts } => format!(
                "missing {}",
                artifacts
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Shortfall::Failed { reason } => reason.clone(),
        };
        return Err(InstantiateError::MissingSubArgument(u.pattern, why));
    }
    let violations = check_graph(&assembly.argument.graph);
    if !violations.is_empty() {
        return Err(InstantiateError::IllFormed(violations));
    }
    Ok(assembly.argument)
}
