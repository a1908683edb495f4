//! The ten built-in argument patterns.
//!
//! Node ids follow the labels used in the methodology's pattern walkthroughs.
//! Solution and context ids that the walkthroughs do not name are numbered
//! within the pattern's own prefix. Statements are reconstructed from prose,
//! so every pattern is marked `reconstructed`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::artifact::ArtifactId;
use crate::gsn::{
    Choice, Flag, GsnEdge, GsnNode, GsnPattern, Guard, Multiplicity, NodeKind, Role, RoleType,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternId {
    Baseline,
    Decomposition,
    #[serde(rename = "G-OperatingContext")]
    OperatingContext,
    #[serde(rename = "I-HazardousScenarios")]
    HazardousScenarios,
    #[serde(rename = "N-SOC")]
    Soc,
    #[serde(rename = "S-SafetyRequirements")]
    SafetyRequirements,
    #[serde(rename = "U-DesignAssurance")]
    DesignAssurance,
    #[serde(rename = "DD-HazardousFailures")]
    HazardousFailures,
    #[serde(rename = "PP-OutOfContext")]
    OutOfContext,
    #[serde(rename = "UU-Verification")]
    Verification,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown pattern `{0}`")]
pub struct UnknownPattern(pub String);

impl PatternId {
    pub const ALL: [PatternId; 10] = [
        PatternId::Baseline,
        PatternId::Decomposition,
        PatternId::OperatingContext,
        PatternId::HazardousScenarios,
        PatternId::Soc,
        PatternId::SafetyRequirements,
        PatternId::DesignAssurance,
        PatternId::HazardousFailures,
        PatternId::OutOfContext,
        PatternId::Verification,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternId::Baseline => "Baseline",
            PatternId::Decomposition => "Decomposition",
            PatternId::OperatingContext => "G-OperatingContext",
            PatternId::HazardousScenarios => "I-HazardousScenarios",
            PatternId::Soc => "N-SOC",
            PatternId::SafetyRequirements => "S-SafetyRequirements",
            PatternId::DesignAssurance => "U-DesignAssurance",
            PatternId::HazardousFailures => "DD-HazardousFailures",
            PatternId::OutOfContext => "PP-OutOfContext",
            PatternId::Verification => "UU-Verification",
        }
    }

    /// The pattern artifact this id corresponds to, for the lettered eight.
    pub fn artifact(self) -> Option<ArtifactId> {
        match self {
            PatternId::Baseline | PatternId::Decomposition => None,
            PatternId::OperatingContext => Some(ArtifactId::G),
            PatternId::HazardousScenarios => Some(ArtifactId::I),
            PatternId::Soc => Some(ArtifactId::N),
            PatternId::SafetyRequirements => Some(ArtifactId::S),
            PatternId::DesignAssurance => Some(ArtifactId::U),
            PatternId::HazardousFailures => Some(ArtifactId::DD),
            PatternId::OutOfContext => Some(ArtifactId::PP),
            PatternId::Verification => Some(ArtifactId::UU),
        }
    }

    /// The instantiated argument artifact the pattern produces.
    pub fn output(self) -> Option<ArtifactId> {
        match self {
            PatternId::Baseline | PatternId::Decomposition => None,
            PatternId::OperatingContext => Some(ArtifactId::H),
            PatternId::HazardousScenarios => Some(ArtifactId::J),
            PatternId::Soc => Some(ArtifactId::O),
            PatternId::SafetyRequirements => Some(ArtifactId::T),
            PatternId::DesignAssurance => Some(ArtifactId::AA),
            PatternId::HazardousFailures => Some(ArtifactId::EE),
            PatternId::OutOfContext => Some(ArtifactId::QQ),
            PatternId::Verification => Some(ArtifactId::VV),
        }
    }

    pub fn is_tiered(self) -> bool {
        matches!(
            self,
            PatternId::Decomposition
                | PatternId::SafetyRequirements
                | PatternId::DesignAssurance
                | PatternId::HazardousFailures
                | PatternId::Verification
        )
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternId {
    type Err = UnknownPattern;

    /// Accepts the full name (`N-SOC`) or the artifact letter (`N`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        PatternId::ALL
            .iter()
            .copied()
            .find(|p| {
                p.name().eq_ignore_ascii_case(s)
                    || p.artifact()
                        .is_some_and(|a| a.code().eq_ignore_ascii_case(s))
            })
            .ok_or_else(|| UnknownPattern(s.to_string()))
    }
}

struct Builder {
    p: GsnPattern,
}

impl Builder {
    fn new(id: PatternId, root: &str) -> Self {
        Builder {
            p: GsnPattern {
                id: id.name().to_string(),
                root: root.to_string(),
                nodes: Vec::new(),
                edges: Vec::new(),
                multiplicities: Vec::new(),
                choices: Vec::new(),
                roles: Vec::new(),
                guards: Vec::new(),
                recursion: None,
                reconstructed: true,
            },
        }
    }

    fn role(mut self, name: &str, role_type: RoleType) -> Self {
        self.p.roles.push(Role {
            name: name.to_string(),
            role_type,
        });
        self
    }

    fn artifact_roles(mut self, ids: &[ArtifactId]) -> Self {
        for id in ids {
            self = self.role(id.code(), RoleType::Artifact);
        }
        self
    }

    fn node(mut self, id: &str, kind: NodeKind, statement: &str) -> Self {
        let n = GsnNode::new(id, kind, statement);
        let n = if statement.contains('{') {
            n.with_flag(Flag::Uninstantiated)
        } else {
            n
        };
        self.p.nodes.push(n);
        self
    }

    fn goal(self, id: &str, s: &str) -> Self {
        self.node(id, NodeKind::Goal, s)
    }

    fn strategy(self, id: &str, s: &str) -> Self {
        self.node(id, NodeKind::Strategy, s)
    }

    fn context(self, id: &str, s: &str) -> Self {
        self.node(id, NodeKind::Context, s)
    }

    fn justification(self, id: &str, s: &str) -> Self {
        self.node(id, NodeKind::Justification, s)
    }

    fn solution(mut self, id: &str, cites: ArtifactId, s: &str) -> Self {
        self = self.node(id, NodeKind::Solution, s);
        self.p.nodes.last_mut().unwrap().artifact = Some(cites);
        self
    }

    fn flag(mut self, id: &str, flag: Flag) -> Self {
        if let Some(n) = self.p.nodes.iter_mut().find(|n| n.id == id) {
            n.flags.insert(flag);
        }
        self
    }

    fn support(mut self, from: &str, to: &str) -> Self {
        self.p.edges.push(GsnEdge::supported_by(from, to));
        self
    }

    fn support_acp(mut self, from: &str, to: &str, acp: &str) -> Self {
        self.p
            .edges
            .push(GsnEdge::supported_by(from, to).with_acp(acp));
        self
    }

    fn ctx(mut self, from: &str, to: &str) -> Self {
        self.p.edges.push(GsnEdge::in_context_of(from, to));
        self
    }

    fn ctx_acp(mut self, from: &str, to: &str, acp: &str) -> Self {
        self.p
            .edges
            .push(GsnEdge::in_context_of(from, to).with_acp(acp));
        self
    }

    fn many(mut self, from: &str, to: &str, role: &str, mandatory: bool) -> Self {
        self.p.multiplicities.push(Multiplicity {
            from: from.to_string(),
            to: to.to_string(),
            role: role.to_string(),
            mandatory,
        });
        self
    }

    fn choice(mut self, parent: &str, options: &[&str], min: usize, max: usize) -> Self {
        self.p.choices.push(Choice {
            parent: parent.to_string(),
            options: options.iter().map(|s| s.to_string()).collect(),
            min,
            max,
        });
        self
    }

    fn guard(mut self, node: &str, key: &str) -> Self {
        self.p.guards.push(Guard {
            node: node.to_string(),
            key: key.to_string(),
        });
        self.flag(node, Flag::Optional)
    }

    fn build(self) -> GsnPattern {
        self.p
    }
}

use ArtifactId as Id;

fn baseline() -> GsnPattern {
    Builder::new(PatternId::Baseline, "G0")
        .role("System", RoleType::Text)
        .role("OperatingContext", RoleType::Text)
        .role("HazardousScenarios", RoleType::Text)
        .artifact_roles(&[Id::K])
        .goal(
            "G0",
            "{System} is sufficiently safe to operate throughout its operational life",
        )
        .context("C0", "Definition of sufficiently safe: {K}")
        .strategy(
            "S1",
            "Argument splitting the safety claim into operation within and outside the defined operating context",
        )
        .context("C1", "Operating context of {System}: {OperatingContext}")
        .goal(
            "G1",
            "{System} is sufficiently safe when operating within the defined operating context",
        )
        .context("C2", "Hazardous scenarios: {HazardousScenarios}")
        .goal(
            "G3",
            "All hazardous scenarios associated with the operation of {System} in the operating context are sufficiently mitigated",
        )
        .goal("G4", "The defined Safe Operating Concept is satisfied by {System}")
        .flag("G4", Flag::Undeveloped)
        .goal(
            "G7",
            "{System} is sufficiently safe when operating outside of the defined operating context",
        )
        .flag("G7", Flag::Undeveloped)
        .ctx("G0", "C0")
        .support("G0", "S1")
        .ctx_acp("S1", "C1", "ACP-context")
        .support("S1", "G1")
        .support_acp("S1", "G7", "ACP-ooc")
        .support("G1", "G3")
        .ctx_acp("G3", "C2", "ACP-hazards")
        .support_acp("G3", "G4", "ACP-soc")
        .build()
}

fn decomposition() -> GsnPattern {
    Builder::new(PatternId::Decomposition, "S3")
        .role("Tier", RoleType::Int)
        .role("SafetyRequirement", RoleType::Collection)
        .artifact_roles(&[Id::Q, Id::W, Id::RR])
        .strategy(
            "S3",
            "Argument over the safety requirements identified at tier {Tier}",
        )
        .context("C4", "Safety requirements for tier {Tier}: {Q}")
        .context("C5", "Tier {Tier} design: {W}")
        .context("C6", "Verification strategy: {RR}")
        .goal(
            "G5",
            "Safety requirement {SafetyRequirement.id} is satisfied: {SafetyRequirement.text}",
        )
        .goal(
            "G8",
            "Evidence demonstrates that safety requirement {SafetyRequirement.id} is satisfied",
        )
        .solution(
            "Sn8",
            Id::TT,
            "Verification results for {SafetyRequirement.id}",
        )
        .goal(
            "G9",
            "The safety requirements decomposed from {SafetyRequirement.id} are satisfied at the next tier",
        )
        .flag("G9", Flag::Undeveloped)
        .goal(
            "G6",
            "Hazardous failures introduced during the design of tier {Tier} are sufficiently managed",
        )
        .flag("G6", Flag::Undeveloped)
        .ctx_acp("S3", "C4", "ACP-requirements")
        .ctx_acp("S3", "C5", "ACP-design")
        .ctx_acp("S3", "C6", "ACP-verification")
        .support("S3", "G5")
        .many("S3", "G5", "SafetyRequirement", true)
        .support("G5", "G8")
        .support("G8", "Sn8")
        .support("G5", "G9")
        .support_acp("S3", "G6", "ACP-failures")
        .guard("G8", "SafetyRequirement.evidence")
        .guard("G9", "SafetyRequirement.children")
        .recursion("G9")
        .build()
}

impl Builder {
    fn recursion(mut self, node: &str) -> Self {
        self.p.recursion = Some(node.to_string());
        self
    }
}

fn operating_context() -> GsnPattern {
    Builder::new(PatternId::OperatingContext, "G1.1")
        .role("OdmFeature", RoleType::Collection)
        .artifact_roles(&[Id::B, Id::C, Id::D, Id::E, Id::F])
        .goal(
            "G1.1",
            "The operating context of the AS is completely and correctly defined",
        )
        .goal(
            "G1.2",
            "The ODM is sufficient to support the autonomous capabilities of the AS",
        )
        .context("C1.1", "Operational Domain Model: {B}")
        .context("C1.2", "Autonomous capabilities: {D}")
        .goal(
            "G1.5",
            "All safety-relevant features of the operating environment are identified in the ODM",
        )
        .solution("Sn1.1", Id::C, "ODM validation report: {C}")
        .goal(
            "G1.3",
            "Feature {OdmFeature.name} is defined at a sufficient level of detail",
        )
        .solution(
            "Sn1.2",
            Id::B,
            "Level of detail rationale for {OdmFeature.name}: {OdmFeature.rationale}",
        )
        .goal("G1.4", "All relevant operating scenarios are identified")
        .context("C1.3", "Operating scenarios: {E}")
        .solution("Sn1.3", Id::F, "Operating scenarios validation report: {F}")
        .support("G1.1", "G1.2")
        .support("G1.1", "G1.4")
        .ctx("G1.2", "C1.1")
        .ctx("G1.2", "C1.2")
        .support("G1.2", "G1.5")
        .support("G1.5", "Sn1.1")
        .support("G1.2", "G1.3")
        .many("G1.2", "G1.3", "OdmFeature", true)
        .support("G1.3", "Sn1.2")
        .ctx("G1.4", "C1.3")
        .support("G1.4", "Sn1.3")
        .build()
}

fn hazardous_scenarios() -> GsnPattern {
    Builder::new(PatternId::HazardousScenarios, "G2.1")
        .artifact_roles(&[Id::B, Id::E, Id::WW, Id::XX, Id::YY])
        .goal(
            "G2.1",
            "The hazardous scenarios relating to the operation of the AS have been sufficiently identified",
        )
        .context("C2.1", "Hazardous scenarios definition: {XX}")
        .goal(
            "G2.2",
            "A sufficient process was followed to identify the hazardous scenarios",
        )
        .context("C2.2", "Operating scenarios: {E}")
        .context("C2.3", "Operational Domain Model: {B}")
        .goal(
            "G2.4",
            "All decisions made by the AS in each operating scenario were analysed",
        )
        .solution("Sn2.1", Id::WW, "Decision analysis report: {WW}")
        .goal(
            "G2.5",
            "All interactions with the operating environment were considered",
        )
        .solution("Sn2.2", Id::WW, "Decision analysis report: {WW}")
        .goal(
            "G2.3",
            "The identified hazardous scenarios have been validated",
        )
        .solution("Sn2.3", Id::YY, "Hazardous scenarios validation report: {YY}")
        .ctx("G2.1", "C2.1")
        .support("G2.1", "G2.2")
        .support("G2.1", "G2.3")
        .ctx("G2.2", "C2.2")
        .ctx("G2.2", "C2.3")
        .support("G2.2", "G2.4")
        .support("G2.2", "G2.5")
        .support("G2.4", "Sn2.1")
        .support("G2.5", "Sn2.2")
        .support("G2.3", "Sn2.3")
        .build()
}

fn soc() -> GsnPattern {
    Builder::new(PatternId::Soc, "G3.1")
        .role("HazardousScenario", RoleType::Collection)
        .artifact_roles(&[Id::XX, Id::L, Id::M])
        .goal(
            "G3.1",
            "The Safe Operating Concept defines a sufficient mitigation for all of the hazardous scenarios",
        )
        .context("C3.1", "Hazardous scenarios definition: {XX}")
        .context("C3.2", "Safe Operating Concept: {L}")
        .goal(
            "G3.2",
            "Hazardous scenario {HazardousScenario.id} is sufficiently mitigated by the SOC: {HazardousScenario.text}",
        )
        .goal(
            "G3.3",
            "The safety requirements defined for {HazardousScenario.id} are sufficient",
        )
        .solution("Sn3.1", Id::M, "SOC justification report: {M}")
        .goal(
            "G3.4",
            "Additional constraints on operation mitigate {HazardousScenario.id}",
        )
        .flag("G3.4", Flag::Optional)
        .goal(
            "G3.5",
            "A reduced operating domain constrains operation for {HazardousScenario.id}",
        )
        .solution("Sn3.2", Id::M, "SOC justification report: {M}")
        .goal(
            "G3.6",
            "Reduced autonomous capabilities mitigate {HazardousScenario.id}",
        )
        .solution("Sn3.3", Id::M, "SOC justification report: {M}")
        .ctx("G3.1", "C3.1")
        .ctx("G3.1", "C3.2")
        .support("G3.1", "G3.2")
        .many("G3.1", "G3.2", "HazardousScenario", true)
        .support("G3.2", "G3.3")
        .support("G3.3", "Sn3.1")
        .support("G3.2", "G3.4")
        .support("G3.4", "G3.5")
        .support("G3.4", "G3.6")
        .choice("G3.4", &["G3.5", "G3.6"], 1, 2)
        .support("G3.5", "Sn3.2")
        .support("G3.6", "Sn3.3")
        .build()
}

fn safety_requirements() -> GsnPattern {
    Builder::new(PatternId::SafetyRequirements, "G4.1")
        .role("Tier", RoleType::Int)
        .role("ParentRequirement", RoleType::Collection)
        .role("TierRequirementMap", RoleType::Map)
        .artifact_roles(&[Id::W, Id::R])
        .goal(
            "G4.1",
            "The safety requirements defined for tier {Tier} are sufficient",
        )
        .goal(
            "G4.2",
            "The tier {Tier} safety requirements capture the intent of the inherited safety requirements",
        )
        .context("C4.1", "Tier {Tier} design: {W}")
        .goal(
            "G4.3",
            "The intent of {ParentRequirement.id} is captured by {TierRequirementMap[ParentRequirement]}",
        )
        .solution(
            "Sn4.1",
            Id::R,
            "Safety requirements justification for {ParentRequirement.id}: {R}",
        )
        .support("G4.1", "G4.2")
        .ctx("G4.2", "C4.1")
        .support("G4.2", "G4.3")
        .many("G4.2", "G4.3", "ParentRequirement", true)
        .support("G4.3", "Sn4.1")
        .build()
}

fn design_assurance() -> GsnPattern {
    Builder::new(PatternId::DesignAssurance, "G5.1")
        .role("Tier", RoleType::Int)
        .role("DesignDecision", RoleType::Collection)
        .artifact_roles(&[Id::X, Id::V, Id::Y, Id::Z])
        .goal(
            "G5.1",
            "The tier {Tier} design satisfies the allocated safety requirements",
        )
        .goal(
            "G5.2",
            "Design decision {DesignDecision.id} is justified: {DesignDecision.text}",
        )
        .solution("Sn5.1", Id::Y, "Design justification: {Y}")
        .goal(
            "G5.6",
            "Robustness measures for {DesignDecision.id} are sufficient: {DesignDecision.robustness}",
        )
        .solution("Sn5.2", Id::Y, "Design justification: {Y}")
        .goal(
            "G5.7",
            "Fault tolerance measures for {DesignDecision.id} are sufficient: {DesignDecision.fault_tolerance}",
        )
        .solution("Sn5.3", Id::Y, "Design justification: {Y}")
        .goal(
            "G5.8",
            "Runtime monitoring for {DesignDecision.id} is sufficient: {DesignDecision.runtime_monitoring}",
        )
        .solution("Sn5.4", Id::Y, "Design justification: {Y}")
        .goal(
            "G5.3",
            "The defined design process was followed for tier {Tier}",
        )
        .context("C5.1", "Design process: {X}")
        .solution("Sn5.5", Id::V, "Development log: {V}")
        .goal("G5.4", "The tier {Tier} design has been checked for errors")
        .solution("Sn5.6", Id::Z, "Design review: {Z}")
        .support("G5.1", "G5.2")
        .many("G5.1", "G5.2", "DesignDecision", false)
        .support("G5.2", "Sn5.1")
        .support("G5.2", "G5.6")
        .support("G5.2", "G5.7")
        .support("G5.2", "G5.8")
        .support("G5.6", "Sn5.2")
        .support("G5.7", "Sn5.3")
        .support("G5.8", "Sn5.4")
        .guard("G5.6", "DesignDecision.robustness")
        .guard("G5.7", "DesignDecision.fault_tolerance")
        .guard("G5.8", "DesignDecision.runtime_monitoring")
        .support("G5.1", "G5.3")
        .ctx("G5.3", "C5.1")
        .support("G5.3", "Sn5.5")
        .support("G5.1", "G5.4")
        .support("G5.4", "Sn5.6")
        .build()
}

fn hazardous_failures() -> GsnPattern {
    Builder::new(PatternId::HazardousFailures, "G6")
        .role("Tier", RoleType::Int)
        .role("HazardousFailure", RoleType::Collection)
        .artifact_roles(&[Id::BB, Id::Y, Id::Q, Id::L])
        .goal(
            "G6",
            "Hazardous failures introduced during the design of tier {Tier} are sufficiently managed",
        )
        .goal(
            "G6.1",
            "Potential hazardous failures of the tier {Tier} design are identified",
        )
        .solution("Sn6.1", Id::BB, "Safety analysis report: {BB}")
        .goal("G6.2", "All identified hazardous failures are sufficiently mitigated")
        .goal(
            "G6.3",
            "Hazardous failure {HazardousFailure.id} is sufficiently mitigated: {HazardousFailure.deviation}",
        )
        .goal(
            "G6.4",
            "Mitigation is in place for {HazardousFailure.id}",
        )
        .solution("Sn6.3", Id::Q, "Derived safety requirements: {Q}")
        .solution("Sn6.2", Id::Y, "Design mitigation justification: {Y}")
        .solution("Sn6.5", Id::L, "Operating concept constraint: {L}")
        .goal(
            "G6.5",
            "The mitigation of {HazardousFailure.id} is sufficient",
        )
        .solution("Sn6.4", Id::Y, "Design justification: {Y}")
        .support("G6", "G6.1")
        .support("G6.1", "Sn6.1")
        .support("G6", "G6.2")
        .support("G6.2", "G6.3")
        .many("G6.2", "G6.3", "HazardousFailure", true)
        .support("G6.3", "G6.4")
        .support("G6.4", "Sn6.3")
        .support("G6.4", "Sn6.2")
        .support("G6.4", "Sn6.5")
        .choice("G6.4", &["Sn6.3", "Sn6.2", "Sn6.5"], 1, 3)
        .support("G6.3", "G6.5")
        .support("G6.5", "Sn6.4")
        .build()
}

fn out_of_context() -> GsnPattern {
    Builder::new(PatternId::OutOfContext, "G7")
        .artifact_roles(&[
            Id::B,
            Id::GG,
            Id::HH,
            Id::II,
            Id::KK,
            Id::MM,
            Id::NN,
            Id::OO,
        ])
        .goal(
            "G7",
            "The AS is sufficiently safe when operating outside of the defined operating context",
        )
        .context("C7.1", "Operational Domain Model: {B}")
        .goal("G7.1", "The AS is aware when it is outside of the ODM")
        .context("C7.2", "Interpretation of the ODM boundary: {HH}")
        .justification(
            "J7.1",
            "The interpreted boundary allows the AS to recognise operation outside of the ODM",
        )
        .solution("Sn7.1", Id::II, "ODM boundary assessment report: {II}")
        .goal(
            "G7.2",
            "The AS is sufficiently safe when outside of the ODM",
        )
        .context("C7.3", "Minimum risk strategy: {MM}")
        .solution("Sn7.2", Id::GG, "Out of context analysis report: {GG}")
        .solution("Sn7.3", Id::NN, "Strategy justification report: {NN}")
        .solution("Sn7.4", Id::OO, "Outside ODM verification report: {OO}")
        .goal(
            "G7.3",
            "Transitions of the AS across the ODM boundary are sufficiently safe",
        )
        .goal(
            "G7.11",
            "All potentially unsafe transitions have been identified",
        )
        .solution("Sn7.5", Id::KK, "Transition assessment report: {KK}")
        .goal("G7.12", "Risk during transitions is minimised")
        .solution("Sn7.6", Id::KK, "Transition assessment report: {KK}")
        .ctx("G7", "C7.1")
        .support("G7", "G7.1")
        .support("G7", "G7.2")
        .support("G7", "G7.3")
        .ctx("G7.1", "C7.2")
        .ctx("G7.1", "J7.1")
        .support("G7.1", "Sn7.1")
        .ctx("G7.2", "C7.3")
        .support("G7.2", "Sn7.2")
        .support("G7.2", "Sn7.3")
        .support("G7.2", "Sn7.4")
        .support("G7.3", "G7.11")
        .support("G7.3", "G7.12")
        .support("G7.11", "Sn7.5")
        .support("G7.12", "Sn7.6")
        .build()
}

fn verification() -> GsnPattern {
    Builder::new(PatternId::Verification, "G8")
        .role("Tier", RoleType::Int)
        .role("SafetyRequirement", RoleType::Collection)
        .artifact_roles(&[Id::RR, Id::SS, Id::TT])
        .goal(
            "G8",
            "Verification demonstrates that the tier {Tier} safety requirements are satisfied",
        )
        .strategy(
            "S8.1",
            "Argument over the verification strategy for tier {Tier}",
        )
        .context("C8.1", "Verification strategy: {RR}")
        .justification(
            "J8.1",
            "Justification for why the defined verification strategy has been chosen",
        )
        .goal(
            "G8.2",
            "The testing undertaken demonstrates that {SafetyRequirement.id} is satisfied",
        )
        .goal("G8.3", "The test cases for {SafetyRequirement.id} pass")
        .solution("Sn8.1", Id::TT, "Verification results: {TT}")
        .goal(
            "G8.4",
            "Test coverage for {SafetyRequirement.id} is sufficient",
        )
        .solution("Sn8.2", Id::SS, "Verification log: {SS}")
        .goal(
            "G8.5",
            "The test platforms are representative of the operational platform for {SafetyRequirement.id}",
        )
        .solution("Sn8.3", Id::SS, "Verification log: {SS}")
        .goal(
            "G8.6",
            "Formal verification demonstrates that {SafetyRequirement.id} is satisfied",
        )
        .goal(
            "G8.7",
            "The properties capturing {SafetyRequirement.id} are proven",
        )
        .solution("Sn8.4", Id::TT, "Verification results: {TT}")
        .goal(
            "G8.10",
            "The verified model is a faithful representation of the tier {Tier} design",
        )
        .solution("Sn8.5", Id::SS, "Verification log: {SS}")
        .goal(
            "G8.8",
            "The verified properties are representative of {SafetyRequirement.id}",
        )
        .solution("Sn8.6", Id::SS, "Verification log: {SS}")
        .support("G8", "S8.1")
        .ctx("S8.1", "C8.1")
        .ctx("S8.1", "J8.1")
        .support("S8.1", "G8.2")
        .support("S8.1", "G8.6")
        .many("S8.1", "G8.2", "SafetyRequirement", true)
        .many("S8.1", "G8.6", "SafetyRequirement", true)
        .choice("S8.1", &["G8.2", "G8.6"], 1, 2)
        .support("G8.2", "G8.3")
        .support("G8.2", "G8.4")
        .support("G8.2", "G8.5")
        .support("G8.3", "Sn8.1")
        .support("G8.4", "Sn8.2")
        .support("G8.5", "Sn8.3")
        .support("G8.6", "G8.7")
        .support("G8.6", "G8.8")
        .support("G8.7", "Sn8.4")
        .support("G8.7", "G8.10")
        .support("G8.10", "Sn8.5")
        .support("G8.8", "Sn8.6")
        .build()
}

pub fn get_pattern(id: PatternId) -> GsnPattern {
    match id {
        PatternId::Baseline => baseline(),
        PatternId::Decomposition => decomposition(),
        PatternId::OperatingContext => operating_context(),
        PatternId::HazardousScenarios => hazardous_scenarios(),
        PatternId::Soc => soc(),
        PatternId::SafetyRequirements => safety_requirements(),
        PatternId::DesignAssurance => design_assurance(),
        PatternId::HazardousFailures => hazardous_failures(),
        PatternId::OutOfContext => out_of_context(),
        PatternId::Verification => verification(),
    }
}

/// A role a binding must supply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequiredRole {
    pub name: String,
    pub role_type: RoleType,
    pub collection: bool,
}

pub fn required_roles(id: PatternId) -> Vec<RequiredRole> {
    get_pattern(id)
        .roles
        .into_iter()
        .map(|r| RequiredRole {
            collection: r.role_type == RoleType::Collection,
            name: r.name,
            role_type: r.role_type,
        })
        .collect()
}
