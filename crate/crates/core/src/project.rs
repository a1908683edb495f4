//! Typed view of a project directory: the manifest plus every source
//! document the checks, lint and assembly read. Absent or blank files load as
//! `None`; files that exist but do not parse are errors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::artifact::{ArtifactId, ArtifactRef};
use crate::gsn::EvidenceRef;
use crate::hazard::{self, DecisionFile, HazardError, HazardousScenario, ScenarioCatalogue};
use crate::odm::{
    AssessmentMatrix, BoundaryInterpretation, OdmModel, RodConstraint, TransitionModel,
};
use crate::registry::{checksum_file, Registry, RegistryError, Status};
use crate::req::Ontology;

/// Optional project glossary merged with the ODM terms for requirement checks.
pub const DICTIONARY_FILE: &str = "dictionary.json";

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Hazard(#[from] HazardError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MitigationRoute {
    Requirement,
    Rod,
    CapabilityReduction,
}

/// A link from an SOC element to the hazardous scenario it mitigates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mitigation {
    pub scenario: String,
    pub route: MitigationRoute,
    pub target: String,
    #[serde(default)]
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilityReduction {
    pub id: String,
    #[serde(default)]
    pub capabilities: Vec<String>,
    #[serde(default)]
    pub rationale: String,
}

/// Contents of `soc.json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Soc {
    #[serde(default)]
    pub mitigations: Vec<Mitigation>,
    #[serde(default)]
    pub rods: Vec<RodConstraint>,
    #[serde(default)]
    pub capability_reductions: Vec<CapabilityReduction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementRecord {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub parents: Vec<String>,
    /// Why the requirement captures the intent of its parents.
    #[serde(default)]
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignDecision {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub safety_relevant: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robustness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault_tolerance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_monitoring: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignLog {
    pub decisions: Vec<DesignDecision>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Guideword {
    More,
    Less,
    AsWellAs,
    PartOf,
    OtherThan,
    Intermittent,
    ErroneousButCredible,
    Other(String),
}

impl From<String> for Guideword {
    fn from(s: String) -> Self {
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "more" => Guideword::More,
            "less" => Guideword::Less,
            "aswellas" => Guideword::AsWellAs,
            "partof" => Guideword::PartOf,
            "otherthan" => Guideword::OtherThan,
            "intermittent" => Guideword::Intermittent,
            "erroneousbutcredible" => Guideword::ErroneousButCredible,
            _ => Guideword::Other(s),
        }
    }
}

impl fmt::Display for Guideword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Guideword::More => "More",
            Guideword::Less => "Less",
            Guideword::AsWellAs => "As Well As",
            Guideword::PartOf => "Part Of",
            Guideword::OtherThan => "Other Than",
            Guideword::Intermittent => "Intermittent",
            Guideword::ErroneousButCredible => "Erroneous but Credible",
            Guideword::Other(s) => s,
        };
        f.write_str(s)
    }
}

impl From<Guideword> for String {
    fn from(g: Guideword) -> String {
        g.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MitigationForm {
    DesignChange,
    OperatingConceptLimitation,
    DerivedRequirement,
    ExistingDesignSufficient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureMitigation {
    pub form: MitigationForm,
    pub target: String,
    #[serde(default)]
    pub justification: String,
}

/// One deviation record of the safety analysis report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<u32>,
    pub element: String,
    pub guideword: Guideword,
    pub deviation: String,
    pub hazardous: bool,
    #[serde(default)]
    pub mitigations: Vec<FailureMitigation>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub requirements: Vec<String>,
    #[serde(default)]
    pub features: Vec<String>,
    #[serde(default)]
    pub scenarios: Vec<String>,
    #[serde(default)]
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalProperty {
    pub id: String,
    #[serde(default)]
    pub requirements: Vec<String>,
    #[serde(default)]
    pub statement: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationLog {
    #[serde(default)]
    pub test_cases: Vec<TestCase>,
    #[serde(default)]
    pub properties: Vec<FormalProperty>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub id: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationResults {
    pub results: Vec<VerificationResult>,
}

/// Every source document of a project, parsed.
#[derive(Debug, Clone)]
pub struct Project {
    pub registry: Registry,
    pub odm: Option<OdmModel>,
    pub scenarios: Option<ScenarioCatalogue>,
    pub decisions: Option<DecisionFile>,
    pub soc: Option<Soc>,
    pub requirements: BTreeMap<u32, Vec<RequirementRecord>>,
    pub design_logs: BTreeMap<u32, DesignLog>,
    pub failures: BTreeMap<u32, Vec<FailureRecord>>,
    pub verification_log: Option<VerificationLog>,
    pub results: Option<VerificationResults>,
    pub boundary: Option<BoundaryInterpretation>,
    pub assessment: Option<AssessmentMatrix>,
    pub transitions: Option<TransitionModel>,
    pub dictionary: Option<Ontology>,
}

fn parse_file<T: DeserializeOwned>(root: &Path, path: &Path) -> Result<Option<T>, ProjectError> {
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(None);
    };
    if text.trim().is_empty() {
        return Ok(None);
    }
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| ProjectError::Parse {
            path: path
                .strip_prefix(root)
                .unwrap_or(path)
                .display()
                .to_string(),
            message: e.to_string(),
        })
}

impl Project {
    pub fn load(root: impl Into<PathBuf>) -> Result<Self, ProjectError> {
        Self::from_registry(Registry::load(root)?)
    }

    pub fn from_registry(registry: Registry) -> Result<Self, ProjectError> {
        let tiers = registry.manifest.tiers.max(1);
        let load = |id: ArtifactId, tier: Option<u32>| {
            let path = registry.path_of(id, tier);
            (registry.root.clone(), path)
        };
        macro_rules! doc {
            ($id:expr) => {{
                let (root, path) = load($id, None);
                parse_file(&root, &path)?
            }};
        }
        let mut requirements = BTreeMap::new();
        let mut design_logs = BTreeMap::new();
        let mut failures = BTreeMap::new();
        for t in 0..tiers {
            let (root, path) = load(ArtifactId::Q, Some(t));
            if let Some(v) = parse_file(&root, &path)? {
                requirements.insert(t, v);
            }
            let (root, path) = load(ArtifactId::V, Some(t));
            if let Some(v) = parse_file(&root, &path)? {
                design_logs.insert(t, v);
            }
            let (root, path) = load(ArtifactId::BB, Some(t));
            if let Some(v) = parse_file(&root, &path)? {
                failures.insert(t, v);
            }
        }
        let dictionary = parse_file(&registry.root, &registry.root.join(DICTIONARY_FILE))?;
        Ok(Project {
            odm: doc!(ArtifactId::B),
            scenarios: doc!(ArtifactId::E),
            decisions: doc!(ArtifactId::WW),
            soc: doc!(ArtifactId::L),
            boundary: doc!(ArtifactId::HH),
            assessment: doc!(ArtifactId::II),
            transitions: doc!(ArtifactId::JJ),
            verification_log: doc!(ArtifactId::SS),
            results: doc!(ArtifactId::TT),
            requirements,
            design_logs,
            failures,
            dictionary,
            registry,
        })
    }

    pub fn tiers(&self) -> u32 {
        self.registry.manifest.tiers.max(1)
    }

    pub fn name(&self) -> &str {
        &self.registry.manifest.name
    }

    /// Whether the artifact's file is absent or blank.
    pub fn is_missing(&self, r: ArtifactRef) -> bool {
        let tier = if r.id.is_tier_indexed() { r.tier } else { None };
        self.registry.status_of(r.id, tier) == Status::Missing
    }

    /// Project-relative path of an artifact.
    pub fn rel_path(&self, id: ArtifactId, tier: Option<u32>) -> String {
        let tier = if id.is_tier_indexed() { tier } else { None };
        self.registry
            .record(id, tier)
            .map(|r| r.path.clone())
            .unwrap_or_else(|| crate::registry::default_path(id, tier))
    }

    pub fn evidence(&self, id: ArtifactId, tier: Option<u32>) -> EvidenceRef {
        let tier = if id.is_tier_indexed() { tier } else { None };
        EvidenceRef {
            artifact: id,
            tier,
            path: self.rel_path(id, tier),
            checksum: checksum_file(&self.registry.path_of(id, tier)),
            status: self.registry.status_of(id, tier),
        }
    }

    /// Classified decision tables and hazardous scenarios, regenerated from
    /// `decisions.json`.
    pub fn hazard_analysis(
        &self,
    ) -> Result<(Vec<hazard::ClassifiedTable>, Vec<HazardousScenario>), ProjectError> {
        match &self.decisions {
            Some(d) => Ok(hazard::analyse(d)?),
            None => Ok((Vec::new(), Vec::new())),
        }
    }

    pub fn requirement_ids(&self, tier: u32) -> BTreeSet<&str> {
        self.requirements
            .get(&tier)
            .map(|rs| rs.iter().map(|r| r.id.as_str()).collect())
            .unwrap_or_default()
    }

    /// Ids of tests and properties with a passing result.
    pub fn passing(&self) -> BTreeSet<&str> {
        self.results
            .as_ref()
            .map(|r| {
                r.results
                    .iter()
                    .filter(|x| x.verdict == Verdict::Pass)
                    .map(|x| x.id.as_str())
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Tests and properties that name the requirement.
    pub fn verification_of(&self, requirement: &str) -> Vec<&str> {
        let Some(log) = &self.verification_log else {
            return Vec::new();
        };
        let tests = log
            .test_cases
            .iter()
            .filter(|t| t.requirements.iter().any(|r| r == requirement))
            .map(|t| t.id.as_str());
        let props = log
            .properties
            .iter()
            .filter(|p| p.requirements.iter().any(|r| r == requirement))
            .map(|p| p.id.as_str());
        tests.chain(props).collect()
    }

    /// Passing verification activities for the requirement.
    pub fn passing_evidence(&self, requirement: &str) -> Vec<&str> {
        let passing = self.passing();
        self.verification_of(requirement)
            .into_iter()
            .filter(|id| passing.contains(id))
            .collect()
    }

    /// Ontology for requirement term checks: ODM terms plus the dictionary.
    pub fn ontology(&self) -> Ontology {
        let mut ont = self
            .odm
            .as_ref()
            .map(crate::req::ontology_from_odm)
            .unwrap_or_default();
        if let Some(d) = &self.dictionary {
            ont.merge(d.clone());
        }
        ont
    }
}
