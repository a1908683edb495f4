//! Project manifest, artifact records, stage readiness, provenance and
//! staleness tracking.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::artifact::{direct_upstream, stage, ArtifactId, ArtifactRef, StageSpec, STAGES};

pub const MANIFEST_FILE: &str = "sace.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    Missing,
    Draft,
    Validated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub id: ArtifactId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<u32>,
    pub path: String,
    pub status: Status,
    #[serde(default)]
    pub checksum: String,
    #[serde(default)]
    pub validated_at: u64,
}

impl ArtifactRecord {
    pub fn artifact_ref(&self) -> ArtifactRef {
        ArtifactRef::new(self.id, self.tier)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub tiers: u32,
    pub artifacts: Vec<ArtifactRecord>,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown stage {0}; stages are numbered 1..8")]
    UnknownStage(u8),
    #[error("stage {0} consumes tier-indexed inputs and needs --tier")]
    TierRequired(u8),
    #[error("{0} is not produced by any stage")]
    NotAnOutput(ArtifactId),
    #[error("record for {0} must {1}")]
    BadTier(ArtifactRef, &'static str),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Status of one stage input as seen by readiness checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputState {
    BuiltIn,
    Missing,
    Draft,
    Validated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputStatus {
    pub artifact: ArtifactRef,
    pub state: InputState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadinessReport {
    pub stage: u8,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<u32>,
    pub inputs: Vec<InputStatus>,
    pub ready: bool,
}

impl ReadinessReport {
    pub fn missing(&self) -> Vec<ArtifactRef> {
        self.inputs
            .iter()
            .filter(|i| i.state == InputState::Missing)
            .map(|i| i.artifact)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaleFinding {
    pub artifact: ArtifactRef,
    pub upstream: ArtifactRef,
    pub reason: String,
}

pub fn checksum_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of a file, or the empty string if it cannot be read.
pub fn checksum_file(path: &Path) -> String {
    fs::read(path)
        .map(|b| checksum_bytes(&b))
        .unwrap_or_default()
}

/// Conventional project-relative location of an artifact.
pub fn default_path(id: ArtifactId, tier: Option<u32>) -> String {
    use ArtifactId::*;
    let t = tier.unwrap_or(0);
    match id {
        A => "concept.md".into(),
        B => "odm.json".into(),
        D => "capabilities.json".into(),
        E => "scenarios.json".into(),
        K => "safe.md".into(),
        L => "soc.json".into(),
        Q => format!("requirements/tier-{t}.json"),
        W => format!("design/tier-{t}.json"),
        V => format!("design/log-tier-{t}.json"),
        BB => format!("failures/tier-{t}.json"),
        HH => "boundary.json".into(),
        II => "boundary_assessment.json".into(),
        JJ => "transition_model.json".into(),
        RR => "verification/strategy.json".into(),
        SS => "verification/log.json".into(),
        TT => "verification/results.json".into(),
        WW | XX => "decisions.json".into(),
        H | J | O | QQ | VV => format!("out/{id}.json"),
        T | AA | EE => format!("out/{id}-tier-{t}.json"),
        R | X | Y | Z => format!("docs/{id}-tier-{t}.md"),
        _ => format!("docs/{id}.md"),
    }
}

/// The artifacts a fresh manifest lists: everything except built-in patterns
/// and `P`, which is another tier's `Q`.
pub fn default_records(tiers: u32) -> Vec<ArtifactRecord> {
    let mut out = Vec::new();
    for id in ArtifactId::ALL {
        if id.is_built_in() || id == ArtifactId::P {
            continue;
        }
        let tier_list: Vec<Option<u32>> = if id.is_tier_indexed() {
            (0..tiers.max(1)).map(Some).collect()
        } else {
            vec![None]
        };
        for tier in tier_list {
            out.push(ArtifactRecord {
                id,
                tier,
                path: default_path(id, tier),
                status: Status::Draft,
                checksum: String::new(),
                validated_at: 0,
            });
        }
    }
    out
}

/// Transitive upstream closure of `id` over the stage constants. The artifact
/// itself is included only when it lies on a dependency cycle.
pub fn provenance(id: ArtifactId) -> Result<BTreeSet<ArtifactId>, RegistryError> {
    if !STAGES.iter().any(|s| s.outputs.contains(&id)) {
        return Err(RegistryError::NotAnOutput(id));
    }
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<ArtifactId> = direct_upstream(id).into();
    while let Some(next) = queue.pop_front() {
        if seen.insert(next) {
            queue.extend(direct_upstream(next));
        }
    }
    Ok(seen)
}

/// Direct upstream of a tier-pinned artifact. `P@n` is `Q@(n-1)`, and `P@0`
/// is the safe operating concept.
pub fn direct_upstream_at(r: ArtifactRef, tiers: u32) -> Vec<ArtifactRef> {
    if r.id == ArtifactId::P {
        return match r.tier {
            Some(n) if n >= 1 => vec![ArtifactRef::at(ArtifactId::Q, n - 1)],
            _ => vec![ArtifactRef::untiered(ArtifactId::L)],
        };
    }
    let mut out = Vec::new();
    for dep in direct_upstream(r.id) {
        if dep.is_tier_indexed() {
            match r.tier {
                Some(n) => out.push(ArtifactRef::at(dep, n)),
                None => out.extend((0..tiers.max(1)).map(|t| ArtifactRef::at(dep, t))),
            }
        } else {
            out.push(ArtifactRef::untiered(dep));
        }
    }
    out
}

/// Tier-aware transitive closure used for staleness checks.
pub fn provenance_at(r: ArtifactRef, tiers: u32) -> BTreeSet<ArtifactRef> {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<ArtifactRef> = direct_upstream_at(r, tiers).into();
    while let Some(next) = queue.pop_front() {
        if seen.insert(next) {
            queue.extend(direct_upstream_at(next, tiers));
        }
    }
    seen
}

/// A manifest bound to the directory holding the artifact files.
#[derive(Debug, Clone)]
pub struct Registry {
    pub root: PathBuf,
    pub manifest: Manifest,
}

impl Registry {
    pub fn new(root: impl Into<PathBuf>, manifest: Manifest) -> Self {
        Registry {
            root: root.into(),
            manifest,
        }
    }

    pub fn load(root: impl Into<PathBuf>) -> Result<Self, RegistryError> {
        let root = root.into();
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|source| RegistryError::Io {
            path: path.clone(),
            source,
        })?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|source| RegistryError::Manifest { path, source })?;
        for rec in &manifest.artifacts {
            if rec.id.is_tier_indexed() && rec.tier.is_none() {
                return Err(RegistryError::BadTier(rec.artifact_ref(), "carry a tier"));
            }
            if !rec.id.is_tier_indexed() && rec.tier.is_some() {
                return Err(RegistryError::BadTier(
                    rec.artifact_ref(),
                    "not carry a tier",
                ));
            }
        }
        Ok(Registry { root, manifest })
    }

    pub fn save(&self) -> Result<(), RegistryError> {
        let path = self.root.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|source| RegistryError::Io { path, source })
    }

    pub fn record(&self, id: ArtifactId, tier: Option<u32>) -> Option<&ArtifactRecord> {
        self.manifest
            .artifacts
            .iter()
            .find(|r| r.id == id && r.tier == tier)
    }

    pub fn path_of(&self, id: ArtifactId, tier: Option<u32>) -> PathBuf {
        let rel = self
            .record(id, tier)
            .map(|r| r.path.clone())
            .unwrap_or_else(|| default_path(id, tier));
        self.root.join(rel)
    }

    fn file_present(&self, rec: &ArtifactRecord) -> bool {
        match fs::read(self.root.join(&rec.path)) {
            Ok(bytes) => bytes.iter().any(|b| !b.is_ascii_whitespace()),
            Err(_) => false,
        }
    }

    /// Missing when the file is absent or blank, otherwise the recorded status
    /// (never below Draft).
    pub fn effective_status(&self, rec: &ArtifactRecord) -> Status {
        if !self.file_present(rec) {
            Status::Missing
        } else {
            rec.status.max(Status::Draft)
        }
    }

    pub fn status_of(&self, id: ArtifactId, tier: Option<u32>) -> Status {
        if id.is_tier_indexed() && tier.is_none() {
            return self
                .manifest
                .artifacts
                .iter()
                .filter(|r| r.id == id)
                .map(|r| self.effective_status(r))
                .max()
                .unwrap_or(Status::Missing);
        }
        self.record(id, tier)
            .map(|r| self.effective_status(r))
            .unwrap_or(Status::Missing)
    }

    fn input_state(&self, input: ArtifactRef) -> InputState {
        if input.id.is_built_in() {
            return InputState::BuiltIn;
        }
        let status = if input.id == ArtifactId::P {
            match input.tier {
                Some(n) if n >= 1 => self.status_of(ArtifactId::Q, Some(n - 1)),
                _ => self.status_of(ArtifactId::L, None),
            }
        } else {
            self.status_of(input.id, input.tier)
        };
        match status {
            Status::Missing => InputState::Missing,
            Status::Draft => InputState::Draft,
            Status::Validated => InputState::Validated,
        }
    }

    pub fn stage_readiness(
        &self,
        number: u8,
        tier: Option<u32>,
    ) -> Result<ReadinessReport, RegistryError> {
        let spec: &StageSpec = stage(number).ok_or(RegistryError::UnknownStage(number))?;
        if spec.is_tiered() && tier.is_none() {
            return Err(RegistryError::TierRequired(number));
        }
        let inputs: Vec<InputStatus> = spec
            .inputs
            .iter()
            .map(|&id| {
                let artifact = if id.is_tier_indexed() {
                    ArtifactRef::new(id, tier)
                } else {
                    ArtifactRef::untiered(id)
                };
                InputStatus {
                    artifact,
                    state: self.input_state(artifact),
                }
            })
            .collect();
        let ready = inputs.iter().all(|i| i.state != InputState::Missing);
        Ok(ReadinessReport {
            stage: number,
            name: spec.name.to_string(),
            tier,
            inputs,
            ready,
        })
    }

    fn current_checksum(&self, rec: &ArtifactRecord) -> String {
        checksum_file(&self.root.join(&rec.path))
    }

    /// Revision at which an artifact last changed; unrecorded edits count as
    /// newer than anything validated.
    fn change_time(&self, rec: &ArtifactRecord) -> u64 {
        if self.current_checksum(rec) != rec.checksum {
            u64::MAX
        } else {
            rec.validated_at
        }
    }

    fn records_for(&self, r: ArtifactRef) -> Vec<&ArtifactRecord> {
        self.manifest
            .artifacts
            .iter()
            .filter(|rec| rec.id == r.id && rec.tier == r.tier)
            .collect()
    }

    pub fn stale_check(&self) -> Vec<StaleFinding> {
        let tiers = self.manifest.tiers;
        let mut out = Vec::new();
        for rec in &self.manifest.artifacts {
            if rec.status != Status::Validated {
                continue;
            }
            let me = rec.artifact_ref();
            if !STAGES.iter().any(|s| s.outputs.contains(&me.id)) {
                continue;
            }
            for up in provenance_at(me, tiers) {
                for up_rec in self.records_for(up) {
                    if up_rec.path == rec.path {
                        continue;
                    }
                    let changed = self.change_time(up_rec);
                    // Inside a dependency cycle the validation order is
                    // arbitrary, so only content edits count.
                    let mutual = changed != u64::MAX && provenance_at(up, tiers).contains(&me);
                    if changed > rec.validated_at && !mutual {
                        let reason = if changed == u64::MAX {
                            format!("{up} changed since {me} was validated")
                        } else {
                            format!("{up} re-validated after {me}")
                        };
                        out.push(StaleFinding {
                            artifact: me,
                            upstream: up,
                            reason,
                        });
                    }
                }
            }
        }
        out.sort_by_key(|s| (s.artifact, s.upstream));
        out
    }

    fn next_revision(&self) -> u64 {
        self.manifest
            .artifacts
            .iter()
            .map(|r| r.validated_at)
            .max()
            .unwrap_or(0)
            + 1
    }

    /// Marks the given artifacts Validated with their current checksums.
    /// Records already validated at the current content and not stale are
    /// left untouched, so repeated calls are no-ops. Returns the refs changed.
    pub fn mark_validated(&mut self, refs: &[ArtifactRef]) -> Vec<ArtifactRef> {
        let stale: BTreeSet<ArtifactRef> =
            self.stale_check().into_iter().map(|s| s.artifact).collect();
        let current: BTreeMap<usize, String> = self
            .manifest
            .artifacts
            .iter()
            .enumerate()
            .filter(|(_, rec)| refs.contains(&rec.artifact_ref()))
            .map(|(i, rec)| (i, self.current_checksum(rec)))
            .collect();
        let revision = self.next_revision();
        let mut changed = Vec::new();
        for (i, sum) in current {
            let rec = &mut self.manifest.artifacts[i];
            if sum.is_empty() {
                continue;
            }
            let unchanged = rec.status == Status::Validated
                && rec.checksum == sum
                && !stale.contains(&rec.artifact_ref());
            if unchanged {
                continue;
            }
            rec.status = Status::Validated;
            rec.checksum = sum;
            rec.validated_at = revision;
            changed.push(rec.artifact_ref());
        }
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ArtifactId::*;

    #[test]
    fn provenance_of_xx_includes_decision_report() {
        let p = provenance(XX).unwrap();
        let expected: BTreeSet<_> = [A, G, B, C, D, E, I, WW].into_iter().collect();
        assert_eq!(p, expected);
    }

    #[test]
    fn pure_input_has_no_provenance() {
        assert!(matches!(provenance(A), Err(RegistryError::NotAnOutput(A))));
    }

    #[test]
    fn h_depends_on_stage_one_outputs() {
        let p = provenance(H).unwrap();
        for id in [B, C, D, E, F] {
            assert!(p.contains(&id));
        }
    }

    #[test]
    fn tier_one_requirements_reach_tier_zero() {
        let p = provenance_at(ArtifactRef::at(Q, 1), 2);
        assert!(p.contains(&ArtifactRef::at(P, 1)));
        assert!(p.contains(&ArtifactRef::at(Q, 0)));
        assert!(p.contains(&ArtifactRef::untiered(L)));
        assert!(!p.contains(&ArtifactRef::at(W, 2)));
    }

    #[test]
    fn default_records_skip_patterns() {
        let recs = default_records(2);
        assert!(recs.iter().all(|r| !r.id.is_built_in() && r.id != P));
        assert_eq!(recs.iter().filter(|r| r.id == Q).count(), 2);
    }
}
