mod common;

use std::fs;

use sace_kit::artifact::{ArtifactId, ArtifactRef};
use sace_kit::registry::{
    default_records, provenance, InputState, Manifest, Registry, RegistryError, Status,
};

use common::robot_copy;

fn empty_project(tiers: u32) -> (tempfile::TempDir, Registry) {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::new(
        dir.path(),
        Manifest {
            name: "scratch".into(),
            tiers,
            artifacts: default_records(tiers),
        },
    );
    (dir, reg)
}

fn write(reg: &Registry, id: ArtifactId, tier: Option<u32>, text: &str) {
    let path = reg.path_of(id, tier);
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, text).unwrap();
}

#[test]
fn stage_two_is_ready_once_domain_model_and_scenarios_exist() {
    let (_dir, reg) = empty_project(1);
    let before = reg.stage_readiness(2, None).unwrap();
    assert!(!before.ready);
    assert_eq!(
        before.missing(),
        vec![
            ArtifactRef::untiered(ArtifactId::B),
            ArtifactRef::untiered(ArtifactId::E)
        ]
    );

    write(&reg, ArtifactId::B, None, "{}");
    write(&reg, ArtifactId::E, None, "{}");
    let after = reg.stage_readiness(2, None).unwrap();
    assert!(after.ready);
    let built_in: Vec<_> = after
        .inputs
        .iter()
        .filter(|i| i.state == InputState::BuiltIn)
        .map(|i| i.artifact.id)
        .collect();
    assert_eq!(built_in, vec![ArtifactId::I]);
}

#[test]
fn blank_file_counts_as_missing() {
    let (_dir, reg) = empty_project(1);
    write(&reg, ArtifactId::A, None, "  \n\t");
    assert_eq!(reg.status_of(ArtifactId::A, None), Status::Missing);
    write(&reg, ArtifactId::A, None, "concept");
    assert_eq!(reg.status_of(ArtifactId::A, None), Status::Draft);
}

#[test]
fn tier_one_failure_stage_reports_the_missing_design() {
    let (_tmp, root) = robot_copy();
    fs::remove_file(root.join("design/tier-1.json")).unwrap();
    let reg = Registry::load(&root).unwrap();
    let report = reg.stage_readiness(6, Some(1)).unwrap();
    assert!(!report.ready);
    assert_eq!(report.missing(), vec![ArtifactRef::at(ArtifactId::W, 1)]);
    assert!(reg.stage_readiness(6, Some(0)).unwrap().ready);
}

#[test]
fn tiered_stages_need_a_tier_and_stages_are_bounded() {
    let (_dir, reg) = empty_project(2);
    assert!(matches!(
        reg.stage_readiness(4, None),
        Err(RegistryError::TierRequired(4))
    ));
    assert!(matches!(
        reg.stage_readiness(0, None),
        Err(RegistryError::UnknownStage(0))
    ));
    assert!(matches!(
        reg.stage_readiness(9, None),
        Err(RegistryError::UnknownStage(9))
    ));
}

#[test]
fn previous_tier_requirements_stand_in_for_the_parent_input() {
    let (_dir, reg) = empty_project(2);
    let p1 = ArtifactRef::at(ArtifactId::P, 1);
    let state = |reg: &Registry| {
        reg.stage_readiness(4, Some(1))
            .unwrap()
            .inputs
            .into_iter()
            .find(|i| i.artifact == p1)
            .unwrap()
            .state
    };
    assert_eq!(state(&reg), InputState::Missing);
    write(&reg, ArtifactId::Q, Some(0), "[]");
    assert_eq!(state(&reg), InputState::Draft);
}

#[test]
fn concept_is_not_an_output() {
    assert!(matches!(
        provenance(ArtifactId::A),
        Err(RegistryError::NotAnOutput(ArtifactId::A))
    ));
}

#[test]
fn untouched_fixture_has_no_stale_artifacts() {
    let (_tmp, root) = robot_copy();
    let reg = Registry::load(&root).unwrap();
    assert!(reg.stale_check().is_empty());
}

fn validate_outputs(reg: &mut Registry, ids: &[ArtifactId]) {
    for id in ids {
        let path = reg.path_of(*id, None);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, "{}").unwrap();
    }
    let refs: Vec<_> = ids.iter().map(|&id| ArtifactRef::untiered(id)).collect();
    let changed = reg.mark_validated(&refs);
    assert_eq!(changed.len(), ids.len());
    assert!(reg.stale_check().is_empty());
}

#[test]
fn editing_the_domain_model_makes_the_hazard_report_stale() {
    let (_tmp, root) = robot_copy();
    let mut reg = Registry::load(&root).unwrap();
    validate_outputs(&mut reg, &[ArtifactId::J]);

    let odm = fs::read_to_string(root.join("odm.json")).unwrap();
    fs::write(
        root.join("odm.json"),
        odm.replace("lighting", "illumination"),
    )
    .unwrap();

    let stale = reg.stale_check();
    assert!(stale
        .iter()
        .any(|s| s.artifact == ArtifactRef::untiered(ArtifactId::J)
            && s.upstream == ArtifactRef::untiered(ArtifactId::B)));
}

#[test]
fn editing_the_safe_state_notes_makes_the_soc_report_stale() {
    let (_tmp, root) = robot_copy();
    let mut reg = Registry::load(&root).unwrap();
    validate_outputs(&mut reg, &[ArtifactId::O]);

    fs::write(root.join("safe.md"), "Stop in place.\n").unwrap();

    let o = ArtifactRef::untiered(ArtifactId::O);
    let stale = reg.stale_check();
    assert!(stale
        .iter()
        .any(|s| s.artifact == o && s.upstream == ArtifactRef::untiered(ArtifactId::K)));
    assert!(!stale
        .iter()
        .any(|s| s.artifact == ArtifactRef::untiered(ArtifactId::J)));
}

#[test]
fn revalidating_clears_staleness_and_is_idempotent() {
    let (_tmp, root) = robot_copy();
    let mut reg = Registry::load(&root).unwrap();
    validate_outputs(&mut reg, &[ArtifactId::O]);
    fs::write(root.join("safe.md"), "Stop in place.\n").unwrap();

    let k = ArtifactRef::untiered(ArtifactId::K);
    let o = ArtifactRef::untiered(ArtifactId::O);
    assert_eq!(reg.mark_validated(&[k]), vec![k]);
    assert!(reg.stale_check().iter().any(|s| s.artifact == o));
    assert_eq!(reg.mark_validated(&[o]), vec![o]);
    let stale = reg.stale_check();
    assert!(!stale.iter().any(|s| s.artifact == o));
    // The safe-state notes also feed the SOC itself, which stays stale.
    assert!(stale
        .iter()
        .any(|s| s.artifact == ArtifactRef::untiered(ArtifactId::L)));
    assert!(reg.mark_validated(&[k, o]).is_empty());
}

#[test]
fn manifest_round_trips_and_rejects_misplaced_tiers() {
    let (_tmp, root) = robot_copy();
    let reg = Registry::load(&root).unwrap();
    reg.save().unwrap();
    assert_eq!(Registry::load(&root).unwrap().manifest, reg.manifest);

    let mut bad = reg.manifest.clone();
    bad.artifacts
        .iter_mut()
        .find(|r| r.id == ArtifactId::A)
        .unwrap()
        .tier = Some(0);
    fs::write(root.join("sace.json"), serde_json::to_string(&bad).unwrap()).unwrap();
    assert!(matches!(
        Registry::load(&root),
        Err(RegistryError::BadTier(..))
    ));
}
