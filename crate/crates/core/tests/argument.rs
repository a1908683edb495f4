mod common;

use std::collections::BTreeSet;
use std::fs;

use sace_kit::assemble::{assemble, assemble_full_case, build_sub_argument, Shortfall};
use sace_kit::gsn::{attach_confidence, check_graph, to_dot, AttachError, GsnGraph, NodeKind};
use sace_kit::instantiate::{
    instantiate_decomposition, InstantiateError, InstantiatedArgument, TierInput, TierRequirement,
};
use sace_kit::patterns::{get_pattern, required_roles, PatternId};
use sace_kit::project::Project;

use common::{robot_copy, robot_fixture};

fn req(id: &str, parents: &[&str], evidence: bool) -> TierRequirement {
    TierRequirement {
        id: id.into(),
        text: format!("the system shall satisfy {id}"),
        parents: parents.iter().map(|s| s.to_string()).collect(),
        evidence,
    }
}

fn tier(n: u32, requirements: Vec<TierRequirement>) -> TierInput {
    TierInput {
        tier: n,
        requirements,
        ..Default::default()
    }
}

#[test]
fn baseline_pattern_holds_the_top_claims() {
    let p = get_pattern(PatternId::Baseline);
    let ids: BTreeSet<&str> = p.nodes.iter().map(|n| n.id.as_str()).collect();
    for id in ["G0", "S1", "G1", "G3", "G4", "G7"] {
        assert!(ids.contains(id), "baseline lacks {id}");
    }
    assert_eq!(p.root, "G0");
    assert_eq!(p.node("S1").unwrap().kind, NodeKind::Strategy);

    let roles: Vec<String> = required_roles(PatternId::Baseline)
        .into_iter()
        .map(|r| r.name)
        .collect();
    assert!(roles.iter().any(|r| r == "OperatingContext"));
    assert!(roles.iter().any(|r| r == "HazardousScenarios"));
}

#[test]
fn operating_context_argument_attaches_once() {
    let project = Project::load(robot_fixture()).unwrap();
    let baseline = build_sub_argument(&project, PatternId::Baseline, None).unwrap();
    let context = build_sub_argument(&project, PatternId::OperatingContext, None).unwrap();
    assert!(!baseline.graph.is_acp_satisfied("ACP-context"));

    let joined = attach_confidence(&baseline.graph, "ACP-context", &context.graph).unwrap();
    assert!(joined.is_acp_satisfied("ACP-context"));
    assert!(check_graph(&joined).is_empty());
    assert_eq!(
        joined.nodes.len(),
        baseline.graph.nodes.len() + context.graph.nodes.len()
    );

    assert_eq!(
        attach_confidence(&joined, "ACP-context", &context.graph),
        Err(AttachError::AlreadySatisfied("ACP-context".into()))
    );
    assert_eq!(
        attach_confidence(&baseline.graph, "ACP-nowhere", &context.graph),
        Err(AttachError::UnknownAcp("ACP-nowhere".into()))
    );
}

/// Requirements that are decomposed further, counted straight from the
/// parent links.
fn decomposed(tiers: &[TierInput]) -> usize {
    let parents: BTreeSet<&str> = tiers
        .iter()
        .flat_map(|t| t.requirements.iter())
        .flat_map(|r| r.parents.iter().map(String::as_str))
        .collect();
    tiers
        .iter()
        .flat_map(|t| t.requirements.iter())
        .filter(|r| parents.contains(r.id.as_str()))
        .count()
}

#[test]
fn three_tier_decomposition_has_one_recursion_per_decomposed_requirement() {
    let tiers = vec![
        tier(
            0,
            vec![req("R0.1", &["SOC"], false), req("R0.2", &["SOC"], true)],
        ),
        tier(
            1,
            vec![req("R1.1", &["R0.1"], false), req("R1.2", &["R0.1"], true)],
        ),
        tier(
            2,
            vec![req("R2.1", &["R1.1"], true), req("R2.2", &["R1.1"], true)],
        ),
    ];
    let arg = instantiate_decomposition(&tiers).unwrap();
    let g9: Vec<String> = arg.graph.instances_of("G9").map(|n| n.id.clone()).collect();
    assert_eq!(g9.len(), decomposed(&tiers));
    assert_eq!(g9, vec!["G9#1@0", "G9#1@1"]);
    assert!(arg.graph.supporters("G9#1@0").any(|s| s == "S3@1"));
    assert!(arg.graph.supporters("G9#1@1").any(|s| s == "S3@2"));
    assert_eq!(arg.graph.instances_of("G5").count(), 6);
    assert!(check_graph(&arg.graph).is_empty());
}

#[test]
fn deeper_requirement_without_parent_is_rejected() {
    let tiers = vec![
        tier(0, vec![req("R0.1", &["SOC"], false)]),
        tier(1, vec![req("R1.1", &["R0.1"], false)]),
        tier(
            2,
            vec![req("R2.1", &["R1.1"], true), req("R2.2", &[], true)],
        ),
    ];
    match instantiate_decomposition(&tiers) {
        Err(InstantiateError::UnknownParent { tier, id, .. }) => {
            assert_eq!(tier, 2);
            assert_eq!(id, "R2.2");
        }
        other => panic!("expected UnknownParent, got {other:?}"),
    }
}

#[test]
fn tiers_must_be_contiguous() {
    let tiers = vec![tier(0, vec![req("R0.1", &["SOC"], true)]), tier(2, vec![])];
    assert_eq!(
        instantiate_decomposition(&tiers).unwrap_err(),
        InstantiateError::TierGap
    );
}

#[test]
fn missing_out_of_context_sources_block_the_full_case() {
    let (_tmp, root) = robot_copy();
    fs::remove_file(root.join("docs/GG.md")).unwrap();
    let project = Project::load(&root).unwrap();

    match assemble_full_case(&project) {
        Err(InstantiateError::MissingSubArgument(id, why)) => {
            assert_eq!(id, PatternId::OutOfContext);
            assert!(why.contains("GG"), "{why}");
        }
        other => panic!("expected MissingSubArgument, got {other:?}"),
    }

    let partial = assemble(&project).unwrap();
    assert_eq!(partial.unattached.len(), 1);
    let gap = &partial.unattached[0];
    assert_eq!(gap.site, "ACP-ooc");
    assert!(
        matches!(&gap.shortfall, Shortfall::MissingSources { artifacts }
        if artifacts.iter().any(|a| a.to_string() == "GG"))
    );
    assert!(check_graph(&partial.argument.graph).is_empty());
}

#[test]
fn full_case_renders_and_survives_interchange() {
    let project = Project::load(robot_fixture()).unwrap();
    let arg = assemble_full_case(&project).unwrap();

    let dot = to_dot(&arg.graph).unwrap();
    assert!(dot.starts_with("digraph"));
    for n in &arg.graph.nodes {
        assert!(dot.contains(&format!("\"{}\"", n.id)), "{} not drawn", n.id);
    }

    let text = serde_json::to_string(&arg).unwrap();
    let back: InstantiatedArgument = serde_json::from_str(&text).unwrap();
    assert_eq!(back, arg);
    let graph: GsnGraph =
        serde_json::from_str(&serde_json::to_string(&arg.graph).unwrap()).unwrap();
    assert_eq!(graph, arg.graph);
}

#[test]
fn every_trace_record_names_a_node() {
    let project = Project::load(robot_fixture()).unwrap();
    let arg = assemble_full_case(&project).unwrap();
    let ids: BTreeSet<&str> = arg.graph.nodes.iter().map(|n| n.id.as_str()).collect();
    for t in &arg.trace {
        assert!(
            ids.contains(t.node.as_str()),
            "trace names unknown node {}",
            t.node
        );
    }
}
