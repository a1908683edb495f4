//! Randomised checks of laws that hold for every input, not just the
//! fixture.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use serde_json::json;

use sace_kit::artifact::{direct_upstream, ArtifactId, STAGES};
use sace_kit::gsn::check_graph;
use sace_kit::hazard::{
    classify as classify_rows, enumerate, extract_hazardous, Assignment, DecisionOption,
    DecisionPoint, EnvVar, Outcome, Rule, Severity,
};
use sace_kit::instantiate::{
    instantiate_builtin, instantiate_decomposition, Binding, TierInput, TierRequirement,
};
use sace_kit::odm::{
    check_rod, recognize, BoundaryRecognizerSpec, FeatureKind, Narrowing, OdmModel, Proxy, Region,
    RodConstraint,
};
use sace_kit::patterns::PatternId;
use sace_kit::registry::provenance;
use sace_kit::req::{classify, parse, print, Clause, Keyword, Template};

use common::oracles::reference_recognizer;

fn soc_binding(texts: &[String]) -> Binding {
    let scenarios = texts
        .iter()
        .enumerate()
        .map(|(i, t)| json!({"id": format!("HS{}", i + 1), "text": t}))
        .collect();
    Binding::default()
        .scalar("XX", "hazardous scenario list")
        .scalar("L", "safe operating concept")
        .scalar("M", "soc justification")
        .collection("HazardousScenario", scenarios)
}

proptest! {
    #[test]
    fn one_mitigation_claim_per_scenario(texts in prop::collection::vec("[a-z]{1,8}( [a-z]{1,8}){0,3}", 1..=50)) {
        let arg = instantiate_builtin(PatternId::Soc, &soc_binding(&texts)).unwrap();
        prop_assert_eq!(arg.graph.instances_of("G3.2").count(), texts.len());
        prop_assert!(check_graph(&arg.graph).is_empty());
        let again = instantiate_builtin(PatternId::Soc, &soc_binding(&texts)).unwrap();
        prop_assert_eq!(again, arg);
    }
}

/// Tier sizes and, per requirement below tier 0, the index of its parent.
fn tier_shapes() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0usize..100, 1..5), 1..4)
}

fn build_tiers(shape: &[Vec<usize>]) -> Vec<TierInput> {
    let mut tiers: Vec<TierInput> = Vec::new();
    for (t, picks) in shape.iter().enumerate() {
        let requirements = picks
            .iter()
            .enumerate()
            .map(|(i, pick)| {
                let parent = if t == 0 {
                    "SOC".to_string()
                } else {
                    let above = &tiers[t - 1].requirements;
                    above[pick % above.len()].id.clone()
                };
                TierRequirement {
                    id: format!("R{t}.{}", i + 1),
                    text: format!("requirement {t}.{}", i + 1),
                    parents: vec![parent],
                    evidence: false,
                }
            })
            .collect();
        tiers.push(TierInput {
            tier: t as u32,
            requirements,
            ..Default::default()
        });
    }
    // Leaves carry evidence so that nothing dangles.
    let parents: BTreeSet<String> = tiers
        .iter()
        .flat_map(|t| t.requirements.iter().flat_map(|r| r.parents.clone()))
        .collect();
    for t in &mut tiers {
        for r in &mut t.requirements {
            r.evidence = !parents.contains(&r.id);
        }
    }
    tiers
}

proptest! {
    #[test]
    fn decomposition_mirrors_the_requirement_tree(shape in tier_shapes()) {
        let tiers = build_tiers(&shape);
        let arg = instantiate_decomposition(&tiers).unwrap();
        let total: usize = shape.iter().map(Vec::len).sum();
        let with_children: BTreeSet<&str> = tiers
            .iter()
            .skip(1)
            .flat_map(|t| t.requirements.iter().flat_map(|r| r.parents.iter().map(String::as_str)))
            .collect();
        prop_assert_eq!(arg.graph.instances_of("G5").count(), total);
        prop_assert_eq!(arg.graph.instances_of("G9").count(), with_children.len());
        prop_assert_eq!(arg.graph.instances_of("G8").count(), total - with_children.len());
        prop_assert!(check_graph(&arg.graph).is_empty());
    }
}

fn keyword() -> impl Strategy<Value = Keyword> {
    prop_oneof![
        Just(Keyword::When),
        Just(Keyword::While),
        Just(Keyword::Where),
        Just(Keyword::If),
    ]
}

proptest! {
    #[test]
    fn classifier_agrees_with_the_keyword_set(kws in prop::collection::vec(keyword(), 0..5)) {
        let clauses: Vec<Clause> = kws
            .iter()
            .map(|&keyword| Clause { keyword, precondition: None, trigger_or_condition: "x".into() })
            .collect();
        let distinct: BTreeSet<Keyword> = kws.iter().copied().collect();
        let expected = match (distinct.len(), distinct.iter().next()) {
            (0, _) => Template::Ubiquitous,
            (1, Some(Keyword::When)) => Template::EventDriven,
            (1, Some(Keyword::While)) => Template::StateDriven,
            (1, Some(Keyword::Where)) => Template::OptionalFeature,
            (1, Some(Keyword::If)) => Template::UnwantedBehaviour,
            _ => Template::Complex,
        };
        prop_assert_eq!(classify(&clauses), expected);
    }
}

const WORDS: [&str; 16] = [
    "robot", "person", "object", "floor", "is", "wet", "moving", "near", "a", "lidar", "detects",
    "slope", "charge", "low", "stop", "speed",
];

fn phrase() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(&WORDS[..]), 1..5).prop_map(|w| w.join(" "))
}

fn clause() -> impl Strategy<Value = Clause> {
    (keyword(), prop::option::of(phrase()), phrase()).prop_map(|(keyword, precondition, cond)| {
        Clause {
            keyword,
            precondition,
            trigger_or_condition: cond,
        }
    })
}

proptest! {
    #[test]
    fn printed_requirements_parse_back(
        clauses in prop::collection::vec(clause(), 0..4),
        system in phrase(),
        response in phrase(),
    ) {
        let r = sace_kit::req::Requirement {
            id: String::new(),
            raw: String::new(),
            template: classify(&clauses),
            clauses,
            system,
            response,
        };
        let text = print(&r);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert!(back.same_ast(&r), "{} -> {:?}", text, back);
        prop_assert_eq!(print(&back), text);
    }
}

fn decision_point(domains: &[usize], options: usize) -> DecisionPoint {
    DecisionPoint {
        id: "DP".into(),
        operating_scenario: "OS".into(),
        activity: "driving".into(),
        question: "q".into(),
        env_vars: domains
            .iter()
            .enumerate()
            .map(|(i, &d)| EnvVar {
                name: format!("v{i}"),
                domain: (0..d).map(|k| format!("s{k}")).collect(),
                states: BTreeMap::new(),
            })
            .collect(),
        options: (0..options)
            .map(|k| DecisionOption::Text(format!("option {k}")))
            .collect(),
        scenario_steps: vec![],
    }
}

proptest! {
    #[test]
    fn enumeration_is_complete_and_ordered(
        domains in prop::collection::vec(2usize..4, 1..4),
        options in 2usize..5,
    ) {
        let dp = decision_point(&domains, options);
        let rows = enumerate(&dp).unwrap();
        let states: usize = domains.iter().product();
        prop_assert_eq!(rows.len(), states * states * options);
        let keys: Vec<_> = rows
            .iter()
            .map(|r| {
                let pos = |a: &Assignment| -> Vec<usize> {
                    dp.env_vars
                        .iter()
                        .map(|v| v.domain.iter().position(|d| Some(d) == a.get(&v.name)).unwrap())
                        .collect()
                };
                (pos(&r.real), pos(&r.belief), r.option)
            })
            .collect();
        prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(rows.iter().enumerate().all(|(i, r)| r.index == i + 1));
    }

    #[test]
    fn every_hazardous_row_lands_in_exactly_one_scenario(
        domains in prop::collection::vec(2usize..4, 1..3),
        options in 2usize..4,
        picks in prop::collection::vec((0usize..100, 0usize..100, 0usize..4, 0usize..4), 0..6),
    ) {
        let dp = decision_point(&domains, options);
        let rows = enumerate(&dp).unwrap();
        let mut rules: Vec<Rule> = picks
            .iter()
            .map(|&(a, b, o, sev)| {
                let var = &dp.env_vars[a % dp.env_vars.len()];
                let value = var.domain[b % var.domain.len()].clone();
                Rule {
                    real: [(var.name.clone(), value)].into(),
                    belief: Assignment::new(),
                    option: Some(o % options + 1),
                    outcome: Outcome::Hazardous {
                        description: "harm".into(),
                        severity: [Severity::Unspecified, Severity::Minor, Severity::Major, Severity::Fatal][sev],
                        severity_factors: String::new(),
                    },
                }
            })
            .collect();
        rules.push(Rule { real: Assignment::new(), belief: Assignment::new(), option: None, outcome: Outcome::Safe });
        let classified = classify_rows(&dp, &rows, &rules).unwrap();
        prop_assert_eq!(classified.len(), rows.len());

        let hazardous: BTreeSet<usize> = classified
            .iter()
            .filter(|r| matches!(r.outcome, Outcome::Hazardous { .. }))
            .map(|r| r.index)
            .collect();
        let scenarios = extract_hazardous(&dp, &classified);
        let mut covered = Vec::new();
        for s in &scenarios {
            covered.extend(s.source_rows.iter().copied());
            let worst = s
                .source_rows
                .iter()
                .filter_map(|i| match &classified[i - 1].outcome {
                    Outcome::Hazardous { severity, .. } => Some(*severity),
                    _ => None,
                })
                .max()
                .unwrap();
            prop_assert_eq!(s.severity, worst);
            let keys: BTreeSet<_> = s
                .source_rows
                .iter()
                .map(|i| (classified[i - 1].real.clone(), classified[i - 1].option))
                .collect();
            prop_assert_eq!(keys.len(), 1);
        }
        covered.sort_unstable();
        prop_assert_eq!(covered.len(), hazardous.len());
        prop_assert_eq!(covered.into_iter().collect::<BTreeSet<_>>(), hazardous);
    }
}

fn speed_odm() -> OdmModel {
    serde_json::from_value(json!({
        "features": [{"name": "speed", "kind": {"type": "numeric", "min": 0.0, "max": 40.0},
                      "granularity_rationale": "speed bands"}]
    }))
    .unwrap()
}

fn speed_rod(lo: f64, hi: f64) -> RodConstraint {
    RodConstraint {
        id: "ROD".into(),
        trigger: "t".into(),
        narrowings: vec![Narrowing {
            feature: "speed".into(),
            domain: FeatureKind::Numeric {
                min: lo,
                max: hi,
                unit: None,
            },
        }],
        capability_reductions: vec![],
    }
}

proptest! {
    #[test]
    fn narrowing_a_valid_restriction_stays_valid(
        a in 0.0f64..40.0, b in 0.0f64..40.0, s in 0.0f64..=1.0, t in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assume!(lo > 0.0 || hi < 40.0);
        let odm = speed_odm();
        prop_assert!(check_rod(&odm, &speed_rod(lo, hi)).is_empty());
        let (x, y) = (lo + (hi - lo) * s.min(t), lo + (hi - lo) * s.max(t));
        prop_assert!(check_rod(&odm, &speed_rod(x, y)).is_empty());
    }
}

fn slope_spec(margin: f64, din: usize, dout: usize) -> BoundaryRecognizerSpec {
    BoundaryRecognizerSpec {
        id: "slope".into(),
        proxy: Proxy {
            feature: "floor_slope".into(),
            sensor: "imu".into(),
            margin,
            span: 5.0,
        },
        threshold: 5.0,
        debounce_in: din,
        debounce_out: dout,
        max_latency: None,
    }
}

proptest! {
    #[test]
    fn wider_margin_is_outside_at_least_as_often(
        values in prop::collection::vec(0.0f64..8.0, 1..80),
        m1 in 0.0f64..0.5, extra in 0.0f64..0.5,
        din in 1usize..4, dout in 1usize..4,
    ) {
        let narrow = reference_recognizer(&slope_spec(m1, din, dout), &values);
        let wide = reference_recognizer(&slope_spec(m1 + extra, din, dout), &values);
        for (n, w) in narrow.states.iter().zip(&wide.states) {
            prop_assert!(!(*n == Region::Outside && *w == Region::Inside));
        }
    }

    #[test]
    fn leading_inside_samples_only_shift_declarations(
        values in prop::collection::vec(0.0f64..8.0, 1..60),
        prefix in 0usize..20,
        margin in 0.0f64..0.5,
        din in 1usize..4, dout in 1usize..4,
    ) {
        let spec = slope_spec(margin, din, dout);
        let mut shifted = vec![0.0; prefix];
        shifted.extend(&values);
        let base: Vec<_> = recognize(&spec, &values).into_iter().map(|d| (d.index + prefix, d.state)).collect();
        let moved: Vec<_> = recognize(&spec, &shifted).into_iter().map(|d| (d.index, d.state)).collect();
        prop_assert_eq!(base, moved);
    }
}

#[test]
fn provenance_contains_the_provenance_of_each_upstream_output() {
    for s in &STAGES {
        for &out in s.outputs {
            let mine = provenance(out).unwrap();
            for up in direct_upstream(out) {
                if let Ok(theirs) = provenance(up) {
                    assert!(theirs.is_subset(&mine), "{up} not within {out}");
                    assert!(mine.contains(&up));
                }
            }
        }
    }
    assert!(provenance(ArtifactId::TT).unwrap().contains(&ArtifactId::A));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn attaching_a_soc_argument_keeps_the_case_well_formed(n in 1usize..12) {
        let project = sace_kit::project::Project::load(common::robot_fixture()).unwrap();
        let base = sace_kit::assemble::build_sub_argument(&project, PatternId::Baseline, None).unwrap();
        let texts: Vec<String> = (0..n).map(|i| format!("scenario {i}")).collect();
        let soc = instantiate_builtin(PatternId::Soc, &soc_binding(&texts)).unwrap();
        let joined = sace_kit::gsn::attach_confidence(&base.graph, "ACP-soc", &soc.graph).unwrap();
        prop_assert!(check_graph(&joined).is_empty());
        prop_assert!(joined.is_acp_satisfied("ACP-soc"));
        let distinct: BTreeSet<&str> = joined.nodes.iter().map(|n| n.id.as_str()).collect();
        prop_assert_eq!(distinct.len(), joined.nodes.len());
    }
}
