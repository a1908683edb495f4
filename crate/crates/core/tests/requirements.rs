mod common;

use serde::Deserialize;

use sace_kit::project::Project;
use sace_kit::req::{
    lint_terms, parse, parse_with_id, print, Keyword, Ontology, ParseError, Template, TermLocation,
};

use common::{fixtures, robot_fixture};

#[derive(Deserialize)]
struct CorpusItem {
    text: String,
    template: Template,
}

fn corpus() -> Vec<CorpusItem> {
    let text = std::fs::read_to_string(fixtures().join("requirements-corpus.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn corpus_classifies_and_round_trips() {
    let items = corpus();
    assert_eq!(items.len(), 20);
    for item in items {
        let r = parse(&item.text).unwrap_or_else(|e| panic!("{}: {e}", item.text));
        assert_eq!(r.template, item.template, "{}", item.text);
        let again = parse(&print(&r)).unwrap();
        assert!(r.same_ast(&again), "{}", item.text);
        assert_eq!(print(&again), print(&r));
    }
}

#[test]
fn robot_warning_has_state_then_event_clause() {
    let r = parse(
        "While the robot is moving, when a person is present, the robot shall issue an audible warning",
    )
    .unwrap();
    assert_eq!(r.template, Template::Complex);
    let kws: Vec<Keyword> = r.clauses.iter().map(|c| c.keyword).collect();
    assert_eq!(kws, vec![Keyword::While, Keyword::When]);
    assert_eq!(r.clauses[0].trigger_or_condition, "the robot is moving");
    assert_eq!(r.clauses[1].trigger_or_condition, "a person is present");
    assert_eq!(r.system, "robot");
    assert_eq!(r.response, "issue an audible warning");
}

#[test]
fn keywords_are_case_insensitive() {
    let a = parse("IF the floor is wet, THEN the robot SHALL reduce speed.").unwrap();
    let b = parse("If the floor is wet, then the robot shall reduce speed.").unwrap();
    assert_eq!(a.template, Template::UnwantedBehaviour);
    assert_eq!(a.clauses, b.clauses);
    assert_eq!(a.system, b.system);
}

#[test]
fn malformed_requirements_are_rejected() {
    assert_eq!(parse("   ").unwrap_err(), ParseError::Empty);
    assert_eq!(parse("The robot stops.").unwrap_err(), ParseError::NoShall);
    assert_eq!(
        parse("If the floor is wet the robot shall stop.").unwrap_err(),
        ParseError::DanglingIf
    );
    assert_eq!(
        parse("The robot shall").unwrap_err(),
        ParseError::EmptyResponse
    );
}

#[test]
fn fixture_requirements_parse_and_use_defined_terms() {
    let p = Project::load(robot_fixture()).unwrap();
    let ont = p.ontology();
    let mut seen = 0;
    for reqs in p.requirements.values() {
        for rec in reqs {
            let r = parse_with_id(&rec.id, &rec.text).unwrap();
            assert_eq!(r.id, rec.id);
            assert!(
                lint_terms(&r, &ont).is_empty(),
                "{}: {:?}",
                rec.id,
                lint_terms(&r, &ont)
            );
            seen += 1;
        }
    }
    assert_eq!(seen, 8);
}

#[test]
fn undefined_condition_term_is_flagged() {
    let p = Project::load(robot_fixture()).unwrap();
    let ont = p.ontology();
    let text = "If a translucent wall is ahead, then the robot shall stop.";
    let r = parse(text).unwrap();
    let warnings = lint_terms(&r, &ont);
    let w = warnings
        .iter()
        .find(|w| w.term == "translucent")
        .expect("translucent is not a defined term");
    assert_eq!(w.location, TermLocation::Clause(0));
    let cond = &r.clauses[0].trigger_or_condition;
    assert_eq!(
        &cond[w.offset..w.offset + "translucent".len()],
        "translucent"
    );

    let mut extended = ont.clone();
    extended.merge(Ontology::from_terms(["translucent wall"]));
    let after = lint_terms(&r, &extended);
    assert!(!after
        .iter()
        .any(|w| w.term == "translucent" || w.term == "wall"));
    assert_eq!(
        after.len(),
        warnings.len() - 1 - usize::from(warnings.iter().any(|w| w.term == "wall"))
    );
}
