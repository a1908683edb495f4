//! Decision-point analysis: enumerate every (real state, belief state,
//! option) situation, classify the rows with first-match rules, and extract
//! hazardous scenarios in the `<scenario><state> AND <decision>` form.
//!
//! Belief states are enumerated because they explain how a wrong decision can
//! come about, but they never appear in an extracted scenario.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::odm::OdmModel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvVar {
    pub name: String,
    pub domain: Vec<String>,
    /// Text describing each real-world value, used in scenario statements.
    #[serde(default)]
    pub states: BTreeMap<String, String>,
}

impl EnvVar {
    pub fn state_text(&self, value: &str) -> String {
        self.states
            .get(value)
            .cloned()
            .unwrap_or_else(|| format!("{} is {}", self.name, value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecisionOption {
    Text(String),
    Detailed { text: String, decision: String },
}

impl DecisionOption {
    pub fn text(&self) -> &str {
        match self {
            DecisionOption::Text(t) => t,
            DecisionOption::Detailed { text, .. } => text,
        }
    }

    /// Phrase used after `AND` in a scenario statement.
    pub fn decision(&self) -> &str {
        match self {
            DecisionOption::Text(t) => t,
            DecisionOption::Detailed { decision, .. } => decision,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepMarker {
    Start,
    End,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioStep {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<StepMarker>,
    #[serde(default)]
    pub understanding_point: bool,
    #[serde(default)]
    pub decision_point: bool,
    /// ODM feature paths the system interacts with at this step.
    #[serde(default)]
    pub interactions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionPoint {
    pub id: String,
    /// Id of an operating scenario in the scenario catalogue.
    pub operating_scenario: String,
    /// What the system is doing when the decision is taken.
    pub activity: String,
    pub question: String,
    pub env_vars: Vec<EnvVar>,
    pub options: Vec<DecisionOption>,
    #[serde(default)]
    pub scenario_steps: Vec<ScenarioStep>,
}

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Severity {
    #[default]
    Unspecified,
    Minor,
    Major,
    Fatal,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    #[default]
    Unclassified,
    Safe,
    NotPossible,
    Hazardous {
        description: String,
        #[serde(default)]
        severity: Severity,
        #[serde(default)]
        severity_factors: String,
    },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Unclassified => f.write_str("Unclassified"),
            Outcome::Safe => f.write_str("Safe"),
            Outcome::NotPossible => f.write_str("Not possible"),
            Outcome::Hazardous {
                description,
                severity,
                ..
            } => write!(f, "Hazardous: {description} ({severity:?})"),
        }
    }
}

pub type Assignment = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SituationRow {
    /// 1-based position in enumeration order.
    pub index: usize,
    pub real: Assignment,
    pub belief: Assignment,
    /// 1-based option number.
    pub option: usize,
    pub outcome: Outcome,
}

/// A partial match on a row; absent keys match anything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    #[serde(default)]
    pub real: Assignment,
    #[serde(default)]
    pub belief: Assignment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub option: Option<usize>,
    pub outcome: Outcome,
}

impl Rule {
    pub fn matches(&self, row: &SituationRow) -> bool {
        self.option.is_none_or(|o| o == row.option)
            && self.real.iter().all(|(k, v)| row.real.get(k) == Some(v))
            && self
                .belief
                .iter()
                .all(|(k, v)| row.belief.get(k) == Some(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionPointSpec {
    #[serde(flatten)]
    pub point: DecisionPoint,
    #[serde(default)]
    pub rules: Vec<Rule>,
}

/// Contents of `decisions.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionFile {
    pub decision_points: Vec<DecisionPointSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedTable {
    pub decision_point: String,
    pub question: String,
    pub env_vars: Vec<EnvVar>,
    pub options: Vec<String>,
    pub rows: Vec<SituationRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HazardousScenario {
    pub id: String,
    pub decision_point: String,
    pub operating_scenario: String,
    pub environment_states: Vec<String>,
    pub decision: String,
    pub statement: String,
    pub source_rows: Vec<usize>,
    pub severity: Severity,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HazardError {
    #[error("decision point {dp}: {reason}")]
    Invalid { dp: String, reason: String },
    #[error("decision point {dp}: rows {rows:?} match no rule")]
    UncoveredRows { dp: String, rows: Vec<usize> },
}

fn invalid(dp: &DecisionPoint, reason: impl Into<String>) -> HazardError {
    HazardError::Invalid {
        dp: dp.id.clone(),
        reason: reason.into(),
    }
}

pub fn validate_decision_point(dp: &DecisionPoint) -> Result<(), HazardError> {
    if dp.env_vars.is_empty() {
        return Err(invalid(dp, "needs at least one environment variable"));
    }
    if dp.options.len() < 2 {
        return Err(invalid(dp, "needs at least two options"));
    }
    let mut names = BTreeSet::new();
    for v in &dp.env_vars {
        if !names.insert(&v.name) {
            return Err(invalid(dp, format!("variable {} declared twice", v.name)));
        }
        let values: BTreeSet<&String> = v.domain.iter().collect();
        if values.len() < 2 || values.len() != v.domain.len() {
            return Err(invalid(
                dp,
                format!("variable {} needs at least two distinct values", v.name),
            ));
        }
    }
    Ok(())
}

fn validate_rules(dp: &DecisionPoint, rules: &[Rule]) -> Result<(), HazardError> {
    let domains: BTreeMap<&str, &Vec<String>> = dp
        .env_vars
        .iter()
        .map(|v| (v.name.as_str(), &v.domain))
        .collect();
    for (i, r) in rules.iter().enumerate() {
        for (k, v) in r.real.iter().chain(&r.belief) {
            match domains.get(k.as_str()) {
                None => {
                    return Err(invalid(
                        dp,
                        format!("rule {} names unknown variable {k}", i + 1),
                    ))
                }
                Some(d) if !d.contains(v) => {
                    return Err(invalid(
                        dp,
                        format!("rule {} uses unknown value {v} for {k}", i + 1),
                    ))
                }
                _ => {}
            }
        }
        if let Some(o) = r.option {
            if o == 0 || o > dp.options.len() {
                return Err(invalid(dp, format!("rule {} names option {o}", i + 1)));
            }
        }
        if r.outcome == Outcome::Unclassified {
            return Err(invalid(dp, format!("rule {} assigns no outcome", i + 1)));
        }
    }
    Ok(())
}

/// All assignments of the variables, first variable most significant, each
/// domain in declaration order.
fn assignments(vars: &[EnvVar]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                v.domain.iter().map(move |val| {
                    let mut a = a.clone();
                    a.insert(v.name.clone(), val.clone());
                    a
                })
            })
            .collect();
    }
    out
}

/// Every situation, unclassified, ordered by real state, then belief state,
/// then option.
pub fn enumerate(dp: &DecisionPoint) -> Result<Vec<SituationRow>, HazardError> {
    validate_decision_point(dp)?;
    let states = assignments(&dp.env_vars);
    let mut rows = Vec::with_capacity(states.len() * states.len() * dp.options.len());
    for real in &states {
        for belief in &states {
            for option in 1..=dp.options.len() {
                rows.push(SituationRow {
                    index: rows.len() + 1,
                    real: real.clone(),
                    belief: belief.clone(),
                    option,
                    outcome: Outcome::Unclassified,
                });
            }
        }
    }
    Ok(rows)
}

/// Applies the first matching rule to every row. Fails without classifying
/// anything if some row matches no rule.
pub fn classify(
    dp: &DecisionPoint,
    rows: &[SituationRow],
    rules: &[Rule],
) -> Result<Vec<SituationRow>, HazardError> {
    validate_rules(dp, rules)?;
    let uncovered: Vec<usize> = rows
        .iter()
        .filter(|r| !rules.iter().any(|rule| rule.matches(r)))
        .map(|r| r.index)
        .collect();
    if !uncovered.is_empty() {
        return Err(HazardError::UncoveredRows {
            dp: dp.id.clone(),
            rows: uncovered,
        });
    }
    Ok(rows
        .iter()
        .map(|r| {
            let rule = rules.iter().find(|rule| rule.matches(r)).expect("covered");
            SituationRow {
                outcome: rule.outcome.clone(),
                ..r.clone()
            }
        })
        .collect())
}

/// Builds the scenario statement from its parts.
pub fn statement(activity: &str, states: &[String], decision: &str) -> String {
    let mut s = format!("<{activity}>");
    for st in states {
        let _ = write!(s, "<{st}>");
    }
    let _ = write!(s, " AND <{decision}>");
    s
}

/// One scenario per (real state, option) pair with a hazardous row. Rows that
/// differ only in belief state are merged and keep the worst severity.
pub fn extract_hazardous(dp: &DecisionPoint, rows: &[SituationRow]) -> Vec<HazardousScenario> {
    let position = |var: &EnvVar, value: &str| var.domain.iter().position(|d| d == value);
    let key = |r: &SituationRow| -> (Vec<Option<usize>>, usize) {
        let real = dp
            .env_vars
            .iter()
            .map(|v| r.real.get(&v.name).and_then(|val| position(v, val)))
            .collect();
        (real, r.option)
    };
    // Key: domain positions of the real state plus the option.
    type Key = (Vec<Option<usize>>, usize);
    let mut groups: BTreeMap<Key, (Assignment, Vec<usize>, Severity)> = BTreeMap::new();
    for r in rows {
        if let Outcome::Hazardous { severity, .. } = &r.outcome {
            let e = groups
                .entry(key(r))
                .or_insert_with(|| (r.real.clone(), Vec::new(), Severity::Unspecified));
            e.1.push(r.index);
            e.2 = e.2.max(*severity);
        }
    }
    groups
        .into_iter()
        .enumerate()
        .map(|(k, ((_, option), (real, mut source_rows, severity)))| {
            source_rows.sort_unstable();
            let environment_states: Vec<String> = dp
                .env_vars
                .iter()
                .filter_map(|v| real.get(&v.name).map(|val| v.state_text(val)))
                .collect();
            let decision = dp
                .options
                .get(option - 1)
                .map(|o| o.decision().to_string())
                .unwrap_or_default();
            HazardousScenario {
                id: format!("{}/HS{}", dp.id, k + 1),
                decision_point: dp.id.clone(),
                operating_scenario: dp.activity.clone(),
                statement: statement(&dp.activity, &environment_states, &decision),
                environment_states,
                decision,
                source_rows,
                severity,
            }
        })
        .collect()
}

/// Classified tables and scenarios for every decision point, sorted by id.
pub fn analyse(
    file: &DecisionFile,
) -> Result<(Vec<ClassifiedTable>, Vec<HazardousScenario>), HazardError> {
    let mut specs: Vec<&DecisionPointSpec> = file.decision_points.iter().collect();
    specs.sort_by(|a, b| a.point.id.cmp(&b.point.id));
    let mut tables = Vec::new();
    let mut scenarios = Vec::new();
    for spec in specs {
        let dp = &spec.point;
        let rows = classify(dp, &enumerate(dp)?, &spec.rules)?;
        scenarios.extend(extract_hazardous(dp, &rows));
        tables.push(ClassifiedTable {
            decision_point: dp.id.clone(),
            question: dp.question.clone(),
            env_vars: dp.env_vars.clone(),
            options: dp.options.iter().map(|o| o.text().to_string()).collect(),
            rows,
        });
    }
    Ok((tables, scenarios))
}

/// Plain-text rendering with one aligned row per situation.
pub fn render_table(t: &ClassifiedTable) -> String {
    let mut header = vec!["#".to_string()];
    for v in &t.env_vars {
        header.push(format!("Real: {}", v.name));
    }
    for v in &t.env_vars {
        header.push(format!("Belief: {}", v.name));
    }
    header.push("Option".into());
    header.push("Outcome".into());
    let mut lines = vec![header];
    for r in &t.rows {
        let mut line = vec![r.index.to_string()];
        for v in &t.env_vars {
            line.push(r.real.get(&v.name).cloned().unwrap_or_default());
        }
        for v in &t.env_vars {
            line.push(r.belief.get(&v.name).cloned().unwrap_or_default());
        }
        line.push(t.options.get(r.option - 1).cloned().unwrap_or_default());
        line.push(r.outcome.to_string());
        lines.push(line);
    }
    let cols = lines[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            lines
                .iter()
                .map(|l| l[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = format!("{}: {}\n", t.decision_point, t.question);
    for l in &lines {
        let cells: Vec<String> = l
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(cells.join(" | ").trim_end());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatingScenario {
    pub id: String,
    pub description: String,
    #[serde(default)]
    pub steps: Vec<ScenarioStep>,
}

/// Contents of `scenarios.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioCatalogue {
    pub scenarios: Vec<OperatingScenario>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChecklistCheck {
    UnknownOperatingScenario,
    UnknownInteraction,
    OrphanHazardousRow,
    AmbiguousScenario,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChecklistFailure {
    pub check: ChecklistCheck,
    pub locus: String,
    pub message: String,
}

/// Structural checks backing the claim that all hazardous scenarios have been
/// identified. An empty result means every check passed.
pub fn validation_checklist(
    odm: &OdmModel,
    catalogue: &ScenarioCatalogue,
    decisions: &DecisionFile,
    tables: &[ClassifiedTable],
    scenarios: &[HazardousScenario],
) -> Vec<ChecklistFailure> {
    let mut out = Vec::new();
    let known: BTreeSet<&str> = catalogue.scenarios.iter().map(|s| s.id.as_str()).collect();
    for spec in &decisions.decision_points {
        let dp = &spec.point;
        if !known.contains(dp.operating_scenario.as_str()) {
            out.push(ChecklistFailure {
                check: ChecklistCheck::UnknownOperatingScenario,
                locus: dp.id.clone(),
                message: format!(
                    "operating scenario {} is not catalogued",
                    dp.operating_scenario
                ),
            });
        }
        for step in &dp.scenario_steps {
            for i in &step.interactions {
                if odm.find(i).is_none() {
                    out.push(ChecklistFailure {
                        check: ChecklistCheck::UnknownInteraction,
                        locus: dp.id.clone(),
                        message: format!("interaction with {i}, which is not in the ODM"),
                    });
                }
            }
        }
    }
    let covered: BTreeSet<(&str, usize)> = scenarios
        .iter()
        .flat_map(|s| {
            s.source_rows
                .iter()
                .map(move |r| (s.decision_point.as_str(), *r))
        })
        .collect();
    for t in tables {
        for r in &t.rows {
            if matches!(r.outcome, Outcome::Hazardous { .. })
                && !covered.contains(&(t.decision_point.as_str(), r.index))
            {
                out.push(ChecklistFailure {
                    check: ChecklistCheck::OrphanHazardousRow,
                    locus: format!("{}#{}", t.decision_point, r.index),
                    message: "hazardous row is not covered by any scenario".into(),
                });
            }
        }
    }
    for s in scenarios {
        let empty = s.operating_scenario.trim().is_empty()
            || s.decision.trim().is_empty()
            || s.environment_states.is_empty()
            || s.environment_states.iter().any(|e| e.trim().is_empty());
        if empty {
            out.push(ChecklistFailure {
                check: ChecklistCheck::AmbiguousScenario,
                locus: s.id.clone(),
                message: "scenario has an empty part".into(),
            });
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(vars: usize, options: usize) -> DecisionPoint {
        DecisionPoint {
            id: "DP".into(),
            operating_scenario: "OS".into(),
            activity: "moving".into(),
            question: "q".into(),
            env_vars: (0..vars)
                .map(|i| EnvVar {
                    name: format!("v{i}"),
                    domain: vec!["T".into(), "F".into()],
                    states: BTreeMap::new(),
                })
                .collect(),
            options: (0..options)
                .map(|i| DecisionOption::Text(format!("o{i}")))
                .collect(),
            scenario_steps: vec![],
        }
    }

    #[test]
    fn smallest_point() {
        assert_eq!(enumerate(&point(1, 2)).unwrap().len(), 8);
        assert_eq!(enumerate(&point(2, 3)).unwrap().len(), 48);
    }

    #[test]
    fn rejects_degenerate_points() {
        assert!(enumerate(&point(0, 2)).is_err());
        assert!(enumerate(&point(1, 1)).is_err());
    }

    #[test]
    fn uncovered_rows() {
        let dp = point(1, 2);
        let rows = enumerate(&dp).unwrap();
        let rules = vec![Rule {
            real: [("v0".to_string(), "T".to_string())].into(),
            belief: Assignment::new(),
            option: None,
            outcome: Outcome::Safe,
        }];
        match classify(&dp, &rows, &rules) {
            Err(HazardError::UncoveredRows { rows, .. }) => assert_eq!(rows, vec![5, 6, 7, 8]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_safe_extracts_nothing() {
        let dp = point(1, 2);
        let rules = vec![Rule {
            real: Assignment::new(),
            belief: Assignment::new(),
            option: None,
            outcome: Outcome::Safe,
        }];
        let rows = classify(&dp, &enumerate(&dp).unwrap(), &rules).unwrap();
        assert!(extract_hazardous(&dp, &rows).is_empty());
    }

    #[test]
    fn statement_shape() {
        assert_eq!(
            statement("a", &["b".into(), "c".into()], "d"),
            "<a><b><c> AND <d>"
        );
    }
}
