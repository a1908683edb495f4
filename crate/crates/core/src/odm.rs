//! Operational domain models: the feature tree, reduced operating domains,
//! the boundary transition model, the recognition assessment matrix, and a
//! debounced boundary recognizer evaluated against labelled traces.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FeatureKind {
    Categorical {
        values: Vec<String>,
    },
    Numeric {
        min: f64,
        max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unit: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<FeatureKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Feature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub granularity_rationale: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OdmModel {
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IssueKind {
    DuplicateFeature,
    BadRange,
    MissingRationale,
    UnknownFeature,
    NotStrictSubset,
    KindMismatch,
    EmptyNarrowing,
    NoEffect,
    MissingState,
    UndeclaredState,
    DuplicateTransition,
    UnassessedCrossing,
    UnreachableState,
    MissingCell,
    DuplicateCell,
    HazardousUnmitigated,
    EmptyCell,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Issue {
    pub kind: IssueKind,
    pub locus: String,
    pub message: String,
}

impl Issue {
    fn new(kind: IssueKind, locus: impl Into<String>, message: impl Into<String>) -> Self {
        Issue {
            kind,
            locus: locus.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}: {}", self.kind, self.locus, self.message)
    }
}

impl OdmModel {
    /// Looks a feature up by its slash-separated path.
    pub fn find(&self, path: &str) -> Option<&Feature> {
        let mut level = &self.features;
        let mut found = None;
        for part in path.split('/') {
            let f = level.iter().find(|f| f.name == part)?;
            found = Some(f);
            level = &f.children;
        }
        found
    }

    /// Paths of every leaf feature, depth first in declaration order.
    pub fn leaf_paths(&self) -> Vec<String> {
        fn walk(prefix: &str, fs: &[Feature], out: &mut Vec<String>) {
            for f in fs {
                let path = if prefix.is_empty() {
                    f.name.clone()
                } else {
                    format!("{prefix}/{}", f.name)
                };
                if f.children.is_empty() {
                    out.push(path);
                } else {
                    walk(&path, &f.children, out);
                }
            }
        }
        let mut out = Vec::new();
        walk("", &self.features, &mut out);
        out
    }

    pub fn all_paths(&self) -> Vec<String> {
        fn walk(prefix: &str, fs: &[Feature], out: &mut Vec<String>) {
            for f in fs {
                let path = if prefix.is_empty() {
                    f.name.clone()
                } else {
                    format!("{prefix}/{}", f.name)
                };
                out.push(path.clone());
                walk(&path, &f.children, out);
            }
        }
        let mut out = Vec::new();
        walk("", &self.features, &mut out);
        out
    }
}

pub fn check_odm(odm: &OdmModel) -> Vec<Issue> {
    fn walk(prefix: &str, fs: &[Feature], out: &mut Vec<Issue>) {
        let mut seen = BTreeSet::new();
        for f in fs {
            let path = if prefix.is_empty() {
                f.name.clone()
            } else {
                format!("{prefix}/{}", f.name)
            };
            if !seen.insert(f.name.as_str()) {
                out.push(Issue::new(
                    IssueKind::DuplicateFeature,
                    &path,
                    "name repeated",
                ));
            }
            if let Some(FeatureKind::Numeric { min, max, .. }) = &f.kind {
                if min.partial_cmp(max) != Some(Ordering::Less) {
                    out.push(Issue::new(
                        IssueKind::BadRange,
                        &path,
                        format!("min {min} is not below max {max}"),
                    ));
                }
            }
            if f.children.is_empty()
                && f.granularity_rationale
                    .as_deref()
                    .is_none_or(|r| r.trim().is_empty())
            {
                out.push(Issue::new(
                    IssueKind::MissingRationale,
                    &path,
                    "leaf feature lacks a level-of-detail rationale",
                ));
            }
            walk(&path, &f.children, out);
        }
    }
    let mut out = Vec::new();
    walk("", &odm.features, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Narrowing {
    pub feature: String,
    pub domain: FeatureKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RodConstraint {
    pub id: String,
    pub trigger: String,
    #[serde(default)]
    pub narrowings: Vec<Narrowing>,
    #[serde(default)]
    pub capability_reductions: Vec<String>,
}

/// Checks that every narrowing is a strict sub-domain of its ODM feature.
pub fn check_rod(odm: &OdmModel, rod: &RodConstraint) -> Vec<Issue> {
    let mut out = Vec::new();
    if rod.narrowings.is_empty() && rod.capability_reductions.is_empty() {
        out.push(Issue::new(
            IssueKind::NoEffect,
            &rod.id,
            "neither narrows a feature nor reduces a capability",
        ));
    }
    for n in &rod.narrowings {
        let locus = format!("{}:{}", rod.id, n.feature);
        let Some(kind) = odm.find(&n.feature).and_then(|f| f.kind.as_ref()) else {
            out.push(Issue::new(
                IssueKind::UnknownFeature,
                locus,
                "feature is not in the ODM or has no domain",
            ));
            continue;
        };
        match (kind, &n.domain) {
            (
                FeatureKind::Numeric { min, max, .. },
                FeatureKind::Numeric {
                    min: lo, max: hi, ..
                },
            ) => {
                if lo > hi {
                    out.push(Issue::new(
                        IssueKind::EmptyNarrowing,
                        locus,
                        "empty interval",
                    ));
                } else if lo < min || hi > max || (lo == min && hi == max) {
                    out.push(Issue::new(
                        IssueKind::NotStrictSubset,
                        locus,
                        format!("[{lo}, {hi}] is not a strict subinterval of [{min}, {max}]"),
                    ));
                }
            }
            (
                FeatureKind::Categorical { values },
                FeatureKind::Categorical { values: narrowed },
            ) => {
                let full: BTreeSet<&String> = values.iter().collect();
                let sub: BTreeSet<&String> = narrowed.iter().collect();
                if sub.is_empty() {
                    out.push(Issue::new(
                        IssueKind::EmptyNarrowing,
                        locus,
                        "no values left",
                    ));
                } else if !sub.is_subset(&full) || sub.len() == full.len() {
                    out.push(Issue::new(
                        IssueKind::NotStrictSubset,
                        locus,
                        "values are not a strict subset of the ODM values",
                    ));
                }
            }
            _ => out.push(Issue::new(
                IssueKind::KindMismatch,
                locus,
                "narrowing kind differs from the feature kind",
            )),
        }
    }
    out
}

pub const TRANSITION_STATES: [&str; 4] = [
    "InOdm-Autonomous",
    "InOdm-NonAutonomous",
    "OutOdm-Autonomous",
    "OutOdm-NonAutonomous",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub condition: String,
    #[serde(default)]
    pub assessed_unsafe_modes: Vec<String>,
    #[serde(default)]
    pub mitigations: Vec<String>,
    /// Explicit marker that a crossing was assessed and found safe.
    #[serde(default)]
    pub assessed_safe: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionModel {
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
}

fn odm_side(state: &str) -> Option<&str> {
    state.split('-').next()
}

pub fn check_transition_model(tm: &TransitionModel) -> Vec<Issue> {
    let mut out = Vec::new();
    let declared: BTreeSet<&str> = tm.states.iter().map(|s| s.as_str()).collect();
    for s in TRANSITION_STATES {
        if !declared.contains(s) {
            out.push(Issue::new(IssueKind::MissingState, s, "state not declared"));
        }
    }
    for s in &declared {
        if !TRANSITION_STATES.contains(s) {
            out.push(Issue::new(
                IssueKind::UndeclaredState,
                *s,
                "not one of the four boundary states",
            ));
        }
    }
    let mut pairs = BTreeSet::new();
    let mut touched = BTreeSet::new();
    for t in &tm.transitions {
        let locus = format!("{}->{}", t.from, t.to);
        for s in [&t.from, &t.to] {
            if !declared.contains(s.as_str()) {
                out.push(Issue::new(
                    IssueKind::UndeclaredState,
                    &locus,
                    format!("{s} is not a declared state"),
                ));
            }
        }
        if !pairs.insert((t.from.as_str(), t.to.as_str())) {
            out.push(Issue::new(
                IssueKind::DuplicateTransition,
                &locus,
                "transition listed twice",
            ));
        }
        touched.insert(t.from.as_str());
        touched.insert(t.to.as_str());
        let crosses = odm_side(&t.from) != odm_side(&t.to);
        if crosses && t.assessed_unsafe_modes.is_empty() && !t.assessed_safe {
            out.push(Issue::new(
                IssueKind::UnassessedCrossing,
                &locus,
                "boundary crossing has no assessed unsafe modes",
            ));
        }
    }
    for s in &declared {
        if TRANSITION_STATES.contains(s) && !touched.contains(s) {
            out.push(Issue::new(
                IssueKind::UnreachableState,
                *s,
                "no transition enters or leaves this state",
            ));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RecognitionCase {
    ApproachFromInside,
    Crossing,
    ApproachFromOutside,
    ReEntering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureMode {
    Timeliness,
    Accuracy,
    Hysteresis,
}

pub const RECOGNITION_CASES: [RecognitionCase; 4] = [
    RecognitionCase::ApproachFromInside,
    RecognitionCase::Crossing,
    RecognitionCase::ApproachFromOutside,
    RecognitionCase::ReEntering,
];

pub const FAILURE_MODES: [FailureMode; 3] = [
    FailureMode::Timeliness,
    FailureMode::Accuracy,
    FailureMode::Hysteresis,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentCell {
    pub case: RecognitionCase,
    pub mode: FailureMode,
    pub hazardous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mitigation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentMatrix {
    pub cells: Vec<AssessmentCell>,
}

fn blank(s: &Option<String>) -> bool {
    s.as_deref().is_none_or(|s| s.trim().is_empty())
}

pub fn check_assessment_matrix(m: &AssessmentMatrix) -> Vec<Issue> {
    let mut out = Vec::new();
    let mut seen: BTreeMap<(RecognitionCase, FailureMode), usize> = BTreeMap::new();
    for c in &m.cells {
        let locus = format!("{:?}x{:?}", c.case, c.mode);
        *seen.entry((c.case, c.mode)).or_default() += 1;
        if seen[&(c.case, c.mode)] == 2 {
            out.push(Issue::new(
                IssueKind::DuplicateCell,
                &locus,
                "cell assessed twice",
            ));
        }
        if c.hazardous && blank(&c.mitigation) {
            out.push(Issue::new(
                IssueKind::HazardousUnmitigated,
                &locus,
                "hazardous cell has no mitigation",
            ));
        } else if !c.hazardous && blank(&c.mitigation) && blank(&c.rationale) {
            out.push(Issue::new(
                IssueKind::EmptyCell,
                &locus,
                "cell has neither mitigation nor rationale",
            ));
        }
    }
    for case in RECOGNITION_CASES {
        for mode in FAILURE_MODES {
            if !seen.contains_key(&(case, mode)) {
                out.push(Issue::new(
                    IssueKind::MissingCell,
                    format!("{case:?}x{mode:?}"),
                    "cell not assessed",
                ));
            }
        }
    }
    out
}

fn default_span() -> f64 {
    1.0
}

/// The measured quantity standing in for the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proxy {
    pub feature: String,
    #[serde(default)]
    pub sensor: String,
    /// Safety margin as a fraction of `span`.
    #[serde(default)]
    pub margin: f64,
    /// Width of the feature's domain, in feature units.
    #[serde(default = "default_span")]
    pub span: f64,
}

/// Recognizer for a boundary where values above `threshold` lie outside the
/// ODM. Both declarations use the level `threshold - margin * span`, so a
/// larger margin recognizes the boundary earlier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecognizerSpec {
    #[serde(default)]
    pub id: String,
    pub proxy: Proxy,
    pub threshold: f64,
    pub debounce_in: usize,
    pub debounce_out: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_latency: Option<usize>,
}

impl BoundaryRecognizerSpec {
    pub fn level(&self) -> f64 {
        self.threshold - self.proxy.margin * self.proxy.span
    }
}

/// Recognizer specifications stored in the boundary interpretation document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryInterpretation {
    #[serde(default)]
    pub notes: String,
    pub recognizers: Vec<BoundaryRecognizerSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Inside,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declaration {
    pub index: usize,
    pub state: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub crossing: usize,
    pub declared: usize,
    pub state: Region,
    /// Samples from the true crossing to the declaration; negative when the
    /// recognizer anticipated the crossing.
    pub latency: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceMetrics {
    pub declarations: Vec<Declaration>,
    pub detections: Vec<Detection>,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub flip_flops: usize,
    pub late: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthSample {
    pub t: f64,
    pub inside: bool,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("trace and truth disagree or time is not increasing at sample {0}")]
    MisalignedTrace(usize),
    #[error("invalid recognizer: {0}")]
    InvalidSpec(String),
    #[error("trace file: {0}")]
    Csv(#[from] csv::Error),
}

/// Runs the debounced recognizer over `values`, starting Inside.
pub fn recognize(spec: &BoundaryRecognizerSpec, values: &[f64]) -> Vec<Declaration> {
    let level = spec.level();
    let mut state = Region::Inside;
    let (mut out_run, mut in_run) = (0usize, 0usize);
    let mut decls = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v > level {
            out_run += 1;
            in_run = 0;
        } else {
            in_run += 1;
            out_run = 0;
        }
        match state {
            Region::Inside if out_run >= spec.debounce_out => {
                state = Region::Outside;
                decls.push(Declaration { index: i, state });
            }
            Region::Outside if in_run >= spec.debounce_in => {
                state = Region::Inside;
                decls.push(Declaration { index: i, state });
            }
            _ => {}
        }
    }
    decls
}

/// Indices where the true region changes, starting from Inside.
pub fn truth_crossings(truth: &[bool]) -> Vec<(usize, Region)> {
    let mut prev = true;
    let mut out = Vec::new();
    for (i, &inside) in truth.iter().enumerate() {
        if inside != prev {
            out.push((
                i,
                if inside {
                    Region::Inside
                } else {
                    Region::Outside
                },
            ));
            prev = inside;
        }
    }
    out
}

/// Pairs true crossings with declarations. A crossing matches the first
/// unused declaration of the same region strictly between the previous and
/// the next crossing; leftovers are false positives and false negatives.
pub fn score(spec: &BoundaryRecognizerSpec, decls: &[Declaration], truth: &[bool]) -> TraceMetrics {
    let crossings = truth_crossings(truth);
    let mut used = vec![false; decls.len()];
    let mut detections = Vec::new();
    let mut false_negatives = 0;
    for (j, &(idx, region)) in crossings.iter().enumerate() {
        let lo = if j == 0 {
            -1
        } else {
            crossings[j - 1].0 as i64
        };
        let hi = crossings
            .get(j + 1)
            .map(|c| c.0 as i64)
            .unwrap_or(truth.len() as i64);
        let hit = decls.iter().enumerate().find(|(k, d)| {
            !used[*k] && d.state == region && (d.index as i64) > lo && (d.index as i64) < hi
        });
        match hit {
            Some((k, d)) => {
                used[k] = true;
                detections.push(Detection {
                    crossing: idx,
                    declared: d.index,
                    state: region,
                    latency: d.index as i64 - idx as i64,
                });
            }
            None => false_negatives += 1,
        }
    }
    let window = spec.debounce_in + spec.debounce_out;
    let flip_flops = decls
        .windows(2)
        .filter(|w| w[1].index - w[0].index < window)
        .count();
    let late = match spec.max_latency {
        Some(max) => detections.iter().filter(|d| d.latency > max as i64).count(),
        None => 0,
    };
    TraceMetrics {
        declarations: decls.to_vec(),
        false_positives: used.iter().filter(|u| !**u).count(),
        detections,
        false_negatives,
        flip_flops,
        late,
    }
}

pub fn validate_spec(spec: &BoundaryRecognizerSpec) -> Result<(), TraceError> {
    if spec.proxy.margin < 0.0 || !spec.proxy.margin.is_finite() {
        return Err(TraceError::InvalidSpec(
            "margin must be non-negative".into(),
        ));
    }
    if spec.debounce_in == 0 || spec.debounce_out == 0 {
        return Err(TraceError::InvalidSpec(
            "debounce counts must be at least 1".into(),
        ));
    }
    Ok(())
}

pub fn evaluate_trace(
    spec: &BoundaryRecognizerSpec,
    trace: &[Sample],
    truth: &[TruthSample],
) -> Result<TraceMetrics, TraceError> {
    validate_spec(spec)?;
    if trace.is_empty() {
        return Err(TraceError::EmptyTrace);
    }
    if trace.len() != truth.len() {
        return Err(TraceError::MisalignedTrace(trace.len().min(truth.len())));
    }
    for i in 0..trace.len() {
        if trace[i].t.to_bits() != truth[i].t.to_bits() {
            return Err(TraceError::MisalignedTrace(i));
        }
        if i > 0 && trace[i].t.partial_cmp(&trace[i - 1].t) != Some(Ordering::Greater) {
            return Err(TraceError::MisalignedTrace(i));
        }
    }
    let values: Vec<f64> = trace.iter().map(|s| s.value).collect();
    let inside: Vec<bool> = truth.iter().map(|s| s.inside).collect();
    let decls = recognize(spec, &values);
    Ok(score(spec, &decls, &inside))
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    t: f64,
    value: f64,
    truth_inside: String,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "t" | "yes" => Some(true),
        "0" | "false" | "f" | "no" => Some(false),
        _ => None,
    }
}

/// Reads a `t,value,truth_inside` CSV file (header required).
pub fn read_trace_csv<R: Read>(reader: R) -> Result<(Vec<Sample>, Vec<TruthSample>), TraceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    for h in ["t", "value", "truth_inside"] {
        if !headers.iter().any(|x| x == h) {
            return Err(TraceError::InvalidSpec(format!("trace header lacks `{h}`")));
        }
    }
    let mut trace = Vec::new();
    let mut truth = Vec::new();
    for (i, row) in rdr.deserialize::<TraceRow>().enumerate() {
        let row = row?;
        let inside = parse_bool(&row.truth_inside).ok_or(TraceError::MisalignedTrace(i))?;
        trace.push(Sample {
            t: row.t,
            value: row.value,
        });
        truth.push(TruthSample { t: row.t, inside });
    }
    Ok((trace, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(margin: f64, din: usize, dout: usize) -> BoundaryRecognizerSpec {
        BoundaryRecognizerSpec {
            id: "rain".into(),
            proxy: Proxy {
                feature: "weather/rain".into(),
                sensor: "wiper rate".into(),
                margin,
                span: 1.0,
            },
            threshold: 0.5,
            debounce_in: din,
            debounce_out: dout,
            max_latency: Some(2),
        }
    }

    fn samples(values: &[f64], truth: &[bool]) -> (Vec<Sample>, Vec<TruthSample>) {
        let trace = values
            .iter()
            .enumerate()
            .map(|(i, &v)| Sample {
                t: i as f64,
                value: v,
            })
            .collect();
        let truth = truth
            .iter()
            .enumerate()
            .map(|(i, &b)| TruthSample {
                t: i as f64,
                inside: b,
            })
            .collect();
        (trace, truth)
    }

    #[test]
    fn hand_stepped_example() {
        let (tr, tt) = samples(
            &[0.1, 0.2, 0.9, 0.9, 0.2, 0.1],
            &[true, true, false, false, true, true],
        );
        let m = evaluate_trace(&spec(0.0, 2, 2), &tr, &tt).unwrap();
        assert_eq!(
            m.declarations,
            vec![
                Declaration {
                    index: 3,
                    state: Region::Outside
                },
                Declaration {
                    index: 5,
                    state: Region::Inside
                },
            ]
        );
        assert_eq!(m.detections[0].latency, 1);
        assert_eq!(m.detections[1].latency, 1);
        assert_eq!((m.false_positives, m.false_negatives), (0, 0));
    }

    #[test]
    fn constant_inside_trace() {
        let (tr, tt) = samples(&[0.1; 20], &[true; 20]);
        let m = evaluate_trace(&spec(0.0, 2, 2), &tr, &tt).unwrap();
        assert!(m.declarations.is_empty());
        assert_eq!(m.flip_flops, 0);
    }

    #[test]
    fn alternating_trace() {
        let values: Vec<f64> = (0..20)
            .map(|i| if i % 2 == 0 { 0.9 } else { 0.1 })
            .collect();
        let truth: Vec<bool> = values.iter().map(|v| *v < 0.5).collect();
        let (tr, tt) = samples(&values, &truth);
        assert!(
            evaluate_trace(&spec(0.0, 1, 1), &tr, &tt)
                .unwrap()
                .flip_flops
                > 0
        );
        assert!(evaluate_trace(&spec(0.0, 3, 3), &tr, &tt)
            .unwrap()
            .declarations
            .is_empty());
    }

    #[test]
    fn misaligned() {
        let (tr, mut tt) = samples(&[0.1, 0.2], &[true, true]);
        tt[1].t = 5.0;
        assert!(matches!(
            evaluate_trace(&spec(0.0, 1, 1), &tr, &tt),
            Err(TraceError::MisalignedTrace(1))
        ));
    }

    fn odm() -> OdmModel {
        serde_json::from_value(serde_json::json!({
            "features": [
                {"name": "speed", "kind": {"type": "numeric", "min": 0.0, "max": 40.0, "unit": "km/h"},
                 "granularity_rationale": "speed bands"},
                {"name": "surface", "kind": {"type": "categorical", "values": ["dry", "wet", "icy"]},
                 "granularity_rationale": "friction classes"}
            ]
        }))
        .unwrap()
    }

    fn rod(feature: &str, domain: FeatureKind) -> RodConstraint {
        RodConstraint {
            id: "ROD-1".into(),
            trigger: "long range sensor failure".into(),
            narrowings: vec![Narrowing {
                feature: feature.into(),
                domain,
            }],
            capability_reductions: vec![],
        }
    }

    fn numeric(min: f64, max: f64) -> FeatureKind {
        FeatureKind::Numeric {
            min,
            max,
            unit: None,
        }
    }

    #[test]
    fn rod_checks() {
        assert!(check_rod(&odm(), &rod("speed", numeric(0.0, 10.0))).is_empty());
        let v = check_rod(&odm(), &rod("speed", numeric(0.0, 40.0)));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, IssueKind::NotStrictSubset);
        let v = check_rod(&odm(), &rod("fog_density", numeric(0.0, 1.0)));
        assert_eq!(v[0].kind, IssueKind::UnknownFeature);
        let v = check_rod(
            &odm(),
            &rod(
                "surface",
                FeatureKind::Categorical {
                    values: vec!["dry".into()],
                },
            ),
        );
        assert!(v.is_empty());
    }

    fn full_model() -> TransitionModel {
        let mut tm = TransitionModel {
            states: TRANSITION_STATES.iter().map(|s| s.to_string()).collect(),
            transitions: vec![],
        };
        for a in TRANSITION_STATES {
            for b in TRANSITION_STATES {
                if a != b {
                    tm.transitions.push(Transition {
                        from: a.into(),
                        to: b.into(),
                        condition: "c".into(),
                        assessed_unsafe_modes: vec!["late handover".into()],
                        mitigations: vec![],
                        assessed_safe: false,
                    });
                }
            }
        }
        tm
    }

    #[test]
    fn transition_checks() {
        assert!(check_transition_model(&full_model()).is_empty());
        let mut tm = full_model();
        tm.states.retain(|s| s != "OutOdm-NonAutonomous");
        tm.transitions
            .retain(|t| t.from != "OutOdm-NonAutonomous" && t.to != "OutOdm-NonAutonomous");
        let v = check_transition_model(&tm);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, IssueKind::MissingState);
    }

    fn full_matrix() -> AssessmentMatrix {
        let mut m = AssessmentMatrix::default();
        for case in RECOGNITION_CASES {
            for mode in FAILURE_MODES {
                m.cells.push(AssessmentCell {
                    case,
                    mode,
                    hazardous: true,
                    mitigation: Some("MRS".into()),
                    rationale: None,
                });
            }
        }
        m
    }

    #[test]
    fn matrix_checks() {
        assert!(check_assessment_matrix(&full_matrix()).is_empty());
        let mut m = full_matrix();
        m.cells.pop();
        assert_eq!(check_assessment_matrix(&m).len(), 1);
        let mut m = full_matrix();
        m.cells[4].mitigation = None;
        let v = check_assessment_matrix(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, IssueKind::HazardousUnmitigated);
        assert_eq!(v[0].locus, "CrossingxAccuracy");
    }
}
