//! Reference implementations written from the definitions, sharing no code
//! with the library beyond its data types.

use std::collections::{BTreeMap, BTreeSet};

use sace_kit::artifact::{ArtifactId, STAGES};
use sace_kit::odm::{BoundaryRecognizerSpec, Region};

/// Upstream closure by repeated relaxation over an explicit edge list. An
/// output depends on its stage's inputs and on the outputs listed before it.
pub fn reachability(target: ArtifactId) -> BTreeSet<ArtifactId> {
    let mut edges: BTreeMap<ArtifactId, BTreeSet<ArtifactId>> = BTreeMap::new();
    for s in &STAGES {
        for (pos, out) in s.outputs.iter().enumerate() {
            let e = edges.entry(*out).or_default();
            e.extend(s.inputs.iter().copied());
            e.extend(s.outputs[..pos].iter().copied());
        }
    }
    let mut reach: BTreeSet<ArtifactId> = edges.get(&target).cloned().unwrap_or_default();
    loop {
        let before = reach.len();
        let next: Vec<ArtifactId> = reach
            .iter()
            .flat_map(|a| edges.get(a).cloned().unwrap_or_default())
            .collect();
        reach.extend(next);
        if reach.len() == before {
            return reach;
        }
    }
}

/// One reference recognizer step result per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRun {
    pub declarations: Vec<(usize, Region)>,
    pub states: Vec<Region>,
}

/// Debounced recognizer by window inspection: the state flips to Outside at
/// sample i when the last `debounce_out` samples all lie above the level, and
/// back to Inside when the last `debounce_in` all lie at or below it.
pub fn reference_recognizer(spec: &BoundaryRecognizerSpec, values: &[f64]) -> ReferenceRun {
    let level = spec.threshold - spec.proxy.margin * spec.proxy.span;
    let mut state = Region::Inside;
    let mut declarations = Vec::new();
    let mut states = Vec::new();
    for i in 0..values.len() {
        let window = |n: usize| -> Option<&[f64]> { (i + 1 >= n).then(|| &values[i + 1 - n..=i]) };
        match state {
            Region::Inside => {
                if window(spec.debounce_out).is_some_and(|w| w.iter().all(|v| *v > level)) {
                    state = Region::Outside;
                    declarations.push((i, state));
                }
            }
            Region::Outside => {
                if window(spec.debounce_in).is_some_and(|w| w.iter().all(|v| *v <= level)) {
                    state = Region::Inside;
                    declarations.push((i, state));
                }
            }
        }
        states.push(state);
    }
    ReferenceRun {
        declarations,
        states,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceScore {
    pub detections: Vec<(usize, usize, i64)>,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub flip_flops: usize,
    pub late: usize,
}

/// Scores declarations against ground truth. Each true region change claims
/// the earliest unclaimed declaration of the same region that falls strictly
/// between the neighbouring changes (trace ends count as neighbours).
pub fn reference_score(
    spec: &BoundaryRecognizerSpec,
    declarations: &[(usize, Region)],
    truth: &[bool],
) -> ReferenceScore {
    let mut changes = Vec::new();
    for i in 0..truth.len() {
        let before = if i == 0 { true } else { truth[i - 1] };
        if truth[i] != before {
            changes.push((
                i,
                if truth[i] {
                    Region::Inside
                } else {
                    Region::Outside
                },
            ));
        }
    }
    let mut claimed = BTreeSet::new();
    let mut score = ReferenceScore::default();
    for (j, (at, region)) in changes.iter().enumerate() {
        let after_prev = if j == 0 { 0 } else { changes[j - 1].0 + 1 };
        let before_next = changes.get(j + 1).map_or(truth.len(), |c| c.0);
        let found = (0..declarations.len()).find(|k| {
            let (idx, r) = declarations[*k];
            !claimed.contains(k) && r == *region && idx >= after_prev && idx < before_next
        });
        match found {
            Some(k) => {
                claimed.insert(k);
                score.detections.push((
                    *at,
                    declarations[k].0,
                    declarations[k].0 as i64 - *at as i64,
                ));
            }
            None => score.false_negatives += 1,
        }
    }
    score.false_positives = declarations.len() - claimed.len();
    for pair in declarations.windows(2) {
        if pair[1].0 - pair[0].0 < spec.debounce_in + spec.debounce_out {
            score.flip_flops += 1;
        }
    }
    if let Some(max) = spec.max_latency {
        score.late = score.detections.iter().filter(|d| d.2 > max as i64).count();
    }
    score
}
