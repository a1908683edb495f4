use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::stopwords::is_stopword;
use super::Requirement;
use crate::odm::{Feature, FeatureKind, OdmModel};

/// Domain dictionary: normalized terms with their definitions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ontology {
    pub terms: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Ontology {
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ontology {
            terms: terms
                .into_iter()
                .map(|t| (t.into(), String::new()))
                .collect(),
            source: None,
        }
    }

    /// Every word of every term, normalized.
    fn vocabulary(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|t| words(t).into_iter().map(|(_, w)| normalize(&w)))
            .collect()
    }

    pub fn merge(&mut self, other: Ontology) {
        for (k, v) in other.terms {
            self.terms.entry(k).or_insert(v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermLocation {
    Clause(usize),
    Response,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermWarning {
    pub term: String,
    pub location: TermLocation,
    /// Byte offset of the word within the clause condition or the response.
    pub offset: usize,
}

/// Lowercased alphanumeric words with their byte offsets.
fn words(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            out.push((s, text[s..i].to_lowercase()));
        }
    }
    if let Some(s) = start {
        out.push((s, text[s..].to_lowercase()));
    }
    out
}

/// Naive stemming: drop one plural `s`.
fn normalize(word: &str) -> String {
    if word.len() > 3 && word.ends_with('s') && !word.ends_with("ss") {
        word[..word.len() - 1].to_string()
    } else {
        word.to_string()
    }
}

fn check_text(
    text: &str,
    location: TermLocation,
    vocab: &BTreeSet<String>,
    out: &mut Vec<TermWarning>,
) {
    for (offset, w) in words(text) {
        if w.chars().all(|c| c.is_ascii_digit()) || is_stopword(&w) {
            continue;
        }
        if !vocab.contains(&normalize(&w)) {
            out.push(TermWarning {
                term: w,
                location,
                offset,
            });
        }
    }
}

/// Warns about every content word of the conditions and the response that
/// the ontology does not define. The system name is not checked.
pub fn lint_terms(r: &Requirement, ont: &Ontology) -> Vec<TermWarning> {
    let vocab = ont.vocabulary();
    let mut out = Vec::new();
    for (i, c) in r.clauses.iter().enumerate() {
        let text = match &c.precondition {
            Some(p) => format!("{} -- {}", p, c.trigger_or_condition),
            None => c.trigger_or_condition.clone(),
        };
        check_text(&text, TermLocation::Clause(i), &vocab, &mut out);
    }
    check_text(&r.response, TermLocation::Response, &vocab, &mut out);
    out
}

fn collect_feature_terms(f: &Feature, out: &mut BTreeMap<String, String>) {
    let definition = f.granularity_rationale.clone().unwrap_or_default();
    out.entry(f.name.replace(['_', '-'], " "))
        .or_insert(definition);
    if let Some(FeatureKind::Categorical { values }) = &f.kind {
        for v in values {
            out.entry(v.replace(['_', '-'], " ")).or_default();
        }
    }
    for c in &f.children {
        collect_feature_terms(c, out);
    }
}

/// Terms drawn from the ODM: feature names and categorical values.
pub fn ontology_from_odm(odm: &OdmModel) -> Ontology {
    let mut terms = BTreeMap::new();
    for f in &odm.features {
        collect_feature_terms(f, &mut terms);
    }
    Ontology {
        terms,
        source: Some("odm".to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::req::parse;

    #[test]
    fn complex_example_warnings() {
        let r = parse(
            "While the robot is moving, when a person is present, the robot shall issue an audible warning",
        )
        .unwrap();
        let ont = Ontology::from_terms(["robot", "person", "warning", "corridor"]);
        let mut terms: Vec<_> = lint_terms(&r, &ont).into_iter().map(|w| w.term).collect();
        terms.sort();
        assert_eq!(terms, vec!["audible", "issue", "moving", "present"]);
    }

    #[test]
    fn plural_and_numbers() {
        let r = parse("The robot shall avoid walls within 5 metres").unwrap();
        let ont = Ontology::from_terms(["wall", "metre", "avoid", "within"]);
        assert!(lint_terms(&r, &ont).is_empty());
    }

    #[test]
    fn offsets_point_at_words() {
        let r = parse("The robot shall issue a chime").unwrap();
        let w = lint_terms(&r, &Ontology::default());
        assert_eq!(w[1].term, "chime");
        assert_eq!(&r.response[w[1].offset..], "chime");
        assert_eq!(w[1].location, TermLocation::Response);
    }
}
