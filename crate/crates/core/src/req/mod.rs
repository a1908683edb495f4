//! Structured safety requirements: a parser for the keyword templates
//! (`When`, `While`, `Where`, `If ... then`), a classifier, a canonical
//! printer and dictionary-based term checks.
//!
//! Grammar (keywords case-insensitive):
//!
//! ```text
//! req    := clause* main
//! clause := ("When" | "While" | "Where") cond ","?  |  "If" cond ","? "then"
//! main   := "the" name "shall" response "."?
//! ```
//!
//! A clause starts at the beginning of the text or after a comma. The main
//! part of the last clause begins at `then` for an `If` clause, otherwise at
//! the last `, the`, otherwise at the last `the`. A condition may separate an
//! explicit precondition from its trigger with ` -- `.

mod stopwords;
mod terms;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use terms::{lint_terms, ontology_from_odm, Ontology, TermLocation, TermWarning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Keyword {
    When,
    While,
    Where,
    If,
}

impl Keyword {
    fn parse(word: &str) -> Option<Keyword> {
        match word.to_ascii_lowercase().as_str() {
            "when" => Some(Keyword::When),
            "while" => Some(Keyword::While),
            "where" => Some(Keyword::Where),
            "if" => Some(Keyword::If),
            _ => None,
        }
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Keyword::When => "When",
            Keyword::While => "While",
            Keyword::Where => "Where",
            Keyword::If => "If",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Template {
    Ubiquitous,
    EventDriven,
    UnwantedBehaviour,
    StateDriven,
    OptionalFeature,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub keyword: Keyword,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precondition: Option<String>,
    pub trigger_or_condition: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    #[serde(default)]
    pub id: String,
    #[serde(default)]
    pub raw: String,
    pub clauses: Vec<Clause>,
    pub system: String,
    pub response: String,
    pub template: Template,
}

impl Requirement {
    /// Structural equality, ignoring the id and the original text.
    pub fn same_ast(&self, other: &Requirement) -> bool {
        self.clauses == other.clauses
            && self.system == other.system
            && self.response == other.response
            && self.template == other.template
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("requirement is empty")]
    Empty,
    #[error("no `shall` found")]
    NoShall,
    #[error("no system name between `the` and `shall`")]
    NoSystemName,
    #[error("`If` clause without `then`, or a condition nested inside another clause")]
    DanglingIf,
    #[error("nothing follows `shall`")]
    EmptyResponse,
    #[error("a `{0}` clause has no condition")]
    EmptyClause(Keyword),
}

/// Classifies a clause sequence.
pub fn classify(clauses: &[Clause]) -> Template {
    let mut kinds: Vec<Keyword> = clauses.iter().map(|c| c.keyword).collect();
    kinds.sort();
    kinds.dedup();
    match kinds.as_slice() {
        [] => Template::Ubiquitous,
        [Keyword::When] => Template::EventDriven,
        [Keyword::While] => Template::StateDriven,
        [Keyword::Where] => Template::OptionalFeature,
        [Keyword::If] => Template::UnwantedBehaviour,
        _ => Template::Complex,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Comma,
}

fn tokenize(text: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = String::new();
        for c in chunk.chars() {
            if c == ',' {
                if !word.is_empty() {
                    out.push(Tok::Word(std::mem::take(&mut word)));
                }
                out.push(Tok::Comma);
            } else {
                word.push(c);
            }
        }
        if !word.is_empty() {
            out.push(Tok::Word(word));
        }
    }
    out
}

fn join(tokens: &[Tok]) -> String {
    let mut out = String::new();
    for t in tokens {
        match t {
            Tok::Word(w) => {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(w);
            }
            Tok::Comma => out.push(','),
        }
    }
    out
}

fn is_word(t: &Tok, w: &str) -> bool {
    matches!(t, Tok::Word(x) if x.eq_ignore_ascii_case(w))
}

fn trim_commas(mut tokens: &[Tok]) -> &[Tok] {
    while let [Tok::Comma, rest @ ..] = tokens {
        tokens = rest;
    }
    while let [rest @ .., Tok::Comma] = tokens {
        tokens = rest;
    }
    tokens
}

fn make_clause(keyword: Keyword, body: &[Tok]) -> Result<Clause, ParseError> {
    let body = trim_commas(body);
    if keyword != Keyword::If && body.iter().any(|t| is_word(t, "if")) {
        return Err(ParseError::DanglingIf);
    }
    let text = join(body);
    if text.is_empty() {
        return Err(ParseError::EmptyClause(keyword));
    }
    let (precondition, trigger) = match text.split_once(" -- ") {
        Some((pre, trig)) => (Some(pre.trim().to_string()), trig.trim().to_string()),
        None => (None, text),
    };
    if trigger.is_empty() || precondition.as_deref() == Some("") {
        return Err(ParseError::EmptyClause(keyword));
    }
    Ok(Clause {
        keyword,
        precondition,
        trigger_or_condition: trigger,
    })
}

/// Finds the word `shall` as a whole word, case-insensitively.
fn find_shall(text: &str) -> Option<(usize, usize)> {
    let lower = text.to_ascii_lowercase();
    let bytes = lower.as_bytes();
    let mut from = 0;
    while let Some(pos) = lower[from..].find("shall") {
        let start = from + pos;
        let end = start + 5;
        let before_ok = start == 0 || !bytes[start - 1].is_ascii_alphanumeric();
        let after_ok = end == bytes.len() || !bytes[end].is_ascii_alphanumeric();
        if before_ok && after_ok {
            return Some((start, end));
        }
        from = end;
    }
    None
}

fn system_name(main: &[Tok]) -> Result<String, ParseError> {
    let main = trim_commas(main);
    match main {
        [first, rest @ ..] if is_word(first, "the") => {
            if rest.contains(&Tok::Comma) {
                return Err(ParseError::NoSystemName);
            }
            let name = join(rest);
            if name.is_empty() {
                Err(ParseError::NoSystemName)
            } else {
                Ok(name)
            }
        }
        _ => Err(ParseError::NoSystemName),
    }
}

pub fn parse(text: &str) -> Result<Requirement, ParseError> {
    let normalized = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if normalized.is_empty() {
        return Err(ParseError::Empty);
    }
    let (s, e) = find_shall(&normalized).ok_or(ParseError::NoShall)?;
    let prefix = &normalized[..s];
    let mut response = normalized[e..].trim().to_string();
    if response.ends_with('.') {
        response.pop();
        response = response.trim_end().to_string();
    }
    if response.is_empty() {
        return Err(ParseError::EmptyResponse);
    }

    let tokens = tokenize(prefix);
    let starts: Vec<(usize, Keyword)> = tokens
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let Tok::Word(w) = t else { return None };
            let kw = Keyword::parse(w)?;
            let at_start = i == 0 || tokens[i - 1] == Tok::Comma;
            at_start.then_some((i, kw))
        })
        .collect();

    let (clauses, system) = if starts.first().map(|(i, _)| *i) != Some(0) {
        (Vec::new(), system_name(&tokens)?)
    } else {
        let mut clauses = Vec::new();
        for (n, &(start, kw)) in starts.iter().enumerate() {
            let end = starts.get(n + 1).map(|(i, _)| *i).unwrap_or(tokens.len());
            let body = &tokens[start + 1..end];
            let last = n + 1 == starts.len();
            if kw == Keyword::If {
                let then_at = body.iter().position(|t| is_word(t, "then"));
                match (then_at, last) {
                    (Some(p), true) => {
                        clauses.push(make_clause(kw, &body[..p])?);
                        let system = system_name(&body[p + 1..])?;
                        return finish(text, clauses, system, response);
                    }
                    (Some(p), false) if trim_commas(&body[p + 1..]).is_empty() => {
                        clauses.push(make_clause(kw, &body[..p])?);
                    }
                    _ => return Err(ParseError::DanglingIf),
                }
            } else if last {
                let comma_the = (0..body.len().saturating_sub(1))
                    .rev()
                    .find(|&i| body[i] == Tok::Comma && is_word(&body[i + 1], "the"))
                    .map(|i| i + 1);
                let bare_the = (1..body.len()).rev().find(|&i| is_word(&body[i], "the"));
                let split = comma_the.or(bare_the).ok_or(ParseError::NoSystemName)?;
                clauses.push(make_clause(kw, &body[..split])?);
                let system = system_name(&body[split..])?;
                return finish(text, clauses, system, response);
            } else {
                clauses.push(make_clause(kw, body)?);
            }
        }
        unreachable!("the last clause always returns")
    };
    finish(text, clauses, system, response)
}

fn finish(
    raw: &str,
    clauses: Vec<Clause>,
    system: String,
    response: String,
) -> Result<Requirement, ParseError> {
    Ok(Requirement {
        id: String::new(),
        raw: raw.to_string(),
        template: classify(&clauses),
        clauses,
        system,
        response,
    })
}

/// Canonical text: title-cased keywords, clauses joined by commas, `If`
/// clauses closed by `then`, and a final full stop.
pub fn print(r: &Requirement) -> String {
    if r.clauses.is_empty() {
        return format!("The {} shall {}.", r.system, r.response);
    }
    let mut parts = Vec::new();
    for c in &r.clauses {
        let cond = match &c.precondition {
            Some(p) => format!("{} -- {}", p, c.trigger_or_condition),
            None => c.trigger_or_condition.clone(),
        };
        match c.keyword {
            Keyword::If => parts.push(format!("If {cond}, then")),
            kw => parts.push(format!("{kw} {cond}")),
        }
    }
    let last_if = r.clauses.last().map(|c| c.keyword) == Some(Keyword::If);
    let sep = if last_if { " " } else { ", " };
    format!(
        "{}{}the {} shall {}.",
        parts.join(", "),
        sep,
        r.system,
        r.response
    )
}

/// Parses `text` and records `id` on the result.
pub fn parse_with_id(id: &str, text: &str) -> Result<Requirement, ParseError> {
    let mut r = parse(text)?;
    r.id = id.to_string();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_robot_warning() {
        let r = parse(
            "While the robot is moving, when a person is present, the robot shall issue an audible warning",
        )
        .unwrap();
        assert_eq!(r.template, Template::Complex);
        assert_eq!(r.clauses.len(), 2);
        assert_eq!(r.clauses[0].keyword, Keyword::While);
        assert_eq!(r.clauses[0].trigger_or_condition, "the robot is moving");
        assert_eq!(r.clauses[1].keyword, Keyword::When);
        assert_eq!(r.clauses[1].trigger_or_condition, "a person is present");
        assert_eq!(r.system, "robot");
        assert_eq!(r.response, "issue an audible warning");
        assert_eq!(
            print(&r),
            "While the robot is moving, When a person is present, the robot shall issue an audible warning."
        );
    }

    #[test]
    fn ubiquitous_and_unwanted() {
        let r = parse("The pump shall log all infusion events").unwrap();
        assert_eq!(r.template, Template::Ubiquitous);
        assert!(r.clauses.is_empty());
        assert_eq!(print(&r), "The pump shall log all infusion events.");

        let r =
            parse("If the long range sensors fail, then the shuttle shall limit speed to 5 km/h")
                .unwrap();
        assert_eq!(r.template, Template::UnwantedBehaviour);
        assert_eq!(r.system, "shuttle");
        assert_eq!(
            r.clauses[0].trigger_or_condition,
            "the long range sensors fail"
        );
    }

    #[test]
    fn errors() {
        assert_eq!(parse("the robot stops"), Err(ParseError::NoShall));
        assert_eq!(parse("The shall stop"), Err(ParseError::NoSystemName));
        assert_eq!(parse("The robot shall."), Err(ParseError::EmptyResponse));
        assert_eq!(
            parse("If the door opens the robot shall stop"),
            Err(ParseError::DanglingIf)
        );
        assert_eq!(
            parse("When the door opens if a person is near, the robot shall stop"),
            Err(ParseError::DanglingIf)
        );
    }

    #[test]
    fn explicit_precondition() {
        let r = parse("When the robot is docked -- the charger faults, the robot shall disconnect")
            .unwrap();
        assert_eq!(
            r.clauses[0].precondition.as_deref(),
            Some("the robot is docked")
        );
        assert_eq!(r.clauses[0].trigger_or_condition, "the charger faults");
        assert!(parse(&print(&r)).unwrap().same_ast(&r));
    }

    #[test]
    fn clause_without_comma() {
        let r = parse("When a person is present the robot shall stop").unwrap();
        assert_eq!(r.template, Template::EventDriven);
        assert_eq!(r.system, "robot");
        assert!(parse(&print(&r)).unwrap().same_ast(&r));
    }
}
