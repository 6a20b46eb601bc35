//! Labelled transition systems and their encoding as sequents.
//!
//! File format, one directive per line, `#` starts a comment:
//!
//! ```text
//! states: t1 t2 t3
//! trans: t1 -> t2 : 1.5
//! trans: t2 -> t3 : 1
//! start: t1
//! end: t3
//! ```

use thiserror::Error;

use crate::formula::{Formula, Sequent};
use crate::semiring::{CostValue, Semiring, SemiringError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TsError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: undeclared state `{name}`")]
    UndeclaredState { line: usize, name: String },
    #[error("line {line}: {source}")]
    Label { line: usize, source: SemiringError },
    #[error("the `{0}` set must not be empty")]
    Empty(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: String,
    pub price: CostValue,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
    pub start: Vec<String>,
    pub end: Vec<String>,
}

fn is_state_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub fn parse_transition_system(text: &str, k: &dyn Semiring) -> Result<TransitionSystem, TsError> {
    let mut states: Vec<String> = Vec::new();
    let mut pending = Vec::new();
    let mut start = Vec::new();
    let mut end = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let malformed = |message: &str| TsError::Malformed { line, message: message.to_string() };
        let (key, rest) = content.split_once(':').ok_or_else(|| malformed("expected `key: value`"))?;
        let rest = rest.trim();
        match key.trim() {
            "states" => {
                for name in rest.split_whitespace() {
                    if !is_state_name(name) {
                        return Err(malformed(&format!("`{name}` is not a state name")));
                    }
                    if states.iter().any(|s| s == name) {
                        return Err(malformed(&format!("state `{name}` declared twice")));
                    }
                    states.push(name.to_string());
                }
            }
            "trans" => {
                let (arc, label) = rest.rsplit_once(':').ok_or_else(|| malformed("expected `from -> to : price`"))?;
                let (from, to) = arc.split_once("->").ok_or_else(|| malformed("expected `from -> to : price`"))?;
                let price = k.parse_literal(label.trim()).map_err(|source| TsError::Label { line, source })?;
                pending.push((line, Transition { from: from.trim().to_string(), price, to: to.trim().to_string() }));
            }
            "start" | "end" => {
                let names: Vec<(usize, String)> = rest.split_whitespace().map(|s| (line, s.to_string())).collect();
                if key.trim() == "start" {
                    start.extend(names);
                } else {
                    end.extend(names);
                }
            }
            other => return Err(malformed(&format!("unknown directive `{other}`"))),
        }
    }
    let declared = |line: usize, name: &str| {
        if states.iter().any(|s| s == name) {
            Ok(name.to_string())
        } else {
            Err(TsError::UndeclaredState { line, name: name.to_string() })
        }
    };
    let mut transitions = Vec::new();
    for (line, t) in pending {
        declared(line, &t.from)?;
        declared(line, &t.to)?;
        transitions.push(t);
    }
    let start = start.iter().map(|(l, s)| declared(*l, s)).collect::<Result<Vec<_>, _>>()?;
    let end = end.iter().map(|(l, s)| declared(*l, s)).collect::<Result<Vec<_>, _>>()?;
    if start.is_empty() {
        return Err(TsError::Empty("start"));
    }
    if end.is_empty() {
        return Err(TsError::Empty("end"));
    }
    Ok(TransitionSystem { states, transitions, start, end })
}

impl TransitionSystem {
    /// `members` in the order of the `states:` declaration, duplicates dropped.
    fn ordered(&self, members: &[String]) -> Vec<&String> {
        self.states.iter().filter(|s| members.contains(s)).collect()
    }

    /// Renders the system back to the file format.
    pub fn render(&self) -> String {
        let mut out = format!("states: {}\n", self.states.join(" "));
        for t in &self.transitions {
            out.push_str(&format!("trans: {} -> {} : {}\n", t.from, t.to, t.price));
        }
        out.push_str(&format!("start: {}\nend: {}\n", self.start.join(" "), self.end.join(" ")));
        out
    }
}

fn disjunction(names: &[&String]) -> Formula {
    let (last, init) = names.split_last().expect("nonempty state set");
    init.iter().rev().fold(Formula::atom(last.as_str()), |acc, n| Formula::plus(Formula::atom(n.as_str()), acc))
}

/// `!p[a](s -o t)` for every transition `s -> t : a`, then the disjunction of
/// the start states, proving the disjunction of the end states. Disjunctions
/// nest to the right in declaration order. The least label of a proof is the
/// worst case, over start states, of the cheapest path into the end set.
pub fn encode_ts(ts: &TransitionSystem) -> Sequent {
    let mut ante: Vec<Formula> = ts
        .transitions
        .iter()
        .map(|t| Formula::permanent(t.price.clone(), Formula::lolli(Formula::atom(t.from.as_str()), Formula::atom(t.to.as_str()))))
        .collect();
    ante.push(disjunction(&ts.ordered(&ts.start)));
    Sequent::new(ante, disjunction(&ts.ordered(&ts.end)))
}
