//! JSON proof files.
//!
//! ```json
//! { "semiring": "cost",
//!   "sequent": "!p[2]p |- p",
//!   "proof": { "rule": "BangPermL", "principal": 0, "label": "2",
//!              "premises": [ { "rule": "Ax", "label": "0" } ] } }
//! ```
//!
//! Only the root sequent is stored. Every premise is the corresponding
//! premise of its parent's rule, with the antecedent in the order that
//! [`apply_rule`] produces, so indices in a node refer to that order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Sequent;
use crate::proof::{remap_instance, LabelledProof, Proof, ProofTree};
use crate::rules::{apply_rule, Calculus, RuleError, RuleInstance, RuleName};
use crate::semiring::{builtin, CostValue, Semiring, SemiringError};
use crate::syntax::{parse_sequent_plain, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Node {
    rule: RuleName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    principal: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<CostValue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Document {
    semiring: String,
    sequent: String,
    proof: Node,
}

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("malformed proof file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error("root sequent: {0}")]
    Sequent(#[from] ParseError),
    #[error("node {path}: {source}")]
    Rule { path: String, source: RuleError },
    #[error("node {path}: {rule} takes {expected} premises, the file gives {found}")]
    Arity { path: String, rule: RuleName, expected: usize, found: usize },
    #[error("node {0}: labels must be given on every node or on none")]
    PartialLabels(String),
    #[error("node {path}: label {label} is not an element of the {semiring} semiring")]
    Label { path: String, label: String, semiring: String },
}

/// A proof read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofFile {
    Plain { semiring: String, proof: Proof },
    Labelled { semiring: String, proof: LabelledProof },
}

fn premise_sequents(s: &Sequent, inst: &RuleInstance) -> Result<Vec<Sequent>, RuleError> {
    if inst.rule == RuleName::WeakLabel {
        return Ok(vec![s.clone()]);
    }
    Ok(apply_rule(s, inst, Calculus::Priced)?.into_iter().map(|p| p.sequent).collect())
}

fn to_node<L>(pf: &ProofTree<L>, conclusion: &Sequent, label: &impl Fn(&L) -> Option<CostValue>) -> Node {
    let inst = if pf.rule == RuleName::WeakLabel {
        pf.instance()
    } else {
        remap_instance(&pf.instance(), &pf.conclusion, conclusion)
    };
    let expected = premise_sequents(conclusion, &inst).expect("serialising a valid proof");
    Node {
        rule: inst.rule,
        principal: inst.principal,
        split: inst.split,
        label: label(&pf.label),
        premises: pf.premises.iter().zip(&expected).map(|(p, s)| to_node(p, s, label)).collect(),
    }
}

pub fn write_proof(pf: &Proof, semiring: &str) -> String {
    let doc = Document { semiring: semiring.to_string(), sequent: pf.conclusion.to_string(), proof: to_node(pf, &pf.conclusion, &|_| None) };
    serde_json::to_string_pretty(&doc).expect("proof documents serialise")
}

pub fn write_labelled_proof(lpf: &LabelledProof, semiring: &str) -> String {
    let doc = Document {
        semiring: semiring.to_string(),
        sequent: lpf.conclusion.to_string(),
        proof: to_node(lpf, &lpf.conclusion, &|l: &CostValue| Some(l.clone())),
    };
    serde_json::to_string_pretty(&doc).expect("proof documents serialise")
}

fn from_node(node: &Node, conclusion: Sequent, path: &mut Vec<usize>) -> Result<ProofTree<Option<CostValue>>, SerialError> {
    let render = |path: &[usize]| if path.is_empty() { "root".to_string() } else { path.iter().map(ToString::to_string).collect::<Vec<_>>().join(".") };
    let inst = RuleInstance::new(node.rule, node.principal, node.split);
    let expected = premise_sequents(&conclusion, &inst).map_err(|source| SerialError::Rule { path: render(path), source })?;
    if expected.len() != node.premises.len() {
        return Err(SerialError::Arity { path: render(path), rule: node.rule, expected: expected.len(), found: node.premises.len() });
    }
    let mut premises = Vec::new();
    for (i, (child, s)) in node.premises.iter().zip(expected).enumerate() {
        path.push(i);
        premises.push(from_node(child, s, path)?);
        path.pop();
    }
    Ok(ProofTree { conclusion, label: node.label.clone(), rule: node.rule, principal: node.principal, split: node.split, premises })
}

fn all_labelled(t: &ProofTree<Option<CostValue>>) -> Option<bool> {
    let mine = t.label.is_some();
    t.premises.iter().try_fold(mine, |acc, p| (all_labelled(p)? == acc).then_some(acc))
}

fn strip(t: ProofTree<Option<CostValue>>) -> Proof {
    ProofTree { conclusion: t.conclusion, label: (), rule: t.rule, principal: t.principal, split: t.split, premises: t.premises.into_iter().map(strip).collect() }
}

fn unwrap_labels(t: ProofTree<Option<CostValue>>) -> LabelledProof {
    ProofTree {
        conclusion: t.conclusion,
        label: t.label.expect("checked"),
        rule: t.rule,
        principal: t.principal,
        split: t.split,
        premises: t.premises.into_iter().map(unwrap_labels).collect(),
    }
}

/// Reads a proof file. Rule correctness beyond premise shapes is left to
/// [`crate::check_proof`] and [`crate::check_labelled_proof`].
pub fn read_proof(text: &str) -> Result<ProofFile, SerialError> {
    let doc: Document = serde_json::from_str(text)?;
    let k = builtin(&doc.semiring)?;
    let root = parse_sequent_plain(&doc.sequent, &k)?;
    let tree = from_node(&doc.proof, root, &mut Vec::new())?;
    match all_labelled(&tree) {
        None => Err(SerialError::PartialLabels("root".into())),
        Some(false) => Ok(ProofFile::Plain { semiring: doc.semiring, proof: strip(tree) }),
        Some(true) => {
            let lpf = unwrap_labels(tree);
            let mut bad = None;
            visit(&lpf, &mut |n| {
                if bad.is_none() && !k.contains(&n.label) {
                    bad = Some(n.label.to_string());
                }
            });
            if let Some(label) = bad {
                return Err(SerialError::Label { path: "?".into(), label, semiring: doc.semiring });
            }
            Ok(ProofFile::Labelled { semiring: doc.semiring, proof: lpf })
        }
    }
}

fn visit<L>(t: &ProofTree<L>, f: &mut impl FnMut(&ProofTree<L>)) {
    f(t);
    for p in &t.premises {
        visit(p, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::LabelledSequent;
    use crate::labelled::{check_labelled_proof, decorate};
    use crate::proof::check_proof;
    use crate::prover::{prove_labelled, min_cost, SearchLimits};
    use crate::semiring::Builtin;

    fn riddle() -> Proof {
        let s = parse_sequent_plain("!p[1](w + b) |- (w*w)+(b*b)", &Builtin::Cost).unwrap();
        min_cost(&s, &Builtin::Cost, SearchLimits::default()).unwrap().proof().unwrap().proof.clone()
    }

    #[test]
    fn plain_round_trip_revalidates() {
        let pf = riddle();
        let text = write_proof(&pf, "cost");
        let ProofFile::Plain { semiring, proof } = read_proof(&text).unwrap() else { panic!("expected a plain proof") };
        assert_eq!(semiring, "cost");
        check_proof(&proof, Calculus::Priced).unwrap();
        assert_eq!(proof.conclusion, pf.conclusion);
        assert_eq!(proof.node_count(), pf.node_count());
        assert_eq!(write_proof(&proof, "cost"), text);
    }

    #[test]
    fn labelled_round_trip_keeps_weakening() {
        let s = parse_sequent_plain("!p[1](w + b) |- (w*w)+(b*b)", &Builtin::Cost).unwrap();
        let lpf = prove_labelled(&LabelledSequent::new(s, CostValue::lit("4.5")), &Builtin::Cost, SearchLimits::default()).unwrap();
        let lpf = lpf.proof().unwrap();
        let ProofFile::Labelled { proof, .. } = read_proof(&write_labelled_proof(lpf, "cost")).unwrap() else { panic!() };
        check_labelled_proof(&proof, &Builtin::Cost).unwrap();
        assert_eq!(proof.rule, RuleName::WeakLabel);
        assert_eq!(proof.label, CostValue::lit("4.5"));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(read_proof("{"), Err(SerialError::Json(_))));
        let doc = r#"{"semiring":"cost","sequent":"p |- p","proof":{"rule":"TensorR","split":0}}"#;
        assert!(matches!(read_proof(doc), Err(SerialError::Rule { .. })));
        let doc = r#"{"semiring":"cost","sequent":"p & q |- p","proof":{"rule":"WithL1","principal":0}}"#;
        assert!(matches!(read_proof(doc), Err(SerialError::Arity { .. })));
        let doc = r#"{"semiring":"cost","sequent":"p & q |- p","proof":{"rule":"WithL1","principal":0,"label":"0","premises":[{"rule":"Ax"}]}}"#;
        assert!(matches!(read_proof(doc), Err(SerialError::PartialLabels(_))));
        let doc = r#"{"semiring":"prob","sequent":"p |- p","proof":{"rule":"Ax","label":"2"}}"#;
        assert!(matches!(read_proof(doc), Err(SerialError::Label { .. })));
    }

    #[test]
    fn decorated_proofs_round_trip() {
        let pf = riddle();
        let d = decorate(&pf, &Builtin::Cost);
        let ProofFile::Labelled { proof, .. } = read_proof(&write_labelled_proof(&d, "cost")).unwrap() else { panic!() };
        assert_eq!(proof.label, CostValue::lit("3"));
        check_labelled_proof(&proof, &Builtin::Cost).unwrap();
    }
}
