//! Decoration and skeleton maps between plain and labelled proofs.
//!
//! Labelled rules over a semiring `K`: initial sequents carry `top`; unary
//! logical rules keep the premise label; a dereliction of price `a` turns
//! premise label `c` into `c * a`; `TensorR`/`LolliL` multiply the premise
//! labels; `WithR`/`PlusL` take their `glb`; `WeakLabel` moves from premise
//! label `a` to any conclusion label `b <= a`.

use crate::formula::check_extended;
use crate::proof::{check_node, retarget, LabelledProof, Proof, ProofError, ProofErrorKind, ProofTree};
use crate::rules::{dereliction_price, Calculus, RuleName};
use crate::semiring::{CostValue, Semiring};

fn node_label(node_rule: RuleName, price: Option<&CostValue>, premise_labels: &[&CostValue], k: &dyn Semiring) -> CostValue {
    match (node_rule, premise_labels) {
        (r, []) if r.is_initial() => k.top(),
        (r, [c]) if r.is_dereliction() => k.times(c, price.expect("dereliction without price")),
        (r, [a, b]) if r.is_multiplicative_branching() => k.times(a, b),
        (r, [a, b]) if r.is_additive_branching() => k.glb(a, b),
        (_, [c]) => (*c).clone(),
        (r, ls) => panic!("{r} with {} premises", ls.len()),
    }
}

/// Labels every node of a valid proof, propagating `top` from the leaves.
/// Never introduces `WeakLabel`.
pub fn decorate(pf: &Proof, k: &dyn Semiring) -> LabelledProof {
    let premises: Vec<LabelledProof> = pf.premises.iter().map(|p| decorate(p, k)).collect();
    let labels: Vec<&CostValue> = premises.iter().map(|p| &p.label).collect();
    let label = node_label(pf.rule, dereliction_price(&pf.conclusion, &pf.instance()), &labels, k);
    ProofTree {
        conclusion: pf.conclusion.clone(),
        label,
        rule: pf.rule,
        principal: pf.principal,
        split: pf.split,
        premises,
    }
}

/// The decoration's conclusion label: the least budget that suffices when
/// playing along `pf`.
pub fn cost_of(pf: &Proof, k: &dyn Semiring) -> CostValue {
    let labels: Vec<CostValue> = pf.premises.iter().map(|p| cost_of(p, k)).collect();
    let refs: Vec<&CostValue> = labels.iter().collect();
    node_label(pf.rule, dereliction_price(&pf.conclusion, &pf.instance()), &refs, k)
}

/// Erases labels and contracts `WeakLabel` nodes.
pub fn skeleton(lpf: &LabelledProof) -> Proof {
    if lpf.rule == RuleName::WeakLabel {
        if let [inner] = lpf.premises.as_slice() {
            return retarget(skeleton(inner), lpf.conclusion.clone());
        }
    }
    Proof {
        conclusion: lpf.conclusion.clone(),
        label: (),
        rule: lpf.rule,
        principal: lpf.principal,
        split: lpf.split,
        premises: lpf.premises.iter().map(skeleton).collect(),
    }
}

/// Verifies a labelled proof: the skeleton is rule-correct in the priced
/// calculus and every label follows the labelled rule arithmetic exactly.
pub fn check_labelled_proof(lpf: &LabelledProof, k: &dyn Semiring) -> Result<(), ProofError> {
    fn walk(node: &LabelledProof, k: &dyn Semiring, path: &mut Vec<usize>) -> Result<(), ProofError> {
        let err = |kind| ProofError { path: path.clone(), kind };
        if !k.contains(&node.label) {
            return Err(err(ProofErrorKind::LabelOutsideCarrier { label: node.label.to_string() }));
        }
        if !check_extended(&node.conclusion) {
            return Err(err(ProofErrorKind::NotExtended));
        }
        if node.rule == RuleName::WeakLabel {
            let [inner] = node.premises.as_slice() else {
                return Err(err(ProofErrorKind::Arity { rule: RuleName::WeakLabel, expected: 1, found: node.premises.len() }));
            };
            if !inner.conclusion.same_multiset(&node.conclusion) {
                return Err(err(ProofErrorKind::PremiseMismatch {
                    index: 0,
                    expected: node.conclusion.to_string(),
                    found: inner.conclusion.to_string(),
                }));
            }
            if node.principal.is_some() || node.split.is_some() {
                return Err(err(ProofErrorKind::Rule(crate::rules::RuleError::UnexpectedPrincipal { rule: RuleName::WeakLabel })));
            }
            if !k.leq(&node.label, &inner.label) {
                return Err(err(ProofErrorKind::WeakeningImproves { from: inner.label.to_string(), to: node.label.to_string() }));
            }
        } else {
            check_node(node, Calculus::Priced).map_err(err)?;
            let labels: Vec<&CostValue> = node.premises.iter().map(|p| &p.label).collect();
            let expected = node_label(node.rule, dereliction_price(&node.conclusion, &node.instance()), &labels, k);
            if expected != node.label {
                return Err(err(ProofErrorKind::LabelMismatch { expected: expected.to_string(), found: node.label.to_string() }));
            }
        }
        for (i, p) in node.premises.iter().enumerate() {
            path.push(i);
            walk(p, k, path)?;
            path.pop();
        }
        Ok(())
    }
    walk(lpf, k, &mut Vec::new())
}

/// Wraps `lpf` in a `WeakLabel` node so that its conclusion carries `label`.
/// Returns `lpf` unchanged when the label already matches, and `None` when
/// `label` would be better than what `lpf` proves.
pub fn weaken_to(lpf: LabelledProof, label: &CostValue, k: &dyn Semiring) -> Option<LabelledProof> {
    if lpf.label == *label {
        return Some(lpf);
    }
    if !k.leq(label, &lpf.label) {
        return None;
    }
    Some(ProofTree {
        conclusion: lpf.conclusion.clone(),
        label: label.clone(),
        rule: RuleName::WeakLabel,
        principal: None,
        split: None,
        premises: vec![lpf],
    })
}
