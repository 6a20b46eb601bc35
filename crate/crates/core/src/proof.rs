//! Proof trees and the rule-level checker.

use thiserror::Error;

use crate::formula::Sequent;
use crate::rules::{apply_rule, linear_positions, Calculus, RuleError, RuleInstance, RuleName};
use crate::semiring::CostValue;

/// A rule-application tree. `L` is `()` for plain proofs and [`CostValue`]
/// for labelled ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofTree<L> {
    pub conclusion: Sequent,
    pub label: L,
    pub rule: RuleName,
    pub principal: Option<usize>,
    pub split: Option<u64>,
    pub premises: Vec<ProofTree<L>>,
}

pub type Proof = ProofTree<()>;
pub type LabelledProof = ProofTree<CostValue>;

impl<L> ProofTree<L> {
    pub fn instance(&self) -> RuleInstance {
        RuleInstance::new(self.rule, self.principal, self.split)
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::height).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::node_count).sum::<usize>()
    }

    pub fn count_rule(&self, rule: RuleName) -> usize {
        usize::from(self.rule == rule) + self.premises.iter().map(|p| p.count_rule(rule)).sum::<usize>()
    }

    /// Node at a path of premise indices.
    pub fn at(&self, path: &[usize]) -> Option<&ProofTree<L>> {
        path.iter().try_fold(self, |node, &i| node.premises.get(i))
    }
}

impl Proof {
    pub fn leaf(conclusion: Sequent, rule: RuleName) -> Proof {
        Proof { conclusion, label: (), rule, principal: None, split: None, premises: vec![] }
    }

    pub fn node(conclusion: Sequent, inst: RuleInstance, premises: Vec<Proof>) -> Proof {
        Proof { conclusion, label: (), rule: inst.rule, principal: inst.principal, split: inst.split, premises }
    }
}

/// Rewrites `inst`, stated against `from`, for `to`, a permutation of the
/// same antecedent. Panics if the two differ as multisets.
pub(crate) fn remap_instance(inst: &RuleInstance, from: &Sequent, to: &Sequent) -> RuleInstance {
    if from.antecedent == to.antecedent {
        return inst.clone();
    }
    let perm = crate::formula::matching(&from.antecedent, &to.antecedent).expect("remapping to a different multiset");
    let principal = inst.principal.map(|i| perm[i]);
    let split = inst.split.map(|mask| {
        let exclude = |p: Option<usize>| if inst.rule == RuleName::LolliL { p } else { None };
        let old_linear = linear_positions(from, Calculus::Priced, exclude(inst.principal));
        let new_linear = linear_positions(to, Calculus::Priced, exclude(principal));
        let mut out = 0u64;
        for (bit, &i) in old_linear.iter().enumerate() {
            if mask & (1u64 << bit) != 0 {
                let nb = new_linear.iter().position(|&x| x == perm[i]).expect("linear occurrence lost");
                out |= 1u64 << nb;
            }
        }
        out
    });
    RuleInstance::new(inst.rule, principal, split)
}

/// Moves the root of `pf` to `conclusion`, which must equal the current
/// conclusion up to antecedent order.
pub(crate) fn retarget<L>(mut pf: ProofTree<L>, conclusion: Sequent) -> ProofTree<L> {
    let inst = remap_instance(&pf.instance(), &pf.conclusion, &conclusion);
    pf.principal = inst.principal;
    pf.split = inst.split;
    pf.conclusion = conclusion;
    pf
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofErrorKind {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("{rule} expects {expected} premises, found {found}")]
    Arity { rule: RuleName, expected: usize, found: usize },
    #[error("premise {index} proves `{found}` but the rule yields `{expected}`")]
    PremiseMismatch { index: usize, expected: String, found: String },
    #[error("conclusion is not an extended sequent")]
    NotExtended,
    #[error("label {label} is not an element of the semiring")]
    LabelOutsideCarrier { label: String },
    #[error("label {found} does not match the rule arithmetic, expected {expected}")]
    LabelMismatch { expected: String, found: String },
    #[error("weakening from {from} to {to} would improve the label")]
    WeakeningImproves { from: String, to: String },
}

/// First offending node, addressed by the premise indices leading to it.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid proof node at {}: {kind}", render_path(.path))]
pub struct ProofError {
    pub path: Vec<usize>,
    pub kind: ProofErrorKind,
}

fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(ToString::to_string).collect::<Vec<_>>().join(".")
    }
}

/// Checks a single node against its rule: arity and premise conclusions
/// (as multisets). Labels are ignored.
pub(crate) fn check_node<L>(node: &ProofTree<L>, calculus: Calculus) -> Result<(), ProofErrorKind> {
    let expected = node.rule.arity();
    if node.premises.len() != expected {
        return Err(ProofErrorKind::Arity { rule: node.rule, expected, found: node.premises.len() });
    }
    let premises = apply_rule(&node.conclusion, &node.instance(), calculus)?;
    for (index, (want, got)) in premises.iter().zip(&node.premises).enumerate() {
        if !want.sequent.same_multiset(&got.conclusion) {
            return Err(ProofErrorKind::PremiseMismatch {
                index,
                expected: want.sequent.to_string(),
                found: got.conclusion.to_string(),
            });
        }
    }
    Ok(())
}

/// Verifies that every node is a correct instance of its rule in `calculus`,
/// including the context split and the copying of the permanent context.
pub fn check_proof(pf: &Proof, calculus: Calculus) -> Result<(), ProofError> {
    fn walk(node: &Proof, calculus: Calculus, path: &mut Vec<usize>) -> Result<(), ProofError> {
        if calculus == Calculus::Priced && !crate::formula::check_extended(&node.conclusion) {
            return Err(ProofError { path: path.clone(), kind: ProofErrorKind::NotExtended });
        }
        check_node(node, calculus).map_err(|kind| ProofError { path: path.clone(), kind })?;
        for (i, p) in node.premises.iter().enumerate() {
            path.push(i);
            walk(p, calculus, path)?;
            path.pop();
        }
        Ok(())
    }
    walk(pf, calculus, &mut Vec::new())
}

pub fn is_valid(pf: &Proof, calculus: Calculus) -> bool {
    check_proof(pf, calculus).is_ok()
}
