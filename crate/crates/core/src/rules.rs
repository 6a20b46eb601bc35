//! Rule instances of the two calculi and their premises.
//!
//! Every consumer of the rules (checker, prover, game, cut elimination) goes
//! through [`apply_rule`], so the premises of an instance are defined in one
//! place. Premise antecedents come back in canonical (sorted) order together
//! with the conclusion position each formula was copied from.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, ModalKind, Sequent};
use crate::semiring::CostValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleName {
    Ax,
    OneR,
    ZeroL,
    TensorL,
    TensorR,
    LolliL,
    LolliR,
    WithL1,
    WithL2,
    WithR,
    PlusL,
    PlusR1,
    PlusR2,
    BangPermL,
    BangSingleL,
    WeakLabel,
}

impl RuleName {
    pub const ALL: [RuleName; 16] = [
        RuleName::Ax,
        RuleName::OneR,
        RuleName::ZeroL,
        RuleName::TensorL,
        RuleName::TensorR,
        RuleName::LolliL,
        RuleName::LolliR,
        RuleName::WithL1,
        RuleName::WithL2,
        RuleName::WithR,
        RuleName::PlusL,
        RuleName::PlusR1,
        RuleName::PlusR2,
        RuleName::BangPermL,
        RuleName::BangSingleL,
        RuleName::WeakLabel,
    ];

    pub fn arity(self) -> usize {
        match self {
            RuleName::Ax | RuleName::OneR | RuleName::ZeroL => 0,
            RuleName::TensorR | RuleName::LolliL | RuleName::WithR | RuleName::PlusL => 2,
            _ => 1,
        }
    }

    pub fn is_initial(self) -> bool {
        self.arity() == 0
    }

    pub fn is_dereliction(self) -> bool {
        matches!(self, RuleName::BangPermL | RuleName::BangSingleL)
    }

    /// Binary rules whose premises share the context (II chooses in the game).
    pub fn is_additive_branching(self) -> bool {
        matches!(self, RuleName::WithR | RuleName::PlusL)
    }

    /// Binary rules that split the linear context (parallel subgames).
    pub fn is_multiplicative_branching(self) -> bool {
        matches!(self, RuleName::TensorR | RuleName::LolliL)
    }

    pub fn needs_split(self) -> bool {
        self.is_multiplicative_branching()
    }

    /// Rules acting on an antecedent occurrence.
    pub fn has_principal(self) -> bool {
        matches!(
            self,
            RuleName::TensorL
                | RuleName::LolliL
                | RuleName::WithL1
                | RuleName::WithL2
                | RuleName::PlusL
                | RuleName::BangPermL
                | RuleName::BangSingleL
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::Ax => "Ax",
            RuleName::OneR => "OneR",
            RuleName::ZeroL => "ZeroL",
            RuleName::TensorL => "TensorL",
            RuleName::TensorR => "TensorR",
            RuleName::LolliL => "LolliL",
            RuleName::LolliR => "LolliR",
            RuleName::WithL1 => "WithL1",
            RuleName::WithL2 => "WithL2",
            RuleName::WithR => "WithR",
            RuleName::PlusL => "PlusL",
            RuleName::PlusR1 => "PlusR1",
            RuleName::PlusR2 => "PlusR2",
            RuleName::BangPermL => "BangPermL",
            RuleName::BangSingleL => "BangSingleL",
            RuleName::WeakLabel => "WeakLabel",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleName::ALL.into_iter().find(|r| r.as_str() == s).ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// `Plain` has no modalities; `Priced` adds derelictions and copies the
/// permanent context to both premises of the splitting rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Calculus {
    Plain,
    Priced,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RuleInstance {
    pub rule: RuleName,
    pub principal: Option<usize>,
    /// Bit `i` set: linear occurrence `i` goes to the left premise.
    pub split: Option<u64>,
}

impl RuleInstance {
    pub fn new(rule: RuleName, principal: Option<usize>, split: Option<u64>) -> RuleInstance {
        RuleInstance { rule, principal, split }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub sequent: Sequent,
    /// For each antecedent position of the premise, the conclusion position it
    /// was copied from; `None` for formulas created by the rule.
    pub origin: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{rule} needs a principal formula")]
    MissingPrincipal { rule: RuleName },
    #[error("{rule} takes no principal formula")]
    UnexpectedPrincipal { rule: RuleName },
    #[error("principal index {index} out of range for an antecedent of {len}")]
    PrincipalOutOfRange { index: usize, len: usize },
    #[error("{rule} does not apply to `{found}`")]
    WrongShape { rule: RuleName, found: String },
    #[error("{rule} needs a split of the linear context")]
    MissingSplit { rule: RuleName },
    #[error("{rule} takes no split")]
    UnexpectedSplit { rule: RuleName },
    #[error("split mask {mask:#x} addresses more than {linear} linear occurrences")]
    SplitOutOfRange { mask: u64, linear: usize },
    #[error("too many linear occurrences ({0}) for a split mask")]
    SplitTooWide(usize),
    #[error("modal formula in the plain calculus")]
    ModalInPlainCalculus,
    #[error("WeakLabel only occurs in labelled proofs")]
    WeakLabelUnlabelled,
}

/// Returns the initial rule `s` is an instance of: `Ax` for `G, p |- p` with
/// `p` atomic, `ZeroL` for `G, 0 |- A`, `OneR` for `G |- 1`.
pub fn classify_initial(s: &Sequent) -> Option<RuleName> {
    if s.consequent.is_atom() && s.antecedent.contains(&s.consequent) {
        Some(RuleName::Ax)
    } else if s.antecedent.contains(&Formula::Zero) {
        Some(RuleName::ZeroL)
    } else if s.consequent == Formula::One {
        Some(RuleName::OneR)
    } else {
        None
    }
}

/// Splits a context into its top-level permanent formulas and the rest.
pub fn permanent_split(context: &[Formula]) -> (Vec<Formula>, Vec<Formula>) {
    context.iter().cloned().partition(Formula::is_permanent)
}

/// Antecedent positions addressed by split masks: the non-permanent
/// occurrences, minus the principal formula of `LolliL`.
pub fn linear_positions(s: &Sequent, calculus: Calculus, exclude: Option<usize>) -> Vec<usize> {
    s.antecedent
        .iter()
        .enumerate()
        .filter(|(i, f)| Some(*i) != exclude && !(calculus == Calculus::Priced && f.is_permanent()))
        .map(|(i, _)| i)
        .collect()
}

const MAX_SPLIT_WIDTH: usize = 63;

/// All non-initial rule instances whose conclusion is `s`, in search order:
/// invertible unary rules, unary choice points, branching rules, derelictions.
/// Within a rule, leftmost principal first.
pub fn rule_instances(s: &Sequent, calculus: Calculus) -> Vec<RuleInstance> {
    instances(s, calculus, all_masks)
}

/// Like [`rule_instances`], but with one split per way of dividing the
/// linear context as a multiset: among identical occurrences only how many
/// go left matters.
pub fn distinct_rule_instances(s: &Sequent, calculus: Calculus) -> Vec<RuleInstance> {
    instances(s, calculus, multiset_masks)
}

fn all_masks(_: &Sequent, positions: &[usize]) -> Vec<u64> {
    if positions.len() > MAX_SPLIT_WIDTH {
        return Vec::new();
    }
    (0..(1u64 << positions.len())).collect()
}

fn multiset_masks(s: &Sequent, positions: &[usize]) -> Vec<u64> {
    if positions.len() > MAX_SPLIT_WIDTH {
        return Vec::new();
    }
    // Bits of each group of identical occurrences, in position order.
    let mut groups: Vec<(&Formula, Vec<u64>)> = Vec::new();
    for (bit, &i) in positions.iter().enumerate() {
        let f = &s.antecedent[i];
        match groups.iter_mut().find(|(g, _)| *g == f) {
            Some((_, bits)) => bits.push(1 << bit),
            None => groups.push((f, vec![1 << bit])),
        }
    }
    let mut masks = vec![0u64];
    for (_, bits) in &groups {
        let prefixes: Vec<u64> = (0..=bits.len()).map(|j| bits[..j].iter().sum()).collect();
        masks = masks.iter().flat_map(|m| prefixes.iter().map(move |p| m | p)).collect();
    }
    masks
}

fn instances(s: &Sequent, calculus: Calculus, masks: fn(&Sequent, &[usize]) -> Vec<u64>) -> Vec<RuleInstance> {
    let ante = &s.antecedent;
    let mut out = Vec::new();
    let each = |pred: fn(&Formula) -> bool| -> Vec<usize> {
        ante.iter().enumerate().filter(|(_, f)| pred(f)).map(|(i, _)| i).collect()
    };
    let priced = calculus == Calculus::Priced;

    for i in each(|f| matches!(f, Formula::Tensor(..))) {
        out.push(RuleInstance::new(RuleName::TensorL, Some(i), None));
    }
    if matches!(s.consequent, Formula::Lolli(..)) {
        out.push(RuleInstance::new(RuleName::LolliR, None, None));
    }
    for i in each(|f| matches!(f, Formula::With(..))) {
        out.push(RuleInstance::new(RuleName::WithL1, Some(i), None));
        out.push(RuleInstance::new(RuleName::WithL2, Some(i), None));
    }
    if matches!(s.consequent, Formula::Plus(..)) {
        out.push(RuleInstance::new(RuleName::PlusR1, None, None));
        out.push(RuleInstance::new(RuleName::PlusR2, None, None));
    }
    if matches!(s.consequent, Formula::With(..)) {
        out.push(RuleInstance::new(RuleName::WithR, None, None));
    }
    for i in each(|f| matches!(f, Formula::Plus(..))) {
        out.push(RuleInstance::new(RuleName::PlusL, Some(i), None));
    }
    if matches!(s.consequent, Formula::Tensor(..)) {
        for mask in masks(s, &linear_positions(s, calculus, None)) {
            out.push(RuleInstance::new(RuleName::TensorR, None, Some(mask)));
        }
    }
    for i in each(|f| matches!(f, Formula::Lolli(..))) {
        for mask in masks(s, &linear_positions(s, calculus, Some(i))) {
            out.push(RuleInstance::new(RuleName::LolliL, Some(i), Some(mask)));
        }
    }
    if priced {
        for i in each(|f| matches!(f, Formula::Modal { kind: ModalKind::SingleUse, .. })) {
            out.push(RuleInstance::new(RuleName::BangSingleL, Some(i), None));
        }
        for i in each(Formula::is_permanent) {
            out.push(RuleInstance::new(RuleName::BangPermL, Some(i), None));
        }
    }
    out
}

/// The price paid by a dereliction instance, `None` for other rules.
pub fn dereliction_price<'a>(s: &'a Sequent, inst: &RuleInstance) -> Option<&'a CostValue> {
    if !inst.rule.is_dereliction() {
        return None;
    }
    match s.antecedent.get(inst.principal?)? {
        Formula::Modal { price, .. } => Some(price),
        _ => None,
    }
}

fn finish(entries: Vec<(Formula, Option<usize>)>, consequent: Formula) -> Premise {
    let mut entries = entries;
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let (antecedent, origin) = entries.into_iter().unzip();
    Premise { sequent: Sequent { antecedent, consequent }, origin }
}

fn keep_except(s: &Sequent, skip: Option<usize>) -> Vec<(Formula, Option<usize>)> {
    s.antecedent
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(i, f)| (f.clone(), Some(i)))
        .collect()
}

/// Formulas tagged with their position in the conclusion, if any.
type Tagged = Vec<(Formula, Option<usize>)>;

fn split_context(
    s: &Sequent,
    calculus: Calculus,
    exclude: Option<usize>,
    mask: u64,
) -> Result<(Tagged, Tagged), RuleError> {
    let linear = linear_positions(s, calculus, exclude);
    if linear.len() > 64 {
        return Err(RuleError::SplitTooWide(linear.len()));
    }
    if linear.len() < 64 && mask >> linear.len() != 0 {
        return Err(RuleError::SplitOutOfRange { mask, linear: linear.len() });
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (i, f) in s.antecedent.iter().enumerate() {
        if Some(i) == exclude {
            continue;
        }
        match linear.iter().position(|&j| j == i) {
            Some(bit) if mask & (1u64 << bit) != 0 => left.push((f.clone(), Some(i))),
            Some(_) => right.push((f.clone(), Some(i))),
            None => {
                // Permanent context is copied to both premises.
                left.push((f.clone(), Some(i)));
                right.push((f.clone(), Some(i)));
            }
        }
    }
    Ok((left, right))
}

/// Premises of `inst` applied to conclusion `s`. Initial rules yield no
/// premises but still check that `s` has the right shape.
pub fn apply_rule(s: &Sequent, inst: &RuleInstance, calculus: Calculus) -> Result<Vec<Premise>, RuleError> {
    let rule = inst.rule;
    if rule == RuleName::WeakLabel {
        return Err(RuleError::WeakLabelUnlabelled);
    }
    if calculus == Calculus::Plain && (rule.is_dereliction() || s.has_modality()) {
        return Err(RuleError::ModalInPlainCalculus);
    }
    let principal = match (rule.has_principal(), inst.principal) {
        (true, None) => return Err(RuleError::MissingPrincipal { rule }),
        (false, Some(_)) => return Err(RuleError::UnexpectedPrincipal { rule }),
        (true, Some(i)) if i >= s.antecedent.len() => {
            return Err(RuleError::PrincipalOutOfRange { index: i, len: s.antecedent.len() })
        }
        (_, p) => p,
    };
    match (rule.needs_split(), inst.split) {
        (true, None) => return Err(RuleError::MissingSplit { rule }),
        (false, Some(_)) => return Err(RuleError::UnexpectedSplit { rule }),
        _ => {}
    }
    let wrong = |f: &Formula| RuleError::WrongShape { rule, found: format!("{f}") };
    let cons = &s.consequent;
    let left_formula = principal.map(|i| &s.antecedent[i]);

    let premises = match rule {
        RuleName::Ax => {
            if classify_initial(s) == Some(RuleName::Ax) {
                vec![]
            } else {
                return Err(wrong(cons));
            }
        }
        RuleName::ZeroL => {
            if s.antecedent.contains(&Formula::Zero) {
                vec![]
            } else {
                return Err(RuleError::WrongShape { rule, found: format!("{s}") });
            }
        }
        RuleName::OneR => {
            if *cons == Formula::One {
                vec![]
            } else {
                return Err(wrong(cons));
            }
        }
        RuleName::TensorL => match left_formula.unwrap() {
            Formula::Tensor(a, b) => {
                let mut ctx = keep_except(s, principal);
                ctx.push(((**a).clone(), None));
                ctx.push(((**b).clone(), None));
                vec![finish(ctx, cons.clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::LolliR => match cons {
            Formula::Lolli(a, b) => {
                let mut ctx = keep_except(s, None);
                ctx.push(((**a).clone(), None));
                vec![finish(ctx, (**b).clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::WithL1 | RuleName::WithL2 => match left_formula.unwrap() {
            Formula::With(a, b) => {
                let chosen = if rule == RuleName::WithL1 { a } else { b };
                let mut ctx = keep_except(s, principal);
                ctx.push(((**chosen).clone(), None));
                vec![finish(ctx, cons.clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::PlusR1 | RuleName::PlusR2 => match cons {
            Formula::Plus(a, b) => {
                let chosen = if rule == RuleName::PlusR1 { a } else { b };
                vec![finish(keep_except(s, None), (**chosen).clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::WithR => match cons {
            Formula::With(a, b) => {
                vec![finish(keep_except(s, None), (**a).clone()), finish(keep_except(s, None), (**b).clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::PlusL => match left_formula.unwrap() {
            Formula::Plus(a, b) => {
                let mut left = keep_except(s, principal);
                let mut right = left.clone();
                left.push(((**a).clone(), None));
                right.push(((**b).clone(), None));
                vec![finish(left, cons.clone()), finish(right, cons.clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::TensorR => match cons {
            Formula::Tensor(a, b) => {
                let (left, right) = split_context(s, calculus, None, inst.split.unwrap())?;
                vec![finish(left, (**a).clone()), finish(right, (**b).clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::LolliL => match left_formula.unwrap() {
            Formula::Lolli(a, b) => {
                let (left, mut right) = split_context(s, calculus, principal, inst.split.unwrap())?;
                right.push(((**b).clone(), None));
                vec![finish(left, (**a).clone()), finish(right, cons.clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::BangPermL => match left_formula.unwrap() {
            Formula::Modal { kind: ModalKind::Permanent, body, .. } => {
                let mut ctx = keep_except(s, None);
                ctx.push(((**body).clone(), None));
                vec![finish(ctx, cons.clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::BangSingleL => match left_formula.unwrap() {
            Formula::Modal { kind: ModalKind::SingleUse, body, .. } => {
                let mut ctx = keep_except(s, principal);
                ctx.push(((**body).clone(), None));
                vec![finish(ctx, cons.clone())]
            }
            f => return Err(wrong(f)),
        },
        RuleName::WeakLabel => unreachable!(),
    };
    Ok(premises)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_sequent_plain};
    use crate::semiring::Builtin;

    fn seq(s: &str) -> Sequent {
        parse_sequent_plain(s, &Builtin::Cost).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &Builtin::Cost).unwrap()
    }

    fn premises(s: &str, rule: RuleName, principal: Option<usize>, split: Option<u64>) -> Vec<Sequent> {
        apply_rule(&seq(s), &RuleInstance::new(rule, principal, split), Calculus::Priced)
            .unwrap()
            .into_iter()
            .map(|p| p.sequent)
            .collect()
    }

    fn same(actual: &[Sequent], expected: &[&str]) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.iter().zip(expected) {
            assert!(a.same_multiset(&seq(e)), "{a} vs {e}");
        }
    }

    #[test]
    fn classify_initial_examples() {
        assert_eq!(classify_initial(&seq("q, p |- p")), Some(RuleName::Ax));
        assert_eq!(classify_initial(&seq("q, 0 |- p * p")), Some(RuleName::ZeroL));
        assert_eq!(classify_initial(&seq("p * q |- p * q")), None);
        assert_eq!(classify_initial(&seq("p |- 1")), Some(RuleName::OneR));
        assert_eq!(classify_initial(&seq("p * q |- p")), None);
    }

    #[test]
    fn permanent_split_examples() {
        let (perm, lin) = permanent_split(&[f("!p[1]p"), f("!s[3]q")]);
        assert_eq!((perm, lin), (vec![f("!p[1]p")], vec![f("!s[3]q")]));
        assert_eq!(permanent_split(&[]), (vec![], vec![]));
        let (perm, lin) = permanent_split(&[f("p"), f("!p[2]p"), f("!p[2]p")]);
        assert_eq!(perm, vec![f("!p[2]p"), f("!p[2]p")]);
        assert_eq!(lin, vec![f("p")]);
    }

    #[test]
    fn unary_rules() {
        same(&premises("a * b, c |- d", RuleName::TensorL, Some(0), None), &["a, b, c |- d"]);
        same(&premises("c |- a -o b", RuleName::LolliR, None, None), &["c, a |- b"]);
        same(&premises("a & b |- d", RuleName::WithL2, Some(0), None), &["b |- d"]);
        same(&premises("c |- a + b", RuleName::PlusR1, None, None), &["c |- a"]);
        same(&premises("!p[1]a |- d", RuleName::BangPermL, Some(0), None), &["!p[1]a, a |- d"]);
        same(&premises("!s[1]a |- d", RuleName::BangSingleL, Some(0), None), &["a |- d"]);
    }

    #[test]
    fn additive_rules_share_context() {
        same(&premises("c |- a & b", RuleName::WithR, None, None), &["c |- a", "c |- b"]);
        same(&premises("a + b, c |- d", RuleName::PlusL, Some(0), None), &["a, c |- d", "b, c |- d"]);
    }

    #[test]
    fn multiplicative_rules_copy_permanents() {
        // Linear occurrences: x (bit 0), y (bit 1).
        same(&premises("x, !p[1]z, y |- a * b", RuleName::TensorR, None, Some(0b01)), &[
            "x, !p[1]z |- a",
            "!p[1]z, y |- b",
        ]);
        // LolliL principal at 1; linear occurrences x (bit 0), y (bit 1).
        same(&premises("x, a -o b, y, !p[2]z |- c", RuleName::LolliL, Some(1), Some(0b10)), &[
            "y, !p[2]z |- a",
            "x, b, !p[2]z |- c",
        ]);
    }

    #[test]
    fn plain_calculus_copies_nothing_special() {
        let s = seq("x, y |- a * b");
        let ps = apply_rule(&s, &RuleInstance::new(RuleName::TensorR, None, Some(0b10)), Calculus::Plain).unwrap();
        assert!(ps[0].sequent.same_multiset(&seq("y |- a")));
        let modal = seq("!p[1]x |- x");
        assert_eq!(
            apply_rule(&modal, &RuleInstance::new(RuleName::BangPermL, Some(0), None), Calculus::Plain),
            Err(RuleError::ModalInPlainCalculus)
        );
    }

    #[test]
    fn origins_track_copied_occurrences() {
        let s = seq("x, !p[1]z |- a -o b");
        let ps = apply_rule(&s, &RuleInstance::new(RuleName::LolliR, None, None), Calculus::Priced).unwrap();
        let p = &ps[0];
        for (f, o) in p.sequent.antecedent.iter().zip(&p.origin) {
            match o {
                Some(i) => assert_eq!(&s.antecedent[*i], f),
                None => assert_eq!(f, &Formula::atom("a")),
            }
        }
    }

    #[test]
    fn malformed_instances_are_rejected() {
        let s = seq("x |- a * b");
        let err = |inst| apply_rule(&s, &inst, Calculus::Priced).unwrap_err();
        assert!(matches!(err(RuleInstance::new(RuleName::TensorR, None, None)), RuleError::MissingSplit { .. }));
        assert!(matches!(err(RuleInstance::new(RuleName::TensorR, None, Some(0b10))), RuleError::SplitOutOfRange { .. }));
        assert!(matches!(err(RuleInstance::new(RuleName::TensorL, Some(0), None)), RuleError::WrongShape { .. }));
        assert!(matches!(err(RuleInstance::new(RuleName::TensorL, Some(4), None)), RuleError::PrincipalOutOfRange { .. }));
        assert!(matches!(err(RuleInstance::new(RuleName::Ax, None, None)), RuleError::WrongShape { .. }));
    }

    #[test]
    fn instances_cover_all_splits() {
        let s = seq("x, y, !p[1]z |- a * b");
        let n = rule_instances(&s, Calculus::Priced).iter().filter(|i| i.rule == RuleName::TensorR).count();
        assert_eq!(n, 4);
        let insts = rule_instances(&s, Calculus::Priced);
        assert_eq!(insts.last().unwrap().rule, RuleName::BangPermL);
    }

    #[test]
    fn distinct_splits_count_multisets() {
        let s = seq("p, p, p, q |- p * q");
        assert_eq!(rule_instances(&s, Calculus::Priced).len(), 16);
        let distinct = distinct_rule_instances(&s, Calculus::Priced);
        assert_eq!(distinct.len(), 4 * 2);
        let lefts: std::collections::BTreeSet<Vec<Formula>> = distinct
            .iter()
            .map(|inst| apply_rule(&s, inst, Calculus::Priced).unwrap()[0].sequent.canonical().antecedent)
            .collect();
        assert_eq!(lefts.len(), 8);
    }
}
