//! Labelled cut elimination.
//!
//! Given `Γ1 |-[a] A` and `Γ2, A |-[b] C` with `A` free of modalities, builds
//! a cut-free proof of `Γ1, Γ2 |-[a * b] C` in which permanent formulas common
//! to both contexts occur once. The reduction works on skeletons; labels are
//! recomputed by decoration and the root is weakened to `a * b`.

use thiserror::Error;

use crate::formula::{multiset_minus, Formula, Sequent};
use crate::labelled::{check_labelled_proof, decorate, skeleton, weaken_to};
use crate::proof::{check_proof, retarget, LabelledProof, Proof, ProofError};
use crate::prover::{min_cost, Outcome, SearchError, SearchLimits};
use crate::rules::{apply_rule, classify_initial, linear_positions, Calculus, RuleInstance, RuleName};
use crate::semiring::{Builtin, CostValue, Semiring};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("cut formula `{0}` contains a modality")]
    ModalCutFormula(String),
    #[error("mismatched contexts: {0}")]
    MismatchedContexts(String),
    #[error("input proof {which} does not validate: {source}")]
    InvalidInput { which: usize, source: ProofError },
    #[error("eliminated proof costs {cost}, worse than the bound {bound}")]
    LabelBound { cost: String, bound: String },
}

/// Appends `extra` to every antecedent on the way up. Linear extras follow
/// the left premise of multiplicative rules; permanent ones go everywhere.
fn weaken(pf: &Proof, extra: &[Formula]) -> Proof {
    if extra.is_empty() {
        return pf.clone();
    }
    let mut conclusion = pf.conclusion.clone();
    conclusion.antecedent.extend(extra.iter().cloned());
    let split = pf.split.map(|mask| {
        let exclude = if pf.rule == RuleName::LolliL { pf.principal } else { None };
        let old = linear_positions(&pf.conclusion, Calculus::Priced, exclude).len();
        let added = extra.iter().filter(|f| !f.is_permanent()).count();
        mask | (((1u64 << added) - 1) << old)
    });
    let premises = pf
        .premises
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let share: Vec<Formula> = extra
                .iter()
                .filter(|f| k == 0 || f.is_permanent() || !pf.rule.is_multiplicative_branching())
                .cloned()
                .collect();
            weaken(p, &share)
        })
        .collect();
    Proof { conclusion, label: (), rule: pf.rule, principal: pf.principal, split, premises }
}

/// Weakens `pf` to prove exactly `target`, whose antecedent must contain
/// `pf`'s as a multiset.
pub(crate) fn fit(pf: Proof, target: &Sequent) -> Proof {
    assert_eq!(pf.conclusion.consequent, target.consequent, "fit changes the consequent");
    let extra = multiset_minus(&target.antecedent, &pf.conclusion.antecedent).expect("fit target lacks formulas");
    retarget(weaken(&pf, &extra), target.clone())
}

/// The conclusion context of a cut: `Γ2` without the cut occurrence, then
/// `Γ1` minus the permanents `Γ2` already has.
struct Merge {
    ante: Vec<Formula>,
    from1: Vec<usize>,
    from2: Vec<Option<usize>>,
}

fn merge(g1: &[Formula], g2: &[Formula], j: usize) -> Merge {
    let mut ante = Vec::new();
    let mut from2 = Vec::new();
    for (i, f) in g2.iter().enumerate() {
        if i == j {
            from2.push(None);
        } else {
            from2.push(Some(ante.len()));
            ante.push(f.clone());
        }
    }
    let mut shared = vec![false; g2.len()];
    let mut from1 = Vec::new();
    for f in g1 {
        let reuse = f
            .is_permanent()
            .then(|| (0..g2.len()).find(|&i| i != j && !shared[i] && g2[i] == *f))
            .flatten();
        match reuse {
            Some(i) => {
                shared[i] = true;
                from1.push(from2[i].unwrap());
            }
            None => {
                from1.push(ante.len());
                ante.push(f.clone());
            }
        }
    }
    Merge { ante, from1, from2 }
}

/// Bit for each linear position of `s` (under `exclude`) saying whether the
/// occurrence went left.
fn sides(s: &Sequent, exclude: Option<usize>, mask: u64) -> Vec<Option<bool>> {
    let linear = linear_positions(s, Calculus::Priced, exclude);
    (0..s.antecedent.len())
        .map(|i| linear.iter().position(|&x| x == i).map(|b| mask & (1u64 << b) != 0))
        .collect()
}

fn mask_from(r: &Sequent, exclude: Option<usize>, left: impl Fn(usize) -> bool) -> u64 {
    linear_positions(r, Calculus::Priced, exclude)
        .into_iter()
        .enumerate()
        .filter(|(_, i)| left(*i))
        .fold(0u64, |m, (b, _)| m | (1u64 << b))
}

fn measure(a: &Formula, p1: &Proof, p2: &Proof) -> (usize, usize) {
    (a.size(), p1.height() + p2.height())
}

struct Eliminator {
    steps: usize,
}

impl Eliminator {
    fn recurse(&mut self, outer: (usize, usize), p1: &Proof, p2: &Proof, j: usize) -> Proof {
        let inner = measure(&p1.conclusion.consequent, p1, p2);
        assert!(inner < outer, "cut measure did not decrease: {inner:?} after {outer:?}");
        self.elim(p1, p2, j)
    }

    /// A cut-free proof of `merge(Γ1, Γ2, j) |- C`.
    fn elim(&mut self, p1: &Proof, p2: &Proof, j: usize) -> Proof {
        self.steps += 1;
        let a = &p1.conclusion.consequent;
        debug_assert_eq!(&p2.conclusion.antecedent[j], a);
        let m = merge(&p1.conclusion.antecedent, &p2.conclusion.antecedent, j);
        let r = Sequent::new(m.ante.clone(), p2.conclusion.consequent.clone());
        let here = measure(a, p1, p2);

        if let Some(rule) = p2.rule.is_initial().then_some(p2.rule) {
            let rest = Sequent::new(m.ante[..p2.conclusion.antecedent.len() - 1].to_vec(), r.consequent.clone());
            match classify_initial(&rest) {
                Some(_) => return Proof::leaf(r.clone(), classify_initial(&r).expect("weakening keeps initial sequents")),
                None if rule == RuleName::Ax => return fit(p1.clone(), &r),
                None => {}
            }
        }
        match p1.rule {
            RuleName::Ax => return fit(p2.clone(), &r),
            RuleName::ZeroL => return Proof::leaf(r, RuleName::ZeroL),
            _ => {}
        }
        if is_left_rule(p1.rule) {
            return self.graft_left(p1, p2, j, &m, &r, here);
        }
        if p2.principal == Some(j) && !p2.rule.is_initial() {
            return self.principal(p1, p2, &r, here);
        }
        self.graft_right(p1, p2, j, &m, &r, here)
    }

    /// The last rule of `p1` acts on its antecedent: apply it last.
    fn graft_left(&mut self, p1: &Proof, p2: &Proof, j: usize, m: &Merge, r: &Sequent, here: (usize, usize)) -> Proof {
        let principal = p1.principal.map(|i| m.from1[i]);
        let split = p1.split.map(|mask| {
            let side1 = sides(&p1.conclusion, p1.principal, mask);
            let back: Vec<Option<usize>> =
                (0..r.antecedent.len()).map(|ri| m.from1.iter().position(|&x| x == ri)).collect();
            mask_from(r, principal, |ri| match back[ri] {
                Some(i1) if m.from2.iter().all(|x| *x != Some(ri)) => side1[i1] == Some(true),
                // Γ2's occurrences follow the cut into the right premise.
                _ => false,
            })
        });
        let inst = RuleInstance::new(p1.rule, principal, split);
        let targets = apply_rule(r, &inst, Calculus::Priced).expect("permuted rule applies");
        let children = p1
            .premises
            .iter()
            .enumerate()
            .map(|(k, sub)| {
                let continues = p1.rule != RuleName::LolliL || k == 1;
                let child = if continues { self.recurse(here, sub, p2, j) } else { sub.clone() };
                fit(child, &targets[k].sequent)
            })
            .collect();
        Proof::node(r.clone(), inst, children)
    }

    /// `A` is a side formula of `p2`'s last rule: apply that rule last.
    fn graft_right(&mut self, p1: &Proof, p2: &Proof, j: usize, m: &Merge, r: &Sequent, here: (usize, usize)) -> Proof {
        let inst2 = p2.instance();
        let principal = p2.principal.map(|i| m.from2[i].expect("cut formula is not principal"));
        let split = p2.split.map(|mask| {
            let side2 = sides(&p2.conclusion, p2.principal, mask);
            let a_side = side2[j].expect("cut formula is linear");
            mask_from(r, principal, |ri| match m.from2.iter().position(|x| *x == Some(ri)) {
                Some(i2) => side2[i2] == Some(true),
                None => a_side,
            })
        });
        let inst = RuleInstance::new(p2.rule, principal, split);
        let targets = apply_rule(r, &inst, Calculus::Priced).expect("permuted rule applies");
        let carried = apply_rule(&p2.conclusion, &inst2, Calculus::Priced).expect("input proof is valid");
        let children = p2
            .premises
            .iter()
            .enumerate()
            .map(|(k, sub)| {
                let child = if carried[k].origin.contains(&Some(j)) {
                    let jk = sub.conclusion.antecedent.iter().position(|f| *f == p1.conclusion.consequent).unwrap();
                    self.recurse(here, p1, sub, jk)
                } else {
                    sub.clone()
                };
                fit(child, &targets[k].sequent)
            })
            .collect();
        Proof::node(r.clone(), inst, children)
    }

    /// `A` is introduced on the right by `p1` and on the left by `p2`.
    fn principal(&mut self, p1: &Proof, p2: &Proof, r: &Sequent, here: (usize, usize)) -> Proof {
        let find = |pf: &Proof, f: &Formula| pf.conclusion.antecedent.iter().position(|g| g == f).unwrap();
        let out = match (&p1.conclusion.consequent, p1.rule, p2.rule) {
            (Formula::Tensor(b, c), RuleName::TensorR, RuleName::TensorL) => {
                let tau = &p2.premises[0];
                let inner = self.recurse(here, &p1.premises[1], tau, find(tau, c));
                let jb = find(&inner, b);
                self.recurse(here, &p1.premises[0], &inner, jb)
            }
            (Formula::Lolli(b, _), RuleName::LolliR, RuleName::LolliL) => {
                let sigma = &p1.premises[0];
                let inner = self.recurse(here, &p2.premises[0], sigma, find(sigma, b));
                let tau = &p2.premises[1];
                let jc = find(tau, &inner.conclusion.consequent);
                self.recurse(here, &inner, tau, jc)
            }
            (Formula::With(b, c), RuleName::WithR, RuleName::WithL1 | RuleName::WithL2) => {
                let (sigma, chosen) = if p2.rule == RuleName::WithL1 { (&p1.premises[0], b) } else { (&p1.premises[1], c) };
                let tau = &p2.premises[0];
                self.recurse(here, sigma, tau, find(tau, chosen))
            }
            (Formula::Plus(b, c), RuleName::PlusR1 | RuleName::PlusR2, RuleName::PlusL) => {
                let (tau, chosen) = if p1.rule == RuleName::PlusR1 { (&p2.premises[0], b) } else { (&p2.premises[1], c) };
                self.recurse(here, &p1.premises[0], tau, find(tau, chosen))
            }
            (f, r1, r2) => unreachable!("{r1} and {r2} cannot both introduce {f}"),
        };
        fit(out, r)
    }
}

fn is_left_rule(rule: RuleName) -> bool {
    matches!(
        rule,
        RuleName::TensorL
            | RuleName::WithL1
            | RuleName::WithL2
            | RuleName::PlusL
            | RuleName::LolliL
            | RuleName::BangPermL
            | RuleName::BangSingleL
    )
}

/// Eliminates a cut between `lpf1`, proving `Γ1 |-[a] A`, and `lpf2`,
/// proving `Γ2 |-[b] C` with `A` in `Γ2`. The result proves
/// `Γ1, Γ2 - A |-[a * b] C` with shared permanents counted once.
pub fn cut(lpf1: &LabelledProof, lpf2: &LabelledProof, k: &dyn Semiring) -> Result<LabelledProof, CutError> {
    check_labelled_proof(lpf1, k).map_err(|source| CutError::InvalidInput { which: 1, source })?;
    check_labelled_proof(lpf2, k).map_err(|source| CutError::InvalidInput { which: 2, source })?;
    let a = &lpf1.conclusion.consequent;
    if a.has_modality() {
        return Err(CutError::ModalCutFormula(a.to_string()));
    }
    let j = lpf2.conclusion.antecedent.iter().position(|f| f == a).ok_or_else(|| {
        CutError::MismatchedContexts(format!("`{a}` does not occur in the antecedent of `{}`", lpf2.conclusion))
    })?;
    let (p1, p2) = (skeleton(lpf1), skeleton(lpf2));
    let result = Eliminator { steps: 0 }.elim(&p1, &p2, j);
    debug_assert_eq!(check_proof(&result, Calculus::Priced), Ok(()));
    let bound = k.times(&lpf1.label, &lpf2.label);
    let d = decorate(&result, k);
    let cost = d.label.clone();
    weaken_to(d, &bound, k).ok_or_else(|| CutError::LabelBound { cost: cost.to_string(), bound: bound.to_string() })
}

/// The pair `!p[a]p |-[a] p` and `p, !p[b]q |-[b] p * q`, together with the
/// least label of their cut conclusion `!p[a]p, !p[b]q |- p * q`.
pub fn minimality_witness(
    a: &CostValue,
    b: &CostValue,
    limits: SearchLimits,
) -> Result<(LabelledProof, LabelledProof, CostValue), SearchError> {
    let k = Builtin::Cost;
    let (p, q) = (Formula::atom("p"), Formula::atom("q"));
    let bang_a = Formula::permanent(a.clone(), p.clone());
    let bang_b = Formula::permanent(b.clone(), q.clone());
    let deref = |bang: &Formula, body: &Formula, rest: Vec<Formula>| {
        let mut ante = rest.clone();
        ante.push(bang.clone());
        let mut top = ante.clone();
        top.push(body.clone());
        Proof::node(Sequent::new(ante, body.clone()), RuleInstance::new(RuleName::BangPermL, Some(rest.len()), None), vec![
            Proof::leaf(Sequent::new(top, body.clone()), RuleName::Ax),
        ])
    };
    let left = deref(&bang_a, &p, vec![]);
    let right = Proof::node(
        Sequent::new(vec![p.clone(), bang_b.clone()], Formula::tensor(p.clone(), q.clone())),
        RuleInstance::new(RuleName::TensorR, None, Some(1)),
        vec![Proof::leaf(Sequent::new(vec![p.clone(), bang_b.clone()], p.clone()), RuleName::Ax), deref(&bang_b, &q, vec![])],
    );
    let goal = Sequent::new(vec![bang_a, bang_b], Formula::tensor(p, q));
    let least = match min_cost(&goal, &k, limits)? {
        Outcome::Proved(mc) => mc.cost,
        _ => unreachable!("the witness sequent is provable"),
    };
    Ok((decorate(&left, &k), decorate(&right, &k), least))
}
