//! Bottom-up proof search.
//!
//! The search works on canonical goals: the antecedent is kept sorted and
//! every occurrence carries the number of `BangPermL` applications it has
//! seen on the current branch. Permanent formulas may be derelicted at most
//! [`SearchLimits::max_derelictions_per_permanent`] times per branch, which
//! makes the goal graph finite. Results are memoised per goal and bound.
//!
//! Except when computing spectra, a dereliction is only tried when the next
//! rule acts on the copy it introduces. Any proof can be rearranged into this
//! shape without a worse label: derelictions move up towards the rule using
//! their copy and vanish when the copy is never used. The same searches keep
//! one occurrence of each permanent formula, since a second copy can always
//! be replaced by the first; proofs are weakened back on reconstruction.
//!
//! Provability and cost queries raise the dereliction cap one step at a
//! time, and a cost found under a small cap bounds the later rounds.
//!
//! A search at bound `b` only explores derelictions the bound can pay for:
//! a price `a` is affordable iff `b <= a`, and the premise is searched at
//! `b / a`. By the division monotonicity law this prunes exactly the partial
//! proofs whose cost is already worse than `b`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{check_extended, classically_invalid, Formula, LabelledSequent, Sequent};
use crate::labelled::{cost_of, decorate, weaken_to};
use crate::proof::{retarget, LabelledProof, Proof};
use crate::rules::{apply_rule, classify_initial, distinct_rule_instances, Calculus, RuleError, RuleInstance, RuleName};
use crate::semiring::{fold_plus, CostValue, Semiring};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_height: usize,
    pub max_derelictions_per_permanent: u32,
    pub max_nodes: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_height: 64, max_derelictions_per_permanent: 4, max_nodes: 2_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search exceeded the node budget of {0}")]
    LimitExceeded(usize),
    #[error("`{0}` is not an extended sequent")]
    NotExtended(String),
    #[error("label {0} is not an element of the semiring")]
    LabelOutsideCarrier(String),
    #[error("modal formula in the plain calculus")]
    ModalInPlainCalculus,
}

/// Result of a decision query. `Unknown` means the search failed but was cut
/// short by the height limit or the dereliction cap, so failure is not a
/// refutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<P> {
    Proved(P),
    Refuted,
    Unknown,
}

impl<P> Outcome<P> {
    pub fn proof(&self) -> Option<&P> {
        match self {
            Outcome::Proved(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Outcome::Proved(_))
    }
}

/// A sequent whose antecedent occurrences carry dereliction counts. A goal
/// with a `focus` must be closed by a rule acting on an occurrence of that
/// formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Goal {
    pub ante: Vec<(Formula, u32)>,
    pub cons: Formula,
    pub focus: Option<Formula>,
}

impl Goal {
    pub fn new(mut ante: Vec<(Formula, u32)>, cons: Formula) -> Goal {
        ante.sort();
        Goal { ante, cons, focus: None }
    }

    pub fn from_sequent(s: &Sequent) -> Goal {
        Goal::new(s.antecedent.iter().map(|f| (f.clone(), 0)).collect(), s.consequent.clone())
    }

    pub fn sequent(&self) -> Sequent {
        Sequent::new(self.ante.iter().map(|(f, _)| f.clone()).collect(), self.cons.clone())
    }

    /// Rule instances applicable under the cap, plus whether the cap blocked
    /// any `BangPermL`.
    /// Identical occurrences are interchangeable, so only the first of each is
    /// tried as a principal formula, and splits are taken up to multisets.
    pub fn instances(&self, calculus: Calculus, cap: u32) -> (Vec<RuleInstance>, Vec<RuleInstance>) {
        distinct_rule_instances(&self.sequent(), calculus)
            .into_iter()
            .filter(|inst| inst.principal.is_none_or(|i| !self.ante[..i].contains(&self.ante[i])))
            .partition(|inst| inst.rule != RuleName::BangPermL || self.ante[inst.principal.unwrap()].1 < cap)
    }

    pub fn price(&self, inst: &RuleInstance) -> Option<&CostValue> {
        if !inst.rule.is_dereliction() {
            return None;
        }
        match &self.ante[inst.principal?].0 {
            Formula::Modal { price, .. } => Some(price),
            _ => None,
        }
    }

    pub fn expand(&self, inst: &RuleInstance, calculus: Calculus) -> Result<Vec<Goal>, RuleError> {
        let premises = apply_rule(&self.sequent(), inst, calculus)?;
        Ok(premises
            .into_iter()
            .map(|p| {
                let ante = p
                    .sequent
                    .antecedent
                    .into_iter()
                    .zip(p.origin)
                    .map(|(f, o)| {
                        let n = match o {
                            Some(i) => {
                                self.ante[i].1 + u32::from(inst.rule == RuleName::BangPermL && Some(i) == inst.principal)
                            }
                            None => 0,
                        };
                        (f, n)
                    })
                    .collect();
                Goal::new(ante, p.sequent.consequent)
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Provability only: prices are treated as free.
    Exists,
    /// The semiring-maximal attainable labels.
    Best,
    /// Every attainable label within the bound.
    Spectrum,
}

/// How a value of a goal was reached.
#[derive(Debug)]
enum Witness {
    Leaf(RuleName),
    Node { inst: RuleInstance, premises: Vec<(Goal, Rc<Res>, CostValue)> },
}

#[derive(Debug, Default)]
struct Res {
    values: Vec<CostValue>,
    /// Parallel to `values`; empty when computing spectra.
    witnesses: Vec<Witness>,
    height_cut: bool,
    cap_cut: bool,
    depth: usize,
    /// Shallowest ancestor on the search path a loop check relied on.
    loop_dep: Option<usize>,
}

struct Entry {
    height: usize,
    res: Rc<Res>,
}

struct Search<'k> {
    k: &'k dyn Semiring,
    calculus: Calculus,
    limits: SearchLimits,
    mode: Mode,
    nodes: usize,
    memo: HashMap<(Goal, CostValue), Entry>,
    path: Vec<Goal>,
}

/// True when `a` is `n` with no more derelictions used.
fn subsumes(a: &Goal, n: &Goal) -> bool {
    a.cons == n.cons && a.focus == n.focus && a.ante.len() == n.ante.len() && a.ante.iter().zip(&n.ante).all(|(x, y)| x.0 == y.0 && x.1 <= y.1)
}

impl<'k> Search<'k> {
    fn new(k: &'k dyn Semiring, calculus: Calculus, limits: SearchLimits, mode: Mode) -> Self {
        Search { k, calculus, limits, mode, nodes: 0, memo: HashMap::new(), path: Vec::new() }
    }

    fn focused(&self) -> bool {
        self.mode != Mode::Spectrum
    }

    fn initial(&self, g: &Goal) -> Option<RuleName> {
        match &g.focus {
            None => classify_initial(&g.sequent()),
            Some(Formula::Zero) => Some(RuleName::ZeroL),
            Some(f) if f.is_atom() && *f == g.cons => Some(RuleName::Ax),
            Some(_) => None,
        }
    }

    fn instances(&self, g: &Goal) -> (Vec<RuleInstance>, Vec<RuleInstance>) {
        let (mut allowed, mut capped) = g.instances(self.calculus, self.limits.max_derelictions_per_permanent);
        if let Some(f) = &g.focus {
            let on_focus = |inst: &RuleInstance| inst.principal.is_some_and(|i| inst.rule.has_principal() && g.ante[i].0 == *f);
            allowed.retain(on_focus);
            capped.retain(on_focus);
        }
        (allowed, capped)
    }

    fn expand(&self, g: &Goal, inst: &RuleInstance) -> Vec<Goal> {
        let mut premises = g.expand(inst, self.calculus).expect("enumerated instance applies");
        if self.focused() {
            for p in &mut premises {
                p.ante.dedup_by(|b, a| a.0 == b.0 && a.0.is_permanent());
            }
        }
        if self.focused() && inst.rule.is_dereliction() {
            if let Formula::Modal { body, .. } = &g.ante[inst.principal.expect("derelictions have a principal")].0 {
                premises[0].focus = Some((**body).clone());
            }
        }
        premises
    }

    fn premise_sequents(&self, g: &Goal, inst: &RuleInstance) -> Vec<Sequent> {
        g.expand(inst, self.calculus).expect("enumerated instance applies").iter().map(Goal::sequent).collect()
    }

    fn price(&self, g: &Goal, inst: &RuleInstance) -> Option<CostValue> {
        g.price(inst).map(|p| if self.mode == Mode::Exists { self.k.top() } else { p.clone() })
    }

    /// Records `v`, keeping an antichain of semiring-maximal values except
    /// when computing spectra.
    fn add(&self, res: &mut Res, v: CostValue, witness: impl FnOnce() -> Witness) {
        if self.mode == Mode::Spectrum {
            if !res.values.contains(&v) {
                res.values.push(v);
            }
            return;
        }
        if res.values.iter().any(|w| self.k.leq(&v, w)) {
            return;
        }
        let mut i = 0;
        while i < res.values.len() {
            if self.k.leq(&res.values[i], &v) {
                res.values.swap_remove(i);
                res.witnesses.swap_remove(i);
            } else {
                i += 1;
            }
        }
        res.values.push(v);
        res.witnesses.push(witness());
    }

    fn done(&self, values: &[CostValue]) -> bool {
        self.mode != Mode::Spectrum && values.contains(&self.k.top())
    }

    fn combine(&self, rule: RuleName, a: &CostValue, b: &CostValue) -> CostValue {
        if rule.is_additive_branching() {
            self.k.glb(a, b)
        } else {
            self.k.times(a, b)
        }
    }

    /// A goal repeating an ancestor with no fewer derelictions spent is never
    /// needed: its proofs fit at the ancestor, where prices paid in between
    /// only lower the label. Results relying on such a cut depend on the
    /// path and are not memoised.
    fn solve(&mut self, g: &Goal, bound: &CostValue, height: usize) -> Result<Rc<Res>, SearchError> {
        if self.focused() {
            if let Some(d) = self.path.iter().position(|a| subsumes(a, g)) {
                return Ok(Rc::new(Res { loop_dep: Some(d), ..Res::default() }));
            }
        }
        let key = (g.clone(), bound.clone());
        if let Some(e) = self.memo.get(&key) {
            if e.height == height || (!e.res.height_cut && height >= e.res.depth) {
                return Ok(e.res.clone());
            }
        }
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            return Err(SearchError::LimitExceeded(self.limits.max_nodes));
        }
        let depth = self.path.len();
        if self.focused() {
            self.path.push(g.clone());
        }
        let res = self.solve_uncached(g, bound, height);
        self.path.truncate(depth);
        let mut res = res?;
        if res.loop_dep.is_some_and(|d| d >= depth) {
            res.loop_dep = None;
        }
        let res = Rc::new(res);
        if res.loop_dep.is_none() {
            self.memo.insert(key, Entry { height, res: res.clone() });
        }
        Ok(res)
    }

    fn solve_uncached(&mut self, g: &Goal, bound: &CostValue, height: usize) -> Result<Res, SearchError> {
        let mut res = Res { depth: 1, ..Res::default() };
        if height == 0 {
            res.height_cut = true;
            res.depth = 0;
            return Ok(res);
        }
        if let Some(rule) = self.initial(g) {
            self.add(&mut res, self.k.top(), || Witness::Leaf(rule));
            if self.mode != Mode::Spectrum {
                return Ok(res);
            }
        }
        if classically_invalid(g.ante.iter().map(|(f, _)| f), &g.cons) {
            return Ok(res);
        }
        let (instances, capped) = self.instances(g);
        if capped.iter().any(|inst| self.price(g, inst).is_some_and(|p| self.k.leq(bound, &p))) {
            res.cap_cut = true;
        }
        let mut seen = HashSet::new();
        for inst in instances {
            if self.done(&res.values) {
                break;
            }
            let price = self.price(g, &inst);
            let sub_bound = match &price {
                Some(p) if !self.k.leq(bound, p) => continue,
                Some(p) => self.k.div(bound, p).expect("affordable division"),
                None => bound.clone(),
            };
            let premises = self.expand(g, &inst);
            if !seen.insert((inst.rule.is_additive_branching(), price.clone(), premises.clone())) {
                continue;
            }
            match premises.as_slice() {
                [p] => {
                    let sub = self.solve(p, &sub_bound, height - 1)?;
                    res.absorb(&sub);
                    for v in &sub.values {
                        let w = match &price {
                            Some(a) => self.k.times(v, a),
                            None => v.clone(),
                        };
                        self.add(&mut res, w, || Witness::Node { inst: inst.clone(), premises: vec![(p.clone(), sub.clone(), v.clone())] });
                    }
                }
                [l, r] => {
                    let left = self.solve(l, &sub_bound, height - 1)?;
                    res.absorb(&left);
                    if left.values.is_empty() {
                        continue;
                    }
                    let right = self.solve(r, &sub_bound, height - 1)?;
                    res.absorb(&right);
                    for a in &left.values {
                        for b in &right.values {
                            let v = self.combine(inst.rule, a, b);
                            if self.k.leq(bound, &v) {
                                self.add(&mut res, v, || Witness::Node {
                                    inst: inst.clone(),
                                    premises: vec![(l.clone(), left.clone(), a.clone()), (r.clone(), right.clone(), b.clone())],
                                });
                            }
                        }
                    }
                }
                _ => unreachable!("non-initial rules have one or two premises"),
            }
        }
        Ok(res)
    }

    /// Rebuilds the proof of `g` behind its value `target`.
    fn build(&self, g: &Goal, res: &Res, target: &CostValue) -> Proof {
        let i = res.values.iter().position(|v| v == target).expect("target is a value of the goal");
        match &res.witnesses[i] {
            Witness::Leaf(rule) => Proof::leaf(g.sequent(), *rule),
            Witness::Node { inst, premises } => {
                let full = self.premise_sequents(g, inst);
                let children = premises.iter().zip(&full).map(|((p, sub, v), f)| widen(self.build(p, sub, v), f)).collect();
                Proof::node(g.sequent(), inst.clone(), children)
            }
        }
    }
}

/// Restores the duplicate permanents that `Search::expand` dropped.
fn widen(pf: Proof, full: &Sequent) -> Proof {
    if pf.conclusion.antecedent.len() == full.antecedent.len() {
        pf
    } else {
        crate::cut::fit(pf, full)
    }
}

impl Res {
    fn absorb(&mut self, sub: &Res) {
        self.height_cut |= sub.height_cut;
        self.cap_cut |= sub.cap_cut;
        self.loop_dep = match (self.loop_dep, sub.loop_dep) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.depth = self.depth.max(sub.depth + 1);
    }

    fn truncated(&self) -> bool {
        self.height_cut || self.cap_cut
    }
}

fn precheck(s: &Sequent, calculus: Calculus) -> Result<(), SearchError> {
    match calculus {
        Calculus::Plain if s.has_modality() => Err(SearchError::ModalInPlainCalculus),
        Calculus::Priced if !check_extended(s) => Err(SearchError::NotExtended(s.to_string())),
        _ => Ok(()),
    }
}

struct Run {
    values: Vec<CostValue>,
    truncated: bool,
    capped: bool,
    proofs: Vec<Proof>,
}

/// One search from `s` at `bound`, rebuilding a proof for every value found.
fn run_once(s: &Sequent, k: &dyn Semiring, calculus: Calculus, limits: SearchLimits, mode: Mode, bound: &CostValue) -> Result<Run, SearchError> {
    precheck(s, calculus)?;
    let mut search = Search::new(k, calculus, limits, mode);
    let goal = Goal::from_sequent(s);
    let res = search.solve(&goal, bound, limits.max_height)?;
    let mut proofs = Vec::new();
    if mode != Mode::Spectrum {
        for v in &res.values {
            proofs.push(retarget(search.build(&goal, &res, v), s.clone()));
        }
    }
    Ok(Run { values: res.values.clone(), truncated: res.truncated(), capped: res.cap_cut, proofs })
}

/// The limits with the dereliction cap raised one step at a time.
fn rounds(limits: SearchLimits) -> impl Iterator<Item = SearchLimits> {
    let cap = limits.max_derelictions_per_permanent;
    (cap.min(1)..=cap).map(move |c| SearchLimits { max_derelictions_per_permanent: c, ..limits })
}

/// Searches under ever larger dereliction caps until `enough` accepts a
/// result or the cap no longer binds. The node limit applies per round.
fn run(
    s: &Sequent,
    k: &dyn Semiring,
    calculus: Calculus,
    limits: SearchLimits,
    mode: Mode,
    bound: &CostValue,
    enough: impl Fn(&Run) -> bool,
) -> Result<Run, SearchError> {
    let mut last = None;
    for round in rounds(limits) {
        let r = run_once(s, k, calculus, round, mode, bound)?;
        if !r.capped || enough(&r) {
            return Ok(r);
        }
        last = Some(r);
    }
    Ok(last.expect("at least one round"))
}

/// Searches for any proof of `s` in `calculus`, ignoring prices.
pub fn prove(s: &Sequent, calculus: Calculus, limits: SearchLimits) -> Result<Outcome<Proof>, SearchError> {
    let k = crate::semiring::Builtin::Cost;
    let r = run(s, &k, calculus, limits, Mode::Exists, &k.bottom(), |r| !r.values.is_empty())?;
    Ok(match r.proofs.into_iter().next() {
        Some(pf) => Outcome::Proved(pf),
        None if r.truncated => Outcome::Unknown,
        None => Outcome::Refuted,
    })
}

/// Searches for a labelled proof of `ls`. The returned proof is a decorated
/// search result, wrapped in `WeakLabel` when its cost beats the label.
pub fn prove_labelled(ls: &LabelledSequent, k: &dyn Semiring, limits: SearchLimits) -> Result<Outcome<LabelledProof>, SearchError> {
    if !k.contains(&ls.label) {
        return Err(SearchError::LabelOutsideCarrier(ls.label.to_string()));
    }
    let r = run(&ls.sequent, k, Calculus::Priced, limits, Mode::Best, &ls.label, |r| !r.values.is_empty())?;
    Ok(match r.proofs.into_iter().next() {
        Some(pf) => {
            let d = decorate(&pf, k);
            Outcome::Proved(weaken_to(d, &ls.label, k).expect("search respects the bound"))
        }
        None if r.truncated => Outcome::Unknown,
        None => Outcome::Refuted,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostStatus {
    /// Minimal among all proofs within the limits, and the limits did not bind.
    Exact,
    /// The limits cut the search short; a cheaper proof may exist.
    BestFound,
    /// Non-total semiring: the join of the incomparable optimal costs, which
    /// need not be attained by a single proof.
    Aggregate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCost {
    pub cost: CostValue,
    pub proof: Proof,
    pub status: CostStatus,
}

/// The semiring-best decoration cost of a proof of `s`. `Ok(Outcome::Refuted)`
/// means `s` has no proof at all.
pub fn min_cost(s: &Sequent, k: &dyn Semiring, limits: SearchLimits) -> Result<Outcome<MinCost>, SearchError> {
    let first = match prove(s, Calculus::Priced, limits)? {
        Outcome::Proved(pf) => pf,
        Outcome::Refuted => return Ok(Outcome::Refuted),
        Outcome::Unknown => return Ok(Outcome::Unknown),
    };
    // In a total order each round's optimum bounds the next.
    let mut bound = cost_of(&first, k);
    let mut r = None;
    for round in rounds(limits) {
        let this = run_once(s, k, Calculus::Priced, round, Mode::Best, &bound)?;
        if let (true, [best]) = (k.totally_ordered(), this.values.as_slice()) {
            bound = best.clone();
        }
        let last = !this.capped;
        r = Some(this);
        if last {
            break;
        }
    }
    let r = r.expect("at least one round");
    let status = if r.truncated { CostStatus::BestFound } else { CostStatus::Exact };
    let mut ranked: Vec<(CostValue, Proof)> = r.values.into_iter().zip(r.proofs).collect();
    ranked.sort_by(|a, b| k.preference(&a.0, &b.0));
    let (cost, proof) = ranked.first().cloned().expect("incumbent is within its own bound");
    if ranked.len() > 1 {
        let join = fold_plus(k, ranked.iter().map(|(v, _)| v));
        return Ok(Outcome::Proved(MinCost { cost: join, proof, status: CostStatus::Aggregate }));
    }
    Ok(Outcome::Proved(MinCost { cost, proof, status }))
}

/// Labels realised by proofs of `s` that are no worse than `bound`, best
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    pub values: Vec<CostValue>,
    pub bound: CostValue,
    /// False when the limits cut the enumeration short.
    pub exhausted: bool,
}

impl Spectrum {
    pub fn min(&self) -> Option<&CostValue> {
        self.values.first()
    }
}

pub fn spectrum(s: &Sequent, bound: &CostValue, k: &dyn Semiring, limits: SearchLimits) -> Result<Spectrum, SearchError> {
    if !k.contains(bound) {
        return Err(SearchError::LabelOutsideCarrier(bound.to_string()));
    }
    let r = run_once(s, k, Calculus::Priced, limits, Mode::Spectrum, bound)?;
    let mut values = r.values;
    values.sort_by(|a, b| k.preference(a, b));
    Ok(Spectrum { values, bound: bound.clone(), exhausted: !r.truncated })
}

/// All products of the prices (with repetition) no worse than `bound`, best
/// first. Fails when more than `max_elements` values qualify.
pub fn omega(prices: &[CostValue], bound: &CostValue, k: &dyn Semiring, max_elements: usize) -> Result<Vec<CostValue>, SearchError> {
    let mut seen: BTreeSet<CostValue> = BTreeSet::new();
    let mut frontier = vec![k.top()];
    seen.insert(k.top());
    while let Some(v) = frontier.pop() {
        for a in prices {
            let w = k.times(&v, a);
            if k.leq(bound, &w) && seen.insert(w.clone()) {
                if seen.len() > max_elements {
                    return Err(SearchError::LimitExceeded(max_elements));
                }
                frontier.push(w);
            }
        }
    }
    let mut out: Vec<CostValue> = seen.into_iter().collect();
    out.sort_by(|a, b| k.preference(a, b));
    Ok(out)
}
