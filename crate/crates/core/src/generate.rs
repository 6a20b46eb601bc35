//! Exhaustive and random generators for formulas, sequents, transition
//! systems and cut instances. Everything generated is an extended sequent:
//! modalities are only placed in negative positions.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{Formula, ModalKind, Sequent};
use crate::labelled::{decorate, weaken_to};
use crate::proof::LabelledProof;
use crate::prover::{min_cost, SearchLimits};
use crate::semiring::{Builtin, CostValue, Semiring};
use crate::ts::{Transition, TransitionSystem};

/// The building blocks of generated formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub atoms: Vec<String>,
    pub prices: Vec<CostValue>,
    pub units: bool,
    pub modal_kinds: Vec<ModalKind>,
}

impl Grammar {
    pub fn new(atoms: &[&str], prices: &[&str]) -> Grammar {
        Grammar {
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            prices: prices.iter().map(|p| CostValue::lit(p)).collect(),
            units: true,
            modal_kinds: vec![ModalKind::Permanent, ModalKind::SingleUse],
        }
    }

    pub fn without_units(mut self) -> Grammar {
        self.units = false;
        self
    }

    /// No modalities at all.
    pub fn plain(mut self) -> Grammar {
        self.modal_kinds.clear();
        self
    }

    fn leaves(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = self.atoms.iter().map(|a| Formula::atom(a.as_str())).collect();
        if self.units {
            out.push(Formula::One);
            out.push(Formula::Zero);
        }
        out
    }

    fn modal(&self, kind: ModalKind, price: CostValue, body: Formula) -> Formula {
        match kind {
            ModalKind::Permanent => Formula::permanent(price, body),
            ModalKind::SingleUse => Formula::single_use(price, body),
        }
    }
}

/// Memoised enumeration of formulas by exact connective count and polarity.
pub struct FormulaTable<'g> {
    grammar: &'g Grammar,
    table: HashMap<(usize, bool), Vec<Formula>>,
}

impl<'g> FormulaTable<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        FormulaTable { grammar, table: HashMap::new() }
    }

    /// All formulas with exactly `n` connectives that may stand in a position
    /// of the given polarity.
    pub fn exactly(&mut self, n: usize, negative: bool) -> &[Formula] {
        if !self.table.contains_key(&(n, negative)) {
            let built = self.build(n, negative);
            self.table.insert((n, negative), built);
        }
        &self.table[&(n, negative)]
    }

    fn build(&mut self, n: usize, negative: bool) -> Vec<Formula> {
        if n == 0 {
            return self.grammar.leaves();
        }
        let mut out = Vec::new();
        for i in 0..n {
            let left = self.exactly(i, negative).to_vec();
            let right = self.exactly(n - 1 - i, negative).to_vec();
            let flipped = self.exactly(i, !negative).to_vec();
            for a in &left {
                for b in &right {
                    out.push(Formula::tensor(a.clone(), b.clone()));
                    out.push(Formula::with(a.clone(), b.clone()));
                    out.push(Formula::plus(a.clone(), b.clone()));
                }
            }
            for a in &flipped {
                for b in &right {
                    out.push(Formula::lolli(a.clone(), b.clone()));
                }
            }
        }
        if negative {
            let bodies = self.exactly(n - 1, true).to_vec();
            for kind in self.grammar.modal_kinds.clone() {
                for price in self.grammar.prices.clone() {
                    for body in &bodies {
                        out.push(self.grammar.modal(kind, price.clone(), body.clone()));
                    }
                }
            }
        }
        out
    }

    /// All formulas with at most `n` connectives.
    pub fn up_to(&mut self, n: usize, negative: bool) -> Vec<Formula> {
        (0..=n).flat_map(|i| self.exactly(i, negative).to_vec()).collect()
    }
}

/// Every sequent with at most `max_antecedent` antecedent formulas and at most
/// `max_connectives` connectives in total. Antecedents are enumerated as
/// multisets, each once, in sorted order.
pub fn enumerate_sequents(g: &Grammar, max_connectives: usize, max_antecedent: usize) -> Vec<Sequent> {
    let mut table = FormulaTable::new(g);
    let negatives: Vec<(Formula, usize)> =
        (0..=max_connectives).flat_map(|i| table.exactly(i, true).iter().map(move |f| (f.clone(), i)).collect::<Vec<_>>()).collect();
    let mut out = Vec::new();
    for c in 0..=max_connectives {
        for cons in table.exactly(c, false).to_vec() {
            let mut ante = Vec::new();
            antecedents(&negatives, 0, max_connectives - c, max_antecedent, &mut ante, &mut |a| {
                out.push(Sequent::new(a.to_vec(), cons.clone()));
            });
        }
    }
    out
}

fn antecedents(
    pool: &[(Formula, usize)],
    from: usize,
    budget: usize,
    slots: usize,
    acc: &mut Vec<Formula>,
    emit: &mut impl FnMut(&[Formula]),
) {
    emit(acc);
    if slots == 0 {
        return;
    }
    for (i, (f, size)) in pool.iter().enumerate().skip(from) {
        if *size <= budget {
            acc.push(f.clone());
            antecedents(pool, i, budget - size, slots - 1, acc, emit);
            acc.pop();
        }
    }
}

/// A random formula with exactly `size` connectives.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, g: &Grammar, size: usize, negative: bool) -> Formula {
    if size == 0 {
        return g.leaves().choose(rng).expect("grammar has leaves").clone();
    }
    let modal = negative && !g.modal_kinds.is_empty() && !g.prices.is_empty();
    let choice = rng.gen_range(0..if modal { 5 } else { 4 });
    if choice == 4 {
        let kind = *g.modal_kinds.choose(rng).unwrap();
        let price = g.prices.choose(rng).unwrap().clone();
        return g.modal(kind, price, random_formula(rng, g, size - 1, true));
    }
    let i = rng.gen_range(0..size);
    let b = random_formula(rng, g, size - 1 - i, negative);
    match choice {
        0 => Formula::tensor(random_formula(rng, g, i, negative), b),
        1 => Formula::with(random_formula(rng, g, i, negative), b),
        2 => Formula::plus(random_formula(rng, g, i, negative), b),
        _ => Formula::lolli(random_formula(rng, g, i, !negative), b),
    }
}

/// A random formula with at most `max` connectives.
pub fn up_to<R: Rng + ?Sized>(rng: &mut R, g: &Grammar, max: usize, negative: bool) -> Formula {
    let n = rng.gen_range(0..=max);
    random_formula(rng, g, n, negative)
}

/// A random sequent with at most `max_connectives` connectives in total.
pub fn random_sequent<R: Rng + ?Sized>(rng: &mut R, g: &Grammar, max_connectives: usize, max_antecedent: usize) -> Sequent {
    let n = rng.gen_range(0..=max_antecedent);
    let mut budget = rng.gen_range(0..=max_connectives);
    let mut ante = Vec::with_capacity(n);
    for _ in 0..n {
        let size = rng.gen_range(0..=budget);
        budget -= size;
        ante.push(random_formula(rng, g, size, true));
    }
    Sequent::new(ante, random_formula(rng, g, budget, false))
}

/// A random transition system over `s0, s1, ...` with integer prices in
/// `0..=max_price`.
pub fn random_transition_system<R: Rng + ?Sized>(rng: &mut R, max_states: usize, max_edges: usize, max_price: u32) -> TransitionSystem {
    let n = rng.gen_range(2..=max_states.max(2));
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let m = rng.gen_range(1..=max_edges.max(1));
    let transitions = (0..m)
        .map(|_| Transition {
            from: states.choose(rng).unwrap().clone(),
            price: CostValue::int(rng.gen_range(0..=max_price) as i64),
            to: states.choose(rng).unwrap().clone(),
        })
        .collect();
    let pick = |rng: &mut R| {
        let k = rng.gen_range(1..=2.min(n));
        let mut chosen: Vec<String> = states.choose_multiple(rng, k).cloned().collect();
        chosen.sort_by_key(|s| states.iter().position(|t| t == s));
        chosen
    };
    let start = pick(rng);
    let end = pick(rng);
    TransitionSystem { states, transitions, start, end }
}

/// A context from which `a` is provable without spending anything beyond
/// the prices of the modalities it introduces.
fn provable_context<R: Rng + ?Sized>(rng: &mut R, g: &Grammar, a: &Formula) -> Vec<Formula> {
    let price = |rng: &mut R| g.prices.choose(rng).expect("grammar has prices").clone();
    match (a, rng.gen_range(0..6)) {
        (Formula::Tensor(l, r), 0..=2) => {
            let mut out = provable_context(rng, g, l);
            out.extend(provable_context(rng, g, r));
            out
        }
        (Formula::Plus(l, r), 0..=2) => {
            let side = if rng.gen() { l } else { r };
            provable_context(rng, g, side)
        }
        (_, 0) => vec![Formula::permanent(price(rng), a.clone())],
        (_, 1) => vec![Formula::single_use(price(rng), a.clone())],
        (_, 2) => {
            let b = up_to(rng, g, 1, false);
            let mut out = provable_context(rng, g, &b);
            out.push(Formula::lolli(b, a.clone()));
            out
        }
        (_, 3) => vec![Formula::with(a.clone(), random_formula(rng, g, 0, true))],
        _ => vec![a.clone()],
    }
}

/// Two labelled proofs forming a cut: the first proves `!G, D1 |- A`, the
/// second `!G, D2, A |- C`, with `A` free of modalities and `!G` a shared
/// multiset of permanent formulas. Labels are decorations, sometimes
/// weakened. `None` when the prover cannot close one of the premises.
pub fn random_cut_instance<R: Rng + ?Sized>(rng: &mut R, limits: SearchLimits) -> Option<(LabelledProof, LabelledProof)> {
    let k = Builtin::Cost;
    let g = Grammar::new(&["p", "q", "r"], &["0", "1", "2"]).plain();
    let modal = Grammar::new(&["p", "q", "r"], &["0", "1", "2"]);
    let a = up_to(rng, &g, 3, false);
    let shared: Vec<Formula> = (0..rng.gen_range(0..=2))
        .map(|_| Formula::permanent(modal.prices.choose(rng).unwrap().clone(), up_to(rng, &g, 1, true)))
        .collect();
    let junk = |rng: &mut R| -> Vec<Formula> {
        (0..rng.gen_range(0..=1)).map(|_| up_to(rng, &modal, 1, true)).collect()
    };

    let mut d1 = provable_context(rng, &modal, &a);
    d1.extend(junk(rng));
    d1.extend(shared.iter().cloned());
    d1.shuffle(rng);

    let (mut d2, c) = match rng.gen_range(0..5) {
        0 => {
            let d = up_to(rng, &g, 2, false);
            let mut ctx = provable_context(rng, &modal, &d);
            ctx.push(a.clone());
            (ctx, Formula::tensor(a.clone(), d))
        }
        1 => {
            let e = up_to(rng, &g, 1, false);
            (vec![a.clone(), Formula::lolli(a.clone(), e.clone())], e)
        }
        2 => {
            let d = up_to(rng, &g, 1, false);
            let c = if rng.gen() { Formula::plus(a.clone(), d) } else { Formula::plus(d, a.clone()) };
            (vec![a.clone()], c)
        }
        3 => {
            let e = up_to(rng, &g, 1, false);
            let bridge = Formula::permanent(modal.prices.choose(rng).unwrap().clone(), Formula::lolli(a.clone(), e.clone()));
            (vec![a.clone(), bridge], e)
        }
        _ => {
            let c = up_to(rng, &g, 2, false);
            let mut ctx = provable_context(rng, &modal, &c);
            ctx.push(a.clone());
            (ctx, c)
        }
    };
    d2.extend(junk(rng));
    d2.extend(shared.iter().cloned());
    d2.shuffle(rng);

    let labelled = |rng: &mut R, s: Sequent| -> Option<LabelledProof> {
        let mc = min_cost(&s, &k, limits).ok()?.proof()?.clone();
        let lpf = decorate(&mc.proof, &k);
        if rng.gen_range(0..4) == 0 {
            let extra = CostValue::int(rng.gen_range(1..=2));
            let label = k.times(&lpf.label, &extra);
            return weaken_to(lpf, &label, &k);
        }
        Some(lpf)
    };
    let left = labelled(rng, Sequent::new(d1, a))?;
    let right = labelled(rng, Sequent::new(d2, c))?;
    Some((left, right))
}
