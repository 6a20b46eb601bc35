//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 5 and 6 quantify over every sequent with up to five connectives,
//! about 9.5e10 sequents, which no desk-scale run covers. By default they are
//! checked exhaustively on the sequents with at most two connectives and on
//! random samples at full size, and reported as FAIL for the unchecked rest.
//! `cargo test --test acceptance -- --full` runs the complete quantification.

use std::collections::{BTreeMap, BinaryHeap};
use std::cmp::Reverse;
use std::process::{Command, ExitCode};
use std::time::Instant;

use pricelog_core::exec::map_batch;
use pricelog_core::generate::{enumerate_sequents, random_cut_instance, random_sequent, random_transition_system, FormulaTable, Grammar};
use pricelog_core::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

// ---------------------------------------------------------------------------
// Exact rationals for the oracles, kept apart from the crate's own arithmetic.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rat {
    Fin(i128, i128),
    Inf,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

impl Rat {
    fn new(n: i128, d: i128) -> Rat {
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Rat::Fin(s * n / g, s * d / g)
    }

    fn int(n: i128) -> Rat {
        Rat::Fin(n, 1)
    }

    fn parse(s: &str) -> Rat {
        let s = s.trim();
        if s == "inf" {
            return Rat::Inf;
        }
        if let Some((n, d)) = s.split_once('/') {
            return Rat::new(n.parse().unwrap(), d.parse().unwrap());
        }
        match s.split_once('.') {
            Some((i, f)) => {
                let d = 10i128.pow(f.len() as u32);
                let n = i.parse::<i128>().unwrap() * d + f.parse::<i128>().unwrap();
                Rat::new(n, d)
            }
            None => Rat::int(s.parse().unwrap()),
        }
    }

    fn of(v: &CostValue) -> Rat {
        Rat::parse(&v.to_string())
    }

    fn add(self, o: Rat) -> Rat {
        match (self, o) {
            (Rat::Fin(a, b), Rat::Fin(c, d)) => Rat::new(a * d + c * b, b * d),
            _ => Rat::Inf,
        }
    }

    fn sub(self, o: Rat) -> Rat {
        match (self, o) {
            (Rat::Fin(a, b), Rat::Fin(c, d)) => Rat::new(a * d - c * b, b * d),
            _ => panic!("subtraction with infinity"),
        }
    }

    fn div(self, o: Rat) -> Rat {
        match (self, o) {
            (Rat::Fin(a, b), Rat::Fin(c, d)) => Rat::new(a * d, b * c),
            _ => panic!("division with infinity"),
        }
    }

    fn le(self, o: Rat) -> bool {
        match (self, o) {
            (_, Rat::Inf) => true,
            (Rat::Inf, _) => false,
            (Rat::Fin(a, b), Rat::Fin(c, d)) => a * d <= c * b,
        }
    }

    fn max(self, o: Rat) -> Rat {
        if self.le(o) { o } else { self }
    }

    fn render(self) -> String {
        match self {
            Rat::Inf => "inf".into(),
            Rat::Fin(n, 1) => n.to_string(),
            Rat::Fin(n, d) => format!("{n}/{d}"),
        }
    }
}

fn cv(r: Rat) -> CostValue {
    Builtin::Cost.parse_literal(&r.render()).unwrap()
}

// ---------------------------------------------------------------------------

struct Verdict {
    pass: bool,
    detail: String,
    /// Not checkable at desk scale; a FAIL here does not fail the suite.
    unattainable: bool,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into(), unattainable: false }
}

fn limits() -> SearchLimits {
    SearchLimits::default()
}

fn seq(s: &str, k: &dyn Semiring) -> Sequent {
    parse_sequent_plain(s, k).unwrap()
}

fn proved(o: Result<Outcome<impl Sized>, SearchError>) -> bool {
    matches!(o, Ok(Outcome::Proved(_)))
}

const RIDDLE: &str = "!p[1](w + b) |- (w*w)+(b*b)";

fn criterion_1() -> Verdict {
    let k = Builtin::Cost;
    let s = seq(RIDDLE, &k);
    let cost = match min_cost(&s, &k, limits()) {
        Ok(Outcome::Proved(mc)) => mc,
        other => return verdict(false, format!("min_cost gave {other:?}")),
    };
    let out = Command::new(env!("CARGO_BIN_EXE_pricelog")).args(["cost", RIDDLE]).env_remove("PRICELOG_SEMIRING").output().unwrap();
    let printed = String::from_utf8_lossy(&out.stdout).trim().to_string();
    let at = |b: i128| game_search(&GameState::single(s.clone(), Some(cv(Rat::int(b)))), &k, limits());
    let ok = Rat::of(&cost.cost) == Rat::int(3)
        && cost.status == CostStatus::Exact
        && printed == "3"
        && out.status.success()
        && at(2) == Ok(false)
        && at(3) == Ok(true);
    verdict(ok, format!("min_cost {} ({:?}), `pricelog cost` printed {printed:?}, budget 2 {:?}, budget 3 {:?}", cost.cost, cost.status, at(2), at(3)))
}

fn criterion_2() -> Verdict {
    let k = Builtin::Cost;
    let s = seq("!p[1]p, !s[0.8]p, !s[0.8]p |- p * p", &k);
    let bound = cv(Rat::int(3));
    let sp = spectrum(&s, &bound, &k, limits()).unwrap();
    let got: Vec<Rat> = sp.values.iter().map(Rat::of).collect();
    let want: Vec<Rat> = ["1.6", "1.8", "2", "2.6", "2.8", "3"].iter().map(|v| Rat::parse(v)).collect();
    let same = got.len() == want.len() && want.iter().all(|w| got.contains(w));
    let min_ok = sp.min().map(Rat::of) == Some(Rat::parse("1.6"));
    let om = omega(&[cv(Rat::int(1)), cv(Rat::parse("0.8"))], &bound, &k, 10_000).unwrap();
    let inside = sp.values.iter().all(|v| om.contains(v));
    let rendered: Vec<String> = sp.values.iter().map(ToString::to_string).collect();
    verdict(same && min_ok && inside && sp.exhausted, format!("spectrum {{{}}}, min {:?}, inside omega: {inside}", rendered.join(", "), sp.min().map(ToString::to_string)))
}

fn criterion_3() -> Verdict {
    let k = Builtin::Cost;
    let st = GameState::new(vec![seq("!p[1]p |- p", &k), seq("!p[1]p, !s[3]q |- q", &k)], Some(cv(Rat::int(5))));
    // Split off the goals, then pay 1 for p and 3 for q.
    let mut script = vec![(RuleName::BangSingleL, "q"), (RuleName::BangPermL, "p")];
    let mut one = |st: &GameState| {
        let (rule, goal) = script.pop().ok_or_else(|| GameError::UndefinedStrategy("script exhausted".into()))?;
        legal_moves(st, &k)
            .into_iter()
            .find(|m| m.rule == rule && st.subgames[m.subgame].consequent.to_string() == goal)
            .ok_or_else(|| GameError::UndefinedStrategy(format!("no {rule} for {goal}")))
    };
    let trace = match play(&st, &mut one, &mut Side::Left, &k) {
        Ok(t) => t,
        Err(e) => return verdict(false, format!("play failed: {e}")),
    };
    let budgets: Vec<Rat> = trace.budgets().iter().map(|b| Rat::of(b.as_ref().unwrap())).collect();
    let ok = budgets == [Rat::int(5), Rat::int(4), Rat::int(1)] && trace.outcome == PlayOutcome::Won && winning_state(&trace.terminal);
    let shown: Vec<String> = budgets.iter().map(|b| b.render()).collect();
    verdict(ok, format!("budgets {}, outcome {:?}", shown.join(" -> "), trace.outcome))
}

fn multiset_minus(a: &[Formula], b: &[Formula]) -> Option<Vec<Formula>> {
    let mut rest = a.to_vec();
    for x in b {
        let i = rest.iter().position(|y| y == x)?;
        rest.remove(i);
    }
    Some(rest)
}

fn same_multiset(a: &[Formula], b: &[Formula]) -> bool {
    a.len() == b.len() && multiset_minus(a, b).is_some_and(|r| r.is_empty())
}

fn criterion_4() -> Verdict {
    let k = Builtin::Cost;
    let mut rng = StdRng::seed_from_u64(4);
    let lim = SearchLimits { max_nodes: 200_000, ..limits() };
    let (mut instances, mut attempts, mut bad) = (0, 0, Vec::new());
    while instances < 100 && attempts < 2000 {
        attempts += 1;
        let Some((p1, p2)) = random_cut_instance(&mut rng, lim) else { continue };
        instances += 1;
        let (a, b) = (Rat::of(&p1.label), Rat::of(&p2.label));
        let result = match cut(&p1, &p2, &k) {
            Ok(r) => r,
            Err(e) => {
                bad.push(format!("cut failed: {e}"));
                continue;
            }
        };
        let cut_formula = &p1.conclusion.consequent;
        let ante2 = multiset_minus(&p2.conclusion.antecedent, std::slice::from_ref(cut_formula)).unwrap();
        let shared: Vec<Formula> = p1.conclusion.antecedent.iter().filter(|f| f.is_permanent()).cloned().collect();
        let mut from1 = p1.conclusion.antecedent.clone();
        let mut pool = ante2.clone();
        for f in &shared {
            if let Some(i) = pool.iter().position(|g| g == f) {
                pool.remove(i);
                from1.remove(from1.iter().position(|g| g == f).unwrap());
            }
        }
        let expected: Vec<Formula> = ante2.iter().cloned().chain(from1).collect();
        let conclusion_ok = same_multiset(&result.conclusion.antecedent, &expected) && result.conclusion.consequent == p2.conclusion.consequent;
        let valid = check_labelled_proof(&result, &k).is_ok();
        let cost = Rat::of(&cost_of(&skeleton(&result), &k));
        if !(conclusion_ok && valid && cost.le(a.add(b)) && Rat::of(&result.label) == a.add(b)) {
            bad.push(format!("{} and {}: conclusion {conclusion_ok}, valid {valid}, cost {}", p1.conclusion, p2.conclusion, cost.render()));
        }
    }
    let mut witness_bad = Vec::new();
    for _ in 0..20 {
        let a = Rat::new(rng.gen_range(0..30), *[1, 2, 4, 5, 10].choose(&mut rng).unwrap());
        let b = Rat::new(rng.gen_range(0..30), *[1, 2, 4, 5, 10].choose(&mut rng).unwrap());
        let (w1, w2, label) = minimality_witness(&cv(a), &cv(b), limits()).unwrap();
        let glued = cut(&w1, &w2, &k).unwrap();
        let least = match min_cost(&glued.conclusion, &k, limits()) {
            Ok(Outcome::Proved(mc)) => Rat::of(&mc.cost),
            _ => Rat::Inf,
        };
        if Rat::of(&label) != a.add(b) || least != a.add(b) {
            witness_bad.push(format!("({}, {}): label {label}, min_cost {}", a.render(), b.render(), least.render()));
        }
    }
    let ok = instances == 100 && bad.is_empty() && witness_bad.is_empty();
    let mut detail = format!("{instances} cut instances, {} failures; 20 witnesses, {} failures", bad.len(), witness_bad.len());
    for line in bad.iter().chain(&witness_bad).take(3) {
        detail.push_str(&format!("\n    {line}"));
    }
    verdict(ok, detail)
}

// ---------------------------------------------------------------------------
// Criteria 5 and 6.

fn grammar() -> Grammar {
    Grammar::new(&["p", "q"], &["0", "1", "2"])
}

#[derive(Default, Clone, Copy)]
struct Tally {
    sequents: usize,
    discrepancies: usize,
    capped: usize,
    inconclusive: usize,
}

impl Tally {
    fn add(mut self, o: Tally) -> Tally {
        self.sequents += o.sequents;
        self.discrepancies += o.discrepancies;
        self.capped += o.capped;
        self.inconclusive += o.inconclusive;
        self
    }
}

/// prove against budget-free game_search, and prove_labelled at 0..=4
/// against game_search at that budget. A capped prover answer counts as a
/// discrepancy when the game is won.
fn adequacy(s: &Sequent, lim: SearchLimits) -> Tally {
    let k = Builtin::Cost;
    let mut t = Tally { sequents: 1, ..Tally::default() };
    let mut compare = |p: Result<Outcome<()>, SearchError>, g: Result<bool, SearchError>| match (p, g) {
        (Ok(Outcome::Proved(())), Ok(w)) => t.discrepancies += usize::from(!w),
        (Ok(Outcome::Refuted), Ok(w)) => t.discrepancies += usize::from(w),
        (Ok(Outcome::Unknown), Ok(w)) => {
            t.capped += 1;
            t.discrepancies += usize::from(w);
        }
        _ => t.inconclusive += 1,
    };
    compare(prove(s, Calculus::Priced, lim).map(unit), game_search(&GameState::single(s.clone(), None), &k, lim));
    for b in 0..=4 {
        let label = cv(Rat::int(b));
        let p = prove_labelled(&LabelledSequent::new(s.clone(), label.clone()), &k, lim).map(unit);
        compare(p, game_search(&GameState::single(s.clone(), Some(label)), &k, lim));
    }
    t
}

fn unit<P>(o: Outcome<P>) -> Outcome<()> {
    match o {
        Outcome::Proved(_) => Outcome::Proved(()),
        Outcome::Refuted => Outcome::Refuted,
        Outcome::Unknown => Outcome::Unknown,
    }
}

fn fold(ts: Vec<Tally>) -> Tally {
    ts.into_iter().fold(Tally::default(), Tally::add)
}

/// Every formula with at most three connectives, by size and polarity.
struct Small {
    negative: Vec<Vec<Formula>>,
    positive: Vec<Vec<Formula>>,
    grammar: Grammar,
}

impl Small {
    fn new() -> Small {
        let grammar = grammar();
        let mut table = FormulaTable::new(&grammar);
        let negative = (0..=3).map(|n| table.exactly(n, true).to_vec()).collect();
        let positive = (0..=3).map(|n| table.exactly(n, false).to_vec()).collect();
        Small { negative, positive, grammar }
    }

    fn get(&self, n: usize, negative: bool) -> &[Formula] {
        if negative { &self.negative[n] } else { &self.positive[n] }
    }
}

/// Formulas with exactly `n` connectives, streamed; sizes above three are
/// built on the fly.
fn each_formula(small: &Small, n: usize, negative: bool, f: &mut dyn FnMut(&Formula)) {
    if n <= 3 {
        small.get(n, negative).iter().for_each(f);
        return;
    }
    for i in 0..n {
        let j = n - 1 - i;
        each_formula(small, i, negative, &mut |a| {
            each_formula(small, j, negative, &mut |b| {
                f(&Formula::tensor(a.clone(), b.clone()));
                f(&Formula::with(a.clone(), b.clone()));
                f(&Formula::plus(a.clone(), b.clone()));
            })
        });
        each_formula(small, i, !negative, &mut |a| each_formula(small, j, negative, &mut |b| f(&Formula::lolli(a.clone(), b.clone()))));
    }
    if negative {
        for kind in &small.grammar.modal_kinds {
            for price in &small.grammar.prices {
                each_formula(small, n - 1, true, &mut |body| {
                    f(&match kind {
                        ModalKind::Permanent => Formula::permanent(price.clone(), body.clone()),
                        ModalKind::SingleUse => Formula::single_use(price.clone(), body.clone()),
                    })
                });
            }
        }
    }
}

/// Multisets of small antecedent formulas, `pool` sorted by size.
fn multisets(pool: &[(Formula, usize)], from: usize, budget: usize, slots: usize, acc: &mut Vec<Formula>, emit: &mut dyn FnMut(&[Formula])) {
    emit(acc);
    if slots == 0 {
        return;
    }
    for (i, (x, size)) in pool.iter().enumerate().skip(from) {
        if *size <= budget {
            acc.push(x.clone());
            multisets(pool, i, budget - size, slots - 1, acc, emit);
            acc.pop();
        }
    }
}

/// Every sequent with at most `max_c` connectives and `max_a` antecedent
/// formulas, antecedents as multisets. At most one antecedent formula can
/// have four or more connectives, so only the small ones need ordering.
fn each_sequent(small: &Small, max_c: usize, max_a: usize, f: &mut dyn FnMut(&Sequent)) {
    let pool: Vec<(Formula, usize)> = (0..=max_c.min(3)).flat_map(|i| small.get(i, true).iter().map(move |x| (x.clone(), i))).collect();
    for c in 0..=max_c {
        let budget = max_c - c;
        each_formula(small, c, false, &mut |cons| {
            multisets(&pool, 0, budget, max_a, &mut Vec::new(), &mut |ante| f(&Sequent::new(ante.to_vec(), cons.clone())));
            if max_a == 0 {
                return;
            }
            for big in 4..=budget {
                each_formula(small, big, true, &mut |b| {
                    multisets(&pool, 0, budget - big, max_a - 1, &mut vec![b.clone()], &mut |ante| f(&Sequent::new(ante.to_vec(), cons.clone())))
                });
            }
        });
    }
}

/// Number of formulas with exactly `n` connectives, by the recurrence
/// behind the grammar: four leaves, four binary connectives (the antecedent
/// of `-o` flips polarity), two modalities at three prices in negative
/// positions.
fn formula_count(n: usize, negative: bool) -> u128 {
    if n == 0 {
        return 4;
    }
    let binary: u128 =
        (0..n).map(|i| (3 * formula_count(i, negative) + formula_count(i, !negative)) * formula_count(n - 1 - i, negative)).sum();
    binary + if negative { 6 * formula_count(n - 1, true) } else { 0 }
}

fn choose(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of sequents with at most `max_c` connectives and `max_a`
/// antecedent formulas, antecedents counted as multisets.
fn sequent_count(max_c: usize, max_a: usize) -> u128 {
    // ways[k][c]: multisets of k antecedent formulas with c connectives.
    let mut ways = vec![vec![0u128; max_c + 1]; max_a + 1];
    ways[0][0] = 1;
    for size in 0..=max_c {
        let kinds = formula_count(size, true);
        let mut next = vec![vec![0u128; max_c + 1]; max_a + 1];
        for k in 0..=max_a {
            for c in 0..=max_c {
                for m in 0..=(max_a - k) {
                    if c + m * size > max_c {
                        break;
                    }
                    next[k + m][c + m * size] += ways[k][c] * choose(kinds + m as u128 - 1, m as u128);
                }
            }
        }
        ways = next;
    }
    (0..=max_c).map(|c| formula_count(c, false) * (0..=max_a).map(|k| (0..=max_c - c).map(|d| ways[k][d]).sum::<u128>()).sum::<u128>()).sum()
}

/// The streaming enumerator used by `--full`, checked where it can be.
fn streaming_agrees() -> bool {
    let small = Small::new();
    let mut sequents = 0u128;
    each_sequent(&small, 2, 2, &mut |_| sequents += 1);
    let mut formulas = [0u128; 2];
    for (i, negative) in [true, false].into_iter().enumerate() {
        each_formula(&small, 4, negative, &mut |_| formulas[i] += 1);
    }
    sequents == enumerate_sequents(&grammar(), 2, 2).len() as u128
        && sequents == sequent_count(2, 2)
        && formulas == [formula_count(4, true), formula_count(4, false)]
}

fn criterion_5(full: bool) -> Verdict {
    let start = Instant::now();
    if full {
        assert!(streaming_agrees(), "streamed and tabled enumerations disagree");
        let small = Small::new();
        let mut t = Tally::default();
        each_sequent(&small, 5, 3, &mut |s| {
            t = t.add(adequacy(s, limits()));
            if t.sequents % 1_000_000 == 0 {
                eprintln!("  criterion 5: {} sequents, {} discrepancies", t.sequents, t.discrepancies);
            }
        });
        let ok = t.discrepancies == 0 && t.inconclusive == 0;
        return verdict(ok, format!("full scope: {} sequents, {} discrepancies, {} inconclusive", t.sequents, t.discrepancies, t.inconclusive));
    }
    let tier_a = enumerate_sequents(&grammar(), 2, 2);
    let a = fold(map_batch(&tier_a, |s| adequacy(s, limits())));
    let mut rng = StdRng::seed_from_u64(5);
    let tier_b: Vec<Sequent> = (0..10_000).map(|_| random_sequent(&mut rng, &grammar(), 5, 3)).collect();
    let b = fold(map_batch(&tier_b, |s| adequacy(s, SearchLimits { max_nodes: 200_000, ..limits() })));
    let streaming = streaming_agrees();
    let clean = a.discrepancies == 0 && b.discrepancies == 0 && a.inconclusive == 0 && streaming;
    Verdict {
        pass: false,
        unattainable: clean,
        detail: format!(
            "full scope ({} sequents) not run, streaming enumerator checked: {streaming}; exhaustive <=2 connectives: {} sequents, \
             {} discrepancies, {} capped; random <=5 connectives: {} sequents, {} discrepancies, {} capped, {} over the node limit ({:.1?})",
            sequent_count(5, 3),
            a.sequents,
            a.discrepancies,
            a.capped,
            b.sequents,
            b.discrepancies,
            b.capped,
            b.inconclusive,
            start.elapsed()
        ),
    }
}

/// Per-subgame budgets must exist, and their sum stay within `b`, whenever
/// the pair is winnable at `b`.
fn quasi_independence(pair: &[Sequent], b: i128) -> (usize, usize) {
    let k = Builtin::Cost;
    let st = GameState::new(pair.to_vec(), Some(cv(Rat::int(b))));
    match game_search(&st, &k, limits()) {
        Ok(true) => match partition_budget(pair, &cv(Rat::int(b)), &k, limits()) {
            Ok(Some(parts)) => {
                let sum = parts.iter().map(Rat::of).fold(Rat::int(0), Rat::add);
                (1, usize::from(!sum.le(Rat::int(b)) || parts.len() != 2))
            }
            _ => (1, 1),
        },
        _ => (0, 0),
    }
}

fn criterion_6(full: bool) -> Verdict {
    let start = Instant::now();
    let k = Builtin::Cost;
    if full {
        let small = Small::new();
        let (mut winnable, mut failures, mut i) = (0, 0, 0usize);
        each_sequent(&small, 5, 3, &mut |s1| {
            let mut j = 0usize;
            each_sequent(&small, 5, 3, &mut |s2| {
                if j >= i {
                    for b in 0..=4 {
                        let (w, f) = quasi_independence(&[s1.clone(), s2.clone()], b);
                        winnable += w;
                        failures += f;
                    }
                }
                j += 1;
            });
            i += 1;
        });
        return verdict(failures == 0, format!("full scope: {winnable} winnable states, {failures} failures"));
    }
    let small = enumerate_sequents(&grammar(), 1, 2);
    let pool: Vec<Sequent> = small
        .into_iter()
        .filter(|s| s.prices().iter().any(|p| Rat::of(p) != Rat::int(0)))
        .filter(|s| game_search(&GameState::single(s.clone(), Some(cv(Rat::int(4)))), &k, limits()) == Ok(true))
        .collect();
    let mut jobs = Vec::new();
    for i in 0..pool.len() {
        for j in i..pool.len() {
            jobs.push(vec![pool[i].clone(), pool[j].clone()]);
        }
    }
    let tier_a = enumerate_sequents(&grammar(), 2, 2);
    let mut rng = StdRng::seed_from_u64(6);
    let random: Vec<Vec<Sequent>> = (0..3000).map(|_| tier_a.choose_multiple(&mut rng, 2).cloned().collect()).collect();
    let run = |jobs: &[Vec<Sequent>]| {
        map_batch(jobs, |pair| (0..=4).map(|b| quasi_independence(pair, b)).fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1)))
            .into_iter()
            .fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1))
    };
    let (w1, f1) = run(&jobs);
    let (w2, f2) = run(&random);
    Verdict {
        pass: false,
        unattainable: f1 == 0 && f2 == 0,
        detail: format!(
            "full scope (pairs of {} sequents) not run; all pairs of {} priced one-connective sequents: {w1} winnable states, {f1} failures; \
             3000 random pairs with <=2 connectives: {w2} winnable states, {f2} failures ({:.1?})",
            sequent_count(5, 3),
            pool.len(),
            start.elapsed()
        ),
    }
}

fn criterion_7() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for k in [Builtin::Cost, Builtin::Security, Builtin::Max, Builtin::Probabilistic] {
        let r = check_axioms(&k, 1000, 7);
        ok &= r.passed() && r.division_pairs > 0;
        lines.push(format!("{}: {} violations, {} division pairs", r.instance, r.violations.len(), r.division_pairs));
    }
    // Closed forms of division, computed here independently.
    let mut rng = StdRng::seed_from_u64(77);
    let mut checked = 0;
    for _ in 0..1000 {
        let x = Rat::new(rng.gen_range(0..100), *[1, 2, 4, 10].choose(&mut rng).unwrap());
        let y = Rat::new(rng.gen_range(0..100), *[1, 2, 4, 10].choose(&mut rng).unwrap());
        let (b, a) = if x.le(y) { (y, x) } else { (x, y) };
        let (cb, ca) = (cv(b), cv(a));
        let cost = Builtin::Cost.div(&cb, &ca).map(|v| Rat::of(&v));
        let max = Builtin::Max.div(&cb, &ca).map(|v| Rat::of(&v));
        ok &= cost == Ok(b.sub(a)) && max == Ok(b);
        let scale = Rat::int(100);
        let (pb, pa) = (a.div(scale), b.div(scale));
        let prob = Builtin::Probabilistic.div(&cv(pb), &cv(pa)).map(|v| Rat::of(&v));
        let expected = if pa == Rat::int(0) { Rat::int(0) } else { pb.div(pa) };
        ok &= prob == Ok(expected);
        checked += 1;
    }
    verdict(ok, format!("{}; {checked} closed-form division checks", lines.join("; ")))
}

/// Single-source shortest paths by Dijkstra over exact rationals.
fn dijkstra(ts: &TransitionSystem, from: &str) -> BTreeMap<String, Rat> {
    let key = |r: Rat| match r {
        Rat::Fin(n, d) => (n as f64) / (d as f64),
        Rat::Inf => f64::INFINITY,
    };
    let mut dist: BTreeMap<String, Rat> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(from.to_string(), Rat::int(0));
    heap.push(Reverse((ordered(key(Rat::int(0))), from.to_string())));
    while let Some(Reverse((_, u))) = heap.pop() {
        let du = dist[&u];
        for t in ts.transitions.iter().filter(|t| t.from == u) {
            let nd = du.add(Rat::of(&t.price));
            if dist.get(&t.to).is_none_or(|old| !old.le(nd)) {
                dist.insert(t.to.clone(), nd);
                heap.push(Reverse((ordered(key(nd)), t.to.clone())));
            }
        }
    }
    dist
}

fn ordered(x: f64) -> u64 {
    (x * 1e6) as u64
}

fn criterion_8() -> Verdict {
    let k = Builtin::Cost;
    let mut rng = StdRng::seed_from_u64(8);
    let mut bad = Vec::new();
    let mut unreachable = 0;
    for _ in 0..20 {
        let ts = random_transition_system(&mut rng, 6, 10, 5);
        let oracle = ts
            .start
            .iter()
            .map(|s| {
                let d = dijkstra(&ts, s);
                ts.end.iter().filter_map(|e| d.get(e).copied()).fold(Rat::Inf, |m, x| if x.le(m) { x } else { m })
            })
            .fold(Rat::int(0), Rat::max);
        unreachable += usize::from(oracle == Rat::Inf);
        let s = encode_ts(&ts);
        let got = match min_cost(&s, &k, limits()) {
            Ok(Outcome::Proved(mc)) => Rat::of(&mc.cost),
            Ok(Outcome::Refuted) => Rat::Inf,
            other => {
                bad.push(format!("{s}: {other:?}"));
                continue;
            }
        };
        if got != oracle {
            bad.push(format!("{s}: min_cost {}, oracle {}", got.render(), oracle.render()));
        }
    }
    let mut detail = format!("20 systems ({unreachable} with an unreachable start), {} mismatches", bad.len());
    for line in bad.iter().take(3) {
        detail.push_str(&format!("\n    {line}"));
    }
    verdict(bad.is_empty(), detail)
}

fn criterion_9() -> Verdict {
    let k = Builtin::Probabilistic;
    let mut checks = 0;
    let mut bad = Vec::new();
    for alpha in ["0.25", "0.5", "0.75"] {
        let a = Rat::parse(alpha);
        let rest = Rat::int(1).sub(a);
        let gamma = format!("(!s[{alpha}]t1) & (!s[{}]t2), t1 -o t3, t2 -o t4", render_decimal(rest));
        let mut labels: Vec<Rat> = (0..=20).map(|i| Rat::new(i, 20)).collect();
        for edge in [a, rest] {
            labels.extend([edge, edge.add(Rat::new(1, 100)), edge.sub(Rat::new(1, 100))]);
        }
        labels.retain(|b| Rat::int(0).le(*b) && b.le(Rat::int(1)));
        for b in labels {
            for (goal, cap) in [("t3", a), ("t4", rest)] {
                let ls = parse_labelled_sequent(&format!("{gamma} |-[{}] {goal}", render_decimal(b)), &k).unwrap();
                let got = proved(prove_labelled(&ls, &k, limits()));
                checks += 1;
                if got != b.le(cap) {
                    bad.push(format!("alpha {alpha}, {goal} at {}: provable {got}", b.render()));
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{checks} labelled sequents, {} mismatches{}", bad.len(), bad.first().map(|b| format!(": {b}")).unwrap_or_default()))
}

fn render_decimal(r: Rat) -> String {
    let Rat::Fin(n, d) = r else { return "inf".into() };
    let places = (0..=6u32).find(|&p| 10i128.pow(p) % d == 0).expect("terminating decimal");
    let digits = format!("{:0>width$}", n * (10i128.pow(places) / d), width = places as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - places as usize);
    if frac.is_empty() { int.to_string() } else { format!("{int}.{frac}") }
}

fn criterion_10() -> Verdict {
    let k = Builtin::Max;
    let mut checks = 0;
    let mut bad = Vec::new();
    for (a, c) in [(1, 2), (3, 3), (0, 5)] {
        let top = Rat::int(a).max(Rat::int(c));
        let mut below = vec![top.sub(Rat::new(1, 2)), top.sub(Rat::new(1, 100))];
        if top != Rat::int(0) {
            below.push(Rat::int(0));
        }
        for goal in ["t1 * t2", "t1 & t2"] {
            let at = |b: Rat| {
                let ls = parse_labelled_sequent(&format!("!s[{a}]t1, !s[{c}]t2 |-[{}] {goal}", render_decimal(b)), &k).unwrap();
                proved(prove_labelled(&ls, &k, limits()))
            };
            for (b, want) in [(top, true), (Rat::int(a + c), true)].into_iter().chain(below.iter().map(|b| (*b, false))) {
                checks += 1;
                if at(b) != want {
                    bad.push(format!("({a}, {c}) {goal} at {}: expected {want}", b.render()));
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{checks} labelled sequents, {} mismatches{}", bad.len(), if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let full = args.iter().any(|a| a == "--full");
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: Vec<(usize, Box<dyn Fn() -> Verdict>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(criterion_3)),
        (4, Box::new(criterion_4)),
        (5, Box::new(move || criterion_5(full))),
        (6, Box::new(move || criterion_6(full))),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        let start = Instant::now();
        let v = check();
        println!("criterion {n:>2} {}: {} [{:.1?}]", if v.pass { "PASS" } else { "FAIL" }, v.detail, start.elapsed());
        if !v.pass && !v.unattainable {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
