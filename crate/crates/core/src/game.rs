//! The budget game on multisets of sequents.
//!
//! Player I picks a subgame and a rule instance whose conclusion it is.
//! Unary rules replace the subgame by the premise, `TensorR` and `LolliL`
//! replace it by both premises, and `WithR`/`PlusL` let player II pick which
//! premise replaces it. A dereliction of price `a` is legal only when the
//! budget `b` covers it (`b <= a`) and leaves `b / a`. Player I wins once
//! every subgame is an initial sequent.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{classically_invalid, Sequent};
use crate::proof::{remap_instance, LabelledProof, Proof};
use crate::prover::{min_cost, Goal, Outcome, SearchError, SearchLimits};
use crate::labelled::skeleton;
use crate::rules::{apply_rule, classify_initial, dereliction_price, rule_instances, Calculus, RuleInstance, RuleName};
use crate::semiring::{fold_times, CostValue, Semiring};

/// Subgames plus an optional budget; `None` plays the budget-free game.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameState {
    pub subgames: Vec<Sequent>,
    pub budget: Option<CostValue>,
}

impl GameState {
    pub fn new(subgames: Vec<Sequent>, budget: Option<CostValue>) -> GameState {
        GameState { subgames, budget }
    }

    pub fn single(s: Sequent, budget: Option<CostValue>) -> GameState {
        GameState { subgames: vec![s], budget }
    }

    /// Sorted subgames with sorted antecedents; equal for equal multisets.
    pub fn canonical(&self) -> GameState {
        let mut subgames: Vec<Sequent> = self.subgames.iter().map(Sequent::canonical).collect();
        subgames.sort();
        GameState { subgames, budget: self.budget.clone() }
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.subgames.iter().enumerate() {
            write!(f, "{}{s}", if i == 0 { " " } else { " ; " })?;
        }
        f.write_str(" }")?;
        if let Some(b) = &self.budget {
            write!(f, " @ {b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub subgame: usize,
    pub rule: RuleName,
    pub principal: Option<usize>,
    pub split: Option<u64>,
}

impl Move {
    pub fn new(subgame: usize, inst: RuleInstance) -> Move {
        Move { subgame, rule: inst.rule, principal: inst.principal, split: inst.split }
    }

    pub fn instance(&self) -> RuleInstance {
        RuleInstance::new(self.rule, self.principal, self.split)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in subgame {}", self.rule, self.subgame)?;
        if let Some(p) = self.principal {
            write!(f, " on formula {p}")?;
        }
        if let Some(s) = self.split {
            write!(f, " split {s:#b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveOutcome {
    Next(GameState),
    /// Player II picks one of the two successor states.
    Choice(GameState, GameState),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("illegal move {mv}: {reason}")]
    IllegalMove { mv: String, reason: String },
    #[error("strategy has no move for {0}")]
    UndefinedStrategy(String),
    #[error("play exceeded {0} moves")]
    TooLong(usize),
    #[error(transparent)]
    Search(#[from] SearchError),
}

fn price_of(st: &GameState, mv: &Move) -> Option<CostValue> {
    dereliction_price(st.subgames.get(mv.subgame)?, &mv.instance()).cloned()
}

/// Every rule instance player I may play, derelictions filtered by budget.
pub fn legal_moves(st: &GameState, k: &dyn Semiring) -> Vec<Move> {
    let mut out = Vec::new();
    for (i, s) in st.subgames.iter().enumerate() {
        for inst in rule_instances(s, Calculus::Priced) {
            let mv = Move::new(i, inst);
            if let (Some(b), Some(a)) = (&st.budget, price_of(st, &mv)) {
                if !k.leq(b, &a) {
                    continue;
                }
            }
            out.push(mv);
        }
    }
    out
}

pub fn apply_move(st: &GameState, mv: &Move, k: &dyn Semiring) -> Result<MoveOutcome, GameError> {
    let illegal = |reason: String| GameError::IllegalMove { mv: mv.to_string(), reason };
    let s = st.subgames.get(mv.subgame).ok_or_else(|| illegal(format!("there are {} subgames", st.subgames.len())))?;
    if mv.rule.is_initial() {
        return Err(illegal("initial sequents are not moves".into()));
    }
    let premises = apply_rule(s, &mv.instance(), Calculus::Priced).map_err(|e| illegal(e.to_string()))?;
    let mut budget = st.budget.clone();
    if let (Some(b), Some(a)) = (&st.budget, price_of(st, mv)) {
        if !k.leq(b, &a) {
            return Err(illegal(format!("budget {b} does not cover price {a}")));
        }
        budget = Some(k.div(b, &a).map_err(|e| illegal(e.to_string()))?);
    }
    let with = |replacement: Vec<Sequent>| {
        let mut subgames = st.subgames.clone();
        subgames.splice(mv.subgame..=mv.subgame, replacement);
        GameState { subgames, budget: budget.clone() }
    };
    let mut seqs: Vec<Sequent> = premises.into_iter().map(|p| p.sequent).collect();
    Ok(if mv.rule.is_additive_branching() {
        let right = seqs.pop().unwrap();
        let left = seqs.pop().unwrap();
        MoveOutcome::Choice(with(vec![left]), with(vec![right]))
    } else {
        MoveOutcome::Next(with(seqs))
    })
}

/// True when every subgame is an initial sequent.
pub fn winning_state(st: &GameState) -> bool {
    st.subgames.iter().all(|s| classify_initial(s).is_some())
}

/// Not won and player I has no legal move.
pub fn is_stuck(st: &GameState, k: &dyn Semiring) -> bool {
    !winning_state(st) && legal_moves(st, k).is_empty()
}

struct GameSearch<'k> {
    k: &'k dyn Semiring,
    limits: SearchLimits,
    nodes: usize,
    memo: HashMap<(Vec<Goal>, Option<CostValue>), bool>,
    focus: bool,
}

impl GameSearch<'_> {
    /// Drops won subgames and repeated permanents. A second copy of a
    /// permanent offers no move the first does not.
    fn normalise(mut subgames: Vec<Goal>) -> Vec<Goal> {
        subgames.retain(|g| classify_initial(&g.sequent()).is_none());
        for g in &mut subgames {
            g.ante.dedup_by(|b, a| a.0 == b.0 && a.0.is_permanent());
        }
        subgames.sort();
        subgames
    }

    /// True iff no dereliction in `g` can change a budget.
    fn budget_neutral(&self, g: &Goal) -> bool {
        let top = self.k.top();
        g.sequent().prices().iter().all(|p| *p == top)
    }

    /// Budget-neutral subgames do not interact with the others and are
    /// solved on their own.
    fn wins(&mut self, subgames: Vec<Goal>, budget: Option<CostValue>) -> Result<bool, SearchError> {
        if subgames.iter().any(|g| classically_invalid(g.ante.iter().map(|(f, _)| f), &g.cons)) {
            return Ok(false);
        }
        let (neutral, priced): (Vec<Goal>, Vec<Goal>) =
            subgames.into_iter().partition(|g| budget.is_none() || self.budget_neutral(g));
        for g in neutral {
            if !self.solve(vec![g], None)? {
                return Ok(false);
            }
        }
        // Restricting a joint win to one subgame spends no more, so each
        // subgame must be winnable alone.
        if priced.len() > 1 && self.focus && self.k.totally_ordered() {
            for g in &priced {
                if !self.solve(vec![g.clone()], budget.clone())? {
                    return Ok(false);
                }
            }
        }
        self.solve(priced, budget)
    }

    fn solve(&mut self, subgames: Vec<Goal>, budget: Option<CostValue>) -> Result<bool, SearchError> {
        if subgames.is_empty() {
            return Ok(true);
        }
        let key = (subgames, budget);
        if let Some(&w) = self.memo.get(&key) {
            return Ok(w);
        }
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            return Err(SearchError::LimitExceeded(self.limits.max_nodes));
        }
        let (subgames, budget) = &key;
        // Over a total order the legality checks along a play compose into a
        // single check on the product of all prices paid, so moves in
        // different subgames commute and one subgame can be played at a time.
        let focus = if self.focus && self.k.totally_ordered() { 1 } else { subgames.len() };
        let mut won = false;
        'outer: for (i, g) in subgames.iter().enumerate().take(focus) {
            if i > 0 && subgames[i - 1] == *g {
                continue;
            }
            let (instances, _) = g.instances(Calculus::Priced, self.limits.max_derelictions_per_permanent);
            for inst in instances {
                let mut next_budget = budget.clone();
                if let (Some(b), Some(a)) = (budget, g.price(&inst)) {
                    if !self.k.leq(b, a) {
                        continue;
                    }
                    next_budget = Some(self.k.div(b, a).expect("affordable division"));
                }
                let premises = g.expand(&inst, Calculus::Priced).expect("enumerated instance applies");
                let rest = || subgames.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, h)| h.clone());
                let result = if inst.rule.is_additive_branching() {
                    premises.iter().try_fold(true, |acc, p| -> Result<bool, SearchError> {
                        Ok(acc && self.wins(Self::normalise(rest().chain([p.clone()]).collect()), next_budget.clone())?)
                    })?
                } else {
                    self.wins(Self::normalise(rest().chain(premises).collect()), next_budget)?
                };
                if result {
                    won = true;
                    break 'outer;
                }
            }
        }
        self.memo.insert(key, won);
        Ok(won)
    }
}

/// Whether player I has a winning strategy from `st`. Permanent formulas are
/// derelicted at most `limits.max_derelictions_per_permanent` times per
/// subgame lineage.
pub fn game_search(st: &GameState, k: &dyn Semiring, limits: SearchLimits) -> Result<bool, SearchError> {
    search_game(st, k, limits, true)
}

fn search_game(st: &GameState, k: &dyn Semiring, limits: SearchLimits, focus: bool) -> Result<bool, SearchError> {
    let mut search = GameSearch { k, limits, nodes: 0, memo: HashMap::new(), focus };
    let start = GameSearch::normalise(st.subgames.iter().map(Goal::from_sequent).collect());
    search.wins(start, st.budget.clone())
}

pub trait FirstPlayer {
    fn choose_move(&mut self, st: &GameState) -> Result<Move, GameError>;
}

pub trait SecondPlayer {
    fn choose_side(&mut self, left: &GameState, right: &GameState) -> Side;
}

impl<F: FnMut(&GameState) -> Result<Move, GameError>> FirstPlayer for F {
    fn choose_move(&mut self, st: &GameState) -> Result<Move, GameError> {
        self(st)
    }
}

impl SecondPlayer for Side {
    fn choose_side(&mut self, _: &GameState, _: &GameState) -> Side {
        *self
    }
}

/// A player-I strategy: a finite map from canonical states to moves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strategy {
    moves: HashMap<GameState, Move>,
}

impl Strategy {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// The strategy's move in `st`, in `st`'s own coordinates.
    pub fn get(&self, st: &GameState) -> Option<Move> {
        let canon = st.canonical();
        let cm = self.moves.get(&canon)?;
        let target = &canon.subgames[cm.subgame];
        let j = st.subgames.iter().position(|s| s.canonical() == *target)?;
        Some(Move::new(j, remap_instance(&cm.instance(), target, &st.subgames[j])))
    }

    fn record(&mut self, st: &GameState, mv: &Move) -> bool {
        let canon = st.canonical();
        if self.moves.contains_key(&canon) {
            return false;
        }
        let actual = &st.subgames[mv.subgame];
        let target = actual.canonical();
        let ci = canon.subgames.iter().position(|s| *s == target).unwrap();
        let cm = Move::new(ci, remap_instance(&mv.instance(), actual, &target));
        self.moves.insert(canon, cm);
        true
    }
}

impl FirstPlayer for Strategy {
    fn choose_move(&mut self, st: &GameState) -> Result<Move, GameError> {
        self.get(st).ok_or_else(|| GameError::UndefinedStrategy(st.to_string()))
    }
}

impl FirstPlayer for &Strategy {
    fn choose_move(&mut self, st: &GameState) -> Result<Move, GameError> {
        self.get(st).ok_or_else(|| GameError::UndefinedStrategy(st.to_string()))
    }
}

fn unfold<'p>(strategy: &mut Strategy, plan: Vec<&'p Proof>, budget: Option<CostValue>, k: &dyn Semiring) {
    let Some(i) = plan.iter().position(|p| !p.rule.is_initial()) else {
        return;
    };
    let st = GameState::new(plan.iter().map(|p| p.conclusion.clone()).collect(), budget.clone());
    let node = plan[i];
    let mv = Move::new(i, node.instance());
    if !strategy.record(&st, &mv) {
        return;
    }
    let budget = match (&budget, dereliction_price(&node.conclusion, &node.instance())) {
        (Some(b), Some(a)) => Some(k.div(b, a).expect("labelled proofs only derelict affordable prices")),
        _ => budget,
    };
    let replaced = |with: Vec<&'p Proof>| -> Vec<&'p Proof> {
        let mut next = plan.clone();
        next.splice(i..=i, with);
        next
    };
    if node.rule.is_additive_branching() {
        for p in &node.premises {
            unfold(strategy, replaced(vec![p]), budget.clone(), k);
        }
    } else {
        unfold(strategy, replaced(node.premises.iter().collect()), budget, k);
    }
}

/// Player I's strategy read off a labelled proof: from its conclusion at its
/// label, play the proof's rules, lowest-numbered unfinished subgame first.
pub fn strategy_from_proof(lpf: &LabelledProof, k: &dyn Semiring) -> Strategy {
    let sk = skeleton(lpf);
    let mut strategy = Strategy::default();
    unfold(&mut strategy, vec![&sk], Some(lpf.label.clone()), k);
    strategy
}

/// The same for the budget-free game.
pub fn strategy_from_plain_proof(pf: &Proof, k: &dyn Semiring) -> Strategy {
    let mut strategy = Strategy::default();
    unfold(&mut strategy, vec![pf], None, k);
    strategy
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlayOutcome {
    Won,
    Stuck,
}

/// Where a play against a fixed strategy ends, and what it cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayValue {
    pub outcome: PlayOutcome,
    pub spend: CostValue,
    pub final_budget: Option<CostValue>,
}

/// A player-II strategy keyed by the canonical pair of choices offered.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Adversary {
    choices: HashMap<(GameState, GameState), Side>,
}

impl SecondPlayer for Adversary {
    fn choose_side(&mut self, left: &GameState, right: &GameState) -> Side {
        self.choices.get(&(left.canonical(), right.canonical())).copied().unwrap_or(Side::Left)
    }
}

fn worse_for_one(a: &PlayValue, b: &PlayValue, k: &dyn Semiring) -> bool {
    match (&a.outcome, &b.outcome) {
        (PlayOutcome::Stuck, _) => true,
        (_, PlayOutcome::Stuck) => false,
        _ => k.leq(&a.spend, &b.spend),
    }
}

fn minimax(sigma: &Strategy, st: &GameState, k: &dyn Semiring, adv: &mut Adversary, depth: usize) -> Result<PlayValue, GameError> {
    if depth > MAX_PLAY {
        return Err(GameError::TooLong(MAX_PLAY));
    }
    if winning_state(st) {
        return Ok(PlayValue { outcome: PlayOutcome::Won, spend: k.top(), final_budget: st.budget.clone() });
    }
    let Some(mv) = sigma.get(st) else {
        if legal_moves(st, k).is_empty() {
            return Ok(PlayValue { outcome: PlayOutcome::Stuck, spend: k.top(), final_budget: st.budget.clone() });
        }
        return Err(GameError::UndefinedStrategy(st.to_string()));
    };
    let price = price_of(st, &mv).unwrap_or_else(|| k.top());
    let mut value = match apply_move(st, &mv, k)? {
        MoveOutcome::Next(next) => minimax(sigma, &next, k, adv, depth + 1)?,
        MoveOutcome::Choice(l, r) => {
            let vl = minimax(sigma, &l, k, adv, depth + 1)?;
            let vr = minimax(sigma, &r, k, adv, depth + 1)?;
            let side = if worse_for_one(&vl, &vr, k) { Side::Left } else { Side::Right };
            adv.choices.insert((l.canonical(), r.canonical()), side);
            if side == Side::Left { vl } else { vr }
        }
    };
    value.spend = k.times(&value.spend, &price);
    Ok(value)
}

/// Player II's replies that make `sigma` spend the most, found by exhaustive
/// minimax over the plays `sigma` allows. A reply that leaves player I stuck
/// beats any spend.
pub fn best_adversary(sigma: &Strategy, st: &GameState, k: &dyn Semiring) -> Result<(Adversary, PlayValue), GameError> {
    let mut adv = Adversary::default();
    let value = minimax(sigma, st, k, &mut adv, 0)?;
    Ok((adv, value))
}

/// Player II answering each choice with a side from which player I cannot win,
/// when there is one. Meant for playing against an arbitrary player I.
#[derive(Debug)]
pub struct SearchAdversary<'k> {
    pub k: &'k dyn Semiring,
    pub limits: SearchLimits,
}

impl SecondPlayer for SearchAdversary<'_> {
    fn choose_side(&mut self, left: &GameState, right: &GameState) -> Side {
        match game_search(left, self.k, self.limits) {
            Ok(false) => Side::Left,
            _ => match game_search(right, self.k, self.limits) {
                Ok(false) => Side::Right,
                _ => Side::Left,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayStep {
    pub state: GameState,
    pub mv: Move,
    pub response: Option<Side>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayTrace {
    pub steps: Vec<PlayStep>,
    pub terminal: GameState,
    pub outcome: PlayOutcome,
    pub spend: CostValue,
}

impl PlayTrace {
    /// The budget before each move and at the end.
    pub fn budgets(&self) -> Vec<Option<CostValue>> {
        self.steps.iter().map(|s| s.state.budget.clone()).chain([self.terminal.budget.clone()]).collect()
    }
}

const MAX_PLAY: usize = 10_000;

/// Plays `one` against `two` from `st` until player I wins or is stuck.
pub fn play(st: &GameState, one: &mut dyn FirstPlayer, two: &mut dyn SecondPlayer, k: &dyn Semiring) -> Result<PlayTrace, GameError> {
    let mut state = st.clone();
    let mut steps = Vec::new();
    let mut spend = k.top();
    loop {
        if winning_state(&state) || legal_moves(&state, k).is_empty() {
            let outcome = if winning_state(&state) { PlayOutcome::Won } else { PlayOutcome::Stuck };
            return Ok(PlayTrace { steps, terminal: state, outcome, spend });
        }
        if steps.len() >= MAX_PLAY {
            return Err(GameError::TooLong(MAX_PLAY));
        }
        let mv = one.choose_move(&state)?;
        if let Some(a) = price_of(&state, &mv) {
            spend = k.times(&spend, &a);
        }
        let (next, response) = match apply_move(&state, &mv, k)? {
            MoveOutcome::Next(n) => (n, None),
            MoveOutcome::Choice(l, r) => match two.choose_side(&l, &r) {
                Side::Left => (l, Some(Side::Left)),
                Side::Right => (r, Some(Side::Right)),
            },
        };
        steps.push(PlayStep { state, mv, response });
        state = next;
    }
}

/// Per-subgame budgets `b_i`, each the least budget winning its subgame
/// alone, provided their product stays within `b`.
pub fn partition_budget(
    subgames: &[Sequent],
    b: &CostValue,
    k: &dyn Semiring,
    limits: SearchLimits,
) -> Result<Option<Vec<CostValue>>, SearchError> {
    let mut parts = Vec::with_capacity(subgames.len());
    for s in subgames {
        match min_cost(s, k, limits)? {
            Outcome::Proved(mc) => parts.push(mc.cost),
            _ => return Ok(None),
        }
    }
    Ok(k.leq(b, &fold_times(k, &parts)).then_some(parts))
}
