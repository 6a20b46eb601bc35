//! Interactive game sessions: one human, one engine.

use pricelog_core::game::SearchAdversary;
use pricelog_core::{
    apply_move, legal_moves, prove, prove_labelled, strategy_from_plain_proof, strategy_from_proof, winning_state, Builtin,
    Calculus, CostValue, GameError, GameState, LabelledSequent, Move, MoveOutcome, Outcome, PlayOutcome, SearchError,
    SearchLimits, Semiring, Sequent, Side, Strategy,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    I,
    II,
}

impl Role {
    fn other(self) -> Role {
        match self {
            Role::I => Role::II,
            Role::II => Role::I,
        }
    }
}

/// A decision taken in a session, by either side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Move(Move),
    Side(Side),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Player I is to move in `Session::state`.
    Move,
    /// Player I played `mv`; player II picks `left` or `right`.
    Choice { mv: Move, left: Box<GameState>, right: Box<GameState> },
    Over(PlayOutcome),
}

/// One option offered to the human.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Choice {
    Move(Move),
    Side(Side),
}

/// What happened on one decision, for narration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub actor: Role,
    pub by_engine: bool,
    pub text: String,
    pub budget_before: Option<CostValue>,
    pub budget_after: Option<CostValue>,
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("option {index} does not exist; {available} options are available")]
    NoSuchOption { index: usize, available: usize },
    #[error("the game is over")]
    GameOver,
    #[error("player I has no winning strategy from {0}")]
    Unwinnable(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Game(#[from] GameError),
}

pub struct Session {
    pub semiring: Builtin,
    pub human: Role,
    pub initial: GameState,
    pub state: GameState,
    pub phase: Phase,
    pub history: Vec<Decision>,
    engine: Option<Strategy>,
    limits: SearchLimits,
}

/// Player I's strategy from a proof of the sequent at the budget.
fn winning_strategy(s: &Sequent, budget: Option<&CostValue>, k: &Builtin, limits: SearchLimits) -> Result<Option<Strategy>, SearchError> {
    Ok(match budget {
        Some(b) => match prove_labelled(&LabelledSequent::new(s.clone(), b.clone()), k, limits)? {
            Outcome::Proved(lpf) => Some(strategy_from_proof(&lpf, k)),
            _ => None,
        },
        None => match prove(s, Calculus::Priced, limits)? {
            Outcome::Proved(pf) => Some(strategy_from_plain_proof(&pf, k)),
            _ => None,
        },
    })
}

pub fn describe_move(st: &GameState, mv: &Move, k: &dyn Semiring) -> String {
    let s = &st.subgames[mv.subgame];
    let mut text = format!("{} in subgame {}", mv.rule, mv.subgame);
    if let Some(p) = mv.principal {
        text.push_str(&format!(" on {}", s.antecedent[p]));
    }
    match apply_move(st, mv, k) {
        Ok(MoveOutcome::Next(next)) if mv.rule.is_multiplicative_branching() => {
            let parts: Vec<String> = next.subgames[mv.subgame..mv.subgame + 2].iter().map(ToString::to_string).collect();
            text.push_str(&format!(": {}", parts.join(" ; ")));
        }
        Ok(MoveOutcome::Next(next)) => text.push_str(&format!(": {}", next.subgames[mv.subgame])),
        Ok(MoveOutcome::Choice(l, r)) => text.push_str(&format!(": {} or {}", l.subgames[mv.subgame], r.subgames[mv.subgame])),
        Err(_) => {}
    }
    text
}

impl Session {
    /// Starts a session and lets the engine play until the human must act.
    /// With `strict`, an engine playing I must have a winning strategy.
    pub fn start(
        s: Sequent,
        budget: Option<CostValue>,
        semiring: Builtin,
        human: Role,
        strict: bool,
        limits: SearchLimits,
    ) -> Result<(Session, Vec<Event>), SessionError> {
        let engine = match human {
            Role::II => winning_strategy(&s, budget.as_ref(), &semiring, limits)?,
            Role::I => None,
        };
        let initial = GameState::single(s, budget);
        if human == Role::II && engine.is_none() && strict {
            return Err(SessionError::Unwinnable(initial.to_string()));
        }
        let mut session = Session {
            semiring,
            human,
            state: initial.clone(),
            initial,
            phase: Phase::Move,
            history: Vec::new(),
            engine,
            limits,
        };
        let mut events = Vec::new();
        session.settle();
        session.advance(&mut events)?;
        Ok((session, events))
    }

    pub fn to_act(&self) -> Option<Role> {
        match self.phase {
            Phase::Move => Some(Role::I),
            Phase::Choice { .. } => Some(Role::II),
            Phase::Over(_) => None,
        }
    }

    /// The options open to the human, in index order; empty while the game
    /// is over.
    pub fn options(&self) -> Vec<Choice> {
        if self.to_act() != Some(self.human) {
            return Vec::new();
        }
        match &self.phase {
            Phase::Move => legal_moves(&self.state, &self.semiring).into_iter().map(Choice::Move).collect(),
            Phase::Choice { .. } => vec![Choice::Side(Side::Left), Choice::Side(Side::Right)],
            Phase::Over(_) => Vec::new(),
        }
    }

    /// Applies the human's option, then the engine's replies.
    pub fn choose(&mut self, index: usize) -> Result<Vec<Event>, SessionError> {
        if matches!(self.phase, Phase::Over(_)) {
            return Err(SessionError::GameOver);
        }
        let options = self.options();
        let choice = options.get(index).cloned().ok_or(SessionError::NoSuchOption { index, available: options.len() })?;
        let mut events = Vec::new();
        self.decide(choice, false, &mut events)?;
        self.advance(&mut events)?;
        Ok(events)
    }

    fn settle(&mut self) {
        if self.phase != Phase::Move {
            return;
        }
        if winning_state(&self.state) {
            self.phase = Phase::Over(PlayOutcome::Won);
        } else if legal_moves(&self.state, &self.semiring).is_empty() {
            self.phase = Phase::Over(PlayOutcome::Stuck);
        }
    }

    fn decide(&mut self, choice: Choice, by_engine: bool, events: &mut Vec<Event>) -> Result<(), SessionError> {
        let before = self.state.budget.clone();
        let (actor, text) = match (&choice, std::mem::replace(&mut self.phase, Phase::Move)) {
            (Choice::Move(mv), Phase::Move) => {
                let text = describe_move(&self.state, mv, &self.semiring);
                match apply_move(&self.state, mv, &self.semiring)? {
                    MoveOutcome::Next(next) => self.state = next,
                    MoveOutcome::Choice(left, right) => self.phase = Phase::Choice { mv: mv.clone(), left: Box::new(left), right: Box::new(right) },
                }
                (Role::I, text)
            }
            (Choice::Side(side), Phase::Choice { mv, left, right }) => {
                let next = if *side == Side::Left { left } else { right };
                let name = if *side == Side::Left { "left" } else { "right" };
                let text = format!("{name} after {}: {}", mv.rule, next.subgames[mv.subgame]);
                self.state = *next;
                (Role::II, text)
            }
            _ => unreachable!("options match the phase"),
        };
        let after = match &self.phase {
            Phase::Choice { left, .. } => left.budget.clone(),
            _ => self.state.budget.clone(),
        };
        self.history.push(match choice {
            Choice::Move(mv) => Decision::Move(mv),
            Choice::Side(side) => Decision::Side(side),
        });
        events.push(Event { actor, by_engine, text, budget_before: before, budget_after: after });
        self.settle();
        Ok(())
    }

    fn engine_choice(&mut self) -> Result<Choice, SessionError> {
        Ok(match &self.phase {
            Phase::Move => {
                let planned = self.engine.as_ref().and_then(|s| s.get(&self.state));
                Choice::Move(match planned {
                    Some(mv) => mv,
                    None => legal_moves(&self.state, &self.semiring).into_iter().next().expect("settled states have moves"),
                })
            }
            Phase::Choice { left, right, .. } => {
                let mut adversary = SearchAdversary { k: &self.semiring, limits: self.limits };
                Choice::Side(pricelog_core::SecondPlayer::choose_side(&mut adversary, left, right))
            }
            Phase::Over(_) => unreachable!("no decisions after the game"),
        })
    }

    fn advance(&mut self, events: &mut Vec<Event>) -> Result<(), SessionError> {
        while let Some(actor) = self.to_act() {
            if actor == self.human {
                break;
            }
            debug_assert_eq!(actor, self.human.other());
            let choice = self.engine_choice()?;
            self.decide(choice, true, events)?;
        }
        Ok(())
    }
}

/// Replays `history` from `initial`; the state and phase it ends in.
pub fn replay(initial: &GameState, history: &[Decision], k: &dyn Semiring) -> Result<(GameState, Option<(GameState, GameState)>), GameError> {
    let mut state = initial.clone();
    let mut pending = None;
    for d in history {
        match d {
            Decision::Move(mv) => match apply_move(&state, mv, k)? {
                MoveOutcome::Next(next) => state = next,
                MoveOutcome::Choice(l, r) => pending = Some((l, r)),
            },
            Decision::Side(side) => {
                let (l, r) = pending.take().ok_or_else(|| GameError::IllegalMove { mv: format!("{side:?}"), reason: "no choice is pending".into() })?;
                state = if *side == Side::Left { l } else { r };
            }
        }
    }
    Ok((state, pending))
}
