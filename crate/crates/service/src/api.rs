//! Request and response payloads. Field names match `schema.json`.

use pricelog_core::{
    builtin, decorate, min_cost, parse_sequent, prove_labelled, write_labelled_proof, Builtin, CostStatus, GameState, Move, Outcome,
    ParsedSequent, PlayOutcome, RuleName, SearchError, SearchLimits, Semiring, Side,
};
use serde::{Deserialize, Serialize};

use crate::session::{describe_move, Choice, Decision, Event, Phase, Role, Session};
use crate::ApiError;

fn cost() -> String {
    "cost".into()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitsBody {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_height: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_derelict: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<usize>,
}

impl LimitsBody {
    pub fn resolve(&self) -> SearchLimits {
        let d = SearchLimits::default();
        SearchLimits {
            max_height: self.max_height.unwrap_or(d.max_height),
            max_derelictions_per_permanent: self.max_derelict.unwrap_or(d.max_derelictions_per_permanent),
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProveRequest {
    pub sequent: String,
    #[serde(default = "cost")]
    pub semiring: String,
    #[serde(default)]
    pub limits: LimitsBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProveResponse {
    pub provable: bool,
    /// `proved`, `refuted` or `unknown`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_status: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSession {
    pub sequent: String,
    #[serde(default)]
    pub budget: Option<String>,
    #[serde(default = "cost")]
    pub semiring: String,
    /// The human's role; the engine plays the other.
    pub role: Role,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub limits: LimitsBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRequest {
    pub option: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateView {
    pub subgames: Vec<String>,
    pub budget: Option<String>,
}

impl StateView {
    pub fn of(st: &GameState) -> StateView {
        StateView { subgames: st.subgames.iter().map(ToString::to_string).collect(), budget: st.budget.as_ref().map(ToString::to_string) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveView {
    pub subgame: usize,
    pub rule: RuleName,
    #[serde(default)]
    pub principal: Option<usize>,
    #[serde(default)]
    pub split: Option<u64>,
}

impl MoveView {
    pub fn of(mv: &Move) -> MoveView {
        MoveView { subgame: mv.subgame, rule: mv.rule, principal: mv.principal, split: mv.split }
    }

    pub fn to_move(&self) -> Move {
        Move { subgame: self.subgame, rule: self.rule, principal: self.principal, split: self.split }
    }
}

fn side_name(side: Side) -> String {
    match side {
        Side::Left => "left".into(),
        Side::Right => "right".into(),
    }
}

pub fn parse_side(name: &str) -> Option<Side> {
    match name {
        "left" => Some(Side::Left),
        "right" => Some(Side::Right),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionView {
    pub index: usize,
    pub text: String,
    #[serde(default, rename = "move")]
    pub mv: Option<MoveView>,
    #[serde(default)]
    pub side: Option<String>,
    /// The dereliction price, for moves that pay one.
    #[serde(default)]
    pub price: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingView {
    #[serde(rename = "move")]
    pub mv: MoveView,
    pub left: StateView,
    pub right: StateView,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionView {
    pub actor: Role,
    #[serde(default, rename = "move")]
    pub mv: Option<MoveView>,
    #[serde(default)]
    pub side: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventView {
    pub actor: Role,
    /// `engine` or `human`.
    pub by: String,
    pub text: String,
    pub budget_before: Option<String>,
    pub budget_after: Option<String>,
}

impl EventView {
    pub fn of(e: &Event) -> EventView {
        EventView {
            actor: e.actor,
            by: if e.by_engine { "engine" } else { "human" }.into(),
            text: e.text.clone(),
            budget_before: e.budget_before.as_ref().map(ToString::to_string),
            budget_after: e.budget_after.as_ref().map(ToString::to_string),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub semiring: String,
    pub human: Role,
    pub initial: StateView,
    pub state: StateView,
    pub pending: Option<PendingView>,
    pub to_act: Option<Role>,
    pub options: Vec<OptionView>,
    pub game_over: bool,
    /// `won` or `stuck` once the game is over.
    pub outcome: Option<String>,
    pub history: Vec<DecisionView>,
}

impl SessionView {
    pub fn of(id: &str, s: &Session) -> SessionView {
        let k = &s.semiring;
        let options = s
            .options()
            .into_iter()
            .enumerate()
            .map(|(index, c)| match c {
                Choice::Move(mv) => OptionView {
                    index,
                    text: describe_move(&s.state, &mv, k),
                    price: pricelog_core::rules::dereliction_price(&s.state.subgames[mv.subgame], &mv.instance()).map(ToString::to_string),
                    mv: Some(MoveView::of(&mv)),
                    side: None,
                },
                Choice::Side(side) => {
                    let Phase::Choice { mv, left, right } = &s.phase else { unreachable!("sides are offered on choices") };
                    let next = if side == Side::Left { left } else { right };
                    OptionView { index, text: next.subgames[mv.subgame].to_string(), mv: None, side: Some(side_name(side)), price: None }
                }
            })
            .collect();
        let history = s
            .history
            .iter()
            .map(|d| match d {
                Decision::Move(mv) => DecisionView { actor: Role::I, mv: Some(MoveView::of(mv)), side: None },
                Decision::Side(side) => DecisionView { actor: Role::II, mv: None, side: Some(side_name(*side)) },
            })
            .collect();
        SessionView {
            id: id.to_string(),
            semiring: k.name().to_string(),
            human: s.human,
            initial: StateView::of(&s.initial),
            state: StateView::of(&s.state),
            pending: match &s.phase {
                Phase::Choice { mv, left, right } => Some(PendingView { mv: MoveView::of(mv), left: StateView::of(left), right: StateView::of(right) }),
                _ => None,
            },
            to_act: s.to_act(),
            options,
            game_over: matches!(s.phase, Phase::Over(_)),
            outcome: match &s.phase {
                Phase::Over(PlayOutcome::Won) => Some("won".into()),
                Phase::Over(PlayOutcome::Stuck) => Some("stuck".into()),
                _ => None,
            },
            history,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
    pub state: SessionView,
    pub narration: Vec<EventView>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveResponse {
    pub state: SessionView,
    pub narration: Vec<EventView>,
}

fn semiring(name: &str) -> Result<Builtin, ApiError> {
    builtin(name).map_err(|e| ApiError::unprocessable("semiring", e))
}

fn search_failure(e: SearchError) -> Result<ProveResponse, ApiError> {
    match e {
        SearchError::LimitExceeded(_) => Ok(ProveResponse { provable: false, status: "unknown".into(), proof: None, cost: None, cost_status: None }),
        other => Err(ApiError::unprocessable("search", other)),
    }
}

fn status_name(s: CostStatus) -> String {
    match s {
        CostStatus::Exact => "exact",
        CostStatus::BestFound => "best_found",
        CostStatus::Aggregate => "aggregate",
    }
    .into()
}

fn proof_value(text: String) -> serde_json::Value {
    serde_json::from_str(&text).expect("proof files are JSON")
}

/// A plain sequent gets its least cost and a proof realising it; a labelled
/// one is decided at its label.
pub fn prove(req: &ProveRequest) -> Result<ProveResponse, ApiError> {
    let k = semiring(&req.semiring)?;
    let limits = req.limits.resolve();
    let parsed = parse_sequent(&req.sequent, &k).map_err(|e| ApiError::unprocessable("parse", e))?;
    let refuted = |status: &str| ProveResponse { provable: false, status: status.into(), proof: None, cost: None, cost_status: None };
    match parsed {
        ParsedSequent::Plain(s) => match min_cost(&s, &k, limits) {
            Ok(Outcome::Proved(mc)) => Ok(ProveResponse {
                provable: true,
                status: "proved".into(),
                proof: Some(proof_value(write_labelled_proof(&decorate(&mc.proof, &k), k.name()))),
                cost: Some(mc.cost.to_string()),
                cost_status: Some(status_name(mc.status)),
            }),
            Ok(Outcome::Refuted) => Ok(refuted("refuted")),
            Ok(Outcome::Unknown) => Ok(refuted("unknown")),
            Err(e) => search_failure(e),
        },
        ParsedSequent::Labelled(ls) => match prove_labelled(&ls, &k, limits) {
            Ok(Outcome::Proved(lpf)) => Ok(ProveResponse {
                provable: true,
                status: "proved".into(),
                proof: Some(proof_value(write_labelled_proof(&lpf, k.name()))),
                cost: None,
                cost_status: None,
            }),
            Ok(Outcome::Refuted) => Ok(refuted("refuted")),
            Ok(Outcome::Unknown) => Ok(refuted("unknown")),
            Err(e) => search_failure(e),
        },
    }
}

pub fn start(req: &CreateSession) -> Result<(Session, Vec<Event>), ApiError> {
    let k = semiring(&req.semiring)?;
    let s = match parse_sequent(&req.sequent, &k).map_err(|e| ApiError::unprocessable("parse", e))? {
        ParsedSequent::Plain(s) => s,
        ParsedSequent::Labelled(_) => return Err(ApiError::unprocessable("parse", "give the budget in `budget`, not as a sequent label")),
    };
    let budget = req.budget.as_deref().map(|b| k.parse_literal(b.trim())).transpose().map_err(|e| ApiError::unprocessable("label", e))?;
    Ok(Session::start(s, budget, k, req.role, req.strict, req.limits.resolve())?)
}
