//! Priced affine intuitionistic linear logic.
//!
//! Formulas carry priced modalities `!p[a]A` (permanent, pay `a` per use) and
//! `!s[a]A` (single use). Costs live in a user-chosen [`semiring`]. The crate
//! proves sequents, computes cost-minimal proofs and cost spectra, decorates
//! proofs with labels, plays the budget game and eliminates labelled cuts.

pub mod cut;
pub mod exec;
pub mod formula;
pub mod game;
pub mod generate;
pub mod labelled;
pub mod proof;
pub mod prover;
pub mod rules;
pub mod semiring;
pub mod serial;
pub mod syntax;
pub mod ts;

pub use cut::{cut, minimality_witness, CutError};
pub use formula::{check_extended, Formula, LabelledSequent, ModalKind, Sequent};
pub use game::{
    apply_move, best_adversary, game_search, legal_moves, partition_budget, play, strategy_from_plain_proof, strategy_from_proof,
    winning_state, Adversary, FirstPlayer, GameError, GameState, Move, MoveOutcome, PlayOutcome, PlayTrace, SecondPlayer, Side,
    Strategy,
};
pub use labelled::{check_labelled_proof, cost_of, decorate, skeleton, weaken_to};
pub use proof::{check_proof, LabelledProof, Proof, ProofError, ProofTree};
pub use prover::{min_cost, omega, prove, prove_labelled, spectrum, CostStatus, MinCost, Outcome, SearchError, SearchLimits, Spectrum};
pub use rules::{apply_rule, classify_initial, permanent_split, rule_instances, Calculus, RuleInstance, RuleName};
pub use semiring::{builtin, check_axioms, Builtin, CostValue, Semiring};
pub use serial::{read_proof, write_labelled_proof, write_proof, ProofFile, SerialError};
pub use syntax::{parse_formula, parse_labelled_sequent, parse_sequent, parse_sequent_plain, ParsedSequent};
pub use ts::{encode_ts, parse_transition_system, TransitionSystem, TsError};
