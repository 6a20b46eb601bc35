//! The `play` loop: the human answers the decisions of one role, the engine
//! plays the other.
//!
//! At a prompt, enter an option index, `trace` to print the play so far,
//! `save FILE` to write it to a file, or `quit`.

use std::io::{self, BufRead, Write};

use pricelog_core::{Builtin, GameState, PlayOutcome, SearchLimits};
use pricelog_service::session::{Event, Phase, Role, Session};
use pricelog_service::{EventView, SessionView};
use serde_json::json;

use crate::commands::{CliError, Report};
use crate::{Format, RoleArg};

fn render_state(st: &GameState) -> String {
    let mut out = String::new();
    for (i, s) in st.subgames.iter().enumerate() {
        out.push_str(&format!("  [{i}] {s}\n"));
    }
    if let Some(b) = &st.budget {
        out.push_str(&format!("  budget {b}\n"));
    }
    out
}

fn render_event(e: &Event) -> String {
    let who = if e.by_engine { "engine" } else { "you" };
    let actor = match e.actor {
        Role::I => "I",
        Role::II => "II",
    };
    let mut line = format!("{actor} ({who}): {}", e.text);
    if let (Some(a), Some(b)) = (&e.budget_before, &e.budget_after) {
        if a != b {
            line.push_str(&format!("   budget {a} -> {b}"));
        }
    }
    line
}

/// Plays on `input`, writing prompts and narration to `out`.
pub fn run_loop(session: &mut Session, trace: &mut Vec<Event>, input: &mut dyn BufRead, out: &mut dyn Write) -> io::Result<bool> {
    loop {
        if let Phase::Over(outcome) = &session.phase {
            let verdict = match outcome {
                PlayOutcome::Won => "player I wins",
                PlayOutcome::Stuck => "player I is stuck and loses",
            };
            writeln!(out, "{}{verdict}", render_state(&session.state))?;
            return Ok(true);
        }
        writeln!(out, "{}", render_state(&session.state).trim_end())?;
        let view = SessionView::of("repl", session);
        for o in &view.options {
            let price = o.price.as_ref().map(|p| format!("   (price {p})")).unwrap_or_default();
            writeln!(out, "  {}) {}{price}", o.index, o.text)?;
        }
        write!(out, "> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            writeln!(out, "\nend of input; play aborted")?;
            return Ok(false);
        }
        let line = line.trim();
        match line.split_once(' ').unwrap_or((line, "")) {
            ("quit" | "q", _) => return Ok(false),
            ("trace", _) => {
                for e in trace.iter() {
                    writeln!(out, "{}", render_event(e))?;
                }
            }
            ("save", file) if !file.trim().is_empty() => {
                let text: String = trace.iter().map(|e| render_event(e) + "\n").collect();
                match std::fs::write(file.trim(), text) {
                    Ok(()) => writeln!(out, "trace saved to {}", file.trim())?,
                    Err(e) => writeln!(out, "cannot save: {e}")?,
                }
            }
            (n, _) => match n.parse::<usize>() {
                Ok(i) => match session.choose(i) {
                    Ok(events) => {
                        for e in &events {
                            writeln!(out, "{}", render_event(e))?;
                        }
                        trace.extend(events);
                    }
                    Err(e) => writeln!(out, "{e}")?,
                },
                Err(_) => writeln!(out, "enter an option index, `trace`, `save FILE` or `quit`")?,
            },
        }
    }
}

pub fn play(text: &str, budget: Option<&str>, role: RoleArg, k: &Builtin, limits: SearchLimits, format: Format) -> Result<Report, CliError> {
    let s = match pricelog_core::parse_sequent(text, k).map_err(|e| CliError::usage("parse", e))? {
        pricelog_core::ParsedSequent::Plain(s) => s,
        pricelog_core::ParsedSequent::Labelled(_) => return Err(CliError::usage("parse", "give the budget with --budget")),
    };
    let budget = budget.map(|b| pricelog_core::Semiring::parse_literal(k, b.trim())).transpose().map_err(|e| CliError::usage("label", e))?;
    let human = match role {
        RoleArg::I => Role::I,
        RoleArg::II => Role::II,
    };
    let (mut session, mut trace) = Session::start(s, budget, *k, human, false, limits).map_err(|e| CliError::usage("session", e))?;
    let stdin = io::stdin();
    let mut input = stdin.lock();
    // Structured output is one document on stdout, so the dialogue goes to stderr.
    let finished = match format {
        Format::Text => {
            let mut out = io::stdout().lock();
            for e in &trace {
                let _ = writeln!(out, "{}", render_event(e));
            }
            run_loop(&mut session, &mut trace, &mut input, &mut out)
        }
        Format::Structured => run_loop(&mut session, &mut trace, &mut input, &mut io::stderr().lock()),
    }
    .map_err(|e| CliError { kind: "io", message: e.to_string(), code: 1 })?;
    let human_won = match session.phase {
        Phase::Over(PlayOutcome::Won) => human == Role::I,
        Phase::Over(PlayOutcome::Stuck) => human == Role::II,
        _ => false,
    };
    let view = SessionView::of("repl", &session);
    let data = json!({
        "finished": finished,
        "outcome": view.outcome,
        "human_won": human_won,
        "final": view.state,
        "history": view.history,
        "narration": trace.iter().map(EventView::of).collect::<Vec<_>>(),
    });
    Ok(Report { text: String::new(), data, code: if finished && human_won { 0 } else { 1 } })
}
