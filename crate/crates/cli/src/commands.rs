use std::fs;
use std::path::Path;

use pricelog_core::{
    builtin, check_axioms, cost_of, cut, decorate, encode_ts, min_cost, parse_sequent, parse_transition_system, prove, prove_labelled,
    read_proof, skeleton, spectrum, write_labelled_proof, write_proof, Builtin, Calculus, CostStatus, LabelledProof, LabelledSequent,
    Outcome, ParsedSequent, ProofFile, SearchError, SearchLimits, Semiring, Sequent,
};
use serde_json::{json, Value};

use crate::render::{render_labelled, render_proof};
use crate::{repl, Cli, Command};

/// What a successful run prints, in both formats, and its exit code.
pub struct Report {
    pub text: String,
    pub data: Value,
    pub code: u8,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn usage(kind: &'static str, message: impl ToString) -> CliError {
        CliError { kind, message: message.to_string(), code: 2 }
    }

    fn failure(kind: &'static str, message: impl ToString) -> CliError {
        CliError { kind, message: message.to_string(), code: 1 }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> CliError {
        match e {
            SearchError::LimitExceeded(_) => CliError::failure("limit", e),
            _ => CliError::usage("input", e),
        }
    }
}

fn report(text: String, data: Value, success: bool) -> Report {
    Report { text, data, code: if success { 0 } else { 1 } }
}

pub fn semiring(cli: &Cli) -> Result<Builtin, CliError> {
    builtin(&cli.semiring).map_err(|e| CliError::usage("semiring", e))
}

fn parse(text: &str, k: &Builtin) -> Result<ParsedSequent, CliError> {
    parse_sequent(text, k).map_err(|e| CliError::usage("parse", e))
}

fn plain(text: &str, k: &Builtin) -> Result<Sequent, CliError> {
    match parse(text, k)? {
        ParsedSequent::Plain(s) => Ok(s),
        ParsedSequent::Labelled(_) => Err(CliError::usage("parse", "expected a sequent without a label")),
    }
}

fn label(text: &str, k: &Builtin) -> Result<pricelog_core::CostValue, CliError> {
    k.parse_literal(text.trim()).map_err(|e| CliError::usage("label", e))
}

fn proof_json(text: String) -> Value {
    serde_json::from_str(&text).expect("proof files are JSON")
}

fn status_name(o: &Outcome<impl Sized>) -> &'static str {
    match o {
        Outcome::Proved(_) => "proved",
        Outcome::Refuted => "refuted",
        Outcome::Unknown => "unknown",
    }
}

fn undecided_note(o: &Outcome<impl Sized>) -> &'static str {
    match o {
        Outcome::Unknown => "not provable within the search limits",
        _ => "not provable",
    }
}

fn cost_status(s: CostStatus) -> &'static str {
    match s {
        CostStatus::Exact => "exact",
        CostStatus::BestFound => "best_found",
        CostStatus::Aggregate => "aggregate",
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let k = semiring(cli)?;
    let limits = cli.limits();
    match &cli.command {
        Command::Prove { sequent } => prove_cmd(sequent, &k, limits),
        Command::Cost { sequent } => cost_cmd(sequent, &k, limits),
        Command::Spectrum { sequent, bound } => spectrum_cmd(sequent, bound, &k, limits),
        Command::Play { sequent, budget, role } => repl::play(sequent, budget.as_deref(), *role, &k, limits, cli.format),
        Command::CheckSemiring { samples, seed } => {
            let r = check_axioms(&k, *samples, *seed);
            Ok(report(r.to_string(), serde_json::to_value(&r).unwrap(), r.passed()))
        }
        Command::Cut { p1, p2, output } => cut_cmd(p1, p2, output.as_deref()),
        Command::EncodeTs { file, budget } => encode_cmd(file, budget.as_deref(), &k, limits),
        Command::Serve { port } => serve(*port),
    }
}

fn prove_cmd(text: &str, k: &Builtin, limits: SearchLimits) -> Result<Report, CliError> {
    match parse(text, k)? {
        ParsedSequent::Plain(s) => {
            let o = prove(&s, Calculus::Priced, limits)?;
            let status = status_name(&o);
            Ok(match o {
                Outcome::Proved(pf) => report(
                    format!("provable\n{}", render_proof(&pf)),
                    json!({ "sequent": s.to_string(), "provable": true, "status": status, "proof": proof_json(write_proof(&pf, k.name())) }),
                    true,
                ),
                o => report(undecided_note(&o).into(), json!({ "sequent": s.to_string(), "provable": false, "status": status }), false),
            })
        }
        ParsedSequent::Labelled(ls) => {
            let o = prove_labelled(&ls, k, limits)?;
            let status = status_name(&o);
            Ok(match o {
                Outcome::Proved(lpf) => report(
                    format!("provable at {}\n{}", ls.label, render_labelled(&lpf)),
                    json!({ "sequent": ls.to_string(), "provable": true, "status": status, "proof": proof_json(write_labelled_proof(&lpf, k.name())) }),
                    true,
                ),
                o => report(
                    format!("{} at {}", undecided_note(&o), ls.label),
                    json!({ "sequent": ls.to_string(), "provable": false, "status": status }),
                    false,
                ),
            })
        }
    }
}

fn cost_cmd(text: &str, k: &Builtin, limits: SearchLimits) -> Result<Report, CliError> {
    let s = plain(text, k)?;
    let o = min_cost(&s, k, limits)?;
    let status = status_name(&o);
    Ok(match o {
        Outcome::Proved(mc) => {
            let mut text = mc.cost.to_string();
            match mc.status {
                CostStatus::Exact => {}
                CostStatus::BestFound => text.push_str("\n(best found; the search limits were reached)"),
                CostStatus::Aggregate => text.push_str("\n(join of incomparable optimal costs)"),
            }
            let lpf = decorate(&mc.proof, k);
            report(
                text,
                json!({
                    "sequent": s.to_string(),
                    "provable": true,
                    "cost": mc.cost.to_string(),
                    "cost_status": cost_status(mc.status),
                    "proof": proof_json(write_labelled_proof(&lpf, k.name())),
                }),
                true,
            )
        }
        o => report(undecided_note(&o).into(), json!({ "sequent": s.to_string(), "provable": false, "status": status }), false),
    })
}

fn spectrum_cmd(text: &str, bound: &str, k: &Builtin, limits: SearchLimits) -> Result<Report, CliError> {
    let s = plain(text, k)?;
    let bound = label(bound, k)?;
    let sp = spectrum(&s, &bound, k, limits)?;
    let values: Vec<String> = sp.values.iter().map(ToString::to_string).collect();
    let mut text = format!("{{{}}}", values.join(", "));
    if let Some(m) = sp.min() {
        text.push_str(&format!("\nminimum {m}"));
    }
    if !sp.exhausted {
        text.push_str("\n(the search limits were reached; more values may exist)");
    }
    let data = json!({
        "sequent": s.to_string(),
        "bound": bound.to_string(),
        "values": values,
        "min": sp.min().map(ToString::to_string),
        "exhausted": sp.exhausted,
    });
    Ok(report(text, data, !sp.values.is_empty()))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage("io", format!("{}: {e}", path.display())))
}

/// A labelled proof from a file; plain proofs are decorated.
fn labelled_from(path: &Path) -> Result<(Builtin, LabelledProof), CliError> {
    let file = read_proof(&read_file(path)?).map_err(|e| CliError::usage("proof", format!("{}: {e}", path.display())))?;
    Ok(match file {
        ProofFile::Labelled { semiring, proof } => (builtin(&semiring).map_err(|e| CliError::usage("semiring", e))?, proof),
        ProofFile::Plain { semiring, proof } => {
            let k = builtin(&semiring).map_err(|e| CliError::usage("semiring", e))?;
            let lpf = decorate(&proof, &k);
            (k, lpf)
        }
    })
}

fn cut_cmd(p1: &Path, p2: &Path, output: Option<&Path>) -> Result<Report, CliError> {
    let (k1, a) = labelled_from(p1)?;
    let (k2, b) = labelled_from(p2)?;
    if k1 != k2 {
        return Err(CliError::usage("semiring", format!("the proofs use different semirings ({} and {})", k1.name(), k2.name())));
    }
    let result = cut(&a, &b, &k1).map_err(|e| CliError::usage("cut", e))?;
    let file = write_labelled_proof(&result, k1.name());
    let data = json!({
        "conclusion": result.conclusion.to_string(),
        "label": result.label.to_string(),
        "cost": cost_of(&skeleton(&result), &k1).to_string(),
        "proof": proof_json(file.clone()),
    });
    let text = match output {
        Some(path) => {
            fs::write(path, &file).map_err(|e| CliError::failure("io", format!("{}: {e}", path.display())))?;
            format!("{} |-[{}] {}\nwritten to {}", render_ante(&result), result.label, result.conclusion.consequent, path.display())
        }
        None => file,
    };
    Ok(report(text, data, true))
}

fn render_ante(lpf: &LabelledProof) -> String {
    lpf.conclusion.antecedent.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn encode_cmd(path: &Path, budget: Option<&str>, k: &Builtin, limits: SearchLimits) -> Result<Report, CliError> {
    let ts = parse_transition_system(&read_file(path)?, k).map_err(|e| CliError::usage("transition_system", format!("{}: {e}", path.display())))?;
    let s = encode_ts(&ts);
    match budget {
        Some(b) => {
            let b = label(b, k)?;
            let o = prove_labelled(&LabelledSequent::new(s.clone(), b.clone()), k, limits)?;
            let ok = o.is_proved();
            let text = format!("{s}\n{} at {b}", if ok { "reachable" } else { undecided_note(&o) });
            Ok(report(text, json!({ "sequent": s.to_string(), "budget": b.to_string(), "provable": ok, "status": status_name(&o) }), ok))
        }
        None => {
            let o = min_cost(&s, k, limits)?;
            let status = status_name(&o);
            Ok(match o {
                Outcome::Proved(mc) => report(
                    format!("{s}\ncost {}", mc.cost),
                    json!({ "sequent": s.to_string(), "provable": true, "cost": mc.cost.to_string(), "cost_status": cost_status(mc.status) }),
                    true,
                ),
                o => report(format!("{s}\n{}", undecided_note(&o)), json!({ "sequent": s.to_string(), "provable": false, "status": status }), false),
            })
        }
    }
}

fn serve(port: u16) -> Result<Report, CliError> {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| CliError::failure("io", e))?;
    eprintln!("listening on http://127.0.0.1:{port}");
    rt.block_on(pricelog_service::serve(port)).map_err(|e| CliError::failure("io", e))?;
    Ok(report(String::new(), Value::Null, true))
}
