//! `pricelog`: prove sequents, price them, play the budget game.

mod commands;
mod render;
mod repl;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pricelog_core::SearchLimits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
}

#[derive(Debug, Parser)]
#[command(name = "pricelog", version, about = "Priced affine linear logic: proofs, costs and budget games")]
pub struct Cli {
    /// Semiring instance: cost, security, max or prob.
    #[arg(long, global = true, env = "PRICELOG_SEMIRING", default_value = "cost")]
    pub semiring: String,
    /// Maximum proof height explored.
    #[arg(long, global = true)]
    pub max_height: Option<usize>,
    /// Maximum derelictions of each permanent formula along a branch.
    #[arg(long, global = true)]
    pub max_derelict: Option<u32>,
    /// Maximum number of search nodes.
    #[arg(long, global = true)]
    pub max_nodes: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a proof; `A |-[L] B` asks for one with label L.
    Prove { sequent: String },
    /// The least label of any proof.
    Cost { sequent: String },
    /// Every proof label no worse than the bound.
    Spectrum {
        sequent: String,
        #[arg(long)]
        bound: String,
    },
    /// Play the game interactively against the engine.
    Play {
        sequent: String,
        #[arg(long)]
        budget: Option<String>,
        /// The role you play.
        #[arg(long, value_enum, default_value = "I")]
        role: RoleArg,
    },
    /// Check the semiring laws on random samples.
    CheckSemiring {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Eliminate a cut between two labelled proof files.
    Cut {
        p1: PathBuf,
        p2: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Encode a transition system and ask whether its end set is reachable
    /// within the budget.
    EncodeTs {
        file: PathBuf,
        #[arg(long)]
        budget: Option<String>,
    },
    /// Serve the HTTP API on the loopback interface.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

impl Cli {
    pub fn limits(&self) -> SearchLimits {
        let d = SearchLimits::default();
        SearchLimits {
            max_height: self.max_height.unwrap_or(d.max_height),
            max_derelictions_per_permanent: self.max_derelict.unwrap_or(d.max_derelictions_per_permanent),
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli);
    let mut out = io::stdout().lock();
    match result {
        Ok(report) => {
            match cli.format {
                Format::Text => {
                    if !report.text.is_empty() {
                        let _ = writeln!(out, "{}", report.text.trim_end());
                    }
                }
                Format::Structured => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report.data).expect("reports serialise"));
                }
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {}", e.message),
                Format::Structured => {
                    let record = serde_json::json!({ "error": e.message, "kind": e.kind });
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&record).unwrap());
                }
            }
            ExitCode::from(e.code)
        }
    }
}
