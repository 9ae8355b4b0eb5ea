//! `termcalc`: ring-term equivalence, Boolean normal forms and exact
//! independence checks from the command line.
//!
//! Exit status is 0 for success or a true verdict, 1 for a false verdict and
//! 2 for unreadable input.

mod commands;
mod json;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "termcalc", version, about = "Formal ring terms, Boolean DNF and exact finite probability")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Coefficient ring: Z, Zm:<m> or Q.
    #[arg(long, global = true, default_value = "Z")]
    pub ring: String,
    /// Print structured JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand)]
pub enum Command {
    /// Ring terms and standard polynomials.
    #[command(subcommand)]
    Ring(RingCmd),
    /// Boolean terms.
    #[command(subcommand)]
    Bool(BoolCmd),
    /// Finite probability spaces.
    #[command(subcommand)]
    Prob(ProbCmd),
    /// Check the local-lemma hypothesis on a hypergraph and look for a proper 2-colouring.
    Lll {
        #[arg(long)]
        hypergraph: PathBuf,
        /// Search all colourings even when the condition fails.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Run reduced versions of the invariant suites.
    Selftest,
}

#[derive(Subcommand)]
pub enum RingCmd {
    /// Evaluate a term to its standard polynomial.
    Psi { term: String },
    /// Decide equivalence, optionally writing a rewrite certificate.
    Equiv {
        t: String,
        u: String,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Rewrite a term to its standard form.
    Normalize {
        term: String,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Replay a certificate file.
    CertVerify { file: PathBuf },
}

#[derive(Subcommand)]
pub enum BoolCmd {
    /// Standard disjunctive normal form over x1..xn.
    Dnf {
        term: String,
        /// Number of variables; defaults to the largest index in the term.
        #[arg(long)]
        width: Option<u32>,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Evaluate under a 0/1 assignment to x1, x2, ...
    Eval {
        term: String,
        #[arg(long)]
        assign: String,
    },
    /// Replay a certificate file.
    CertVerify { file: PathBuf },
}

#[derive(Subcommand)]
pub enum ProbCmd {
    /// Are the left events independent of the right events?
    Indep {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Check Pr(a∧b) = Pr(a)·Pr(b) for a = t(left events), b = u(right events).
    Bit {
        t: String,
        u: String,
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
}

/// What a command prints and whether its verdict was positive.
pub struct Report {
    pub verdict: bool,
    pub text: String,
    pub json: serde_json::Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            if cli.global.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("JSON values serialize"));
            } else {
                println!("{}", report.text.trim_end());
            }
            if report.verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
