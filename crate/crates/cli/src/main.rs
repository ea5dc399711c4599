//! Command-line front end: per-cell bounds, intersection classes, the full
//! bounds table, vanishing verification, and raw combinatorics queries.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error (resource
//! ceiling exceeded or a cell failure).

use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jetbounds::hypersurface::DegreePolynomial;
use jetbounds::morse::{compute_bound_with, compute_table, MorseResult, TableCell};
use jetbounds::schur::{graded_pieces, pieri, JetMode, Partition, VanishingReport};
use jetbounds::{Budget, Error, DEFAULT_MAX_TERMS};

/// Environment variable overriding the default term ceiling (the
/// `--max-terms` flag wins over both).
const MAX_TERMS_ENV: &str = "JETBOUNDS_MAX_TERMS";

#[derive(Parser)]
#[command(
    name = "jetbounds",
    version,
    about = "Exact effective degree bounds for invariant jet differentials on projective hypersurfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker thread count (defaults to the number of cores)
    #[arg(long, global = true, value_name = "N")]
    parallel: Option<usize>,

    /// Term-count ceiling before a computation is aborted
    #[arg(long, global = true, value_name = "N")]
    max_terms: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Effective degree bound for one (n, k) cell
    Bound {
        /// Hypersurface dimension
        #[arg(short = 'n', long = "dim")]
        n: usize,
        /// Jet order
        #[arg(short = 'k', long = "order")]
        k: usize,
    },
    /// Bounds table for n = 2..=max-n, k = 1..=5
    Table {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
    /// Vanishing verification for order-k, weight-m jet differentials
    Vanishing {
        #[arg(short = 'n', long = "dim")]
        n: usize,
        #[arg(short = 'k', long = "order")]
        k: usize,
        /// Weighted degree
        #[arg(long = "m")]
        m: u32,
    },
    /// The integrated Morse criterion class for one (n, k) cell
    Class {
        #[arg(short = 'n', long = "dim")]
        n: usize,
        #[arg(short = 'k', long = "order")]
        k: usize,
    },
    /// Pieri product of a Schur power with a symmetric power
    Pieri {
        /// Partition as comma-separated parts, e.g. 3,1,1 (0 for empty)
        lambda: String,
        /// Number of boxes to add
        #[arg(long = "m")]
        m: u32,
        /// Rank (maximum number of rows)
        #[arg(short = 'n', long = "dim")]
        n: usize,
    },
    /// Exponent tuples of one weighted degree
    Graded {
        #[arg(short = 'k', long = "order")]
        k: usize,
        #[arg(long = "m")]
        m: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let budget = resolve_budget(&cli);
    let run = || run_command(&cli, budget);
    let outcome = match cli.parallel {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build();
            match pool {
                Ok(pool) => pool.install(run),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
        None => run(),
    };

    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::TooLarge { .. } | Error::NotBaseClass { .. } => 2,
                _ => 1,
            })
        }
    }
}

fn resolve_budget(cli: &Cli) -> Budget {
    let from_env = std::env::var(MAX_TERMS_ENV)
        .ok()
        .and_then(|v| v.parse().ok());
    Budget {
        max_terms: cli.max_terms.or(from_env).unwrap_or(DEFAULT_MAX_TERMS),
    }
}

fn run_command(cli: &Cli, budget: Budget) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Bound { n, k } => {
            let result = compute_bound_with(*n, *k, &budget)?;
            match cli.format {
                Format::Text => print!("{}", render_bound_text(&result)),
                Format::Json => println!("{}", morse_result_json(&result)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Table { max_n } => {
            if *max_n < 2 {
                return Err(Error::InvalidDimension(*max_n));
            }
            let cells = compute_table(*max_n, 5, &budget);
            let failed = cells.iter().any(|c| c.result.is_err());
            match cli.format {
                Format::Text => print!("{}", render_table_text(*max_n, &cells)),
                Format::Json => println!("{}", table_json(*max_n, &cells)),
            }
            if failed {
                for cell in &cells {
                    if let Err(e) = &cell.result {
                        eprintln!("cell ({}, {}): {e}", cell.n, cell.k);
                    }
                }
                Ok(ExitCode::from(2))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Vanishing { n, k, m } => {
            let report =
                jetbounds::schur::verify_vanishing(*n, *n + 1, *k, *m, JetMode::Invariant, &budget)?;
            match cli.format {
                Format::Text => print!("{}", render_vanishing_text(&report)),
                Format::Json => println!("{}", vanishing_json(&report)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Class { n, k } => {
            let class = jetbounds::morse::morse_class_with(*n, *k, &budget, true)?;
            match cli.format {
                Format::Text => println!("{class}"),
                Format::Json => println!("{}", json!({ "n": n, "k": k, "class": class.to_string() })),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Pieri { lambda, m, n } => {
            let lambda = Partition::from_str(lambda)?;
            if lambda.len() > *n {
                return Err(Error::Parse(format!(
                    "partition {lambda} has more than {n} rows"
                )));
            }
            let result = pieri(&lambda, *m, *n);
            match cli.format {
                Format::Text => {
                    for (mu, mult) in result.iter() {
                        println!("{mult} x {mu}");
                    }
                }
                Format::Json => {
                    let entries: Vec<Value> = result
                        .iter()
                        .map(|(mu, mult)| json!({ "partition": mu.csv(), "multiplicity": mult }))
                        .collect();
                    println!("{}", json!({ "entries": entries }));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Graded { k, m } => {
            if *k < 1 {
                return Err(Error::InvalidOrder(*k));
            }
            let pieces = graded_pieces(*k, *m);
            match cli.format {
                Format::Text => {
                    let line: Vec<String> = pieces.iter().map(|p| p.to_string()).collect();
                    println!("{}", line.join(" "));
                }
                Format::Json => {
                    let entries: Vec<Value> =
                        pieces.iter().map(|p| json!(p.exponents())).collect();
                    println!("{}", json!({ "pieces": entries }));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn render_bound_text(r: &MorseResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("n = {}, k = {} (N = {})\n", r.n, r.k, r.total_dim));
    out.push_str(&format!(
        "weights = ({}), twist = {}\n",
        r.weights
            .weights()
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(", "),
        r.weights.twist()
    ));
    out.push_str(&format!("class = {}\n", r.class_in_chern));
    out.push_str(&format!("poly_d = {}\n", r.poly_in_d));
    match r.bound {
        Some(b) => out.push_str(&format!("bound: d >= {b}\n")),
        None => out.push_str("bound: none\n"),
    }
    out
}

fn dpoly_json(p: &DegreePolynomial) -> Value {
    let pairs: Vec<Value> = p
        .iter_desc()
        .map(|(e, c)| json!([e, c.to_string()]))
        .collect();
    Value::Array(pairs)
}

fn morse_result_json(r: &MorseResult) -> Value {
    json!({
        "n": r.n,
        "k": r.k,
        "class": r.class_in_chern.to_string(),
        "poly_d": dpoly_json(&r.poly_in_d),
        "bound": r.bound,
        "N": r.total_dim,
        "weights": r.weights.weights(),
        "twist": r.weights.twist(),
    })
}

fn render_table_text(max_n: usize, cells: &[TableCell]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<6}", "n\\k"));
    for k in 1..=5 {
        out.push_str(&format!("{k:>8}"));
    }
    out.push('\n');
    for n in 2..=max_n {
        out.push_str(&format!("{n:<6}"));
        for k in 1..=5 {
            let cell = cells
                .iter()
                .find(|c| c.n == n && c.k == k)
                .expect("cell missing");
            let text = match &cell.result {
                Ok(r) => r.bound.map_or("-".to_string(), |b| b.to_string()),
                Err(_) => "err".to_string(),
            };
            out.push_str(&format!("{text:>8}"));
        }
        out.push('\n');
    }
    out
}

fn table_json(max_n: usize, cells: &[TableCell]) -> Value {
    let entries: Vec<Value> = cells
        .iter()
        .map(|cell| match &cell.result {
            Ok(r) => morse_result_json(r),
            Err(e) => json!({ "n": cell.n, "k": cell.k, "error": e.to_string() }),
        })
        .collect();
    json!({ "max_n": max_n, "k_max": 5, "cells": entries })
}

fn render_vanishing_text(r: &VanishingReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "n = {}, k = {}, m = {} ({} jets, hypersurface in P^{})\n",
        r.n, r.k, r.m, r.mode, r.ambient
    ));
    out.push_str(&format!(
        "pieces = {}, components = {}\n",
        r.pieces, r.components
    ));
    if r.all_vanish {
        out.push_str("all components vanish\n");
    } else {
        out.push_str(&format!(
            "{} component(s) not guaranteed to vanish:\n",
            r.violations.len()
        ));
        for v in &r.violations {
            out.push_str(&format!(
                "  {} from piece {} (multiplicity {}, t = {}, {})\n",
                v.component, v.piece, v.multiplicity, v.column_sum, v.kind
            ));
        }
    }
    out
}

fn vanishing_json(r: &VanishingReport) -> Value {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| {
            json!({
                "piece": v.piece.exponents(),
                "component": v.component.csv(),
                "multiplicity": v.multiplicity,
                "t": v.column_sum,
                "kind": v.kind.to_string(),
            })
        })
        .collect();
    json!({
        "n": r.n,
        "k": r.k,
        "m": r.m,
        "pieces": r.pieces,
        "components": r.components,
        "all_vanish": r.all_vanish,
        "violations": violations,
    })
}
