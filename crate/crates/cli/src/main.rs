use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use operformal::coder::PInfStructure;
use operformal::ingest::{
    self, crosscheck, emit, emit_string, transfer_spec, DgAlgebraSpec, EulerSummary, KaledinSummary, Operad,
    WitnessSummary,
};
use operformal::kaledin::{formalize, truncated_class, Formalization};
use operformal::spectral::{build_pages, push_euler, SSPage};
use operformal::Error;
use serde_json::{json, Value};

const FORMAL: u8 = 0;
const NON_FORMAL: u8 = 1;
const INPUT_ERROR: u8 = 2;
const INTERNAL_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "operformal", version, about = "Formality checks for A-infinity and L-infinity structures")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a structure and check the Maurer-Cartan equation.
    Validate { file: PathBuf },
    /// Decide the truncated Kaledin classes up to a weight.
    Kaledin {
        file: PathBuf,
        #[arg(long)]
        max_weight: Option<usize>,
    },
    /// Gauge away all higher operations, or report the obstruction.
    Formalize { file: PathBuf },
    /// Print the first pages of the weight spectral sequence.
    Ss {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        pages: usize,
    },
    /// Push the Euler class through the spectral sequence.
    Euler { file: PathBuf },
    /// Transfer a dg associative algebra to its cohomology.
    Transfer {
        file: PathBuf,
        #[arg(long)]
        max_weight: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Run every formality criterion and check that they agree.
    Crosscheck { file: PathBuf },
}

struct Output {
    text: String,
    json: Value,
    code: u8,
}

fn load(path: &Path) -> Result<PInfStructure, Error> {
    ingest::parse_str(&read(path)?)
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn verdict_code(formal: bool) -> u8 {
    if formal {
        FORMAL
    } else {
        NON_FORMAL
    }
}

fn validate(q: &PInfStructure) -> Output {
    let operad = Operad::from_symmetry(q.symmetry());
    let nonzero: Vec<usize> = (1..=q.cutoff()).filter(|&w| !q.q_w(w).is_zero()).collect();
    Output {
        text: format!(
            "valid: operad {operad:?}, dim {}, W = {}, nonzero weights {nonzero:?}\n",
            q.space().dim(),
            q.cutoff()
        ),
        json: json!({ "valid": true, "operad": operad, "dim": q.space().dim(), "max_weight": q.cutoff(), "nonzero_weights": nonzero }),
        code: FORMAL,
    }
}

fn kaledin(q: &PInfStructure, max_weight: Option<usize>) -> Result<Output, Error> {
    let n = max_weight.unwrap_or(q.cutoff());
    let report = truncated_class(q, n)?;
    let summary = KaledinSummary::new(&report);
    let mut text = format!("checked up to weight {n}: K^<=m = 0 for m <= {}\n", summary.vanishing_level);
    match (&summary.obstruction_weight, &summary.obstruction) {
        (Some(w), Some(o)) => text.push_str(&format!("obstruction at weight {w}:\n{o}\n")),
        _ => text.push_str(&format!("witness:\n{}\n", summary.witness.as_deref().unwrap_or(""))),
    }
    Ok(Output { text, json: serde_json::to_value(&summary)?, code: verdict_code(report.vanishes()) })
}

fn formalize_cmd(q: &PInfStructure) -> Result<Output, Error> {
    match formalize(q)? {
        Formalization::Formal(w) => {
            let summary = WitnessSummary {
                steps: w.steps.iter().map(|s| s.target_weight).collect(),
                strict_part: emit(&w.final_structure),
            };
            let text = format!(
                "formal up to W = {}\ngauge steps removed weights {:?}\nstrict part:\n{}\n",
                q.cutoff(),
                summary.steps,
                emit_string(&w.final_structure)
            );
            Ok(Output { text, json: json!({ "formal": true, "witness": summary }), code: FORMAL })
        }
        Formalization::Obstructed(r) => {
            let summary = KaledinSummary::new(&r);
            let text = format!(
                "obstructed at weight {}\n{}\n",
                summary.obstruction_weight.unwrap_or_default(),
                summary.obstruction.as_deref().unwrap_or("")
            );
            Ok(Output { text, json: json!({ "formal": false, "kaledin": summary }), code: NON_FORMAL })
        }
    }
}

fn page_json(page: &SSPage) -> Value {
    let cells: Vec<Value> = page.cells.values().map(|c| json!({ "p": c.p, "q": c.q, "dim": c.dim() })).collect();
    let differentials: Vec<Value> = page
        .differentials
        .iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(&(p, q), m)| json!({ "source": [p, q], "target": [p + page.r, q - page.r as i64 + 1], "rank": m.rank() }))
        .collect();
    json!({ "r": page.r, "cells": cells, "differentials": differentials })
}

fn page_text(page: &SSPage) -> String {
    let mut out = format!("E_{}:\n", page.r);
    for c in page.cells.values() {
        out.push_str(&format!("  ({}, {}): dim {}\n", c.p, c.q, c.dim()));
    }
    for (&(p, q), m) in &page.differentials {
        if !m.is_zero() {
            out.push_str(&format!(
                "  d_{} ({p}, {q}) -> ({}, {}): rank {}\n",
                page.r,
                p + page.r,
                q - page.r as i64 + 1,
                m.rank()
            ));
        }
    }
    out
}

fn ss(q: &PInfStructure, pages: usize) -> Result<Output, Error> {
    let pages = build_pages(q, pages)?;
    Ok(Output {
        text: pages.iter().map(page_text).collect(),
        json: Value::Array(pages.iter().map(page_json).collect()),
        code: FORMAL,
    })
}

fn euler(q: &PInfStructure) -> Result<Output, Error> {
    let push = push_euler(q)?;
    let summary = EulerSummary::new(&push);
    let text = match (&summary.first_nonzero_page, &summary.first_nonzero_class) {
        (Some(r), Some(c)) => format!("d_{r}(e) != 0:\n{c}\n"),
        _ => format!("Euler class survives to E_{}\n", summary.survives_to + 1),
    };
    Ok(Output { text, json: serde_json::to_value(&summary)?, code: verdict_code(push.survives_to == q.cutoff()) })
}

fn transfer(file: &Path, max_weight: usize, out: Option<&Path>) -> Result<Output, Error> {
    let spec: DgAlgebraSpec = serde_json::from_str(&read(file)?)?;
    let q = transfer_spec(&spec, max_weight)?;
    let emitted = emit(&q);
    let mut text = format!("cohomology of dimension {}, transferred up to W = {}\n", q.space().dim(), q.cutoff());
    match out {
        Some(path) => {
            fs::write(path, emit_string(&q) + "\n")?;
            text.push_str(&format!("written to {}\n", path.display()));
        }
        None => text.push_str(&(emit_string(&q) + "\n")),
    }
    Ok(Output { text, json: serde_json::to_value(&emitted)?, code: FORMAL })
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Validate { file } => Ok(validate(&load(file)?)),
        Command::Kaledin { file, max_weight } => kaledin(&load(file)?, *max_weight),
        Command::Formalize { file } => formalize_cmd(&load(file)?),
        Command::Ss { file, pages } => ss(&load(file)?, *pages),
        Command::Euler { file } => euler(&load(file)?),
        Command::Transfer { file, max_weight, emit } => transfer(file, *max_weight, emit.as_deref()),
        Command::Crosscheck { file } => {
            let report = crosscheck(&load(file)?)?;
            let code = verdict_code(report.is_formal());
            Ok(Output { text: report.to_string(), json: serde_json::to_value(&report)?, code })
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("OPERFORMAL_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().map_err(|_| format!("OPERFORMAL_THREADS must be a positive integer, got {value:?}"))?;
    if n == 0 {
        return Err("OPERFORMAL_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(INPUT_ERROR);
    }
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Internal(_) => INTERNAL_ERROR,
                _ => INPUT_ERROR,
            };
            ExitCode::from(code)
        }
    }
}
