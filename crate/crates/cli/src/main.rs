use std::io::{Read, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use oneclock::compile::{compile, compile_frat, formula_alphabet};
use oneclock::decompile::{decompile, decompile_frat, Target};
use oneclock::difftest::{self, Config, Mode};
use oneclock::fixpoint::{
    accepts_via_equations, eliminate_unguarded, evaluate_fixpoint, labeling_table, parse_system,
    solve_ata_via_equations, to_equations,
};
use oneclock::logic::{eval_at, parse_formula, F};
use oneclock::qkmso::{
    eval_mso, fratmtl_to_q2mso, parse_qformula, ratmtl_to_qkmso, validate, Assignment,
};
use oneclock::structure::{classify, normalize};
use oneclock::untiming::{afa_to_dfa, synthesize_from_ata, untime, DEFAULT_STATE_CAP};
use oneclock::{Ata, TimedWord};

/// One-clock alternating timed automata, RatMTL, μRatMTL and forward QkMSO.
///
/// File arguments accept `-` for standard input.
#[derive(Parser)]
#[command(name = "oneclock", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a RatMTL or μRatMTL sentence on a timed word.
    Eval {
        formula: String,
        word: String,
        /// 1-based position to evaluate at.
        #[arg(long, default_value_t = 1)]
        position: usize,
        /// Also print the verdict at every position.
        #[arg(long)]
        table: bool,
    },
    /// Run an automaton (JSON) on a timed word.
    Accepts {
        automaton: String,
        word: String,
        /// Decide through the automaton's temporal equation system instead.
        #[arg(long)]
        via_equations: bool,
    },
    /// Translate a formula into an equivalent one-clock ATA (JSON).
    Compile {
        formula: String,
        /// FRatMTL input; the automaton is conjunctive-disjunctive.
        #[arg(long)]
        frat: bool,
        /// Comma-separated alphabet; defaults to the formula's propositions.
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
    },
    /// Translate an lfr automaton into a RatMTL (or FRatMTL) formula.
    Decompile {
        automaton: String,
        #[arg(long)]
        frat: bool,
    },
    /// Print the normal form of an automaton.
    Normalize { automaton: String },
    /// Report structural properties (normal form, lfr, C⊕D, PO, islands).
    Classify {
        automaton: String,
        /// Exit with status 1 unless these properties hold.
        #[arg(long, value_enum, value_delimiter = ',')]
        expect: Vec<Property>,
    },
    /// Untime a reset-free automaton into a region AFA, or its minimal DFA.
    Untime {
        automaton: String,
        #[arg(long)]
        dfa: bool,
        /// Graphviz output of the region DFA.
        #[arg(long)]
        dot: bool,
    },
    /// Synthesize a RatMTL formula from a reset-free automaton.
    Synthesize { automaton: String },
    /// Solve an equation system (or μRatMTL sentence) on a timed word.
    FixpointEval {
        system: String,
        word: String,
        #[arg(long)]
        table: bool,
    },
    /// Evaluate a QkMSO formula on a timed word.
    MsoEval {
        formula: String,
        word: String,
        /// Values of free variables, e.g. `x=1`; unset ones default to 1.
        #[arg(long = "at", value_delimiter = ',')]
        at: Vec<String>,
        /// Also check well-formedness for this k (status 1 if violated).
        #[arg(long)]
        check: Option<usize>,
    },
    /// Translate a formula into QkMSO, Q2MSO, or an equation system.
    Translate {
        formula: String,
        #[arg(long, value_enum, default_value = "qkmso")]
        to: TranslateTarget,
        /// Translate an automaton file into its equation system instead.
        #[arg(long)]
        automaton: bool,
    },
    /// Differential testing of a translation against its oracle.
    Difftest {
        #[arg(long, value_enum)]
        mode: DiffMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        word_len: usize,
        #[arg(long, default_value_t = 2)]
        alphabet_size: usize,
        /// Random words per instance.
        #[arg(long, default_value_t = 100)]
        words: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Normal,
    Lfr,
    Cd,
    Po,
}

#[derive(Clone, Copy, ValueEnum)]
enum TranslateTarget {
    Qkmso,
    Q2mso,
    Equations,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiffMode {
    Compile,
    Decompile,
    Fixpoint,
    Mso,
}

/// Writes to stdout; a closed pipe (e.g. `| head`) ends the process quietly.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(&format!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(&format!("{}\n", format_args!($($t)*))) };
}

fn read(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn read_formula(path: &str) -> Result<F> {
    let text = read(path)?;
    Ok(parse_formula(strip_comments(&text).trim())?)
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn read_word(path: &str) -> Result<TimedWord> {
    Ok(TimedWord::parse(&read(path)?)?)
}

fn read_ata(path: &str) -> Result<Ata> {
    Ok(Ata::from_json(&read(path)?)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Eval {
            formula,
            word,
            position,
            table,
        } => {
            let f = read_formula(&formula)?;
            let w = read_word(&word)?;
            let verdicts: Vec<bool> = if f.has_fixpoint() || f.has_var() {
                let sys = to_equations(&eliminate_unguarded(&f))?;
                evaluate_fixpoint(&sys, &w)?.table[0].clone()
            } else {
                (1..=w.len())
                    .map(|i| eval_at(&f, &w, i))
                    .collect::<oneclock::Result<_>>()?
            };
            if position == 0 || position > w.len() {
                bail!(oneclock::Error::input(format!(
                    "position {position} outside 1..={}",
                    w.len()
                )));
            }
            outln!("{}", verdicts[position - 1]);
            if table {
                for (i, v) in verdicts.iter().enumerate() {
                    outln!(
                        "{}\t{}\t{}",
                        i + 1,
                        oneclock::word::format_rational(&w.time(i)),
                        v
                    );
                }
            }
        }
        Command::Accepts {
            automaton,
            word,
            via_equations,
        } => {
            let a = read_ata(&automaton)?;
            let w = read_word(&word)?;
            let v = if via_equations {
                accepts_via_equations(&a, &w)?
            } else {
                a.accepts(&w)?
            };
            outln!("{v}");
        }
        Command::Compile {
            formula,
            frat,
            alphabet,
        } => {
            let f = read_formula(&formula)?;
            let ab = if alphabet.is_empty() {
                formula_alphabet(&f)
            } else {
                alphabet
            };
            if ab.is_empty() {
                bail!(oneclock::Error::input("empty alphabet; pass --alphabet"));
            }
            let a = if frat {
                compile_frat(&f, &ab)?
            } else {
                compile(&f, &ab)?
            };
            outln!("{}", a.to_json());
        }
        Command::Decompile { automaton, frat } => {
            let a = read_ata(&automaton)?;
            let f = if frat {
                decompile_frat(&a)?
            } else {
                decompile(&a)?
            };
            outln!("{f}");
        }
        Command::Normalize { automaton } => {
            outln!("{}", normalize(&read_ata(&automaton)?).to_json())
        }
        Command::Classify { automaton, expect } => {
            let report = classify(&read_ata(&automaton)?);
            outln!("{}", serde_json::to_string(&report)?);
            let holds = |p: &Property| match p {
                Property::Normal => report.normal,
                Property::Lfr => report.lfr,
                Property::Cd => report.cd,
                Property::Po => report.po,
            };
            if !expect.iter().all(holds) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Untime {
            automaton,
            dfa,
            dot,
        } => {
            let afa = untime(&read_ata(&automaton)?)?;
            if dfa || dot {
                let d = afa_to_dfa(&afa, DEFAULT_STATE_CAP)?;
                if dot {
                    out!("{}", d.to_dot());
                } else {
                    outln!("{}", serde_json::to_string_pretty(&d.to_json())?);
                }
            } else {
                outln!("{}", serde_json::to_string_pretty(&afa.to_json())?);
            }
        }
        Command::Synthesize { automaton } => {
            outln!("{}", synthesize_from_ata(&read_ata(&automaton)?)?)
        }
        Command::FixpointEval {
            system,
            word,
            table,
        } => {
            let sys = parse_system(&read(&system)?)?;
            let w = read_word(&word)?;
            let lab = evaluate_fixpoint(&sys, &w)?;
            outln!("{}", lab.verdict());
            if table {
                out!("{}", labeling_table(&lab, &w));
            }
        }
        Command::MsoEval {
            formula,
            word,
            at,
            check,
        } => {
            let q = parse_qformula(strip_comments(&read(&formula)?).trim())?;
            let w = read_word(&word)?;
            let mut asg = Assignment::default();
            for v in q.free_fo() {
                asg.fo.insert(v, 1);
            }
            for item in at {
                let Some((v, p)) = item.split_once('=') else {
                    bail!(oneclock::Error::input(format!(
                        "bad assignment {item:?}, expected var=pos"
                    )));
                };
                let p: usize = p
                    .trim()
                    .parse()
                    .map_err(|_| oneclock::Error::input(format!("bad position in {item:?}")))?;
                asg.fo.insert(v.trim().to_string(), p);
            }
            let verdict = eval_mso(&q, &w, &asg)?;
            outln!("{verdict}");
            if let Some(k) = check {
                let v = validate(&q, k, false);
                outln!("{}", serde_json::to_string(&v)?);
                if !v.valid {
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Translate {
            formula,
            to,
            automaton,
        } => {
            if automaton {
                let a = read_ata(&formula)?;
                outln!("{}", solve_ata_via_equations(&a, Target::Rat)?);
                return Ok(ExitCode::SUCCESS);
            }
            let f = read_formula(&formula)?;
            match to {
                TranslateTarget::Qkmso => outln!("{}", ratmtl_to_qkmso(&f)?),
                TranslateTarget::Q2mso => outln!("{}", fratmtl_to_q2mso(&f)?),
                TranslateTarget::Equations => out!("{}", to_equations(&eliminate_unguarded(&f))?),
            }
        }
        Command::Difftest {
            mode,
            seed,
            count,
            word_len,
            alphabet_size,
            words,
            json,
        } => {
            let mode = match mode {
                DiffMode::Compile => Mode::Compile,
                DiffMode::Decompile => Mode::Decompile,
                DiffMode::Fixpoint => Mode::Fixpoint,
                DiffMode::Mso => Mode::Mso,
            };
            let cfg = Config {
                mode,
                seed,
                count,
                word_len,
                alphabet_size,
                words,
            };
            let report = difftest::run(&cfg)?;
            if json {
                outln!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                out!("{report}");
            }
            if report.disagree > 0 {
                return Ok(ExitCode::from(1));
            }
            if report.resource > 0 {
                return Ok(ExitCode::from(3));
            }
            if report.errors > 0 {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let (kind, code) = match e.downcast_ref::<oneclock::Error>() {
                Some(err @ oneclock::Error::Resource(_)) => (err.kind(), 3),
                Some(err) => (err.kind(), 2),
                None => ("io", 2),
            };
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("{}", json!({ "error": kind, "message": chain.join(": ") }));
            ExitCode::from(code)
        }
    }
}
