//! Differential testing: random subjects are pushed through two routes
//! (translation vs. oracle) on random words; disagreements are shrunk.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ata::Ata;
use crate::compile::compile;
use crate::decompile::decompile;
use crate::error::{Error, Result};
use crate::fixpoint::{
    brute_force_fixpoints, compile_equations, evaluate_fixpoint, EquationSystem,
};
use crate::gen::{self, FormulaGen, Fragment, Rng64};
use crate::logic::{and, ff, frat, holds, not, or, rat, tt, Formula, Regex, F};
use crate::qkmso::{eval_mso, fratmtl_to_q2mso, ratmtl_to_qkmso, Assignment, QFormula, ANCHOR};
use crate::structure::check_lfr;
use crate::word::TimedWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Compile,
    Decompile,
    Fixpoint,
    Mso,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "compile" => Ok(Mode::Compile),
            "decompile" => Ok(Mode::Decompile),
            "fixpoint" => Ok(Mode::Fixpoint),
            "mso" => Ok(Mode::Mso),
            _ => Err(Error::input(format!(
                "unknown mode {s:?} (compile, decompile, fixpoint, mso)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Compile => "compile",
            Mode::Decompile => "decompile",
            Mode::Fixpoint => "fixpoint",
            Mode::Mso => "mso",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub mode: Mode,
    pub seed: u64,
    pub count: usize,
    pub word_len: usize,
    pub alphabet_size: usize,
    /// Words per instance.
    pub words: usize,
}

impl Config {
    pub fn new(mode: Mode) -> Config {
        Config {
            mode,
            seed: 0,
            count: 50,
            word_len: 6,
            alphabet_size: 2,
            words: 100,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Agree,
    Disagree {
        detail: String,
        word: String,
        shrunk_subject: String,
        shrunk_word: String,
    },
    Resource {
        message: String,
    },
    Error {
        message: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub index: usize,
    pub subject: String,
    pub words_checked: usize,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub mode: Mode,
    pub seed: u64,
    pub count: usize,
    pub agree: usize,
    pub disagree: usize,
    pub resource: usize,
    pub errors: usize,
    pub instances: Vec<Instance>,
}

impl Report {
    pub fn all_agree(&self) -> bool {
        self.agree == self.count
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} agree", self.agree, self.count)?;
        if self.resource > 0 {
            write!(f, ", {} resource-capped", self.resource)?;
        }
        if self.errors > 0 {
            write!(f, ", {} errors", self.errors)?;
        }
        writeln!(f)?;
        for inst in &self.instances {
            match &inst.outcome {
                Outcome::Agree => {}
                Outcome::Disagree {
                    detail,
                    word,
                    shrunk_subject,
                    shrunk_word,
                } => {
                    writeln!(f, "#{} disagree: {detail}", inst.index)?;
                    writeln!(f, "  subject: {}", inst.subject)?;
                    writeln!(f, "  word:    {word}")?;
                    writeln!(f, "  shrunk subject: {shrunk_subject}")?;
                    writeln!(f, "  shrunk word:    {shrunk_word}")?;
                }
                Outcome::Resource { message } => {
                    writeln!(f, "#{} resource cap: {message}", inst.index)?
                }
                Outcome::Error { message } => writeln!(f, "#{} error: {message}", inst.index)?,
            }
        }
        Ok(())
    }
}

/// Runs `cfg.count` independent instances on a worker pool. Each instance
/// derives its own generator from the seed and its index, so the report
/// does not depend on scheduling.
pub fn run(cfg: &Config) -> Result<Report> {
    if cfg.alphabet_size == 0 || cfg.alphabet_size > 6 {
        return Err(Error::input("alphabet size must be between 1 and 6"));
    }
    if cfg.word_len == 0 {
        return Err(Error::input("word length must be positive"));
    }
    let instances: Vec<Instance> = (0..cfg.count)
        .into_par_iter()
        .map(|i| instance(cfg, i))
        .collect();
    let count_of = |p: fn(&Outcome) -> bool| instances.iter().filter(|x| p(&x.outcome)).count();
    Ok(Report {
        mode: cfg.mode,
        seed: cfg.seed,
        count: cfg.count,
        agree: count_of(|o| matches!(o, Outcome::Agree)),
        disagree: count_of(|o| matches!(o, Outcome::Disagree { .. })),
        resource: count_of(|o| matches!(o, Outcome::Resource { .. })),
        errors: count_of(|o| matches!(o, Outcome::Error { .. })),
        instances,
    })
}

fn instance_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64)
}

/// The object under test in one instance.
#[derive(Clone, Debug)]
pub enum Subject {
    Formula(F),
    Automaton(Ata),
    System(EquationSystem),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Formula(x) => write!(f, "{x}"),
            Subject::Automaton(a) => {
                let v: serde_json::Value =
                    serde_json::from_str(&a.to_json()).expect("automaton JSON");
                write!(f, "{v}")
            }
            Subject::System(s) => write!(f, "{}", s.to_string().trim_end().replace('\n', "; ")),
        }
    }
}

enum Prepared {
    Compiled(F, Ata),
    Decompiled(Ata, F),
    Equations(EquationSystem, Ata),
    Mso(F, QFormula),
}

fn generate(cfg: &Config, index: usize, r: &mut Rng64) -> Subject {
    let ab = gen::props(cfg.alphabet_size);
    match cfg.mode {
        Mode::Compile => {
            let g = FormulaGen {
                alphabet: &ab,
                fragment: Fragment::Rat,
                c_max: 2,
                vars: vec![],
            };
            Subject::Formula(g.formula(r, 2, 6))
        }
        Mode::Mso => {
            let fragment = if index % 2 == 0 {
                Fragment::Rat
            } else {
                Fragment::FRat
            };
            let g = FormulaGen {
                alphabet: &ab,
                fragment,
                c_max: 2,
                vars: vec![],
            };
            Subject::Formula(g.formula(r, 2, 5))
        }
        Mode::Decompile => {
            let mut a = gen::island_ata(r, &ab, 2, 2, 2, false);
            while !check_lfr(&a) {
                a = gen::island_ata(r, &ab, 2, 2, 2, false);
            }
            Subject::Automaton(a)
        }
        Mode::Fixpoint => {
            let n = r.gen_range(1..=2);
            Subject::System(gen::system(r, &ab, n, 2))
        }
    }
}

fn prepare(mode: Mode, s: &Subject, ab: &[String]) -> Result<Prepared> {
    Ok(match (mode, s) {
        (Mode::Compile, Subject::Formula(f)) => Prepared::Compiled(f.clone(), compile(f, ab)?),
        (Mode::Mso, Subject::Formula(f)) => {
            let q = if !f.any(&mut |x| matches!(x, Formula::Rat(..))) {
                fratmtl_to_q2mso(f)?
            } else {
                ratmtl_to_qkmso(f)?
            };
            Prepared::Mso(f.clone(), q)
        }
        (Mode::Decompile, Subject::Automaton(a)) => Prepared::Decompiled(a.clone(), decompile(a)?),
        (Mode::Fixpoint, Subject::System(sys)) => {
            Prepared::Equations(sys.clone(), compile_equations(sys, ab)?)
        }
        _ => return Err(Error::pre("subject does not fit the mode")),
    })
}

/// `None` when both routes agree on `w`, otherwise a description.
fn compare(p: &Prepared, w: &TimedWord) -> Result<Option<String>> {
    let differ =
        |what: &str, l: bool, r: bool| (l != r).then(|| format!("{what}: {l} vs oracle {r}"));
    Ok(match p {
        Prepared::Compiled(f, a) => differ("compiled automaton", a.accepts(w)?, holds(f, w)?),
        Prepared::Decompiled(a, f) => differ("decompiled formula", holds(f, w)?, a.accepts(w)?),
        Prepared::Mso(f, q) => differ(
            "QkMSO translation",
            eval_mso(q, w, &Assignment::at(ANCHOR, 1))?,
            holds(f, w)?,
        ),
        Prepared::Equations(sys, a) => {
            let lab = evaluate_fixpoint(sys, w)?;
            if let Some(d) = differ("compiled equations", a.accepts(w)?, lab.verdict()) {
                return Ok(Some(d));
            }
            if sys.equations.len() * w.len() <= 20 {
                let all = brute_force_fixpoints(sys, w)?;
                if all.len() != 1 || all[0] != lab {
                    return Ok(Some(format!(
                        "{} fixpoints found by enumeration; expected exactly the backward pass",
                        all.len()
                    )));
                }
            }
            None
        }
    })
}

fn instance(cfg: &Config, index: usize) -> Instance {
    let seed = instance_seed(cfg.seed, index);
    let mut r = gen::rng(seed);
    let ab = gen::props(cfg.alphabet_size);
    let subject = generate(cfg, index, &mut r);
    let mut done = 0;
    let outcome = match prepare(cfg.mode, &subject, &ab) {
        Err(e) => failure(e),
        Ok(p) => {
            let mut outcome = Outcome::Agree;
            for w in gen::words(seed ^ 0x5DEE_CE66, &ab, cfg.words, cfg.word_len) {
                match compare(&p, &w) {
                    Ok(None) => done += 1,
                    Ok(Some(detail)) => {
                        let (s2, w2) = shrink(cfg.mode, &ab, subject.clone(), w.clone());
                        outcome = Outcome::Disagree {
                            detail,
                            word: w.to_string(),
                            shrunk_subject: s2.to_string(),
                            shrunk_word: w2.to_string(),
                        };
                        break;
                    }
                    Err(e) => {
                        outcome = failure(e);
                        break;
                    }
                }
            }
            outcome
        }
    };
    Instance {
        index,
        subject: subject.to_string(),
        words_checked: done,
        outcome,
    }
}

fn failure(e: Error) -> Outcome {
    match e {
        Error::Resource(m) => Outcome::Resource { message: m },
        e => Outcome::Error {
            message: e.to_string(),
        },
    }
}

const SHRINK_BUDGET: usize = 400;

/// Greedy delta-debugging: drop letters and replace subterms while the
/// two routes still disagree. The result always disagrees.
pub fn shrink(
    mode: Mode,
    ab: &[String],
    subject: Subject,
    word: TimedWord,
) -> (Subject, TimedWord) {
    let disagrees = |s: &Subject, w: &TimedWord| {
        prepare(mode, s, ab)
            .and_then(|p| compare(&p, w))
            .map(|d| d.is_some())
            .unwrap_or(false)
    };
    shrink_with(&disagrees, subject, word)
}

/// [`shrink`] against an arbitrary failure predicate.
pub fn shrink_with(
    fails: &dyn Fn(&Subject, &TimedWord) -> bool,
    mut subject: Subject,
    mut word: TimedWord,
) -> (Subject, TimedWord) {
    let mut budget = SHRINK_BUDGET;
    'outer: while budget > 0 {
        for w in word_candidates(&word) {
            budget = budget.saturating_sub(1);
            if fails(&subject, &w) {
                word = w;
                continue 'outer;
            }
        }
        for s in subject_candidates(&subject) {
            budget = budget.saturating_sub(1);
            if budget == 0 {
                break 'outer;
            }
            if fails(&s, &word) {
                subject = s;
                continue 'outer;
            }
        }
        break;
    }
    (subject, word)
}

/// The word with one letter removed, timestamps shifted so the first is 0.
pub fn word_candidates(w: &TimedWord) -> Vec<TimedWord> {
    if w.len() <= 1 {
        return Vec::new();
    }
    (0..w.len())
        .filter_map(|k| {
            let mut letters = w.letters().to_vec();
            letters.remove(k);
            let t0 = letters[0].1;
            for l in &mut letters {
                l.1 -= t0;
            }
            TimedWord::new(letters).ok()
        })
        .collect()
}

fn subject_candidates(s: &Subject) -> Vec<Subject> {
    match s {
        Subject::Formula(f) => {
            let n = f.size();
            formula_candidates(f)
                .into_iter()
                .filter(|c| c.size() < n)
                .map(Subject::Formula)
                .collect()
        }
        Subject::Automaton(a) => a
            .delta
            .keys()
            .map(|k| {
                let mut b = a.clone();
                b.delta.remove(k);
                Subject::Automaton(b)
            })
            .collect(),
        Subject::System(sys) => {
            let mut out = Vec::new();
            for (j, e) in sys.equations.iter().enumerate() {
                let n = e.body.size();
                for c in formula_candidates(&e.body)
                    .into_iter()
                    .filter(|c| c.size() < n)
                {
                    let mut s2 = sys.clone();
                    s2.equations[j].body = c;
                    out.push(Subject::System(s2));
                }
            }
            out
        }
    }
}

/// One-step simplifications of a formula: a constant, a direct subformula,
/// or the same shape with one part simplified.
pub fn formula_candidates(f: &F) -> Vec<F> {
    let mut out = vec![tt(), ff()];
    match &**f {
        Formula::Not(a) => {
            out.push(a.clone());
            out.extend(formula_candidates(a).into_iter().map(not));
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let mk = |x: F, y: F| {
                if matches!(&**f, Formula::And(..)) {
                    and(x, y)
                } else {
                    or(x, y)
                }
            };
            out.push(a.clone());
            out.push(b.clone());
            out.extend(formula_candidates(a).into_iter().map(|c| mk(c, b.clone())));
            out.extend(formula_candidates(b).into_iter().map(|c| mk(a.clone(), c)));
        }
        Formula::Rat(i, re) => out.extend(regex_candidates(re).into_iter().map(|r| rat(*i, r))),
        Formula::FRat(i, re, g) => {
            out.push(g.clone());
            out.extend(
                regex_candidates(re)
                    .into_iter()
                    .map(|r| frat(*i, r, g.clone())),
            );
            out.extend(
                formula_candidates(g)
                    .into_iter()
                    .map(|c| frat(*i, re.clone(), c)),
            );
        }
        Formula::URat(i, re, g, h) => {
            out.push(h.clone());
            out.push(frat(*i, re.clone(), h.clone()));
            let u = |re: Regex, g: F, h: F| std::rc::Rc::new(Formula::URat(*i, re, g, h));
            out.extend(
                regex_candidates(re)
                    .into_iter()
                    .map(|r| u(r, g.clone(), h.clone())),
            );
            out.extend(
                formula_candidates(g)
                    .into_iter()
                    .map(|c| u(re.clone(), c, h.clone())),
            );
            out.extend(
                formula_candidates(h)
                    .into_iter()
                    .map(|c| u(re.clone(), g.clone(), c)),
            );
        }
        Formula::Mu(z, a) | Formula::Nu(z, a) => {
            let mu = matches!(&**f, Formula::Mu(..));
            out.extend(formula_candidates(a).into_iter().map(|c| {
                std::rc::Rc::new(if mu {
                    Formula::Mu(z.clone(), c)
                } else {
                    Formula::Nu(z.clone(), c)
                })
            }));
        }
        _ => {}
    }
    out
}

fn regex_candidates(re: &Regex) -> Vec<Regex> {
    let mut out = Vec::new();
    match re {
        Regex::Empty | Regex::Eps => {}
        Regex::Atom(f) => {
            out.push(Regex::Eps);
            out.extend(formula_candidates(f).into_iter().map(Regex::atom));
        }
        Regex::Concat(a, b) | Regex::Union(a, b) => {
            let cat = matches!(re, Regex::Concat(..));
            let mk = |x: Regex, y: Regex| {
                if cat {
                    Regex::concat(x, y)
                } else {
                    Regex::union(x, y)
                }
            };
            out.push((**a).clone());
            out.push((**b).clone());
            out.extend(
                regex_candidates(a)
                    .into_iter()
                    .map(|c| mk(c, (**b).clone())),
            );
            out.extend(
                regex_candidates(b)
                    .into_iter()
                    .map(|c| mk((**a).clone(), c)),
            );
        }
        Regex::Star(a) => {
            out.push(Regex::Eps);
            out.push((**a).clone());
            out.extend(regex_candidates(a).into_iter().map(Regex::star));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    #[test]
    fn same_seed_same_report() {
        let mut cfg = Config::new(Mode::Compile);
        cfg.count = 6;
        cfg.words = 30;
        cfg.seed = 7;
        let a = serde_json::to_string(&run(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(run(&cfg).unwrap().all_agree());
    }

    #[test]
    fn shrunk_counterexample_still_fails() {
        // a planted bug: "the formula holds and the word has at least two b's"
        let fails = |s: &Subject, w: &TimedWord| match s {
            Subject::Formula(f) => {
                holds(f, w).unwrap_or(false)
                    && (0..w.len()).filter(|&i| w.props(i).contains("b")).count() >= 2
            }
            _ => false,
        };
        let f = parse_formula("a & (FRat[(0,3)]{true*}(b) | Rat[[0,2]]{a.b*})").unwrap();
        let w = crate::word::word(&[
            (&["a"], "0"),
            (&["b"], "1"),
            (&["a"], "1.5"),
            (&["b"], "2"),
            (&["a", "b"], "2.5"),
        ]);
        assert!(fails(&Subject::Formula(f.clone()), &w));
        let (s, w2) = shrink_with(&fails, Subject::Formula(f.clone()), w.clone());
        assert!(fails(&s, &w2));
        assert!(w2.len() <= 2, "{w2}");
        let Subject::Formula(g) = s else {
            unreachable!()
        };
        assert!(g.size() < f.size(), "{g}");
    }
}
