//! Compilation of RatMTL and FRatMTL formulas into one-clock ATA.
//!
//! Modal subformulas nested inside a modality are first replaced by fresh
//! witness propositions; the automaton built over the extended alphabet is
//! then spliced with the automata of the witnesses and of their negations.

use std::collections::BTreeSet;

use crate::ata::{Ata, Mask};
use crate::automata::{determinize, Dfa};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::logic::glushkov::Glushkov;
use crate::logic::{prop, urat_to_frat, Formula, Regex, F};
use crate::tf::Tf;

const DFA_CAP: usize = 20_000;

/// Truth of a modality-free formula on one letter. Recursion variables count
/// as propositions of the same name.
pub fn holds_on_letter(f: &Formula, alphabet: &[String], m: Mask) -> bool {
    let has = |p: &str| {
        alphabet
            .iter()
            .position(|a| a == p)
            .is_some_and(|i| m >> i & 1 == 1)
    };
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Prop(p) | Formula::Var(p) => has(p),
        Formula::Not(a) => !holds_on_letter(a, alphabet, m),
        Formula::And(a, b) => holds_on_letter(a, alphabet, m) && holds_on_letter(b, alphabet, m),
        Formula::Or(a, b) => holds_on_letter(a, alphabet, m) || holds_on_letter(b, alphabet, m),
        _ => panic!("modal formula evaluated on a single letter"),
    }
}

fn is_letter_predicate(f: &Formula) -> bool {
    f.modal_depth() == 0 && !f.has_fixpoint()
}

/// DFA of a regex whose atoms are letter predicates; letter index `m - 1`
/// stands for mask `m`.
pub fn regex_dfa(re: &Regex, alphabet: &[String]) -> Result<Dfa> {
    let g = Glushkov::new(re);
    let n_letters = (1usize << alphabet.len()) - 1;
    let truth: Vec<Vec<bool>> = g
        .atoms
        .iter()
        .map(|a| {
            (1..=n_letters as Mask)
                .map(|m| holds_on_letter(a, alphabet, m))
                .collect()
        })
        .collect();
    // NFA state 0 is the start, p + 1 is Glushkov position p
    let step = |q: usize, a: usize| -> Vec<usize> {
        let cands = if q == 0 {
            g.first.clone()
        } else {
            g.follow[q - 1].clone()
        };
        cands
            .into_iter()
            .filter(|p| truth[*p][a])
            .map(|p| p + 1)
            .collect()
    };
    let is_final = |q: usize| if q == 0 { g.nullable } else { g.last[q - 1] };
    Ok(determinize(n_letters, &BTreeSet::from([0]), &step, &is_final, DFA_CAP)?.minimize())
}

fn check_alphabet(f: &Formula, alphabet: &[String]) -> Result<()> {
    for p in f.props() {
        if !alphabet.contains(&p) {
            return Err(Error::input(format!("proposition {p:?} not in alphabet")));
        }
    }
    Ok(())
}

fn sorted(alphabet: &[String]) -> Vec<String> {
    let mut a = alphabet.to_vec();
    a.sort();
    a.dedup();
    a
}

/// Automaton for `Rat_I(re)` with letter-predicate atoms, evaluated from
/// its initial location at the anchor position.
///
/// The anchor letter only starts the clock; a wait location skips letters
/// below `I`, DFA copies read the letters inside `I`, and the first letter
/// above `I` (or the end of the word) settles the verdict.
pub fn compile_rat_base(i: &Interval, re: &Regex, alphabet: &[String]) -> Result<Ata> {
    if let Some(a) = re.atoms().iter().find(|a| !is_letter_predicate(a)) {
        return Err(Error::pre(format!("regex atom {a} is not propositional")));
    }
    let alphabet = sorted(alphabet);
    let d = regex_dfa(re, &alphabet)?;
    let live = d.live();
    let mut a = Ata::new(alphabet, vec![], 0);
    a.add_location("q_init", false);
    let below = i.below();
    let above = i.above();
    let wait = below.map(|_| a.add_location("q_wait", d.finals[d.initial]));
    let first_d = a.n_locations();
    for q in 0..d.n_states() {
        a.add_location(format!("d{q}"), d.finals[q]);
    }
    let dloc = |q: usize| {
        if live[q] {
            Tf::Loc(first_d + q)
        } else {
            Tf::Bot
        }
    };
    let step = |q: usize, m: Mask| {
        let mut parts = vec![Tf::and(Tf::Clock(*i), dloc(d.trans[q][m as usize - 1]))];
        if let (true, Some(up)) = (d.finals[q], above) {
            parts.push(Tf::Clock(up));
        }
        Tf::or_all(parts)
    };
    let letters: Vec<Mask> = a.letters().collect();
    for &m in &letters {
        a.set(0, m, wait.map_or(dloc(d.initial), Tf::Loc));
        if let (Some(w), Some(lo)) = (wait, below) {
            a.set(
                w,
                m,
                Tf::or(Tf::and(Tf::Clock(lo), Tf::Loc(w)), step(d.initial, m)),
            );
        }
        for q in (0..d.n_states()).filter(|q| live[*q]) {
            a.set(first_d + q, m, step(q, m));
        }
    }
    Ok(a.prune())
}

/// Automaton for `FRat_I(re)(target)` with letter-predicate atoms and target.
pub fn compile_frat_base(
    i: &Interval,
    re: &Regex,
    target: &Formula,
    alphabet: &[String],
) -> Result<Ata> {
    if let Some(a) = re.atoms().iter().find(|a| !is_letter_predicate(a)) {
        return Err(Error::pre(format!("regex atom {a} is not propositional")));
    }
    if !is_letter_predicate(target) {
        return Err(Error::pre(format!("target {target} is not propositional")));
    }
    let alphabet = sorted(alphabet);
    let d = regex_dfa(re, &alphabet)?;
    let live = d.live();
    let mut a = Ata::new(alphabet.clone(), vec![], 0);
    a.add_location("q_init", false);
    let first_d = a.n_locations();
    for q in 0..d.n_states() {
        a.add_location(format!("d{q}"), false);
    }
    let letters: Vec<Mask> = a.letters().collect();
    for &m in &letters {
        if live[d.initial] {
            a.set(0, m, Tf::Loc(first_d + d.initial));
        }
        for q in (0..d.n_states()).filter(|q| live[*q]) {
            let next = d.trans[q][m as usize - 1];
            let mut parts = Vec::new();
            if live[next] {
                parts.push(Tf::Loc(first_d + next));
            }
            if d.finals[q] && holds_on_letter(target, &alphabet, m) {
                parts.push(Tf::Clock(*i));
            }
            a.set(first_d + q, m, Tf::or_all(parts));
        }
    }
    Ok(a.prune())
}

/// One-location automaton for a letter predicate.
fn letter_automaton(f: &Formula, alphabet: &[String]) -> Ata {
    let mut a = Ata::new(alphabet.to_vec(), vec![], 0);
    a.add_location("p", false);
    let letters: Vec<Mask> = a.letters().collect();
    for m in letters {
        a.set(0, m, Tf::constant(holds_on_letter(f, &a.alphabet, m)));
    }
    a
}

/// Writes the transitions of `src` (over an alphabet containing the base
/// propositions and the witness propositions) into `out` (over the base
/// alphabet) at location offset `offset`. Witness `j` is true at a letter
/// when `pos[j][m]` holds and false when `neg[j][m]` holds; only witnesses
/// the transition actually depends on are enumerated.
pub(crate) fn splice(
    src: &Ata,
    witness_names: &[String],
    pos: &[Vec<Tf>],
    neg: &[Vec<Tf>],
    out: &mut Ata,
    offset: usize,
) -> Result<()> {
    let bit = |p: &String| -> Result<usize> {
        src.alphabet.iter().position(|a| a == p).ok_or_else(|| {
            Error::input(format!("proposition {p:?} missing from extended alphabet"))
        })
    };
    let base_bits: Vec<usize> = out.alphabet.iter().map(bit).collect::<Result<_>>()?;
    let wit_bits: Vec<usize> = witness_names.iter().map(bit).collect::<Result<_>>()?;
    let base_letters: Vec<Mask> = out.letters().collect();
    for s in 0..src.n_locations() {
        for &m in &base_letters {
            let ext: Mask = base_bits
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, b)| 1 << b)
                .sum();
            let with = |t: usize| -> Mask {
                ext | wit_bits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| t >> j & 1 == 1)
                    .map(|(_, b)| 1u64 << b)
                    .sum::<Mask>()
            };
            let k = wit_bits.len();
            let relevant: Vec<usize> = (0..k)
                .filter(|j| {
                    (0..1usize << k)
                        .any(|t| src.delta(s, with(t)) != src.delta(s, with(t ^ (1 << j))))
                })
                .collect();
            let mut parts = Vec::new();
            for sub in 0..1usize << relevant.len() {
                let t: usize = relevant
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| sub >> r & 1 == 1)
                    .map(|(_, j)| 1 << j)
                    .sum();
                let body = src.delta(s, with(t)).rename(&|x| x + offset);
                if body == Tf::Bot {
                    continue;
                }
                let mut conj = vec![body];
                for &j in &relevant {
                    conj.push(if t >> j & 1 == 1 {
                        pos[j][m as usize].clone()
                    } else {
                        neg[j][m as usize].clone()
                    });
                }
                parts.push(Tf::and_all(conj));
            }
            out.set(s + offset, m, Tf::or_all(parts));
        }
    }
    Ok(())
}

/// Appends the locations and transitions of `a` (same alphabet) to `out`
/// under a name prefix; returns the offset.
pub(crate) fn embed(out: &mut Ata, a: &Ata, prefix: &str) -> usize {
    let off = out.n_locations();
    for (i, l) in a.locations.iter().enumerate() {
        out.add_location(format!("{prefix}{l}"), a.finals[i]);
    }
    for ((s, m), f) in &a.delta {
        out.delta.insert((s + off, *m), f.rename(&|x| x + off));
    }
    off
}

/// Initial transitions of `a` read at clock 0 with every spawned location
/// reset, indexed by letter mask and shifted by `off`.
pub(crate) fn anchor_moves(a: &Ata, off: usize) -> Vec<Tf> {
    let mut v = vec![Tf::Bot];
    v.extend(
        a.letters()
            .map(|m| a.delta(a.initial, m).rename(&|x| x + off).reset_subst()),
    );
    v
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Rat,
    FRat,
}

struct Compiler {
    alphabet: Vec<String>,
    mode: Mode,
    vars_as_props: bool,
}

impl Compiler {
    fn build(&self, f: &F) -> Result<Ata> {
        if f.has_fixpoint() {
            return Err(Error::pre(
                "fixpoint operators are compiled through equation systems",
            ));
        }
        if f.has_var() && !self.vars_as_props {
            return Err(Error::pre("free recursion variable"));
        }
        if is_letter_predicate(f) {
            return Ok(letter_automaton(f, &self.alphabet));
        }
        match &**f {
            Formula::Not(a) => Ok(self.build(a)?.complement()),
            Formula::And(a, b) => self.build(a)?.conjoin(&self.build(b)?),
            Formula::Or(a, b) => self.build(a)?.disjoin(&self.build(b)?),
            Formula::Rat(i, re) => {
                if self.mode == Mode::FRat {
                    return Err(Error::pre("Rat modality in an FRatMTL formula"));
                }
                self.modal(re, None, |re, _, alphabet| {
                    compile_rat_base(i, re, alphabet)
                })
            }
            Formula::FRat(i, re, target) => self.modal(re, Some(target), |re, t, alphabet| {
                compile_frat_base(i, re, t.expect("target"), alphabet)
            }),
            Formula::URat(..) => self.build(&urat_to_frat(f)),
            _ => unreachable!("letter predicates handled above"),
        }
    }

    fn modal(
        &self,
        re: &Regex,
        target: Option<&F>,
        base: impl Fn(&Regex, Option<&Formula>, &[String]) -> Result<Ata>,
    ) -> Result<Ata> {
        let mut witnesses: Vec<F> = Vec::new();
        let mut name_of = |a: &F| -> F {
            if is_letter_predicate(a) {
                return a.clone();
            }
            let j = witnesses.iter().position(|w| w == a).unwrap_or_else(|| {
                witnesses.push(a.clone());
                witnesses.len() - 1
            });
            prop(&format!("~w{j}"))
        };
        let re2 = re.map_atoms(&mut name_of);
        let target2 = target.map(&mut name_of);
        let names: Vec<String> = (0..witnesses.len()).map(|j| format!("~w{j}")).collect();
        let mut ext = self.alphabet.clone();
        ext.extend(names.iter().cloned());
        let proto = base(&re2, target2.as_deref(), &ext)?;
        let mut out = Ata::new(self.alphabet.clone(), vec![], proto.initial);
        for (i, l) in proto.locations.iter().enumerate() {
            out.add_location(l.clone(), proto.finals[i]);
        }
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (j, w) in witnesses.iter().enumerate() {
            let a = self.build(w)?;
            let off = embed(&mut out, &a, &format!("w{j}."));
            pos.push(anchor_moves(&a, off));
            let c = a.complement();
            let off = embed(&mut out, &c, &format!("n{j}."));
            neg.push(anchor_moves(&c, off));
        }
        splice(&proto, &names, &pos, &neg, &mut out, 0)?;
        Ok(out.prune())
    }
}

/// Compiles a fixpoint-free RatMTL formula over `alphabet` (which must
/// contain every proposition of the formula).
pub fn compile(f: &F, alphabet: &[String]) -> Result<Ata> {
    check_alphabet(f, alphabet)?;
    Compiler {
        alphabet: sorted(alphabet),
        mode: Mode::Rat,
        vars_as_props: false,
    }
    .build(f)
}

/// Compiles an FRatMTL formula (URat is rewritten to FRat first); the
/// result is C⊕D and has loop-free resets.
pub fn compile_frat(f: &F, alphabet: &[String]) -> Result<Ata> {
    check_alphabet(f, alphabet)?;
    Compiler {
        alphabet: sorted(alphabet),
        mode: Mode::FRat,
        vars_as_props: false,
    }
    .build(f)
}

/// Compiles a formula whose recursion variables are treated as propositions
/// of the (extended) alphabet.
pub(crate) fn compile_open(f: &F, alphabet: &[String]) -> Result<Ata> {
    Compiler {
        alphabet: sorted(alphabet),
        mode: Mode::Rat,
        vars_as_props: true,
    }
    .build(f)
}

/// The alphabet of a formula's propositions.
pub fn formula_alphabet(f: &Formula) -> Vec<String> {
    f.props().into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::logic::{holds, parse_formula, parse_regex};
    use crate::structure::{check_cd, check_lfr};
    use crate::word::word;

    fn ab() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    #[test]
    fn rat_base_examples() {
        let re = parse_regex("a . a*").unwrap();
        let a = compile_rat_base(&Interval::closed_open(1, 2), &re, &ab()).unwrap();
        assert!(a
            .accepts(&word(&[(&["b"], "0"), (&["a"], "1"), (&["a"], "3/2")]))
            .unwrap());
        assert!(!a
            .accepts(&word(&[(&["b"], "0"), (&["a"], "1"), (&["b"], "3/2")]))
            .unwrap());
        let eps = compile_rat_base(&Interval::closed_open(1, 2), &Regex::Eps, &ab()).unwrap();
        assert!(eps
            .accepts(&word(&[(&["a"], "0"), (&["a"], "5/2")]))
            .unwrap());
        let low = compile_rat_base(&Interval::closed_open(0, 1), &re, &ab()).unwrap();
        assert!(low.loc("q_wait").is_none());
        assert!(check_lfr(&a));
    }

    #[test]
    fn worked_formulas_compile_and_agree() {
        for (text, (yes, no)) in [
            (UNTIL_REGEX, until_regex_words()),
            (NESTED_RAT, nested_rat_words()),
        ] {
            let f = parse_formula(text).unwrap();
            let mut alpha: BTreeSet<String> = f.props();
            alpha.extend(yes.props_used());
            alpha.extend(no.props_used());
            let alpha: Vec<String> = alpha.into_iter().collect();
            let a = compile(&f, &alpha).unwrap();
            assert!(check_lfr(&a));
            assert_eq!(a.accepts(&yes).unwrap(), holds(&f, &yes).unwrap());
            assert_eq!(a.accepts(&no).unwrap(), holds(&f, &no).unwrap());
        }
    }

    #[test]
    fn frat_compile_is_cd() {
        let f = parse_formula("FRat[(0,1)]{a*}(b)").unwrap();
        let a = compile_frat(&f, &ab()).unwrap();
        assert!(check_cd(&a) && check_lfr(&a));
        let n = compile_frat(
            &parse_formula("~FRat[(0,1)]{a*}(b) & FRat[[0,2]]{(a + <FRat[(0,1)]{true*}(a)>)*}(b)")
                .unwrap(),
            &ab(),
        )
        .unwrap();
        assert!(check_cd(&n) && check_lfr(&n));
        assert!(compile_frat(&parse_formula("Rat[(0,1)]{a}").unwrap(), &ab()).is_err());
        let w = word(&[(&["a"], "0"), (&["a"], "1/2"), (&["b"], "3/4")]);
        assert!(a.accepts(&w).unwrap());
    }
}
