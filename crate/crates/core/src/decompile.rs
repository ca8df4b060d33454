//! Translation of automata with loop-free resets back into RatMTL, and of
//! C⊕D automata into FRatMTL.
//!
//! Islands are handled leaves first. Inside an island every reset `x.h` is
//! replaced by a witness proposition for the island of `h`; the island
//! formula is synthesized over the extended alphabet and the witnesses are
//! then substituted by the formulas of the lower islands.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::ata::{Ata, Mask};
use crate::automata::{eliminate, Lre};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::logic::{
    and, box_false, frat, letter_class_formula, not, or_all, substitute_props, Regex, F,
};
use crate::structure::{cd_partition, island_order, islands, Islands, Polarity};
use crate::tf::{Atom, Tf};
use crate::untiming::{afa_to_dfa, synthesize_ratmtl, untime, DEFAULT_STATE_CAP};

/// Name of the witness proposition standing for the island headed by `h`.
pub(crate) fn witness_name(a: &Ata, h: usize) -> String {
    format!("~{}", a.locations[h])
}

/// The island `k` of a normal-form automaton as a reset-free automaton over
/// the alphabet extended by one witness proposition per reset target.
/// Locations keep their names; the header becomes location 0.
pub fn strip_resets(a: &Ata, isl: &Islands, k: usize) -> Result<Ata> {
    let members = &isl.islands[k];
    let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut targets = BTreeSet::new();
    for &s in members {
        for m in a.letters() {
            targets.extend(a.delta(s, m).reset_locations());
        }
    }
    let mut alphabet = a.alphabet.clone();
    alphabet.extend(targets.iter().map(|t| witness_name(a, *t)));
    let mut out = Ata::new(
        alphabet,
        members.iter().map(|s| a.locations[*s].clone()).collect(),
        0,
    );
    for (i, s) in members.iter().enumerate() {
        out.finals[i] = a.finals[*s];
    }
    let base_bits: Vec<usize> = a
        .alphabet
        .iter()
        .map(|p| out.alphabet.iter().position(|q| q == p).expect("base prop"))
        .collect();
    let wit_bit: BTreeMap<usize, usize> = targets
        .iter()
        .map(|t| {
            (
                *t,
                out.alphabet
                    .iter()
                    .position(|q| *q == witness_name(a, *t))
                    .expect("witness prop"),
            )
        })
        .collect();
    let letters: Vec<Mask> = out.letters().collect();
    for m in letters {
        let base: Mask = base_bits
            .iter()
            .enumerate()
            .filter(|(_, b)| m >> **b & 1 == 1)
            .map(|(i, _)| 1 << i)
            .sum();
        if base == 0 {
            continue;
        }
        for (i, s) in members.iter().enumerate() {
            let mut bad = None;
            let f = a.delta(*s, base).map_atoms(&mut |x| match x {
                Tf::Reset(t) => Tf::constant(m >> wit_bit[t] & 1 == 1),
                Tf::Loc(t) => match local.get(t) {
                    Some(j) => Tf::Loc(*j),
                    None => {
                        bad = Some(*t);
                        Tf::Bot
                    }
                },
                x => x.clone(),
            });
            if let Some(t) = bad {
                return Err(Error::pre(format!(
                    "location {} leaves its island without a reset",
                    a.locations[t]
                )));
            }
            out.set(i, m, f);
        }
    }
    Ok(out)
}

/// Adds a fresh initial location that reads one arbitrary letter and then
/// continues in the old initial location with the clock still at zero.
pub fn prefix_island(p: &Ata) -> Ata {
    let mut out = Ata::new(p.alphabet.clone(), vec!["~pre".to_string()], 0);
    out.finals[0] = false;
    let off = crate::compile::embed(&mut out, p, "");
    let letters: Vec<Mask> = out.letters().collect();
    for m in letters {
        out.set(0, m, Tf::Loc(p.initial + off));
    }
    out
}

/// Target logic of a decompilation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Rat,
    FRat,
}

/// Letters that occur in real words are those with some base proposition.
fn base_mask(p: &Ata, n_base: &[String]) -> Mask {
    p.alphabet
        .iter()
        .enumerate()
        .filter(|(_, q)| n_base.contains(q))
        .map(|(i, _)| 1 << i)
        .sum()
}

/// Formula over the extended alphabet describing acceptance of `p` from
/// its initial location at the anchor position.
pub(crate) fn island_formula(
    p: &Ata,
    base: &[String],
    target: Target,
    polarity: Option<Polarity>,
) -> Result<F> {
    let real = base_mask(p, base);
    match target {
        Target::Rat => {
            let afa = untime(p)?;
            let mut d = afa_to_dfa(&afa, DEFAULT_STATE_CAP)?;
            d.real = real;
            synthesize_ratmtl(&d)
        }
        Target::FRat => match polarity {
            Some(Polarity::Conjunctive) => Ok(not(frat_island(&p.complement(), real)?)),
            _ => frat_island(p, real),
        },
    }
}

fn lre_to_regex(
    lre: &Lre,
    alphabet: &[String],
    universe: &dyn Fn(Mask) -> bool,
    cache: &mut HashMap<BTreeSet<usize>, F>,
) -> Regex {
    match lre {
        Lre::Empty => Regex::Empty,
        Lre::Eps => Regex::Eps,
        Lre::Class(c) => {
            let f = cache
                .entry(c.clone())
                .or_insert_with(|| {
                    letter_class_formula(
                        alphabet,
                        &c.iter().map(|m| *m as Mask).collect(),
                        universe,
                    )
                })
                .clone();
            Regex::atom(f)
        }
        Lre::Cat(a, b) => Regex::concat(
            lre_to_regex(a, alphabet, universe, cache),
            lre_to_regex(b, alphabet, universe, cache),
        ),
        Lre::Alt(a, b) => Regex::union(
            lre_to_regex(a, alphabet, universe, cache),
            lre_to_regex(b, alphabet, universe, cache),
        ),
        Lre::Star(a) => Regex::star(lre_to_regex(a, alphabet, universe, cache)),
    }
}

/// FRat formula for a reset-free disjunctive island: every clause is either
/// one free location (a move) or clock constraints only (the thread ends
/// successfully when the clock lies in their intersection).
fn frat_island(p: &Ata, real: Mask) -> Result<F> {
    let universe = move |m: Mask| m & real != 0;
    let letters: Vec<Mask> = p.letters().filter(|m| universe(*m)).collect();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut finish: BTreeMap<(usize, Interval), BTreeSet<Mask>> = BTreeMap::new();
    for s in 0..p.n_locations() {
        for &m in &letters {
            for clause in p.delta(s, m).to_dnf() {
                let locs: Vec<usize> = clause
                    .iter()
                    .filter_map(|x| if let Atom::Loc(t) = x { Some(*t) } else { None })
                    .collect();
                let clocks: Vec<Interval> = clause
                    .iter()
                    .filter_map(|x| {
                        if let Atom::Clock(i) = x {
                            Some(*i)
                        } else {
                            None
                        }
                    })
                    .collect();
                match (locs.as_slice(), clocks.is_empty()) {
                    ([], _) => {
                        let i = clocks
                            .iter()
                            .try_fold(Interval::all(), |acc, c| acc.intersect(c));
                        if let Some(i) = i.filter(|i| !i.is_empty()) {
                            finish.entry((s, i)).or_default().insert(m);
                        }
                    }
                    ([t], true) => edges.push((s, m as usize, *t)),
                    _ => {
                        return Err(Error::pre(format!(
                            "location {} is not disjunctive under letter {:?}",
                            p.locations[s],
                            p.letter_of(m)
                        )))
                    }
                }
            }
        }
    }
    let n = p.n_locations();
    let mut cache = HashMap::new();
    let class = |ms: &BTreeSet<Mask>| letter_class_formula(&p.alphabet, ms, &universe);
    let mut end_letters: BTreeMap<usize, BTreeSet<Mask>> = BTreeMap::new();
    for &(s, m, t) in &edges {
        if p.finals[t] {
            end_letters.entry(s).or_default().insert(m as Mask);
        }
    }
    // continuation from location `s` at the position after the anchor
    let mut cont = |s: usize| -> F {
        let mut parts = Vec::new();
        if p.finals[s] {
            parts.push(box_false());
        }
        for ((t, i), ms) in &finish {
            let re = lre_to_regex(
                &eliminate(n, &edges, s, *t),
                &p.alphabet,
                &universe,
                &mut cache,
            );
            if re != Regex::Empty {
                parts.push(frat(*i, re, class(ms)));
            }
        }
        for (t, ms) in &end_letters {
            let re = lre_to_regex(
                &eliminate(n, &edges, s, *t),
                &p.alphabet,
                &universe,
                &mut cache,
            );
            if re != Regex::Empty {
                parts.push(frat(Interval::all(), re, and(class(ms), box_false())));
            }
        }
        or_all(parts)
    };
    let q0 = p.initial;
    let zero = crate::word::int(0);
    let mut parts = Vec::new();
    let now: BTreeSet<Mask> = finish
        .iter()
        .filter(|((s, i), _)| *s == q0 && i.contains(&zero))
        .flat_map(|(_, ms)| ms.iter().copied())
        .collect();
    if !now.is_empty() {
        parts.push(class(&now));
    }
    let mut first: BTreeMap<usize, BTreeSet<Mask>> = BTreeMap::new();
    for &(s, m, t) in &edges {
        if s == q0 {
            first.entry(t).or_default().insert(m as Mask);
        }
    }
    for (t, ms) in first {
        parts.push(and(class(&ms), cont(t)));
    }
    Ok(or_all(parts))
}

fn island_polarity(n: &Ata, isl: &Islands, k: usize, target: Target) -> Result<Option<Polarity>> {
    if target == Target::Rat {
        return Ok(None);
    }
    let part = cd_partition(n).ok_or_else(|| {
        let bad = (0..n.n_locations())
            .find(|s| {
                !crate::structure::disjunctive_ok(n, *s) && !crate::structure::conjunctive_ok(n, *s)
            })
            .map(|s| n.locations[s].clone())
            .unwrap_or_else(|| "a free-connected component".into());
        Error::pre(format!(
            "automaton is not C⊕D (violating transitions at {bad})"
        ))
    })?;
    Ok(part[isl.headers[k]])
}

/// Per-island formulas over base props plus witness props, for the
/// normalized automaton. Every island is prefixed by one letter, as a
/// witness is read at the resetting position; the last formula is the
/// unprefixed initial island.
pub(crate) fn island_bodies(a: &Ata, target: Target) -> Result<(Ata, Islands, Vec<F>)> {
    let (n, isl) = islands(a);
    let mut bodies = Vec::new();
    let mut top = None;
    for k in 0..isl.islands.len() {
        let stripped = strip_resets(&n, &isl, k)?;
        let pol = island_polarity(&n, &isl, k, target)?;
        if isl.headers[k] == n.initial {
            top = Some(island_formula(&stripped, &n.alphabet, target, pol)?);
        }
        bodies.push(island_formula(
            &prefix_island(&stripped),
            &n.alphabet,
            target,
            pol,
        )?);
    }
    bodies.push(top.expect("the initial island is always present"));
    Ok((n, isl, bodies))
}

fn decompile_to(a: &Ata, target: Target) -> Result<F> {
    let (n, isl) = islands(a);
    let order = island_order(&isl)?;
    let mut done: HashMap<String, F> = HashMap::new();
    let mut result = None;
    for k in order {
        let stripped = strip_resets(&n, &isl, k)?;
        let top = isl.headers[k] == n.initial;
        let p = if top {
            stripped
        } else {
            prefix_island(&stripped)
        };
        let pol = island_polarity(&n, &isl, k, target)?;
        let body = substitute_props(&island_formula(&p, &n.alphabet, target, pol)?, &done);
        if top {
            result = Some(body);
        } else {
            done.insert(witness_name(&n, isl.headers[k]), body);
        }
    }
    Ok(result.expect("the initial island is always present"))
}

/// RatMTL formula equivalent to an automaton with loop-free resets.
pub fn decompile(a: &Ata) -> Result<F> {
    decompile_to(a, Target::Rat)
}

/// FRatMTL formula equivalent to a C⊕D automaton with loop-free resets.
pub fn decompile_frat(a: &Ata) -> Result<F> {
    decompile_to(a, Target::FRat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::gen;
    use crate::logic::holds;

    #[test]
    fn po_automaton_round_trip() {
        let a = po_automaton();
        let f = decompile(&a).unwrap();
        for w in gen::words(5, &a.alphabet, 300, 6) {
            assert_eq!(holds(&f, &w).unwrap(), a.accepts(&w).unwrap(), "{w}");
        }
    }

    #[test]
    fn even_b_round_trip() {
        let a = even_b_automaton();
        let f = decompile(&a).unwrap();
        for w in gen::words(6, &a.alphabet, 300, 6) {
            assert_eq!(holds(&f, &w).unwrap(), a.accepts(&w).unwrap(), "{w}");
        }
    }

    #[test]
    fn not_lfr_is_rejected() {
        assert!(matches!(
            decompile(&example_not_lfr()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn frat_round_trip_of_until() {
        let f = crate::logic::parse_formula("FRat[(0,1)]{a*}(b)").unwrap();
        let ab = vec!["a".to_string(), "b".to_string()];
        let a = crate::compile::compile_frat(&f, &ab).unwrap();
        let g = decompile_frat(&a).unwrap();
        assert!(!g.any(&mut |x| matches!(
            x,
            crate::logic::Formula::Rat(..) | crate::logic::Formula::URat(..)
        )));
        for w in gen::words(7, &ab, 300, 6) {
            assert_eq!(holds(&g, &w).unwrap(), holds(&f, &w).unwrap(), "{w}");
        }
    }

    #[test]
    fn strip_keeps_reset_free_islands() {
        let a =
            crate::fixtures::build(&["a"], &["s"], "s", &["s"], &[("s", Sel::All, "s & x < 1")]);
        let (n, isl) = islands(&a);
        let p = strip_resets(&n, &isl, 0).unwrap();
        assert_eq!(p.alphabet, vec!["a".to_string()]);
        assert_eq!(p.delta, n.delta);
    }
}
