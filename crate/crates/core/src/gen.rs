//! Seeded random generators for timed words, formulas, automata and
//! equation systems, shared by the test suites and the `difftest` driver.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

pub use rand::{Rng, SeedableRng};

use crate::ata::{Ata, Mask};
use crate::fixpoint::{Equation, EquationSystem, Flavor};
use crate::interval::Interval;
use crate::logic::{and, frat, not, or, prop, rat, tt, urat, var, Regex, F};
use crate::tf::Tf;
use crate::word::{letter, Rational, TimedWord};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn props(n: usize) -> Vec<String> {
    ["a", "b", "c", "d", "e"][..n]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Timestamps are `k/d` with `d <= 16`; gaps are zero with small
/// probability so repeated timestamps occur.
pub fn timed_word(r: &mut Rng64, alphabet: &[String], len: usize) -> TimedWord {
    const DENS: [i64; 7] = [1, 2, 3, 4, 5, 8, 16];
    let mut t = Rational::from_integer(0);
    let mut items = Vec::with_capacity(len);
    for i in 0..len.max(1) {
        if i > 0 && !r.gen_bool(0.15) {
            let d = *DENS.choose(r).expect("non-empty");
            let k = r.gen_range(1..=(3 * d) / 2 + 1);
            t += Rational::new(k, d);
        }
        let mut m: Mask = 0;
        while m == 0 {
            m = r.gen_range(1..1u64 << alphabet.len());
            if r.gen_bool(0.6) {
                m &= m.wrapping_neg(); // keep a single proposition most of the time
            }
        }
        let l = letter(
            alphabet
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, p)| p.clone()),
        );
        items.push((l, t));
    }
    TimedWord::new(items).expect("generated words are valid")
}

pub fn interval(r: &mut Rng64, c_max: u32) -> Interval {
    loop {
        let lo = r.gen_range(0..=c_max);
        let hi = if r.gen_bool(0.25) {
            None
        } else {
            Some(r.gen_range(lo..=c_max + 1))
        };
        if let Ok(i) = Interval::new(lo, r.gen_bool(0.5), hi, r.gen_bool(0.5)) {
            if !i.is_empty() {
                return i;
            }
        }
    }
}

fn literal(r: &mut Rng64, alphabet: &[String]) -> F {
    let p = prop(alphabet.choose(r).expect("non-empty alphabet"));
    if r.gen_bool(0.2) {
        not(p)
    } else {
        p
    }
}

/// Which modalities a random formula may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    Rat,
    FRat,
}

pub struct FormulaGen<'a> {
    pub alphabet: &'a [String],
    pub fragment: Fragment,
    pub c_max: u32,
    /// Recursion variables that may occur under modalities.
    pub vars: Vec<String>,
}

impl FormulaGen<'_> {
    pub fn formula(&self, r: &mut Rng64, depth: usize, size: usize) -> F {
        self.node(r, depth, size, false)
    }

    fn leaf(&self, r: &mut Rng64, guarded: bool) -> F {
        if guarded && !self.vars.is_empty() && r.gen_bool(0.3) {
            return var(self.vars.choose(r).expect("non-empty"));
        }
        match r.gen_range(0..10) {
            0 => tt(),
            _ => literal(r, self.alphabet),
        }
    }

    fn node(&self, r: &mut Rng64, depth: usize, size: usize, guarded: bool) -> F {
        if size <= 1 {
            return self.leaf(r, guarded);
        }
        let modal = depth > 0 && r.gen_bool(0.55);
        if modal {
            let i = interval(r, self.c_max);
            let inner = |r: &mut Rng64| {
                let d = if r.gen_bool(0.6) { 0 } else { depth - 1 };
                self.node(r, d, if d == 0 { 1 } else { size / 2 }, true)
            };
            return match (self.fragment, r.gen_range(0..10)) {
                (Fragment::Rat, 0..=5) => rat(i, self.regex(r, 3, &inner)),
                (_, 9) => {
                    let hold = inner(r);
                    let target = inner(r);
                    urat(i, self.regex(r, 2, &inner), hold, target)
                }
                _ => {
                    let target = inner(r);
                    frat(i, self.regex(r, 3, &inner), target)
                }
            };
        }
        match r.gen_range(0..5) {
            0 => not(self.node(r, depth, size - 1, guarded)),
            1 | 2 => and(
                self.node(r, depth, size / 2, guarded),
                self.node(r, depth, size / 2, guarded),
            ),
            _ => or(
                self.node(r, depth, size / 2, guarded),
                self.node(r, depth, size / 2, guarded),
            ),
        }
    }

    pub fn regex(&self, r: &mut Rng64, size: usize, atom: &dyn Fn(&mut Rng64) -> F) -> Regex {
        if size <= 1 {
            return match r.gen_range(0..12) {
                0 => Regex::Eps,
                _ => Regex::atom(atom(r)),
            };
        }
        match r.gen_range(0..4) {
            0 => Regex::union(
                self.regex(r, size / 2, atom),
                self.regex(r, size - size / 2, atom),
            ),
            1 => Regex::star(self.regex(r, size - 1, atom)),
            _ => Regex::concat(
                self.regex(r, size / 2, atom),
                self.regex(r, size - size / 2, atom),
            ),
        }
    }
}

fn random_tf(r: &mut Rng64, locs: &[usize], resets: &[usize], c_max: u32) -> Tf {
    if r.gen_bool(0.12) {
        return Tf::constant(r.gen_bool(0.5));
    }
    let clauses = r.gen_range(1..=2);
    Tf::or_all((0..clauses).map(|_| {
        let n = r.gen_range(1..=2);
        Tf::and_all((0..n).map(|_| match r.gen_range(0..10) {
            0..=2 => Tf::Clock(interval(r, c_max)),
            3 | 4 if !resets.is_empty() => Tf::Reset(*resets.choose(r).expect("non-empty")),
            _ => Tf::Loc(*locs.choose(r).expect("non-empty")),
        }))
    }))
}

/// Reset-free automaton with up to `max_locs` locations.
pub fn reset_free_ata(r: &mut Rng64, alphabet: &[String], max_locs: usize, c_max: u32) -> Ata {
    let n = r.gen_range(1..=max_locs);
    let mut a = Ata::new(
        alphabet.to_vec(),
        (0..n).map(|i| format!("s{i}")).collect(),
        0,
    );
    for s in 0..n {
        a.finals[s] = r.gen_bool(0.5);
    }
    let locs: Vec<usize> = (0..n).collect();
    let letters: Vec<Mask> = a.letters().collect();
    for s in 0..n {
        for &m in &letters {
            let f = random_tf(r, &locs, &[], c_max);
            a.set(s, m, f);
        }
    }
    a
}

/// Automaton with resets into arbitrary locations; usually not in normal
/// form and not lfr.
pub fn random_ata(r: &mut Rng64, alphabet: &[String], max_locs: usize, c_max: u32) -> Ata {
    let n = r.gen_range(1..=max_locs);
    let mut a = Ata::new(
        alphabet.to_vec(),
        (0..n).map(|i| format!("s{i}")).collect(),
        0,
    );
    for s in 0..n {
        a.finals[s] = r.gen_bool(0.5);
    }
    let locs: Vec<usize> = (0..n).collect();
    let letters: Vec<Mask> = a.letters().collect();
    for s in 0..n {
        for &m in &letters {
            let f = random_tf(r, &locs, &locs, c_max);
            a.set(s, m, f);
        }
    }
    a
}

/// Automaton made of islands; island `i` may reset only into the headers
/// of later islands unless `cyclic` is set.
pub fn island_ata(
    r: &mut Rng64,
    alphabet: &[String],
    islands: usize,
    per_island: usize,
    c_max: u32,
    cyclic: bool,
) -> Ata {
    let mut names = Vec::new();
    let mut members = Vec::new();
    for i in 0..islands {
        let k = r.gen_range(1..=per_island);
        let start = names.len();
        for j in 0..k {
            names.push(format!("i{i}s{j}"));
        }
        members.push((start..start + k).collect::<Vec<_>>());
    }
    let mut a = Ata::new(alphabet.to_vec(), names, 0);
    for s in 0..a.n_locations() {
        a.finals[s] = r.gen_bool(0.5);
    }
    let letters: Vec<Mask> = a.letters().collect();
    for (i, locs) in members.iter().enumerate() {
        let targets: Vec<usize> = members
            .iter()
            .enumerate()
            .filter(|(j, _)| cyclic || *j > i)
            .map(|(_, m)| m[0])
            .collect();
        for &s in locs {
            for &m in &letters {
                let f = random_tf(r, locs, &targets, c_max);
                a.set(s, m, f);
            }
        }
    }
    a
}

/// Guarded equation system over `Z1..Zn` with random flavors; variables
/// occur only under modalities.
pub fn system(r: &mut Rng64, alphabet: &[String], n_vars: usize, c_max: u32) -> EquationSystem {
    let vars: Vec<String> = (1..=n_vars).map(|i| format!("Z{i}")).collect();
    let g = FormulaGen {
        alphabet,
        fragment: Fragment::Rat,
        c_max,
        vars: vars.clone(),
    };
    let equations = vars
        .iter()
        .map(|z| Equation {
            var: z.clone(),
            flavor: if r.gen_bool(0.5) {
                Flavor::Least
            } else {
                Flavor::Greatest
            },
            body: g.formula(r, 2, 5),
        })
        .collect();
    EquationSystem { equations }
}

/// `count` random words of length `1..=max_len`.
pub fn words(seed: u64, alphabet: &[String], count: usize, max_len: usize) -> Vec<TimedWord> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let len = r.gen_range(1..=max_len);
            timed_word(&mut r, alphabet, len)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let ab = props(2);
        let w1 = words(3, &ab, 20, 6);
        let w2 = words(3, &ab, 20, 6);
        assert_eq!(w1, w2);
        assert!(w1.iter().all(|w| w.time(0) == Rational::from_integer(0)));
        let g = FormulaGen {
            alphabet: &ab,
            fragment: Fragment::Rat,
            c_max: 2,
            vars: vec![],
        };
        let mut r = rng(1);
        for _ in 0..50 {
            let f = g.formula(&mut r, 2, 6);
            assert!(f.modal_depth() <= 2);
        }
    }
}
