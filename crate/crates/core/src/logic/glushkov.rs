//! Position automata for regular expressions over formula atoms.

use super::{Regex, F};

/// Glushkov automaton: states are atom occurrences, plus an implicit start.
#[derive(Clone, Debug)]
pub struct Glushkov {
    pub atoms: Vec<F>,
    pub nullable: bool,
    pub first: Vec<usize>,
    pub last: Vec<bool>,
    pub follow: Vec<Vec<usize>>,
}

impl Glushkov {
    pub fn new(re: &Regex) -> Glushkov {
        let mut g = Glushkov {
            atoms: Vec::new(),
            nullable: false,
            first: Vec::new(),
            last: Vec::new(),
            follow: Vec::new(),
        };
        let (nullable, first, last) = g.build(re);
        g.nullable = nullable;
        g.first = first;
        g.last = vec![false; g.atoms.len()];
        for p in last {
            g.last[p] = true;
        }
        for f in &mut g.follow {
            f.sort_unstable();
            f.dedup();
        }
        g
    }

    fn build(&mut self, re: &Regex) -> (bool, Vec<usize>, Vec<usize>) {
        match re {
            Regex::Empty => (false, vec![], vec![]),
            Regex::Eps => (true, vec![], vec![]),
            Regex::Atom(f) => {
                let p = self.atoms.len();
                self.atoms.push(f.clone());
                self.follow.push(Vec::new());
                (false, vec![p], vec![p])
            }
            Regex::Union(a, b) => {
                let (na, mut fa, mut la) = self.build(a);
                let (nb, fb, lb) = self.build(b);
                fa.extend(fb);
                la.extend(lb);
                (na || nb, fa, la)
            }
            Regex::Concat(a, b) => {
                let (na, fa, la) = self.build(a);
                let (nb, fb, lb) = self.build(b);
                for &p in &la {
                    self.follow[p].extend(fb.iter().copied());
                }
                let first = if na {
                    fa.into_iter().chain(fb.iter().copied()).collect()
                } else {
                    fa
                };
                let last = if nb {
                    la.into_iter().chain(lb).collect()
                } else {
                    lb
                };
                (na && nb, first, last)
            }
            Regex::Star(a) => {
                let (_, fa, la) = self.build(a);
                for &p in &la {
                    self.follow[p].extend(fa.iter().copied());
                }
                (true, fa, la)
            }
        }
    }

    /// Positions that may read the next letter from `state`
    /// (`None` = nothing read yet).
    pub fn candidates(&self, state: Option<&[bool]>) -> Vec<usize> {
        match state {
            None => self.first.clone(),
            Some(active) => {
                let mut c: Vec<usize> = active
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a)
                    .flat_map(|(p, _)| self.follow[p].iter().copied())
                    .collect();
                c.sort_unstable();
                c.dedup();
                c
            }
        }
    }

    pub fn accepting(&self, state: Option<&[bool]>) -> bool {
        match state {
            None => self.nullable,
            Some(active) => active.iter().zip(&self.last).any(|(a, l)| *a && *l),
        }
    }

    /// Single-selection membership for a sequence of atom-truth predicates.
    pub fn matches_with(&self, len: usize, truth: &mut impl FnMut(usize, usize) -> bool) -> bool {
        let mut state: Option<Vec<bool>> = None;
        for k in 0..len {
            let mut next = vec![false; self.atoms.len()];
            for p in self.candidates(state.as_deref()) {
                if truth(k, p) {
                    next[p] = true;
                }
            }
            if !next.iter().any(|x| *x) {
                return false;
            }
            state = Some(next);
        }
        self.accepting(state.as_deref())
    }
}
