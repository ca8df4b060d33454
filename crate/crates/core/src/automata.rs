//! Finite automata over indexed letters: DFAs, minimization, the transition
//! monoid test and state elimination into letter-class regexes.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

use crate::error::{Error, Result};

/// Complete deterministic automaton; `trans[q][a]` is the successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub n_letters: usize,
    pub initial: usize,
    pub finals: Vec<bool>,
    pub trans: Vec<Vec<usize>>,
}

impl Dfa {
    pub fn n_states(&self) -> usize {
        self.finals.len()
    }

    pub fn run(&self, from: usize, word: &[usize]) -> usize {
        word.iter().fold(from, |q, &a| self.trans[q][a])
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.finals[self.run(self.initial, word)]
    }

    /// States that can reach a final state.
    pub fn live(&self) -> Vec<bool> {
        let n = self.n_states();
        let mut preds = vec![Vec::new(); n];
        for (q, row) in self.trans.iter().enumerate() {
            for &t in row {
                preds[t].push(q);
            }
        }
        let mut live = self.finals.clone();
        let mut stack: Vec<usize> = (0..n).filter(|q| live[*q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        live
    }

    /// Minimal equivalent DFA (reachable part, Moore refinement). State 0 of
    /// the result is the initial state.
    pub fn minimize(&self) -> Dfa {
        let mut order = vec![self.initial];
        let mut index = vec![usize::MAX; self.n_states()];
        index[self.initial] = 0;
        let mut k = 0;
        while k < order.len() {
            for &t in &self.trans[order[k]] {
                if index[t] == usize::MAX {
                    index[t] = order.len();
                    order.push(t);
                }
            }
            k += 1;
        }
        let mut class: Vec<usize> = order.iter().map(|&q| self.finals[q] as usize).collect();
        loop {
            let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = Vec::with_capacity(order.len());
            for (i, &q) in order.iter().enumerate() {
                let sig = (
                    class[i],
                    self.trans[q]
                        .iter()
                        .map(|t| class[index[*t]])
                        .collect::<Vec<_>>(),
                );
                let n = sigs.len();
                next.push(*sigs.entry(sig).or_insert(n));
            }
            let stable = sigs.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        let n = class.iter().max().map_or(0, |m| m + 1);
        let mut out = Dfa {
            n_letters: self.n_letters,
            initial: 0,
            finals: vec![false; n],
            trans: vec![vec![]; n],
        };
        for (i, &q) in order.iter().enumerate() {
            let c = class[i];
            if out.trans[c].is_empty() {
                out.finals[c] = self.finals[q];
                out.trans[c] = self.trans[q].iter().map(|t| class[index[*t]]).collect();
            }
        }
        out
    }

    /// Whether the transition monoid is aperiodic: every element `m`
    /// satisfies `m^n = m^(n+1)` with `n` the number of states.
    pub fn is_aperiodic(&self, cap: usize) -> Result<bool> {
        let n = self.n_states();
        let gens: Vec<Vec<usize>> = (0..self.n_letters)
            .map(|a| (0..n).map(|q| self.trans[q][a]).collect())
            .collect();
        let mut seen: BTreeSet<Vec<usize>> = gens.iter().cloned().collect();
        let mut queue: VecDeque<Vec<usize>> = seen.iter().cloned().collect();
        while let Some(m) = queue.pop_front() {
            for g in &gens {
                let mg: Vec<usize> = m.iter().map(|&q| g[q]).collect();
                if seen.insert(mg.clone()) {
                    if seen.len() > cap {
                        return Err(Error::resource(format!(
                            "transition monoid exceeds {cap} elements"
                        )));
                    }
                    queue.push_back(mg);
                }
            }
        }
        let compose = |a: &[usize], b: &[usize]| a.iter().map(|&q| b[q]).collect::<Vec<_>>();
        for m in &seen {
            let mut p = m.clone();
            for _ in 1..n.max(1) {
                p = compose(&p, m);
            }
            if compose(&p, m) != p {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Regex for the words over `allowed` letters leading from `from` to `to`
    /// (including ε when `from == to`).
    pub fn paths_regex(&self, from: usize, to: usize, allowed: &dyn Fn(usize) -> bool) -> Lre {
        let mut edges = Vec::new();
        for (q, row) in self.trans.iter().enumerate() {
            for (a, &t) in row.iter().enumerate() {
                if allowed(a) {
                    edges.push((q, a, t));
                }
            }
        }
        eliminate(self.n_states(), &edges, from, to)
    }
}

/// Subset construction over an NFA given by labelled edges.
pub fn determinize(
    n_letters: usize,
    initial: &BTreeSet<usize>,
    step: &dyn Fn(usize, usize) -> Vec<usize>,
    is_final: &dyn Fn(usize) -> bool,
    cap: usize,
) -> Result<Dfa> {
    let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut sets = vec![initial.clone()];
    ids.insert(initial.clone(), 0);
    let mut trans = Vec::new();
    let mut k = 0;
    while k < sets.len() {
        let mut row = Vec::with_capacity(n_letters);
        for a in 0..n_letters {
            let next: BTreeSet<usize> = sets[k].iter().flat_map(|&q| step(q, a)).collect();
            let id = match ids.get(&next) {
                Some(id) => *id,
                None => {
                    if sets.len() >= cap {
                        return Err(Error::resource(format!("more than {cap} DFA states")));
                    }
                    ids.insert(next.clone(), sets.len());
                    sets.push(next);
                    sets.len() - 1
                }
            };
            row.push(id);
        }
        trans.push(row);
        k += 1;
    }
    let finals = sets
        .iter()
        .map(|s| s.iter().any(|q| is_final(*q)))
        .collect();
    Ok(Dfa {
        n_letters,
        initial: 0,
        finals,
        trans,
    })
}

/// Regular expressions whose atoms are letter classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lre {
    Empty,
    Eps,
    Class(BTreeSet<usize>),
    Cat(Rc<Lre>, Rc<Lre>),
    Alt(Rc<Lre>, Rc<Lre>),
    Star(Rc<Lre>),
}

impl Lre {
    pub fn cat(a: Lre, b: Lre) -> Lre {
        match (a, b) {
            (Lre::Empty, _) | (_, Lre::Empty) => Lre::Empty,
            (Lre::Eps, x) | (x, Lre::Eps) => x,
            (a, b) => Lre::Cat(Rc::new(a), Rc::new(b)),
        }
    }

    pub fn alt(a: Lre, b: Lre) -> Lre {
        match (a, b) {
            (Lre::Empty, x) | (x, Lre::Empty) => x,
            (Lre::Class(x), Lre::Class(y)) => Lre::Class(x.union(&y).copied().collect()),
            (Lre::Eps, Lre::Star(x)) | (Lre::Star(x), Lre::Eps) => Lre::Star(x),
            (a, b) if a == b => a,
            (a, b) => Lre::Alt(Rc::new(a), Rc::new(b)),
        }
    }

    pub fn star(a: Lre) -> Lre {
        match a {
            Lre::Empty | Lre::Eps => Lre::Eps,
            Lre::Star(x) => Lre::Star(x),
            a => Lre::Star(Rc::new(a)),
        }
    }

    pub fn matches(&self, word: &[usize]) -> bool {
        self.ends(0, word).contains(&word.len())
    }

    /// End positions of matches starting at `i` (backtracking oracle).
    fn ends(&self, i: usize, w: &[usize]) -> BTreeSet<usize> {
        match self {
            Lre::Empty => BTreeSet::new(),
            Lre::Eps => BTreeSet::from([i]),
            Lre::Class(c) => {
                if i < w.len() && c.contains(&w[i]) {
                    BTreeSet::from([i + 1])
                } else {
                    BTreeSet::new()
                }
            }
            Lre::Cat(a, b) => a
                .ends(i, w)
                .into_iter()
                .flat_map(|j| b.ends(j, w))
                .collect(),
            Lre::Alt(a, b) => a.ends(i, w).union(&b.ends(i, w)).copied().collect(),
            Lre::Star(a) => {
                let mut out = BTreeSet::from([i]);
                let mut frontier = vec![i];
                while let Some(j) = frontier.pop() {
                    for k in a.ends(j, w) {
                        if k > j && out.insert(k) {
                            frontier.push(k);
                        }
                    }
                }
                out
            }
        }
    }
}

/// State elimination over labelled edges `(from, letter, to)`. Only states
/// both reachable from `from` and co-reachable to `to` take part; states are
/// removed lowest in·out degree first.
pub fn eliminate(n: usize, edges: &[(usize, usize, usize)], from: usize, to: usize) -> Lre {
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for &(p, _, q) in edges {
        fwd[p].push(q);
        bwd[q].push(p);
    }
    let closure = |start: usize, adj: &Vec<Vec<usize>>| {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(q) = stack.pop() {
            for &t in &adj[q] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    };
    let (r, c) = (closure(from, &fwd), closure(to, &bwd));
    if !r[to] {
        return Lre::Empty;
    }
    let keep: Vec<usize> = (0..n).filter(|q| r[*q] && c[*q]).collect();
    let m = keep.len();
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, q)| (*q, i)).collect();
    // nodes 0..m are states, m = start, m + 1 = accept
    let (start, acc) = (m, m + 1);
    let mut g: BTreeMap<(usize, usize), Lre> = BTreeMap::new();
    let add = |g: &mut BTreeMap<(usize, usize), Lre>, i: usize, j: usize, e: Lre| {
        let cur = g.remove(&(i, j)).unwrap_or(Lre::Empty);
        let v = Lre::alt(cur, e);
        if v != Lre::Empty {
            g.insert((i, j), v);
        }
    };
    for &(p, a, q) in edges {
        if let (Some(&i), Some(&j)) = (pos.get(&p), pos.get(&q)) {
            add(&mut g, i, j, Lre::Class(BTreeSet::from([a])));
        }
    }
    add(&mut g, start, pos[&from], Lre::Eps);
    add(&mut g, pos[&to], acc, Lre::Eps);
    let mut alive: BTreeSet<usize> = (0..m).collect();
    while !alive.is_empty() {
        let degree = |k: usize| {
            let ins = g.keys().filter(|(i, j)| *j == k && *i != k).count();
            let outs = g.keys().filter(|(i, j)| *i == k && *j != k).count();
            ins * outs
        };
        let k = *alive.iter().min_by_key(|k| degree(**k)).expect("non-empty");
        alive.remove(&k);
        let loop_ = Lre::star(g.remove(&(k, k)).unwrap_or(Lre::Empty));
        let ins: Vec<(usize, Lre)> = g
            .iter()
            .filter(|((_, j), _)| *j == k)
            .map(|((i, _), e)| (*i, e.clone()))
            .collect();
        let outs: Vec<(usize, Lre)> = g
            .iter()
            .filter(|((i, _), _)| *i == k)
            .map(|((_, j), e)| (*j, e.clone()))
            .collect();
        g.retain(|(i, j), _| *i != k && *j != k);
        for (i, ei) in &ins {
            for (j, ej) in &outs {
                let e = Lre::cat(ei.clone(), Lre::cat(loop_.clone(), ej.clone()));
                add(&mut g, *i, *j, e);
            }
        }
    }
    g.remove(&(start, acc)).unwrap_or(Lre::Empty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity() -> Dfa {
        Dfa {
            n_letters: 1,
            initial: 0,
            finals: vec![true, false],
            trans: vec![vec![1], vec![0]],
        }
    }

    // a.b* over letters a = 0, b = 1; state 2 is the sink
    fn a_bstar() -> Dfa {
        Dfa {
            n_letters: 2,
            initial: 0,
            finals: vec![false, true, false],
            trans: vec![vec![1, 2], vec![2, 1], vec![2, 2]],
        }
    }

    #[test]
    fn aperiodicity() {
        assert!(!parity().is_aperiodic(1000).unwrap());
        assert!(a_bstar().is_aperiodic(1000).unwrap());
    }

    #[test]
    fn minimize_merges_equivalent_states() {
        let d = Dfa {
            n_letters: 1,
            initial: 0,
            finals: vec![true, false, true, false],
            trans: vec![vec![1], vec![2], vec![3], vec![0]],
        };
        let m = d.minimize();
        assert_eq!(m.n_states(), 2);
        for len in 0..8 {
            let w = vec![0; len];
            assert_eq!(m.accepts(&w), d.accepts(&w));
        }
    }

    #[test]
    fn elimination_matches_dfa() {
        let d = a_bstar();
        let re = d.paths_regex(0, 1, &|_| true);
        for len in 0..6 {
            for code in 0..(1 << len) {
                let w: Vec<usize> = (0..len).map(|i| code >> i & 1).collect();
                assert_eq!(re.matches(&w), d.accepts(&w), "{w:?}");
            }
        }
        let p = parity();
        let even = p.paths_regex(0, 0, &|_| true);
        assert!(even.matches(&[]) && even.matches(&[0, 0]) && !even.matches(&[0]));
    }

    #[test]
    fn subset_construction() {
        // NFA for words ending in letter 1
        let d = determinize(
            2,
            &BTreeSet::from([0]),
            &|q, a| match (q, a) {
                (0, 1) => vec![0, 1],
                (0, _) => vec![0],
                _ => vec![],
            },
            &|q| q == 1,
            100,
        )
        .unwrap();
        assert!(d.accepts(&[0, 1]));
        assert!(!d.accepts(&[1, 0]));
        assert_eq!(d.minimize().n_states(), 2);
    }
}
