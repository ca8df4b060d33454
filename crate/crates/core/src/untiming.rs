//! Untiming of reset-free automata: region-alphabet AFA, determinization,
//! per-region regexes and RatMTL synthesis.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::ata::{mask_letter, Ata, Mask};
use crate::automata::{Dfa, Lre};
use crate::error::{Error, Result};
use crate::logic::{and, ff, letter_class_formula, or_all, rat, tt, Regex, F};
use crate::region::{region_count, Region, RegionWord};
use crate::tf::{Atom, Clause, Tf};

pub const DEFAULT_STATE_CAP: usize = 20_000;

/// Alternating automaton over (letter, region) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Afa {
    pub alphabet: Vec<String>,
    pub c_max: u32,
    pub states: Vec<String>,
    pub initial: usize,
    pub finals: Vec<bool>,
    /// Keyed by (state, letter mask, region index); missing entries are ⊥.
    pub delta: BTreeMap<(usize, Mask, usize), Tf>,
}

/// Resolves every clock constraint per region. Regions never straddle a
/// constraint endpoint because endpoints are integers up to `c_max`.
pub fn untime(p: &Ata) -> Result<Afa> {
    if p.has_resets() {
        return Err(Error::pre("untiming needs a reset-free automaton"));
    }
    let c_max = p.max_constant();
    let mut delta = BTreeMap::new();
    for ((s, m), f) in &p.delta {
        for r in Region::all(c_max) {
            let g = f.at_clock(&r.sample());
            if g != Tf::Bot {
                delta.insert((*s, *m, r.index()), g);
            }
        }
    }
    Ok(Afa {
        alphabet: p.alphabet.clone(),
        c_max,
        states: p.locations.clone(),
        initial: p.initial,
        finals: p.finals.clone(),
        delta,
    })
}

impl Afa {
    pub fn delta(&self, s: usize, m: Mask, r: usize) -> &Tf {
        static BOT: Tf = Tf::Bot;
        self.delta.get(&(s, m, r)).unwrap_or(&BOT)
    }

    fn step(&self, clauses: &[Clause], m: Mask, r: usize) -> Vec<Clause> {
        Tf::from_dnf(clauses)
            .map_atoms(&mut |a| match a {
                Tf::Loc(s) => self.delta(*s, m, r).clone(),
                x => x.clone(),
            })
            .to_dnf()
    }

    fn accepting(&self, clauses: &[Clause]) -> bool {
        clauses.iter().any(|c| {
            c.iter()
                .all(|a| matches!(a, Atom::Loc(s) if self.finals[*s]))
        })
    }

    pub fn accepts(&self, w: &[(Mask, Region)]) -> bool {
        let mut cur = vec![vec![Atom::Loc(self.initial)]];
        for (m, r) in w {
            cur = self.step(&cur, *m, r.index());
            if cur.is_empty() {
                return false;
            }
        }
        self.accepting(&cur)
    }

    pub fn accepts_region_word(&self, w: &RegionWord) -> Result<bool> {
        let letters = w
            .iter()
            .map(|(l, r)| Ok((crate::ata::letter_mask(&self.alphabet, l)?, *r)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.accepts(&letters))
    }

    pub fn to_json(&self) -> Value {
        let transitions: Vec<Value> = self
            .delta
            .iter()
            .map(|((s, m, r), f)| {
                json!({
                    "from": self.states[*s],
                    "letter": mask_letter(&self.alphabet, *m),
                    "region": Region::from_index(*r, self.c_max).to_string(),
                    "to": f.to_text(&self.states),
                })
            })
            .collect();
        json!({
            "alphabet": self.alphabet,
            "c_max": self.c_max,
            "states": self.states,
            "initial": self.states[self.initial],
            "finals": (0..self.states.len()).filter(|s| self.finals[*s]).map(|s| &self.states[s]).collect::<Vec<_>>(),
            "transitions": transitions,
        })
    }
}

/// DFA over the (letter, region) alphabet. Letter index of `(m, r)` is
/// `(m - 1) * regions + r`.
#[derive(Clone, Debug)]
pub struct RegionDfa {
    pub alphabet: Vec<String>,
    pub c_max: u32,
    pub dfa: Dfa,
    /// Letters must intersect this mask to occur in words; others are
    /// treated as don't-cares when describing letter classes.
    pub real: Mask,
}

impl RegionDfa {
    pub fn n_regions(&self) -> usize {
        region_count(self.c_max)
    }

    pub fn letter_index(&self, m: Mask, r: Region) -> usize {
        (m as usize - 1) * self.n_regions() + r.index()
    }

    pub fn letter_of(&self, idx: usize) -> (Mask, Region) {
        let k = self.n_regions();
        (
            (idx / k + 1) as Mask,
            Region::from_index(idx % k, self.c_max),
        )
    }

    pub fn accepts(&self, w: &[(Mask, Region)]) -> bool {
        let idx: Vec<usize> = w.iter().map(|(m, r)| self.letter_index(*m, *r)).collect();
        self.dfa.accepts(&idx)
    }

    pub fn accepts_region_word(&self, w: &RegionWord) -> Result<bool> {
        let letters = w
            .iter()
            .map(|(l, r)| Ok((crate::ata::letter_mask(&self.alphabet, l)?, *r)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.accepts(&letters))
    }

    pub fn to_json(&self) -> Value {
        let transitions: Vec<Value> = (0..self.dfa.n_states())
            .flat_map(|q| {
                (0..self.dfa.n_letters).map(move |a| {
                    let (m, r) = self.letter_of(a);
                    json!({
                        "from": q,
                        "letter": mask_letter(&self.alphabet, m),
                        "region": r.to_string(),
                        "to": self.dfa.trans[q][a],
                    })
                })
            })
            .collect();
        json!({
            "alphabet": self.alphabet,
            "c_max": self.c_max,
            "states": self.dfa.n_states(),
            "initial": self.dfa.initial,
            "finals": (0..self.dfa.n_states()).filter(|q| self.dfa.finals[*q]).collect::<Vec<_>>(),
            "transitions": transitions,
        })
    }

    /// Graphviz rendering; parallel edges are merged into one label.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n");
        for q in 0..self.dfa.n_states() {
            let shape = if self.dfa.finals[q] {
                "doublecircle"
            } else {
                "circle"
            };
            out.push_str(&format!("  q{q} [shape={shape}];\n"));
        }
        out.push_str(&format!("  start -> q{};\n", self.dfa.initial));
        for q in 0..self.dfa.n_states() {
            let mut labels: BTreeMap<usize, Vec<String>> = BTreeMap::new();
            for a in 0..self.dfa.n_letters {
                let (m, r) = self.letter_of(a);
                let props: Vec<String> = mask_letter(&self.alphabet, m).into_iter().collect();
                labels
                    .entry(self.dfa.trans[q][a])
                    .or_default()
                    .push(format!("{{{}}}{}", props.join(","), r));
            }
            for (t, ls) in labels {
                out.push_str(&format!("  q{q} -> q{t} [label=\"{}\"];\n", ls.join(" ")));
            }
        }
        out.push_str("}\n");
        out
    }

    fn universe(&self) -> impl Fn(Mask) -> bool + '_ {
        move |m| m & self.real != 0
    }

    /// Converts a letter-class regex into a formula regex, dropping regions.
    pub fn to_regex(&self, re: &Lre, cache: &mut HashMap<BTreeSet<Mask>, F>) -> Regex {
        match re {
            Lre::Empty => Regex::Empty,
            Lre::Eps => Regex::Eps,
            Lre::Class(c) => {
                let masks: BTreeSet<Mask> = c.iter().map(|a| self.letter_of(*a).0).collect();
                let universe = self.universe();
                let f = cache
                    .entry(masks.clone())
                    .or_insert_with(|| letter_class_formula(&self.alphabet, &masks, &universe))
                    .clone();
                Regex::atom(f)
            }
            Lre::Cat(a, b) => Regex::concat(self.to_regex(a, cache), self.to_regex(b, cache)),
            Lre::Alt(a, b) => Regex::union(self.to_regex(a, cache), self.to_regex(b, cache)),
            Lre::Star(a) => Regex::star(self.to_regex(a, cache)),
        }
    }

    fn region_letters(&self, r: Region) -> impl Fn(usize) -> bool {
        let k = self.n_regions();
        let ri = r.index();
        move |a| a % k == ri
    }
}

/// Determinizes by tracking the AFA state formula as a minimal DNF, then
/// minimizes.
pub fn afa_to_dfa(a: &Afa, cap: usize) -> Result<RegionDfa> {
    let k = region_count(a.c_max);
    let masks: Vec<Mask> = (1..1u64 << a.alphabet.len()).collect();
    let n_letters = masks.len() * k;
    let init = vec![vec![Atom::Loc(a.initial)]];
    let mut ids: HashMap<Vec<Clause>, usize> = HashMap::from([(init.clone(), 0)]);
    let mut states = vec![init];
    let mut trans = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut row = Vec::with_capacity(n_letters);
        for &m in &masks {
            for r in 0..k {
                let next = a.step(&states[i], m, r);
                let id = match ids.get(&next) {
                    Some(id) => *id,
                    None => {
                        if states.len() >= cap {
                            return Err(Error::resource(format!("more than {cap} DFA states")));
                        }
                        ids.insert(next.clone(), states.len());
                        states.push(next);
                        states.len() - 1
                    }
                };
                row.push(id);
            }
        }
        trans.push(row);
        i += 1;
    }
    let finals = states.iter().map(|c| a.accepting(c)).collect();
    let dfa = Dfa {
        n_letters,
        initial: 0,
        finals,
        trans,
    }
    .minimize();
    let real = (1u64 << a.alphabet.len()) - 1;
    Ok(RegionDfa {
        alphabet: a.alphabet.clone(),
        c_max: a.c_max,
        dfa,
        real,
    })
}

/// Regex for the non-empty words of region `r` leading from `p` to `q`.
pub fn region_regex(d: &RegionDfa, p: usize, q: usize, r: Region) -> Regex {
    let allowed = d.region_letters(r);
    let mut by_target: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for a in (0..d.dfa.n_letters).filter(|a| allowed(*a)) {
        by_target.entry(d.dfa.trans[p][a]).or_default().insert(a);
    }
    let mut lre = Lre::Empty;
    for (t, letters) in by_target {
        lre = Lre::alt(
            lre,
            Lre::cat(Lre::Class(letters), d.dfa.paths_regex(t, q, &allowed)),
        );
    }
    d.to_regex(&lre, &mut HashMap::new())
}

/// Builds a formula that holds at a position iff the region word of the
/// suffix starting there is accepted.
///
/// The anchor letter is split off by its DFA successor; every later region
/// contributes `Rat_r(words from q to q')`, nested so that each state path
/// is followed once: `F(q, m) = ⋁_{q'} Rat_{r_m}(re(q, q', r_m)) ∧ F(q', m + 1)`.
pub fn synthesize_ratmtl(d: &RegionDfa) -> Result<F> {
    let regions = Region::all(d.c_max);
    let live = d.dfa.live();
    let mut cache = HashMap::new();
    let mut memo: HashMap<(usize, usize), F> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    // iterate region levels from the back so that F(., m + 1) is ready
    for m in (0..=regions.len()).rev() {
        for q in 0..d.dfa.n_states() {
            let f = if !live[q] {
                ff()
            } else if m == regions.len() {
                if d.dfa.finals[q] {
                    tt()
                } else {
                    ff()
                }
            } else {
                let allowed = d.region_letters(regions[m]);
                let mut parts = Vec::new();
                for q2 in 0..d.dfa.n_states() {
                    let rest = memo[&(q2, m + 1)].clone();
                    if *rest == crate::logic::Formula::False {
                        continue;
                    }
                    let lre = d.dfa.paths_regex(q, q2, &allowed);
                    if lre == Lre::Empty {
                        continue;
                    }
                    let re = d.to_regex(&lre, &mut cache);
                    parts.push(and(rat(regions[m].interval(), re), rest));
                }
                order.push((q, m));
                if order.len() > 1_000_000 {
                    return Err(Error::resource("too many synthesis terms"));
                }
                or_all(parts)
            };
            memo.insert((q, m), f);
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<Mask>> = BTreeMap::new();
    for m in 1..1u64 << d.alphabet.len() {
        let q1 = d.dfa.trans[d.dfa.initial][d.letter_index(m, Region::Point(0))];
        groups.entry(q1).or_default().insert(m);
    }
    let universe = d.universe();
    let parts = groups.into_iter().map(|(q1, masks)| {
        and(
            letter_class_formula(&d.alphabet, &masks, &universe),
            memo[&(q1, 0)].clone(),
        )
    });
    Ok(or_all(parts.collect::<Vec<_>>()))
}

pub fn is_aperiodic(d: &RegionDfa) -> Result<bool> {
    d.dfa.is_aperiodic(200_000)
}

/// Full pipeline for a reset-free automaton.
pub fn synthesize_from_ata(p: &Ata) -> Result<F> {
    let afa = untime(p)?;
    let d = afa_to_dfa(&afa, DEFAULT_STATE_CAP)?;
    synthesize_ratmtl(&d)
}
