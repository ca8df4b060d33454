//! One-clock alternating timed automata: data model, JSON format,
//! membership and boolean operations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::tf::{parse_tf, Atom, Tf};
use crate::word::{int, Letter, Rational, TimedWord};

pub const DEFAULT_CONFIG_CAP: usize = 100_000;

/// Bitmask over an ordered alphabet.
pub type Mask = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ata {
    /// Sorted proposition names.
    pub alphabet: Vec<String>,
    pub locations: Vec<String>,
    pub initial: usize,
    pub finals: Vec<bool>,
    /// Missing entries are ⊥.
    pub delta: BTreeMap<(usize, Mask), Tf>,
}

pub type Configuration = Vec<(usize, Rational)>;

impl Ata {
    pub fn new(alphabet: Vec<String>, locations: Vec<String>, initial: usize) -> Self {
        let n = locations.len();
        let mut alphabet = alphabet;
        alphabet.sort();
        alphabet.dedup();
        assert!(alphabet.len() <= 20, "alphabet too large");
        Ata {
            alphabet,
            locations,
            initial,
            finals: vec![false; n],
            delta: BTreeMap::new(),
        }
    }

    pub fn n_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn loc(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn add_location(&mut self, name: impl Into<String>, final_: bool) -> usize {
        self.locations.push(name.into());
        self.finals.push(final_);
        self.locations.len() - 1
    }

    /// All non-empty letters over the alphabet.
    pub fn letters(&self) -> impl Iterator<Item = Mask> {
        1..(1u64 << self.alphabet.len())
    }

    pub fn mask_of(&self, letter: &Letter) -> Result<Mask> {
        letter_mask(&self.alphabet, letter)
    }

    pub fn letter_of(&self, m: Mask) -> Letter {
        mask_letter(&self.alphabet, m)
    }

    pub fn delta(&self, s: usize, a: Mask) -> &Tf {
        static BOT: Tf = Tf::Bot;
        self.delta.get(&(s, a)).unwrap_or(&BOT)
    }

    pub fn set(&mut self, s: usize, a: Mask, f: Tf) {
        if f == Tf::Bot {
            self.delta.remove(&(s, a));
        } else {
            self.delta.insert((s, a), f);
        }
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals[s]
    }

    pub fn max_constant(&self) -> u32 {
        self.delta.values().map(Tf::max_constant).max().unwrap_or(0)
    }

    pub fn has_resets(&self) -> bool {
        self.delta.values().any(|f| !f.reset_locations().is_empty())
    }

    /// Locations reachable from the initial one through any atom.
    pub fn reachable(&self) -> Vec<bool> {
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.n_locations()];
        for ((s, _), f) in &self.delta {
            f.locations(&mut succ[*s]);
        }
        let mut seen = vec![false; self.n_locations()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            for &t in &succ[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Drops locations not reachable from the initial one.
    pub fn prune(&self) -> Ata {
        let keep = self.reachable();
        self.restrict(&keep)
    }

    pub(crate) fn restrict(&self, keep: &[bool]) -> Ata {
        let mut map = vec![usize::MAX; self.n_locations()];
        let mut out = Ata::new(self.alphabet.clone(), vec![], 0);
        for (i, k) in keep.iter().enumerate() {
            if *k {
                map[i] = out.add_location(self.locations[i].clone(), self.finals[i]);
            }
        }
        out.initial = map[self.initial];
        for ((s, a), f) in &self.delta {
            if keep[*s] {
                out.delta.insert((map[*s], *a), f.rename(&|x| map[x]));
            }
        }
        out
    }

    /// Re-indexes the alphabet to `alphabet` (a superset); letters using the
    /// new propositions see the transition of their restriction.
    pub fn extend_alphabet(&self, alphabet: &[String]) -> Ata {
        let mut alphabet = alphabet.to_vec();
        alphabet.sort();
        alphabet.dedup();
        if alphabet == self.alphabet {
            return self.clone();
        }
        let pos: Vec<usize> = self
            .alphabet
            .iter()
            .map(|p| {
                alphabet
                    .iter()
                    .position(|q| q == p)
                    .expect("alphabet must be a superset")
            })
            .collect();
        let mut out = Ata::new(alphabet.clone(), self.locations.clone(), self.initial);
        out.finals = self.finals.clone();
        for big in 1..(1u64 << alphabet.len()) {
            let mut small = 0;
            for (i, p) in pos.iter().enumerate() {
                if big >> p & 1 == 1 {
                    small |= 1 << i;
                }
            }
            if small == 0 {
                continue;
            }
            for s in 0..self.n_locations() {
                if let Some(f) = self.delta.get(&(s, small)) {
                    out.delta.insert((s, big), f.clone());
                }
            }
        }
        out
    }

    /// Membership with the default configuration cap.
    pub fn accepts(&self, w: &TimedWord) -> Result<bool> {
        self.accepts_with_cap(w, DEFAULT_CONFIG_CAP)
    }

    pub fn accepts_with_cap(&self, w: &TimedWord, cap: usize) -> Result<bool> {
        let letters = w
            .letters()
            .iter()
            .map(|(p, _)| self.mask_of(p))
            .collect::<Result<Vec<_>>>()?;
        let ceiling = int(self.max_constant() as i64 + 1);
        let mut configs: Vec<Configuration> = vec![vec![(self.initial, int(0))]];
        let mut prev = int(0);
        for (i, &a) in letters.iter().enumerate() {
            let t = w.time(i);
            let d = t - prev;
            prev = t;
            let mut models_cache: HashMap<(usize, Rational), Vec<Configuration>> = HashMap::new();
            let mut next: Vec<Configuration> = Vec::new();
            for c in &configs {
                let mut acc: Vec<Configuration> = vec![vec![]];
                for (s, v) in c {
                    let mut v = v + d;
                    if v > ceiling {
                        v = ceiling;
                    }
                    let ms = models_cache
                        .entry((*s, v))
                        .or_insert_with(|| minimal_models(self.delta(*s, a), &v));
                    if ms.is_empty() {
                        acc.clear();
                        break;
                    }
                    let mut grown = Vec::with_capacity(acc.len() * ms.len());
                    for x in &acc {
                        for m in ms.iter() {
                            grown.push(merge(x, m));
                        }
                    }
                    acc = grown;
                    if acc.len() > cap {
                        return Err(Error::resource(format!("more than {cap} configurations")));
                    }
                }
                next.extend(acc);
            }
            configs = antichain(next);
            if configs.len() > cap {
                return Err(Error::resource(format!("more than {cap} configurations")));
            }
            if configs.is_empty() {
                return Ok(false);
            }
        }
        Ok(configs
            .iter()
            .any(|c| c.iter().all(|(s, _)| self.finals[*s])))
    }

    /// Dual automaton accepting the complement language.
    pub fn complement(&self) -> Ata {
        let mut out = self.clone();
        out.finals = self.finals.iter().map(|f| !f).collect();
        out.delta.clear();
        for s in 0..self.n_locations() {
            for a in self.letters() {
                out.set(s, a, self.delta(s, a).dual());
            }
        }
        out
    }

    pub fn conjoin(&self, other: &Ata) -> Result<Ata> {
        self.combine(other, true)
    }

    pub fn disjoin(&self, other: &Ata) -> Result<Ata> {
        self.combine(other, false)
    }

    fn combine(&self, other: &Ata, conj: bool) -> Result<Ata> {
        if self.alphabet != other.alphabet {
            return Err(Error::input("automata have different alphabets"));
        }
        let mut out = Ata::new(self.alphabet.clone(), vec![], 0);
        let init = out.add_location("init", false);
        let off1 = out.n_locations();
        for (i, l) in self.locations.iter().enumerate() {
            out.add_location(format!("l.{l}"), self.finals[i]);
        }
        let off2 = out.n_locations();
        for (i, l) in other.locations.iter().enumerate() {
            out.add_location(format!("r.{l}"), other.finals[i]);
        }
        for ((s, a), f) in &self.delta {
            out.delta.insert((s + off1, *a), f.rename(&|x| x + off1));
        }
        for ((s, a), f) in &other.delta {
            out.delta.insert((s + off2, *a), f.rename(&|x| x + off2));
        }
        for a in self.letters() {
            let f1 = self
                .delta(self.initial, a)
                .rename(&|x| x + off1)
                .reset_subst();
            let f2 = other
                .delta(other.initial, a)
                .rename(&|x| x + off2)
                .reset_subst();
            out.set(
                init,
                a,
                if conj {
                    Tf::and(f1, f2)
                } else {
                    Tf::or(f1, f2)
                },
            );
        }
        Ok(out.prune())
    }

    /// Prefixes all location names, keeping them identifiers.
    pub fn prefixed(&self, prefix: &str) -> Ata {
        let mut out = self.clone();
        for l in &mut out.locations {
            *l = format!("{prefix}{l}");
        }
        out
    }

    /// Makes location names unique identifiers (`[A-Za-z0-9_]`).
    pub fn sanitized(&self) -> Ata {
        let mut out = self.clone();
        let mut seen = BTreeSet::new();
        for l in &mut out.locations {
            let mut base: String = l
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        c
                    } else {
                        '_'
                    }
                })
                .collect();
            if base.is_empty()
                || base.starts_with(|c: char| c.is_ascii_digit())
                || base == "x"
                || base == "top"
                || base == "bot"
                || base == "in"
            {
                base = format!("q{base}");
            }
            let mut name = base.clone();
            let mut k = 1;
            while !seen.insert(name.clone()) {
                name = format!("{base}_{k}");
                k += 1;
            }
            *l = name;
        }
        out
    }

    pub fn to_json(&self) -> String {
        let a = self.sanitized();
        let mut delta = Vec::new();
        for ((s, m), f) in &a.delta {
            delta.push(RawDelta {
                from: a.locations[*s].clone(),
                letter: LetterSpec::Props(a.letter_of(*m).into_iter().collect()),
                formula: f.to_text(&a.locations),
            });
        }
        let raw = RawAta {
            alphabet: a.alphabet.clone(),
            locations: a.locations.clone(),
            initial: a.locations[a.initial].clone(),
            finals: a
                .locations
                .iter()
                .zip(&a.finals)
                .filter(|x| *x.1)
                .map(|x| x.0.clone())
                .collect(),
            delta,
        };
        serde_json::to_string_pretty(&raw).expect("automaton serializes")
    }

    pub fn from_json(text: &str) -> Result<Ata> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::input(format!("automaton JSON: {e}")))?;
        let raw: RawAta =
            serde_json::from_value(v).map_err(|e| Error::input(format!("automaton JSON: {e}")))?;
        let mut locs = raw.locations.clone();
        let mut seen = BTreeSet::new();
        for l in &locs {
            if !seen.insert(l) {
                return Err(Error::input(format!("duplicate location {l:?}")));
            }
        }
        let idx = |n: &str| locs.iter().position(|l| l == n);
        let initial = idx(&raw.initial)
            .ok_or_else(|| Error::input(format!("unknown initial location {:?}", raw.initial)))?;
        let mut ata = Ata::new(raw.alphabet.clone(), std::mem::take(&mut locs), initial);
        if ata.alphabet.len() != raw.alphabet.len() {
            return Err(Error::input("duplicate proposition in alphabet"));
        }
        for f in &raw.finals {
            let i = ata
                .loc(f)
                .ok_or_else(|| Error::input(format!("unknown final location {f:?}")))?;
            ata.finals[i] = true;
        }
        let mut defaults: BTreeMap<usize, Tf> = BTreeMap::new();
        for d in &raw.delta {
            let s = ata
                .loc(&d.from)
                .ok_or_else(|| Error::input(format!("unknown location {:?}", d.from)))?;
            let names = ata.locations.clone();
            let f = parse_tf(&d.formula, &|n| names.iter().position(|l| l == n))?;
            match &d.letter {
                LetterSpec::Wild(w) if w == "_" => {
                    if defaults.insert(s, f).is_some() {
                        return Err(Error::input(format!(
                            "two default transitions for {:?}",
                            d.from
                        )));
                    }
                }
                LetterSpec::Wild(w) => return Err(Error::input(format!("bad letter {w:?}"))),
                LetterSpec::Props(ps) => {
                    let m = ata.mask_of(&ps.iter().cloned().collect())?;
                    if ata.delta.contains_key(&(s, m)) {
                        return Err(Error::input(format!(
                            "duplicate transition for {:?} on {ps:?}",
                            d.from
                        )));
                    }
                    ata.set(s, m, f);
                    ata.delta.entry((s, m)).or_insert(Tf::Bot);
                }
            }
        }
        let explicit: BTreeSet<(usize, Mask)> = ata.delta.keys().copied().collect();
        ata.delta.retain(|_, f| *f != Tf::Bot);
        for (s, f) in defaults {
            for a in ata.letters().collect::<Vec<_>>() {
                if !explicit.contains(&(s, a)) {
                    ata.set(s, a, f.clone());
                }
            }
        }
        Ok(ata)
    }
}

#[derive(Serialize, Deserialize)]
struct RawAta {
    alphabet: Vec<String>,
    locations: Vec<String>,
    initial: String,
    finals: Vec<String>,
    delta: Vec<RawDelta>,
}

#[derive(Serialize, Deserialize)]
struct RawDelta {
    from: String,
    letter: LetterSpec,
    formula: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LetterSpec {
    Props(Vec<String>),
    Wild(String),
}

pub fn letter_mask(alphabet: &[String], letter: &Letter) -> Result<Mask> {
    if letter.is_empty() {
        return Err(Error::input("empty letter"));
    }
    let mut m = 0;
    for p in letter {
        let i = alphabet
            .iter()
            .position(|a| a == p)
            .ok_or_else(|| Error::input(format!("proposition {p:?} not in alphabet")))?;
        m |= 1 << i;
    }
    Ok(m)
}

pub fn mask_letter(alphabet: &[String], m: Mask) -> Letter {
    alphabet
        .iter()
        .enumerate()
        .filter(|(i, _)| m >> i & 1 == 1)
        .map(|(_, p)| p.clone())
        .collect()
}

/// Minimal configurations satisfying `f` when the clock reads `v`.
pub fn minimal_models(f: &Tf, v: &Rational) -> Vec<Configuration> {
    let mut out: Vec<Configuration> = f
        .at_clock(v)
        .to_dnf()
        .into_iter()
        .map(|clause| {
            let mut c: Configuration = clause
                .into_iter()
                .map(|a| match a {
                    Atom::Loc(s) => (s, *v),
                    Atom::Reset(s) => (s, int(0)),
                    Atom::Clock(_) => unreachable!("clocks resolved"),
                })
                .collect();
            c.sort();
            c.dedup();
            c
        })
        .collect();
    out = antichain(out);
    out
}

fn merge(a: &Configuration, b: &Configuration) -> Configuration {
    let mut c: Configuration = a.iter().chain(b.iter()).cloned().collect();
    c.sort();
    c.dedup();
    c
}

fn subset(a: &Configuration, b: &Configuration) -> bool {
    let mut j = 0;
    for x in a {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        if j == b.len() || b[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

/// Keeps only subset-minimal configurations; acceptance is monotone, so a
/// superset is never needed when a subset is present.
fn antichain(mut cs: Vec<Configuration>) -> Vec<Configuration> {
    cs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    cs.dedup();
    let mut out: Vec<Configuration> = Vec::new();
    for c in cs {
        if !out.iter().any(|o| subset(o, &c)) {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{rat, word};

    /// The partially ordered automaton over {a,b} with locations t0,t1,t2.
    pub(crate) fn po_example() -> Ata {
        Ata::from_json(
            r#"{"alphabet":["a","b"],"locations":["t0","t1","t2"],"initial":"t0","finals":["t0","t2"],
            "delta":[
              {"from":"t0","letter":["b"],"formula":"t0"},
              {"from":"t0","letter":["a"],"formula":"(t0 & x.t1) | t2"},
              {"from":"t1","letter":["a"],"formula":"(t1 & x < 1) | x > 1"},
              {"from":"t1","letter":["b"],"formula":"(t1 & x < 1) | x > 1"},
              {"from":"t2","letter":["b"],"formula":"t2"}
            ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn minimal_models_examples() {
        let f = Tf::and(Tf::Loc(0), Tf::Reset(1));
        assert_eq!(
            minimal_models(&f, &rat(3, 2)),
            vec![vec![(0, rat(3, 2)), (1, int(0))]]
        );
        let c = Tf::Clock(crate::interval::Interval::open(1, 2));
        assert_eq!(minimal_models(&c, &rat(3, 2)), vec![Configuration::new()]);
        assert!(minimal_models(&c, &int(3)).is_empty());
    }

    #[test]
    fn po_automaton_verdicts() {
        let a = po_example();
        assert!(a
            .accepts(&word(&[(&["a"], "0"), (&["b"], "1/2"), (&["b"], "3/2")]))
            .unwrap());
        // the only a is the last one, so the t2 branch accepts
        assert!(a.accepts(&word(&[(&["a"], "0"), (&["b"], "1")])).unwrap());
        assert!(!a
            .accepts(&word(&[(&["a"], "0"), (&["b"], "1"), (&["a"], "3/2")]))
            .unwrap());
        assert!(!a.accepts(&word(&[(&["a", "b"], "0")])).unwrap());
        assert!(a.accepts(&word(&[(&["b"], "0")])).unwrap());
    }

    #[test]
    fn complement_flips() {
        let a = po_example();
        let c = a.complement();
        for w in [
            word(&[(&["a"], "0"), (&["b"], "1/2"), (&["b"], "3/2")]),
            word(&[(&["a"], "0"), (&["b"], "1")]),
            word(&[(&["a", "b"], "0")]),
        ] {
            assert_ne!(a.accepts(&w).unwrap(), c.accepts(&w).unwrap());
        }
    }

    #[test]
    fn json_round_trip_and_wildcard() {
        let a = Ata::from_json(
            r#"{"alphabet":["a","b"],"locations":["s"],"initial":"s","finals":["s"],
            "delta":[{"from":"s","letter":"_","formula":"s"},{"from":"s","letter":["a","b"],"formula":"bot"}]}"#,
        )
        .unwrap();
        assert_eq!(a.delta.len(), 2);
        assert!(!a.accepts(&word(&[(&["a", "b"], "0")])).unwrap());
        let b = Ata::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
        let p = po_example();
        assert_eq!(Ata::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn rejects_bad_json() {
        assert!(Ata::from_json(
            r#"{"alphabet":["a"],"locations":["s"],"initial":"q","finals":[],"delta":[]}"#
        )
        .is_err());
        assert!(Ata::from_json(
            r#"{"alphabet":["a"],"locations":["s"],"initial":"s","finals":[],"delta":[{"from":"s","letter":["z"],"formula":"s"}]}"#
        )
        .is_err());
    }

    #[test]
    fn unknown_prop_in_word_is_input_error() {
        let a = po_example();
        assert!(matches!(
            a.accepts(&word(&[(&["c"], "0")])),
            Err(Error::Input(_))
        ));
    }
}
