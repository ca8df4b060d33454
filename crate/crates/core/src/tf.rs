//! Positive boolean transition formulas of a one-clock ATA.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::word::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tf {
    Top,
    Bot,
    Loc(usize),
    /// `x.s`: spawn `s` with the clock reset.
    Reset(usize),
    Clock(Interval),
    And(Vec<Tf>),
    Or(Vec<Tf>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Loc(usize),
    Reset(usize),
    Clock(Interval),
}

pub type Clause = Vec<Atom>;

impl Tf {
    pub fn and(a: Tf, b: Tf) -> Tf {
        Tf::and_all([a, b])
    }

    pub fn or(a: Tf, b: Tf) -> Tf {
        Tf::or_all([a, b])
    }

    pub fn and_all(parts: impl IntoIterator<Item = Tf>) -> Tf {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Tf::Top => {}
                Tf::Bot => return Tf::Bot,
                Tf::And(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Tf::Top,
            1 => out.pop().unwrap(),
            _ => Tf::And(out),
        }
    }

    pub fn or_all(parts: impl IntoIterator<Item = Tf>) -> Tf {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Tf::Bot => {}
                Tf::Top => return Tf::Top,
                Tf::Or(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Tf::Bot,
            1 => out.pop().unwrap(),
            _ => Tf::Or(out),
        }
    }

    pub fn constant(b: bool) -> Tf {
        if b {
            Tf::Top
        } else {
            Tf::Bot
        }
    }

    /// Rebuilds the formula bottom-up, replacing atoms through `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Tf) -> Tf) -> Tf {
        match self {
            Tf::And(xs) => Tf::and_all(xs.iter().map(|x| x.map_atoms(f)).collect::<Vec<_>>()),
            Tf::Or(xs) => Tf::or_all(xs.iter().map(|x| x.map_atoms(f)).collect::<Vec<_>>()),
            atom => f(atom),
        }
    }

    pub fn rename(&self, f: &impl Fn(usize) -> usize) -> Tf {
        self.map_atoms(&mut |a| match a {
            Tf::Loc(s) => Tf::Loc(f(*s)),
            Tf::Reset(s) => Tf::Reset(f(*s)),
            x => x.clone(),
        })
    }

    /// Resolves every clock constraint at clock value `v`.
    pub fn at_clock(&self, v: &Rational) -> Tf {
        self.map_atoms(&mut |a| match a {
            Tf::Clock(i) => Tf::constant(i.contains(v)),
            x => x.clone(),
        })
    }

    /// The formula as read at a point where the clock is 0 and every spawned
    /// thread must start from the current time: clocks resolved at 0 and
    /// free locations turned into resets.
    pub fn reset_subst(&self) -> Tf {
        self.map_atoms(&mut |a| match a {
            Tf::Clock(i) => Tf::constant(i.contains(&Rational::from_integer(0))),
            Tf::Loc(s) => Tf::Reset(*s),
            x => x.clone(),
        })
    }

    /// Dual formula: swaps ∧/∨ and ⊤/⊥, complements clock constraints,
    /// keeps location atoms.
    pub fn dual(&self) -> Tf {
        match self {
            Tf::Top => Tf::Bot,
            Tf::Bot => Tf::Top,
            Tf::Loc(_) | Tf::Reset(_) => self.clone(),
            Tf::Clock(i) => Tf::or_all(i.complement().into_iter().map(Tf::Clock)),
            Tf::And(xs) => Tf::or_all(xs.iter().map(Tf::dual).collect::<Vec<_>>()),
            Tf::Or(xs) => Tf::and_all(xs.iter().map(Tf::dual).collect::<Vec<_>>()),
        }
    }

    pub fn locations(&self, out: &mut BTreeSet<usize>) {
        self.visit(&mut |a| match a {
            Tf::Loc(s) | Tf::Reset(s) => {
                out.insert(*s);
            }
            _ => {}
        });
    }

    pub fn free_locations(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.visit(&mut |a| {
            if let Tf::Loc(s) = a {
                out.insert(*s);
            }
        });
        out
    }

    pub fn reset_locations(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.visit(&mut |a| {
            if let Tf::Reset(s) = a {
                out.insert(*s);
            }
        });
        out
    }

    pub fn max_constant(&self) -> u32 {
        let mut m = 0;
        self.visit(&mut |a| {
            if let Tf::Clock(i) = a {
                m = m.max(i.max_constant());
            }
        });
        m
    }

    pub fn visit(&self, f: &mut impl FnMut(&Tf)) {
        match self {
            Tf::And(xs) | Tf::Or(xs) => xs.iter().for_each(|x| x.visit(f)),
            atom => f(atom),
        }
    }

    /// Truth under a valuation of atoms.
    pub fn eval(&self, val: &impl Fn(&Tf) -> bool) -> bool {
        match self {
            Tf::Top => true,
            Tf::Bot => false,
            Tf::And(xs) => xs.iter().all(|x| x.eval(val)),
            Tf::Or(xs) => xs.iter().any(|x| x.eval(val)),
            atom => val(atom),
        }
    }

    /// Minimal disjunctive normal form. `vec![]` is false, `vec![vec![]]` is true.
    pub fn to_dnf(&self) -> Vec<Clause> {
        match self {
            Tf::Top => vec![vec![]],
            Tf::Bot => vec![],
            Tf::Loc(s) => vec![vec![Atom::Loc(*s)]],
            Tf::Reset(s) => vec![vec![Atom::Reset(*s)]],
            Tf::Clock(i) => vec![vec![Atom::Clock(*i)]],
            Tf::Or(xs) => minimize(xs.iter().flat_map(|x| x.to_dnf()).collect()),
            Tf::And(xs) => {
                let mut acc: Vec<Clause> = vec![vec![]];
                for x in xs {
                    let d = x.to_dnf();
                    let mut next = Vec::with_capacity(acc.len() * d.len());
                    for a in &acc {
                        for b in &d {
                            next.push(union(a, b));
                        }
                    }
                    acc = minimize(next);
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// Minimal conjunctive normal form: each clause is a disjunction of atoms.
    /// `vec![]` is true, `vec![vec![]]` is false.
    pub fn to_cnf(&self) -> Vec<Clause> {
        self.swap_connectives().to_dnf()
    }

    fn swap_connectives(&self) -> Tf {
        match self {
            Tf::Top => Tf::Bot,
            Tf::Bot => Tf::Top,
            Tf::And(xs) => Tf::Or(xs.iter().map(Tf::swap_connectives).collect()),
            Tf::Or(xs) => Tf::And(xs.iter().map(Tf::swap_connectives).collect()),
            x => x.clone(),
        }
    }

    pub fn from_atom(a: &Atom) -> Tf {
        match a {
            Atom::Loc(s) => Tf::Loc(*s),
            Atom::Reset(s) => Tf::Reset(*s),
            Atom::Clock(i) => Tf::Clock(*i),
        }
    }

    pub fn from_dnf(clauses: &[Clause]) -> Tf {
        Tf::or_all(
            clauses
                .iter()
                .map(|c| Tf::and_all(c.iter().map(Tf::from_atom).collect::<Vec<_>>()))
                .collect::<Vec<_>>(),
        )
    }

    pub fn to_text(&self, names: &[String]) -> String {
        self.fmt_prec(names, 0)
    }

    fn fmt_prec(&self, names: &[String], prec: u8) -> String {
        match self {
            Tf::Top => "top".into(),
            Tf::Bot => "bot".into(),
            Tf::Loc(s) => names[*s].clone(),
            Tf::Reset(s) => format!("x.{}", names[*s]),
            Tf::Clock(i) => format!("x in {i}"),
            Tf::Or(xs) => {
                let s = xs
                    .iter()
                    .map(|x| x.fmt_prec(names, 1))
                    .collect::<Vec<_>>()
                    .join(" | ");
                if prec > 0 {
                    format!("({s})")
                } else {
                    s
                }
            }
            Tf::And(xs) => {
                let s = xs
                    .iter()
                    .map(|x| x.fmt_prec(names, 2))
                    .collect::<Vec<_>>()
                    .join(" & ");
                if prec > 1 {
                    format!("({s})")
                } else {
                    s
                }
            }
        }
    }
}

fn union(a: &Clause, b: &Clause) -> Clause {
    let mut c: Clause = a.iter().chain(b.iter()).cloned().collect();
    c.sort();
    c.dedup();
    c
}

fn is_subset(a: &Clause, b: &Clause) -> bool {
    // both sorted
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

/// Drops duplicate and subsumed clauses (a clause subsumes any superset).
pub fn minimize(mut clauses: Vec<Clause>) -> Vec<Clause> {
    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    clauses.dedup();
    let mut out: Vec<Clause> = Vec::new();
    for c in clauses {
        if !out.iter().any(|o| is_subset(o, &c)) {
            out.push(c);
        }
    }
    out.sort();
    out
}

/// Parses the transition-formula grammar; `resolve` maps location names.
pub fn parse_tf(text: &str, resolve: &dyn Fn(&str) -> Option<usize>) -> Result<Tf> {
    let mut p = TfParser {
        chars: text.chars().collect(),
        pos: 0,
        resolve,
    };
    let f = p.or()?;
    p.ws();
    if p.pos < p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct TfParser<'a> {
    chars: Vec<char>,
    pos: usize,
    resolve: &'a dyn Fn(&str) -> Option<usize>,
}

impl TfParser<'_> {
    fn err(&self, msg: &str) -> Error {
        let upto: String = self.chars[..self.pos.min(self.chars.len())]
            .iter()
            .collect();
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            col,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || "_'^".contains(self.chars[self.pos]))
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn or(&mut self) -> Result<Tf> {
        let mut parts = vec![self.and()?];
        while self.eat('|') {
            parts.push(self.and()?);
        }
        Ok(Tf::or_all(parts))
    }

    fn and(&mut self) -> Result<Tf> {
        let mut parts = vec![self.atom()?];
        while self.eat('&') {
            parts.push(self.atom()?);
        }
        Ok(Tf::and_all(parts))
    }

    fn number(&mut self) -> Result<u32> {
        self.ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected a natural number"))
    }

    fn interval(&mut self) -> Result<Interval> {
        self.ws();
        let start = self.pos;
        while self.pos < self.chars.len() && !")]".contains(self.chars[self.pos]) {
            self.pos += 1;
        }
        if self.pos == self.chars.len() {
            return Err(self.err("unterminated interval"));
        }
        self.pos += 1;
        let s: String = self.chars[start..self.pos].iter().collect();
        Interval::parse(&s).map_err(|e| self.err(&e.to_string()))
    }

    fn clock(&mut self) -> Result<Tf> {
        let c = self.peek();
        let two = |p: &Self, a: char, b: char| {
            p.chars.get(p.pos) == Some(&a) && p.chars.get(p.pos + 1) == Some(&b)
        };
        let iv = if two(self, '<', '=') {
            self.pos += 2;
            Interval::upto(self.number()?, true)
        } else if two(self, '>', '=') {
            self.pos += 2;
            Interval::from(self.number()?, true)
        } else if c == Some('<') {
            self.pos += 1;
            let n = self.number()?;
            if n == 0 {
                return Ok(Tf::Bot);
            }
            Interval::upto(n, false)
        } else if c == Some('>') {
            self.pos += 1;
            Interval::from(self.number()?, false)
        } else if c == Some('=') {
            self.pos += 1;
            Interval::point(self.number()?)
        } else {
            match self.ident().as_deref() {
                Some("in") => self.interval()?,
                _ => return Err(self.err("expected `in`, `<`, `<=`, `>`, `>=` or `=` after x")),
            }
        };
        Ok(Tf::Clock(iv))
    }

    fn atom(&mut self) -> Result<Tf> {
        if self.eat('(') {
            let f = self.or()?;
            if !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(f);
        }
        let save = self.pos;
        let id = self.ident().ok_or_else(|| self.err("expected an atom"))?;
        match id.as_str() {
            "top" => Ok(Tf::Top),
            "bot" => Ok(Tf::Bot),
            "x" => {
                if self.eat('.') {
                    if self.peek() == Some('(') {
                        let inner = self.atom()?;
                        Ok(inner.reset_subst())
                    } else {
                        let name = self
                            .ident()
                            .ok_or_else(|| self.err("expected a location after `x.`"))?;
                        self.location(&name).map(Tf::Reset)
                    }
                } else {
                    self.clock()
                }
            }
            name => {
                let _ = save;
                self.location(name).map(Tf::Loc)
            }
        }
    }

    fn location(&self, name: &str) -> Result<usize> {
        (self.resolve)(name).ok_or_else(|| self.err(&format!("unknown location {name:?}")))
    }
}
