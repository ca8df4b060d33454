//! RatMTL / FRatMTL / μRatMTL syntax.

pub(crate) mod eval;
pub mod glushkov;
mod letters;
mod parse;
mod print;

use std::collections::BTreeSet;
use std::rc::Rc;

pub use eval::{eval_at, holds, urat_to_frat, Evaluator};
pub use letters::letter_class_formula;
pub use parse::{parse_formula, parse_formula_with_vars, parse_regex};

use crate::interval::Interval;

pub type F = Rc<Formula>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Var(String),
    Not(F),
    And(F, F),
    Or(F, F),
    Rat(Interval, Regex),
    FRat(Interval, Regex, F),
    URat(Interval, Regex, F, F),
    Mu(String, F),
    Nu(String, F),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    /// The empty language; printed as `<false>`.
    Empty,
    Eps,
    Atom(F),
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

pub fn tt() -> F {
    Rc::new(Formula::True)
}

pub fn ff() -> F {
    Rc::new(Formula::False)
}

pub fn prop(p: &str) -> F {
    Rc::new(Formula::Prop(p.to_string()))
}

pub fn var(z: &str) -> F {
    Rc::new(Formula::Var(z.to_string()))
}

pub fn not(f: F) -> F {
    match &*f {
        Formula::True => ff(),
        Formula::False => tt(),
        Formula::Not(g) => g.clone(),
        _ => Rc::new(Formula::Not(f)),
    }
}

pub fn and(a: F, b: F) -> F {
    match (&*a, &*b) {
        (Formula::False, _) | (_, Formula::False) => ff(),
        (Formula::True, _) => b,
        (_, Formula::True) => a,
        _ if a == b => a,
        _ => Rc::new(Formula::And(a, b)),
    }
}

pub fn or(a: F, b: F) -> F {
    match (&*a, &*b) {
        (Formula::True, _) | (_, Formula::True) => tt(),
        (Formula::False, _) => b,
        (_, Formula::False) => a,
        _ if a == b => a,
        _ => Rc::new(Formula::Or(a, b)),
    }
}

pub fn implies(a: F, b: F) -> F {
    or(not(a), b)
}

pub fn and_all(xs: impl IntoIterator<Item = F>) -> F {
    xs.into_iter().fold(tt(), and)
}

pub fn or_all(xs: impl IntoIterator<Item = F>) -> F {
    xs.into_iter().fold(ff(), or)
}

pub fn rat(i: Interval, re: Regex) -> F {
    Rc::new(Formula::Rat(i, re))
}

pub fn frat(i: Interval, re: Regex, f: F) -> F {
    Rc::new(Formula::FRat(i, re, f))
}

pub fn urat(i: Interval, re: Regex, f1: F, f2: F) -> F {
    Rc::new(Formula::URat(i, re, f1, f2))
}

/// `φ1 U_I φ2` as the FRat modality whose regex is `φ1*`.
pub fn desugar_until(f1: F, i: Interval, f2: F) -> F {
    frat(i, Regex::star(Regex::atom(f1)), f2)
}

/// ¬FRat_{[0,∞),⊤*}⊤: no later position exists.
pub fn box_false() -> F {
    not(frat(Interval::all(), Regex::star(Regex::atom(tt())), tt()))
}

/// Rat_{[0,∞)}(ε): true exactly at the last position.
pub fn last() -> F {
    rat(Interval::all(), Regex::Eps)
}

impl Regex {
    pub fn atom(f: F) -> Regex {
        match &*f {
            Formula::False => Regex::Empty,
            _ => Regex::Atom(f),
        }
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
            (Regex::Eps, b) => b,
            (a, Regex::Eps) => a,
            (Regex::Concat(x, y), b) => Regex::concat(*x, Regex::concat(*y, b)),
            (a, b) => Regex::Concat(Box::new(a), Box::new(b)),
        }
    }

    pub fn union(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, b) => b,
            (a, Regex::Empty) => a,
            (a, b) if a == b => a,
            (Regex::Eps, b) if b.nullable() => b,
            (a, Regex::Eps) if a.nullable() => a,
            (a, b) => Regex::Union(Box::new(a), Box::new(b)),
        }
    }

    pub fn star(a: Regex) -> Regex {
        match a {
            Regex::Empty | Regex::Eps => Regex::Eps,
            s @ Regex::Star(_) => s,
            a => Regex::Star(Box::new(a)),
        }
    }

    pub fn plus(a: Regex) -> Regex {
        Regex::concat(a.clone(), Regex::star(a))
    }

    pub fn concat_all(xs: impl IntoIterator<Item = Regex>) -> Regex {
        xs.into_iter().fold(Regex::Eps, Regex::concat)
    }

    pub fn union_all(xs: impl IntoIterator<Item = Regex>) -> Regex {
        xs.into_iter().fold(Regex::Empty, Regex::union)
    }

    pub fn nullable(&self) -> bool {
        match self {
            Regex::Empty | Regex::Atom(_) => false,
            Regex::Eps | Regex::Star(_) => true,
            Regex::Concat(a, b) => a.nullable() && b.nullable(),
            Regex::Union(a, b) => a.nullable() || b.nullable(),
        }
    }

    pub fn atoms(&self) -> Vec<F> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<F>) {
        match self {
            Regex::Atom(f) => out.push(f.clone()),
            Regex::Concat(a, b) | Regex::Union(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Regex::Star(a) => a.collect_atoms(out),
            _ => {}
        }
    }

    pub fn map_atoms(&self, f: &mut impl FnMut(&F) -> F) -> Regex {
        match self {
            Regex::Atom(a) => Regex::atom(f(a)),
            Regex::Concat(a, b) => Regex::concat(a.map_atoms(f), b.map_atoms(f)),
            Regex::Union(a, b) => Regex::union(a.map_atoms(f), b.map_atoms(f)),
            Regex::Star(a) => Regex::star(a.map_atoms(f)),
            x => x.clone(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Regex::Atom(a) => 1 + a.size(),
            Regex::Concat(a, b) | Regex::Union(a, b) => 1 + a.size() + b.size(),
            Regex::Star(a) => 1 + a.size(),
            _ => 1,
        }
    }
}

impl Formula {
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Var(_) => 0,
            Formula::Not(a) | Formula::Mu(_, a) | Formula::Nu(_, a) => a.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Rat(_, re) => 1 + regex_depth(re),
            Formula::FRat(_, re, f) => 1 + regex_depth(re).max(f.modal_depth()),
            Formula::URat(_, re, f, g) => {
                1 + regex_depth(re).max(f.modal_depth()).max(g.modal_depth())
            }
        }
    }

    pub fn is_propositional(&self) -> bool {
        self.modal_depth() == 0 && !self.has_fixpoint()
    }

    pub fn has_fixpoint(&self) -> bool {
        self.any(&mut |f| matches!(f, Formula::Mu(..) | Formula::Nu(..)))
    }

    pub fn has_var(&self) -> bool {
        self.any(&mut |f| matches!(f, Formula::Var(_)))
    }

    /// Uses only FRat modalities (no Rat, no URat).
    pub fn is_frat_only(&self) -> bool {
        !self.any(&mut |f| matches!(f, Formula::Rat(..) | Formula::URat(..)))
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.any(&mut |f| {
            if let Formula::Prop(p) = f {
                out.insert(p.clone());
            }
            false
        });
        out
    }

    /// Recursion variables not bound by an enclosing binder.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(z) if !bound.contains(z) => {
                out.insert(z.clone());
            }
            Formula::Mu(z, a) | Formula::Nu(z, a) => {
                bound.push(z.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Rat(_, re) => re.atoms().iter().for_each(|x| x.collect_free(bound, out)),
            Formula::FRat(_, re, g) => {
                re.atoms().iter().for_each(|x| x.collect_free(bound, out));
                g.collect_free(bound, out);
            }
            Formula::URat(_, re, g, h) => {
                re.atoms().iter().for_each(|x| x.collect_free(bound, out));
                g.collect_free(bound, out);
                h.collect_free(bound, out);
            }
            _ => {}
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.any(&mut |f| {
            if let Formula::Var(p) = f {
                out.insert(p.clone());
            }
            false
        });
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Var(_) => 1,
            Formula::Not(a) | Formula::Mu(_, a) | Formula::Nu(_, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Rat(_, re) => 1 + re.size(),
            Formula::FRat(_, re, f) => 1 + re.size() + f.size(),
            Formula::URat(_, re, f, g) => 1 + re.size() + f.size() + g.size(),
        }
    }

    /// Pre-order search over formulas, including regex atoms. Shared
    /// subformulas are visited once.
    pub fn any(&self, pred: &mut impl FnMut(&Formula) -> bool) -> bool {
        self.any_rec(pred, &mut std::collections::HashSet::new())
    }

    fn any_rec(
        &self,
        pred: &mut impl FnMut(&Formula) -> bool,
        seen: &mut std::collections::HashSet<*const Formula>,
    ) -> bool {
        if pred(self) {
            return true;
        }
        let mut visit = |c: &F| seen.insert(Rc::as_ptr(c)) && c.any_rec(pred, seen);
        match self {
            Formula::Not(a) | Formula::Mu(_, a) | Formula::Nu(_, a) => visit(a),
            Formula::And(a, b) | Formula::Or(a, b) => visit(a) || visit(b),
            Formula::Rat(_, re) => re.atoms().iter().any(visit),
            Formula::FRat(_, re, f) => re.atoms().iter().any(&mut visit) || visit(f),
            Formula::URat(_, re, f, g) => re.atoms().iter().any(&mut visit) || visit(f) || visit(g),
            _ => false,
        }
    }

    /// Largest constant in any interval.
    pub fn max_constant(&self) -> u32 {
        let mut m = 0;
        self.any(&mut |f| {
            match f {
                Formula::Rat(i, _) | Formula::FRat(i, _, _) | Formula::URat(i, _, _, _) => {
                    m = m.max(i.max_constant())
                }
                _ => {}
            }
            false
        });
        m
    }
}

fn regex_depth(re: &Regex) -> usize {
    re.atoms()
        .iter()
        .map(|a| a.modal_depth())
        .max()
        .unwrap_or(0)
}

/// Rebuilds `f` bottom-up; `leaf` may replace any node before recursion
/// (returning `Some`) or leave it to structural rebuilding.
pub fn rewrite(f: &F, leaf: &mut impl FnMut(&F) -> Option<F>) -> F {
    if let Some(g) = leaf(f) {
        return g;
    }
    match &**f {
        Formula::Not(a) => not(rewrite(a, leaf)),
        Formula::And(a, b) => and(rewrite(a, leaf), rewrite(b, leaf)),
        Formula::Or(a, b) => or(rewrite(a, leaf), rewrite(b, leaf)),
        Formula::Rat(i, re) => rat(*i, re.map_atoms(&mut |x| rewrite(x, leaf))),
        Formula::FRat(i, re, g) => {
            let re = re.map_atoms(&mut |x| rewrite(x, leaf));
            frat(*i, re, rewrite(g, leaf))
        }
        Formula::URat(i, re, g, h) => {
            let re = re.map_atoms(&mut |x| rewrite(x, leaf));
            urat(*i, re, rewrite(g, leaf), rewrite(h, leaf))
        }
        Formula::Mu(z, a) => Rc::new(Formula::Mu(z.clone(), rewrite(a, leaf))),
        Formula::Nu(z, a) => Rc::new(Formula::Nu(z.clone(), rewrite(a, leaf))),
        _ => f.clone(),
    }
}

/// Replaces propositions by formulas, sharing each substitute.
pub fn substitute_props(f: &F, map: &std::collections::HashMap<String, F>) -> F {
    let mut cache: std::collections::HashMap<*const Formula, F> = std::collections::HashMap::new();
    subst_rec(f, map, &mut cache)
}

fn subst_rec(
    f: &F,
    map: &std::collections::HashMap<String, F>,
    cache: &mut std::collections::HashMap<*const Formula, F>,
) -> F {
    if let Some(g) = cache.get(&Rc::as_ptr(f)) {
        return g.clone();
    }
    let out = match &**f {
        Formula::Prop(p) => map.get(p).cloned().unwrap_or_else(|| f.clone()),
        Formula::Not(a) => not(subst_rec(a, map, cache)),
        Formula::And(a, b) => and(subst_rec(a, map, cache), subst_rec(b, map, cache)),
        Formula::Or(a, b) => or(subst_rec(a, map, cache), subst_rec(b, map, cache)),
        Formula::Rat(i, re) => rat(*i, re.map_atoms(&mut |x| subst_rec(x, map, cache))),
        Formula::FRat(i, re, g) => {
            let re = re.map_atoms(&mut |x| subst_rec(x, map, cache));
            frat(*i, re, subst_rec(g, map, cache))
        }
        Formula::URat(i, re, g, h) => {
            let re = re.map_atoms(&mut |x| subst_rec(x, map, cache));
            urat(*i, re, subst_rec(g, map, cache), subst_rec(h, map, cache))
        }
        Formula::Mu(z, a) => Rc::new(Formula::Mu(z.clone(), subst_rec(a, map, cache))),
        Formula::Nu(z, a) => Rc::new(Formula::Nu(z.clone(), subst_rec(a, map, cache))),
        _ => f.clone(),
    };
    cache.insert(Rc::as_ptr(f), out.clone());
    out
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print::formula_to_string(self))
    }
}

impl std::fmt::Display for Regex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print::regex_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{NESTED_RAT, UNTIL_REGEX};

    #[test]
    fn modal_depths() {
        assert_eq!(parse_formula("a & ~b").unwrap().modal_depth(), 0);
        assert_eq!(parse_formula(UNTIL_REGEX).unwrap().modal_depth(), 1);
        assert_eq!(parse_formula(NESTED_RAT).unwrap().modal_depth(), 2);
    }

    #[test]
    fn regex_smart_constructors() {
        let a = Regex::atom(prop("a"));
        assert_eq!(Regex::concat(Regex::Eps, a.clone()), a);
        assert_eq!(Regex::union(Regex::Empty, a.clone()), a);
        assert_eq!(Regex::concat(Regex::Empty, a.clone()), Regex::Empty);
        assert_eq!(Regex::star(Regex::Empty), Regex::Eps);
        assert!(Regex::star(a.clone()).nullable());
        assert!(!Regex::plus(a).nullable());
    }
}
