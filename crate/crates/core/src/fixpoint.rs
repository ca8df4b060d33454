//! μRatMTL: guardedness, equation systems and their unique fixpoint over
//! finite timed words.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use crate::ata::{Ata, Mask};
use crate::compile::{compile_open, splice};
use crate::decompile::{island_bodies, witness_name, Target};
use crate::error::{Error, Result};
use crate::logic::{
    ff, frat, not, rat, rewrite, substitute_props, tt, urat, var, Evaluator, Formula, F,
};
use crate::tf::Tf;
use crate::word::TimedWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Least,
    Greatest,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub var: String,
    pub flavor: Flavor,
    pub body: F,
}

/// `Z_1 ≡ ψ_1; …; Z_m ≡ ψ_m`; the first variable is the one the system
/// defines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub equations: Vec<Equation>,
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            let op = if e.flavor == Flavor::Least {
                "mu"
            } else {
                "nu"
            };
            writeln!(f, "{} ={} {}", e.var, op, e.body)?;
        }
        Ok(())
    }
}

/// Visits variable occurrences that are not under a modality, relative to
/// the binders in `open`.
fn unguarded_vars(f: &Formula, open: &BTreeSet<String>, out: &mut Vec<String>) {
    unguarded_rec(f, open, out, &mut HashSet::new());
}

fn unguarded_rec(
    f: &Formula,
    open: &BTreeSet<String>,
    out: &mut Vec<String>,
    seen: &mut HashSet<*const Formula>,
) {
    if !seen.insert(f as *const Formula) {
        return;
    }
    match f {
        Formula::Var(z) if open.contains(z) => out.push(z.clone()),
        Formula::Not(a) => unguarded_rec(a, open, out, seen),
        Formula::And(a, b) | Formula::Or(a, b) => {
            unguarded_rec(a, open, out, seen);
            unguarded_rec(b, open, out, seen);
        }
        Formula::Mu(z, a) | Formula::Nu(z, a) => {
            let mut inner = open.clone();
            inner.insert(z.clone());
            unguarded_vars(a, &inner, out);
        }
        Formula::Rat(_, re) => guarded_parts(&re.atoms(), &[], out),
        Formula::FRat(_, re, g) => guarded_parts(&re.atoms(), &[g], out),
        Formula::URat(_, re, g, h) => guarded_parts(&re.atoms(), &[g, h], out),
        _ => {}
    }
}

/// Under a modality only binders nested inside can expose variables.
fn guarded_parts(atoms: &[F], args: &[&F], out: &mut Vec<String>) {
    for x in atoms
        .iter()
        .chain(args.iter().copied())
        .filter(|x| x.has_fixpoint())
    {
        unguarded_vars(x, &BTreeSet::new(), out);
    }
}

/// Whether every bound variable occurs only under a strict-future modality
/// within its binder; also lists offending variables.
pub fn check_guarded(f: &Formula) -> (bool, Vec<String>) {
    let mut out = Vec::new();
    unguarded_vars(f, &BTreeSet::new(), &mut out);
    out.sort();
    out.dedup();
    (out.is_empty(), out)
}

/// Replaces unguarded occurrences of `z` (not crossing a modality or a
/// rebinding of `z`) by `value`.
fn replace_unguarded(f: &F, z: &str, value: &F) -> F {
    match &**f {
        Formula::Var(y) if y == z => value.clone(),
        Formula::Not(a) => not(replace_unguarded(a, z, value)),
        Formula::And(a, b) => crate::logic::and(
            replace_unguarded(a, z, value),
            replace_unguarded(b, z, value),
        ),
        Formula::Or(a, b) => crate::logic::or(
            replace_unguarded(a, z, value),
            replace_unguarded(b, z, value),
        ),
        Formula::Mu(y, a) if y != z => {
            Rc::new(Formula::Mu(y.clone(), replace_unguarded(a, z, value)))
        }
        Formula::Nu(y, a) if y != z => {
            Rc::new(Formula::Nu(y.clone(), replace_unguarded(a, z, value)))
        }
        _ => f.clone(),
    }
}

/// Unguarded μ-variables become false and unguarded ν-variables true.
pub fn eliminate_unguarded(f: &F) -> F {
    rewrite(f, &mut |g| match &**g {
        Formula::Mu(z, a) => Some(Rc::new(Formula::Mu(
            z.clone(),
            eliminate_unguarded(&replace_unguarded(a, z, &ff())),
        ))),
        Formula::Nu(z, a) => Some(Rc::new(Formula::Nu(
            z.clone(),
            eliminate_unguarded(&replace_unguarded(a, z, &tt())),
        ))),
        _ => None,
    })
}

fn fresh(base: &str, used: &mut BTreeSet<String>) -> String {
    let mut name = base.to_string();
    let mut k = 2;
    while used.contains(&name) {
        name = format!("{base}{k}");
        k += 1;
    }
    used.insert(name.clone());
    name
}

fn all_binders(f: &Formula, out: &mut BTreeSet<String>) {
    f.any(&mut |g| {
        if let Formula::Mu(z, _) | Formula::Nu(z, _) | Formula::Var(z) = g {
            out.insert(z.clone());
        }
        false
    });
}

/// One equation per binder, inner binders replaced by their variables. A
/// sentence without a top binder gets a fresh defining variable.
pub fn to_equations(f: &F) -> Result<EquationSystem> {
    if !f.free_vars().is_empty() {
        return Err(Error::pre("formula has free recursion variables"));
    }
    let (ok, bad) = check_guarded(f);
    if !ok {
        return Err(Error::pre(format!(
            "unguarded recursion variables: {}",
            bad.join(", ")
        )));
    }
    let mut used = BTreeSet::new();
    all_binders(f, &mut used);
    let mut eqs: Vec<Equation> = Vec::new();
    let top = match &**f {
        Formula::Mu(..) | Formula::Nu(..) => f.clone(),
        _ => {
            let z = fresh("Z", &mut used);
            used.remove(&z);
            Rc::new(Formula::Mu(z, f.clone()))
        }
    };
    let mut names = used.clone();
    extract(&top, &mut eqs, &mut names, &HashMap::new());
    let sys = EquationSystem { equations: eqs };
    unguarded_order(&sys)?;
    Ok(sys)
}

/// Returns the variable replacing binder `f` after pushing its equation
/// (the outer equation first).
fn extract(
    f: &F,
    eqs: &mut Vec<Equation>,
    used: &mut BTreeSet<String>,
    scope: &HashMap<String, String>,
) -> F {
    let (z, body, flavor) = match &**f {
        Formula::Mu(z, b) => (z, b, Flavor::Least),
        Formula::Nu(z, b) => (z, b, Flavor::Greatest),
        _ => unreachable!("binder expected"),
    };
    let name = if eqs.iter().any(|e| &e.var == z) {
        fresh(z, used)
    } else {
        z.clone()
    };
    used.insert(name.clone());
    let mut inner = scope.clone();
    inner.insert(z.clone(), name.clone());
    let slot = eqs.len();
    eqs.push(Equation {
        var: name.clone(),
        flavor,
        body: ff(),
    });
    let body = rename_vars(body, eqs, used, &inner);
    eqs[slot].body = body;
    var(&name)
}

fn rename_vars(
    f: &F,
    eqs: &mut Vec<Equation>,
    used: &mut BTreeSet<String>,
    scope: &HashMap<String, String>,
) -> F {
    match &**f {
        Formula::Var(z) => var(scope.get(z).map_or(z.as_str(), |s| s.as_str())),
        Formula::Mu(..) | Formula::Nu(..) => extract(f, eqs, used, scope),
        Formula::Not(a) => not(rename_vars(a, eqs, used, scope)),
        Formula::And(a, b) => {
            let a = rename_vars(a, eqs, used, scope);
            crate::logic::and(a, rename_vars(b, eqs, used, scope))
        }
        Formula::Or(a, b) => {
            let a = rename_vars(a, eqs, used, scope);
            crate::logic::or(a, rename_vars(b, eqs, used, scope))
        }
        Formula::Rat(i, re) => rat(*i, re.map_atoms(&mut |x| rename_vars(x, eqs, used, scope))),
        Formula::FRat(i, re, g) => {
            let re = re.map_atoms(&mut |x| rename_vars(x, eqs, used, scope));
            frat(*i, re, rename_vars(g, eqs, used, scope))
        }
        Formula::URat(i, re, g, h) => {
            let re = re.map_atoms(&mut |x| rename_vars(x, eqs, used, scope));
            let g = rename_vars(g, eqs, used, scope);
            urat(*i, re, g, rename_vars(h, eqs, used, scope))
        }
        _ => f.clone(),
    }
}

/// Order in which variables can be computed at one position: every
/// unguarded dependency comes first. Cyclic unguarded dependencies are an
/// error.
pub fn unguarded_order(sys: &EquationSystem) -> Result<Vec<usize>> {
    let names: Vec<&String> = sys.equations.iter().map(|e| &e.var).collect();
    let all: BTreeSet<String> = names.iter().map(|s| s.to_string()).collect();
    for e in &sys.equations {
        if let Some(z) = e.body.vars().iter().find(|z| !all.contains(*z)) {
            return Err(Error::input(format!("undeclared recursion variable {z}")));
        }
    }
    let deps: Vec<Vec<usize>> = sys
        .equations
        .iter()
        .map(|e| {
            let mut out = Vec::new();
            unguarded_vars(&e.body, &all, &mut out);
            out.iter()
                .map(|z| names.iter().position(|n| *n == z).expect("declared"))
                .collect()
        })
        .collect();
    let m = deps.len();
    let mut state = vec![0u8; m];
    let mut order = Vec::new();
    fn visit(
        j: usize,
        deps: &[Vec<usize>],
        state: &mut [u8],
        order: &mut Vec<usize>,
        names: &[&String],
    ) -> Result<()> {
        match state[j] {
            2 => return Ok(()),
            1 => {
                return Err(Error::pre(format!(
                    "unguarded cyclic dependency through {}",
                    names[j]
                )))
            }
            _ => {}
        }
        state[j] = 1;
        for &d in &deps[j] {
            visit(d, deps, state, order, names)?;
        }
        state[j] = 2;
        order.push(j);
        Ok(())
    }
    for j in 0..m {
        visit(j, &deps, &mut state, &mut order, &names)?;
    }
    Ok(order)
}

/// Values of every variable at every position (`table[var][pos]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub vars: Vec<String>,
    pub table: Vec<Vec<bool>>,
}

impl Labeling {
    /// Truth of the defining variable at the first position.
    pub fn verdict(&self) -> bool {
        self.table[0][0]
    }

    fn as_map(&self) -> HashMap<String, Vec<bool>> {
        self.vars
            .iter()
            .cloned()
            .zip(self.table.iter().cloned())
            .collect()
    }
}

/// Computes the unique fixpoint by a backward pass: with guarded bodies a
/// variable's value at a position depends only on later positions and on
/// variables it names unguarded, which are computed earlier in the pass.
pub fn evaluate_fixpoint(sys: &EquationSystem, w: &TimedWord) -> Result<Labeling> {
    let order = unguarded_order(sys)?;
    let mut ev = Evaluator::new(w);
    for e in &sys.equations {
        ev.declare_var(&e.var);
    }
    let m = sys.equations.len();
    let mut table = vec![vec![false; w.len()]; m];
    for i in (0..w.len()).rev() {
        for &j in &order {
            let v = ev.eval(&sys.equations[j].body, i)?;
            ev.set_var(&sys.equations[j].var, i, v);
            table[j][i] = v;
        }
    }
    let lab = Labeling {
        vars: sys.equations.iter().map(|e| e.var.clone()).collect(),
        table,
    };
    if !is_fixpoint(sys, w, &lab)? {
        return Err(Error::pre("backward pass did not reach a fixpoint"));
    }
    Ok(lab)
}

/// Whether re-evaluating every body under `lab` reproduces `lab`.
pub fn is_fixpoint(sys: &EquationSystem, w: &TimedWord, lab: &Labeling) -> Result<bool> {
    let mut ev = Evaluator::with_labeling(w, &lab.as_map());
    for (j, e) in sys.equations.iter().enumerate() {
        for i in 0..w.len() {
            if ev.eval(&e.body, i)? != lab.table[j][i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All fixpoints by enumerating every labeling (at most 2^20 of them).
pub fn brute_force_fixpoints(sys: &EquationSystem, w: &TimedWord) -> Result<Vec<Labeling>> {
    let m = sys.equations.len();
    let n = w.len();
    if m * n > 20 {
        return Err(Error::resource(
            "brute-force fixpoint search limited to 20 variable positions",
        ));
    }
    let mut out = Vec::new();
    for code in 0u64..1 << (m * n) {
        let table: Vec<Vec<bool>> = (0..m)
            .map(|j| (0..n).map(|i| code >> (j * n + i) & 1 == 1).collect())
            .collect();
        let lab = Labeling {
            vars: sys.equations.iter().map(|e| e.var.clone()).collect(),
            table,
        };
        if is_fixpoint(sys, w, &lab)? {
            out.push(lab);
        }
    }
    Ok(out)
}

/// Verdict of a μRatMTL sentence at the first position.
pub fn holds_fixpoint(f: &F, w: &TimedWord) -> Result<bool> {
    let sys = to_equations(&eliminate_unguarded(f))?;
    Ok(evaluate_fixpoint(&sys, w)?.verdict())
}

/// Equation system of an arbitrary automaton: one variable per island of
/// its normal form, the initial island first. Resets may form cycles.
pub fn solve_ata_via_equations(a: &Ata, target: Target) -> Result<EquationSystem> {
    let (n, isl, mut bodies) = island_bodies(a, target)?;
    let top = bodies.pop().expect("initial island formula");
    let witnesses: Vec<String> = isl.headers.iter().map(|h| witness_name(&n, *h)).collect();
    let mut used = BTreeSet::new();
    for f in bodies.iter().chain([&top]) {
        used.extend(f.props().into_iter().filter(|p| witnesses.contains(p)));
    }
    // Islands never reset into are dropped; the rest are numbered after the
    // top equation in header order.
    let kept: Vec<usize> = (0..isl.islands.len())
        .filter(|k| used.contains(&witnesses[*k]))
        .collect();
    let subst: HashMap<String, F> = kept
        .iter()
        .enumerate()
        .map(|(j, &k)| (witnesses[k].clone(), var(&format!("Z{}", j + 2))))
        .collect();
    let mut equations = vec![Equation {
        var: "Z1".into(),
        flavor: Flavor::Least,
        body: substitute_props(&top, &subst),
    }];
    for (j, &k) in kept.iter().enumerate() {
        equations.push(Equation {
            var: format!("Z{}", j + 2),
            flavor: Flavor::Least,
            body: substitute_props(&bodies[k], &subst),
        });
    }
    Ok(EquationSystem { equations })
}

/// Membership through the equation system of an automaton.
pub fn accepts_via_equations(a: &Ata, w: &TimedWord) -> Result<bool> {
    for (p, _) in w.letters() {
        a.mask_of(p)?;
    }
    let sys = solve_ata_via_equations(a, Target::Rat)?;
    Ok(evaluate_fixpoint(&sys, w)?.verdict())
}

/// Replaces unguarded variable occurrences by their bodies, in dependency
/// order, so that no body reads a variable at its own anchor.
fn inline_unguarded(sys: &EquationSystem) -> Result<EquationSystem> {
    let order = unguarded_order(sys)?;
    let all: BTreeSet<String> = sys.equations.iter().map(|e| e.var.clone()).collect();
    let mut bodies: Vec<F> = sys.equations.iter().map(|e| e.body.clone()).collect();
    for &j in &order {
        let mut out = Vec::new();
        unguarded_vars(&bodies[j], &all, &mut out);
        for z in out {
            let k = sys
                .equations
                .iter()
                .position(|e| e.var == z)
                .expect("declared");
            bodies[j] = replace_unguarded(&bodies[j], &z, &bodies[k].clone());
        }
    }
    Ok(EquationSystem {
        equations: sys
            .equations
            .iter()
            .zip(bodies)
            .map(|(e, body)| Equation {
                var: e.var.clone(),
                flavor: e.flavor,
                body,
            })
            .collect(),
    })
}

/// Automaton for an equation system: each body is compiled with the
/// variables as extra propositions, then every variable is discharged by
/// resetting into the automaton of its body or of its negation. Reset
/// cycles are allowed.
pub fn compile_equations(sys: &EquationSystem, alphabet: &[String]) -> Result<Ata> {
    let sys = inline_unguarded(sys)?;
    let mut base = alphabet.to_vec();
    base.sort();
    base.dedup();
    let vars: Vec<String> = sys.equations.iter().map(|e| e.var.clone()).collect();
    let mut ext = base.clone();
    ext.extend(vars.iter().cloned());
    let mut out = Ata::new(base.clone(), vec![], 0);
    let mut parts: Vec<(Ata, usize)> = Vec::new();
    for e in &sys.equations {
        for p in e.body.props() {
            if !base.contains(&p) {
                return Err(Error::input(format!("proposition {p:?} not in alphabet")));
            }
        }
        let a = compile_open(&e.body, &ext)?;
        let c = a.complement();
        for (x, prefix) in [(a, format!("{}.", e.var)), (c, format!("not{}.", e.var))] {
            let off = out.n_locations();
            for (i, l) in x.locations.iter().enumerate() {
                out.add_location(format!("{prefix}{l}"), x.finals[i]);
            }
            parts.push((x, off));
        }
    }
    let ext_sorted = parts[0].0.alphabet.clone();
    let base_bits: Vec<usize> = base
        .iter()
        .map(|p| ext_sorted.iter().position(|q| q == p).expect("base prop"))
        .collect();
    let lift = |m: Mask| -> Mask {
        base_bits
            .iter()
            .enumerate()
            .filter(|(i, _)| m >> i & 1 == 1)
            .map(|(_, b)| 1 << b)
            .sum()
    };
    let letters: Vec<Mask> = out.letters().collect();
    let moves = |x: &Ata, off: usize| -> Vec<Tf> {
        let mut v = vec![Tf::Bot];
        v.extend(letters.iter().map(|m| {
            x.delta(x.initial, lift(*m))
                .rename(&|s| s + off)
                .reset_subst()
        }));
        v
    };
    let pos: Vec<Vec<Tf>> = (0..vars.len())
        .map(|j| moves(&parts[2 * j].0, parts[2 * j].1))
        .collect();
    let neg: Vec<Vec<Tf>> = (0..vars.len())
        .map(|j| moves(&parts[2 * j + 1].0, parts[2 * j + 1].1))
        .collect();
    for (x, off) in &parts {
        splice(x, &vars, &pos, &neg, &mut out, *off)?;
    }
    out.initial = parts[0].1 + parts[0].0.initial;
    Ok(out.prune())
}

/// Parses `Z = body` lines (`=mu` / `=nu` select the flavor) or a single
/// μRatMTL sentence.
pub fn parse_system(text: &str) -> Result<EquationSystem> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let is_eq = |l: &str| {
        l.split_once('=').is_some_and(|(lhs, _)| {
            let lhs = lhs.trim();
            lhs.chars().next().is_some_and(|c| c.is_ascii_uppercase())
                && lhs.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
    };
    if lines.is_empty() || !lines.iter().all(|(_, l)| is_eq(l)) {
        let f = crate::logic::parse_formula(text)?;
        return to_equations(&eliminate_unguarded(&f));
    }
    let declared: BTreeSet<String> = lines
        .iter()
        .map(|(_, l)| l.split_once('=').expect("eq").0.trim().to_string())
        .collect();
    let mut equations = Vec::new();
    for (i, l) in lines {
        let (lhs, rhs) = l.split_once('=').expect("eq");
        let (flavor, rhs) = if let Some(r) = rhs.strip_prefix("nu") {
            (Flavor::Greatest, r)
        } else if let Some(r) = rhs.strip_prefix("mu") {
            (Flavor::Least, r)
        } else {
            (Flavor::Least, rhs)
        };
        let body = crate::logic::parse_formula_with_vars(rhs, &declared).map_err(|e| match e {
            Error::Parse { col, msg, .. } => Error::Parse {
                line: i + 1,
                col,
                msg,
            },
            e => e,
        })?;
        equations.push(Equation {
            var: lhs.trim().to_string(),
            flavor,
            body,
        });
    }
    let sys = EquationSystem { equations };
    unguarded_order(&sys)?;
    Ok(sys)
}

/// Position-by-position rendering of a labeling.
pub fn labeling_table(lab: &Labeling, w: &TimedWord) -> String {
    let mut out = String::from("pos\ttime\tletter");
    for z in &lab.vars {
        out.push('\t');
        out.push_str(z);
    }
    out.push('\n');
    for i in 0..w.len() {
        let props: Vec<&String> = w.props(i).iter().collect();
        out.push_str(&format!(
            "{}\t{}\t{{{}}}",
            i + 1,
            crate::word::format_rational(&w.time(i)),
            props
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(",")
        ));
        for row in &lab.table {
            out.push('\t');
            out.push_str(if row[i] { "1" } else { "0" });
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::logic::parse_formula;

    #[test]
    fn guardedness() {
        assert!(check_guarded(&parse_formula(FIX_GUARDED).unwrap()).0);
        let (ok, bad) = check_guarded(&parse_formula(FIX_UNGUARDED).unwrap());
        assert!(!ok);
        assert_eq!(bad, vec!["Z".to_string()]);
        assert!(check_guarded(&parse_formula("mu Z. a").unwrap()).0);
        let e = eliminate_unguarded(&parse_formula(FIX_UNGUARDED).unwrap());
        assert!(check_guarded(&e).0);
        let g = parse_formula(FIX_GUARDED).unwrap();
        assert_eq!(eliminate_unguarded(&g), g);
        let nu = eliminate_unguarded(&parse_formula("nu Z. Z & Rat[(0,1)]{Z*}").unwrap());
        assert_eq!(nu.to_string(), "nu Z. Rat[(0,1)]{Z*}");
    }

    #[test]
    fn nested_binders_to_equations() {
        let f =
            parse_formula("mu Z1. Rat[(1,2)]{a . Z1 . <nu Z2. Rat[(2,3)]{a . Z2 . Z1 . b}> . b}")
                .unwrap();
        let sys = to_equations(&f).unwrap();
        assert_eq!(
            sys.to_string(),
            "Z1 =mu Rat[(1,2)]{a . Z1 . Z2 . b}\nZ2 =nu Rat[(2,3)]{a . Z2 . Z1 . b}\n"
        );
        let plain = to_equations(&parse_formula("a & b").unwrap()).unwrap();
        assert_eq!(plain.equations.len(), 1);
    }

    #[test]
    fn worked_fixpoint_verdicts() {
        let f = parse_formula(FIX_GUARDED).unwrap();
        let (no, yes) = fix_guarded_words();
        assert!(!holds_fixpoint(&f, &no).unwrap());
        assert!(holds_fixpoint(&f, &yes).unwrap());
        let lab = evaluate_fixpoint(&to_equations(&f).unwrap(), &yes).unwrap();
        assert_eq!(lab.table[0], vec![true; 4]);
        let g = parse_formula(FIX_UNGUARDED).unwrap();
        let (yes, no) = fix_unguarded_words();
        assert!(holds_fixpoint(&g, &yes).unwrap());
        assert!(!holds_fixpoint(&g, &no).unwrap());
    }

    #[test]
    fn unique_fixpoint_by_enumeration() {
        let f = parse_formula(FIX_GUARDED).unwrap();
        let sys = to_equations(&f).unwrap();
        let (_, yes) = fix_guarded_words();
        let all = brute_force_fixpoints(&sys, &yes).unwrap();
        assert_eq!(all, vec![evaluate_fixpoint(&sys, &yes).unwrap()]);
    }

    #[test]
    fn equations_compile() {
        let f = parse_formula(FIX_GUARDED).unwrap();
        let sys = to_equations(&f).unwrap();
        let a = compile_equations(&sys, &["a".into(), "b".into()]).unwrap();
        let (no, yes) = fix_guarded_words();
        assert!(!a.accepts(&no).unwrap());
        assert!(a.accepts(&yes).unwrap());
    }

    #[test]
    fn non_lfr_automaton_through_equations() {
        let a = example_cd_a();
        for w in crate::gen::words(9, &a.alphabet, 200, 6) {
            assert_eq!(
                accepts_via_equations(&a, &w).unwrap(),
                a.accepts(&w).unwrap(),
                "{w}"
            );
        }
    }

    #[test]
    fn system_text() {
        let sys = parse_system("X = a | Y\nY =nu Rat[(0,1)]{X*}\n").unwrap();
        assert_eq!(sys.equations.len(), 2);
        assert_eq!(unguarded_order(&sys).unwrap(), vec![1, 0]);
        assert!(parse_system("X = Y\nY = X").is_err());
    }
}
