use std::collections::BTreeSet;

use super::{eq, fo, lt, q_and, q_and_all, q_implies, q_not, q_or, q_or_all, QFormula, Quant};
use crate::automata::{determinize, Dfa};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::logic::glushkov::Glushkov;
use crate::logic::{letter_class_formula, urat_to_frat, Formula, Regex, F};

/// Free variable of translated formulas; evaluate at position 1.
pub const ANCHOR: &str = "t0";

const MAX_ATOMS: usize = 10;
const DFA_CAP: usize = 4096;

/// `ζ(x, y)`: the letters at positions `x+1 ..= y` form a word of `L(re)`.
pub fn regex_to_mso(re: &Regex, x: &str, y: &str) -> Result<QFormula> {
    Translator::default().run(re, x, y)
}

/// `ψ(t0)` with `w ⊨ φ` iff `w, t0 ↦ 1 ⊨ ψ`.
pub fn ratmtl_to_qkmso(f: &F) -> Result<QFormula> {
    Translator::default().formula(f, ANCHOR)
}

/// As [`ratmtl_to_qkmso`] for the FRat fragment; every metric block has a
/// single quantifier, so the result is a Q2MSO formula.
pub fn fratmtl_to_q2mso(f: &F) -> Result<QFormula> {
    if has_rat(f) {
        return Err(Error::pre(
            "formula uses Rat; the two-variable translation covers FRat/URat only",
        ));
    }
    Translator::default().formula(f, ANCHOR)
}

fn has_rat(f: &F) -> bool {
    match &**f {
        Formula::Rat(..) => true,
        Formula::Not(a) | Formula::Mu(_, a) | Formula::Nu(_, a) => has_rat(a),
        Formula::And(a, b) | Formula::Or(a, b) => has_rat(a) || has_rat(b),
        Formula::FRat(_, re, g) => has_rat(g) || re.atoms().iter().any(has_rat),
        Formula::URat(_, re, g, h) => has_rat(g) || has_rat(h) || re.atoms().iter().any(has_rat),
        _ => false,
    }
}

#[derive(Default)]
struct Translator {
    fresh: usize,
}

impl Translator {
    fn fo_name(&mut self) -> String {
        self.fresh += 1;
        format!("t{}", self.fresh)
    }

    fn so_name(&mut self) -> String {
        self.fresh += 1;
        format!("X{}", self.fresh)
    }

    fn formula(&mut self, f: &F, t: &str) -> Result<QFormula> {
        Ok(match &**f {
            Formula::True => QFormula::True,
            Formula::False => QFormula::False,
            Formula::Prop(p) => QFormula::Letter(p.clone(), t.into()),
            Formula::Var(z) => {
                return Err(Error::pre(format!(
                    "recursion variable {z} has no first-order translation"
                )))
            }
            Formula::Mu(..) | Formula::Nu(..) => {
                return Err(Error::pre(
                    "fixpoint operators have no first-order translation",
                ))
            }
            Formula::Not(a) => q_not(self.formula(a, t)?),
            Formula::And(a, b) => q_and(self.formula(a, t)?, self.formula(b, t)?),
            Formula::Or(a, b) => q_or(self.formula(a, t)?, self.formula(b, t)?),
            Formula::Rat(i, re) => self.rat(i, re, t)?,
            Formula::FRat(i, re, g) => self.frat(i, re, g, t)?,
            Formula::URat(..) => {
                let g = urat_to_frat(f);
                self.formula(&g, t)?
            }
        })
    }

    /// Window positions are `t < s` with `τ_s - τ_t ∈ I`; they form a
    /// contiguous block `first ..= last`, whose letters must match `re`.
    fn rat(&mut self, i: &Interval, re: &Regex, t: &str) -> Result<QFormula> {
        let (first, last, s) = (self.fo_name(), self.fo_name(), self.fo_name());
        let inside = q_implies(lt(t, &s), q_and(le(&first, &s), le(&s, &last)));
        let u = self.fo_name();
        let run = self.run(re, &u, &last)?;
        let pred = fo(
            Quant::Exists,
            &u,
            Some((false, t)),
            q_and(self.pred(&u, &first), run),
        );
        let nonempty = QFormula::Time {
            anchor: t.into(),
            block: vec![
                (Quant::Exists, first.clone(), *i),
                (Quant::Exists, last.clone(), *i),
                (Quant::Forall, s, *i),
            ],
            body: Box::new(q_and_all([lt(t, &first), lt(t, &last), inside, pred])),
        };
        if !Glushkov::new(re).nullable {
            return Ok(nonempty);
        }
        let e = self.fo_name();
        let empty = QFormula::Time {
            anchor: t.into(),
            block: vec![(Quant::Forall, e.clone(), *i)],
            body: Box::new(q_not(lt(t, &e))),
        };
        Ok(q_or(nonempty, empty))
    }

    fn frat(&mut self, i: &Interval, re: &Regex, g: &F, t: &str) -> Result<QFormula> {
        let s = self.fo_name();
        let target = self.formula(g, &s)?;
        let u = self.fo_name();
        let run = self.run(re, t, &u)?;
        let pred = fo(
            Quant::Exists,
            &u,
            Some((false, t)),
            q_and(self.pred(&u, &s), run),
        );
        Ok(QFormula::Time {
            anchor: t.into(),
            block: vec![(Quant::Exists, s.clone(), *i)],
            body: Box::new(q_and_all([lt(t, &s), target, pred])),
        })
    }

    /// `u` is the position right before `v`.
    fn pred(&mut self, u: &str, v: &str) -> QFormula {
        let w = self.fo_name();
        q_and(
            lt(u, v),
            q_not(fo(Quant::Exists, &w, Some((true, u)), lt(&w, v))),
        )
    }

    /// Run of the minimal DFA over atom valuations, with states coded in
    /// binary by `ceil(log2 m)` set variables over the positions `x+1 ..= y`.
    fn run(&mut self, re: &Regex, x: &str, y: &str) -> Result<QFormula> {
        let mut atoms: Vec<F> = Vec::new();
        for a in re.atoms() {
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::resource(format!(
                "regex has {} distinct atoms (limit {MAX_ATOMS})",
                atoms.len()
            )));
        }
        let dfa = valuation_dfa(re, &atoms)?;
        let m = dfa.n_states();
        let bits = usize::BITS as usize - (m - 1).leading_zeros() as usize;
        let sets: Vec<String> = (0..bits).map(|_| self.so_name()).collect();
        let names: Vec<String> = (0..atoms.len()).map(|j| format!("~atom{j}")).collect();

        let state = |q: usize, p: &str| {
            q_and_all(sets.iter().enumerate().map(|(b, x)| {
                let bit = QFormula::In(x.clone(), p.into());
                if q >> b & 1 == 1 {
                    bit
                } else {
                    q_not(bit)
                }
            }))
        };
        // successor state of q at position p, as a formula over the letter at p
        let step = |me: &mut Self, q: usize, p: &str| -> Result<QFormula> {
            let mut out = Vec::new();
            for q2 in 0..m {
                let class: BTreeSet<u64> = (0..dfa.n_letters)
                    .filter(|&v| dfa.trans[q][v] == q2)
                    .map(|v| v as u64)
                    .collect();
                if class.is_empty() {
                    continue;
                }
                let cls = letter_class_formula(&names, &class, &|_| true);
                let letter = me.propositional(&cls, &names, &atoms, p)?;
                out.push(q_and(state(q2, p), letter));
            }
            Ok(q_or_all(out))
        };

        let p = self.fo_name();
        let u = self.fo_name();
        let w = self.fo_name();
        let first = q_implies(
            q_not(fo(Quant::Exists, &u, Some((true, x)), lt(&u, &p))),
            step(self, dfa.initial, &p)?,
        );
        let mut from_prev = Vec::new();
        for q in 0..m {
            from_prev.push(q_and(state(q, &u), step(self, q, &p)?));
        }
        let is_prev = q_and(
            lt(&u, &p),
            q_not(fo(Quant::Exists, &w, Some((true, &u)), lt(&w, &p))),
        );
        let later = fo(
            Quant::Forall,
            &u,
            Some((true, x)),
            q_implies(is_prev, q_or_all(from_prev)),
        );
        let each = fo(
            Quant::Forall,
            &p,
            Some((true, x)),
            q_implies(le(&p, y), q_and(first, later)),
        );
        let accept = q_or(
            if dfa.finals[dfa.initial] {
                eq(x, y)
            } else {
                QFormula::False
            },
            q_and(
                lt(x, y),
                q_or_all((0..m).filter(|&q| dfa.finals[q]).map(|q| state(q, y))),
            ),
        );
        let mut body = q_and(each, accept);
        for set in sets.iter().rev() {
            body = QFormula::So {
                quant: Quant::Exists,
                var: set.clone(),
                body: Box::new(body),
                range: Some((x.into(), y.into())),
            };
        }
        Ok(q_and(le(x, y), body))
    }

    /// Substitutes the translated atoms at `p` into a formula over `names`.
    fn propositional(&mut self, f: &F, names: &[String], atoms: &[F], p: &str) -> Result<QFormula> {
        Ok(match &**f {
            Formula::True => QFormula::True,
            Formula::False => QFormula::False,
            Formula::Prop(a) => {
                let j = names
                    .iter()
                    .position(|n| n == a)
                    .expect("class formulas use the atom names");
                self.formula(&atoms[j], p)?
            }
            Formula::Not(a) => q_not(self.propositional(a, names, atoms, p)?),
            Formula::And(a, b) => q_and(
                self.propositional(a, names, atoms, p)?,
                self.propositional(b, names, atoms, p)?,
            ),
            Formula::Or(a, b) => q_or(
                self.propositional(a, names, atoms, p)?,
                self.propositional(b, names, atoms, p)?,
            ),
            _ => unreachable!("letter-class formulas are propositional"),
        })
    }
}

fn le(a: &str, b: &str) -> QFormula {
    q_or(lt(a, b), eq(a, b))
}

/// Minimal DFA over valuations of the distinct atoms (bit j is atom j).
fn valuation_dfa(re: &Regex, atoms: &[F]) -> Result<Dfa> {
    let g = Glushkov::new(re);
    let idx: Vec<usize> = g
        .atoms
        .iter()
        .map(|a| atoms.iter().position(|b| b == a).expect("atom listed"))
        .collect();
    let n_letters = 1usize << atoms.len();
    let step = |q: usize, v: usize| -> Vec<usize> {
        let cands = if q == 0 {
            g.first.clone()
        } else {
            g.follow[q - 1].clone()
        };
        cands
            .into_iter()
            .filter(|&p| v >> idx[p] & 1 == 1)
            .map(|p| p + 1)
            .collect()
    };
    let is_final = |q: usize| if q == 0 { g.nullable } else { g.last[q - 1] };
    Ok(determinize(n_letters, &BTreeSet::from([0]), &step, &is_final, DFA_CAP)?.minimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::logic::{holds, parse_formula, parse_regex};
    use crate::qkmso::{eval_mso, parse_qformula, validate, Assignment};
    use crate::word::word;

    #[test]
    fn future_bs_example() {
        let f = parse_qformula(MSO_FUTURE_BS).unwrap();
        let w = mso_future_bs_word();
        assert!(eval_mso(&f, &w, &Assignment::at("x", 1)).unwrap());
        assert!(!eval_mso(&f, &w, &Assignment::at("x", 2)).unwrap());
    }

    #[test]
    fn regex_run_matches_segments() {
        let re = parse_regex("a . (b + a)* . b").unwrap();
        let w = word(&[
            (&["a"], "0"),
            (&["a"], "1"),
            (&["b"], "2"),
            (&["a"], "3"),
            (&["b"], "4"),
        ]);
        let z = regex_to_mso(&re, "x", "y").unwrap();
        let letters: Vec<bool> = (0..w.len()).map(|i| w.props(i).contains("a")).collect();
        for x in 1..=w.len() {
            for y in 1..=w.len() {
                // segment x+1 ..= y in 1-based positions
                let seg: Vec<bool> = if y > x {
                    letters[x..y].to_vec()
                } else {
                    Vec::new()
                };
                let expect = y >= x && seg.len() >= 2 && seg[0] && !seg[seg.len() - 1];
                let mut asg = Assignment::at("x", x);
                asg.fo.insert("y".into(), y);
                assert_eq!(eval_mso(&z, &w, &asg).unwrap(), expect, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn translations_agree_on_worked_formulas() {
        for (src, words) in [
            (UNTIL_REGEX, until_regex_words()),
            (NESTED_RAT, nested_rat_words()),
        ] {
            let f = parse_formula(src).unwrap();
            let q = ratmtl_to_qkmso(&f).unwrap();
            assert!(validate(&q, 4, false).valid, "{:?}", validate(&q, 4, false));
            for w in [words.0, words.1] {
                assert_eq!(
                    eval_mso(&q, &w, &Assignment::at(ANCHOR, 1)).unwrap(),
                    holds(&f, &w).unwrap(),
                    "{src} on {w}"
                );
            }
        }
    }

    #[test]
    fn frat_translation_uses_single_blocks() {
        let f = parse_formula(UNTIL_REGEX).unwrap();
        let q = fratmtl_to_q2mso(&f).unwrap();
        assert!(q.max_block() <= 1);
        assert!(validate(&q, 2, false).valid);
        assert!(fratmtl_to_q2mso(&parse_formula(NESTED_RAT).unwrap()).is_err());
    }

    fn strip_ranges(f: &QFormula) -> QFormula {
        let b = |x: &QFormula| Box::new(strip_ranges(x));
        match f {
            QFormula::Not(a) => QFormula::Not(b(a)),
            QFormula::And(x, y) => QFormula::And(b(x), b(y)),
            QFormula::Or(x, y) => QFormula::Or(b(x), b(y)),
            QFormula::Fo {
                quant,
                var,
                rel,
                body,
            } => QFormula::Fo {
                quant: *quant,
                var: var.clone(),
                rel: rel.clone(),
                body: b(body),
            },
            QFormula::So {
                quant, var, body, ..
            } => QFormula::So {
                quant: *quant,
                var: var.clone(),
                body: b(body),
                range: None,
            },
            QFormula::Time {
                anchor,
                block,
                body,
            } => QFormula::Time {
                anchor: anchor.clone(),
                block: block.clone(),
                body: b(body),
            },
            x => x.clone(),
        }
    }

    #[test]
    fn range_hint_does_not_change_verdicts() {
        let f = parse_formula(NESTED_RAT).unwrap();
        let q = ratmtl_to_qkmso(&f).unwrap();
        let plain = strip_ranges(&q);
        assert_ne!(q, plain);
        let ab = crate::gen::props(3);
        for w in crate::gen::words(5, &ab, 40, 4) {
            let asg = Assignment::at(ANCHOR, 1);
            assert_eq!(
                eval_mso(&q, &w, &asg).unwrap(),
                eval_mso(&plain, &w, &asg).unwrap(),
                "{w}"
            );
        }
    }
}
