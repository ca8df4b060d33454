//! Pointwise semantics of RatMTL over finite timed words.

use std::collections::HashMap;
use std::rc::Rc;

use super::glushkov::Glushkov;
use super::{and, frat, rewrite, Formula, Regex, F};
use crate::error::{Error, Result};
use crate::word::TimedWord;

/// Memoizing evaluator for one word. Recursion variables are read from an
/// explicit labeling.
pub struct Evaluator<'w> {
    word: &'w TimedWord,
    vars: HashMap<String, Vec<Option<bool>>>,
    memo: HashMap<(*const Formula, usize), bool>,
    automata: HashMap<*const Regex, Rc<Glushkov>>,
}

impl<'w> Evaluator<'w> {
    pub fn new(word: &'w TimedWord) -> Self {
        Evaluator {
            word,
            vars: HashMap::new(),
            memo: HashMap::new(),
            automata: HashMap::new(),
        }
    }

    pub fn with_labeling(word: &'w TimedWord, labeling: &HashMap<String, Vec<bool>>) -> Self {
        let mut e = Evaluator::new(word);
        for (z, v) in labeling {
            e.vars
                .insert(z.clone(), v.iter().map(|b| Some(*b)).collect());
        }
        e
    }

    pub fn declare_var(&mut self, z: &str) {
        self.vars.insert(z.to_string(), vec![None; self.word.len()]);
    }

    /// Sets a variable at a 0-based position. Cached results that depend on
    /// it must not exist yet (the caller evaluates positions backwards).
    pub fn set_var(&mut self, z: &str, i: usize, v: bool) {
        self.vars.get_mut(z).expect("declared variable")[i] = Some(v);
    }

    /// Truth of `f` at 0-based position `i`.
    pub fn eval(&mut self, f: &Formula, i: usize) -> Result<bool> {
        let key = (f as *const Formula, i);
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        let v = match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Prop(p) => self.word.props(i).contains(p),
            Formula::Var(z) => match self.vars.get(z).and_then(|v| v[i]) {
                Some(b) => b,
                None => {
                    return Err(Error::pre(format!(
                        "recursion variable {z} has no value at position {}",
                        i + 1
                    )))
                }
            },
            Formula::Not(a) => !self.eval(a, i)?,
            Formula::And(a, b) => self.eval(a, i)? && self.eval(b, i)?,
            Formula::Or(a, b) => self.eval(a, i)? || self.eval(b, i)?,
            Formula::Rat(iv, re) => {
                let g = self.automaton(re);
                let t0 = self.word.time(i);
                let window: Vec<usize> = (i + 1..self.word.len())
                    .filter(|&k| iv.contains(&(self.word.time(k) - t0)))
                    .collect();
                self.run(&g, &window)?
            }
            Formula::FRat(iv, re, target) => self.until(iv, re, None, target, i)?,
            Formula::URat(iv, re, hold, target) => self.until(iv, re, Some(hold), target, i)?,
            Formula::Mu(..) | Formula::Nu(..) => {
                return Err(Error::pre(
                    "fixpoint operators are evaluated through equation systems",
                ))
            }
        };
        self.memo.insert(key, v);
        Ok(v)
    }

    fn automaton(&mut self, re: &Regex) -> Rc<Glushkov> {
        self.automata
            .entry(re as *const Regex)
            .or_insert_with(|| Rc::new(Glushkov::new(re)))
            .clone()
    }

    fn step(&mut self, g: &Glushkov, state: Option<&[bool]>, k: usize) -> Result<Vec<bool>> {
        let mut next = vec![false; g.atoms.len()];
        for p in g.candidates(state) {
            if self.eval(&g.atoms[p], k)? {
                next[p] = true;
            }
        }
        Ok(next)
    }

    fn run(&mut self, g: &Glushkov, positions: &[usize]) -> Result<bool> {
        let mut state: Option<Vec<bool>> = None;
        for &k in positions {
            let next = self.step(g, state.as_deref(), k)?;
            if !next.iter().any(|x| *x) {
                return Ok(false);
            }
            state = Some(next);
        }
        Ok(g.accepting(state.as_deref()))
    }

    fn until(
        &mut self,
        iv: &crate::interval::Interval,
        re: &Regex,
        hold: Option<&F>,
        target: &F,
        i: usize,
    ) -> Result<bool> {
        let g = self.automaton(re);
        let t0 = self.word.time(i);
        let mut state: Option<Vec<bool>> = None;
        for j in i + 1..self.word.len() {
            let d = self.word.time(j) - t0;
            if iv.contains(&d) && g.accepting(state.as_deref()) && self.eval(target, j)? {
                return Ok(true);
            }
            if let Some(h) = iv.hi {
                if d > crate::word::int(h as i64) {
                    break;
                }
            }
            if let Some(h) = hold {
                if !self.eval(h, j)? {
                    break;
                }
            }
            let next = self.step(&g, state.as_deref(), j)?;
            if !next.iter().any(|x| *x) {
                break;
            }
            state = Some(next);
        }
        Ok(false)
    }
}

/// Truth at a 1-based position.
pub fn eval_at(f: &Formula, w: &TimedWord, i: usize) -> Result<bool> {
    if i == 0 || i > w.len() {
        return Err(Error::input(format!(
            "position {i} outside 1..={}",
            w.len()
        )));
    }
    Evaluator::new(w).eval(f, i - 1)
}

/// Word membership: truth at position 1.
pub fn holds(f: &Formula, w: &TimedWord) -> Result<bool> {
    eval_at(f, w, 1)
}

/// Rewrites every URat into FRat by conjoining the invariant to each regex atom.
pub fn urat_to_frat(f: &F) -> F {
    rewrite(f, &mut |g| match &**g {
        Formula::URat(iv, re, hold, target) => {
            let hold = urat_to_frat(hold);
            let re = re.map_atoms(&mut |a| and(urat_to_frat(a), hold.clone()));
            Some(frat(*iv, re, urat_to_frat(target)))
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::interval::Interval;
    use crate::logic::*;
    use crate::word::word;

    #[test]
    fn until_regex_verdicts() {
        let f = parse_formula(UNTIL_REGEX).unwrap();
        let (yes, no) = until_regex_words();
        assert!(holds(&f, &yes).unwrap());
        assert!(!holds(&f, &no).unwrap());
        let g = urat_to_frat(&f);
        assert!(holds(&g, &yes).unwrap());
        assert!(!holds(&g, &no).unwrap());
    }

    #[test]
    fn nested_rat_verdicts() {
        let f = parse_formula(NESTED_RAT).unwrap();
        let (yes, no) = nested_rat_words();
        assert!(holds(&f, &yes).unwrap());
        assert!(!holds(&f, &no).unwrap());
    }

    #[test]
    fn last_holds_only_at_end() {
        let w = word(&[(&["a"], "0"), (&["b"], "0"), (&["a"], "1")]);
        let l = last();
        let got: Vec<bool> = (1..=3).map(|i| eval_at(&l, &w, i).unwrap()).collect();
        assert_eq!(got, vec![false, false, true]);
        let bf = box_false();
        let got: Vec<bool> = (1..=3).map(|i| eval_at(&bf, &w, i).unwrap()).collect();
        assert_eq!(got, vec![false, false, true]);
    }

    #[test]
    fn until_sugar_matches_mtl() {
        let f = desugar_until(prop("a"), Interval::open(0, 1), prop("b"));
        let yes = word(&[(&["a"], "0"), (&["a"], "1/4"), (&["b"], "1/2")]);
        let no = word(&[(&["a"], "0"), (&["c"], "1/4"), (&["b"], "1/2")]);
        assert!(holds(&f, &yes).unwrap());
        assert!(!holds(&f, &no).unwrap());
        let never = desugar_until(prop("a"), Interval::open(5, 6), prop("b"));
        assert!(!holds(&never, &yes).unwrap());
    }

    #[test]
    fn position_bounds() {
        let w = word(&[(&["a"], "0")]);
        assert!(eval_at(&tt(), &w, 0).is_err());
        assert!(eval_at(&tt(), &w, 2).is_err());
        assert!(holds(&prop("a"), &w).unwrap());
        assert!(!holds(&prop("b"), &w).unwrap());
    }

    #[test]
    fn fixpoints_are_rejected_here() {
        let f = parse_formula(FIX_GUARDED).unwrap();
        let (w, _) = fix_guarded_words();
        assert!(matches!(holds(&f, &w), Err(Error::Precondition(_))));
    }
}
