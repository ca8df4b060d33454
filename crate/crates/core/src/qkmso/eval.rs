use std::collections::{BTreeSet, HashMap};

use super::{QFormula, Quant};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::word::TimedWord;

/// Longest word accepted by the brute-force checker without set variables.
pub const MAX_LEN_FO: usize = 12;
/// Longest word accepted when set quantifiers occur.
pub const MAX_LEN_SO: usize = 8;

/// Free variables: first-order ones map to 1-based positions, set
/// variables to sets of 1-based positions.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    pub fo: HashMap<String, usize>,
    pub so: HashMap<String, BTreeSet<usize>>,
}

impl Assignment {
    pub fn at(var: &str, pos: usize) -> Self {
        let mut a = Assignment::default();
        a.fo.insert(var.into(), pos);
        a
    }
}

/// Decides `w, assignment ⊨ f` by enumeration.
pub fn eval_mso(f: &QFormula, w: &TimedWord, assignment: &Assignment) -> Result<bool> {
    let n = w.len();
    if n == 0 {
        return Err(Error::input("empty word"));
    }
    let cap = if f.has_so() { MAX_LEN_SO } else { MAX_LEN_FO };
    if n > cap {
        return Err(Error::resource(format!(
            "word of length {n} exceeds the brute-force cap {cap}"
        )));
    }
    let mut lw = Lower {
        fo: Vec::new(),
        so: Vec::new(),
        n_fo: 0,
        n_so: 0,
        next_id: 0,
    };
    let mut env = Env {
        fo: Vec::new(),
        so: Vec::new(),
    };
    for v in f.free_fo() {
        let p = *assignment
            .fo
            .get(&v)
            .ok_or_else(|| Error::input(format!("free variable {v} has no value")))?;
        if p == 0 || p > n {
            return Err(Error::input(format!(
                "position {p} of {v} is outside 1..{n}"
            )));
        }
        lw.fo.push((v, lw.n_fo));
        lw.n_fo += 1;
        env.fo.push(p - 1);
    }
    for v in f.free_so() {
        let set = assignment
            .so
            .get(&v)
            .ok_or_else(|| Error::input(format!("free set variable {v} has no value")))?;
        let mut mask = 0u64;
        for &p in set {
            if p == 0 || p > n {
                return Err(Error::input(format!(
                    "position {p} in {v} is outside 1..{n}"
                )));
            }
            mask |= 1 << (p - 1);
        }
        lw.so.push((v, lw.n_so));
        lw.n_so += 1;
        env.so.push(mask);
    }
    let node = lw.lower(f)?;
    env.fo.resize(lw.n_fo, 0);
    env.so.resize(lw.n_so, 0);
    let mut ctx = Ctx {
        w,
        n,
        memo: HashMap::new(),
    };
    Ok(ctx.eval(&node, &mut env))
}

enum Node {
    Const(bool),
    Lt(usize, usize),
    Eq(usize, usize),
    Letter(String, usize),
    In(usize, usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Fo {
        exists: bool,
        slot: usize,
        rel: Option<(bool, usize)>,
        body: Box<Node>,
    },
    So {
        exists: bool,
        slot: usize,
        range: Option<(usize, usize)>,
        body: Box<Node>,
        memo: Option<Memo>,
    },
    Time {
        anchor: usize,
        block: Vec<(bool, usize, Interval)>,
        body: Box<Node>,
        memo: Option<Memo>,
    },
}

/// Cache key recipe for a subformula without free set variables.
struct Memo {
    id: usize,
    free: Vec<usize>,
}

struct Lower {
    fo: Vec<(String, usize)>,
    so: Vec<(String, usize)>,
    n_fo: usize,
    n_so: usize,
    next_id: usize,
}

impl Lower {
    fn fo_slot(&self, v: &str) -> Result<usize> {
        self.fo
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|p| p.1)
            .ok_or_else(|| Error::input(format!("unbound variable {v}")))
    }

    fn so_slot(&self, v: &str) -> Result<usize> {
        self.so
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|p| p.1)
            .ok_or_else(|| Error::input(format!("unbound set variable {v}")))
    }

    fn bind_fo(&mut self, v: &str) -> usize {
        let s = self.n_fo;
        self.n_fo += 1;
        self.fo.push((v.to_string(), s));
        s
    }

    fn memo(&mut self, f: &QFormula) -> Result<Option<Memo>> {
        if !f.free_so().is_empty() {
            return Ok(None);
        }
        let free = f
            .free_fo()
            .iter()
            .map(|v| self.fo_slot(v))
            .collect::<Result<_>>()?;
        self.next_id += 1;
        Ok(Some(Memo {
            id: self.next_id,
            free,
        }))
    }

    fn lower(&mut self, f: &QFormula) -> Result<Node> {
        Ok(match f {
            QFormula::True => Node::Const(true),
            QFormula::False => Node::Const(false),
            QFormula::Lt(a, b) => Node::Lt(self.fo_slot(a)?, self.fo_slot(b)?),
            QFormula::Eq(a, b) => Node::Eq(self.fo_slot(a)?, self.fo_slot(b)?),
            QFormula::Letter(p, t) => Node::Letter(p.clone(), self.fo_slot(t)?),
            QFormula::In(x, t) => Node::In(self.so_slot(x)?, self.fo_slot(t)?),
            QFormula::Not(a) => Node::Not(Box::new(self.lower(a)?)),
            QFormula::And(a, b) => Node::And(Box::new(self.lower(a)?), Box::new(self.lower(b)?)),
            QFormula::Or(a, b) => Node::Or(Box::new(self.lower(a)?), Box::new(self.lower(b)?)),
            QFormula::Fo {
                quant,
                var,
                rel,
                body,
            } => {
                let rel = match rel {
                    Some(r) => Some((r.strict, self.fo_slot(&r.var)?)),
                    None => None,
                };
                let slot = self.bind_fo(var);
                let body = self.lower(body)?;
                self.fo.pop();
                Node::Fo {
                    exists: *quant == Quant::Exists,
                    slot,
                    rel,
                    body: Box::new(body),
                }
            }
            QFormula::So {
                quant,
                var,
                body,
                range,
            } => {
                let memo = self.memo(f)?;
                let range = match range {
                    Some((lo, hi)) => Some((self.fo_slot(lo)?, self.fo_slot(hi)?)),
                    None => None,
                };
                let slot = self.n_so;
                self.n_so += 1;
                self.so.push((var.clone(), slot));
                let body = self.lower(body)?;
                self.so.pop();
                Node::So {
                    exists: *quant == Quant::Exists,
                    slot,
                    range,
                    body: Box::new(body),
                    memo,
                }
            }
            QFormula::Time {
                anchor,
                block,
                body,
            } => {
                let memo = self.memo(f)?;
                let anchor = self.fo_slot(anchor)?;
                let mut out = Vec::new();
                for (q, v, i) in block {
                    out.push((*q == Quant::Exists, self.bind_fo(v), *i));
                }
                let body = self.lower(body)?;
                self.fo.truncate(self.fo.len() - block.len());
                Node::Time {
                    anchor,
                    block: out,
                    body: Box::new(body),
                    memo,
                }
            }
        })
    }
}

struct Env {
    fo: Vec<usize>,
    so: Vec<u64>,
}

struct Ctx<'w> {
    w: &'w TimedWord,
    n: usize,
    memo: HashMap<(usize, Vec<usize>), bool>,
}

impl Ctx<'_> {
    fn cached(
        &mut self,
        memo: &Option<Memo>,
        env: &Env,
    ) -> (Option<(usize, Vec<usize>)>, Option<bool>) {
        match memo {
            None => (None, None),
            Some(m) => {
                let key = (m.id, m.free.iter().map(|&s| env.fo[s]).collect());
                let hit = self.memo.get(&key).copied();
                (Some(key), hit)
            }
        }
    }

    fn eval(&mut self, f: &Node, env: &mut Env) -> bool {
        match f {
            Node::Const(b) => *b,
            Node::Lt(a, b) => env.fo[*a] < env.fo[*b],
            Node::Eq(a, b) => env.fo[*a] == env.fo[*b],
            Node::Letter(p, t) => self.w.props(env.fo[*t]).contains(p),
            Node::In(x, t) => env.so[*x] >> env.fo[*t] & 1 == 1,
            Node::Not(a) => !self.eval(a, env),
            Node::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Node::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Node::Fo {
                exists,
                slot,
                rel,
                body,
            } => {
                let lo = match rel {
                    None => 0,
                    Some((strict, s)) => env.fo[*s] + usize::from(*strict),
                };
                for p in lo..self.n {
                    env.fo[*slot] = p;
                    if self.eval(body, env) == *exists {
                        return *exists;
                    }
                }
                !*exists
            }
            Node::So {
                exists,
                slot,
                range,
                body,
                memo,
            } => {
                let (key, hit) = self.cached(memo, env);
                if let Some(v) = hit {
                    return v;
                }
                let full = if self.n == 64 {
                    u64::MAX
                } else {
                    (1u64 << self.n) - 1
                };
                let universe = match range {
                    None => full,
                    Some((lo, hi)) => {
                        let (lo, hi) = (env.fo[*lo], env.fo[*hi]);
                        if hi <= lo {
                            0
                        } else {
                            range_mask(lo + 1, hi)
                        }
                    }
                };
                let saved = env.so[*slot];
                let mut result = !*exists;
                let mut sub = 0u64;
                loop {
                    env.so[*slot] = sub;
                    if self.eval(body, env) == *exists {
                        result = *exists;
                        break;
                    }
                    if sub == universe {
                        break;
                    }
                    sub = (sub.wrapping_sub(universe)) & universe;
                }
                env.so[*slot] = saved;
                if let Some(k) = key {
                    self.memo.insert(k, result);
                }
                result
            }
            Node::Time {
                anchor,
                block,
                body,
                memo,
            } => {
                let (key, hit) = self.cached(memo, env);
                if let Some(v) = hit {
                    return v;
                }
                let a0 = env.fo[*anchor];
                let t0 = self.w.time(a0);
                let result = self.block(a0, t0, block, body, env);
                if let Some(k) = key {
                    self.memo.insert(k, result);
                }
                result
            }
        }
    }

    fn block(
        &mut self,
        a0: usize,
        t0: crate::Rational,
        block: &[(bool, usize, Interval)],
        body: &Node,
        env: &mut Env,
    ) -> bool {
        let Some(((exists, slot, interval), rest)) = block.split_first() else {
            return self.eval(body, env);
        };
        for p in a0..self.n {
            if !interval.contains(&(self.w.time(p) - t0)) {
                continue;
            }
            env.fo[*slot] = p;
            if self.block(a0, t0, rest, body, env) == *exists {
                return *exists;
            }
        }
        !*exists
    }
}

fn range_mask(from: usize, to: usize) -> u64 {
    (from..=to).fold(0u64, |m, p| m | 1 << p)
}
