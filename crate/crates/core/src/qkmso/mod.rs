//! Forward QkMSO over timed words: syntax, well-formedness, brute-force
//! model checking and translations from RatMTL / FRatMTL.

mod eval;
mod parse;
mod translate;

use std::collections::BTreeSet;
use std::fmt;

use crate::interval::Interval;

pub use eval::{eval_mso, Assignment, MAX_LEN_FO, MAX_LEN_SO};
pub use parse::parse_qformula;
pub use translate::{fratmtl_to_q2mso, ratmtl_to_qkmso, regex_to_mso, ANCHOR};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Exists,
    Forall,
}

/// Bound on a first-order quantifier: `t > u` or `t >= u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rel {
    pub strict: bool,
    pub var: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QFormula {
    True,
    False,
    Lt(String, String),
    Eq(String, String),
    /// `Q_a(t)`.
    Letter(String, String),
    /// `X(t)`.
    In(String, String),
    Not(Box<QFormula>),
    And(Box<QFormula>, Box<QFormula>),
    Or(Box<QFormula>, Box<QFormula>),
    Fo {
        quant: Quant,
        var: String,
        rel: Option<Rel>,
        body: Box<QFormula>,
    },
    /// `range = (lo, hi)` is an evaluation hint: the body reads the set only
    /// at positions in `(lo, hi]`, so other positions need not be
    /// enumerated. It does not change the meaning.
    So {
        quant: Quant,
        var: String,
        body: Box<QFormula>,
        range: Option<(String, String)>,
    },
    /// Metric block `Q1 t1 ∈ t0+I1 … Qj tj ∈ t0+Ij. body`.
    Time {
        anchor: String,
        block: Vec<(Quant, String, Interval)>,
        body: Box<QFormula>,
    },
}

pub fn q_not(a: QFormula) -> QFormula {
    match a {
        QFormula::True => QFormula::False,
        QFormula::False => QFormula::True,
        QFormula::Not(x) => *x,
        a => QFormula::Not(Box::new(a)),
    }
}

pub fn q_and(a: QFormula, b: QFormula) -> QFormula {
    match (a, b) {
        (QFormula::False, _) | (_, QFormula::False) => QFormula::False,
        (QFormula::True, x) | (x, QFormula::True) => x,
        (a, b) => QFormula::And(Box::new(a), Box::new(b)),
    }
}

pub fn q_or(a: QFormula, b: QFormula) -> QFormula {
    match (a, b) {
        (QFormula::True, _) | (_, QFormula::True) => QFormula::True,
        (QFormula::False, x) | (x, QFormula::False) => x,
        (a, b) => QFormula::Or(Box::new(a), Box::new(b)),
    }
}

pub fn q_implies(a: QFormula, b: QFormula) -> QFormula {
    q_or(q_not(a), b)
}

pub fn q_and_all(xs: impl IntoIterator<Item = QFormula>) -> QFormula {
    xs.into_iter().fold(QFormula::True, q_and)
}

pub fn q_or_all(xs: impl IntoIterator<Item = QFormula>) -> QFormula {
    xs.into_iter().fold(QFormula::False, q_or)
}

pub fn lt(a: &str, b: &str) -> QFormula {
    QFormula::Lt(a.into(), b.into())
}

pub fn eq(a: &str, b: &str) -> QFormula {
    QFormula::Eq(a.into(), b.into())
}

pub fn fo(quant: Quant, var: &str, rel: Option<(bool, &str)>, body: QFormula) -> QFormula {
    QFormula::Fo {
        quant,
        var: var.into(),
        rel: rel.map(|(strict, v)| Rel {
            strict,
            var: v.into(),
        }),
        body: Box::new(body),
    }
}

impl QFormula {
    pub fn free_fo(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free(&mut Vec::new(), &mut out, true);
        out
    }

    pub fn free_so(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free(&mut Vec::new(), &mut out, false);
        out
    }

    fn free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>, first_order: bool) {
        let mut use_ = |v: &String, is_fo: bool, bound: &Vec<String>| {
            if is_fo == first_order && !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            QFormula::True | QFormula::False => {}
            QFormula::Lt(a, b) | QFormula::Eq(a, b) => {
                use_(a, true, bound);
                use_(b, true, bound);
            }
            QFormula::Letter(_, t) => use_(t, true, bound),
            QFormula::In(x, t) => {
                use_(x, false, bound);
                use_(t, true, bound);
            }
            QFormula::Not(a) => a.free(bound, out, first_order),
            QFormula::And(a, b) | QFormula::Or(a, b) => {
                a.free(bound, out, first_order);
                b.free(bound, out, first_order);
            }
            QFormula::Fo { var, rel, body, .. } => {
                if let Some(r) = rel {
                    use_(&r.var, true, bound);
                }
                bound.push(var.clone());
                body.free(bound, out, first_order);
                bound.pop();
            }
            QFormula::So {
                var, body, range, ..
            } => {
                if let Some((lo, hi)) = range {
                    use_(lo, true, bound);
                    use_(hi, true, bound);
                }
                bound.push(var.clone());
                body.free(bound, out, first_order);
                bound.pop();
            }
            QFormula::Time {
                anchor,
                block,
                body,
            } => {
                use_(anchor, true, bound);
                let k = bound.len();
                bound.extend(block.iter().map(|(_, v, _)| v.clone()));
                body.free(bound, out, first_order);
                bound.truncate(k);
            }
        }
    }

    /// Nesting depth of metric blocks.
    pub fn metric_depth(&self) -> usize {
        match self {
            QFormula::Not(a) => a.metric_depth(),
            QFormula::And(a, b) | QFormula::Or(a, b) => a.metric_depth().max(b.metric_depth()),
            QFormula::Fo { body, .. } | QFormula::So { body, .. } => body.metric_depth(),
            QFormula::Time { body, .. } => body.metric_depth() + 1,
            _ => 0,
        }
    }

    pub fn has_so(&self) -> bool {
        match self {
            QFormula::In(..) | QFormula::So { .. } => true,
            QFormula::Not(a) => a.has_so(),
            QFormula::And(a, b) | QFormula::Or(a, b) => a.has_so() || b.has_so(),
            QFormula::Fo { body, .. } | QFormula::Time { body, .. } => body.has_so(),
            _ => false,
        }
    }

    /// Largest metric block.
    pub fn max_block(&self) -> usize {
        match self {
            QFormula::Not(a) => a.max_block(),
            QFormula::And(a, b) | QFormula::Or(a, b) => a.max_block().max(b.max_block()),
            QFormula::Fo { body, .. } | QFormula::So { body, .. } => body.max_block(),
            QFormula::Time { block, body, .. } => block.len().max(body.max_block()),
            _ => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            QFormula::Not(a) => 1 + a.size(),
            QFormula::And(a, b) | QFormula::Or(a, b) => 1 + a.size() + b.size(),
            QFormula::Fo { body, .. } | QFormula::So { body, .. } | QFormula::Time { body, .. } => {
                1 + body.size()
            }
            _ => 1,
        }
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Validation {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Checks the forward-fragment rules: quantified first-order variables are
/// relativized to the future of a variable in scope (an unrelativized
/// quantifier is allowed only where no first-order variable is in scope),
/// time constraints have exactly one free variable and no free set
/// variable, metric blocks have fewer than `k` quantifiers, and with
/// `fo_only` no set variables occur.
pub fn validate(f: &QFormula, k: usize, fo_only: bool) -> Validation {
    let mut violations = Vec::new();
    let mut scope: Vec<String> = f.free_fo().into_iter().collect();
    walk(f, &mut scope, "root", k, fo_only, &mut violations);
    Validation {
        valid: violations.is_empty(),
        violations,
    }
}

fn walk(
    f: &QFormula,
    scope: &mut Vec<String>,
    path: &str,
    k: usize,
    fo_only: bool,
    out: &mut Vec<String>,
) {
    match f {
        QFormula::Not(a) => walk(a, scope, &format!("{path}/not"), k, fo_only, out),
        QFormula::And(a, b) | QFormula::Or(a, b) => {
            let op = if matches!(f, QFormula::And(..)) {
                "and"
            } else {
                "or"
            };
            walk(a, scope, &format!("{path}/{op}.0"), k, fo_only, out);
            walk(b, scope, &format!("{path}/{op}.1"), k, fo_only, out);
        }
        QFormula::In(x, t) if fo_only => out.push(format!("{path}: set variable {x} in {x}({t})")),
        QFormula::Fo { var, rel, body, .. } => {
            let here = format!("{path}/fo {var}");
            match rel {
                None if !scope.is_empty() => out.push(format!(
                    "{here}: quantifier not relativized to the future of {}",
                    scope.join(", ")
                )),
                Some(r) if !scope.contains(&r.var) => out.push(format!(
                    "{here}: relativized to {} which is not in scope",
                    r.var
                )),
                _ => {}
            }
            scope.push(var.clone());
            walk(body, scope, &here, k, fo_only, out);
            scope.pop();
        }
        QFormula::So { var, body, .. } => {
            let here = format!("{path}/so {var}");
            if fo_only {
                out.push(format!("{here}: set quantifier in a first-order formula"));
            }
            walk(body, scope, &here, k, fo_only, out);
        }
        QFormula::Time {
            anchor,
            block,
            body,
        } => {
            let here = format!("{path}/time {anchor}");
            if block.len() >= k {
                out.push(format!(
                    "{here}: metric block of {} quantifiers needs k > {}",
                    block.len(),
                    block.len()
                ));
            }
            let fv = f.free_fo();
            if fv.len() != 1 {
                let names: Vec<_> = fv.into_iter().collect();
                out.push(format!(
                    "{here}: time constraint has free variables {{{}}}",
                    names.join(", ")
                ));
            }
            let fs = f.free_so();
            if !fs.is_empty() {
                let names: Vec<_> = fs.into_iter().collect();
                out.push(format!(
                    "{here}: time constraint has free set variables {{{}}}",
                    names.join(", ")
                ));
            }
            let n = scope.len();
            scope.extend(block.iter().map(|(_, v, _)| v.clone()));
            walk(body, scope, &here, k, fo_only, out);
            scope.truncate(n);
        }
        _ => {}
    }
}

impl fmt::Display for QFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print(self, 0))
    }
}

fn quant_word(q: Quant) -> &'static str {
    match q {
        Quant::Exists => "E",
        Quant::Forall => "A",
    }
}

// precedence: 0 implication and binders, 1 or, 2 and, 3 unary
fn print(f: &QFormula, prec: u8) -> String {
    let wrap = |s: String, p: u8| if prec > p { format!("({s})") } else { s };
    match f {
        QFormula::True => "true".into(),
        QFormula::False => "false".into(),
        QFormula::Lt(a, b) => format!("{a} < {b}"),
        QFormula::Eq(a, b) => format!("{a} = {b}"),
        QFormula::Letter(p, t) => format!("Q_{p}({t})"),
        QFormula::In(x, t) => format!("{x}({t})"),
        QFormula::Not(a) => match &**a {
            QFormula::Lt(..) | QFormula::Eq(..) => format!("~({})", print(a, 0)),
            _ => format!("~{}", print(a, 3)),
        },
        QFormula::And(a, b) => wrap(format!("{} & {}", print(a, 2), print(b, 3)), 2),
        QFormula::Or(a, b) => wrap(format!("{} | {}", print(a, 1), print(b, 2)), 1),
        QFormula::Fo {
            quant,
            var,
            rel,
            body,
        } => {
            let r = match rel {
                None => String::new(),
                Some(Rel {
                    strict: true,
                    var: v,
                }) => format!(" > {v}"),
                Some(Rel {
                    strict: false,
                    var: v,
                }) => format!(" >= {v}"),
            };
            wrap(
                format!("{} {var}{r}. {}", quant_word(*quant), print(body, 0)),
                0,
            )
        }
        QFormula::So {
            quant, var, body, ..
        } => wrap(
            format!("{}S {var}. {}", quant_word(*quant), print(body, 0)),
            0,
        ),
        QFormula::Time {
            anchor,
            block,
            body,
        } => {
            let head: Vec<String> = block
                .iter()
                .map(|(q, v, i)| format!("{}m {v} in {anchor}+{i}.", quant_word(*q)))
                .collect();
            let inner = match &**body {
                QFormula::Time { anchor: a2, .. } if a2 == anchor => {
                    format!("({})", print(body, 0))
                }
                _ => print(body, 0),
            };
            wrap(format!("{} {inner}", head.join(" ")), 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn worked_formulas_validate() {
        let f = parse_qformula(MSO_FUTURE_BS).unwrap();
        assert!(validate(&f, 3, true).valid);
        let v = validate(&f, 2, true);
        assert!(
            !v.valid && v.violations[0].contains("metric block of 2"),
            "{v:?}"
        );
        assert_eq!(f.metric_depth(), 1);
        let g = parse_qformula(MSO_DEPTH_TWO).unwrap();
        assert_eq!(g.metric_depth(), 2);
        assert!(validate(&g, 2, true).valid);
        let bad = parse_qformula("Q_a(t0) & E t. Q_b(t)").unwrap();
        assert!(!validate(&bad, 2, true).valid);
        let so = parse_qformula("ES T. T(t1)").unwrap();
        assert!(!validate(&so, 2, true).valid);
        assert!(validate(&so, 2, false).valid);
        let two_free = parse_qformula("Em t in u+[0,1]. t < v").unwrap();
        assert!(!validate(&two_free, 2, true).valid);
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            MSO_FUTURE_BS,
            MSO_DEPTH_TWO,
            "ES X. AS Y. E t > t0. (X(t) -> ~Y(t) | t < t0 & t = t0)",
            "Em y in x+[0,1]. (Em z in x+(1,2). Q_a(z)) & Q_b(y)",
            "~(t < u) & ~~Q_a(t)",
        ] {
            let f = parse_qformula(s).unwrap();
            let p = f.to_string();
            assert_eq!(parse_qformula(&p).unwrap(), f, "{s} => {p}");
        }
    }
}
