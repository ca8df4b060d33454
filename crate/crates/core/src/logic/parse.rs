use std::collections::BTreeSet;
use std::rc::Rc;

use super::{implies, Formula, Regex, F};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Parses a sentence; upper-case identifiers must be bound by `mu`/`nu`.
pub fn parse_formula(text: &str) -> Result<F> {
    parse_formula_with_vars(text, &BTreeSet::new())
}

/// Parses a formula in which the given recursion variables may occur free.
pub fn parse_formula_with_vars(text: &str, free_vars: &BTreeSet<String>) -> Result<F> {
    let mut p = Parser::new(text);
    p.bound = free_vars.iter().cloned().collect();
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

pub fn parse_regex(text: &str) -> Result<Regex> {
    let mut p = Parser::new(text);
    let r = p.regex()?;
    p.expect_end()?;
    Ok(r)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    bound: Vec<String>,
}

const KEYWORDS: &[&str] = &[
    "true", "false", "mu", "nu", "Rat", "FRat", "URat", "U", "eps", "inf",
];

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            bound: Vec::new(),
        }
    }

    fn err_at(&self, pos: usize, msg: impl Into<String>) -> Error {
        let upto: String = self.chars[..pos.min(self.chars.len())].iter().collect();
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        self.err_at(self.pos, msg)
    }

    fn ws(&mut self) {
        loop {
            while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.chars.len() && self.chars[self.pos] == '#' {
                while self.pos < self.chars.len() && self.chars[self.pos] != '\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.pos).copied()
    }

    fn peek2(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.pos + 1).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        if self.peek().is_some() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    fn peek_ident(&mut self) -> Option<String> {
        self.ws();
        let mut end = self.pos;
        if end < self.chars.len() && (self.chars[end].is_alphabetic() || self.chars[end] == '_') {
            while end < self.chars.len()
                && (self.chars[end].is_alphanumeric() || "_'".contains(self.chars[end]))
            {
                end += 1;
            }
            Some(self.chars[self.pos..end].iter().collect())
        } else {
            None
        }
    }

    fn ident(&mut self) -> Option<String> {
        let id = self.peek_ident()?;
        self.pos += id.chars().count();
        Some(id)
    }

    fn formula(&mut self) -> Result<F> {
        let lhs = self.disj()?;
        if self.peek() == Some('-') && self.peek2() == Some('>') {
            self.pos += 2;
            let rhs = self.formula()?;
            return Ok(implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<F> {
        let mut f = self.conj()?;
        while self.eat('|') {
            let g = self.conj()?;
            f = Rc::new(Formula::Or(f, g));
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<F> {
        let mut f = self.unary()?;
        while self.eat('&') {
            let g = self.unary()?;
            f = Rc::new(Formula::And(f, g));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<F> {
        if self.eat('~') || self.eat('!') || self.eat('¬') {
            let f = self.unary()?;
            return Ok(Rc::new(Formula::Not(f)));
        }
        if self.eat('(') {
            let f = self.formula()?;
            self.expect(')')?;
            return Ok(f);
        }
        let start = self.pos;
        let Some(id) = self.ident() else {
            return Err(self.err("expected a formula"));
        };
        match id.as_str() {
            "true" => Ok(Rc::new(Formula::True)),
            "false" => Ok(Rc::new(Formula::False)),
            "mu" | "nu" => {
                let z = self
                    .ident()
                    .ok_or_else(|| self.err("expected a recursion variable"))?;
                if !z.starts_with(|c: char| c.is_uppercase()) {
                    return Err(self.err("recursion variables start with an upper-case letter"));
                }
                self.expect('.')?;
                self.bound.push(z.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                Ok(Rc::new(if id == "mu" {
                    Formula::Mu(z, body)
                } else {
                    Formula::Nu(z, body)
                }))
            }
            "Rat" => {
                let i = self.interval()?;
                let re = self.braced_regex()?;
                Ok(Rc::new(Formula::Rat(i, re)))
            }
            "FRat" => {
                let i = self.interval()?;
                let re = self.braced_regex()?;
                self.expect('(')?;
                let g = self.formula()?;
                self.expect(')')?;
                Ok(Rc::new(Formula::FRat(i, re, g)))
            }
            "URat" => {
                let i = self.interval()?;
                let re = self.braced_regex()?;
                self.expect('(')?;
                let g = self.formula()?;
                self.expect(',')?;
                let h = self.formula()?;
                self.expect(')')?;
                Ok(Rc::new(Formula::URat(i, re, g, h)))
            }
            "U" if self.peek() == Some('[') => {
                let i = self.interval()?;
                self.expect('(')?;
                let g = self.formula()?;
                self.expect(',')?;
                let h = self.formula()?;
                self.expect(')')?;
                Ok(super::desugar_until(g, i, h))
            }
            _ => self.name(id, start),
        }
    }

    fn name(&mut self, id: String, start: usize) -> Result<F> {
        if KEYWORDS.contains(&id.as_str()) {
            return Err(self.err_at(start, format!("unexpected keyword `{id}`")));
        }
        if id.starts_with(|c: char| c.is_uppercase()) {
            if !self.bound.contains(&id) {
                return Err(self.err_at(start, format!("unbound fixpoint variable `{id}`")));
            }
            Ok(Rc::new(Formula::Var(id)))
        } else {
            Ok(Rc::new(Formula::Prop(id)))
        }
    }

    fn interval(&mut self) -> Result<Interval> {
        self.expect('[')?;
        let start = self.pos;
        let mut depth = 0;
        let mut end = self.pos;
        while end < self.chars.len() {
            match self.chars[end] {
                '[' | '(' => depth += 1,
                ']' | ')' => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    if depth == 0 {
                        end += 1;
                        break;
                    }
                }
                _ => {}
            }
            end += 1;
        }
        let text: String = self.chars[start..end].iter().collect();
        let iv = Interval::parse(&text).map_err(|e| self.err_at(start, e.to_string()))?;
        self.pos = end;
        self.expect(']')?;
        Ok(iv)
    }

    fn braced_regex(&mut self) -> Result<Regex> {
        self.expect('{')?;
        let r = self.regex()?;
        self.expect('}')?;
        Ok(r)
    }

    fn regex(&mut self) -> Result<Regex> {
        let mut parts = vec![self.regex_concat()?];
        while self.eat('+') {
            parts.push(self.regex_concat()?);
        }
        let last = parts.pop().unwrap();
        Ok(parts
            .into_iter()
            .rev()
            .fold(last, |acc, r| Regex::Union(Box::new(r), Box::new(acc))))
    }

    fn regex_concat(&mut self) -> Result<Regex> {
        let mut parts = vec![self.regex_postfix()?];
        while self.eat('.') {
            parts.push(self.regex_postfix()?);
        }
        let last = parts.pop().unwrap();
        Ok(parts
            .into_iter()
            .rev()
            .fold(last, |acc, r| Regex::Concat(Box::new(r), Box::new(acc))))
    }

    fn regex_postfix(&mut self) -> Result<Regex> {
        let mut r = self.regex_atom()?;
        loop {
            if self.eat('*') {
                r = Regex::Star(Box::new(r));
            } else if self.peek() == Some('^') && self.peek2() == Some('+') {
                self.pos += 2;
                r = Regex::Concat(Box::new(r.clone()), Box::new(Regex::Star(Box::new(r))));
            } else {
                return Ok(r);
            }
        }
    }

    fn regex_atom(&mut self) -> Result<Regex> {
        if self.eat('(') {
            let r = self.regex()?;
            self.expect(')')?;
            return Ok(r);
        }
        if self.eat('<') {
            let f = self.formula()?;
            self.expect('>')?;
            return Ok(Regex::Atom(f));
        }
        let start = self.pos;
        let Some(id) = self.ident() else {
            return Err(self.err("expected a regular expression"));
        };
        match id.as_str() {
            "eps" => Ok(Regex::Eps),
            "true" => Ok(Regex::Atom(Rc::new(Formula::True))),
            "false" => Ok(Regex::Atom(Rc::new(Formula::False))),
            _ => Ok(Regex::Atom(self.name(id, start)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::logic::*;

    #[test]
    fn parses_worked_formulas() {
        let f = parse_formula(UNTIL_REGEX).unwrap();
        let Formula::URat(i, re, a, b) = &*f else {
            panic!()
        };
        assert_eq!(*i, Interval::open(0, 1));
        assert_eq!(re.to_string(), "(a . a)*");
        assert_eq!(**a, Formula::Prop("a".into()));
        assert_eq!(**b, Formula::Prop("b".into()));
        assert_eq!(*parse_formula("true").unwrap(), Formula::True);
        let g = parse_formula(NESTED_RAT).unwrap();
        assert!(matches!(&*g, Formula::Rat(..)));
        assert!(parse_formula(FIX_GUARDED).is_ok());
        assert!(parse_formula(FIX_UNGUARDED).is_ok());
    }

    #[test]
    fn round_trips() {
        for s in [
            UNTIL_REGEX,
            NESTED_RAT,
            FIX_GUARDED,
            FIX_UNGUARDED,
            "a & (b | ~c) | d",
            "~(a & b) -> c",
            "FRat[[0,inf)]{eps + a.b*}(Rat[[1,1]]{eps} & a)",
            "nu Y. mu Z. Rat[(1,2)]{a . Z . Y}",
        ] {
            let f = parse_formula(s).unwrap();
            let printed = f.to_string();
            let g = parse_formula(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
            assert_eq!(f, g, "{s} -> {printed}");
        }
    }

    #[test]
    fn errors() {
        let e = parse_formula("a &\n Z").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Parse {
                    line: 2,
                    col: 2,
                    ..
                }
            ),
            "{e:?}"
        );
        assert!(parse_formula("Rat[(1,0)]{a}").is_err());
        assert!(parse_formula("a b").is_err());
        assert!(parse_formula("FRat[[0,1)]{a}").is_err());
    }

    #[test]
    fn until_sugar() {
        let f = parse_formula("U[(0,1)](a, b)").unwrap();
        assert_eq!(f, desugar_until(prop("a"), Interval::open(0, 1), prop("b")));
    }
}
