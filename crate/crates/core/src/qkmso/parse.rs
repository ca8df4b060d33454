use super::{QFormula, Quant, Rel};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Parses the text syntax: `E t > u.`, `A t >= u.`, `E t.` (outermost
/// only), `Em t in u+I.`, `Am t in u+I.`, `ES X.`, `AS X.`, atoms
/// `Q_a(t)`, `X(t)`, `t < u`, `t = u` (also `<=`, `>`, `>=`), and the
/// connectives `~ & | ->`.
pub fn parse_qformula(text: &str) -> Result<QFormula> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let f = p.formula()?;
    p.ws();
    if p.pos < p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> Error {
        let upto: String = self.chars[..self.pos.min(self.chars.len())]
            .iter()
            .collect();
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            col,
            msg: msg.into(),
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

    fn eat_str(&mut self, s: &str) -> bool {
        self.ws();
        let cs: Vec<char> = s.chars().collect();
        if self.chars[self.pos..].starts_with(&cs) {
            self.pos += cs.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat_str(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if self.pos == start || self.chars[start].is_ascii_digit() {
            self.pos = start;
            return None;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn fo_var(&mut self) -> Result<String> {
        match self.ident() {
            Some(v) if v.starts_with(|c: char| c.is_lowercase()) => Ok(v),
            _ => Err(self.err("expected a first-order variable (lower-case identifier)")),
        }
    }

    fn formula(&mut self) -> Result<QFormula> {
        let a = self.or()?;
        if self.eat_str("->") {
            let b = self.formula()?;
            return Ok(q_implies_raw(a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<QFormula> {
        let mut a = self.and()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let b = self.and()?;
            a = QFormula::Or(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<QFormula> {
        let mut a = self.unary()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            let b = self.unary()?;
            a = QFormula::And(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<QFormula> {
        if self.peek() == Some('~') {
            self.pos += 1;
            return Ok(QFormula::Not(Box::new(self.unary()?)));
        }
        if self.peek() == Some('(') {
            self.pos += 1;
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        let save = self.pos;
        let Some(word) = self.ident() else {
            return Err(self.err("expected a formula"));
        };
        match word.as_str() {
            "true" => Ok(QFormula::True),
            "false" => Ok(QFormula::False),
            "E" | "A" => {
                let quant = if word == "E" {
                    Quant::Exists
                } else {
                    Quant::Forall
                };
                let var = self.fo_var()?;
                let rel = if self.eat_str(">=") {
                    Some(Rel {
                        strict: false,
                        var: self.fo_var()?,
                    })
                } else if self.eat_str(">") {
                    Some(Rel {
                        strict: true,
                        var: self.fo_var()?,
                    })
                } else {
                    None
                };
                self.expect(".")?;
                let body = self.formula()?;
                Ok(QFormula::Fo {
                    quant,
                    var,
                    rel,
                    body: Box::new(body),
                })
            }
            "ES" | "AS" => {
                let quant = if word == "ES" {
                    Quant::Exists
                } else {
                    Quant::Forall
                };
                let var = match self.ident() {
                    Some(v) if v.starts_with(|c: char| c.is_uppercase()) => v,
                    _ => return Err(self.err("expected a set variable (upper-case identifier)")),
                };
                self.expect(".")?;
                let body = self.formula()?;
                Ok(QFormula::So {
                    quant,
                    var,
                    body: Box::new(body),
                    range: None,
                })
            }
            "Em" | "Am" => {
                self.pos = save;
                let (anchor, first) = self.metric_head()?.expect("metric keyword already seen");
                let mut block = vec![first];
                loop {
                    let save = self.pos;
                    match self.metric_head()? {
                        Some((a, q)) if a == anchor => block.push(q),
                        _ => {
                            self.pos = save;
                            break;
                        }
                    }
                }
                let body = self.formula()?;
                Ok(QFormula::Time {
                    anchor,
                    block,
                    body: Box::new(body),
                })
            }
            _ if word.starts_with("Q_") && word.len() > 2 => {
                self.expect("(")?;
                let t = self.fo_var()?;
                self.expect(")")?;
                Ok(QFormula::Letter(word[2..].to_string(), t))
            }
            _ if word.starts_with(|c: char| c.is_uppercase()) => {
                self.expect("(")?;
                let t = self.fo_var()?;
                self.expect(")")?;
                Ok(QFormula::In(word, t))
            }
            _ => {
                let a = word;
                let op = if self.eat_str("<=") {
                    "<="
                } else if self.eat_str(">=") {
                    ">="
                } else if self.eat_str("<") {
                    "<"
                } else if self.eat_str(">") {
                    ">"
                } else if self.eat_str("=") {
                    "="
                } else {
                    return Err(self.err("expected a comparison after a variable"));
                };
                let b = self.fo_var()?;
                let (lt, eq) = (
                    QFormula::Lt(a.clone(), b.clone()),
                    QFormula::Eq(a.clone(), b.clone()),
                );
                Ok(match op {
                    "<" => lt,
                    "=" => eq,
                    "<=" => QFormula::Or(Box::new(lt), Box::new(eq)),
                    ">" => QFormula::Lt(b, a),
                    _ => QFormula::Or(Box::new(QFormula::Lt(b, a)), Box::new(eq)),
                })
            }
        }
    }

    /// `Em t in u+I.`; `None` when the next word is not a metric quantifier.
    fn metric_head(&mut self) -> Result<Option<(String, (Quant, String, Interval))>> {
        let save = self.pos;
        let quant = match self.ident().as_deref() {
            Some("Em") => Quant::Exists,
            Some("Am") => Quant::Forall,
            _ => {
                self.pos = save;
                return Ok(None);
            }
        };
        let var = self.fo_var()?;
        if self.ident().as_deref() != Some("in") {
            return Err(self.err("expected `in`"));
        }
        let anchor = self.fo_var()?;
        self.expect("+")?;
        self.ws();
        let start = self.pos;
        while self.pos < self.chars.len() && !matches!(self.chars[self.pos], ')' | ']') {
            self.pos += 1;
        }
        if self.pos == self.chars.len() {
            return Err(self.err("unterminated interval"));
        }
        self.pos += 1;
        let text: String = self.chars[start..self.pos].iter().collect();
        let interval = Interval::parse(&text).map_err(|e| self.err(e.to_string()))?;
        self.expect(".")?;
        Ok(Some((anchor, (quant, var, interval))))
    }
}

// `a -> b` as `~a | b`, keeping the syntax tree as written.
fn q_implies_raw(a: QFormula, b: QFormula) -> QFormula {
    QFormula::Or(Box::new(QFormula::Not(Box::new(a))), Box::new(b))
}
