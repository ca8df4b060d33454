use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num_rational::Rational64;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"3"`, `"0.75"`, `"-1.5"` or `"7/10"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::input(format!("bad rational literal {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(Error::input(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut num: i64 = 0;
    let mut den: i64 = 1;
    for c in ip.chars().chain(fp.chars()) {
        num = num
            .checked_mul(10)
            .and_then(|v| v.checked_add(c as i64 - '0' as i64))
            .ok_or_else(|| Error::input(format!("rational literal {s:?} overflows")))?;
    }
    for _ in fp.chars() {
        den = den
            .checked_mul(10)
            .ok_or_else(|| Error::input(format!("rational literal {s:?} overflows")))?;
    }
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Renders a rational as an integer, a terminating decimal, or `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = *r.denom();
    let mut twos = 0;
    let mut fives = 0;
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d == 1 {
        let digits = twos.max(fives);
        let scale = 10i64.checked_pow(digits);
        if let Some(scale) = scale {
            if let Some(scaled) = (r * int(scale)).to_integer().checked_abs() {
                let sign = if *r.numer() < 0 { "-" } else { "" };
                let s = format!("{:0width$}", scaled, width = digits as usize + 1);
                let (ip, fp) = s.split_at(s.len() - digits as usize);
                return format!("{sign}{ip}.{fp}");
            }
        }
    }
    format!("{}/{}", r.numer(), r.denom())
}

pub type Letter = BTreeSet<String>;

pub fn letter<I, S>(props: I) -> Letter
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    props.into_iter().map(Into::into).collect()
}

/// A finite timed word: non-empty, weakly monotone, starting at time 0,
/// every letter a non-empty proposition set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimedWord {
    letters: Vec<(Letter, Rational)>,
}

impl TimedWord {
    pub fn new(letters: Vec<(Letter, Rational)>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::input("timed word must be non-empty"));
        }
        if !letters[0].1.is_zero() {
            return Err(Error::input("first timestamp must be 0"));
        }
        for (i, (props, t)) in letters.iter().enumerate() {
            if props.is_empty() {
                return Err(Error::input(format!(
                    "letter {} has an empty proposition set",
                    i + 1
                )));
            }
            if i > 0 && *t < letters[i - 1].1 {
                return Err(Error::input(format!("timestamp {} decreases", i + 1)));
            }
        }
        Ok(TimedWord { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[(Letter, Rational)] {
        &self.letters
    }

    /// Props at 0-based index.
    pub fn props(&self, i: usize) -> &Letter {
        &self.letters[i].0
    }

    pub fn time(&self, i: usize) -> Rational {
        self.letters[i].1
    }

    pub fn props_used(&self) -> BTreeSet<String> {
        self.letters
            .iter()
            .flat_map(|(p, _)| p.iter().cloned())
            .collect()
    }

    /// Reads either the JSON form or the text form `({a,b},0)({b},1/2)`;
    /// whitespace and `#` comments are ignored in the text form.
    pub fn parse(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join(" ");
        let body = body.trim();
        if body.starts_with('[') {
            return TimedWord::from_json(body);
        }
        let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = compact.as_str();
        let mut letters = Vec::new();
        while !rest.is_empty() {
            let bad = || Error::input(format!("bad letter near {:?}", &rest[..rest.len().min(20)]));
            let inner = rest.strip_prefix("({").ok_or_else(bad)?;
            let (props, after) = inner.split_once("},").ok_or_else(bad)?;
            let (time, after) = after.split_once(')').ok_or_else(bad)?;
            let props: Letter = props
                .split(',')
                .filter(|p| !p.is_empty())
                .map(str::to_string)
                .collect();
            letters.push((props, parse_rational(time)?));
            rest = after;
        }
        TimedWord::new(letters)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<RawLetter> =
            serde_json::from_str(text).map_err(|e| Error::input(format!("word JSON: {e}")))?;
        let letters = raw
            .into_iter()
            .map(|r| Ok((r.props.into_iter().collect(), parse_rational(&r.t)?)))
            .collect::<Result<Vec<_>>>()?;
        TimedWord::new(letters)
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<RawLetter> = self
            .letters
            .iter()
            .map(|(p, t)| RawLetter {
                t: format_rational(t),
                props: p.iter().cloned().collect(),
            })
            .collect();
        serde_json::to_string(&raw).expect("word serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct RawLetter {
    t: String,
    props: Vec<String>,
}

impl fmt::Display for TimedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, t) in &self.letters {
            let names: Vec<&str> = p.iter().map(String::as_str).collect();
            write!(f, "({{{}}},{})", names.join(","), format_rational(t))?;
        }
        Ok(())
    }
}

/// Builds a word from `(props, "time")` pairs; panics on malformed input.
/// Meant for tests and fixtures.
pub fn word(items: &[(&[&str], &str)]) -> TimedWord {
    let letters = items
        .iter()
        .map(|(p, t)| {
            (
                letter(p.iter().copied()),
                parse_rational(t).expect("time literal"),
            )
        })
        .collect();
    TimedWord::new(letters).expect("well-formed word")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.3").unwrap(), rat(3, 10));
        assert_eq!(parse_rational("7/10").unwrap(), rat(7, 10));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("99999999999999999999").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for r in [rat(3, 10), rat(1, 3), int(0), rat(-5, 4), rat(99, 100)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert_eq!(format_rational(&rat(3, 10)), "0.3");
        assert_eq!(format_rational(&rat(1, 3)), "1/3");
    }

    #[test]
    fn text_and_json_forms() {
        let w = word(&[(&["a"], "0"), (&["a", "b"], "1/3"), (&["b"], "0.5")]);
        assert_eq!(TimedWord::parse(&w.to_string()).unwrap(), w);
        assert_eq!(TimedWord::parse(&w.to_json()).unwrap(), w);
        assert_eq!(
            TimedWord::parse("# comment\n({a}, 0)\n({a,b}, 1/3) ({b},0.5)").unwrap(),
            w
        );
        assert!(TimedWord::parse("({a},0)({b}").is_err());
    }

    #[test]
    fn word_invariants() {
        assert!(TimedWord::new(vec![]).is_err());
        assert!(TimedWord::new(vec![(letter(["a"]), int(1))]).is_err());
        assert!(
            TimedWord::new(vec![(letter(["a"]), int(0)), (letter(["a"]), rat(-1, 2))]).is_err()
        );
        assert!(TimedWord::new(vec![(Letter::new(), int(0))]).is_err());
        let w = word(&[(&["a"], "0"), (&["a", "b"], "0"), (&["b"], "0.5")]);
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let w = word(&[(&["a"], "0"), (&["a", "c"], "7/10")]);
        let back = TimedWord::from_json(&w.to_json()).unwrap();
        assert_eq!(w, back);
        assert!(TimedWord::from_json(r#"[{"t":"1","props":["a"]}]"#).is_err());
    }
}
