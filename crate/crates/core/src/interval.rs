use std::fmt;

use crate::error::{Error, Result};
use crate::word::{int, Rational};

/// Interval over the non-negative reals with endpoints in ℕ ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: u32,
    pub lo_closed: bool,
    /// `None` is ∞.
    pub hi: Option<u32>,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: u32, lo_closed: bool, hi: Option<u32>, hi_closed: bool) -> Result<Self> {
        let iv = Interval {
            lo,
            lo_closed,
            hi,
            hi_closed: hi_closed && hi.is_some(),
        };
        if hi.is_none() && hi_closed {
            return Err(Error::input("∞ cannot be a closed endpoint"));
        }
        if iv.is_empty() {
            return Err(Error::input(format!("empty interval {iv}")));
        }
        Ok(iv)
    }

    pub fn all() -> Self {
        Interval {
            lo: 0,
            lo_closed: true,
            hi: None,
            hi_closed: false,
        }
    }

    pub fn point(c: u32) -> Self {
        Interval {
            lo: c,
            lo_closed: true,
            hi: Some(c),
            hi_closed: true,
        }
    }

    pub fn closed(lo: u32, hi: u32) -> Self {
        Interval {
            lo,
            lo_closed: true,
            hi: Some(hi),
            hi_closed: true,
        }
    }

    pub fn open(lo: u32, hi: u32) -> Self {
        Interval {
            lo,
            lo_closed: false,
            hi: Some(hi),
            hi_closed: false,
        }
    }

    pub fn closed_open(lo: u32, hi: u32) -> Self {
        Interval {
            lo,
            lo_closed: true,
            hi: Some(hi),
            hi_closed: false,
        }
    }

    pub fn open_closed(lo: u32, hi: u32) -> Self {
        Interval {
            lo,
            lo_closed: false,
            hi: Some(hi),
            hi_closed: true,
        }
    }

    pub fn from(lo: u32, lo_closed: bool) -> Self {
        Interval {
            lo,
            lo_closed,
            hi: None,
            hi_closed: false,
        }
    }

    pub fn upto(hi: u32, hi_closed: bool) -> Self {
        Interval {
            lo: 0,
            lo_closed: true,
            hi: Some(hi),
            hi_closed,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.hi {
            None => false,
            Some(h) => h < self.lo || (h == self.lo && !(self.lo_closed && self.hi_closed)),
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        let lo = int(self.lo as i64);
        let above_lo = if self.lo_closed { *t >= lo } else { *t > lo };
        let below_hi = match self.hi {
            None => true,
            Some(h) => {
                let h = int(h as i64);
                if self.hi_closed {
                    *t <= h
                } else {
                    *t < h
                }
            }
        };
        above_lo && below_hi
    }

    /// The part of ℝ≥0 strictly below the interval, if any.
    pub fn below(&self) -> Option<Interval> {
        if self.lo == 0 && self.lo_closed {
            return None;
        }
        Some(Interval::upto(self.lo, !self.lo_closed))
    }

    /// The part of ℝ≥0 strictly above the interval, if any.
    pub fn above(&self) -> Option<Interval> {
        self.hi.map(|h| Interval::from(h, !self.hi_closed))
    }

    /// At most two disjoint intervals covering ℝ≥0 minus `self`.
    pub fn complement(&self) -> Vec<Interval> {
        self.below().into_iter().chain(self.above()).collect()
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo, self.lo_closed),
            std::cmp::Ordering::Less => (other.lo, other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match (self.hi, other.hi) {
            (None, None) => (None, false),
            (Some(h), None) => (Some(h), self.hi_closed),
            (None, Some(h)) => (Some(h), other.hi_closed),
            (Some(a), Some(b)) => match a.cmp(&b) {
                std::cmp::Ordering::Less => (Some(a), self.hi_closed),
                std::cmp::Ordering::Greater => (Some(b), other.hi_closed),
                std::cmp::Ordering::Equal => (Some(a), self.hi_closed && other.hi_closed),
            },
        };
        let iv = Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        };
        (!iv.is_empty()).then_some(iv)
    }

    pub fn max_constant(&self) -> u32 {
        self.hi.unwrap_or(0).max(self.lo)
    }

    /// Parses `[1,2)`, `(0,inf)`, `[1,1]`; whitespace is ignored.
    pub fn parse(text: &str) -> Result<Interval> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::input(format!("bad interval {text:?}"));
        let lo_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let inner = &s[1..s.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let lo: u32 = a.parse().map_err(|_| bad())?;
        let hi = match b {
            "inf" | "∞" => None,
            b => Some(b.parse::<u32>().map_err(|_| bad())?),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        match self.hi {
            None => write!(f, "{l}{},inf)", self.lo),
            Some(h) => {
                let r = if self.hi_closed { ']' } else { ')' };
                write!(f, "{l}{},{h}{r}", self.lo)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::rat;

    #[test]
    fn membership() {
        let i = Interval::parse("[1,2)").unwrap();
        assert!(i.contains(&int(1)));
        assert!(!i.contains(&int(2)));
        assert!(!Interval::parse("(0,inf)").unwrap().contains(&int(0)));
        assert!(Interval::point(1).contains(&int(1)));
        assert!(!Interval::point(1).contains(&rat(3, 2)));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(
            Interval::parse("[1,2)").unwrap().complement(),
            vec![
                Interval::parse("[0,1)").unwrap(),
                Interval::parse("[2,inf)").unwrap()
            ]
        );
        assert!(Interval::all().complement().is_empty());
        assert_eq!(
            Interval::parse("(1,2)").unwrap().complement(),
            vec![
                Interval::parse("[0,1]").unwrap(),
                Interval::parse("[2,inf)").unwrap()
            ]
        );
        assert_eq!(
            Interval::parse("(0,1)").unwrap().complement()[0],
            Interval::point(0)
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["[2,1]", "(1,1)", "[1,inf]", "1,2", "[a,2]"] {
            assert!(Interval::parse(s).is_err(), "{s}");
        }
        assert_eq!(
            Interval::parse("( 0 , inf )").unwrap().to_string(),
            "(0,inf)"
        );
    }

    #[test]
    fn intersection() {
        let a = Interval::parse("[0,2)").unwrap();
        let b = Interval::parse("(1,3]").unwrap();
        assert_eq!(a.intersect(&b), Some(Interval::open(1, 2)));
        assert_eq!(Interval::point(1).intersect(&Interval::open(1, 2)), None);
    }
}
