use std::fmt;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::word::{int, Letter, Rational, TimedWord};

/// A clock region relative to a maximal constant `c_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Point(u32),
    /// `(c, c+1)`.
    Open(u32),
    /// `(c_max, ∞)`.
    Tail(u32),
}

impl Region {
    /// Position in the total region order.
    pub fn index(&self) -> usize {
        match *self {
            Region::Point(c) => 2 * c as usize,
            Region::Open(c) | Region::Tail(c) => 2 * c as usize + 1,
        }
    }

    pub fn from_index(idx: usize, c_max: u32) -> Region {
        let c = (idx / 2) as u32;
        if idx % 2 == 0 {
            Region::Point(c)
        } else if c == c_max {
            Region::Tail(c)
        } else {
            Region::Open(c)
        }
    }

    pub fn all(c_max: u32) -> Vec<Region> {
        (0..region_count(c_max))
            .map(|i| Region::from_index(i, c_max))
            .collect()
    }

    pub fn interval(&self) -> Interval {
        match *self {
            Region::Point(c) => Interval::point(c),
            Region::Open(c) => Interval::open(c, c + 1),
            Region::Tail(c) => Interval::from(c, false),
        }
    }

    /// A rational inside the region.
    pub fn sample(&self) -> Rational {
        match *self {
            Region::Point(c) => int(c as i64),
            Region::Open(c) | Region::Tail(c) => int(c as i64) + Rational::new(1, 2),
        }
    }
}

impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Region {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.interval())
    }
}

pub fn region_count(c_max: u32) -> usize {
    2 * c_max as usize + 2
}

pub fn region_of(t: &Rational, c_max: u32) -> Result<Region> {
    if *t < int(0) {
        return Err(Error::input("negative time has no region"));
    }
    if *t > int(c_max as i64) {
        return Ok(Region::Tail(c_max));
    }
    if t.is_integer() {
        Ok(Region::Point(t.to_integer() as u32))
    } else {
        Ok(Region::Open(t.floor().to_integer() as u32))
    }
}

pub type RegionWord = Vec<(Letter, Region)>;

pub fn region_word_of(w: &TimedWord, c_max: u32) -> RegionWord {
    w.letters()
        .iter()
        .map(|(p, t)| {
            (
                p.clone(),
                region_of(t, c_max).expect("word times are non-negative"),
            )
        })
        .collect()
}

/// First region is point(0) and regions never decrease.
pub fn is_good_region_word(w: &[(Letter, Region)]) -> bool {
    match w.first() {
        None => true,
        Some((_, r)) if *r != Region::Point(0) => false,
        _ => w.windows(2).all(|p| p[0].1 <= p[1].1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{letter, rat, word};

    #[test]
    fn region_examples() {
        assert_eq!(region_of(&int(0), 2).unwrap(), Region::Point(0));
        assert_eq!(region_of(&rat(7, 10), 1).unwrap(), Region::Open(0));
        assert_eq!(region_of(&rat(5, 2), 2).unwrap(), Region::Tail(2));
        assert!(region_of(&rat(-1, 2), 2).is_err());
        assert_eq!(Region::all(2).len(), 6);
    }

    #[test]
    fn region_words() {
        let w = word(&[(&["a"], "0"), (&["a"], "1"), (&["b"], "3/2")]);
        let rw = region_word_of(&w, 1);
        assert_eq!(
            rw.iter().map(|x| x.1).collect::<Vec<_>>(),
            vec![Region::Point(0), Region::Point(1), Region::Tail(1)]
        );
        assert!(is_good_region_word(&rw));
        let bad = vec![(letter(["a"]), Region::Open(0))];
        assert!(!is_good_region_word(&bad));
        let bad = vec![
            (letter(["a"]), Region::Point(0)),
            (letter(["b"]), Region::Point(1)),
            (letter(["c"]), Region::Open(0)),
        ];
        assert!(!is_good_region_word(&bad));
        let ok = vec![
            (letter(["a"]), Region::Point(0)),
            (letter(["b"]), Region::Point(0)),
        ];
        assert!(is_good_region_word(&ok));
    }

    #[test]
    fn index_round_trip() {
        for c in 0..4 {
            for r in Region::all(c) {
                assert_eq!(Region::from_index(r.index(), c), r);
                assert_eq!(region_of(&r.sample(), c).unwrap(), r);
            }
        }
    }
}
