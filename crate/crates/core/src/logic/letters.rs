//! Propositional descriptions of letter classes.

use std::collections::BTreeSet;

use super::{and_all, not, or_all, prop, F};
use crate::ata::Mask;

/// A small propositional formula true exactly on the letters of `class`
/// among those accepted by `universe`; letters outside the universe are
/// don't-cares. Uses a greedy cube cover.
pub fn letter_class_formula(
    alphabet: &[String],
    class: &BTreeSet<Mask>,
    universe: &dyn Fn(Mask) -> bool,
) -> F {
    let n = alphabet.len();
    let all: Vec<Mask> = (0..1u64 << n).filter(|m| universe(*m)).collect();
    let target: BTreeSet<Mask> = class.iter().copied().filter(|m| universe(*m)).collect();
    if target.is_empty() {
        return or_all([]);
    }
    if target.len() == all.len() {
        return and_all([]);
    }
    let cube_formula = |care: Mask, value: Mask| {
        and_all((0..n).filter(|i| care >> i & 1 == 1).map(|i| {
            let p = prop(&alphabet[i]);
            if value >> i & 1 == 1 {
                p
            } else {
                not(p)
            }
        }))
    };
    if n > 8 {
        return or_all(target.iter().map(|m| cube_formula((1 << n) - 1, *m)));
    }
    let mut cubes: Vec<(Mask, Mask, Vec<Mask>)> = Vec::new();
    for care in 0..1u64 << n {
        let mut value = care;
        loop {
            let members: Vec<Mask> = all.iter().copied().filter(|m| m & care == value).collect();
            if !members.is_empty() && members.iter().all(|m| target.contains(m)) {
                cubes.push((care, value, members));
            }
            if value == 0 {
                break;
            }
            value = (value - 1) & care;
        }
    }
    let mut uncovered = target;
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let best = cubes
            .iter()
            .max_by_key(|(care, _, ms)| {
                (
                    ms.iter().filter(|m| uncovered.contains(m)).count(),
                    std::cmp::Reverse(care.count_ones()),
                )
            })
            .expect("singleton cubes exist");
        for m in &best.2 {
            uncovered.remove(m);
        }
        chosen.push(cube_formula(best.0, best.1));
    }
    or_all(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval::Evaluator;
    use crate::word::TimedWord;

    #[test]
    fn covers_exactly_the_class() {
        let alphabet: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let nonempty = |m: Mask| m != 0;
        for code in 0u32..(1 << 7) {
            let class: BTreeSet<Mask> = (1..8u64).filter(|m| code >> (m - 1) & 1 == 1).collect();
            let f = letter_class_formula(&alphabet, &class, &nonempty);
            for m in 1..8u64 {
                let letter = crate::ata::mask_letter(&alphabet, m);
                let w = TimedWord::new(vec![(letter, crate::word::int(0))]).unwrap();
                assert_eq!(Evaluator::new(&w).eval(&f, 0).unwrap(), class.contains(&m));
            }
        }
        let f = letter_class_formula(&alphabet, &(1..8).collect(), &nonempty);
        assert_eq!(f.to_string(), "true");
        let f = letter_class_formula(&alphabet, &[1, 3, 5, 7].into(), &nonempty);
        assert_eq!(f.to_string(), "a");
    }
}
