//! Worked example automata, formulas and words used by tests, the golden
//! corpus and the CLI.

use crate::ata::{letter_mask, Ata};
use crate::tf::parse_tf;
use crate::word::{word, TimedWord};

#[derive(Clone, Copy)]
pub enum Sel<'a> {
    All,
    Exactly(&'a [&'a str]),
    Has(&'a str),
    Lacks(&'a str),
}

/// Builds an automaton from readable rules. Later rules for the same letter
/// are rejected by a panic, since fixtures must be unambiguous.
pub fn build(
    alphabet: &[&str],
    locs: &[&str],
    initial: &str,
    finals: &[&str],
    rules: &[(&str, Sel, &str)],
) -> Ata {
    let alphabet: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
    let locations: Vec<String> = locs.iter().map(|s| s.to_string()).collect();
    let init = locations
        .iter()
        .position(|l| l == initial)
        .expect("initial location");
    let mut a = Ata::new(alphabet, locations.clone(), init);
    for f in finals {
        let i = a.loc(f).expect("final location");
        a.finals[i] = true;
    }
    for (from, sel, text) in rules {
        let s = a.loc(from).expect("rule location");
        let f = parse_tf(text, &|n| locations.iter().position(|l| l == n)).expect("rule formula");
        let letters: Vec<u64> = match sel {
            Sel::All => a.letters().collect(),
            Sel::Exactly(ps) => {
                vec![
                    letter_mask(&a.alphabet, &ps.iter().map(|p| p.to_string()).collect())
                        .expect("letter"),
                ]
            }
            Sel::Has(p) => {
                let bit = letter_mask(&a.alphabet, &[p.to_string()].into()).expect("prop");
                a.letters().filter(|m| m & bit != 0).collect()
            }
            Sel::Lacks(p) => {
                let bit = letter_mask(&a.alphabet, &[p.to_string()].into()).expect("prop");
                a.letters().filter(|m| m & bit == 0).collect()
            }
        };
        for m in letters {
            assert!(
                !a.delta.contains_key(&(s, m)),
                "overlapping fixture rules for {from}"
            );
            a.set(s, m, f.clone());
        }
    }
    a
}

/// Partially ordered automaton: no {a,b}; every non-last {a} has no symbol at
/// distance 1 and some symbol beyond distance 1.
pub fn po_automaton() -> Ata {
    build(
        &["a", "b"],
        &["t0", "t1", "t2"],
        "t0",
        &["t0", "t2"],
        &[
            ("t0", Sel::Exactly(&["b"]), "t0"),
            ("t0", Sel::Exactly(&["a"]), "(t0 & x.t1) | t2"),
            ("t1", Sel::Exactly(&["a"]), "(t1 & x < 1) | x > 1"),
            ("t1", Sel::Exactly(&["b"]), "(t1 & x < 1) | x > 1"),
            ("t2", Sel::Exactly(&["b"]), "t2"),
        ],
    )
}

/// Automaton B that is not in normal form: s0 is used both free and reset.
pub fn automaton_b() -> Ata {
    build(
        &["a", "b"],
        &["s0", "s1", "s2"],
        "s0",
        &["s1"],
        &[
            ("s0", Sel::Exactly(&["b"]), "x.s2"),
            ("s0", Sel::Exactly(&["a"]), "s0 & x.s1"),
            ("s1", Sel::Exactly(&["a"]), "s1 & s0"),
            ("s1", Sel::Exactly(&["b"]), "s1 & s0"),
            ("s2", Sel::Exactly(&["b"]), "x.s0"),
            ("s2", Sel::Exactly(&["a"]), "s2 & x.s1"),
        ],
    )
}

/// A reset cycle s → p → q → s; neither lfr nor PO.
pub fn example_not_lfr() -> Ata {
    build(
        &["a"],
        &["s", "p", "q"],
        "s",
        &[],
        &[
            ("s", Sel::All, "(x.p & x <= 1) | (q & x = 2)"),
            ("p", Sel::All, "x.q & p"),
            ("q", Sel::All, "s & x in (0,1)"),
        ],
    )
}

/// C⊕D but with a reset cycle between islands.
pub fn example_cd_a() -> Ata {
    build(
        &["a"],
        &["s", "p", "q", "r"],
        "s",
        &[],
        &[
            ("s", Sel::All, "x = 1 | (x.p & x.r)"),
            ("p", Sel::All, "x.s | x.q | p"),
            ("q", Sel::All, "x.r"),
            ("r", Sel::All, "x.q | r"),
        ],
    )
}

/// Mixes a free location with a clock constraint in both polarities.
pub fn example_cd_b() -> Ata {
    build(
        &["a", "b"],
        &["s0"],
        "s0",
        &[],
        &[
            ("s0", Sel::Has("a"), "s0 | x > 1"),
            ("s0", Sel::Lacks("a"), "s0 & x <= 1"),
        ],
    )
}

/// lfr but switches polarity at s0 depending on the letter.
pub fn example_cd_c() -> Ata {
    build(
        &["a", "b"],
        &["s0", "s1", "s2"],
        "s0",
        &[],
        &[
            ("s0", Sel::Has("a"), "s0 | s1"),
            ("s0", Sel::Lacks("a"), "s0 & s2"),
            ("s1", Sel::All, "x > 1"),
            ("s2", Sel::All, "x <= 1"),
        ],
    )
}

/// lfr but a disjunctive location reaches a conjunctive one without reset.
pub fn example_cd_d() -> Ata {
    build(
        &["a", "b"],
        &["s0", "s1", "s2", "s3", "s4"],
        "s0",
        &["s1"],
        &[
            ("s0", Sel::All, "s0 | s1"),
            ("s1", Sel::Has("a"), "s2 & s3"),
            ("s2", Sel::All, "x <= 1"),
            ("s3", Sel::All, "s4"),
            ("s4", Sel::All, "x > 1"),
        ],
    )
}

/// Every a is followed by an even number of b's at distance (1,2).
pub fn even_b_automaton() -> Ata {
    build(
        &["a", "b"],
        &["s0", "s1", "s2"],
        "s0",
        &["s0", "s1"],
        &[
            ("s0", Sel::Exactly(&["a"]), "s0 & x.s1"),
            ("s0", Sel::Exactly(&["b"]), "s0"),
            ("s1", Sel::Exactly(&["a"]), "s1"),
            (
                "s1",
                Sel::Exactly(&["b"]),
                "(s1 & x <= 1) | (s2 & x in (1,2)) | x >= 2",
            ),
            ("s2", Sel::Exactly(&["a"]), "s2"),
            ("s2", Sel::Exactly(&["b"]), "(s1 & x in (1,2)) | s2"),
        ],
    )
}

pub const UNTIL_REGEX: &str = "URat[(0,1)]{(a.a)*}(a, b)";
pub const NESTED_RAT: &str = "Rat[(0,2)]{ <URat[(0,1)]{b.b*}(a, c)> . e . e* }";
pub const FIX_GUARDED: &str = "mu Z. (a -> Rat[(0,1)]{ (a + b)* . <b | Z> })";
pub const FIX_UNGUARDED: &str = "mu Z. (Z | FRat[[0,1)]{ (a.a + Z) . (a.a + Z)* }(b))";

pub fn until_regex_words() -> (TimedWord, TimedWord) {
    (
        word(&[
            (&["a"], "0"),
            (&["a", "b"], "0.3"),
            (&["a", "b"], "0.7"),
            (&["b"], "0.9"),
        ]),
        word(&[
            (&["a"], "0"),
            (&["a"], "0.3"),
            (&["a"], "0.5"),
            (&["a"], "0.9"),
            (&["b"], "0.99"),
        ]),
    )
}

pub fn nested_rat_words() -> (TimedWord, TimedWord) {
    (
        word(&[
            (&["a"], "0"),
            (&["a", "b"], "0.3"),
            (&["a", "b", "e"], "0.4"),
            (&["a", "b", "e"], "0.9"),
            (&["b", "c", "e"], "0.99"),
            (&["b", "e"], "1.3"),
            (&["e"], "1.9"),
        ]),
        word(&[
            (&["b"], "0"),
            (&["a", "b"], "0.3"),
            (&["a", "b"], "0.4"),
            (&["a", "e"], "0.9"),
            (&["b", "c", "e"], "0.99"),
            (&["b", "e"], "1.3"),
            (&["e"], "1.9"),
        ]),
    )
}

/// (rejected five-point word, accepted four-point word) for [`FIX_GUARDED`].
pub fn fix_guarded_words() -> (TimedWord, TimedWord) {
    (
        word(&[
            (&["a"], "0"),
            (&["b"], "0.6"),
            (&["a"], "0.9"),
            (&["b"], "1.7"),
            (&["a"], "1.8"),
        ]),
        word(&[
            (&["a"], "0"),
            (&["b"], "0.6"),
            (&["a"], "0.9"),
            (&["b"], "1.7"),
        ]),
    )
}

/// (accepted seven-point word, rejected six-point word) for [`FIX_UNGUARDED`].
pub fn fix_unguarded_words() -> (TimedWord, TimedWord) {
    (
        word(&[
            (&["a"], "0"),
            (&["a"], "0.2"),
            (&["a"], "0.7"),
            (&["b"], "0.9"),
            (&["a"], "1.1"),
            (&["a"], "1.3"),
            (&["b"], "1.7"),
        ]),
        word(&[
            (&["a"], "0"),
            (&["a"], "0.7"),
            (&["b"], "0.9"),
            (&["a"], "1.1"),
            (&["a"], "1.3"),
            (&["b"], "1.7"),
        ]),
    )
}

pub const MSO_FUTURE_BS: &str =
    "Q_a(x) & (Em y in x+(2,inf). Em z in x+(3,inf). (Q_b(y) & Q_b(z)))";
pub const MSO_DEPTH_TWO: &str = "A t0. Am t1 in t0+(1,2). (Q_a(t1) -> Em t2 in t1+[1,1]. Q_b(t2))";

pub fn mso_future_bs_word() -> TimedWord {
    word(&[
        (&["a"], "0"),
        (&["b"], "2.1"),
        (&["a", "b"], "2.75"),
        (&["b"], "3.1"),
    ])
}
