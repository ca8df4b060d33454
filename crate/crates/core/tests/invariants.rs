use proptest::prelude::*;

use oneclock::compile::compile;
use oneclock::gen::{self, FormulaGen, Fragment};
use oneclock::logic::{eval_at, not, parse_formula, F};
use oneclock::qkmso::{eval_mso, parse_qformula, ratmtl_to_qkmso, Assignment, ANCHOR};
use oneclock::structure::{check_normal_form, normalize};
use oneclock::word::{rat, Letter};
use oneclock::TimedWord;

fn ab() -> Vec<String> {
    gen::props(2)
}

/// Words over {a, b} with small rational gaps, zero gaps included.
fn word() -> impl Strategy<Value = TimedWord> {
    prop::collection::vec((1u8..4, 0i64..7, 1i64..4), 1..7).prop_map(|items| {
        let mut t = rat(0, 1);
        let letters = items
            .into_iter()
            .enumerate()
            .map(|(i, (mask, n, d))| {
                if i > 0 {
                    t += rat(n, d);
                }
                let l: Letter = ab()
                    .into_iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, p)| p)
                    .collect();
                (l, t)
            })
            .collect();
        TimedWord::new(letters).expect("generated word is well formed")
    })
}

fn formula(seed: u64, fragment: Fragment) -> F {
    let ab = ab();
    let g = FormulaGen {
        alphabet: &ab,
        fragment,
        c_max: 2,
        vars: vec![],
    };
    g.formula(&mut gen::rng(seed), 2, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn word_text_and_json_round_trip(w in word()) {
        prop_assert_eq!(TimedWord::parse(&w.to_string()).unwrap(), w.clone());
        prop_assert_eq!(TimedWord::parse(&w.to_json()).unwrap(), w);
    }

    #[test]
    fn formula_print_parse_round_trip(seed in any::<u64>(), w in word()) {
        let f = formula(seed, Fragment::Rat);
        let g = parse_formula(&f.to_string()).unwrap();
        for i in 1..=w.len() {
            prop_assert_eq!(eval_at(&f, &w, i).unwrap(), eval_at(&g, &w, i).unwrap());
        }
    }

    #[test]
    fn negation_flips_every_position(seed in any::<u64>(), w in word()) {
        let f = formula(seed, Fragment::Rat);
        let nf = not(f.clone());
        for i in 1..=w.len() {
            prop_assert_ne!(eval_at(&f, &w, i).unwrap(), eval_at(&nf, &w, i).unwrap());
        }
    }

    #[test]
    fn compiled_automaton_matches_formula(seed in any::<u64>(), w in word()) {
        let f = formula(seed, Fragment::FRat);
        let a = compile(&f, &ab()).unwrap();
        prop_assert_eq!(a.accepts(&w).unwrap(), eval_at(&f, &w, 1).unwrap(), "{} on {}", f, w);
    }

    #[test]
    fn normal_form_keeps_language(seed in any::<u64>(), w in word()) {
        let a = gen::random_ata(&mut gen::rng(seed), &ab(), 3, 2);
        let n = normalize(&a);
        prop_assert!(check_normal_form(&n).0);
        prop_assert_eq!(n.accepts(&w).unwrap(), a.accepts(&w).unwrap());
    }

    #[test]
    fn printed_translation_reparses(seed in any::<u64>(), w in word()) {
        let q = ratmtl_to_qkmso(&formula(seed, Fragment::Rat)).unwrap();
        let back = parse_qformula(&q.to_string()).unwrap();
        let at = Assignment::at(ANCHOR, 1);
        prop_assert_eq!(eval_mso(&q, &w, &at).unwrap(), eval_mso(&back, &w, &at).unwrap());
    }
}
