use oneclock::gen::{self, Rng};
use oneclock::logic::holds;
use oneclock::region::region_word_of;
use oneclock::structure::normalize;
use oneclock::untiming::{afa_to_dfa, synthesize_ratmtl, untime, DEFAULT_STATE_CAP};

#[test]
fn afa_and_dfa_agree_with_timed_acceptance() {
    let ab = gen::props(2);
    let mut r = gen::rng(11);
    for inst in 0..20 {
        let c_max = r.gen_range(1..=2);
        let p = gen::reset_free_ata(&mut r, &ab, 4, c_max);
        let afa = untime(&p).unwrap();
        let dfa = afa_to_dfa(&afa, DEFAULT_STATE_CAP).unwrap();
        for w in gen::words(inst, &ab, 500, 7) {
            let expect = p.accepts(&w).unwrap();
            let rw = region_word_of(&w, afa.c_max);
            assert_eq!(
                afa.accepts_region_word(&rw).unwrap(),
                expect,
                "instance {inst} word {w}"
            );
            assert_eq!(
                dfa.accepts_region_word(&rw).unwrap(),
                expect,
                "instance {inst} word {w}"
            );
        }
    }
}

#[test]
fn synthesized_formula_matches_automaton() {
    let ab = gen::props(2);
    let mut r = gen::rng(12);
    for inst in 0..10 {
        let c_max = r.gen_range(1..=2);
        let p = gen::reset_free_ata(&mut r, &ab, 3, c_max);
        let dfa = afa_to_dfa(&untime(&p).unwrap(), DEFAULT_STATE_CAP).unwrap();
        let f = synthesize_ratmtl(&dfa).unwrap();
        for w in gen::words(100 + inst, &ab, 500, 7) {
            assert_eq!(
                holds(&f, &w).unwrap(),
                p.accepts(&w).unwrap(),
                "instance {inst} word {w}"
            );
        }
    }
}

#[test]
fn normalization_preserves_language() {
    let ab = gen::props(2);
    let mut r = gen::rng(13);
    for inst in 0..10 {
        let a = gen::island_ata(&mut r, &ab, 3, 2, 2, true);
        let n = normalize(&a);
        for w in gen::words(200 + inst, &ab, 500, 6) {
            assert_eq!(
                n.accepts(&w).unwrap(),
                a.accepts(&w).unwrap(),
                "instance {inst} word {w}"
            );
        }
    }
}
