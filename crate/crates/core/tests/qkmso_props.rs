use oneclock::gen::{self, FormulaGen, Fragment};
use oneclock::logic::holds;
use oneclock::qkmso::{eval_mso, fratmtl_to_q2mso, ratmtl_to_qkmso, validate, Assignment, ANCHOR};

#[test]
fn rat_translation_agrees_with_eval() {
    let ab = gen::props(2);
    let g = FormulaGen {
        alphabet: &ab,
        fragment: Fragment::Rat,
        c_max: 2,
        vars: vec![],
    };
    let mut r = gen::rng(31);
    for inst in 0..30 {
        let f = g.formula(&mut r, 2, 5);
        let q = ratmtl_to_qkmso(&f).unwrap();
        assert!(validate(&q, 4, false).valid, "{f}");
        for w in gen::words(3000 + inst, &ab, 100, 6) {
            let got = eval_mso(&q, &w, &Assignment::at(ANCHOR, 1)).unwrap();
            assert_eq!(got, holds(&f, &w).unwrap(), "{f} on {w}");
        }
    }
}

#[test]
fn frat_translation_agrees_with_eval() {
    let ab = gen::props(2);
    let g = FormulaGen {
        alphabet: &ab,
        fragment: Fragment::FRat,
        c_max: 2,
        vars: vec![],
    };
    let mut r = gen::rng(32);
    for inst in 0..30 {
        let f = g.formula(&mut r, 2, 5);
        let q = fratmtl_to_q2mso(&f).unwrap();
        assert!(validate(&q, 2, false).valid, "{f}");
        for w in gen::words(4000 + inst, &ab, 100, 6) {
            let got = eval_mso(&q, &w, &Assignment::at(ANCHOR, 1)).unwrap();
            assert_eq!(got, holds(&f, &w).unwrap(), "{f} on {w}");
        }
    }
}
