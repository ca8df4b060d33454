use oneclock::compile::{compile, compile_frat};
use oneclock::gen::{self, FormulaGen, Fragment};
use oneclock::logic::holds;
use oneclock::structure::{check_cd, check_lfr};

#[test]
fn compile_agrees_with_eval() {
    let ab = gen::props(2);
    let g = FormulaGen {
        alphabet: &ab,
        fragment: Fragment::Rat,
        c_max: 2,
        vars: vec![],
    };
    let mut r = gen::rng(21);
    for inst in 0..60 {
        let f = g.formula(&mut r, 2, 6);
        let a = compile(&f, &ab).unwrap();
        assert!(check_lfr(&a), "{f}");
        for w in gen::words(1000 + inst, &ab, 100, 6) {
            assert_eq!(a.accepts(&w).unwrap(), holds(&f, &w).unwrap(), "{f} on {w}");
        }
    }
}

#[test]
fn compile_frat_agrees_and_is_cd() {
    let ab = gen::props(2);
    let g = FormulaGen {
        alphabet: &ab,
        fragment: Fragment::FRat,
        c_max: 2,
        vars: vec![],
    };
    let mut r = gen::rng(22);
    for inst in 0..30 {
        let f = g.formula(&mut r, 2, 6);
        let a = compile_frat(&f, &ab).unwrap();
        assert!(check_cd(&a) && check_lfr(&a), "{f}");
        for w in gen::words(2000 + inst, &ab, 100, 6) {
            assert_eq!(a.accepts(&w).unwrap(), holds(&f, &w).unwrap(), "{f} on {w}");
        }
    }
}
