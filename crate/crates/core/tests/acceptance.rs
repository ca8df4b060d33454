//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use oneclock::compile::{compile, compile_frat};
use oneclock::decompile::{decompile, decompile_frat, Target};
use oneclock::fixpoint::{
    accepts_via_equations, brute_force_fixpoints, compile_equations, evaluate_fixpoint,
    holds_fixpoint, is_fixpoint, solve_ata_via_equations,
};
use oneclock::fixtures::*;
use oneclock::gen::{self, FormulaGen, Fragment, Rng};
use oneclock::logic::{holds, parse_formula, Formula};
use oneclock::qkmso::{
    eval_mso, fratmtl_to_q2mso, parse_qformula, ratmtl_to_qkmso, Assignment, ANCHOR,
};
use oneclock::region::region_word_of;
use oneclock::structure::{check_cd, check_lfr, check_normal_form, check_po, classify, normalize};
use oneclock::untiming::{afa_to_dfa, synthesize_ratmtl, untime, DEFAULT_STATE_CAP};
use oneclock::{Ata, TimedWord};

type Outcome = Result<String, String>;

fn ok<T>(r: oneclock::Result<T>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Counts words on which `a` and `b` agree; fails on the first mismatch.
fn agree(
    words: &[TimedWord],
    what: &str,
    mut both: impl FnMut(&TimedWord) -> oneclock::Result<(bool, bool)>,
) -> Result<usize, String> {
    for w in words {
        let (x, y) = ok(both(w), what)?;
        ensure!(x == y, "{what}: {x} vs {y} on {w}");
    }
    Ok(words.len())
}

fn golden() -> Outcome {
    let mut n = 0;
    let mut check = |cond: bool, what: &str| -> Result<(), String> {
        n += 1;
        if cond {
            Ok(())
        } else {
            Err(format!("{what} failed"))
        }
    };
    let until = parse_formula(UNTIL_REGEX).unwrap();
    let (yes, no) = until_regex_words();
    check(
        ok(holds(&until, &yes), "until")?,
        "until-regex holds on its first word",
    )?;
    check(
        !ok(holds(&until, &no), "until")?,
        "until-regex fails on its second word",
    )?;
    let nested = parse_formula(NESTED_RAT).unwrap();
    let (yes, no) = nested_rat_words();
    check(
        ok(holds(&nested, &yes), "nested")?,
        "nested Rat holds on its first word",
    )?;
    check(
        !ok(holds(&nested, &no), "nested")?,
        "nested Rat fails on its second word",
    )?;
    let bs = parse_qformula(MSO_FUTURE_BS).unwrap();
    check(
        ok(
            eval_mso(&bs, &mso_future_bs_word(), &Assignment::at("x", 1)),
            "mso",
        )?,
        "Q_a(x) & psi(x) at 1",
    )?;
    check(
        parse_qformula(MSO_DEPTH_TWO).unwrap().metric_depth() == 2,
        "metric depth two",
    )?;
    let guarded = parse_formula(FIX_GUARDED).unwrap();
    let (five, four) = fix_guarded_words();
    check(
        five.len() == 5 && !ok(holds_fixpoint(&guarded, &five), "mu")?,
        "guarded fixpoint false on five points",
    )?;
    check(
        four.len() == 4 && ok(holds_fixpoint(&guarded, &four), "mu")?,
        "guarded fixpoint true on four points",
    )?;
    let unguarded = parse_formula(FIX_UNGUARDED).unwrap();
    let (yes, no) = fix_unguarded_words();
    check(
        ok(holds_fixpoint(&unguarded, &yes), "mu")?,
        "unguarded fixpoint true",
    )?;
    check(
        !ok(holds_fixpoint(&unguarded, &no), "mu")?,
        "unguarded fixpoint false",
    )?;
    let a = example_cd_a();
    check(check_cd(&a) && !check_lfr(&a), "(a) is C+D and not lfr")?;
    check(!check_cd(&example_cd_b()), "(b) is not C+D")?;
    let c = example_cd_c();
    check(check_lfr(&c) && !check_cd(&c), "(c) is lfr and not C+D")?;
    let d = example_cd_d();
    check(check_lfr(&d) && !check_cd(&d), "(d) is lfr and not C+D")?;
    check(
        !check_lfr(&example_not_lfr()),
        "reset cycle automaton is not lfr",
    )?;
    check(check_po(&po_automaton()), "until automaton is PO")?;
    let b = automaton_b();
    check(!check_normal_form(&b).0, "B is not normal")?;
    let nb = normalize(&b);
    let (normal, isl) = check_normal_form(&nb);
    check(
        normal && isl.map(|i| i.islands.len()) == Some(3),
        "Norm(B) is normal with three islands",
    )?;
    check(classify(&nb).normal, "classify(Norm(B)).normal")?;
    Ok(format!("{n}/{n} checks"))
}

fn untiming_preserves_acceptance() -> Outcome {
    let ab = gen::props(2);
    let mut r = gen::rng(101);
    let mut words = 0;
    for inst in 0..20 {
        let c_max = r.gen_range(1..=2);
        let p = gen::reset_free_ata(&mut r, &ab, 4, c_max);
        let afa = ok(untime(&p), "untime")?;
        let ws = gen::words(1000 + inst, &ab, 500, 7);
        words += agree(&ws, "AFA vs ATA", |w| {
            Ok((
                afa.accepts_region_word(&region_word_of(w, afa.c_max))?,
                p.accepts(w)?,
            ))
        })?;
    }
    Ok(format!("20 automata, {words}/{words} words agree"))
}

fn synthesis_and_normal_form() -> Outcome {
    let ab = gen::props(2);
    let mut r = gen::rng(102);
    let mut words = 0;
    for inst in 0..10 {
        let c_max = r.gen_range(1..=2);
        let p = gen::reset_free_ata(&mut r, &ab, 3, c_max);
        let d = ok(
            afa_to_dfa(&ok(untime(&p), "untime")?, DEFAULT_STATE_CAP),
            "dfa",
        )?;
        let f = ok(synthesize_ratmtl(&d), "synthesize")?;
        let ws = gen::words(2000 + inst, &ab, 500, 7);
        words += agree(&ws, "synthesized formula", |w| {
            Ok((holds(&f, w)?, p.accepts(w)?))
        })?;
    }
    let mut corpus: Vec<Ata> = vec![automaton_b(), example_not_lfr(), example_cd_a()];
    for _ in 0..5 {
        corpus.push(gen::random_ata(&mut r, &ab, 3, 2));
        corpus.push(gen::island_ata(&mut r, &ab, 3, 2, 2, true));
    }
    let mut non_normal = 0;
    for (k, a) in corpus.iter().enumerate() {
        let n = normalize(a);
        ensure!(
            check_normal_form(&n).0,
            "normalize output not normal for automaton {k}"
        );
        non_normal += usize::from(!check_normal_form(a).0);
        let ws = gen::words(3000 + k as u64, &a.alphabet, 500, 6);
        words += agree(&ws, "Norm(A) vs A", |w| Ok((n.accepts(w)?, a.accepts(w)?)))?;
    }
    Ok(format!("10 synthesized + {} normalized ({non_normal} not normal before), {words}/{words} words agree", corpus.len()))
}

fn rat_round_trip() -> Outcome {
    let ab = gen::props(2);
    let g = FormulaGen {
        alphabet: &ab,
        fragment: Fragment::Rat,
        c_max: 2,
        vars: vec![],
    };
    let mut r = gen::rng(104);
    let mut words = 0;
    for inst in 0..200 {
        let f = g.formula(&mut r, 2, 6);
        ensure!(
            f.modal_depth() <= 2,
            "generator exceeded modal depth 2: {f}"
        );
        let a = ok(compile(&f, &ab), "compile")?;
        ensure!(check_lfr(&a), "compiled automaton not lfr for {f}");
        let ws = gen::words(4000 + inst, &ab, 100, 6);
        words += agree(&ws, &format!("compile({f})"), |w| {
            Ok((a.accepts(w)?, holds(&f, w)?))
        })?;
    }
    let mut corpus = vec![po_automaton(), even_b_automaton()];
    while corpus.len() < 10 {
        let a = gen::island_ata(&mut r, &ab, 3, 2, 2, false);
        if check_lfr(&a) {
            corpus.push(a);
        }
    }
    let mut dwords = 0;
    for (k, a) in corpus.iter().enumerate() {
        let f = ok(decompile(a), "decompile")?;
        let ws = gen::words(5000 + k as u64, &a.alphabet, 300, 6);
        dwords += agree(&ws, "decompiled formula", |w| {
            Ok((holds(&f, w)?, a.accepts(w)?))
        })?;
    }
    Ok(format!("compile 200 formulas, {words}/{words} words; decompile 10 automata, {dwords}/{dwords} words"))
}

fn frat_round_trip() -> Outcome {
    let ab = gen::props(2);
    let g = FormulaGen {
        alphabet: &ab,
        fragment: Fragment::FRat,
        c_max: 2,
        vars: vec![],
    };
    let mut r = gen::rng(105);
    let mut words = 0;
    let mut automata = Vec::new();
    for inst in 0..50 {
        let f = g.formula(&mut r, 2, 6);
        let a = ok(compile_frat(&f, &ab), "compile_frat")?;
        ensure!(
            check_cd(&a) && check_lfr(&a),
            "compile_frat output not C+D and lfr for {f}"
        );
        let ws = gen::words(6000 + inst, &ab, 200, 6);
        words += agree(&ws, &format!("compile_frat({f})"), |w| {
            Ok((a.accepts(w)?, holds(&f, w)?))
        })?;
        automata.push(a);
    }
    automata.truncate(20);
    let mut dwords = 0;
    for (k, a) in automata.iter().enumerate() {
        let f = ok(decompile_frat(a), "decompile_frat")?;
        ensure!(
            !f.any(&mut |x| matches!(x, Formula::Rat(..) | Formula::URat(..))),
            "decompile_frat output uses Rat/URat"
        );
        let ws = gen::words(7000 + k as u64, &ab, 200, 6);
        dwords += agree(&ws, "decompile_frat", |w| {
            Ok((holds(&f, w)?, a.accepts(w)?))
        })?;
    }
    Ok(format!(
        "50 formulas C+D and lfr, {words}/{words} words; decompile_frat on {} automata, {dwords}/{dwords} words",
        automata.len()
    ))
}

fn fixpoint_uniqueness() -> Outcome {
    let ab = gen::props(2);
    let mut r = gen::rng(106);
    let (mut mutations, mut enumerations) = (0, 0);
    for inst in 0..20 {
        let n = r.gen_range(1..=2);
        let sys = gen::system(&mut r, &ab, n, 2);
        for w in gen::words(8000 + inst, &ab, 20, 6) {
            let lab = ok(evaluate_fixpoint(&sys, &w), "backward pass")?;
            ensure!(
                ok(is_fixpoint(&sys, &w, &lab), "check")?,
                "backward pass not a fixpoint"
            );
            for j in 0..lab.table.len() {
                for i in 0..w.len() {
                    let mut m = lab.clone();
                    m.table[j][i] = !m.table[j][i];
                    ensure!(
                        !ok(is_fixpoint(&sys, &w, &m), "check")?,
                        "mutation ({j},{i}) still a fixpoint of\n{sys}on {w}"
                    );
                    mutations += 1;
                }
            }
        }
        for w in gen::words(9000 + inst, &ab, 10, 5) {
            let lab = ok(evaluate_fixpoint(&sys, &w), "backward pass")?;
            let all = ok(brute_force_fixpoints(&sys, &w), "enumeration")?;
            ensure!(
                all.len() == 1 && all[0] == lab,
                "{} fixpoints on {w} for\n{sys}",
                all.len()
            );
            enumerations += 1;
        }
    }
    Ok(format!("20 systems, {mutations} mutations rejected, {enumerations} exhaustive searches found one fixpoint"))
}

fn automata_as_equations() -> Outcome {
    let ab = gen::props(2);
    let mut r = gen::rng(107);
    let mut corpus = vec![
        example_cd_a(),
        example_not_lfr(),
        automaton_b(),
        po_automaton(),
        even_b_automaton(),
    ];
    for _ in 0..10 {
        corpus.push(gen::random_ata(&mut r, &ab, 3, 2));
    }
    let non_lfr = corpus.iter().filter(|a| !check_lfr(a)).count();
    let mut words = 0;
    for (k, a) in corpus.iter().enumerate() {
        let sys = ok(
            solve_ata_via_equations(a, Target::Rat),
            "solve_ata_via_equations",
        )?;
        let ws = gen::words(10_000 + k as u64, &a.alphabet, 200, 6);
        ensure!(
            ok(accepts_via_equations(a, &ws[0]), "accepts_via_equations")?
                == a.accepts(&ws[0]).unwrap(),
            "accepts_via_equations"
        );
        words += agree(&ws, &format!("equations of automaton {k}"), |w| {
            Ok((evaluate_fixpoint(&sys, w)?.verdict(), a.accepts(w)?))
        })?;
    }
    let mut swords = 0;
    for inst in 0..30 {
        let n = r.gen_range(1..=2);
        let sys = gen::system(&mut r, &ab, n, 2);
        let a = ok(compile_equations(&sys, &ab), "compile_equations")?;
        let ws = gen::words(11_000 + inst, &ab, 200, 6);
        swords += agree(&ws, &format!("compiled system\n{sys}"), |w| {
            Ok((a.accepts(w)?, evaluate_fixpoint(&sys, w)?.verdict()))
        })?;
    }
    Ok(format!(
        "{} automata ({non_lfr} not lfr), {words}/{words} words; 30 systems compiled, {swords}/{swords} words",
        corpus.len()
    ))
}

fn forward_mso() -> Outcome {
    let ab = gen::props(3);
    let mut r = gen::rng(108);
    let mut words = 0;
    for (fragment, base) in [(Fragment::Rat, 12_000), (Fragment::FRat, 13_000)] {
        let g = FormulaGen {
            alphabet: &ab,
            fragment,
            c_max: 2,
            vars: vec![],
        };
        for inst in 0..30 {
            let f = g.formula(&mut r, 2, 5);
            let q = match fragment {
                Fragment::Rat => ok(ratmtl_to_qkmso(&f), "ratmtl_to_qkmso")?,
                Fragment::FRat => {
                    let q = ok(fratmtl_to_q2mso(&f), "fratmtl_to_q2mso")?;
                    ensure!(q.max_block() <= 1, "Q2MSO translation has a larger block");
                    q
                }
            };
            let ws = gen::words(base + inst, &ab, 100, 6);
            words += agree(&ws, &format!("translation of {f}"), |w| {
                Ok((eval_mso(&q, w, &Assignment::at(ANCHOR, 1))?, holds(&f, w)?))
            })?;
        }
    }
    Ok(format!(
        "30 RatMTL + 30 FRatMTL formulas, {words}/{words} words agree"
    ))
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 8] = [
        ("golden worked examples", 1.0, golden),
        (
            "untiming preserves acceptance",
            60.0,
            untiming_preserves_acceptance,
        ),
        (
            "synthesis and normal form preserve the language",
            120.0,
            synthesis_and_normal_form,
        ),
        ("RatMTL compile and decompile", 600.0, rat_round_trip),
        ("FRatMTL compile and decompile", 600.0, frat_round_trip),
        ("guarded fixpoints are unique", 300.0, fixpoint_uniqueness),
        (
            "automata through equation systems",
            600.0,
            automata_as_equations,
        ),
        ("RatMTL/FRatMTL into forward QkMSO", 600.0, forward_mso),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        let result = match result {
            Ok(d) if secs > *budget => {
                Err(format!("{d}, but took {secs:.2} s (budget {budget} s)"))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail}; {secs:.2} s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({why}; {secs:.2} s)", k + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
