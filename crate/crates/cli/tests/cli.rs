use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn oneclock(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_oneclock"))
        .args(args)
        .current_dir(corpus())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn golden_corpus() {
    let manifest = std::fs::read_to_string(corpus().join("golden.txt")).unwrap();
    let mut checked = 0;
    for line in manifest
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
    {
        let (cmd, expected) = line.split_once(" => ").expect("manifest line");
        let args: Vec<&str> = cmd.split_whitespace().collect();
        let out = oneclock(&args, None);
        if expected == "error" {
            assert_eq!(out.status.code(), Some(2), "{cmd}");
            let err: serde_json::Value =
                serde_json::from_slice(&out.stderr).expect("JSON error object");
            assert!(err["error"].is_string() && err["message"].is_string());
        } else {
            assert!(
                out.status.success(),
                "{cmd}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            assert_eq!(stdout(&out).lines().next().unwrap_or(""), expected, "{cmd}");
        }
        checked += 1;
    }
    assert!(checked >= 20);
}

#[test]
fn normalize_pipes_into_classify() {
    let norm = oneclock(&["normalize", "b.ata"], None);
    assert!(norm.status.success());
    let before: serde_json::Value =
        serde_json::from_str(&stdout(&oneclock(&["classify", "b.ata"], None))).unwrap();
    assert_eq!(before["normal"], false);
    let out = oneclock(
        &["classify", "-", "--expect", "normal"],
        Some(&stdout(&norm)),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["normal"], true);
    assert_eq!(v["islands"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(
        oneclock(&["classify", "cd_a.ata", "--expect", "lfr"], None)
            .status
            .code(),
        Some(1)
    );
    let bad = oneclock(
        &["eval", "-", "until_regex_yes.word"],
        Some("Rat[(0,1)]{a ."),
    );
    assert_eq!(bad.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(err["error"], "parse");
    let missing = oneclock(&["eval", "no_such.ratmtl", "until_regex_yes.word"], None);
    assert_eq!(missing.status.code(), Some(2));
    // nine letters exceed the brute-force cap for set quantifiers
    let long = "({a},0)".repeat(9);
    let q = "ES X. E t. X(t)";
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("q.qmso"), q).unwrap();
    std::fs::write(dir.join("long.word"), long).unwrap();
    let out = oneclock(
        &[
            "mso-eval",
            dir.join("q.qmso").to_str().unwrap(),
            dir.join("long.word").to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let decomp = oneclock(&["decompile", "cd_a.ata"], None);
    assert_eq!(decomp.status.code(), Some(2));
}

#[test]
fn compile_then_accepts_round_trip() {
    let ata = oneclock(&["compile", "until_regex.ratmtl"], None);
    assert!(ata.status.success());
    for (word, expect) in [
        ("until_regex_yes.word", "true"),
        ("until_regex_no.word", "false"),
    ] {
        let out = oneclock(&["accepts", "-", word], Some(&stdout(&ata)));
        assert_eq!(stdout(&out).trim(), expect);
    }
    let frat = oneclock(&["compile", "--frat", "until_regex.ratmtl"], None);
    let class = oneclock(
        &["classify", "-", "--expect", "cd,lfr"],
        Some(&stdout(&frat)),
    );
    assert!(class.status.success());
}

#[test]
fn untime_and_synthesize() {
    let dot = oneclock(&["untime", "cd_b.ata", "--dot"], None);
    assert!(
        dot.status.success(),
        "{}",
        String::from_utf8_lossy(&dot.stderr)
    );
    assert!(stdout(&dot).starts_with("digraph"));
    let afa: serde_json::Value =
        serde_json::from_str(&stdout(&oneclock(&["untime", "cd_b.ata"], None))).unwrap();
    assert!(afa.is_object());
    let f = oneclock(&["synthesize", "cd_b.ata"], None);
    assert!(f.status.success());
    assert!(!stdout(&f).trim().is_empty());
}

#[test]
fn translate_outputs_parse() {
    let q = oneclock(&["translate", "nested_rat.ratmtl"], None);
    assert!(q.status.success());
    let w = oneclock(
        &["mso-eval", "-", "nested_rat_yes.word", "--check", "4"],
        Some(&stdout(&q)),
    );
    assert_eq!(stdout(&w).lines().next(), Some("true"));
    let eqs = oneclock(
        &["translate", "fix_guarded.ratmtl", "--to", "equations"],
        None,
    );
    let v = oneclock(
        &["fixpoint-eval", "-", "fix_guarded_yes.word"],
        Some(&stdout(&eqs)),
    );
    assert_eq!(stdout(&v).trim(), "true");
    let via = oneclock(&["translate", "--automaton", "cd_a.ata"], None);
    assert!(via.status.success());
}

#[test]
fn difftest_is_deterministic() {
    let args = [
        "difftest", "--mode", "compile", "--seed", "7", "--count", "8", "--words", "30", "--json",
    ];
    let a = oneclock(&args, None);
    let b = oneclock(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let plain = oneclock(
        &["difftest", "--mode", "mso", "--count", "4", "--words", "20"],
        None,
    );
    assert_eq!(stdout(&plain).lines().next(), Some("4/4 agree"));
}
