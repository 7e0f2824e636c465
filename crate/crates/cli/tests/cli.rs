use std::path::PathBuf;
use std::process::{Command, Output};

use lop_core::lang::{desugar, parse_formula};
use lop_core::model::{satisfies, FrameDesc};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn lop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lop"))
        .args(args)
        .current_dir(root())
        .env_remove("LOP_BOUNDS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const UNIVERSAL: &str = "forall x^e1 . P^<e1>(x)";

#[test]
fn prove_accepts_reflexivity() {
    let o = lop(&["prove", "corpus/identity_refl.prf"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("accepted (4 lines)"), "{}", stdout(&o));
}

#[test]
fn classify_reports_the_offending_component() {
    let o = lop(&["classify", "<e1,e2>"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not opaque: component 2 has leaf e2"));
    assert_eq!(code(&lop(&["classify", "<e1,<<e1>,e1>>"])), 0);
    assert_eq!(code(&lop(&["classify", "e1"])), 2);
}

#[test]
fn validity_finds_the_empty_predicate() {
    let o = lop(&["validity", "--nm", "2", "--M", "1", "--depth", "1", "--kind", "symmetric", UNIVERSAL]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("result: counterexample"), "{out}");
    assert!(out.contains("P^<e1> ↦ {}"), "{out}");
    let o = lop(&["validity", "P^<e1>(c^e1) -> P(c)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("frames checked: 8"));
}

#[test]
fn counterexample_reports_reload_as_frames() {
    for src in [UNIVERSAL, "X^<e1>(x^e1) -> Q^<e1>(x)", "a^e2 = b^e2", "forall X^<e1> . F^<<e1>>(X)"] {
        for kind in ["standard", "symmetric"] {
            let o = lop(&["validity", "--nm", "2", "--kind", kind, "--format", "structured", src]);
            assert_eq!(code(&o), 1, "{src}");
            let text = stdout(&o);
            let loaded = FrameDesc::from_json(&text).unwrap().load().unwrap();
            let f = desugar(&parse_formula(src).unwrap());
            assert!(!satisfies(&loaded.interpretation, &loaded.valuation, &f).unwrap(), "{src}");

            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("cx.json");
            std::fs::write(&path, &text).unwrap();
            let e = lop(&["eval", "--frame", path.to_str().unwrap(), src]);
            assert_eq!(code(&e), 1, "{src}: {}", stdout(&e));
        }
    }
}

#[test]
fn structured_reports_are_versioned_and_deterministic() {
    let runs = [
        vec!["permtest", "--trials", "100", "--seed", "11", "--format", "structured"],
        vec!["validity", "--format", "structured", "R^<e1,e1>(x^e1, y^e1) -> R(y, x)"],
        vec!["suite", "corpus", "--format", "structured"],
        vec!["prove", "corpus/a4_relation.prf", "--format", "structured"],
    ];
    for args in runs {
        let a = lop(&args);
        let b = lop(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn text_and_structured_reports_agree() {
    let args = ["validity", "--nm", "2", "--kind", "standard", "R^<e1,e1>(x^e1, y^e1) -> R(y, x)"];
    let text = stdout(&lop(&args));
    let mut structured = args.to_vec();
    structured.extend(["--format", "structured"]);
    let v: serde_json::Value = serde_json::from_slice(&lop(&structured).stdout).unwrap();
    assert!(text.contains(&format!("frames checked: {}", v["frames_checked"])));
    assert!(text.contains(&format!("interpretations: {}", v["interpretations"])));
    for section in ["denotation", "valuation"] {
        for (k, val) in v["witness"][section].as_object().unwrap() {
            assert!(text.contains(&format!("{k} ↦ {}", val.as_str().unwrap())), "{k}\n{text}");
        }
    }
}

#[test]
fn exit_statuses_over_the_corpus() {
    let dir = root().join("corpus");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(code(&lop(&["prove", path.to_str().unwrap()])), 0, "{}", path.display());

        let tmp = tempfile::tempdir().unwrap();
        let broken = tmp.path().join("broken.prf");
        let last = text.trim_end().rfind('\n').map_or(0, |i| i + 1);
        let (head, tail) = text.trim_end().split_at(last);
        let (formula, just) = tail.split_once(';').unwrap();
        let dot = formula.find('.').unwrap();
        let negated = format!("{}{}!({}) ;{}\n", head, &formula[..=dot], formula[dot + 1..].trim(), just);
        std::fs::write(&broken, negated).unwrap();
        let o = lop(&["prove", broken.to_str().unwrap()]);
        assert_eq!(code(&o), 1, "{}: {}", path.display(), stdout(&o));

        let garbled = tmp.path().join("garbled.prf");
        std::fs::write(&garbled, text.replacen(';', "", 1)).unwrap();
        let o = lop(&["prove", garbled.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{}", path.display());
        assert!(String::from_utf8_lossy(&o.stderr).contains("garbled.prf:"));
        n += 1;
    }
    assert!(n >= 20);
    assert_eq!(code(&lop(&["suite", "corpus"])), 0);
}

#[test]
fn usage_and_input_errors() {
    let o = lop(&["frobnicate"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Exit status"));
    assert_eq!(code(&lop(&["prove", "corpus/missing.prf"])), 2);
    assert_eq!(code(&lop(&["parse", "P^<e1>(x^e2)"])), 2);
    let o = lop(&["parse", "forall x^e1 . P^<e1>(x"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:23"));
    assert_eq!(code(&lop(&["validity", "--M", "0", UNIVERSAL])), 2);
    assert_eq!(code(&lop(&["validity", "--depth", "1", "F^<<e1>>(P^<e1>)"])), 2);
}

#[test]
fn bounds_come_from_the_environment() {
    let run = |env: &str, extra: &[&str]| {
        let mut args = vec!["validity", "P^<e1>(c^e1) -> P(c)"];
        args.extend(extra);
        Command::new(env!("CARGO_BIN_EXE_lop"))
            .args(&args)
            .env("LOP_BOUNDS", env)
            .output()
            .unwrap()
    };
    let o = run("1,1,1,standard", &[]);
    assert!(stdout(&o).contains("n_m <= 1, |M| <= 1, depth <= 1, standard frames"));
    let o = run("1,1,1,standard", &["--nm", "2"]);
    assert!(stdout(&o).contains("n_m <= 2, |M| <= 1"));
    assert_eq!(code(&run("1,1", &[])), 2);
}

#[test]
fn qset_and_permtest() {
    let o = lop(&["qset", "qset{ pure: {s: 2}, classical: [] }", "--power"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("2 x qset{ pure: {s: 1}, classical: [] }"));
    let o = lop(&["qset", "qset{ pure: {s: 2}, classical: [] }", "--compare", "qset{ pure: {t: 2}, classical: [] }"]);
    assert_eq!(code(&o), 1);
    let o = lop(&["permtest", "--trials", "50", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("failures: 0"));
}
