mod common;

use common::corpus;
use lop_core::proof::{check_proof, parse_proof, print_proof, Justification};

#[test]
fn every_corpus_proof_is_accepted() {
    let all = corpus();
    assert!(all.len() >= 20);
    for (name, p) in &all {
        let v = check_proof(p);
        assert!(v.is_accepted(), "{name}: {v}");
    }
}

#[test]
fn corpus_covers_every_justification() {
    let all = corpus();
    let used = |pred: &dyn Fn(&Justification) -> bool| {
        all.iter().any(|(_, p)| p.lines.iter().any(|l| pred(&l.justification)))
    };
    assert!(used(&|j| matches!(j, Justification::A1)));
    assert!(used(&|j| matches!(j, Justification::A2)));
    assert!(used(&|j| matches!(j, Justification::A3)));
    assert!(used(&|j| matches!(j, Justification::A4)));
    assert!(used(&|j| matches!(j, Justification::Choice)));
    assert!(used(&|j| matches!(j, Justification::Premise(_))));
    assert!(used(&|j| matches!(j, Justification::MP(..))));
    assert!(used(&|j| matches!(j, Justification::Gen(..))));
    assert!(used(&|j| matches!(j, Justification::DefEq(_))));
}

#[test]
fn identity_reflexivity_has_four_lines() {
    let (_, p) = corpus().into_iter().find(|(n, _)| n == "identity_refl.prf").unwrap();
    assert_eq!(check_proof(&p).to_string(), "accepted (4 lines)");
}

#[test]
fn canonical_printing_round_trips() {
    for (name, p) in corpus() {
        let again = parse_proof(&print_proof(&p)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(again, p, "{name}");
    }
}
