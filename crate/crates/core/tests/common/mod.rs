#![allow(dead_code)]

use std::path::PathBuf;

use lop_core::lang::Formula;
use lop_core::proof::{parse_proof, Justification, Proof};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every bundled proof, sorted by file name.
pub fn corpus() -> Vec<(String, Proof)> {
    let mut out: Vec<(String, Proof)> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "prf"))
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let proof = parse_proof(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, proof)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

const AXIOMS: [Justification; 5] = [
    Justification::A1,
    Justification::A2,
    Justification::A3,
    Justification::A4,
    Justification::Choice,
];

/// Single-line mutants of `p`: each line negated, and each justification
/// replaced by a different one of the same family.
pub fn mutants(p: &Proof) -> Vec<(String, Proof)> {
    let mut out = Vec::new();
    for k in 0..p.lines.len() {
        let mut m = p.clone();
        m.lines[k].formula = Formula::not(m.lines[k].formula.clone());
        out.push((format!("line {} negated", k + 1), m));

        let j = &p.lines[k].justification;
        let replacements: Vec<Justification> = match j {
            Justification::A1
            | Justification::A2
            | Justification::A3
            | Justification::A4
            | Justification::Choice => AXIOMS.iter().filter(|a| *a != j).cloned().collect(),
            Justification::MP(a, b) => {
                vec![Justification::MP(*b, *a), Justification::MP(*a, *a)]
            }
            Justification::Premise(_) => vec![Justification::A1, Justification::Premise(p.premises.len() + 1)],
            Justification::Gen(i, v) => vec![Justification::Gen(*i, v.renamed(&format!("{}_", v.name)))],
            Justification::DefEq(_) => vec![Justification::DefEq(k + 1), Justification::Premise(p.premises.len() + 1)],
        };
        for r in replacements {
            let mut m = p.clone();
            m.lines[k].justification = r.clone();
            out.push((format!("line {}: {j} -> {r}", k + 1), m));
        }
    }
    out
}
