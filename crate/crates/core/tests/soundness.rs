use std::path::PathBuf;
use std::time::Instant;

use lop_core::model::{bounded_validity, Bounds, FrameKind, SearchOptions};
use lop_core::proof::{check_proof, parse_proof};

#[test]
fn corpus_theorems_hold_in_symmetric_frames() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    for path in paths {
        let p = parse_proof(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(check_proof(&p).is_accepted());
        let opts = SearchOptions {
            premises: p.premises.clone(),
            ..SearchOptions::default()
        };
        let bounds = Bounds {
            n_m: 3,
            classical: 2,
            depth: 2,
            kind: FrameKind::Symmetric,
        };
        let t = Instant::now();
        let r = bounded_validity(p.conclusion().unwrap(), &bounds, &opts).unwrap();
        println!(
            "{}: frames {} interpretations {} skipped {} {:?}",
            path.display(),
            r.frames_checked,
            r.interpretations,
            r.skipped.len(),
            t.elapsed()
        );
        assert!(r.witness.is_none(), "{}", path.display());
        assert!(!r.incomplete(), "{}: {:?}", path.display(), r.skipped);
    }
}
