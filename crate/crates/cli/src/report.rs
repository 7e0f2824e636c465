//! Reports in text and structured (JSON) form.
//!
//! Every structured report is an object with `version`, `command` and
//! `status` members followed by the command's own fields. Text reports carry
//! the same fields in a fixed order.

use std::fmt::Write;
use std::time::Duration;

use serde::Serialize;

use lop_core::model::FrameDesc;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

pub trait Body: Serialize {
    fn status(&self) -> &'static str;
    /// Exit status: 0 on success, 1 on rejection or counterexample.
    fn exit_code(&self) -> u8;
    fn text(&self, out: &mut String);
}

#[derive(Serialize)]
struct Envelope<'a, B: Serialize> {
    version: u32,
    command: &'a str,
    status: &'a str,
    #[serde(flatten)]
    body: &'a B,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

pub fn render<B: Body>(command: &str, body: &B, format: Format, elapsed: Option<Duration>) -> String {
    let elapsed_ms = elapsed.map(|d| d.as_secs_f64() * 1e3);
    match format {
        Format::Structured => {
            let env = Envelope {
                version: REPORT_VERSION,
                command,
                status: body.status(),
                body,
                elapsed_ms,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            body.text(&mut s);
            if let Some(ms) = elapsed_ms {
                let _ = writeln!(s, "time: {ms:.3} ms");
            }
            s
        }
    }
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        "none".into()
    } else {
        items.join(", ")
    }
}

#[derive(Serialize)]
pub struct ParsedFormula {
    pub canonical: String,
    pub desugared: String,
    pub free_variables: Vec<String>,
    pub constants: Vec<String>,
    pub types: Vec<String>,
}

#[derive(Serialize)]
pub struct ParseBody {
    pub formulas: Vec<ParsedFormula>,
}

impl Body for ParseBody {
    fn status(&self) -> &'static str {
        "ok"
    }

    fn exit_code(&self) -> u8 {
        0
    }

    fn text(&self, out: &mut String) {
        for f in &self.formulas {
            let _ = writeln!(out, "{}", f.canonical);
            let _ = writeln!(out, "  desugared: {}", f.desugared);
            let _ = writeln!(out, "  free variables: {}", list(&f.free_variables));
            let _ = writeln!(out, "  constants: {}", list(&f.constants));
            let _ = writeln!(out, "  types: {}", list(&f.types));
        }
    }
}

#[derive(Serialize)]
pub struct ClassifyBody {
    #[serde(rename = "type")]
    pub ty: String,
    pub opaque: bool,
    pub reason: Option<String>,
}

impl Body for ClassifyBody {
    fn status(&self) -> &'static str {
        if self.opaque {
            "opaque"
        } else {
            "not opaque"
        }
    }

    fn exit_code(&self) -> u8 {
        u8::from(!self.opaque)
    }

    fn text(&self, out: &mut String) {
        let _ = writeln!(out, "type: {}", self.ty);
        let _ = writeln!(out, "{}", self.reason.as_deref().unwrap_or("opaque"));
    }
}

#[derive(Serialize)]
pub struct LineReport {
    pub number: usize,
    pub formula: String,
    pub justification: String,
}

#[derive(Serialize)]
pub struct ProofReport {
    pub file: String,
    pub verdict: String,
    pub accepted: bool,
    pub premises: Vec<String>,
    pub lines: Vec<LineReport>,
    pub premises_used: Vec<usize>,
    pub rejected_line: Option<usize>,
    pub reason: Option<String>,
}

#[derive(Serialize)]
pub struct ProveBody {
    pub proofs: Vec<ProofReport>,
}

impl Body for ProveBody {
    fn status(&self) -> &'static str {
        if self.proofs.iter().all(|p| p.accepted) {
            "accepted"
        } else {
            "rejected"
        }
    }

    fn exit_code(&self) -> u8 {
        u8::from(!self.proofs.iter().all(|p| p.accepted))
    }

    fn text(&self, out: &mut String) {
        for p in &self.proofs {
            let _ = writeln!(out, "{}: {}", p.file, p.verdict);
            for (k, f) in p.premises.iter().enumerate() {
                let _ = writeln!(out, "  premise {}. {f}", k + 1);
            }
            for l in &p.lines {
                let mark = if p.rejected_line == Some(l.number) { " <-- rejected" } else { "" };
                let _ = writeln!(out, "  {}. {} ; {}{mark}", l.number, l.formula, l.justification);
            }
            if p.accepted && !p.premises.is_empty() {
                let used: Vec<String> = p.premises_used.iter().map(|k| k.to_string()).collect();
                let _ = writeln!(out, "  conclusion depends on premises: {}", list(&used));
            }
        }
    }
}

#[derive(Serialize)]
pub struct Reading {
    pub identity: &'static str,
    /// Truth under the valuation of the description, when it values every
    /// free variable.
    pub holds: Option<bool>,
    pub true_in_interpretation: bool,
}

#[derive(Serialize)]
pub struct EvalBody {
    pub frame: String,
    pub formula: String,
    pub free_variables: Vec<String>,
    pub readings: Vec<Reading>,
    pub readings_differ: bool,
}

impl EvalBody {
    fn verdict(&self) -> bool {
        let r = &self.readings[0];
        r.holds.unwrap_or(r.true_in_interpretation)
    }
}

impl Body for EvalBody {
    fn status(&self) -> &'static str {
        if self.verdict() {
            "true"
        } else {
            "false"
        }
    }

    fn exit_code(&self) -> u8 {
        u8::from(!self.verdict())
    }

    fn text(&self, out: &mut String) {
        let _ = writeln!(out, "frame: {}", self.frame);
        let _ = writeln!(out, "formula: {}", self.formula);
        let _ = writeln!(out, "free variables: {}", list(&self.free_variables));
        for r in &self.readings {
            let holds = r.holds.map_or("n/a".to_string(), |b| b.to_string());
            let _ = writeln!(
                out,
                "identity by {}: under valuation {holds}, true in interpretation {}",
                r.identity, r.true_in_interpretation
            );
        }
        if self.readings_differ {
            let _ = writeln!(out, "the two readings of identity disagree");
        }
    }
}

#[derive(Serialize, Clone, Copy)]
pub struct BoundsReport {
    pub n_m: usize,
    #[serde(rename = "M")]
    pub classical: usize,
    pub depth: usize,
    pub kind: lop_core::model::FrameKind,
}

impl BoundsReport {
    fn text(&self) -> String {
        format!(
            "n_m <= {}, |M| <= {}, depth <= {}, {} frames",
            self.n_m,
            self.classical,
            self.depth,
            serde_json::to_value(self.kind).unwrap().as_str().unwrap()
        )
    }
}

#[derive(Serialize)]
pub struct Skipped {
    pub n_m: usize,
    #[serde(rename = "M")]
    pub classical: usize,
    pub reason: String,
}

#[derive(Serialize)]
pub struct ValidityBody {
    pub mode: &'static str,
    pub formula: String,
    pub premises: Vec<String>,
    pub bounds: BoundsReport,
    pub identity: &'static str,
    pub frames_checked: usize,
    pub interpretations: u64,
    pub skipped: Vec<Skipped>,
    pub complete: bool,
    pub result: &'static str,
    /// The counterexample (validity) or model (satisfiability); loadable as
    /// a frame description.
    pub witness: Option<FrameDesc>,
}

fn witness_text(out: &mut String, label: &str, w: &FrameDesc) {
    let _ = writeln!(out, "{label}:");
    let species: Vec<String> = w.m.iter().map(|(s, n)| format!("{s}: {n}")).collect();
    let _ = writeln!(out, "  m-atoms: {}", list(&species));
    let _ = writeln!(out, "  M: [{}]", w.classical.join(", "));
    let _ = writeln!(out, "  kind: {}", serde_json::to_value(w.kind).unwrap().as_str().unwrap());
    let _ = writeln!(out, "  types: {}", list(&w.types));
    for (t, r) in &w.relations {
        let _ = writeln!(out, "  relations {t}: {}", serde_json::to_string(r).unwrap());
    }
    let _ = writeln!(out, "  denotation:");
    if w.denotation.is_empty() {
        let _ = writeln!(out, "    none");
    }
    for (c, v) in &w.denotation {
        let _ = writeln!(out, "    {c} ↦ {v}");
    }
    let _ = writeln!(out, "  valuation:");
    if w.valuation.is_empty() {
        let _ = writeln!(out, "    none");
    }
    for (x, v) in &w.valuation {
        let _ = writeln!(out, "    {x} ↦ {v}");
    }
}

impl Body for ValidityBody {
    fn status(&self) -> &'static str {
        self.result
    }

    fn exit_code(&self) -> u8 {
        let found = self.witness.is_some();
        u8::from(if self.mode == "validity" { found } else { !found })
    }

    fn text(&self, out: &mut String) {
        let _ = writeln!(out, "{}: {}", self.mode, self.formula);
        for (k, p) in self.premises.iter().enumerate() {
            let _ = writeln!(out, "premise {}: {p}", k + 1);
        }
        let _ = writeln!(out, "bounds: {}", self.bounds.text());
        let _ = writeln!(out, "identity: {}", self.identity);
        let _ = writeln!(out, "frames checked: {}", self.frames_checked);
        let _ = writeln!(out, "interpretations: {}", self.interpretations);
        for s in &self.skipped {
            let _ = writeln!(out, "skipped frame n_m = {}, |M| = {}: {}", s.n_m, s.classical, s.reason);
        }
        let _ = writeln!(out, "complete: {}", self.complete);
        let _ = writeln!(out, "result: {}", self.result);
        if let Some(w) = &self.witness {
            let label = if self.mode == "validity" { "counterexample" } else { "model" };
            witness_text(out, label, w);
        }
    }
}

#[derive(Serialize)]
pub struct ProfileEntry {
    pub shape: String,
    pub count: u64,
}

#[derive(Serialize)]
pub struct Comparison {
    pub other: String,
    pub indistinguishable: bool,
}

#[derive(Serialize)]
pub struct QsetBody {
    pub canonical: String,
    pub quasi_cardinal: u64,
    pub pure: bool,
    pub power_profile: Option<Vec<ProfileEntry>>,
    pub comparison: Option<Comparison>,
}

impl Body for QsetBody {
    fn status(&self) -> &'static str {
        match &self.comparison {
            Some(c) if !c.indistinguishable => "distinguishable",
            _ => "ok",
        }
    }

    fn exit_code(&self) -> u8 {
        u8::from(self.comparison.as_ref().is_some_and(|c| !c.indistinguishable))
    }

    fn text(&self, out: &mut String) {
        let _ = writeln!(out, "{}", self.canonical);
        let _ = writeln!(out, "quasi-cardinal: {}", self.quasi_cardinal);
        let _ = writeln!(out, "pure: {}", self.pure);
        if let Some(p) = &self.power_profile {
            let _ = writeln!(out, "power profile:");
            for e in p {
                let _ = writeln!(out, "  {} x {}", e.count, e.shape);
            }
        }
        if let Some(c) = &self.comparison {
            let rel = if c.indistinguishable { "≡" } else { "≢" };
            let _ = writeln!(out, "{rel} {}", c.other);
        }
    }
}

#[derive(Serialize)]
pub struct PermtestBody {
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    pub standard_frames: usize,
    pub symmetric_frames: usize,
    pub n_m: usize,
    #[serde(rename = "M")]
    pub classical: usize,
    pub formula_depth: usize,
    pub first_failure: Option<String>,
}

impl Body for PermtestBody {
    fn status(&self) -> &'static str {
        if self.failures == 0 {
            "ok"
        } else {
            "failed"
        }
    }

    fn exit_code(&self) -> u8 {
        u8::from(self.failures > 0)
    }

    fn text(&self, out: &mut String) {
        let _ = writeln!(out, "trials: {}", self.trials);
        let _ = writeln!(out, "failures: {}", self.failures);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(
            out,
            "frames: {} standard, {} symmetric, n_m <= {}, |M| <= {}",
            self.standard_frames, self.symmetric_frames, self.n_m, self.classical
        );
        let _ = writeln!(out, "formula depth: {}", self.formula_depth);
        if let Some(f) = &self.first_failure {
            let _ = writeln!(out, "first failure: {f}");
        }
    }
}

#[derive(Serialize)]
pub struct SuiteEntry {
    pub file: String,
    pub verdict: String,
    pub accepted: bool,
    pub frames_checked: usize,
    pub interpretations: u64,
    pub skipped: usize,
    pub counterexample: Option<FrameDesc>,
}

#[derive(Serialize)]
pub struct SuiteBody {
    pub bounds: BoundsReport,
    pub proofs: Vec<SuiteEntry>,
    pub accepted: usize,
    pub without_counterexample: usize,
}

impl SuiteBody {
    fn ok(&self) -> bool {
        self.accepted == self.proofs.len() && self.without_counterexample == self.proofs.len()
    }
}

impl Body for SuiteBody {
    fn status(&self) -> &'static str {
        if self.ok() {
            "ok"
        } else {
            "failed"
        }
    }

    fn exit_code(&self) -> u8 {
        u8::from(!self.ok())
    }

    fn text(&self, out: &mut String) {
        let _ = writeln!(out, "bounds: {}", self.bounds.text());
        for e in &self.proofs {
            let sound = if e.counterexample.is_some() { "COUNTEREXAMPLE" } else { "no counterexample" };
            let _ = writeln!(
                out,
                "{}: {}; {sound} ({} frames, {} interpretations, {} skipped)",
                e.file, e.verdict, e.frames_checked, e.interpretations, e.skipped
            );
            if let Some(w) = &e.counterexample {
                witness_text(out, "  counterexample", w);
            }
        }
        let _ = writeln!(
            out,
            "accepted: {}/{}; without counterexample: {}/{}",
            self.accepted,
            self.proofs.len(),
            self.without_counterexample,
            self.proofs.len()
        );
    }
}
