mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lop_core::gen::{random_closed_formula, random_frame, random_interpretation, Signature};
use lop_core::lang::{
    classify, desugar, free_variables, parse_formula, parse_formula_file, parse_type, print_formula, Formula,
};
use lop_core::model::{
    bounded_satisfiability, bounded_validity, is_true, permutation_invariance_check, satisfies, Bounds, FrameDesc,
    FrameKind, SearchOptions, SearchReport, DEFAULT_DOMAIN_BUDGET,
};
use lop_core::proof::{check_proof, parse_proof, Proof, Verdict};
use lop_core::qset::{indist, parse_qset, power_profile, quasi_cardinal};

use report::*;

const GRAMMAR: &str = "\
Formulas:
  type    := e1 | e2 | <type, ...>
  term    := name[^type]            annotate a free name on first use
  formula := formula <-> formula | formula -> formula | formula | formula
           | formula & formula | !formula | forall x^type . formula
           | exists x^type . formula | term(term, ...) | term = term
  Free names starting with u-z or U-Z are variables, others constants.
  Identity is undefined at type e1.
Proof scripts:
  premises:            optional block, one formula per line
  n. formula ; JUST    JUST := A1 | A2 | A3 | A4 | CHOICE | PREM k | MP i j
                               | GEN i x | DEFEQ i
Quasi-sets:
  qset{ pure: {s: 3, t: 1}, classical: [\"a\", qset{...}] }
Bounds:
  --nm N --M N --depth N --kind standard|symmetric, or
  LOP_BOUNDS=\"nm,M,depth,kind\" (default 3,2,2,symmetric)
Exit status: 0 success, 1 rejected or counterexample, 2 usage or input error.";

#[derive(Parser)]
#[command(
    name = "lop",
    version,
    about = "Workbench for the higher-order logic of opaque predicates",
    after_long_help = GRAMMAR
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Append the elapsed time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type-check formulas; print canonical and desugared forms.
    Parse {
        formulas: Vec<String>,
        /// Formula file, one formula per line.
        #[arg(short, long)]
        file: Option<PathBuf>,
    },
    /// Decide whether a relation type is opaque.
    Classify {
        #[arg(value_name = "TYPE")]
        ty: String,
    },
    /// Check proof scripts.
    Prove {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Evaluate a formula in a frame description (JSON).
    Eval {
        #[arg(long)]
        frame: PathBuf,
        formula: String,
        #[arg(long, default_value_t = DEFAULT_DOMAIN_BUDGET)]
        budget: usize,
    },
    /// Search bounded frames for a counterexample (or, with --satisfiable, a model).
    Validity {
        formula: String,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Only interpretations where this formula is true are searched.
        #[arg(long = "premise")]
        premises: Vec<String>,
        #[arg(long)]
        satisfiable: bool,
        #[arg(long, value_enum, default_value_t = Identity::Definition)]
        identity: Identity,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print a quasi-set, its quasi-cardinal and optionally its power profile.
    Qset {
        qset: String,
        #[arg(long)]
        power: bool,
        /// Compare with another quasi-set for indistinguishability.
        #[arg(long)]
        compare: Option<String>,
    },
    /// Check that random atom permutations never change the truth of random closed formulas.
    Permtest {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        nm: usize,
        #[arg(long = "M", default_value_t = 2)]
        classical: usize,
        #[arg(long, default_value_t = 4)]
        formula_depth: usize,
        /// Restrict to one frame kind; both are used by default.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Check every proof in a directory and search for counterexamples to each conclusion.
    Suite {
        #[arg(default_value = "corpus")]
        dir: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    nm: Option<usize>,
    #[arg(long = "M")]
    classical: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Default bounds as `nm,M,depth,kind`.
    #[arg(long = "bounds", env = "LOP_BOUNDS", hide_env_values = true)]
    defaults: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    /// Largest domain size built.
    #[arg(long, default_value_t = DEFAULT_DOMAIN_BUDGET)]
    budget: usize,
    /// Frames needing more denotations than this are skipped.
    #[arg(long, default_value_t = 1 << 22)]
    max_denotations: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Standard,
    Symmetric,
}

impl From<Kind> for FrameKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Standard => FrameKind::Standard,
            Kind::Symmetric => FrameKind::Symmetric,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Identity {
    /// Leibniz identity, by expanding the definition.
    Definition,
    /// The pseudo-diagonal of indistinguishable pairs.
    PseudoDiagonal,
}

/// An input error: exit status 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn at(path: &Path, e: impl std::fmt::Display) -> InputError {
    InputError(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| at(path, e))
}

fn formula(src: &str) -> Result<Formula, InputError> {
    parse_formula(src).map_err(|e| InputError(format!("formula `{src}`: {e}")))
}

impl BoundsArgs {
    fn resolve(&self) -> Result<Bounds, InputError> {
        let mut b = Bounds::default();
        if let Some(spec) = &self.defaults {
            let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
            let bad = || InputError(format!("bounds `{spec}`: expected nm,M,depth,kind"));
            if parts.len() != 4 {
                return Err(bad());
            }
            b.n_m = parts[0].parse().map_err(|_| bad())?;
            b.classical = parts[1].parse().map_err(|_| bad())?;
            b.depth = parts[2].parse().map_err(|_| bad())?;
            b.kind = Kind::from_str(parts[3], true).map_err(|_| bad())?.into();
        }
        b.n_m = self.nm.unwrap_or(b.n_m);
        b.classical = self.classical.unwrap_or(b.classical);
        b.depth = self.depth.unwrap_or(b.depth);
        if let Some(k) = self.kind {
            b.kind = k.into();
        }
        if b.classical == 0 {
            return Err(InputError("--M must be at least 1".into()));
        }
        Ok(b)
    }
}

fn bounds_report(b: &Bounds) -> BoundsReport {
    BoundsReport {
        n_m: b.n_m,
        classical: b.classical,
        depth: b.depth,
        kind: b.kind,
    }
}

fn skipped(r: &SearchReport) -> Vec<Skipped> {
    r.skipped
        .iter()
        .map(|s| Skipped {
            n_m: s.n_m,
            classical: s.classical,
            reason: s.reason.clone(),
        })
        .collect()
}

fn parse_cmd(formulas: &[String], file: Option<&Path>) -> Result<ParseBody, InputError> {
    let mut all = Vec::new();
    if let Some(path) = file {
        all.extend(parse_formula_file(&read(path)?).map_err(|e| at(path, e))?);
    }
    for src in formulas {
        all.push(formula(src)?);
    }
    if all.is_empty() {
        return Err(InputError("no formulas given".into()));
    }
    let strings = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>();
    Ok(ParseBody {
        formulas: all
            .iter()
            .map(|f| ParsedFormula {
                canonical: print_formula(f),
                desugared: print_formula(&desugar(f)),
                free_variables: strings(&mut free_variables(f).iter().map(|t| t.to_string())),
                constants: strings(&mut f.constants().iter().map(|t| t.to_string())),
                types: strings(&mut f.types().iter().map(|t| t.to_string())),
            })
            .collect(),
    })
}

fn classify_cmd(src: &str) -> Result<ClassifyBody, InputError> {
    let t = parse_type(src).map_err(|e| InputError(format!("type `{src}`: {e}")))?;
    let c = classify(&t)?;
    Ok(ClassifyBody {
        ty: t.to_string(),
        opaque: c.is_ok(),
        reason: c.err().map(|e| e.to_string()),
    })
}

fn proof_report(file: &Path, p: &Proof, v: &Verdict) -> ProofReport {
    let (premises_used, rejected_line, reason) = match v {
        Verdict::Accepted { premises_used, .. } => (premises_used.iter().copied().collect(), None, None),
        Verdict::Rejected { line, reason } => (Vec::new(), Some(*line), Some(reason.clone())),
    };
    ProofReport {
        file: file.display().to_string(),
        verdict: v.to_string(),
        accepted: v.is_accepted(),
        premises: p.premises.iter().map(print_formula).collect(),
        lines: p
            .lines
            .iter()
            .enumerate()
            .map(|(k, l)| LineReport {
                number: k + 1,
                formula: print_formula(&l.formula),
                justification: l.justification.to_string(),
            })
            .collect(),
        premises_used,
        rejected_line,
        reason,
    }
}

fn load_proof(path: &Path) -> Result<Proof, InputError> {
    parse_proof(&read(path)?).map_err(|e| at(path, e))
}

fn prove_cmd(files: &[PathBuf]) -> Result<ProveBody, InputError> {
    let proofs = files.iter().map(|f| load_proof(f)).collect::<Result<Vec<_>, _>>()?;
    Ok(ProveBody {
        proofs: files
            .iter()
            .zip(&proofs)
            .map(|(f, p)| proof_report(f, p, &check_proof(p)))
            .collect(),
    })
}

fn eval_cmd(frame: &Path, src: &str, budget: usize) -> Result<EvalBody, InputError> {
    let f = formula(src)?;
    let d = desugar(&f);
    let desc = FrameDesc::from_json(&read(frame)?).map_err(|e| at(frame, e))?;
    let loaded = desc.load_with_types(&d.types(), budget).map_err(|e| at(frame, e))?;
    let free = free_variables(&f);
    let valued: Vec<_> = loaded.valuation.terms().cloned().collect();
    let complete = free.iter().all(|v| valued.contains(v));
    let reading = |identity: &'static str, g: &Formula| -> Result<Reading, InputError> {
        Ok(Reading {
            identity,
            holds: if complete {
                Some(satisfies(&loaded.interpretation, &loaded.valuation, g)?)
            } else {
                None
            },
            true_in_interpretation: is_true(&loaded.interpretation, g)?,
        })
    };
    let readings = vec![reading("definition", &d)?, reading("pseudo-diagonal", &f)?];
    let readings_differ = readings[0].holds != readings[1].holds
        || readings[0].true_in_interpretation != readings[1].true_in_interpretation;
    Ok(EvalBody {
        frame: frame.display().to_string(),
        formula: print_formula(&f),
        free_variables: free.iter().map(|t| t.to_string()).collect(),
        readings,
        readings_differ,
    })
}

fn search_options(search: &SearchArgs, premises: Vec<Formula>, identity: Identity) -> SearchOptions {
    SearchOptions {
        domain_budget: search.budget,
        max_denotations: search.max_denotations,
        premises,
        desugar: identity == Identity::Definition,
    }
}

fn validity_cmd(
    src: &str,
    bounds: &BoundsArgs,
    premises: &[String],
    satisfiable: bool,
    identity: Identity,
    search: &SearchArgs,
) -> Result<ValidityBody, InputError> {
    let f = formula(src)?;
    let premises = premises.iter().map(|p| formula(p)).collect::<Result<Vec<_>, _>>()?;
    let b = bounds.resolve()?;
    let opts = search_options(search, premises.clone(), identity);
    let r = if satisfiable {
        bounded_satisfiability(&f, &b, &opts)?
    } else {
        bounded_validity(&f, &b, &opts)?
    };
    let witness = r
        .witness
        .as_ref()
        .map(|w| FrameDesc::describe(&w.interpretation, &w.valuation))
        .transpose()?;
    let result = match (satisfiable, witness.is_some()) {
        (false, true) => "counterexample",
        (false, false) => "no counterexample",
        (true, true) => "satisfiable",
        (true, false) => "unsatisfiable",
    };
    Ok(ValidityBody {
        mode: if satisfiable { "satisfiability" } else { "validity" },
        formula: print_formula(&f),
        premises: premises.iter().map(print_formula).collect(),
        bounds: bounds_report(&b),
        identity: match identity {
            Identity::Definition => "definition",
            Identity::PseudoDiagonal => "pseudo-diagonal",
        },
        frames_checked: r.frames_checked,
        interpretations: r.interpretations,
        skipped: skipped(&r),
        complete: !r.incomplete(),
        result,
        witness,
    })
}

fn qset_cmd(src: &str, power: bool, compare: Option<&str>) -> Result<QsetBody, InputError> {
    let q = parse_qset(src).map_err(|e| InputError(format!("qset `{src}`: {e}")))?;
    let power_profile = if power {
        Some(
            power_profile(&q)?
                .entries()
                .map(|(shape, count)| ProfileEntry {
                    shape: shape.to_string(),
                    count,
                })
                .collect(),
        )
    } else {
        None
    };
    let comparison = compare
        .map(|o| -> Result<Comparison, InputError> {
            let other = parse_qset(o).map_err(|e| InputError(format!("qset `{o}`: {e}")))?;
            Ok(Comparison {
                other: other.to_string(),
                indistinguishable: indist(&q, &other),
            })
        })
        .transpose()?;
    Ok(QsetBody {
        canonical: q.to_string(),
        quasi_cardinal: quasi_cardinal(&q),
        pure: q.is_pure(),
        power_profile,
        comparison,
    })
}

fn permtest_cmd(
    trials: usize,
    seed: u64,
    n_m: usize,
    classical: usize,
    formula_depth: usize,
    kind: Option<Kind>,
) -> Result<PermtestBody, InputError> {
    if classical == 0 {
        return Err(InputError("--M must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = Signature::small();
    let types = sig.types();
    let mut body = PermtestBody {
        seed,
        trials,
        failures: 0,
        standard_frames: 0,
        symmetric_frames: 0,
        n_m,
        classical,
        formula_depth,
        first_failure: None,
    };
    let mut done = 0;
    while done < trials {
        let k = match kind {
            Some(k) => FrameKind::from(k),
            None if done % 2 == 0 => FrameKind::Standard,
            None => FrameKind::Symmetric,
        };
        let frame = random_frame(&mut rng, n_m, classical, k, &types)?;
        let f = random_closed_formula(&mut rng, &sig, formula_depth);
        let i = random_interpretation(&mut rng, &frame, f.constants())?;
        if f.constants().iter().any(|c| i.denotation(c).is_none()) {
            continue;
        }
        if !permutation_invariance_check(&i, &f, 1, &mut rng)? {
            body.failures += 1;
            body.first_failure.get_or_insert_with(|| print_formula(&f));
        }
        match k {
            FrameKind::Standard => body.standard_frames += 1,
            _ => body.symmetric_frames += 1,
        }
        done += 1;
    }
    Ok(body)
}

fn suite_cmd(dir: &Path, bounds: &BoundsArgs, search: &SearchArgs) -> Result<SuiteBody, InputError> {
    let b = bounds.resolve()?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| at(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "prf"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(at(dir, "no .prf files"));
    }
    let mut proofs = Vec::new();
    for file in &files {
        let p = load_proof(file)?;
        let v = check_proof(&p);
        let conclusion = p.conclusion().ok_or_else(|| at(file, "empty proof"))?;
        let opts = search_options(search, p.premises.clone(), Identity::Definition);
        let r = bounded_validity(conclusion, &b, &opts).map_err(|e| at(file, e))?;
        let counterexample = r
            .witness
            .as_ref()
            .map(|w| FrameDesc::describe(&w.interpretation, &w.valuation))
            .transpose()?;
        proofs.push(SuiteEntry {
            file: file.display().to_string(),
            verdict: v.to_string(),
            accepted: v.is_accepted(),
            frames_checked: r.frames_checked,
            interpretations: r.interpretations,
            skipped: r.skipped.len(),
            counterexample,
        });
    }
    Ok(SuiteBody {
        bounds: bounds_report(&b),
        accepted: proofs.iter().filter(|e| e.accepted).count(),
        without_counterexample: proofs.iter().filter(|e| e.counterexample.is_none()).count(),
        proofs,
    })
}

fn emit<B: Body>(cli: &Cli, name: &str, start: Instant, body: Result<B, InputError>) -> ExitCode {
    match body {
        Ok(b) => {
            let elapsed = cli.timing.then(|| start.elapsed());
            print!("{}", render(name, &b, cli.format, elapsed));
            ExitCode::from(b.exit_code())
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            eprintln!("\n{GRAMMAR}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    match &cli.command {
        Command::Parse { formulas, file } => emit(&cli, "parse", start, parse_cmd(formulas, file.as_deref())),
        Command::Classify { ty } => emit(&cli, "classify", start, classify_cmd(ty)),
        Command::Prove { files } => emit(&cli, "prove", start, prove_cmd(files)),
        Command::Eval { frame, formula, budget } => emit(&cli, "eval", start, eval_cmd(frame, formula, *budget)),
        Command::Validity {
            formula,
            bounds,
            premises,
            satisfiable,
            identity,
            search,
        } => emit(
            &cli,
            "validity",
            start,
            validity_cmd(formula, bounds, premises, *satisfiable, *identity, search),
        ),
        Command::Qset { qset, power, compare } => {
            emit(&cli, "qset", start, qset_cmd(qset, *power, compare.as_deref()))
        }
        Command::Permtest {
            trials,
            seed,
            nm,
            classical,
            formula_depth,
            kind,
        } => emit(
            &cli,
            "permtest",
            start,
            permtest_cmd(*trials, *seed, *nm, *classical, *formula_depth, *kind),
        ),
        Command::Suite { dir, bounds, search } => emit(&cli, "suite", start, suite_cmd(dir, bounds, search)),
    }
}
