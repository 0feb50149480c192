//! The `shiq` command line. [`run_command`] does all the work and returns
//! the exit status with the captured output, so tests can drive it without
//! spawning processes.

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use shiq_core::format::{
    completion_tree_dot, domino_gen, parse_domino_system, parse_kb, si_tree_dot, trace_dot, witness_from_json,
    witness_to_json, KbDocument, Query,
};
use shiq_core::kb::{classify, internalise_sat, internalise_subsumes, Terminology};
use shiq_core::oracle::{find_model, unravel_witness, validate_tableau};
use shiq_core::shiq::validate_completion_tree;
use shiq_core::si::si_decide_sat_with;
use shiq_core::{Concept, EngineError, EngineOptions};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "shiq", version, about = "Satisfiability and subsumption for SHIQ and SI concepts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide satisfiability of a concept with respect to a knowledge base.
    Sat(SatArgs),
    /// Decide whether --super subsumes --sub.
    Subsumes(SubsumesArgs),
    /// Print the subsumption hierarchy of the defined names.
    Classify(ClassifyArgs),
    /// Decide an SI concept with the SI engine.
    SiSat(SiSatArgs),
    /// Check a stored witness and its bounded unravelling.
    Validate(ValidateArgs),
    /// Generate the grid encoding of a domino system.
    DominoGen(DominoArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Knowledge-base file.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Write a Graphviz rendering, as dot:FILE.
    #[arg(long, value_parser = parse_trace)]
    trace: Option<PathBuf>,
    /// Fix the order in which alternatives are explored.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EngineKind {
    Shiq,
    Si,
}

#[derive(Args, Debug)]
struct SatArgs {
    #[command(flatten)]
    common: Common,
    /// A defined name or an inline concept. Without it, every (sat ...)
    /// query of the knowledge base is answered.
    #[arg(long)]
    concept: Option<String>,
    #[arg(long, value_enum, default_value = "shiq")]
    engine: EngineKind,
    /// Also search for a model with at most N individuals.
    #[arg(long, value_name = "N")]
    oracle_max_domain: Option<usize>,
    /// Store the witness of a SAT answer as JSON.
    #[arg(long, value_name = "FILE")]
    witness: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SubsumesArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    sub: String,
    #[arg(long = "super")]
    sup: String,
    #[arg(long, value_name = "N")]
    oracle_max_domain: Option<usize>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    kb: PathBuf,
    /// Restrict to these defined names.
    #[arg(long)]
    concept: Vec<String>,
}

#[derive(Args, Debug)]
struct SiSatArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    concept: String,
    /// Use the depth-first reset–restart search (implied by --trace).
    #[arg(long)]
    depth_first: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Witness file written by `sat --witness`.
    #[arg(long)]
    witness: PathBuf,
    /// Depth of the unravelled prefix to check.
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

#[derive(Args, Debug)]
struct DominoArgs {
    /// Domino system: (tile NAME ...), (horizontal A B), (vertical A B).
    #[arg(long)]
    system: PathBuf,
    /// Write the knowledge base here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_trace(s: &str) -> Result<PathBuf, String> {
    match s.strip_prefix("dot:") {
        Some(path) if !path.is_empty() => Ok(PathBuf::from(path)),
        _ => Err(format!("expected dot:FILE, found {s}")),
    }
}

/// A failure that ends the command with status 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Run = Result<i32, Failure>;

struct Io {
    out: String,
    err: String,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(kb: &Option<PathBuf>) -> Result<KbDocument, Failure> {
    match kb {
        None => Ok(KbDocument::default()),
        Some(path) => parse_kb(&read(path)?).map_err(|e| Failure(format!("{}:{e}", path.display()))),
    }
}

/// Engine errors, with the source position of the offending number
/// restriction when the knowledge base has one.
fn engine_failure(doc: &KbDocument, kb: &Option<PathBuf>, e: EngineError) -> Failure {
    match (doc.locate(&e), kb) {
        (Some(pos), Some(path)) => Failure(format!("{}:{pos}: {e}", path.display())),
        (Some(pos), None) => Failure(format!("{pos}: {e}")),
        _ => Failure(e.to_string()),
    }
}

fn options(common: &Common) -> EngineOptions {
    EngineOptions {
        trace: common.trace.is_some(),
        seed: common.seed,
        ..Default::default()
    }
}

fn oracle_note(io: &mut Io, c: &Concept, t: &Terminology, max: usize, engine_sat: bool) -> Result<(), Failure> {
    let model = find_model(c, &t.rbox, Some(t), max)?;
    match model {
        Some(m) => {
            let _ = writeln!(io.err, "oracle: model with {} individuals", m.domain.len());
            if !engine_sat {
                return Err(Failure("oracle found a model of a concept the engine reports unsatisfiable".into()));
            }
        }
        None => {
            let _ = writeln!(io.err, "oracle: no model with at most {max} individuals");
        }
    }
    Ok(())
}

fn sat_shiq(io: &mut Io, args: &SatArgs, doc: &KbDocument, c: &Concept) -> Run {
    let t = doc.terminology();
    let p = internalise_sat(&t, c);
    let v = p.decide_with(&options(&args.common)).map_err(|e| engine_failure(doc, &args.common.kb, e))?;
    let _ = writeln!(io.out, "{}", v.answer);
    if let Some(max) = args.oracle_max_domain {
        oracle_note(io, c, &t, max, v.is_sat())?;
    }
    if let Some(path) = &args.common.trace {
        let dot = match &v.witness {
            Some(w) => completion_tree_dot(w),
            None => trace_dot(&v.trace),
        };
        write_file(path, &dot)?;
    }
    if let (Some(path), Some(w)) = (&args.witness, &v.witness) {
        write_file(path, &witness_to_json(w))?;
    }
    Ok(if v.is_sat() { EXIT_YES } else { EXIT_NO })
}

fn sat_si(io: &mut Io, common: &Common, doc: &KbDocument, c: &Concept, depth_first: bool) -> Run {
    if !doc.gcis.is_empty() {
        return Err(Failure("the SI engine does not take axioms; use the SHIQ engine".into()));
    }
    let opts = EngineOptions {
        trace: depth_first || common.trace.is_some(),
        seed: common.seed,
        ..Default::default()
    };
    let v = si_decide_sat_with(c, &doc.rbox(), &opts).map_err(|e| engine_failure(doc, &common.kb, e))?;
    let _ = writeln!(io.out, "{}", v.answer);
    if let Some(path) = &common.trace {
        let dot = match &v.witness {
            Some(w) => si_tree_dot(w, &v.trace),
            None => trace_dot(&v.trace),
        };
        write_file(path, &dot)?;
    }
    Ok(if v.is_sat() { EXIT_YES } else { EXIT_NO })
}

fn sat(io: &mut Io, args: &SatArgs) -> Run {
    let doc = load(&args.common.kb)?;
    let concepts: Vec<Concept> = match &args.concept {
        Some(text) => vec![doc.resolve(text)?],
        None => doc
            .queries
            .iter()
            .filter_map(|q| match q {
                Query::Sat(c) => Some(c.clone()),
                Query::Subsumes(..) => None,
            })
            .collect(),
    };
    if concepts.is_empty() {
        return Err(Failure("nothing to decide: give --concept or a (sat ...) query".into()));
    }
    let mut status = EXIT_YES;
    for c in &concepts {
        let s = match args.engine {
            EngineKind::Shiq => sat_shiq(io, args, &doc, c)?,
            EngineKind::Si => sat_si(io, &args.common, &doc, c, false)?,
        };
        status = status.max(s);
    }
    Ok(status)
}

fn subsumes(io: &mut Io, args: &SubsumesArgs) -> Run {
    let doc = load(&args.common.kb)?;
    let (c, d) = (doc.resolve(&args.sub)?, doc.resolve(&args.sup)?);
    let t = doc.terminology();
    let p = internalise_subsumes(&t, &c, &d);
    let v = p.decide_with(&options(&args.common)).map_err(|e| engine_failure(&doc, &args.common.kb, e))?;
    let holds = !v.is_sat();
    let _ = writeln!(io.out, "{}", if holds { "YES" } else { "NO" });
    if let Some(max) = args.oracle_max_domain {
        oracle_note(io, &Concept::and(c, Concept::not(d)), &t, max, v.is_sat())?;
    }
    if let Some(path) = &args.common.trace {
        let dot = match &v.witness {
            Some(w) => completion_tree_dot(w),
            None => trace_dot(&v.trace),
        };
        write_file(path, &dot)?;
    }
    Ok(if holds { EXIT_YES } else { EXIT_NO })
}

fn classify_cmd(io: &mut Io, args: &ClassifyArgs) -> Run {
    let doc = load(&Some(args.kb.clone()))?;
    let names: Vec<(String, Concept)> = if args.concept.is_empty() {
        doc.definitions.clone()
    } else {
        args.concept
            .iter()
            .map(|n| {
                doc.definition(n)
                    .map(|c| (n.clone(), c.clone()))
                    .ok_or_else(|| Failure(format!("no definition named {n}")))
            })
            .collect::<Result<_, _>>()?
    };
    if names.is_empty() {
        return Err(Failure("the knowledge base defines no names".into()));
    }
    let h = classify(&doc.terminology(), &names)?;
    io.out.push_str(&h.render());
    Ok(EXIT_YES)
}

fn validate(io: &mut Io, args: &ValidateArgs) -> Run {
    let (tree, d, rbox) = witness_from_json(&read(&args.witness)?)?;
    if let Err(v) = validate_completion_tree(&tree, &d, &rbox) {
        let _ = writeln!(io.out, "INVALID: {v}");
        return Ok(EXIT_NO);
    }
    let t = unravel_witness(&tree, &d, &rbox, args.depth)?;
    let report = validate_tableau(&t, &d, &rbox);
    if !report.is_valid() {
        let _ = write!(io.out, "INVALID unravelling:\n{report}");
        return Ok(EXIT_NO);
    }
    let _ = writeln!(
        io.out,
        "VALID: {} nodes, unravelled to depth {} with {} individuals",
        tree.len(),
        args.depth,
        t.len()
    );
    Ok(EXIT_YES)
}

fn domino(io: &mut Io, args: &DominoArgs) -> Run {
    let text = domino_gen(&parse_domino_system(&read(&args.system)?)?)?;
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => io.out.push_str(&text),
    }
    Ok(EXIT_YES)
}

/// Runs one command line; `argv[0]` is the program name.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let status = if e.use_stderr() { EXIT_ERROR } else { EXIT_YES };
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Outcome { status, stdout, stderr };
        }
    };
    let mut io = Io {
        out: String::new(),
        err: String::new(),
    };
    let result = match &cli.command {
        Command::Sat(a) => sat(&mut io, a),
        Command::Subsumes(a) => subsumes(&mut io, a),
        Command::Classify(a) => classify_cmd(&mut io, a),
        Command::SiSat(a) => load(&a.common.kb)
            .and_then(|doc| Ok((doc.resolve(&a.concept)?, doc)))
            .and_then(|(c, doc)| sat_si(&mut io, &a.common, &doc, &c, a.depth_first)),
        Command::Validate(a) => validate(&mut io, a),
        Command::DominoGen(a) => domino(&mut io, a),
    };
    let status = match result {
        Ok(s) => s,
        Err(Failure(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_ERROR
        }
    };
    Outcome {
        status,
        stdout: io.out,
        stderr: io.err,
    }
}
