use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use cyclic_mub::document::{generator_spec, SetDocument};
use cyclic_mub::entanglement::{annotate, class_partitions};
use cyclic_mub::fixtures::{self, GeneratorSpec};
use cyclic_mub::mub::{build_classes, validate_set, CyclicGenerator, CyclicMubSet};
use cyclic_mub::search::{find_triples, SearchKind, SearchQuery};
use cyclic_mub::sim::{conjugation_mismatch, verify_set_numeric, NumericReport, DEFAULT_TOL};
use cyclic_mub::synth::{circuit_symplectic, export_circuit, synth_field_based, synthesize};
use cyclic_mub::{Error, Gf2Matrix};

/// Numeric checks in `verify` run up to this many qubits.
const NUMERIC_MAX_N: usize = 8;
/// Exhaustive conjugation check in `synth --check` runs up to this many qubits.
const CONJUGATION_MAX_N: usize = 5;

#[derive(Parser)]
#[command(
    name = "cyclic-mub",
    version,
    about = "Cyclic complete MUB sets for qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a set from a triple, an explicit C, a fixture or a search hit.
    Generate {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Validate a set (or generator) algebraically and, for small n, numerically.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Per-class qubit partitions and the structure vector.
    Classify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Compile the generator into an H/S/CZ/CNOT circuit.
    Synth {
        #[command(flatten)]
        source: Source,
        /// Round-trip and conjugation checks before emitting.
        #[arg(long)]
        check: bool,
        /// Rewrite every CNOT as H·CZ·H.
        #[arg(long)]
        hcz: bool,
        /// Also emit the circuit preparing the seed basis.
        #[arg(long)]
        seed_circuit: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Search for valid triples of a given kind.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kind: SearchKind,
        #[arg(long, default_value_t = 1)]
        limit: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        time_budget: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Write the generator spec JSON for an input (regenerates fixtures).
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// Bundled fixture name.
    #[arg(long, conflicts_with_all = ["input", "search"])]
    fixture: Option<String>,
    /// Set, generator-spec or bare-matrix JSON file.
    #[arg(long, conflicts_with = "search")]
    input: Option<PathBuf>,
    /// Find the first triple of `--kind` for `--n` and use it.
    #[arg(long, requires_all = ["n", "kind"])]
    search: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kind: Option<SearchKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Output {
    /// json, table, or (synth only) qasm.
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

/// Maps outcomes onto the exit-code contract: 1 for inputs that parse but
/// fail validation, 2 for usage and I/O problems.
enum Failure {
    Invalid(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidTriple(_)
            | Error::InvalidGenerator(_)
            | Error::NotSymplectic { .. }
            | Error::RankDeficientClass { .. }
            | Error::NonAbelianClass(_)
            | Error::UnclassifiedTriple
            | Error::AmbiguousPartition(_)
            | Error::NotInvertible { .. } => Failure::Invalid(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// What an input file or flag set turned out to be.
enum Loaded {
    Set(Box<CyclicMubSet>, String),
    Generator(Box<GeneratorSpec>),
    Matrix(Gf2Matrix),
}

fn load(source: &Source) -> CliResult<Loaded> {
    if let Some(name) = &source.fixture {
        return fixtures::by_name(name)
            .map(|s| Loaded::Generator(Box::new(s)))
            .ok_or_else(|| {
                Failure::Usage(format!(
                    "unknown fixture `{name}` (available: {})",
                    fixtures::FIXTURE_NAMES.join(", ")
                ))
            });
    }
    if let Some(path) = &source.input {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
        if value.get("classes").is_some() {
            let doc = SetDocument::from_json(&text)?;
            let name = doc.generator.name.clone();
            return Ok(Loaded::Set(Box::new(doc.to_set()?), name));
        }
        if value.get("data").is_some() {
            return Ok(Loaded::Matrix(
                serde_json::from_value(value).map_err(Error::from)?,
            ));
        }
        return Ok(Loaded::Generator(Box::new(GeneratorSpec::from_json(
            &text,
        )?)));
    }
    if source.search {
        let (n, kind) = (
            source.n.unwrap_or_default(),
            source.kind.expect("clap requires --kind"),
        );
        let mut q = SearchQuery::new(n, kind, 1);
        q.seed = source.seed;
        let outcome = find_triples(&q)?;
        let t = outcome
            .triples
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Invalid(format!("no {kind} triple found for n = {n}")))?;
        return Ok(Loaded::Generator(Box::new(GeneratorSpec::from_triple(
            format!("{kind}{n}"),
            t,
        ))));
    }
    Err(Failure::Usage("give --fixture, --input or --search".into()))
}

fn load_generator(source: &Source) -> CliResult<(CyclicGenerator, String)> {
    match load(source)? {
        Loaded::Set(set, name) => Ok((set.generator.clone(), name)),
        Loaded::Generator(spec) => Ok((spec.generator()?, spec.name.clone())),
        Loaded::Matrix(c) => Ok((CyclicGenerator::from_explicit(c)?, String::new())),
    }
}

fn load_set(source: &Source) -> CliResult<(CyclicMubSet, String)> {
    match load(source)? {
        Loaded::Set(set, name) => Ok((*set, name)),
        _ => {
            let (g, name) = load_generator(source)?;
            Ok((build_classes(&g)?, name))
        }
    }
}

fn emit(
    out: &Output,
    json_value: &impl Serialize,
    table: impl FnOnce() -> String,
) -> CliResult<()> {
    let text = match out.format.as_str() {
        "json" => {
            let mut s = serde_json::to_string_pretty(json_value).map_err(Error::from)?;
            s.push('\n');
            s
        }
        "table" => table(),
        other => {
            return Err(Failure::Usage(format!(
                "unknown format `{other}` (json or table)"
            )))
        }
    };
    write_out(out.output.as_ref(), &text)
}

fn write_out(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(source: &Source, out: &Output) -> CliResult<bool> {
    let (g, name) = load_generator(source)?;
    let mut set = build_classes(&g)?;
    let report = validate_set(&set);
    if report.is_valid() {
        annotate(&mut set)?;
    }
    let doc = SetDocument::from_set(&set, &name);
    emit(out, &doc, || {
        let mut s = format!(
            "type: {}\nn: {}\nclasses: {}\n",
            set.set_type,
            set.n(),
            set.classes.len()
        );
        if let Some(sv) = &set.structure {
            s += &format!("structure: {sv}\n");
        }
        for c in &doc.classes {
            s += &format!(
                "  G_{:<3} {}\n",
                c.index,
                c.partition.as_deref().unwrap_or("-")
            );
        }
        s
    })?;
    if !report.is_valid() {
        eprintln!("set is not a complete MUB partition:\n{report}");
    }
    Ok(report.is_valid())
}

fn cmd_verify(source: &Source, tol: f64, out: &Output) -> CliResult<bool> {
    let (set, _) = load_set(source)?;
    let report = validate_set(&set);
    let numeric: Vec<NumericReport> = if set.n() <= NUMERIC_MAX_N {
        match verify_set_numeric(&set.generator, tol) {
            Ok(r) => r,
            Err(e) => vec![NumericReport {
                check: "synthesis".into(),
                passed: false,
                worst_deviation: f64::NAN,
                witness: Some(e.to_string()),
            }],
        }
    } else {
        Vec::new()
    };
    let passed = report.is_valid() && numeric.iter().all(|r| r.passed);
    let value = json!({
        "passed": passed,
        "algebraic": report.checks,
        "numeric": numeric,
    });
    emit(out, &value, || {
        let mut s = format!("{}\n{report}", if passed { "PASS" } else { "FAIL" });
        for r in &numeric {
            s += &format!(
                "  [{}] numeric {}: worst deviation {:.3e}{}\n",
                if r.passed { "pass" } else { "FAIL" },
                r.check,
                r.worst_deviation,
                r.witness
                    .as_deref()
                    .map(|w| format!(" ({w})"))
                    .unwrap_or_default()
            );
        }
        s
    })?;
    Ok(passed)
}

fn cmd_classify(source: &Source, out: &Output) -> CliResult<bool> {
    let (mut set, _) = load_set(source)?;
    let parts = class_partitions(&set)?;
    annotate(&mut set)?;
    let sv = set.structure.clone().expect("annotated");
    let value = json!({
        "set_type": set.set_type,
        "partitions": parts.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "structure": sv,
        "structure_vector": sv.to_string(),
    });
    emit(out, &value, || {
        let mut s = format!("structure: {sv}\n");
        for (j, p) in parts.iter().enumerate() {
            s += &format!("  G_{j:<3} {p}\n");
        }
        s
    })?;
    Ok(true)
}

fn cmd_synth(
    source: &Source,
    check: bool,
    hcz: bool,
    seed_circuit: bool,
    tol: f64,
    out: &Output,
) -> CliResult<bool> {
    let (c, seed_x) = match load(source)? {
        Loaded::Matrix(c) => (c, None),
        Loaded::Generator(spec) if spec.triple.is_none() => {
            let c = spec.c.clone().ok_or_else(|| {
                Failure::Usage("generator spec has neither `triple` nor `c`".into())
            })?;
            (c, spec.seed_x.clone())
        }
        _ => {
            let (g, _) = load_generator(source)?;
            let sx = (!g.has_standard_seed()).then(|| g.seed_x().clone());
            (g.c().clone(), sx)
        }
    };
    // field-based C = [[B, I], [I, 0]] takes the fast path
    let field_b = match load(source)? {
        Loaded::Generator(spec) => spec
            .generator()
            .ok()
            .filter(|g| {
                g.triple()
                    .is_some_and(|t| t.r.is_identity() && t.a.is_zero())
            })
            .map(|g| g.triple().expect("checked").b.clone()),
        _ => None,
    };
    let mut circuit = match &field_b {
        Some(b) => synth_field_based(b)?,
        None => synthesize(&c)?,
    };
    if hcz {
        circuit = circuit.rewrite_cnots();
    }
    if check {
        let m = circuit_symplectic(&circuit)?;
        if m != c {
            return Err(Failure::Invalid(
                "synthesized circuit does not reproduce C".into(),
            ));
        }
        if circuit.n <= CONJUGATION_MAX_N {
            if let Some(a) = conjugation_mismatch(&circuit, &c, tol)? {
                return Err(Failure::Invalid(format!(
                    "U ZX(a) U† != ±ZX(Ca) at a = {a}"
                )));
            }
        }
        eprintln!(
            "check passed: {} gates, symplectic round trip exact",
            circuit.len()
        );
    }
    let mut text = export_circuit(&circuit, &out.format)?;
    if seed_circuit {
        if let Some(sx) = seed_x {
            let mut seed = cyclic_mub::synth::synth_seed_offset(&sx)?;
            if hcz {
                seed = seed.rewrite_cnots();
            }
            text += &format!("// seed circuit\n{}", export_circuit(&seed, &out.format)?);
        }
    }
    write_out(out.output.as_ref(), &text)?;
    Ok(true)
}

fn cmd_search(
    n: usize,
    kind: SearchKind,
    limit: usize,
    seed: u64,
    time_budget: Option<f64>,
    out: &Output,
) -> CliResult<bool> {
    let mut q = SearchQuery::new(n, kind, limit);
    q.seed = seed;
    q.time_budget = time_budget.map(Duration::from_secs_f64);
    let outcome = find_triples(&q)?;
    let value = json!({
        "n": n,
        "kind": kind,
        "mode": outcome.mode,
        "complete": outcome.complete,
        "timed_out": outcome.timed_out,
        "found": outcome.triples.len(),
        "triples": outcome.triples,
    });
    emit(out, &value, || {
        if outcome.none_found() {
            return "none found\n".to_string();
        }
        let mut s = String::new();
        for t in &outcome.triples {
            s += &format!(
                "B = {:?}  R = {:?}  A = {:?}\n",
                t.b.to_rows(),
                t.r.to_rows(),
                t.a.to_rows()
            );
        }
        s
    })?;
    if outcome.none_found() {
        eprintln!("none found");
    }
    Ok(true)
}

fn cmd_export(source: &Source, output: Option<&PathBuf>) -> CliResult<bool> {
    let spec = match load(source)? {
        Loaded::Generator(spec) => *spec,
        Loaded::Set(set, name) => generator_spec(&set.generator, &name),
        Loaded::Matrix(c) => GeneratorSpec {
            c: Some(c),
            ..GeneratorSpec::default()
        },
    };
    let mut text = serde_json::to_string_pretty(&spec).map_err(Error::from)?;
    text.push('\n');
    write_out(output, &text)?;
    Ok(true)
}

fn run(cli: Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Generate { source, out } => cmd_generate(source, out),
        Command::Verify { source, tol, out } => cmd_verify(source, *tol, out),
        Command::Classify { source, out } => cmd_classify(source, out),
        Command::Synth {
            source,
            check,
            hcz,
            seed_circuit,
            tol,
            out,
        } => cmd_synth(source, *check, *hcz, *seed_circuit, *tol, out),
        Command::Search {
            n,
            kind,
            limit,
            seed,
            time_budget,
            out,
        } => cmd_search(*n, *kind, *limit, *seed, *time_budget, out),
        Command::Export { source, output } => cmd_export(source, output.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
