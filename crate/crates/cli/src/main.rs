mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cwdl::constraint::new_vocabulary;
use cwdl::rdf::vocabulary;
use cwdl::recognition::{recognize, RecognitionError, DEFAULT_BUDGET};
use cwdl::sparql::compile_set;
use cwdl::{
    closure, canonical_interpretation, parse_constraints, parse_turtle, validate_with, AxiomSet, ClosureProfile,
    DatatypeRegistry, Graph, ProfileName, ValidateOptions,
};

#[derive(Parser)]
#[command(name = "cwdl", version, about = "Closed-world validation and recognition for RDF graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check constraints against the closed graph.
    Validate(ValidateArgs),
    /// Compute closed-world extensions of newly defined classes.
    Recognize(RecognizeArgs),
    /// Compile constraints to SPARQL queries that return violations.
    Emit(EmitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Closure {
    None,
    Rdf,
    Rdfs,
}

impl From<Closure> for ProfileName {
    fn from(c: Closure) -> Self {
        match c {
            Closure::None => ProfileName::None,
            Closure::Rdf => ProfileName::Rdf,
            Closure::Rdfs => ProfileName::Rdfs,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Layout {
    /// One JSON array with every query.
    Manifest,
    /// One `.rq` file per compiled axiom plus `manifest.json`, in the `--out` directory.
    Files,
}

#[derive(Args)]
struct Inputs {
    /// Turtle data file; repeatable.
    #[arg(long, required = true, num_args = 1..)]
    data: Vec<PathBuf>,
    /// Turtle ontology file; repeatable.
    #[arg(long, num_args = 1..)]
    ontology: Vec<PathBuf>,
    /// Constraint file; repeatable.
    #[arg(long, required = true, num_args = 1..)]
    constraints: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "rdfs")]
    closure: Closure,
}

#[derive(Args)]
struct Recognition {
    /// Solve definitions that are not certified monotone by enumeration.
    #[arg(long)]
    brute_force: bool,
    /// Largest number of candidate assignments brute force may try.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl Recognition {
    fn budget(&self) -> Option<u64> {
        self.brute_force.then_some(self.budget)
    }
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    recognition: Recognition,
    /// Check rdfs:domain and rdfs:range as constraints instead of inferring from them.
    #[arg(long)]
    explicit_domains_ranges: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Witnesses listed per axiom.
    #[arg(long, default_value_t = cwdl::checker::DEFAULT_WITNESS_CAP)]
    witness_cap: usize,
}

#[derive(Args)]
struct RecognizeArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    recognition: Recognition,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum, default_value = "manifest")]
    layout: Layout,
    /// Manifest file, or the output directory with `--layout files`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 1 when any axiom cannot be compiled.
    #[arg(long)]
    strict: bool,
}

struct Loaded {
    data: Graph,
    ontology: Graph,
    constraints: AxiomSet,
    profile: ClosureProfile,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_graphs(paths: &[PathBuf]) -> Result<Graph> {
    let mut g = Graph::new();
    for p in paths {
        let part = parse_turtle(&read(p)?, None).with_context(|| format!("in {}", p.display()))?;
        g.merge_disjoint(part);
    }
    Ok(g)
}

impl Inputs {
    fn load(&self) -> Result<Loaded> {
        let mut constraints = AxiomSet::new();
        for p in &self.constraints {
            let set = parse_constraints(&read(p)?).with_context(|| format!("in {}", p.display()))?;
            constraints.extend(set).with_context(|| format!("in {}", p.display()))?;
        }
        Ok(Loaded {
            data: load_graphs(&self.data)?,
            ontology: load_graphs(&self.ontology)?,
            constraints,
            profile: ClosureProfile::named(self.closure.into()),
        })
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn guidance(e: anyhow::Error) -> anyhow::Error {
    match e.downcast_ref::<cwdl::Error>() {
        Some(cwdl::Error::Recognition(RecognitionError::NonMonotoneDefinition(_))) => {
            e.context("rerun with --brute-force to enumerate extensions within --budget")
        }
        _ => e,
    }
}

fn run_validate(a: &ValidateArgs) -> Result<u8> {
    let l = a.inputs.load()?;
    let options = ValidateOptions {
        profile: l.profile.clone(),
        explicit_domains_ranges: a.explicit_domains_ranges,
        witness_cap: a.witness_cap,
        brute_force_budget: a.recognition.budget(),
        registry: DatatypeRegistry::standard(),
    };
    let v = validate_with(&l.data, &l.ontology, &l.constraints, &options).map_err(|e| guidance(e.into()))?;
    let text = match a.format {
        Format::Json => report::validation_json(&v, l.profile.name()) + "\n",
        Format::Text => report::validation_text(&v),
    };
    write_out(a.out.as_deref(), &text)?;
    Ok(u8::from(!v.report.overall))
}

fn run_recognize(a: &RecognizeArgs) -> Result<u8> {
    let l = a.inputs.load()?;
    let g = closure(&l.data.union(&l.ontology), &l.profile);
    let i = canonical_interpretation(&g, &DatatypeRegistry::standard())?;
    let r = recognize(&i, &l.constraints, a.recognition.budget())
        .map_err(|e| guidance(cwdl::Error::from(e).into()))?;
    let text = match a.format {
        Format::Json => report::recognition_json(&i, &r, l.profile.name()) + "\n",
        Format::Text => report::recognition_text(&i, &r),
    };
    write_out(a.out.as_deref(), &text)?;
    Ok(u8::from(!r.model_found))
}

fn run_emit(a: &EmitArgs) -> Result<u8> {
    let l = a.inputs.load()?;
    let registry = DatatypeRegistry::standard();
    let g = closure(&l.data.union(&l.ontology), &l.profile);
    let defined = new_vocabulary(&l.constraints, &vocabulary(&g))?;
    let queries = compile_set(&l.constraints, &defined, &registry);
    let manifest = report::manifest_json(&queries) + "\n";
    match (a.layout, &a.out) {
        (Layout::Manifest, out) => write_out(out.as_deref(), &manifest)?,
        (Layout::Files, None) => bail!("--layout files needs --out DIR"),
        (Layout::Files, Some(dir)) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for (k, q) in queries.iter().enumerate() {
                if q.coverage.is_full() {
                    let path = dir.join(format!("axiom-{k}.rq"));
                    fs::write(&path, &q.text).with_context(|| format!("cannot write {}", path.display()))?;
                }
            }
            write_out(Some(&dir.join("manifest.json")), &manifest)?;
        }
    }
    let unsupported = queries.iter().filter(|q| !q.coverage.is_full()).count();
    if unsupported > 0 {
        eprintln!("{unsupported} of {} axioms not compiled", queries.len());
    }
    Ok(u8::from(a.strict && unsupported > 0))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Validate(a) => run_validate(a),
        Command::Recognize(a) => run_recognize(a),
        Command::Emit(a) => run_emit(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
