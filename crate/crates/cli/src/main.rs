//! `qtorb`: validate characteristic models and emit cobordism relations.
//!
//! Exit codes: 0 pass, 1 validation failure, 2 malformed input, 3 internal
//! invariant violation.

mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qtorb::charmodel::describe_violation;
use qtorb::io::{LoadedModel, ModelDoc, RelationDoc};
use qtorb::{
    chern_numbers, comcob_relation, delta_equivalent, qbd_decompose, verify_relation, vertex_cut_relation,
    CobordismRelation, DeltaSearch, IntVector, OmniorientedModel, VerificationStatus,
};
use report::{envelope, int, render_text, to_value, Outcome};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "qtorb",
    version,
    about = "Quasitoric orbifold models and their cobordism relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check a characteristic or isotropy model.
    Validate { input: PathBuf },
    /// Write a characteristic model as a sum of fake weighted projective spaces.
    Decompose {
        input: PathBuf,
        /// Extra label for the cut prism base, e.g. "1,2".
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        lambda0: Option<IntVector>,
        #[arg(long)]
        no_verify: bool,
    },
    /// Boundary relation of an isotropy model.
    Relation {
        input: PathBuf,
        #[arg(long)]
        no_verify: bool,
    },
    /// Cut every vertex of a labelled polytope and emit the boundary relation.
    Vertexcut {
        input: PathBuf,
        #[arg(long)]
        no_verify: bool,
    },
    /// Chern numbers of a smooth omnioriented model.
    Chern { input: PathBuf },
    /// Search for an automorphism carrying the first model's labels to the second's.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        /// Largest absolute matrix entry considered.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Decompose { .. } => "decompose",
            Command::Relation { .. } => "relation",
            Command::Vertexcut { .. } => "vertexcut",
            Command::Chern { .. } => "chern",
            Command::Equiv { .. } => "equiv",
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Validate { input }
            | Command::Decompose { input, .. }
            | Command::Relation { input, .. }
            | Command::Vertexcut { input, .. }
            | Command::Chern { input } => vec![input],
            Command::Equiv { first, second, .. } => vec![first, second],
        }
    }
}

fn parse_vector(s: &str) -> Result<IntVector, String> {
    s.split(',')
        .map(|t| t.trim().parse::<qtorb::BigInt>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(IntVector::new)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.name();

    let mut texts = Vec::new();
    let mut digests = Vec::new();
    let mut read_error = None;
    for path in cli.command.inputs() {
        match fs::read(path) {
            Ok(bytes) => {
                digests.push(report::digest(&bytes));
                texts.push(String::from_utf8(bytes).map_err(|e| e.to_string()));
            }
            Err(e) => {
                read_error.get_or_insert(format!("cannot read {}: {e}", path.display()));
            }
        }
    }
    let outcome = match read_error {
        Some(e) => Outcome::malformed(e),
        None => match texts.into_iter().collect::<Result<Vec<_>, _>>() {
            Ok(texts) => run(&cli.command, &texts),
            Err(e) => Outcome::malformed(format!("input is not UTF-8: {e}")),
        },
    };

    let report = envelope(command, &digests, &outcome);
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("reports serialise") + "\n",
        Format::Text => render_text(&report),
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &rendered),
        None => std::io::stdout().lock().write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("qtorb: cannot write report: {e}");
        return ExitCode::from(2);
    }
    outcome.exit_code()
}

fn run(command: &Command, texts: &[String]) -> Outcome {
    let result = match command {
        Command::Validate { .. } => validate(&texts[0]),
        Command::Decompose { lambda0, no_verify, .. } => decompose(&texts[0], lambda0.clone(), !no_verify),
        Command::Relation { no_verify, .. } => relation(&texts[0], !no_verify),
        Command::Vertexcut { no_verify, .. } => vertexcut(&texts[0], !no_verify),
        Command::Chern { .. } => chern(&texts[0]),
        Command::Equiv { bound, .. } => equiv(&texts[0], &texts[1], *bound),
    };
    result.unwrap_or_else(|o| o)
}

type Run = Result<Outcome, Outcome>;

fn load(text: &str) -> Result<LoadedModel, Outcome> {
    Ok(ModelDoc::parse(text)?.load()?)
}

fn load_characteristic(text: &str) -> Result<OmniorientedModel, Outcome> {
    Ok(ModelDoc::parse(text)?.load_characteristic()?)
}

fn validate(text: &str) -> Run {
    match load(text)? {
        LoadedModel::Characteristic(m) => {
            let x = m.model();
            let p = x.polytope();
            let report = x.validate();
            let vertices: Vec<Value> = p
                .vertices()
                .iter()
                .zip(&report.determinants)
                .map(|(v, d)| json!({ "facets": p.names(v), "det": int(d) }))
                .collect();
            let failures: Vec<Value> = report
                .failures
                .iter()
                .map(|v| json!({ "vertex": p.names(v), "reason": "labels are linearly dependent" }))
                .collect();
            let orders: Vec<Value> = report.local_group_orders().iter().map(int).collect();
            let body = json!({
                "model": "characteristic",
                "dim": x.dim(),
                "valid": report.passed(),
                "smooth": report.passed() && report.is_smooth(),
                "vertex_orders": orders,
                "vertices": vertices,
                "failures": failures,
            });
            Ok(if report.passed() {
                Outcome::Pass(body)
            } else {
                Outcome::Fail(body)
            })
        }
        LoadedModel::Isotropy(m) => {
            let p = m.polytope();
            let report = m.validate();
            let marking: Vec<String> = report
                .marking
                .violations
                .iter()
                .map(|v| describe_violation(p, v))
                .collect();
            let dependent: Vec<Value> = report
                .dependent
                .iter()
                .map(|v| json!({ "vertex": p.names(v), "reason": "labels are linearly dependent" }))
                .collect();
            let body = json!({
                "model": "isotropy",
                "dim": p.dim(),
                "valid": report.passed(),
                "exceptional": m.marking().facets().iter().map(|&f| p.facet_name(f)).collect::<Vec<_>>(),
                "marking_violations": marking,
                "failures": dependent,
            });
            Ok(if report.passed() {
                Outcome::Pass(body)
            } else {
                Outcome::Fail(body)
            })
        }
    }
}

/// The relation report, verified by the localization oracle when asked.
fn relation_body(r: &CobordismRelation, verify: bool) -> Result<Value, Outcome> {
    let verification = if verify { Some(verify_relation(r)?) } else { None };
    if let Some(v) = &verification {
        if v.status == VerificationStatus::Fail {
            let sums = to_value(&v.sums);
            return Err(Outcome::internal(format!("emitted relation does not vanish: {sums}")));
        }
    }
    Ok(json!({ "relation": to_value(&RelationDoc::new(r, verification)) }))
}

fn decompose(text: &str, lambda0: Option<IntVector>, verify: bool) -> Run {
    let x = load_characteristic(text)?;
    let d = qbd_decompose(x.model(), lambda0)?;
    let mut body = relation_body(&d.relation, verify)?;
    body["lambda0"] = to_value(&d.lambda0);
    Ok(Outcome::Pass(body))
}

fn relation(text: &str, verify: bool) -> Run {
    let LoadedModel::Isotropy(m) = load(text)? else {
        return Err(Outcome::malformed(
            "relation needs a model with an \"exceptional\" marking",
        ));
    };
    let r = comcob_relation(&m)?;
    Ok(Outcome::Pass(relation_body(&r, verify)?))
}

fn vertexcut(text: &str, verify: bool) -> Run {
    let (q, labels) = ModelDoc::parse(text)?.labelled_polytope()?;
    let cut = vertex_cut_relation(&q, labels)?;
    Ok(Outcome::Pass(relation_body(&cut.relation, verify)?))
}

fn chern(text: &str) -> Run {
    let m = load_characteristic(text)?;
    m.model().ensure_valid()?;
    let numbers = chern_numbers(&m)?;
    let signs = m.vertex_signs()?;
    Ok(Outcome::Pass(
        json!({ "vertex_signs": signs, "numbers": to_value(&numbers) }),
    ))
}

fn equiv(first: &str, second: &str, bound: u64) -> Run {
    let a = load_characteristic(first)?;
    let b = load_characteristic(second)?;
    Ok(match delta_equivalent(a.model(), b.model(), bound)? {
        DeltaSearch::Found(rows) => Outcome::Pass(json!({ "bound": bound, "found": true, "matrix": to_value(&rows) })),
        DeltaSearch::NotFoundWithinBound => Outcome::Fail(json!({ "bound": bound, "found": false })),
    })
}
