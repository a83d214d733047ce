//! Report envelope, outcome classification and text rendering.

use std::fmt::Write as _;
use std::process::ExitCode;

use num_traits::Signed;
use qtorb::{BigInt, ChernError, CobordismError, DocError, LatticeError, ModelError};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Result of one subcommand before it is wrapped in the envelope.
#[derive(Debug)]
pub enum Outcome {
    Pass(Value),
    Fail(Value),
    Malformed(Value),
    Internal(Value),
}

impl Outcome {
    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Pass(_) => "pass",
            Outcome::Fail(_) => "fail",
            Outcome::Malformed(_) => "malformed",
            Outcome::Internal(_) => "internal_error",
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Outcome::Pass(_) => 0,
            Outcome::Fail(_) => 1,
            Outcome::Malformed(_) => 2,
            Outcome::Internal(_) => 3,
        })
    }

    fn body(&self) -> &Value {
        match self {
            Outcome::Pass(v) | Outcome::Fail(v) | Outcome::Malformed(v) | Outcome::Internal(v) => v,
        }
    }

    pub fn malformed(message: impl ToString) -> Self {
        Outcome::Malformed(error_body("malformed_input", message, Value::Null))
    }

    pub fn internal(message: impl ToString) -> Self {
        Outcome::Internal(error_body("internal_invariant", message, Value::Null))
    }
}

fn error_body(kind: &str, message: impl ToString, witness: Value) -> Value {
    let mut e = json!({ "kind": kind, "message": message.to_string() });
    if !witness.is_null() {
        e["witness"] = witness;
    }
    json!({ "error": e })
}

pub fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    inputs: &'a [String],
    status: &'static str,
    #[serde(flatten)]
    body: &'a Value,
}

pub fn envelope(command: &str, inputs: &[String], outcome: &Outcome) -> Value {
    let e = Envelope {
        tool: "qtorb",
        version: env!("CARGO_PKG_VERSION"),
        command,
        inputs,
        status: outcome.status(),
        body: outcome.body(),
    };
    serde_json::to_value(e).expect("reports serialise")
}

/// A big integer as a bare JSON number.
pub fn int(x: &BigInt) -> Value {
    serde_json::from_str(&x.to_string()).expect("integer literal")
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialise")
}

impl From<DocError> for Outcome {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Model(m) => m.into(),
            e if e.is_malformed() => Outcome::malformed(e),
            e => Outcome::Fail(error_body("invalid_model", &e, Value::Null)),
        }
    }
}

impl From<ModelError> for Outcome {
    fn from(e: ModelError) -> Self {
        let witness = match &e {
            ModelError::Dependent { face } => json!({ "face": face }),
            _ => Value::Null,
        };
        match e {
            ModelError::Lattice(l) => l.into(),
            ModelError::Dependent { .. } | ModelError::Marking(_) | ModelError::NotExceptional(_) => {
                Outcome::Fail(error_body("invalid_model", &e, witness))
            }
            ModelError::PolytopeMismatch => Outcome::Fail(error_body("polytope_mismatch", &e, witness)),
            e if DocError::from(e.clone()).is_malformed() => Outcome::malformed(e),
            e => Outcome::Fail(error_body("invalid_model", &e, witness)),
        }
    }
}

impl From<LatticeError> for Outcome {
    fn from(e: LatticeError) -> Self {
        Outcome::internal(e)
    }
}

impl From<CobordismError> for Outcome {
    fn from(e: CobordismError) -> Self {
        match e {
            CobordismError::Model(m) => m.into(),
            CobordismError::Lattice(l) => l.into(),
            CobordismError::Polytope(_) | CobordismError::NotFakeWeighted(_) => Outcome::internal(e),
            CobordismError::Lambda0Length { .. } => Outcome::malformed(e),
            CobordismError::Lambda0InEdgeSpan { ref lambda0, ref edge } => {
                let w = json!({ "lambda0": lambda0, "edge": edge });
                Outcome::Fail(error_body("lambda0_rejected", &e, w))
            }
            CobordismError::Lambda0NotPrimitive(ref l) => {
                let w = json!({ "lambda0": l });
                Outcome::Fail(error_body("lambda0_rejected", &e, w))
            }
            CobordismError::NoTargetFacet | CobordismError::NotSimplexFacet(_) => {
                Outcome::Fail(error_body("invalid_model", &e, Value::Null))
            }
        }
    }
}

impl From<ChernError> for Outcome {
    fn from(e: ChernError) -> Self {
        match e {
            ChernError::Model(m) => m.into(),
            ChernError::NotSmooth(ref vertex, ref order) => {
                let w = json!({ "vertex": vertex, "order": int(&order.abs()) });
                Outcome::Fail(error_body("not_smooth", &e, w))
            }
            ChernError::WrongWeight(..) | ChernError::Inconsistent(..) => Outcome::internal(e),
        }
    }
}

/// Indented `key: value` rendering of a JSON report.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        Value::Array(a)
            if a.iter().all(|x| {
                x.as_array()
                    .is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))
            }) =>
        {
            let parts: Vec<String> = a.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn walk(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => writeln!(out, "{pad}{k}: {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}{k}:").unwrap();
                        walk(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match scalar(x) {
                    Some(s) => writeln!(out, "{pad}- {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}-").unwrap();
                        walk(x, depth + 1, out);
                    }
                }
            }
        }
        other => writeln!(out, "{pad}{}", scalar(other).unwrap_or_default()).unwrap(),
    }
}
