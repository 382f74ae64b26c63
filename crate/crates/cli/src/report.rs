//! Text and JSON renderings of reports.

use std::fmt::Write;

use cwdl::recognition::{Method, RecognitionResult};
use cwdl::sparql::{CompiledQuery, Coverage};
use cwdl::{Interpretation, ProfileName, Term, Validation};
use serde_json::{json, Map, Value};

/// IRIs bare, everything else in N-Triples form.
pub fn term(t: &Term) -> String {
    match t {
        Term::Iri(iri) => iri.clone(),
        other => other.to_string(),
    }
}

fn closure_name(p: ProfileName) -> &'static str {
    match p {
        ProfileName::None => "NONE",
        ProfileName::Rdf => "RDF",
        ProfileName::Rdfs => "RDFS",
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Fixpoint => "FIXPOINT",
        Method::BruteForce => "BRUTE_FORCE",
    }
}

fn extensions_json(i: &Interpretation, r: &RecognitionResult) -> Value {
    let mut map = Map::new();
    for class in r.extensions.keys() {
        let members: Vec<String> = r.members(i, class).unwrap_or_default().iter().map(term).collect();
        map.insert(class.clone(), json!(members));
    }
    Value::Object(map)
}

pub fn validation_json(v: &Validation, closure: ProfileName) -> String {
    let axioms: Vec<Value> = v
        .report
        .axioms
        .iter()
        .map(|r| {
            let witnesses: Vec<Value> = r
                .witnesses
                .iter()
                .map(|w| {
                    json!({
                        "node": term(&w.node),
                        "object": w.object.as_ref().map(term),
                        "detail": w.detail,
                        "culprits": w.culprits.iter().map(term).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({
                "index": r.index,
                "source": r.source,
                "line": r.line,
                "verdict": r.verdict.as_str(),
                "witnesses": witnesses,
                "witnessCount": r.witness_count,
            })
        })
        .collect();
    let rec = v.report.recognition.as_ref();
    let out = json!({
        "overall": v.report.overall,
        "axioms": axioms,
        "recognition": rec.map_or(json!({}), |r| extensions_json(&v.interpretation, r)),
        "modelFound": rec.is_none_or(|r| r.model_found),
        "method": method_name(rec.map_or(Method::Fixpoint, |r| r.method)),
        "closure": closure_name(closure),
    });
    serde_json::to_string_pretty(&out).expect("serializable")
}

pub fn recognition_json(i: &Interpretation, r: &RecognitionResult, closure: ProfileName) -> String {
    let out = json!({
        "recognition": extensions_json(i, r),
        "modelFound": r.model_found,
        "method": method_name(r.method),
        "closure": closure_name(closure),
    });
    serde_json::to_string_pretty(&out).expect("serializable")
}

fn extensions_text(i: &Interpretation, r: &RecognitionResult, w: &mut String) {
    for class in r.extensions.keys() {
        let members: Vec<String> = r.members(i, class).unwrap_or_default().iter().map(term).collect();
        writeln!(w, "{class}: {}", members.join(", ")).unwrap();
    }
    if !r.model_found {
        writeln!(w, "no extension satisfies the constraints").unwrap();
    }
}

pub fn validation_text(v: &Validation) -> String {
    let mut w = String::new();
    for r in &v.report.axioms {
        let at = if r.line > 0 { format!(" (line {})", r.line) } else { String::new() };
        writeln!(w, "[{}] #{}{at} {}", r.verdict.as_str(), r.index, r.source).unwrap();
        for wit in &r.witnesses {
            write!(w, "    {}", wit.detail).unwrap();
            if !wit.culprits.is_empty() {
                let c: Vec<String> = wit.culprits.iter().map(term).collect();
                write!(w, " because of {}", c.join(", ")).unwrap();
            }
            w.push('\n');
        }
        if r.witness_count > r.witnesses.len() {
            writeln!(w, "    ... {} more", r.witness_count - r.witnesses.len()).unwrap();
        }
    }
    if let Some(rec) = &v.report.recognition {
        writeln!(w, "recognition ({}):", rec.method.as_str()).unwrap();
        extensions_text(&v.interpretation, rec, &mut w);
    }
    let violated = v.report.violated().count();
    writeln!(
        w,
        "{}: {violated} of {} axioms violated",
        if v.report.overall { "SATISFIED" } else { "VIOLATED" },
        v.report.axioms.len()
    )
    .unwrap();
    w
}

pub fn recognition_text(i: &Interpretation, r: &RecognitionResult) -> String {
    let mut w = String::new();
    extensions_text(i, r, &mut w);
    w
}

pub fn manifest_json(queries: &[CompiledQuery]) -> String {
    let entries: Vec<Value> = queries
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let (coverage, reason) = match &q.coverage {
                Coverage::Full => ("FULL", None),
                Coverage::Unsupported(why) => ("UNSUPPORTED", Some(why.clone())),
            };
            json!({
                "axiomIndex": k,
                "axiom": q.axiom.to_string(),
                "sparql": q.text,
                "coverage": coverage,
                "reason": reason,
            })
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("serializable")
}
