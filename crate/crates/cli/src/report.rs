//! JSON encoding of simulator results and the matching text rendering.
//!
//! Every float passes through [`num`] before it reaches a report, so the JSON
//! and text forms print the same digits.

use serde_json::{json, Map, Value};

use qka_core::discrim::{DiscriminationReport, Lemma1Verdict};
use qka_core::nosignal::NoSignalReport;
use qka_core::qka::Transcript;
use qka_core::qmath::{ComplexMatrix, C64};
use qka_core::qsim::StateVector;

pub const SCHEMA_VERSION: &str = "1";

/// JSON Schema for every report this crate emits.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report-v1.json");

/// Magnitudes below this print as zero.
pub const ZERO_FLOOR: f64 = 1e-14;

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x.abs() < ZERO_FLOOR {
        return 0.0;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // avoid emitting -0.0
    rounded + 0.0
}

pub fn num(x: f64) -> Value {
    json!(round_sig(x))
}

fn complex(z: C64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn state(s: &StateVector) -> Value {
    Value::Array(s.amplitudes().iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn transcript(t: &Transcript) -> Value {
    json!({
        "seed": t.seed,
        "malicious": t.malicious,
        "target": t.target.map(|k| k.to_string()),
        "bell_outcome": t.bell_outcome.name(),
        "bell_probability": num(t.bell_probability),
        "alice_state": state(&t.alice_state),
        "phi_d": state(&t.phi_d),
        "oracle": { "value": num(t.oracle.value), "unphysical": t.oracle.unphysical() },
        "bob_key": t.bob_key.to_string(),
        "alice_key": t.alice_key.to_string(),
        "keys_agree": t.keys_agree(),
    })
}

pub fn discrimination(r: &DiscriminationReport) -> Value {
    json!({
        "method": r.method.name(),
        "success_probability": num(r.success_probability),
        "perfectly_distinguishable": r.perfectly_distinguishable,
        "povm": r.povm.as_ref().map(|p| p.elements().iter().map(matrix).collect::<Vec<_>>()),
        "iterations": r.iterations,
        "residual": num(r.residual),
        "certified": r.certified,
    })
}

pub fn four_state(v: &Lemma1Verdict) -> Value {
    json!({
        "theta": num(v.prep.theta()),
        "candidates": v.report.ensemble.states().iter().map(state).collect::<Vec<_>>(),
        "success_probability": num(v.success_probability()),
        "pgm": discrimination(&v.pgm),
        "optimizer": discrimination(&v.report),
        "bound": num(v.bound),
        "device_success": num(v.device_success),
        "verdict": v.verdict.name(),
    })
}

pub fn nosignal(r: &NoSignalReport) -> Value {
    json!({
        "theta": num(r.theta),
        "trace_distance": num(r.trace_distance),
        "helstrom_success": num(r.helstrom_success),
        "device_implication": {
            "basis_identification": num(r.device_basis_identification),
            "would_signal": r.device_would_signal(),
        },
        "verdict": r.verdict(),
        "rho14": matrix(r.rho14.operator()),
        "rho23": matrix(r.rho23.operator()),
    })
}

/// One `path = value` line per leaf. Arrays that hold no objects stay on a
/// single line.
pub fn to_text(report: &Value) -> String {
    let mut out = String::new();
    if let (Some(cmd), Some(ver)) = (report.get("command"), report.get("schema_version")) {
        out.push_str(&format!(
            "qka {} report (schema {})\n",
            plain(cmd),
            plain(ver)
        ));
    }
    if let Value::Object(map) = report {
        for (k, v) in map {
            if k != "command" && k != "schema_version" {
                flatten(k, v, &mut out);
            }
        }
    }
    out
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn has_object(v: &Value) -> bool {
    match v {
        Value::Object(_) => true,
        Value::Array(items) => items.iter().any(has_object),
        _ => false,
    }
}

fn flatten(path: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => flatten_map(path, map, out),
        Value::Array(items) if has_object(v) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{path}.{i}"), item, out);
            }
        }
        _ => out.push_str(&format!("{path} = {}\n", plain(v))),
    }
}

fn flatten_map(path: &str, map: &Map<String, Value>, out: &mut String) {
    for (k, v) in map {
        flatten(&format!("{path}.{k}"), v, out);
    }
}

/// Leaves of a text report as `(path, value)` pairs, in order.
pub fn parse_text(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}
