//! Canonical JSON: keys sorted, floats with 17 significant digits, no
//! insignificant whitespace.

use std::fmt::Write;

use nbdf_core::CheckResult;
use serde_json::{json, Map, Value};

pub const REPORT_VERSION: u64 = 1;

/// 17 significant digits; non-finite values become strings.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"nan\"".into()
    } else if x > 0.0 {
        "\"inf\"".into()
    } else {
        "\"-inf\"".into()
    }
}

pub fn to_canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                write!(out, "{i}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                out.push_str(&format_float(n.as_f64().unwrap()));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

/// `serde_json` cannot hold non-finite floats; they are carried as strings.
fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format_float(x).trim_matches('"').to_string()))
}

/// One report entry; `prefix` names the form the check ran against.
pub fn check_entry(prefix: Option<&str>, r: &CheckResult) -> Value {
    let name = match prefix {
        Some(p) => format!("{p}/{}", r.name),
        None => r.name.clone(),
    };
    json!({
        "name": name,
        "passed": r.passed,
        "worst_violation": float_value(r.worst_violation),
        "n_tested": r.n_tested,
        "witness": serde_json::to_value(&r.witness).expect("witness serialises"),
    })
}

pub fn report(seed: u64, checks: Vec<Value>, extra: Map<String, Value>) -> Value {
    let mut m = extra;
    m.insert("version".into(), json!(REPORT_VERSION));
    m.insert("seed".into(), json!(seed));
    m.insert("checks".into(), Value::Array(checks));
    Value::Object(m)
}

/// True when any entry of `checks` has `passed = false`.
pub fn has_failure(report: &Value) -> bool {
    report["checks"]
        .as_array()
        .is_some_and(|cs| cs.iter().any(|c| c["passed"] == Value::Bool(false)))
}
