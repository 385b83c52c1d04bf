use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub type Diagnostics = BTreeMap<String, Value>;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the raw input bytes.
    pub input_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub diagnostics: Diagnostics,
    pub wall_time_ms: f64,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    /// The report without its timing field.
    pub fn body(&self) -> Value {
        let mut v = self.to_value();
        if let Value::Object(map) = &mut v {
            map.remove("wall_time_ms");
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(kind) = &self.kind {
            let _ = writeln!(out, "kind: {kind}");
        }
        if let Some(method) = &self.method {
            let _ = writeln!(out, "method: {method}");
        }
        let _ = writeln!(out, "input sha256: {}", self.input_digest);
        for (label, section) in [("decomposition", &self.decomposition), ("result", &self.result)] {
            if let Some(Value::Object(map)) = section {
                let _ = writeln!(out, "{label}:");
                for (k, v) in map {
                    write_entry(&mut out, k, v, 1);
                }
            }
        }
        let _ = writeln!(out, "diagnostics:");
        for (k, v) in &self.diagnostics {
            write_entry(&mut out, k, v, 1);
        }
        let _ = writeln!(out, "wall time: {:.3} ms", self.wall_time_ms);
        out
    }
}

fn is_complex(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number))
}

fn is_matrix(v: &Value) -> bool {
    match v {
        Value::Array(rows) => {
            !rows.is_empty()
                && rows
                    .iter()
                    .all(|r| matches!(r, Value::Array(es) if es.iter().all(is_complex)))
        }
        _ => false,
    }
}

fn fmt_complex(v: &Value) -> String {
    let re = v[0].as_f64().unwrap_or(f64::NAN);
    let im = v[1].as_f64().unwrap_or(f64::NAN);
    if im == 0.0 {
        format!("{re:>12.6}")
    } else {
        format!("{re:>12.6}{im:+.6}i")
    }
}

fn write_entry(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if is_matrix(v) {
        let _ = writeln!(out, "{pad}{key}:");
        for row in v.as_array().into_iter().flatten() {
            let cells: Vec<String> = row.as_array().into_iter().flatten().map(fmt_complex).collect();
            let _ = writeln!(out, "{pad}  [{}]", cells.join(" "));
        }
        return;
    }
    match v {
        Value::Array(items) if items.iter().all(is_matrix) && !items.is_empty() => {
            for (i, m) in items.iter().enumerate() {
                write_entry(out, &format!("{key}[{i}]"), m, depth);
            }
        }
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, inner) in map {
                write_entry(out, k, inner, depth + 1);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {other}");
        }
    }
}
