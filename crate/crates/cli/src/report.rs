//! Machine-readable run reports. JSON output is a pure function of the
//! inputs and budgets (wall time appears in human output only), so equal
//! invocations produce byte-identical reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Debug)]
pub struct Budgets {
    pub steps: u64,
    pub degree: usize,
    pub length: usize,
}

#[derive(Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Resolved inputs, sufficient to reproduce the run.
    pub inputs: Value,
    /// SHA-256 of the canonical JSON encoding of `inputs`.
    pub inputs_digest: String,
    pub budgets: Budgets,
    pub verdict: String,
    /// Certificates, witnesses, and measurements backing the verdict.
    pub details: Value,
}

pub fn digest(inputs: &Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("value serializes");
    let hash = Sha256::digest(&bytes);
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunReport {
    pub fn new(
        command: &str,
        inputs: Value,
        budgets: Budgets,
        verdict: &str,
        details: Value,
    ) -> RunReport {
        let inputs_digest = digest(&inputs);
        RunReport {
            command: command.to_string(),
            inputs,
            inputs_digest,
            budgets,
            verdict: verdict.to_string(),
            details,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("verdict: {}\n", self.verdict));
        render_value(&mut out, "", &self.details);
        out
    }
}

fn render_value(out: &mut String, indent: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{indent}{k}:\n"));
                        render_value(out, &format!("{indent}  "), val);
                    }
                    _ => out.push_str(&format!("{indent}{k}: {}\n", scalar(val))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{indent}-\n"));
                        render_value(out, &format!("{indent}  "), item);
                    }
                    _ => out.push_str(&format!("{indent}- {}\n", scalar(item))),
                }
            }
        }
        _ => out.push_str(&format!("{indent}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
