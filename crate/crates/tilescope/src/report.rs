//! Versioned JSON report documents.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "tilescope-report/1";

/// Which rule (or substitution) a report was computed from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceIdentity {
    /// Bundled name or file path as given on the command line.
    pub name: String,
    pub sha256: String,
}

impl SourceIdentity {
    pub fn new(name: &str, text: &str) -> Self {
        Self { name: name.to_string(), sha256: sha256_hex(text.as_bytes()) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

/// Deterministic for identical inputs: keys are emitted in sorted order and
/// timing is only included on request.
#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: String,
    pub source: Option<SourceIdentity>,
    pub params: Value,
    pub result: Value,
    pub passed: bool,
    /// Violated invariants, if any.
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl ReportDocument {
    pub fn new(command: &str, source: Option<SourceIdentity>, params: Value) -> Self {
        Self {
            schema: SCHEMA,
            tool: Tool { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") },
            command: command.to_string(),
            source,
            params,
            result: Value::Null,
            passed: true,
            violations: Vec::new(),
            timing_ms: None,
        }
    }

    /// Records a checked invariant; a failed one marks the report failed.
    pub fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.violations.push(what.into());
        }
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
        text.push('\n');
        text
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
