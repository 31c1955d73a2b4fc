use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "cayley-srg-report/1";

#[derive(Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

/// Self-contained JSON report. `content_hash` covers `command`, `args` and
/// `result`, so re-running the same arguments reproduces it.
#[derive(Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: String,
    pub args: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub result: Value,
    pub content_hash: String,
    pub elapsed_ms: u128,
}

impl RunReport {
    pub fn new(command: &str, args: Value, pass: bool, error: Option<String>, result: Value, elapsed_ms: u128) -> Self {
        let content_hash = hash_json(&serde_json::json!({
            "command": command,
            "args": args,
            "pass": pass,
            "error": error,
            "result": result,
        }));
        RunReport {
            schema: SCHEMA,
            tool: Tool {
                name: "cayley-srg",
                version: env!("CARGO_PKG_VERSION"),
            },
            command: command.to_string(),
            args,
            pass,
            error,
            result,
            content_hash,
            elapsed_ms,
        }
    }
}

pub fn hash_json(v: &Value) -> String {
    hex::encode(Sha256::digest(v.to_string().as_bytes()))
}
