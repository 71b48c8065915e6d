use std::time::Duration;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn build(
    subcommand: &str,
    argv: &[String],
    seed: Option<u64>,
    elapsed: Duration,
    files: &[(String, Vec<u8>)],
) -> Value {
    let digests: serde_json::Map<String, Value> =
        files.iter().map(|(name, body)| (name.clone(), Value::String(sha256_hex(body)))).collect();
    json!({
        "subcommand": subcommand,
        "parameters": argv.get(1..).unwrap_or_default(),
        "seed": seed,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "wall_clock_seconds": elapsed.as_secs_f64(),
        "outputs": digests,
    })
}
