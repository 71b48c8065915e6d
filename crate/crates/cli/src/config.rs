//! `--config FILE`: `key=value` lines become `--key value` flags unless the
//! command line already sets them.

use std::fs;

use anyhow::{bail, Context, Result};

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn already_set(argv: &[String], flag: &str) -> bool {
    argv.iter().any(|a| a == flag || a.starts_with(&format!("{flag}=")))
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value", n + 1);
        };
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

pub fn merge_config(mut argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading --config {path}"))?;
    let mut extra = Vec::new();
    for (k, v) in parse_config(&text)? {
        let flag = format!("--{k}");
        if already_set(&argv, &flag) {
            continue;
        }
        match v.as_str() {
            "true" => extra.push(flag),
            "false" => {}
            _ => {
                extra.push(flag);
                extra.push(v);
            }
        }
    }
    argv.extend(extra);
    Ok(argv)
}
