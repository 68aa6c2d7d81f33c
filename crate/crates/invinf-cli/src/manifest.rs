//! Run manifests: every output file gets a sibling `<name>.manifest.json`
//! recording the command, resolved configuration, seed, input hashes, tool
//! version, and the policy choices that make reruns auditable.

use crate::error::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Resolved flag/config snapshot for the run.
    pub config: serde_json::Value,
    /// SHA-256 of every input file.
    pub input_hashes: BTreeMap<String, String>,
    pub policy: PolicyBlock,
    /// Free-form counters: funnel totals, rejects, diagnostics.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub counters: BTreeMap<String, u64>,
}

/// The fixed methodological choices baked into this tool.
#[derive(Debug, Serialize)]
pub struct PolicyBlock {
    pub denominator: &'static str,
    pub robust_se: &'static str,
    pub matching: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub legend: Option<String>,
}

impl Default for PolicyBlock {
    fn default() -> Self {
        PolicyBlock {
            denominator: "all-tokens",
            robust_se: "HC1",
            matching: "seeded-uniform-without-replacement",
            legend: None,
        }
    }
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            config,
            input_hashes: BTreeMap::new(),
            policy: PolicyBlock::default(),
            counters: BTreeMap::new(),
        }
    }

    pub fn hash_input(&mut self, path: &Path) -> Result<(), CliError> {
        let digest = sha256_file(path)?;
        self.input_hashes
            .insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn count(&mut self, key: &str, value: u64) {
        self.counters.insert(key.to_string(), value);
    }

    /// Writes `<output>.manifest.json` beside the output file.
    pub fn write_beside(&self, output: &Path) -> Result<PathBuf, CliError> {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        let path = output.with_file_name(name);
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json)?;
        Ok(path)
    }
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut file = std::fs::File::open(path)
        .map_err(|e| CliError::io(format!("cannot hash {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lands_beside_output() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.jsonl");
        std::fs::write(&input, b"{}\n").unwrap();
        let output = dir.path().join("out.csv");
        std::fs::write(&output, b"id\n").unwrap();

        let mut m = RunManifest::new("analyze", serde_json::json!({"min_words": 100}));
        m.seed = Some(42);
        m.hash_input(&input).unwrap();
        m.count("kept", 3);
        let path = m.write_beside(&output).unwrap();
        assert_eq!(path.file_name().unwrap(), "out.csv.manifest.json");

        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(parsed["command"], "analyze");
        assert_eq!(parsed["seed"], 42);
        assert_eq!(parsed["policy"]["denominator"], "all-tokens");
        assert_eq!(parsed["counters"]["kept"], 3);
        let hash = parsed["input_hashes"][input.display().to_string()]
            .as_str()
            .unwrap();
        assert_eq!(hash.len(), 64);
    }

    #[test]
    fn identical_inputs_hash_identically() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        std::fs::write(&a, b"same bytes").unwrap();
        std::fs::write(&b, b"same bytes").unwrap();
        assert_eq!(sha256_file(&a).unwrap(), sha256_file(&b).unwrap());
    }
}
