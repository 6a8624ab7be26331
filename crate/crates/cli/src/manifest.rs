//! Run manifest written at the root of the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub name: String,
    pub seconds: f64,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub tool_version: String,
    pub config: BTreeMap<String, String>,
    /// Input file name → SHA-256.
    pub inputs: BTreeMap<String, String>,
    pub steps: Vec<StepRecord>,
}

impl RunManifest {
    pub fn new(config: BTreeMap<String, String>, inputs: BTreeMap<String, String>) -> Self {
        RunManifest {
            manifest_version: MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            inputs,
            steps: Vec::new(),
        }
    }

    /// Keeps step records of an earlier manifest in the same directory that
    /// this run does not replace.
    pub fn merge_previous(&mut self, out: &Path) {
        let Ok(text) = fs::read_to_string(out.join(MANIFEST_FILE)) else {
            return;
        };
        let Ok(prev) = serde_json::from_str::<RunManifest>(&text) else {
            return;
        };
        if prev.manifest_version != MANIFEST_VERSION {
            return;
        }
        let mut steps: Vec<StepRecord> = prev
            .steps
            .into_iter()
            .filter(|s| !self.steps.iter().any(|t| t.name == s.name))
            .collect();
        steps.append(&mut self.steps);
        self.steps = steps;
    }

    /// Every output file → hash across steps.
    pub fn output_hashes(&self) -> BTreeMap<String, String> {
        self.steps
            .iter()
            .flat_map(|s| s.outputs.iter().map(|(k, v)| (k.clone(), v.clone())))
            .collect()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Hashes every file under `dir` keyed by its path relative to `dir`.
pub fn hash_tree(dir: &Path) -> std::io::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap_or(&p).to_string_lossy().replace('\\', "/");
                out.insert(rel, hash_file(&p)?);
            }
        }
    }
    Ok(out)
}
