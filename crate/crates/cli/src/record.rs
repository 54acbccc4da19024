//! Replayable run records.
//!
//! Every subcommand can write a JSON record carrying its exact config, a
//! build identifier, and its results. `replay` reruns the embedded config
//! and demands bit-identical results: every code path is seeded and uses
//! deterministic reductions, so exact equality is the contract for both the
//! exact and the floating pipelines.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

pub fn build_id() -> String {
    format!("polyrefute-{}", env!("CARGO_PKG_VERSION"))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub subcommand: String,
    pub config: Value,
    pub build_id: String,
    pub wall_time_secs: f64,
    pub results: Value,
    pub summary: Value,
}

impl RunRecord {
    pub fn save(&self, path: &Path) -> Result<()> {
        let data = serde_json::to_string_pretty(self)?;
        std::fs::write(path, data).with_context(|| format!("writing record {path:?}"))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunRecord> {
        let data =
            std::fs::read_to_string(path).with_context(|| format!("reading record {path:?}"))?;
        let record: RunRecord =
            serde_json::from_str(&data).with_context(|| format!("parsing record {path:?}"))?;
        Ok(record)
    }
}

/// First JSON path where two values differ, if any.
pub fn first_difference(a: &Value, b: &Value, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Object(ma), Value::Object(mb)) => {
            for key in ma.keys().chain(mb.keys()) {
                let pa = ma.get(key).unwrap_or(&Value::Null);
                let pb = mb.get(key).unwrap_or(&Value::Null);
                if let Some(d) = first_difference(pa, pb, &format!("{path}.{key}")) {
                    return Some(d);
                }
            }
            None
        }
        (Value::Array(va), Value::Array(vb)) => {
            if va.len() != vb.len() {
                return Some(format!("{path}: length {} vs {}", va.len(), vb.len()));
            }
            for (i, (x, y)) in va.iter().zip(vb).enumerate() {
                if let Some(d) = first_difference(x, y, &format!("{path}[{i}]")) {
                    return Some(d);
                }
            }
            None
        }
        _ => {
            if a == b {
                None
            } else {
                Some(format!("{path}: {a} vs {b}"))
            }
        }
    }
}
