//! On-disk artifact schemas shared by the subcommands.
//!
//! Every artifact is versioned JSON with deterministic field order (structs
//! plus `BTreeMap`s) and no timestamps, so rerunning a command on identical
//! inputs reproduces the bytes exactly. Numbers are written in shortest
//! round-trip form and parsed back bit-exactly.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use slk_core::ingest::Provenance;
use slk_core::model::{AllocationPlan, MixtureTemplate, PowerLawParams, SynergyMatrix, Tag};

pub const SCHEMA_VERSION: u32 = 1;

/// Fitted (or fixture-exported) laws keyed by tag key.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitsArtifact {
    pub schema_version: u32,
    pub preset: String,
    pub group_by: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
    pub fits: BTreeMap<String, FitEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitEntry {
    pub tag: Tag,
    pub params: PowerLawParams,
    /// Present for real fits; absent when the params come from a bundled
    /// fixture rather than an optimization run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stats: Option<FitStats>,
    /// Fixture name for exported constants.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitStats {
    pub objective_value: f64,
    pub n_points: usize,
    pub init_index: usize,
    pub converged: bool,
    pub log_scale: bool,
    pub rmse: f64,
    pub r2: f64,
    pub max_abs_residual: f64,
}

/// Synergy matrix with the tau source recorded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynergyArtifact {
    pub schema_version: u32,
    /// "relative" or "absolute": which deltas back the tau field.
    pub tau_mode: String,
    pub matrix: SynergyMatrix,
    /// Ordered (row, col) pairs without observations, zero-filled in tau.
    pub filled_cells: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
}

/// Lineage pointer to another artifact on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactRef {
    pub path: String,
    pub sha256: String,
}

/// Optimized allocation plus everything needed to re-evaluate it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanArtifact {
    pub schema_version: u32,
    pub plan: AllocationPlan,
    pub template: MixtureTemplate,
    /// Shared power-law coefficients used by the mixture evaluation.
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub floor: Option<f64>,
    pub seed: u64,
    pub starts: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fits_ref: Option<ArtifactRef>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau_ref: Option<ArtifactRef>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .with_context(|| format!("serializing {}", path.display()))?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
}

/// Reads an artifact and rejects schema versions this build does not know.
pub fn read_versioned<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let value: serde_json::Value = read_json(path)?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => bail!(
            "{}: schema_version {v} is not supported (expected {SCHEMA_VERSION})",
            path.display()
        ),
        None => bail!("{}: missing schema_version field", path.display()),
    }
    serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))
}

pub fn artifact_ref(path: &Path) -> Result<ArtifactRef> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    let mut sha256 = String::with_capacity(64);
    for byte in digest {
        sha256.push_str(&format!("{byte:02x}"));
    }
    Ok(ArtifactRef {
        path: path.display().to_string(),
        sha256,
    })
}
