//! Loading, grouping, and writing experiment observations.
//!
//! Two on-disk formats carry the same flat schema: CSV with a header row,
//! and JSON Lines with one object per line. Canonical columns are `run_id`,
//! `n_params`, `d_tokens`, `val_loss`, plus exactly one of `language` or the
//! `direction_src`/`direction_dst` pair per row, and an optional `weight`
//! (default 1). Unknown columns are ignored with a warning rather than
//! rejected, so upstream exports can carry extra bookkeeping fields.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{DirectionTag, ExperimentRecord, LanguageTag, Registry, Tag};
use crate::synergy::PairObservation;

/// Column names the loader understands, in canonical write order.
const KNOWN_COLUMNS: [&str; 8] = [
    "run_id",
    "language",
    "direction_src",
    "direction_dst",
    "n_params",
    "d_tokens",
    "val_loss",
    "weight",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// Guesses the format from a file extension (`csv`, `jsonl`, `ndjson`).
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "jsonl" | "ndjson" => Some(Format::Jsonl),
            _ => None,
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        })
    }
}

/// Where a dataset came from and what it hashed to at load time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub path: String,
    pub format: Format,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<ExperimentRecord>,
    pub registry: Registry,
    pub provenance: Provenance,
    /// Non-fatal observations made while loading: ignored columns,
    /// registry extensions. Deterministic order.
    pub warnings: Vec<String>,
}

/// Flat row shape shared by both formats.
#[derive(Debug, Deserialize)]
struct RawRow {
    run_id: String,
    #[serde(default)]
    language: Option<String>,
    #[serde(default)]
    direction_src: Option<String>,
    #[serde(default)]
    direction_dst: Option<String>,
    n_params: f64,
    d_tokens: f64,
    val_loss: f64,
    #[serde(default)]
    weight: Option<f64>,
}

fn non_empty(field: &Option<String>) -> Option<&str> {
    field.as_deref().map(str::trim).filter(|s| !s.is_empty())
}

impl RawRow {
    fn into_record(self) -> Result<ExperimentRecord> {
        let language = non_empty(&self.language);
        let src = non_empty(&self.direction_src);
        let dst = non_empty(&self.direction_dst);
        let tag = match (language, src, dst) {
            (Some(lang), None, None) => Tag::Language(LanguageTag::new(lang)?),
            (None, Some(s), Some(d)) => {
                Tag::Direction(DirectionTag::new(LanguageTag::new(s)?, LanguageTag::new(d)?)?)
            }
            (None, None, None) => {
                return Err(Error::Schema(
                    "row needs a language or a direction_src/direction_dst pair".into(),
                ))
            }
            (Some(_), _, _) => {
                return Err(Error::Schema(
                    "row sets both language and direction columns; use exactly one".into(),
                ))
            }
            _ => {
                return Err(Error::Schema(
                    "direction rows need both direction_src and direction_dst".into(),
                ))
            }
        };
        ExperimentRecord::new(
            self.run_id,
            tag,
            self.n_params,
            self.d_tokens,
            self.val_loss,
            self.weight.unwrap_or(1.0),
        )
    }
}

/// Prefixes row-scoped errors with `path:line:` without changing their kind.
fn at_line(path: &Path, line: u64, err: Error) -> Error {
    let ctx = format!("{}:{line}: ", path.display());
    match err {
        Error::Validation(m) => Error::Validation(format!("{ctx}{m}")),
        Error::Schema(m) => Error::Schema(format!("{ctx}{m}")),
        Error::Conflict(m) => Error::Conflict(format!("{ctx}{m}")),
        other => other,
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Loads experiment records, building provenance and a registry that starts
/// from the canonical languages and grows (with a warning) as new ids appear.
pub fn load_dataset(path: impl AsRef<Path>, format: Format) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let sha256 = sha256_hex(&bytes);

    let mut warnings = Vec::new();
    let rows = match format {
        Format::Csv => parse_csv_rows(path, &bytes, &mut warnings)?,
        Format::Jsonl => parse_jsonl_rows(path, &bytes, &mut warnings)?,
    };
    if rows.is_empty() {
        return Err(Error::Schema(format!(
            "{}: no data rows",
            path.display()
        )));
    }

    let mut records = Vec::with_capacity(rows.len());
    let mut seen: BTreeMap<String, u64> = BTreeMap::new();
    let mut registry = Registry::canonical();
    for (line, raw) in rows {
        let record = raw.into_record().map_err(|e| at_line(path, line, e))?;
        if let Some(first) = seen.insert(record.run_id.clone(), line) {
            return Err(Error::Conflict(format!(
                "{}:{line}: duplicate run_id {:?} (first seen at line {first})",
                path.display(),
                record.run_id
            )));
        }
        for lang in record.tag.languages() {
            if registry.extend_with(lang.clone()) {
                warnings.push(format!(
                    "registry extended with non-canonical language {:?}",
                    lang.as_str()
                ));
            }
        }
        records.push(record);
    }

    Ok(Dataset {
        provenance: Provenance {
            path: path.display().to_string(),
            format,
            rows: records.len(),
            sha256,
        },
        records,
        registry,
        warnings,
    })
}

fn parse_csv_rows(
    path: &Path,
    bytes: &[u8],
    warnings: &mut Vec<String>,
) -> Result<Vec<(u64, RawRow)>> {
    let mut reader = csv::Reader::from_reader(bytes);
    let headers = reader.headers()?.clone();
    check_columns(
        path,
        headers.iter().map(str::to_string).collect(),
        warnings,
    )?;

    let mut rows = Vec::new();
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        let raw: RawRow = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::Schema(format!("{}:{line}: {e}", path.display())))?;
        rows.push((line, raw));
    }
    Ok(rows)
}

fn parse_jsonl_rows(
    path: &Path,
    bytes: &[u8],
    warnings: &mut Vec<String>,
) -> Result<Vec<(u64, RawRow)>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::Schema(format!("{}: not valid UTF-8: {e}", path.display())))?;
    let known: BTreeSet<&str> = KNOWN_COLUMNS.into_iter().collect();
    let mut unknown = BTreeSet::new();
    let mut rows = Vec::new();
    for (idx, line_text) in text.lines().enumerate() {
        let line = idx as u64 + 1;
        let trimmed = line_text.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(trimmed)
            .map_err(|e| Error::Schema(format!("{}:{line}: {e}", path.display())))?;
        if let Some(object) = value.as_object() {
            for key in object.keys() {
                if !known.contains(key.as_str()) {
                    unknown.insert(key.clone());
                }
            }
        }
        let raw: RawRow = serde_json::from_value(value)
            .map_err(|e| Error::Schema(format!("{}:{line}: {e}", path.display())))?;
        rows.push((line, raw));
    }
    for key in unknown {
        warnings.push(format!("ignored unknown field {key:?}"));
    }
    Ok(rows)
}

/// Validates a CSV header: required columns present, unknown ones warned.
fn check_columns(path: &Path, headers: Vec<String>, warnings: &mut Vec<String>) -> Result<()> {
    let present: BTreeSet<&str> = headers.iter().map(String::as_str).collect();
    let mut missing: Vec<&str> = ["run_id", "n_params", "d_tokens", "val_loss"]
        .into_iter()
        .filter(|c| !present.contains(c))
        .collect();
    let has_direction = present.contains("direction_src") && present.contains("direction_dst");
    if !present.contains("language") && !has_direction {
        missing.push("language (or direction_src/direction_dst)");
    }
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "{}: missing required column(s): {}",
            path.display(),
            missing.join(", ")
        )));
    }
    let known: BTreeSet<&str> = KNOWN_COLUMNS.into_iter().collect();
    for header in &headers {
        if !known.contains(header.as_str()) {
            warnings.push(format!("ignored unknown column {header:?}"));
        }
    }
    Ok(())
}

/// Flat output shape for CSV; field order defines the column order.
#[derive(Serialize)]
struct RawRowOut<'a> {
    run_id: &'a str,
    language: Option<&'a str>,
    direction_src: Option<&'a str>,
    direction_dst: Option<&'a str>,
    n_params: f64,
    d_tokens: f64,
    val_loss: f64,
    weight: f64,
}

impl<'a> From<&'a ExperimentRecord> for RawRowOut<'a> {
    fn from(r: &'a ExperimentRecord) -> Self {
        let (language, direction_src, direction_dst) = match &r.tag {
            Tag::Language(l) => (Some(l.as_str()), None, None),
            Tag::Direction(d) => (None, Some(d.source().as_str()), Some(d.target().as_str())),
        };
        RawRowOut {
            run_id: &r.run_id,
            language,
            direction_src,
            direction_dst,
            n_params: r.n_params,
            d_tokens: r.d_tokens,
            val_loss: r.val_loss,
            weight: r.weight,
        }
    }
}

/// Writes records in a shape [`load_dataset`] reads back identically.
pub fn write_dataset(
    path: impl AsRef<Path>,
    format: Format,
    records: &[ExperimentRecord],
) -> Result<()> {
    let path = path.as_ref();
    let mut out: Vec<u8> = Vec::new();
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(&mut out);
            for record in records {
                writer.serialize(RawRowOut::from(record))?;
            }
            writer.flush()?;
            drop(writer);
        }
        Format::Jsonl => {
            for record in records {
                let mut map = serde_json::Map::new();
                let row = RawRowOut::from(record);
                map.insert("run_id".into(), row.run_id.into());
                if let Some(lang) = row.language {
                    map.insert("language".into(), lang.into());
                }
                if let (Some(src), Some(dst)) = (row.direction_src, row.direction_dst) {
                    map.insert("direction_src".into(), src.into());
                    map.insert("direction_dst".into(), dst.into());
                }
                map.insert("n_params".into(), row.n_params.into());
                map.insert("d_tokens".into(), row.d_tokens.into());
                map.insert("val_loss".into(), row.val_loss.into());
                map.insert("weight".into(), row.weight.into());
                out.extend_from_slice(serde_json::to_string(&map)?.as_bytes());
                out.push(b'\n');
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Groups records by tag, preserving input order within each group.
pub fn group_by_tag(records: &[ExperimentRecord]) -> BTreeMap<Tag, Vec<ExperimentRecord>> {
    let mut groups: BTreeMap<Tag, Vec<ExperimentRecord>> = BTreeMap::new();
    for record in records {
        groups.entry(record.tag.clone()).or_default().push(record.clone());
    }
    groups
}

/// Row shape for paired mixed-training results. All four columns required.
#[derive(Debug, Deserialize)]
struct RawPair {
    target: String,
    auxiliary: String,
    mixed_loss: f64,
    baseline_loss: f64,
}

impl RawPair {
    fn into_observation(self) -> Result<PairObservation> {
        PairObservation::new(
            LanguageTag::new(&self.target)?,
            LanguageTag::new(&self.auxiliary)?,
            self.mixed_loss,
            Some(self.baseline_loss),
        )
    }
}

/// Loads pair observations (`target`, `auxiliary`, `mixed_loss`,
/// `baseline_loss`) for synergy analysis. Every baseline is present by
/// construction; duplicate or inconsistent pairs are left for
/// `compute_synergy` to reject with full context. Extra columns are ignored.
pub fn load_paired_runs(path: impl AsRef<Path>, format: Format) -> Result<Vec<PairObservation>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let mut observations = Vec::new();
    match format {
        Format::Csv => {
            let mut reader = csv::Reader::from_reader(bytes.as_slice());
            let headers = reader.headers()?.clone();
            let present: BTreeSet<&str> = headers.iter().collect();
            let missing: Vec<&str> = ["target", "auxiliary", "mixed_loss", "baseline_loss"]
                .into_iter()
                .filter(|c| !present.contains(c))
                .collect();
            if !missing.is_empty() {
                return Err(Error::Schema(format!(
                    "{}: missing required column(s): {}",
                    path.display(),
                    missing.join(", ")
                )));
            }
            let mut record = csv::StringRecord::new();
            while reader.read_record(&mut record)? {
                let line = record.position().map_or(0, |p| p.line());
                let raw: RawPair = record
                    .deserialize(Some(&headers))
                    .map_err(|e| Error::Schema(format!("{}:{line}: {e}", path.display())))?;
                observations.push(raw.into_observation().map_err(|e| at_line(path, line, e))?);
            }
        }
        Format::Jsonl => {
            let text = std::str::from_utf8(&bytes).map_err(|e| {
                Error::Schema(format!("{}: not valid UTF-8: {e}", path.display()))
            })?;
            for (idx, line_text) in text.lines().enumerate() {
                let line = idx as u64 + 1;
                let trimmed = line_text.trim();
                if trimmed.is_empty() {
                    continue;
                }
                let raw: RawPair = serde_json::from_str(trimmed)
                    .map_err(|e| Error::Schema(format!("{}:{line}: {e}", path.display())))?;
                observations.push(raw.into_observation().map_err(|e| at_line(path, line, e))?);
            }
        }
    }
    if observations.is_empty() {
        return Err(Error::Schema(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(observations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synergy::compute_synergy;
    use proptest::prelude::*;

    fn lang(id: &str) -> Tag {
        Tag::Language(LanguageTag::new(id).unwrap())
    }

    fn direction(src: &str, dst: &str) -> Tag {
        Tag::Direction(
            DirectionTag::new(LanguageTag::new(src).unwrap(), LanguageTag::new(dst).unwrap())
                .unwrap(),
        )
    }

    fn sample_records() -> Vec<ExperimentRecord> {
        vec![
            ExperimentRecord::new("run-a", lang("python"), 1.1e8, 2e9, 0.93, 1.0).unwrap(),
            ExperimentRecord::new("run-b", lang("python"), 4.0e8, 8e9, 0.81, 2.5).unwrap(),
            ExperimentRecord::new(
                "run-c",
                direction("python", "java"),
                1.1e8,
                2e9,
                0.0743835,
                1.0,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn format_is_guessed_from_extensions() {
        assert_eq!(Format::from_path(Path::new("runs.csv")), Some(Format::Csv));
        assert_eq!(
            Format::from_path(Path::new("runs.JSONL")),
            Some(Format::Jsonl)
        );
        assert_eq!(
            Format::from_path(Path::new("runs.ndjson")),
            Some(Format::Jsonl)
        );
        assert_eq!(Format::from_path(Path::new("runs.txt")), None);
        assert_eq!(Format::from_path(Path::new("runs")), None);
    }

    #[test]
    fn csv_round_trip_preserves_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let records = sample_records();
        write_dataset(&path, Format::Csv, &records).unwrap();
        let dataset = load_dataset(&path, Format::Csv).unwrap();
        assert_eq!(dataset.records, records);
        assert_eq!(dataset.provenance.rows, 3);
        assert_eq!(dataset.provenance.format, Format::Csv);
        assert_eq!(dataset.provenance.sha256.len(), 64);
        assert!(dataset.warnings.is_empty());
    }

    #[test]
    fn jsonl_round_trip_preserves_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.jsonl");
        let records = sample_records();
        write_dataset(&path, Format::Jsonl, &records).unwrap();
        let dataset = load_dataset(&path, Format::Jsonl).unwrap();
        assert_eq!(dataset.records, records);
        assert_eq!(dataset.provenance.format, Format::Jsonl);
    }

    #[test]
    fn grouping_preserves_order_within_tags() {
        let records = sample_records();
        let groups = group_by_tag(&records);
        assert_eq!(groups.len(), 2);
        let python = &groups[&lang("python")];
        assert_eq!(python.len(), 2);
        assert_eq!(python[0].run_id, "run-a");
        assert_eq!(python[1].run_id, "run-b");
        assert_eq!(groups[&direction("python", "java")].len(), 1);
    }

    #[test]
    fn duplicate_run_ids_are_conflicts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        std::fs::write(
            &path,
            "run_id,language,n_params,d_tokens,val_loss\n\
             run-a,python,1e8,2e9,0.9\n\
             run-a,java,1e8,2e9,0.8\n",
        )
        .unwrap();
        match load_dataset(&path, Format::Csv) {
            Err(Error::Conflict(msg)) => {
                assert!(msg.contains("run-a"), "{msg}");
                assert!(msg.contains(":3:"), "{msg}");
                assert!(msg.contains("line 2"), "{msg}");
            }
            other => panic!("expected a conflict, got {other:?}"),
        }
    }

    #[test]
    fn language_and_direction_are_mutually_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        std::fs::write(
            &path,
            "run_id,language,direction_src,direction_dst,n_params,d_tokens,val_loss\n\
             run-a,python,python,java,1e8,2e9,0.9\n",
        )
        .unwrap();
        match load_dataset(&path, Format::Csv) {
            Err(Error::Schema(msg)) => {
                assert!(msg.contains(":2:"), "{msg}");
                assert!(msg.contains("exactly one"), "{msg}");
            }
            other => panic!("expected a schema error, got {other:?}"),
        }

        std::fs::write(
            &path,
            "run_id,language,direction_src,direction_dst,n_params,d_tokens,val_loss\n\
             run-a,,python,,1e8,2e9,0.9\n",
        )
        .unwrap();
        match load_dataset(&path, Format::Csv) {
            Err(Error::Schema(msg)) => {
                assert!(msg.contains("both direction_src and direction_dst"), "{msg}")
            }
            other => panic!("expected a schema error, got {other:?}"),
        }

        std::fs::write(
            &path,
            "run_id,language,direction_src,direction_dst,n_params,d_tokens,val_loss\n\
             run-a,,,,1e8,2e9,0.9\n",
        )
        .unwrap();
        match load_dataset(&path, Format::Csv) {
            Err(Error::Schema(msg)) => {
                assert!(msg.contains("needs a language or a direction"), "{msg}")
            }
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_columns_warn_but_rows_still_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        std::fs::write(
            &path,
            "run_id,language,n_params,d_tokens,val_loss,notes\n\
             run-a,python,1e8,2e9,0.9,keep me\n",
        )
        .unwrap();
        let dataset = load_dataset(&path, Format::Csv).unwrap();
        assert_eq!(dataset.records.len(), 1);
        assert_eq!(dataset.warnings, vec!["ignored unknown column \"notes\""]);
    }

    #[test]
    fn registry_grows_for_new_languages_with_a_warning() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.jsonl");
        std::fs::write(
            &path,
            r#"{"run_id":"run-a","language":"ada","n_params":1e8,"d_tokens":2e9,"val_loss":0.9}
{"run_id":"run-b","language":"python","n_params":1e8,"d_tokens":2e9,"val_loss":0.8}
"#,
        )
        .unwrap();
        let dataset = load_dataset(&path, Format::Jsonl).unwrap();
        let ada = LanguageTag::new("ada").unwrap();
        assert!(dataset.registry.contains(&ada));
        assert_eq!(
            dataset.warnings,
            vec!["registry extended with non-canonical language \"ada\""]
        );
        // canonical ids never warn
        assert!(dataset.registry.contains(&LanguageTag::new("python").unwrap()));
    }

    #[test]
    fn row_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        std::fs::write(
            &path,
            "run_id,language,n_params,d_tokens,val_loss\n\
             run-a,python,1e8,2e9,0.9\n\
             run-b,python,-3,2e9,0.8\n",
        )
        .unwrap();
        match load_dataset(&path, Format::Csv) {
            Err(Error::Validation(msg)) => {
                assert!(msg.contains(":3:"), "{msg}");
                assert!(msg.contains("n_params"), "{msg}");
            }
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn broken_jsonl_reports_its_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.jsonl");
        std::fs::write(
            &path,
            "{\"run_id\":\"run-a\",\"language\":\"python\",\"n_params\":1e8,\"d_tokens\":2e9,\"val_loss\":0.9}\nnot json\n",
        )
        .unwrap();
        match load_dataset(&path, Format::Jsonl) {
            Err(Error::Schema(msg)) => assert!(msg.contains(":2:"), "{msg}"),
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn missing_columns_fail_before_any_row_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        std::fs::write(&path, "run_id,language,n_params,d_tokens\nrun-a,python,1e8,2e9\n")
            .unwrap();
        match load_dataset(&path, Format::Csv) {
            Err(Error::Schema(msg)) => assert!(msg.contains("val_loss"), "{msg}"),
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn header_only_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        std::fs::write(&path, "run_id,language,n_params,d_tokens,val_loss\n").unwrap();
        match load_dataset(&path, Format::Csv) {
            Err(Error::Schema(msg)) => assert!(msg.contains("no data rows"), "{msg}"),
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn paired_runs_load_with_baselines_attached() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.csv");
        std::fs::write(
            &path,
            "target,auxiliary,mixed_loss,baseline_loss\n\
             java,csharp,0.718,0.903\n\
             java,javascript,0.789,0.903\n",
        )
        .unwrap();
        let observations = load_paired_runs(&path, Format::Csv).unwrap();
        assert_eq!(observations.len(), 2);
        assert_eq!(observations[0].baseline_loss, Some(0.903));
        assert_eq!(observations[0].mixed_loss, 0.718);

        let matrix = compute_synergy(&observations).unwrap();
        let java = matrix.index_of(&LanguageTag::new("java").unwrap()).unwrap();
        let csharp = matrix.index_of(&LanguageTag::new("csharp").unwrap()).unwrap();
        let delta = matrix.delta[java][csharp].unwrap();
        assert!((delta - 0.185).abs() < 1e-12);
    }

    #[test]
    fn paired_runs_reject_bad_baselines_with_context() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.csv");
        std::fs::write(
            &path,
            "target,auxiliary,mixed_loss,baseline_loss\njava,csharp,0.718,0\n",
        )
        .unwrap();
        match load_paired_runs(&path, Format::Csv) {
            Err(Error::Validation(msg)) => {
                assert!(msg.contains(":2:"), "{msg}");
                assert!(msg.contains("baseline"), "{msg}");
            }
            other => panic!("expected a validation error, got {other:?}"),
        }

        std::fs::write(&path, "target,auxiliary,mixed_loss\njava,csharp,0.718\n").unwrap();
        match load_paired_runs(&path, Format::Csv) {
            Err(Error::Schema(msg)) => assert!(msg.contains("baseline_loss"), "{msg}"),
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn paired_runs_accept_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.jsonl");
        std::fs::write(
            &path,
            r#"{"target":"javascript","auxiliary":"typescript","mixed_loss":0.517,"baseline_loss":0.542}
"#,
        )
        .unwrap();
        let observations = load_paired_runs(&path, Format::Jsonl).unwrap();
        assert_eq!(observations.len(), 1);
        assert_eq!(observations[0].target.as_str(), "javascript");
    }

    proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(32))]

        #[test]
        fn round_trips_are_lossless(
            rows in proptest::collection::vec(
                (
                    0usize..4,
                    proptest::bool::ANY,
                    1e6f64..1e12,
                    1e7f64..1e13,
                    0.01f64..10.0,
                    0.0f64..5.0,
                ),
                1..12,
            ),
        ) {
            let ids = ["python", "java", "go", "rust"];
            // indexes keep run ids unique regardless of sampled contents
            let records: Vec<ExperimentRecord> = rows
                .iter()
                .enumerate()
                .map(|(i, &(pick, is_dir, n, d, loss, weight))| {
                    let tag = if is_dir {
                        direction(ids[pick], ids[(pick + 1) % 4])
                    } else {
                        lang(ids[pick])
                    };
                    ExperimentRecord::new(format!("run-{i}"), tag, n, d, loss, weight).unwrap()
                })
                .collect();
            let dir = tempfile::tempdir().unwrap();
            for format in [Format::Csv, Format::Jsonl] {
                let path = dir.path().join(format!("runs.{format}"));
                write_dataset(&path, format, &records).unwrap();
                let dataset = load_dataset(&path, format).unwrap();
                prop_assert_eq!(&dataset.records, &records);
            }
        }
    }
}
