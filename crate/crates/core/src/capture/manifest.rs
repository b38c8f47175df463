//! Sidecar manifests (`path,label` CSV) and corpus directory IO.
//!
//! Pcap files carry no label, so corpora travel as a directory of captures
//! plus a manifest mapping each path to its traffic-type label. Relative
//! paths resolve against the manifest's own directory.

use std::fs;
use std::path::{Path, PathBuf};

use super::{parse_capture, write_capture, CaptureError, CaptureFile};
use crate::exec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path exactly as written in the manifest (also used as origin id).
    pub raw_path: String,
    /// Path resolved against the manifest directory.
    pub path: PathBuf,
    pub label: String,
}

pub fn read_manifest(manifest_path: &Path) -> Result<Vec<ManifestEntry>, CaptureError> {
    let bad = |message: String| CaptureError::Manifest {
        path: manifest_path.display().to_string(),
        message,
    };
    let mut reader = csv::Reader::from_path(manifest_path).map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() < 2 || &headers[0] != "path" || &headers[1] != "label" {
        return Err(bad(format!(
            "expected header `path,label`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() < 2 {
            return Err(bad(format!("row {:?} has fewer than 2 fields", record)));
        }
        let raw_path = record[0].to_owned();
        let rel = PathBuf::from(&raw_path);
        let path = if rel.is_absolute() { rel } else { base.join(rel) };
        entries.push(ManifestEntry {
            raw_path,
            path,
            label: record[1].to_owned(),
        });
    }
    Ok(entries)
}

pub fn write_manifest(
    manifest_path: &Path,
    entries: &[(String, String)],
) -> Result<(), CaptureError> {
    let bad = |message: String| CaptureError::Manifest {
        path: manifest_path.display().to_string(),
        message,
    };
    let mut writer = csv::Writer::from_path(manifest_path).map_err(|e| bad(e.to_string()))?;
    writer
        .write_record(["path", "label"])
        .map_err(|e| bad(e.to_string()))?;
    for (path, label) in entries {
        writer
            .write_record([path, label])
            .map_err(|e| bad(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug)]
pub struct LoadedCorpus {
    pub captures: Vec<CaptureFile>,
    /// Total malformed trailing records across all files.
    pub parse_warnings: usize,
}

/// Loads every capture named by a manifest, in manifest order. Files are
/// parsed in parallel; origin ids are the manifest's raw paths.
pub fn load_corpus(manifest_path: &Path) -> Result<LoadedCorpus, CaptureError> {
    let entries = read_manifest(manifest_path)?;
    let parsed: Vec<Result<(CaptureFile, usize), CaptureError>> =
        exec::map(&entries, |entry| {
            let raw = fs::read(&entry.path)?;
            let parsed = parse_capture(&raw, &entry.label)?;
            let mut capture = parsed.capture;
            capture.origin_id = entry.raw_path.clone();
            Ok((capture, parsed.truncated_records))
        });
    let mut corpus = LoadedCorpus {
        captures: Vec::with_capacity(entries.len()),
        parse_warnings: 0,
    };
    for item in parsed {
        let (capture, warnings) = item?;
        corpus.captures.push(capture);
        corpus.parse_warnings += warnings;
    }
    Ok(corpus)
}

/// Writes captures as `.pcap` files under `dir` plus a `manifest.csv`,
/// returning the manifest path. File names derive from origin ids.
pub fn write_corpus(dir: &Path, captures: &[CaptureFile]) -> Result<PathBuf, CaptureError> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(captures.len());
    for (i, capture) in captures.iter().enumerate() {
        let stem: String = capture
            .origin_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        let name = format!("{:03}_{}.pcap", i, &stem[..stem.len().min(48)]);
        fs::write(dir.join(&name), write_capture(capture)?)?;
        entries.push((name, capture.label.clone()));
    }
    let manifest_path = dir.join("manifest.csv");
    write_manifest(&manifest_path, &entries)?;
    Ok(manifest_path)
}
