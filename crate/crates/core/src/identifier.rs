//! Network-identifier memorization: output coverage and confidence.
//!
//! Coverage asks what fraction of unique training identifiers the
//! generator reproduced; confidence asks what fraction of the generator's
//! unique identifiers are real rather than hallucinated. Both share one
//! intersection, so coverage * |train| == confidence * |generated|.
//! IPs compare as 32-bit values and MACs as 48-bit values; no string
//! canonicalization is involved.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use thiserror::Error;

use crate::capture::CaptureFile;

#[derive(Debug, Error)]
pub enum IdentifierError {
    #[error("training identifier set is empty")]
    EmptyTrainingSet,
    #[error("generated identifier set is empty")]
    EmptyGeneratedSet,
    #[error("identifier kinds differ: {0:?} vs {1:?}")]
    KindMismatch(IdKind, IdKind),
    #[error("bin edges must be strictly increasing")]
    BadBins,
}

/// Which identifier role a set was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdKind {
    SrcIp,
    DstIp,
    SrcMac,
    DstMac,
}

impl IdKind {
    pub const ALL: [IdKind; 4] = [IdKind::SrcIp, IdKind::DstIp, IdKind::SrcMac, IdKind::DstMac];

    pub fn is_ip(self) -> bool {
        matches!(self, IdKind::SrcIp | IdKind::DstIp)
    }

    /// Renders an identifier value for reports and CSV exports.
    pub fn render(self, value: u64) -> String {
        if self.is_ip() {
            std::net::Ipv4Addr::from(value as u32).to_string()
        } else {
            crate::capture::Mac::from_u64(value).to_string()
        }
    }
}

impl std::str::FromStr for IdKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "src_ip" => Ok(IdKind::SrcIp),
            "dst_ip" => Ok(IdKind::DstIp),
            "src_mac" => Ok(IdKind::SrcMac),
            "dst_mac" => Ok(IdKind::DstMac),
            other => Err(format!("unknown identifier kind `{other}`")),
        }
    }
}

/// Multiset of identifiers of one role. IPs are stored as u32 widened to
/// u64, MACs as 48-bit values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentifierSet {
    pub kind: IdKind,
    pub counts: HashMap<u64, u64>,
}

impl IdentifierSet {
    pub fn unique(&self) -> HashSet<u64> {
        self.counts.keys().copied().collect()
    }

    pub fn unique_len(&self) -> usize {
        self.counts.len()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.counts.contains_key(&id)
    }
}

/// Tallies per-packet occurrences of one identifier role over a corpus.
pub fn collect_identifiers(corpus: &[CaptureFile], kind: IdKind) -> IdentifierSet {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for capture in corpus {
        for p in &capture.packets {
            let id = match kind {
                IdKind::SrcIp => p.src_ip().map(|ip| u64::from(u32::from(ip))),
                IdKind::DstIp => p.dst_ip().map(|ip| u64::from(u32::from(ip))),
                IdKind::SrcMac => Some(p.src_mac.to_u64()),
                IdKind::DstMac => Some(p.dst_mac.to_u64()),
            };
            if let Some(id) = id {
                *counts.entry(id).or_insert(0) += 1;
            }
        }
    }
    IdentifierSet { kind, counts }
}

fn intersection_size(a: &IdentifierSet, b: &IdentifierSet) -> usize {
    let (small, large) = if a.counts.len() <= b.counts.len() { (a, b) } else { (b, a) };
    small.counts.keys().filter(|id| large.contains(**id)).count()
}

/// |G ∩ T| / |T|: fraction of unique training identifiers reproduced.
pub fn output_coverage(
    generated: &IdentifierSet,
    training: &IdentifierSet,
) -> Result<f64, IdentifierError> {
    if generated.kind != training.kind {
        return Err(IdentifierError::KindMismatch(generated.kind, training.kind));
    }
    if training.counts.is_empty() {
        return Err(IdentifierError::EmptyTrainingSet);
    }
    Ok(intersection_size(generated, training) as f64 / training.unique_len() as f64)
}

/// |G ∩ T| / |G|: probability a generated identifier is real.
pub fn output_confidence(
    generated: &IdentifierSet,
    training: &IdentifierSet,
) -> Result<f64, IdentifierError> {
    if generated.kind != training.kind {
        return Err(IdentifierError::KindMismatch(generated.kind, training.kind));
    }
    if generated.counts.is_empty() {
        return Err(IdentifierError::EmptyGeneratedSet);
    }
    Ok(intersection_size(generated, training) as f64 / generated.unique_len() as f64)
}

/// One histogram bin: training identifiers whose training-set occurrence
/// count falls in `[low, high)`, split by whether they were generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MemorizationBin {
    pub low: u64,
    pub high: u64,
    pub memorized: u64,
    pub non_memorized: u64,
}

/// Log-spaced default edges 1, 10, 100, ... covering `max_count`.
pub fn log_bin_edges(max_count: u64) -> Vec<u64> {
    let mut edges = vec![1];
    while *edges.last().expect("non-empty") <= max_count {
        edges.push(edges.last().expect("non-empty") * 10);
    }
    edges
}

/// Bins training identifiers by their training frequency and tallies, per
/// bin, how many were memorized (appear in the generated set). Identifiers
/// whose count falls outside the edges are excluded.
pub fn frequency_stratified_memorization(
    training: &IdentifierSet,
    generated: &IdentifierSet,
    bin_edges: &[u64],
) -> Result<Vec<MemorizationBin>, IdentifierError> {
    if generated.kind != training.kind {
        return Err(IdentifierError::KindMismatch(generated.kind, training.kind));
    }
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(IdentifierError::BadBins);
    }
    let mut bins: Vec<MemorizationBin> = bin_edges
        .windows(2)
        .map(|w| MemorizationBin {
            low: w[0],
            high: w[1],
            memorized: 0,
            non_memorized: 0,
        })
        .collect();
    for (id, &count) in &training.counts {
        let Some(bin) = bins
            .iter_mut()
            .find(|b| (b.low..b.high).contains(&count))
        else {
            continue;
        };
        if generated.contains(*id) {
            bin.memorized += 1;
        } else {
            bin.non_memorized += 1;
        }
    }
    Ok(bins)
}

/// Coverage and confidence for one identifier kind, as reported.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentifierLeakage {
    pub coverage: f64,
    pub confidence: f64,
    pub train_unique: usize,
    pub generated_unique: usize,
}

/// Runs both metrics for each requested kind. Kinds with an empty side are
/// skipped (e.g. MAC-less generated traffic).
pub fn identifier_leakage_report(
    training: &[CaptureFile],
    generated: &[CaptureFile],
    kinds: &[IdKind],
) -> BTreeMap<IdKind, IdentifierLeakage> {
    let mut report = BTreeMap::new();
    for &kind in kinds {
        let train_set = collect_identifiers(training, kind);
        let gen_set = collect_identifiers(generated, kind);
        let (Ok(coverage), Ok(confidence)) = (
            output_coverage(&gen_set, &train_set),
            output_confidence(&gen_set, &train_set),
        ) else {
            continue;
        };
        report.insert(
            kind,
            IdentifierLeakage {
                coverage,
                confidence,
                train_unique: train_set.unique_len(),
                generated_unique: gen_set.unique_len(),
            },
        );
    }
    report
}
