//! Capture segmentation and the train/auxiliary/non-training split.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use super::{CaptureError, CaptureFile, DatasetSplit};

/// Slices a capture into contiguous time-ordered segments of at most
/// `max_packets` packets. When that yields more than `max_segments`
/// slices, a seeded uniform sample of `max_segments` of them is kept
/// (still in time order). Segment origin ids derive from the parent's.
pub fn segment_capture(
    capture: &CaptureFile,
    max_packets: usize,
    max_segments: usize,
    seed: u64,
) -> Vec<CaptureFile> {
    assert!(max_packets >= 1, "max_packets must be at least 1");
    assert!(max_segments >= 1, "max_segments must be at least 1");

    let slice_count = capture.packets.len().div_ceil(max_packets);
    let mut kept: Vec<usize> = (0..slice_count).collect();
    if slice_count > max_segments {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        kept = rand::seq::index::sample(&mut rng, slice_count, max_segments).into_vec();
        kept.sort_unstable();
    }
    kept.into_iter()
        .map(|i| CaptureFile {
            label: capture.label.clone(),
            origin_id: format!("{}#seg{}", capture.origin_id, i),
            packets: capture.packets[i * max_packets
                ..((i + 1) * max_packets).min(capture.packets.len())]
                .to_vec(),
        })
        .collect()
}

/// Prepares the three-way dataset split: caps each label's capture count,
/// holds out `holdout_label_count` whole labels as non-training data, and
/// halves the remaining labels' captures into training and auxiliary sets.
/// All sampling is driven by `seed`; identical inputs give identical splits.
pub fn split_dataset(
    corpus: Vec<CaptureFile>,
    holdout_label_count: usize,
    per_label_cap: usize,
    seed: u64,
) -> Result<DatasetSplit, CaptureError> {
    let mut by_label: BTreeMap<String, Vec<CaptureFile>> = BTreeMap::new();
    for capture in corpus {
        by_label.entry(capture.label.clone()).or_default().push(capture);
    }
    if by_label.len() <= holdout_label_count {
        return Err(CaptureError::TooFewLabels {
            found: by_label.len(),
            needed: holdout_label_count,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Cap each label, keeping the sampled captures in their original order.
    for captures in by_label.values_mut() {
        if captures.len() > per_label_cap {
            let keep: std::collections::BTreeSet<usize> =
                rand::seq::index::sample(&mut rng, captures.len(), per_label_cap)
                    .into_iter()
                    .collect();
            *captures = std::mem::take(captures)
                .into_iter()
                .enumerate()
                .filter_map(|(i, c)| keep.contains(&i).then_some(c))
                .collect();
        }
    }

    let labels: Vec<String> = by_label.keys().cloned().collect();
    let mut holdout =
        rand::seq::index::sample(&mut rng, labels.len(), holdout_label_count).into_vec();
    holdout.sort_unstable();
    let holdout_labels: Vec<String> = holdout.into_iter().map(|i| labels[i].clone()).collect();

    let mut split = DatasetSplit {
        training: Vec::new(),
        auxiliary: Vec::new(),
        non_training: Vec::new(),
        holdout_labels: holdout_labels.clone(),
        seed,
    };
    for (label, mut captures) in by_label {
        if holdout_labels.contains(&label) {
            split.non_training.extend(captures);
            continue;
        }
        captures.shuffle(&mut rng);
        let train_size = captures.len().div_ceil(2);
        let auxiliary = captures.split_off(train_size);
        split.training.extend(captures);
        split.auxiliary.extend(auxiliary);
    }
    Ok(split)
}
