//! Training-data extraction: verbatim n-token matches against a corpus.
//!
//! A generated sequence counts as extractable when any of its length-n
//! windows appears verbatim in the indexed training corpus (n = 10 tokens
//! by default, in the generator's native unit). The positional variant
//! additionally requires the match to sit at the same token index, which
//! is what localizes memorization to identifier fields.

use serde::Serialize;
use thiserror::Error;

use crate::exec;
use crate::token::{CorpusIndex, TokenScheme, TokenSequence};

/// Default window length for the verbatim-match criterion.
pub const DEFAULT_WINDOW: usize = 10;

#[derive(Debug, Error)]
pub enum ExtractionError {
    #[error("sequence scheme {seq:?} does not match index scheme {index:?}")]
    SchemeMismatch { seq: TokenScheme, index: TokenScheme },
    #[error("no generated sequences supplied")]
    EmptyGenerationSet,
    #[error("positional matching requires an index built with aligned=true")]
    UnalignedIndex,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionReport {
    pub n: usize,
    pub extractable_rate: f64,
    pub per_sequence: Vec<bool>,
    /// `(position, rate)` for every position with at least one evaluable
    /// sequence; empty unless computed against an aligned index.
    pub positional_rates: Vec<(usize, f64)>,
}

fn check_scheme(seq: &TokenSequence, idx: &CorpusIndex) -> Result<(), ExtractionError> {
    match idx.scheme() {
        Some(s) if s != seq.scheme => Err(ExtractionError::SchemeMismatch {
            seq: seq.scheme,
            index: s,
        }),
        _ => Ok(()),
    }
}

/// True iff some length-n window of `generated` occurs anywhere in the
/// indexed training corpus. Sequences shorter than n have no window and
/// are never extractable.
pub fn is_extractable(
    generated: &TokenSequence,
    idx: &CorpusIndex,
) -> Result<bool, ExtractionError> {
    check_scheme(generated, idx)?;
    Ok(generated
        .tokens
        .windows(idx.n)
        .any(|w| idx.contains(w)))
}

/// Per-sequence extraction decisions for a whole generated corpus.
pub fn decide_extractable(
    generated: &[TokenSequence],
    idx: &CorpusIndex,
) -> Result<Vec<bool>, ExtractionError> {
    for seq in generated {
        check_scheme(seq, idx)?;
    }
    Ok(exec::map(generated, |seq| {
        seq.tokens.windows(idx.n).any(|w| idx.contains(w))
    }))
}

/// Fraction of generated sequences with at least one verbatim match.
pub fn extractable_rate(
    generated: &[TokenSequence],
    idx: &CorpusIndex,
) -> Result<f64, ExtractionError> {
    if generated.is_empty() {
        return Err(ExtractionError::EmptyGenerationSet);
    }
    let decisions = decide_extractable(generated, idx)?;
    Ok(decisions.iter().filter(|&&d| d).count() as f64 / decisions.len() as f64)
}

/// Extraction rate per token position: at position p, the fraction of
/// generated sequences long enough to have a window there whose window
/// matches some training window at the same p. Positions nobody reaches
/// are absent from the output.
pub fn positional_extractable_curve(
    generated: &[TokenSequence],
    idx: &CorpusIndex,
) -> Result<Vec<(usize, f64)>, ExtractionError> {
    if !idx.aligned {
        return Err(ExtractionError::UnalignedIndex);
    }
    for seq in generated {
        check_scheme(seq, idx)?;
    }
    let max_len = generated.iter().map(TokenSequence::len).max().unwrap_or(0);
    if max_len < idx.n {
        return Ok(Vec::new());
    }
    let positions: Vec<usize> = (0..=max_len - idx.n).collect();
    let rates = exec::map(&positions, |&p| {
        let mut evaluable = 0u64;
        let mut hits = 0u64;
        for seq in generated {
            if seq.len() >= p + idx.n {
                evaluable += 1;
                if idx.contains_at(&seq.tokens[p..p + idx.n], p) {
                    hits += 1;
                }
            }
        }
        (evaluable, hits)
    });
    Ok(positions
        .into_iter()
        .zip(rates)
        .filter(|&(_, (evaluable, _))| evaluable > 0)
        .map(|(p, (evaluable, hits))| (p, hits as f64 / evaluable as f64))
        .collect())
}

/// Full report: global rate plus the positional curve when the index is
/// aligned.
pub fn extraction_report(
    generated: &[TokenSequence],
    idx: &CorpusIndex,
) -> Result<ExtractionReport, ExtractionError> {
    if generated.is_empty() {
        return Err(ExtractionError::EmptyGenerationSet);
    }
    let per_sequence = decide_extractable(generated, idx)?;
    let positional_rates = if idx.aligned {
        positional_extractable_curve(generated, idx)?
    } else {
        Vec::new()
    };
    Ok(ExtractionReport {
        n: idx.n,
        extractable_rate: per_sequence.iter().filter(|&&d| d).count() as f64
            / per_sequence.len() as f64,
        per_sequence,
        positional_rates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::build_corpus_index;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(tokens: Vec<u8>) -> TokenSequence {
        TokenSequence {
            scheme: TokenScheme::Hex,
            tokens,
            packet_offsets: vec![0],
        }
    }

    fn random_seq(rng: &mut ChaCha8Rng, len: usize, alphabet: u8) -> TokenSequence {
        seq((0..len).map(|_| rng.gen_range(0..alphabet)).collect())
    }

    #[test]
    fn copied_training_sequence_is_extractable() {
        let train = vec![random_seq(&mut ChaCha8Rng::seed_from_u64(1), 30, 4)];
        let idx = build_corpus_index(&train, 10, false).unwrap();
        assert!(is_extractable(&train[0].clone(), &idx).unwrap());
    }

    #[test]
    fn nine_token_overlap_is_not_enough() {
        let train = vec![seq(vec![1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3])];
        let idx = build_corpus_index(&train, 10, false).unwrap();
        // Shares the 9-token run 2,3,1,2,3,1,2,3,1 but never 10 in a row.
        let gen = seq(vec![0, 2, 3, 1, 2, 3, 1, 2, 3, 1, 0, 0]);
        assert!(!is_extractable(&gen, &idx).unwrap());
    }

    #[test]
    fn shorter_than_n_counts_non_extractable() {
        let train = vec![seq(vec![7; 20])];
        let idx = build_corpus_index(&train, 10, false).unwrap();
        assert!(!is_extractable(&seq(vec![7; 9]), &idx).unwrap());
    }

    #[test]
    fn decisions_match_naive_scan_and_are_monotone_in_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..20 {
            let train: Vec<TokenSequence> = (0..8)
                .map(|_| random_seq(&mut rng, 80, 4))
                .collect();
            let gen: Vec<TokenSequence> = (0..25)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        // Plant a verbatim fragment of a training sequence.
                        let donor = &train[rng.gen_range(0..train.len())];
                        let start = rng.gen_range(0..donor.len() - 15);
                        let mut tokens: Vec<u8> =
                            (0..20).map(|_| rng.gen_range(0..4)).collect();
                        tokens.extend_from_slice(&donor.tokens[start..start + 15]);
                        seq(tokens)
                    } else {
                        random_seq(&mut rng, 35, 4)
                    }
                })
                .collect();
            let raw_train: Vec<Vec<u8>> = train.iter().map(|s| s.tokens.clone()).collect();
            let idx10 = build_corpus_index(&train, 10, false).unwrap();
            let idx11 = build_corpus_index(&train, 11, false).unwrap();
            let d10 = decide_extractable(&gen, &idx10).unwrap();
            let d11 = decide_extractable(&gen, &idx11).unwrap();
            for (i, g) in gen.iter().enumerate() {
                let naive = synthpriv_testkit::scan::is_extractable(&g.tokens, &raw_train, 10);
                assert_eq!(d10[i], naive, "trial {trial} sequence {i}");
                // A match of 11 implies a match of 10.
                assert!(!d11[i] || d10[i]);
            }
        }
    }

    #[test]
    fn rates_count_correctly() {
        let train: Vec<TokenSequence> = (0..4)
            .map(|i| seq((0..30).map(|t| ((t + i) % 4) as u8).collect()))
            .collect();
        let idx = build_corpus_index(&train, 10, false).unwrap();
        assert_eq!(extractable_rate(&train, &idx).unwrap(), 1.0);

        // Disjoint alphabet: tokens 8..12 never appear in training.
        let disjoint: Vec<TokenSequence> = (0..5)
            .map(|_| seq(vec![9; 25]))
            .collect();
        assert_eq!(extractable_rate(&disjoint, &idx).unwrap(), 0.0);

        let mixed: Vec<TokenSequence> = (0..10)
            .map(|i| if i < 4 { train[i].clone() } else { seq(vec![9; 25]) })
            .collect();
        assert_eq!(extractable_rate(&mixed, &idx).unwrap(), 0.4);

        assert!(matches!(
            extractable_rate(&[], &idx),
            Err(ExtractionError::EmptyGenerationSet)
        ));
    }

    #[test]
    fn positional_curve_identity_and_mutated_prefix() {
        let train = vec![random_seq(&mut ChaCha8Rng::seed_from_u64(3), 40, 4)];
        let aligned = build_corpus_index(&train, 10, true).unwrap();

        let identity = positional_extractable_curve(&train, &aligned).unwrap();
        assert_eq!(identity.len(), 31);
        assert!(identity.iter().all(|&(_, r)| r == 1.0));

        // Corrupt tokens 0..10: windows match again once they clear it.
        let mut mutated = train[0].clone();
        for t in 0..10 {
            mutated.tokens[t] |= 4; // outside the 0..4 training alphabet
        }
        let curve = positional_extractable_curve(&[mutated], &aligned).unwrap();
        for &(p, rate) in &curve {
            assert_eq!(rate, if p < 10 { 0.0 } else { 1.0 }, "position {p}");
        }
        assert_eq!(curve.first(), Some(&(0, 0.0)));
        assert_eq!(curve.iter().find(|&&(_, r)| r == 1.0), Some(&(10, 1.0)));

        // Positions beyond max length - n are absent.
        assert_eq!(curve.last().unwrap().0, 30);
    }

    #[test]
    fn positional_curve_agrees_with_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let train: Vec<TokenSequence> = (0..6).map(|_| random_seq(&mut rng, 50, 3)).collect();
        let gen: Vec<TokenSequence> = (0..10).map(|_| random_seq(&mut rng, 45, 3)).collect();
        let idx = build_corpus_index(&train, 10, true).unwrap();
        let curve = positional_extractable_curve(&gen, &idx).unwrap();
        let raw_train: Vec<Vec<u8>> = train.iter().map(|s| s.tokens.clone()).collect();
        for &(p, rate) in &curve {
            let evaluable: Vec<_> = gen.iter().filter(|g| g.len() >= p + 10).collect();
            let hits = evaluable
                .iter()
                .filter(|g| {
                    synthpriv_testkit::scan::matches_at_position(&g.tokens, &raw_train, 10, p)
                })
                .count();
            assert_eq!(rate, hits as f64 / evaluable.len() as f64);
        }
    }

    #[test]
    fn unaligned_index_rejected_for_positional() {
        let train = vec![seq(vec![0; 20])];
        let idx = build_corpus_index(&train, 10, false).unwrap();
        assert!(matches!(
            positional_extractable_curve(&train, &idx),
            Err(ExtractionError::UnalignedIndex)
        ));
    }

    #[test]
    fn scheme_mismatch_rejected() {
        let train = vec![seq(vec![0; 20])];
        let idx = build_corpus_index(&train, 10, false).unwrap();
        let byte_seq = TokenSequence {
            scheme: TokenScheme::Byte,
            tokens: vec![0; 20],
            packet_offsets: vec![0],
        };
        assert!(matches!(
            is_extractable(&byte_seq, &idx),
            Err(ExtractionError::SchemeMismatch { .. })
        ));
    }

    #[test]
    fn growing_the_index_never_lowers_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gen: Vec<TokenSequence> = (0..15).map(|_| random_seq(&mut rng, 30, 2)).collect();
        let small: Vec<TokenSequence> = (0..3).map(|_| random_seq(&mut rng, 60, 2)).collect();
        let mut large = small.clone();
        large.extend((0..3).map(|_| random_seq(&mut rng, 60, 2)));
        let idx_small = build_corpus_index(&small, 10, false).unwrap();
        let idx_large = build_corpus_index(&large, 10, false).unwrap();
        assert!(
            extractable_rate(&gen, &idx_large).unwrap()
                >= extractable_rate(&gen, &idx_small).unwrap()
        );
    }
}
