//! Naive verbatim-window scans over token sequences.

/// True iff `needle` occurs contiguously anywhere in `hay`.
pub fn contains(hay: &[u8], needle: &[u8]) -> bool {
    if needle.is_empty() {
        return true;
    }
    if needle.len() > hay.len() {
        return false;
    }
    hay.windows(needle.len()).any(|w| w == needle)
}

/// True iff some length-`n` window of `gen` occurs in any training sequence.
pub fn is_extractable(gen: &[u8], training: &[Vec<u8>], n: usize) -> bool {
    if gen.len() < n {
        return false;
    }
    gen.windows(n)
        .any(|w| training.iter().any(|t| contains(t, w)))
}

/// True iff the window of `gen` starting at `pos` occurs at the same
/// position in some training sequence.
pub fn matches_at_position(gen: &[u8], training: &[Vec<u8>], n: usize, pos: usize) -> bool {
    if gen.len() < pos + n {
        return false;
    }
    let w = &gen[pos..pos + n];
    training
        .iter()
        .any(|t| t.len() >= pos + n && &t[pos..pos + n] == w)
}

/// Fraction of `target`'s length-`n` windows found anywhere in `corpus`.
pub fn window_overlap_fraction(target: &[u8], corpus: &[Vec<u8>], n: usize) -> f64 {
    if target.len() < n {
        return 0.0;
    }
    let total = target.len() - n + 1;
    let hits = target
        .windows(n)
        .filter(|w| corpus.iter().any(|c| contains(c, w)))
        .count();
    hits as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_embedded_window() {
        let train = vec![vec![1, 2, 3, 4, 5, 6]];
        assert!(is_extractable(&[9, 9, 2, 3, 4, 9], &train, 3));
        assert!(!is_extractable(&[9, 9, 2, 4, 3, 9], &train, 3));
    }

    #[test]
    fn positional_match_requires_same_offset() {
        let train = vec![vec![0, 1, 2, 3, 4]];
        assert!(matches_at_position(&[0, 1, 2, 9, 9], &train, 3, 0));
        assert!(!matches_at_position(&[9, 0, 1, 2, 9], &train, 3, 1));
    }
}
