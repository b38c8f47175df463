//! Exhaustive linear-separability check for small 2-D point sets.
//!
//! If two finite point sets are linearly separable, some separating line is
//! either perpendicular to a segment joining points of opposite classes or
//! parallel to a segment joining points of one class. Trying both candidate
//! directions for every point pair is therefore exhaustive.

/// True iff some line strictly separates `pos` from `neg`.
pub fn linearly_separable(pos: &[(f64, f64)], neg: &[(f64, f64)]) -> bool {
    if pos.is_empty() || neg.is_empty() {
        return true;
    }
    let all: Vec<(f64, f64)> = pos.iter().chain(neg.iter()).copied().collect();
    let mut directions: Vec<(f64, f64)> = vec![(1.0, 0.0), (0.0, 1.0)];
    for (i, &a) in all.iter().enumerate() {
        for &b in &all[i + 1..] {
            let d = (b.0 - a.0, b.1 - a.1);
            if d.0 != 0.0 || d.1 != 0.0 {
                directions.push(d);
                directions.push((-d.1, d.0));
            }
        }
    }
    directions.iter().any(|&(nx, ny)| {
        let proj = |p: &(f64, f64)| nx * p.0 + ny * p.1;
        let (pos_min, pos_max) = min_max(pos.iter().map(proj));
        let (neg_min, neg_max) = min_max(neg.iter().map(proj));
        pos_min > neg_max || neg_min > pos_max
    })
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_blobs_separate() {
        let pos = [(5.0, 5.0), (6.0, 5.5)];
        let neg = [(0.0, 0.0), (1.0, -0.5)];
        assert!(linearly_separable(&pos, &neg));
    }

    #[test]
    fn xor_layout_does_not() {
        let pos = [(0.0, 0.0), (1.0, 1.0)];
        let neg = [(0.0, 1.0), (1.0, 0.0)];
        assert!(!linearly_separable(&pos, &neg));
    }
}
