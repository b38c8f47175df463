//! Quadratic-time rank statistics for classifier evaluation.

/// AUC as the pairwise rank statistic: P(member score > non-member score)
/// plus half credit for ties, over all cross-class pairs.
pub fn pairwise_auc(member_scores: &[f64], nonmember_scores: &[f64]) -> f64 {
    assert!(!member_scores.is_empty() && !nonmember_scores.is_empty());
    let mut wins = 0.0f64;
    for &m in member_scores {
        for &n in nonmember_scores {
            if m > n {
                wins += 1.0;
            } else if m == n {
                wins += 0.5;
            }
        }
    }
    wins / (member_scores.len() as f64 * nonmember_scores.len() as f64)
}
