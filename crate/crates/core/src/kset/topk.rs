use std::cmp::Ordering;

use super::{check_k, KSetSelection};
use crate::error::{Error, Result};

/// Indices of the k smallest scores, ties broken towards the smaller index.
///
/// Runs `select_nth_unstable_by` (introselect: expected linear, with a
/// median-of-medians fallback that bounds the worst case) on a
/// `(score, index)` key, which is a strict total order, so the bottom-k set
/// is unique and matches a stable full sort.
pub fn top_k_smallest(scores: &[f64], k: usize) -> Result<KSetSelection> {
    let n = scores.len();
    check_k(n, k)?;
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::input(format!("score[{i}] = {} is not finite", scores[i])));
    }

    let mut idx: Vec<usize> = (0..n).collect();
    if k < n {
        let key = |a: &usize, b: &usize| -> Ordering {
            scores[*a].total_cmp(&scores[*b]).then(a.cmp(b))
        };
        idx.select_nth_unstable_by(k - 1, key);
        idx.truncate(k);
        idx.sort_unstable();
    }
    Ok(KSetSelection::from_sorted(idx, n))
}
