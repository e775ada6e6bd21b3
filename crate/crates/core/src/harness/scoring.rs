//! Chunk-sequence alignment and precision/recall/F1.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::chunking::{Chunking, Sentence};

type Range = (usize, usize);

/// Every longest common contiguous block of `a[alo..ahi]` and `b[blo..bhi]`
/// as `(i, j)` starts, with the common length.
#[allow(clippy::needless_range_loop)]
fn longest_blocks<T: PartialEq>(a: &[T], b: &[T], (alo, ahi): Range, (blo, bhi): Range) -> (Vec<(usize, usize)>, usize) {
    let mut best = Vec::new();
    let mut best_len = 0;
    let width = bhi - blo;
    let mut prev = vec![0usize; width + 1];
    let mut cur = vec![0usize; width + 1];
    for i in alo..ahi {
        for j in blo..bhi {
            let k = j - blo + 1;
            cur[k] = if a[i] == b[j] { prev[k - 1] + 1 } else { 0 };
            let len = cur[k];
            if len > best_len {
                best_len = len;
                best.clear();
            }
            if len == best_len && len > 0 {
                best.push((i + 1 - len, j + 1 - len));
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (best, best_len)
}

fn matched<T: PartialEq>(a: &[T], b: &[T], ra: Range, rb: Range, memo: &mut HashMap<(Range, Range), usize>) -> usize {
    if ra.0 >= ra.1 || rb.0 >= rb.1 {
        return 0;
    }
    if let Some(&m) = memo.get(&(ra, rb)) {
        return m;
    }
    let (blocks, k) = longest_blocks(a, b, ra, rb);
    let best = blocks
        .into_iter()
        .map(|(i, j)| k + matched(a, b, (ra.0, i), (rb.0, j), memo) + matched(a, b, (i + k, ra.1), (j + k, rb.1), memo))
        .max()
        .unwrap_or(0);
    memo.insert((ra, rb), best);
    best
}

/// Total size of the matching blocks found by taking a longest block and
/// recursing on both sides of it. When several blocks tie for longest, the
/// one with the largest total wins, so the count does not depend on
/// argument order.
pub fn match_count<T: PartialEq>(pred: &[T], gold: &[T]) -> usize {
    matched(pred, gold, (0, pred.len()), (0, gold.len()), &mut HashMap::new())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreTriple {
    #[serde(rename = "p")]
    pub precision: f64,
    #[serde(rename = "r")]
    pub recall: f64,
    pub f1: f64,
}

pub fn score_counts(matched: usize, predicted: usize, gold: usize) -> ScoreTriple {
    let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    let precision = ratio(matched, predicted);
    let recall = ratio(matched, gold);
    // 2PR/(P+R) reduces to 2m/(|pred|+|gold|), which rounds only once
    let f1 = if precision + recall > 0.0 {
        2.0 * matched as f64 / (predicted + gold) as f64
    } else {
        0.0
    };
    ScoreTriple {
        precision,
        recall,
        f1,
    }
}

pub fn score(pred: &Chunking, gold: &Chunking, s: &Sentence) -> ScoreTriple {
    let p = pred.chunk_strings(s);
    let g = gold.chunk_strings(s);
    score_counts(match_count(&p, &g), p.len(), g.len())
}

/// Unweighted mean of per-sentence scores.
pub fn macro_average(scores: &[ScoreTriple]) -> ScoreTriple {
    if scores.is_empty() {
        return ScoreTriple::default();
    }
    let n = scores.len() as f64;
    ScoreTriple {
        precision: scores.iter().map(|s| s.precision).sum::<f64>() / n,
        recall: scores.iter().map(|s| s.recall).sum::<f64>() / n,
        f1: scores.iter().map(|s| s.f1).sum::<f64>() / n,
    }
}
