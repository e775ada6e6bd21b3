//! k-fold cross-validation over a chunked corpus.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scoring::{macro_average, score, ScoreTriple};
use crate::bias::ModeBias;
use crate::chunking::{predict, Chunking, Sentence};
use crate::error::{Error, Result};
use crate::logic::Rule;
use crate::pipeline::{learn, LearnOptions, LearningTask};

pub const THREADS_ENV: &str = "XHAIL_LITE_THREADS";

#[derive(Clone, Debug)]
pub struct XvalOptions {
    pub folds: usize,
    pub learn: LearnOptions,
    /// Shuffle sentence order before splitting; off by default.
    pub shuffle_seed: Option<u64>,
}

impl Default for XvalOptions {
    fn default() -> Self {
        XvalOptions {
            folds: 11,
            learn: LearnOptions::default(),
            shuffle_seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub pr: usize,
    pub budget_s: f64,
    pub so: f64,
    pub optimal: bool,
    pub elapsed_s: f64,
    pub train_size: usize,
    pub test_ids: Vec<String>,
    pub cv: ScoreTriple,
    pub test: Option<ScoreTriple>,
    pub hypothesis: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample standard deviation.
    pub fn of(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return MeanStd { mean: 0.0, std: 0.0 };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        MeanStd { mean, std }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub p: MeanStd,
    pub r: MeanStd,
    pub f1: MeanStd,
}

impl MetricSummary {
    fn of(scores: &[ScoreTriple]) -> Self {
        let col = |f: fn(&ScoreTriple) -> f64| MeanStd::of(&scores.iter().map(f).collect::<Vec<_>>());
        MetricSummary {
            p: col(|s| s.precision),
            r: col(|s| s.recall),
            f1: col(|s| s.f1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cv: MetricSummary,
    pub test: Option<MetricSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XvalReport {
    pub k: usize,
    pub corpus_size: usize,
    pub test_corpus_size: usize,
    pub folds: Vec<FoldResult>,
    pub summary: Summary,
}

impl XvalReport {
    /// Per-fold F1 on the test corpus when every fold has one, else on the
    /// held-out blocks.
    pub fn fold_f1(&self) -> Vec<f64> {
        if self.folds.iter().all(|f| f.test.is_some()) && !self.folds.is_empty() {
            self.folds.iter().map(|f| f.test.unwrap().f1).collect()
        } else {
            self.folds.iter().map(|f| f.cv.f1).collect()
        }
    }
}

/// Contiguous test blocks `[i*n/k, (i+1)*n/k)`.
pub fn fold_ranges(n: usize, k: usize) -> Result<Vec<std::ops::Range<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs at least 2 folds, got {k}"
        )));
    }
    if !n.is_multiple_of(k) {
        return Err(Error::InvalidArgument(format!(
            "{n} sentences cannot be split into {k} equal folds; truncate the corpus to {} sentences",
            n - n % k
        )));
    }
    let size = n / k;
    Ok((0..k).map(|i| i * size..(i + 1) * size).collect())
}

/// Predicts every sentence and returns the macro-averaged score.
pub fn score_hypothesis(hypothesis: &[Rule], corpus: &[&(Sentence, Chunking)]) -> Result<ScoreTriple> {
    let mut scores = Vec::with_capacity(corpus.len());
    for (s, gold) in corpus {
        scores.push(score(&predict(hypothesis, s)?, gold, s));
    }
    Ok(macro_average(&scores))
}

pub(crate) fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::InvalidArgument(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

pub fn cross_validate(
    corpus: &[(Sentence, Chunking)],
    test_corpus: &[(Sentence, Chunking)],
    bias: &ModeBias,
    extra_background: &[Rule],
    opts: &XvalOptions,
) -> Result<XvalReport> {
    let ranges = fold_ranges(corpus.len(), opts.folds)?;
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    if let Some(seed) = opts.shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let test_refs: Vec<&(Sentence, Chunking)> = test_corpus.iter().collect();

    let run_fold = |(fold, range): (usize, &std::ops::Range<usize>)| -> Result<FoldResult> {
        let train: Vec<(Sentence, Chunking)> = order
            .iter()
            .enumerate()
            .filter(|(pos, _)| !range.contains(pos))
            .map(|(_, &i)| corpus[i].clone())
            .collect();
        let held: Vec<&(Sentence, Chunking)> = order[range.clone()].iter().map(|&i| &corpus[i]).collect();
        let task = LearningTask::from_corpus(&train, bias.clone(), extra_background);
        let outcome = learn(&task, &opts.learn)?;
        let h = &outcome.induction.hypothesis;
        log::info!(
            "fold {fold}: {} rules, so {:.4}, {:.2}s",
            h.len(),
            outcome.induction.so,
            outcome.elapsed_s
        );
        Ok(FoldResult {
            fold,
            pr: opts.learn.pr,
            budget_s: opts.learn.budget.as_secs_f64(),
            so: outcome.induction.so,
            optimal: outcome.induction.optimal,
            elapsed_s: outcome.elapsed_s,
            train_size: train.len(),
            test_ids: held.iter().map(|(s, _)| s.id.clone()).collect(),
            cv: score_hypothesis(h, &held)?,
            test: if test_refs.is_empty() {
                None
            } else {
                Some(score_hypothesis(h, &test_refs)?)
            },
            hypothesis: h.iter().map(|r| r.to_string()).collect(),
        })
    };
    let pool = thread_pool()?;
    let folds: Vec<FoldResult> = pool.install(|| {
        ranges
            .par_iter()
            .enumerate()
            .map(run_fold)
            .collect::<Result<Vec<_>>>()
    })?;

    let cv: Vec<ScoreTriple> = folds.iter().map(|f| f.cv).collect();
    let test: Vec<ScoreTriple> = folds.iter().filter_map(|f| f.test).collect();
    Ok(XvalReport {
        k: opts.folds,
        corpus_size: corpus.len(),
        test_corpus_size: test_corpus.len(),
        summary: Summary {
            cv: MetricSummary::of(&cv),
            test: (!test.is_empty()).then(|| MetricSummary::of(&test)),
        },
        folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_shapes() {
        let r = fold_ranges(110, 11).unwrap();
        assert_eq!(r.len(), 11);
        assert!(r.iter().all(|x| x.len() == 10));
        assert_eq!(fold_ranges(550, 11).unwrap()[3], 150..200);
        assert!(fold_ranges(110, 1).is_err());
        let e = fold_ranges(110, 7).unwrap_err();
        assert!(e.to_string().contains("truncate"));
    }

    #[test]
    fn sample_std() {
        let m = MeanStd::of(&[1.0, 2.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.std, 1.0);
        assert_eq!(MeanStd::of(&[4.0]).std, 0.0);
    }
}
