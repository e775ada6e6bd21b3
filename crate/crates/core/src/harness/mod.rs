//! Scoring, cross-validation and significance testing.

pub mod scoring;
pub mod stats;
pub mod xval;

pub use scoring::{macro_average, match_count, score, score_counts, ScoreTriple};
pub use stats::{paired_t_test_one_tailed, student_t_sf, TTest};
pub use xval::{cross_validate, fold_ranges, FoldResult, XvalOptions, XvalReport};
