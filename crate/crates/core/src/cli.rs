//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 pipeline
//! error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bias::parse_mode_file;
use crate::chunking::{default_bias, load_corpus, load_sentences, parse_gold, predict, Chunking, Sentence};
use crate::error::{Error, Result};
use crate::harness::scoring::{macro_average, score};
use crate::harness::stats::paired_t_test_one_tailed;
use crate::harness::xval::{cross_validate, XvalOptions, XvalReport};
use crate::logic::{parse_program, print_program, Rule};
use crate::pipeline::{learn, LearnOptions, LearnReport, LearningTask};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PIPELINE: i32 = 2;

fn parse_budget(s: &str) -> std::result::Result<Duration, String> {
    let secs: f64 = s.parse().map_err(|_| format!("`{s}` is not a number of seconds"))?;
    if !secs.is_finite() || secs < 0.0 {
        return Err(format!("budget must be a non-negative number of seconds, got {s}"));
    }
    Ok(Duration::from_secs_f64(secs))
}

#[derive(Debug, Parser)]
#[command(name = "xhail-lite", version, about = "Learn chunking rules and other hypotheses by inductive logic programming")]
pub struct RunConfig {
    /// Log bound improvements of the induction search to stderr.
    #[arg(long, global = true)]
    pub verbose_solver: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Keep only kernel rules with support greater than N.
    #[arg(long = "pr", value_name = "N", default_value_t = 0)]
    pub pr: usize,

    /// Time budget in seconds for abduction and for induction.
    #[arg(long, value_name = "SECONDS", default_value = "1800", value_parser = parse_budget)]
    pub budget: Duration,
}

impl SearchArgs {
    fn learn_options(&self) -> LearnOptions {
        LearnOptions {
            pr: self.pr,
            budget: self.budget,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a hypothesis from a mode file, or from a chunked corpus.
    Learn {
        /// Mode declarations, examples and background rules.
        #[arg(long, value_name = "FILE")]
        mode: Option<PathBuf>,
        #[arg(long, value_name = "FILE", requires = "gold")]
        tokens: Option<PathBuf>,
        #[arg(long, value_name = "FILE", requires = "tokens")]
        gold: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
        /// Hypothesis file; stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// JSON learn report.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Chunk sentences with a learned hypothesis.
    Predict {
        #[arg(long, value_name = "FILE")]
        hypothesis: PathBuf,
        #[arg(long, value_name = "FILE")]
        tokens: PathBuf,
        /// Bracketed chunkings; stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Score predicted chunkings against gold chunkings.
    Score {
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        #[arg(long, value_name = "FILE")]
        tokens: PathBuf,
    },
    /// k-fold cross-validation of the chunking pipeline.
    Xval {
        #[arg(long, value_name = "FILE")]
        tokens: PathBuf,
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        /// Mode declarations and extra background; the built-in chunking
        /// modes when absent.
        #[arg(long, value_name = "FILE")]
        mode: Option<PathBuf>,
        #[arg(long, value_name = "K", default_value_t = 11)]
        folds: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Separate test corpus scored by every fold's hypothesis.
        #[arg(long, value_name = "FILE", requires = "test_gold")]
        test_tokens: Option<PathBuf>,
        #[arg(long, value_name = "FILE", requires = "test_tokens")]
        test_gold: Option<PathBuf>,
        /// Shuffle sentences with this seed before splitting into folds.
        #[arg(long, value_name = "SEED")]
        shuffle_seed: Option<u64>,
        /// JSON report; stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Earlier report to compare per-fold F1 against with a paired
        /// one-tailed t-test.
        #[arg(long, value_name = "FILE")]
        compare: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_hypothesis(path: &Path) -> Result<Vec<Rule>> {
    parse_program(&read(path)?)
}

/// Mode bias and extra background for corpus commands.
fn chunk_modes(mode: Option<&Path>) -> Result<(crate::bias::ModeBias, Vec<Rule>)> {
    match mode {
        None => Ok((default_bias(), Vec::new())),
        Some(p) => {
            let mf = parse_mode_file(&read(p)?)?;
            if mf.bias.heads.is_empty() {
                return Err(Error::Mode(format!("{}: no #modeh declaration", p.display())));
            }
            if !mf.examples.is_empty() {
                log::warn!("{}: #example directives are ignored for corpus learning", p.display());
            }
            Ok((mf.bias, mf.rules))
        }
    }
}

pub fn cmd_learn(
    mode: Option<&Path>,
    corpus: Option<(&Path, &Path)>,
    search: &SearchArgs,
    out: Option<&Path>,
    report: Option<&Path>,
) -> Result<()> {
    let task = match corpus {
        Some((tokens, gold)) => {
            let (bias, extra) = chunk_modes(mode)?;
            LearningTask::from_corpus(&load_corpus(tokens, gold)?, bias, &extra)
        }
        None => {
            let mode = mode.ok_or_else(|| {
                Error::InvalidArgument("learn needs --mode, or --tokens with --gold".into())
            })?;
            LearningTask::from_mode_file(parse_mode_file(&read(mode)?)?)
        }
    };
    let opts = search.learn_options();
    let outcome = learn(&task, &opts)?;
    write_or_print(out, &print_program(&outcome.induction.hypothesis))?;
    let rep = LearnReport::new(&outcome, &opts);
    eprintln!(
        "covered weight {}, {} uncovered, so {}, {}",
        rep.covered,
        rep.uncovered.len(),
        rep.so,
        if rep.optimal { "optimal" } else { "not proven optimal" }
    );
    if let Some(p) = report {
        write_or_print(Some(p), &(serde_json::to_string_pretty(&rep)? + "\n"))?;
    }
    Ok(())
}

pub fn cmd_predict(hypothesis: &Path, tokens: &Path, out: Option<&Path>) -> Result<()> {
    let h = read_hypothesis(hypothesis)?;
    let sentences = load_sentences(tokens)?;
    let mut text = String::new();
    for s in &sentences {
        text.push_str(&predict(&h, s)?.format(s));
        text.push('\n');
    }
    write_or_print(out, &text)
}

pub fn cmd_score(pred: &Path, gold: &Path, tokens: &Path) -> Result<()> {
    let sentences = load_sentences(tokens)?;
    let p = parse_gold(&read(pred)?, &sentences)?;
    let g = parse_gold(&read(gold)?, &sentences)?;
    let scores: Vec<_> = sentences
        .iter()
        .zip(p.iter().zip(&g))
        .map(|(s, (p, g))| score(p, g, s))
        .collect();
    let avg = macro_average(&scores);
    let json = serde_json::json!({
        "sentences": sentences.len(),
        "p": avg.precision,
        "r": avg.recall,
        "f1": avg.f1,
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

fn load_optional_corpus(tokens: Option<&Path>, gold: Option<&Path>) -> Result<Vec<(Sentence, Chunking)>> {
    match (tokens, gold) {
        (Some(t), Some(g)) => load_corpus(t, g),
        _ => Ok(Vec::new()),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_xval(
    tokens: &Path,
    gold: &Path,
    mode: Option<&Path>,
    folds: usize,
    search: &SearchArgs,
    test: (Option<&Path>, Option<&Path>),
    shuffle_seed: Option<u64>,
    out: Option<&Path>,
    compare: Option<&Path>,
) -> Result<()> {
    let corpus = load_corpus(tokens, gold)?;
    let test_corpus = load_optional_corpus(test.0, test.1)?;
    let (bias, extra) = chunk_modes(mode)?;
    let opts = XvalOptions {
        folds,
        learn: search.learn_options(),
        shuffle_seed,
    };
    let report = cross_validate(&corpus, &test_corpus, &bias, &extra, &opts)?;
    let other = compare
        .map(|p| -> Result<XvalReport> { Ok(serde_json::from_str(&read(p)?)?) })
        .transpose()?;
    write_or_print(out, &(serde_json::to_string_pretty(&report)? + "\n"))?;

    let mut lines = vec![format!(
        "CV F1 {:.4} ± {:.4}",
        report.summary.cv.f1.mean, report.summary.cv.f1.std
    )];
    if let Some(t) = &report.summary.test {
        lines.push(format!("Test F1 {:.4} ± {:.4}", t.f1.mean, t.f1.std));
    }
    if let Some(other) = other {
        let r = paired_t_test_one_tailed(&report.fold_f1(), &other.fold_f1())?;
        lines.push(format!("t = {:.6}, p = {:.6} (df {}, one-tailed)", r.t, r.p, r.df));
    }
    for l in lines {
        if out.is_some() {
            println!("{l}");
        } else {
            eprintln!("{l}");
        }
    }
    Ok(())
}

fn init_logging(verbose_solver: bool) {
    let mut b = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"));
    if verbose_solver {
        b.filter_module("xhail_lite::induction", log::LevelFilter::Info);
    }
    b.format_timestamp(None);
    let _ = b.try_init();
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_logging(config.verbose_solver);
    let result = match &config.command {
        Command::Learn {
            mode,
            tokens,
            gold,
            search,
            out,
            report,
        } => {
            if mode.is_none() && tokens.is_none() {
                eprintln!("error: learn needs --mode, or --tokens with --gold");
                return EXIT_USAGE;
            }
            let corpus = tokens.as_deref().zip(gold.as_deref());
            cmd_learn(mode.as_deref(), corpus, search, out.as_deref(), report.as_deref())
        }
        Command::Predict {
            hypothesis,
            tokens,
            out,
        } => cmd_predict(hypothesis, tokens, out.as_deref()),
        Command::Score { pred, gold, tokens } => cmd_score(pred, gold, tokens),
        Command::Xval {
            tokens,
            gold,
            mode,
            folds,
            search,
            test_tokens,
            test_gold,
            shuffle_seed,
            out,
            compare,
        } => {
            if *folds < 2 {
                eprintln!("error: --folds must be at least 2, got {folds}");
                return EXIT_USAGE;
            }
            cmd_xval(
                tokens,
                gold,
                mode.as_deref(),
                *folds,
                search,
                (test_tokens.as_deref(), test_gold.as_deref()),
                *shuffle_seed,
                out.as_deref(),
                compare.as_deref(),
            )
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_PIPELINE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_values() {
        assert_eq!(parse_budget("0").unwrap(), Duration::ZERO);
        assert_eq!(parse_budget("1.5").unwrap(), Duration::from_millis(1500));
        assert!(parse_budget("-1").is_err());
        assert!(parse_budget("soon").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["xhail-lite", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["xhail-lite", "learn", "--pr", "-3", "--mode", "x"]), EXIT_USAGE);
        assert_eq!(run(["xhail-lite", "learn"]), EXIT_USAGE);
        assert_eq!(run(["xhail-lite", "--help"]), EXIT_OK);
    }

    #[test]
    fn defaults() {
        let c = RunConfig::try_parse_from(["x", "xval", "--tokens", "t", "--gold", "g"]).unwrap();
        match c.command {
            Command::Xval { folds, search, .. } => {
                assert_eq!(folds, 11);
                assert_eq!(search.pr, 0);
                assert_eq!(search.budget, Duration::from_secs(1800));
            }
            _ => panic!("wrong command"),
        }
    }
}
