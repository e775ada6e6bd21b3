//! Abduction, deduction, generalisation, pruning and induction chained
//! into one learning run.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bias::{aggregate_support, ExampleSpec, GeneralRule, ModeBias, ModeFile};
use crate::chunking::{background_rules, make_examples_at, sentence_facts_at, Chunking, Sentence};
use crate::error::Result;
use crate::induction::{induce, InductionResult};
use crate::kernel::{abduce, deduce, prune_kernel, AbductionResult, GroundKernel};
use crate::logic::Rule;

#[derive(Clone, Debug, Default)]
pub struct LearningTask {
    pub background: Vec<Rule>,
    /// Rules that only give examples their meaning, such as `goodchunk`.
    pub context: Vec<Rule>,
    pub examples: Vec<ExampleSpec>,
    pub bias: ModeBias,
}

impl LearningTask {
    /// A task whose background is every ordinary rule of the mode file.
    pub fn from_mode_file(mf: ModeFile) -> Self {
        LearningTask {
            background: mf.rules,
            context: Vec::new(),
            examples: mf.examples,
            bias: mf.bias,
        }
    }

    /// One task over a whole training corpus. Sentences get disjoint token
    /// ids by cumulative offset, so their facts and examples do not mix.
    pub fn from_corpus(corpus: &[(Sentence, Chunking)], bias: ModeBias, extra: &[Rule]) -> Self {
        let mut task = LearningTask {
            background: background_rules(),
            bias,
            ..Default::default()
        };
        task.background.extend_from_slice(extra);
        let mut offset = 0;
        for (s, c) in corpus {
            task.background
                .extend(sentence_facts_at(s, offset).iter().map(Rule::fact));
            let (rules, examples) = make_examples_at(c, s.len(), offset);
            task.context.extend(rules);
            task.examples.extend(examples);
            offset += s.len();
        }
        task
    }
}

#[derive(Clone, Debug)]
pub struct LearnOptions {
    pub pr: usize,
    /// Applies to abduction and to induction separately.
    pub budget: Duration,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            pr: 0,
            budget: Duration::from_secs(1800),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub abduction: AbductionResult,
    pub kernel: GroundKernel,
    pub general: Vec<GeneralRule>,
    pub pruned: Vec<GeneralRule>,
    pub induction: InductionResult,
    pub elapsed_s: f64,
}

pub fn learn(task: &LearningTask, opts: &LearnOptions) -> Result<LearnOutcome> {
    let start = Instant::now();
    let abduction = abduce(
        &task.background,
        &task.examples,
        &task.context,
        &task.bias,
        Some(opts.budget),
    )?;
    log::debug!("abduced {} atoms", abduction.delta.len());
    let kernel = deduce(&task.background, &task.context, &abduction.delta, &task.bias)?;
    let general = aggregate_support(&kernel.rules, &task.bias)?;
    let pruned = prune_kernel(&general, opts.pr);
    log::debug!(
        "kernel: {} ground, {} general, {} after pruning",
        kernel.len(),
        general.len(),
        pruned.len()
    );
    let induction = induce(
        &pruned,
        &task.background,
        &task.context,
        &task.examples,
        opts.budget,
    )?;
    Ok(LearnOutcome {
        abduction,
        kernel,
        general,
        pruned,
        induction,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LearnReport {
    pub pr: usize,
    pub budget_s: f64,
    pub optimal: bool,
    pub so: f64,
    pub upper_bound: u64,
    pub lower_bound: u64,
    pub covered: u64,
    pub uncovered: Vec<String>,
    pub abduced: usize,
    pub kernel_rules: usize,
    pub general_rules: usize,
    pub pruned_rules: usize,
    pub elapsed_s: f64,
    pub hypothesis: Vec<String>,
}

impl LearnReport {
    pub fn new(outcome: &LearnOutcome, opts: &LearnOptions) -> Self {
        let ind = &outcome.induction;
        LearnReport {
            pr: opts.pr,
            budget_s: opts.budget.as_secs_f64(),
            optimal: ind.optimal,
            so: ind.so,
            upper_bound: ind.upper_bound,
            lower_bound: ind.lower_bound,
            covered: ind.covered_weight,
            uncovered: ind.uncovered.iter().map(|e| e.literal.to_string()).collect(),
            abduced: outcome.abduction.delta.len(),
            kernel_rules: outcome.kernel.len(),
            general_rules: outcome.general.len(),
            pruned_rules: outcome.pruned.len(),
            elapsed_s: outcome.elapsed_s,
            hypothesis: ind.hypothesis.iter().map(|r| r.to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bias::parse_mode_file;
    use crate::chunking::{default_bias, parse_gold, parse_tokens};

    #[test]
    fn flies_end_to_end() {
        let mf = parse_mode_file(
            "#modeh flies(+bird).\n#modeb penguin(+bird).\n#modeb not penguin(+bird).\n\
             #example flies(a).\n#example flies(b).\n#example flies(c).\n#example not flies(d).\n\
             bird(X) :- penguin(X). bird(a). bird(b). bird(c). penguin(d).",
        )
        .unwrap();
        let out = learn(&LearningTask::from_mode_file(mf), &LearnOptions::default()).unwrap();
        assert_eq!(out.general.len(), 1);
        assert_eq!(out.general[0].support, 3);
        let h: Vec<String> = out.induction.hypothesis.iter().map(|r| r.to_string()).collect();
        assert_eq!(h, ["flies(V1) :- bird(V1), not penguin(V1)."]);
        assert!(out.induction.optimal);
    }

    #[test]
    fn two_sentence_corpus() {
        let tsv = "a\t1\tJohn\tNNP\t_\na\t2\tslept\tVBD\t_\na\t3\there\tRB\t_\n\n\
                   b\t1\tMary\tNNP\t_\nb\t2\tran\tVBD\t_\nb\t3\thome\tNN\t_\n";
        let gold = "[ John ] [ slept ] [ here ]\n[ Mary ] [ ran ] [ home ]\n";
        let sentences = parse_tokens(tsv).unwrap();
        let g = parse_gold(gold, &sentences).unwrap();
        let corpus: Vec<_> = sentences.into_iter().zip(g).collect();
        let task = LearningTask::from_corpus(&corpus, default_bias(), &[]);
        assert_eq!(task.examples.len(), 6);
        let out = learn(&task, &LearnOptions::default()).unwrap();
        assert_eq!(out.abduction.delta.len(), 4);
        assert!(out.induction.optimal);
        assert_eq!(out.induction.covered_weight, 6);
        for (s, gold) in &corpus {
            let p = crate::chunking::predict(&out.induction.hypothesis, s).unwrap();
            assert_eq!(&p, gold);
        }
    }
}
