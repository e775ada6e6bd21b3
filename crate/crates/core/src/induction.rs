//! Anytime search for a hypothesis: a subset of the pruned kernel rules,
//! each with a subset of its body literals, minimising the weight of
//! uncovered examples first and hypothesis size second.
//!
//! The search is a depth-first branch and bound over the kernel rules, one
//! decision per rule (leave out, or one of its sub-rules). Every node's
//! "nothing more" completion is a candidate hypothesis, so upper bounds
//! improve as soon as the search starts. Lower bounds come from a
//! three-valued evaluation of the examples with undecided atoms unknown,
//! plus a covering relaxation for examples that still need a rule. The
//! global lower bound is the least bound over open nodes.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bias::{canonicalize, ExampleSpec, GeneralRule};
use crate::error::{Error, Result};
use crate::eval::residual::{AtomId, Residual, Truth};
use crate::eval::{fire_rule, split_facts, stratify};
use crate::kernel::coverage;
use crate::logic::{Atom, FactBase, PredKey, Rule};

/// Sub-rules generated per kernel rule at most, smallest drops first.
const MAX_SUBRULES: usize = 4096;
/// Entries kept in the dominance table.
const MEMO_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEvent {
    pub elapsed_s: f64,
    pub upper_bound: u64,
    pub lower_bound: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InductionResult {
    pub hypothesis: Vec<Rule>,
    pub covered_weight: u64,
    pub uncovered: Vec<ExampleSpec>,
    pub upper_bound: u64,
    pub lower_bound: u64,
    pub so: f64,
    pub optimal: bool,
    pub elapsed_s: f64,
    pub events: Vec<BoundEvent>,
}

/// Sum over the kernel of body length plus one.
pub fn total_literals(pruned: &[GeneralRule]) -> u64 {
    pruned.iter().map(|g| g.rule.size() as u64).sum()
}

/// `uncovered_weight * (total_literals + 1) + rules + body literals`.
pub fn cost(candidate: &[Rule], uncovered_weight: u64, total_literals: u64) -> u64 {
    let size: u64 = candidate.iter().map(|r| r.size() as u64).sum();
    uncovered_weight * (total_literals + 1) + size
}

/// Relative gap between the bounds. A zero lower bound with a positive
/// upper bound is measured against 1.
pub fn suboptimality(upper_bound: u64, lower_bound: u64) -> f64 {
    if upper_bound <= lower_bound {
        0.0
    } else {
        (upper_bound - lower_bound) as f64 / lower_bound.max(1) as f64
    }
}

/// Safe sub-rules of `rule` in canonical form, by increasing number of
/// dropped literals, deduplicated.
pub fn subrules(rule: &Rule) -> Vec<Rule> {
    let n = rule.body.len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    'outer: for k in 0..=n {
        let mut drop: Vec<usize> = (0..k).collect();
        loop {
            let body = rule
                .body
                .iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, l)| l.clone())
                .collect();
            let sub = Rule {
                head: rule.head.clone(),
                body,
            };
            if sub.is_safe() {
                let c = canonicalize(&sub);
                if seen.insert(c.clone()) {
                    out.push(c);
                    if out.len() >= MAX_SUBRULES {
                        log::warn!("sub-rule enumeration of `{rule}` capped at {MAX_SUBRULES}");
                        break 'outer;
                    }
                }
            }
            // next k-combination in lexicographic order
            let mut i = k;
            loop {
                if i == 0 {
                    continue 'outer;
                }
                i -= 1;
                if drop[i] < n - k + i {
                    drop[i] += 1;
                    for j in i + 1..k {
                        drop[j] = drop[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
    out
}

struct Opt {
    /// Index into the pruned kernel.
    kernel: usize,
    /// Search depth of the kernel rule.
    depth: usize,
    rule: Rule,
    canon: usize,
    size: u64,
    derived: Vec<AtomId>,
    touched: Vec<usize>,
}

struct Ex {
    weight: u64,
    fixed: Option<bool>,
    cone_rules: Vec<usize>,
    /// Compatible options that can change this example.
    helpers: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Node {
    depth: usize,
    chosen: Vec<usize>,
    size: u64,
    lb: u64,
}

struct NodeEval {
    lb: u64,
    completion: u64,
}

// one per search, so the variant size gap costs nothing
#[allow(clippy::large_enum_variant)]
enum Model {
    /// Sub-rule bodies use only predicates the hypothesis cannot affect, so
    /// each option derives a fixed atom set.
    Decomposable {
        res: Residual,
        open_atoms: Vec<AtomId>,
        /// Atoms derivable by options at depth >= d.
        suffix_atoms: Vec<Vec<AtomId>>,
        bit_of: Vec<u32>,
    },
    /// Anything else: every completion is checked with the evaluator.
    General { rules: Vec<Rule>, facts: FactBase },
}

struct Search<'a> {
    model: Model,
    opts: Vec<Opt>,
    by_depth: Vec<Vec<usize>>,
    examples: Vec<Ex>,
    specs: &'a [ExampleSpec],
    m: u64,
    fixed_uncovered: u64,
    /// Coverage of each example by the empty hypothesis.
    empty_covered: Vec<bool>,
    empty_uncovered: u64,
    values: Vec<Truth>,
    stamp: Vec<u32>,
    count: Vec<u32>,
    generation: u32,
    memo: HashMap<(usize, Vec<u64>), u64>,
    best: Vec<usize>,
    upper: u64,
    lower: u64,
    events: Vec<BoundEvent>,
    start: Instant,
}

impl Search<'_> {
    fn record(&mut self) {
        let e = BoundEvent {
            elapsed_s: self.start.elapsed().as_secs_f64(),
            upper_bound: self.upper,
            lower_bound: self.lower,
        };
        log::info!(
            "bounds: upper {} lower {} after {:.3}s",
            e.upper_bound,
            e.lower_bound,
            e.elapsed_s
        );
        self.events.push(e);
    }

    fn offer(&mut self, chosen: &[usize], cost: u64) {
        if cost < self.upper {
            self.upper = cost;
            self.best = chosen.to_vec();
            if self.lower > self.upper {
                self.lower = self.upper;
            }
            self.record();
        }
    }

    fn raise_lower(&mut self, lb: u64) {
        let lb = lb.min(self.upper);
        if lb > self.lower {
            self.lower = lb;
            self.record();
        }
    }

    fn size_of(&self, chosen: &[usize]) -> u64 {
        chosen.iter().map(|&o| self.opts[o].size).sum()
    }

    fn set_open(&mut self, chosen: &[usize], depth: usize) {
        let Model::Decomposable {
            open_atoms,
            suffix_atoms,
            ..
        } = &self.model
        else {
            return;
        };
        for &a in open_atoms {
            self.values[a as usize] = Truth::False;
        }
        for &a in &suffix_atoms[depth] {
            self.values[a as usize] = Truth::Unknown;
        }
        for &o in chosen {
            for &a in &self.opts[o].derived {
                self.values[a as usize] = Truth::True;
            }
        }
    }

    fn example_truth(&mut self, e: usize) -> Truth {
        let Model::Decomposable { res, .. } = &self.model else {
            unreachable!()
        };
        let ex = &self.examples[e];
        if let Some(f) = ex.fixed {
            return if f { Truth::True } else { Truth::False };
        }
        res.eval(&ex.cone_rules, &mut self.values);
        res.literal_truth(&self.specs[e].literal, &self.values)
    }

    fn general_uncovered(&self, chosen: &[usize]) -> Result<u64> {
        let Model::General { rules, facts } = &self.model else {
            unreachable!()
        };
        let mut program = rules.clone();
        program.extend(chosen.iter().map(|&o| self.opts[o].rule.clone()));
        let (covered, _) = coverage(&program, facts, self.specs)?;
        Ok(covered
            .iter()
            .zip(self.specs)
            .filter(|(c, _)| !**c)
            .map(|(_, s)| u64::from(s.weight))
            .sum())
    }

    /// Bounds for the node that has decided the first `depth` rules.
    fn evaluate(&mut self, depth: usize, chosen: &[usize]) -> Result<NodeEval> {
        let size = self.size_of(chosen);
        if matches!(self.model, Model::General { .. }) {
            let completion = self.m * self.general_uncovered(chosen)? + size;
            return Ok(NodeEval {
                lb: if depth == self.by_depth.len() { completion } else { size },
                completion,
            });
        }
        self.set_open(chosen, depth);
        let n = self.examples.len();
        let mut truth = vec![Truth::False; n];
        let mut uncovered_false = self.fixed_uncovered;
        for (e, t) in truth.iter_mut().enumerate() {
            if self.examples[e].fixed.is_some() {
                *t = Truth::True;
                continue;
            }
            *t = self.example_truth(e);
            if *t == Truth::False {
                uncovered_false += self.examples[e].weight;
            }
        }
        if let Model::Decomposable { suffix_atoms, .. } = &self.model {
            for &a in &suffix_atoms[depth] {
                if self.values[a as usize] == Truth::Unknown {
                    self.values[a as usize] = Truth::False;
                }
            }
        }
        let pending: Vec<usize> = (0..n)
            .filter(|&e| truth[e] == Truth::Unknown && self.example_truth(e) != Truth::True)
            .collect();
        let pending_weight: u64 = pending.iter().map(|&e| self.examples[e].weight).sum();
        let completion = self.m * (uncovered_false + pending_weight) + size;
        let relax = self.relaxation(depth, chosen, &pending);
        Ok(NodeEval {
            lb: self.m * uncovered_false + size + relax,
            completion,
        })
    }

    /// Lower bound on the extra cost of the pending examples: each needs a
    /// further compatible sub-rule or stays uncovered. Takes the better of
    /// a disjoint-packing bound and a fractional covering bound.
    fn relaxation(&mut self, depth: usize, chosen: &[usize], pending: &[usize]) -> u64 {
        if pending.is_empty() {
            return 0;
        }
        self.generation += 1;
        let gen = self.generation;
        let usable = |o: &Opt, opts: &[Opt]| {
            o.depth >= depth && !chosen.iter().any(|&c| opts[c].canon == o.canon)
        };
        for &e in pending {
            for &o in &self.examples[e].helpers {
                if usable(&self.opts[o], &self.opts) {
                    if self.stamp[o] != gen {
                        self.stamp[o] = gen;
                        self.count[o] = 0;
                    }
                    self.count[o] += 1;
                }
            }
        }
        let mut fractional = 0.0;
        let mut packing: Vec<(u64, usize)> = Vec::with_capacity(pending.len());
        for &e in pending {
            let cap = self.examples[e].weight * self.m;
            let mut y = cap as f64;
            let mut c = cap;
            for &o in &self.examples[e].helpers {
                if self.stamp[o] == gen {
                    let s = self.opts[o].size;
                    y = y.min(s as f64 / f64::from(self.count[o]));
                    c = c.min(s);
                }
            }
            fractional += y;
            packing.push((c, e));
        }
        packing.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut used: Vec<bool> = vec![false; self.by_depth.len()];
        let mut packed = 0;
        for (c, e) in packing {
            let rules: Vec<usize> = self.examples[e]
                .helpers
                .iter()
                .filter(|&&o| self.stamp[o] == gen)
                .map(|&o| self.opts[o].depth)
                .collect();
            if rules.iter().all(|&r| !used[r]) {
                for r in rules {
                    used[r] = true;
                }
                packed += c;
            }
        }
        let fractional = (fractional - 1e-9).ceil().max(0.0) as u64;
        packed.max(fractional)
    }

    fn dominated(&mut self, depth: usize, chosen: &[usize], size: u64) -> bool {
        let Model::Decomposable { bit_of, open_atoms, .. } = &self.model else {
            return false;
        };
        let mut key = vec![0u64; open_atoms.len().div_ceil(64)];
        for &o in chosen {
            for &a in &self.opts[o].derived {
                let b = bit_of[a as usize] as usize;
                key[b / 64] |= 1 << (b % 64);
            }
        }
        match self.memo.get_mut(&(depth, key.clone())) {
            Some(s) if *s <= size => true,
            Some(s) => {
                *s = size;
                false
            }
            None => {
                if self.memo.len() < MEMO_CAP {
                    self.memo.insert((depth, key), size);
                }
                false
            }
        }
    }

    /// Adds the sub-rule that lowers the cost most until none does.
    fn greedy(&mut self) -> Result<()> {
        let mut chosen: Vec<usize> = Vec::new();
        let full = self.by_depth.len();
        let mut current = self.evaluate(full, &chosen)?.completion;
        loop {
            let mut best: Option<(u64, usize)> = None;
            for o in 0..self.opts.len() {
                let op = &self.opts[o];
                if chosen
                    .iter()
                    .any(|&c| self.opts[c].depth == op.depth || self.opts[c].canon == op.canon)
                {
                    continue;
                }
                chosen.push(o);
                let c = self.completion_cost(&chosen)?;
                chosen.pop();
                if c < current && best.is_none_or(|(b, _)| c < b) {
                    best = Some((c, o));
                }
            }
            match best {
                Some((c, o)) => {
                    chosen.push(o);
                    current = c;
                }
                None => break,
            }
        }
        self.offer(&chosen, current);
        Ok(())
    }

    /// Exact cost of a complete choice; only examples the options touch are
    /// re-evaluated in the decomposable case.
    fn completion_cost(&mut self, chosen: &[usize]) -> Result<u64> {
        if matches!(self.model, Model::General { .. }) {
            return Ok(self.m * self.general_uncovered(chosen)? + self.size_of(chosen));
        }
        let full = self.by_depth.len();
        self.set_open(chosen, full);
        let mut touched: Vec<usize> = chosen
            .iter()
            .flat_map(|&o| self.opts[o].touched.iter().copied())
            .collect();
        touched.sort_unstable();
        touched.dedup();
        let mut uncovered = self.fixed_uncovered + self.empty_uncovered;
        for e in touched {
            if !self.empty_covered[e] {
                uncovered -= self.examples[e].weight;
            }
            if self.example_truth(e) != Truth::True {
                uncovered += self.examples[e].weight;
            }
        }
        Ok(self.m * uncovered + self.size_of(chosen))
    }
}

fn build_options(
    pruned: &[GeneralRule],
    order: &[usize],
) -> (Vec<Opt>, HashMap<Rule, usize>) {
    let mut canon_ids: HashMap<Rule, usize> = HashMap::new();
    let mut opts = Vec::new();
    for (depth, &k) in order.iter().enumerate() {
        for rule in subrules(&pruned[k].rule) {
            let n = canon_ids.len();
            let canon = *canon_ids.entry(rule.clone()).or_insert(n);
            opts.push(Opt {
                kernel: k,
                depth,
                size: rule.size() as u64,
                rule,
                canon,
                derived: Vec::new(),
                touched: Vec::new(),
            });
        }
    }
    (opts, canon_ids)
}

/// Chooses rules and body subsets from `pruned` minimising [`cost`] over
/// `examples`, within `budget` of wall-clock time. A zero budget returns
/// the greedy seed with the root lower bound.
pub fn induce(
    pruned: &[GeneralRule],
    background: &[Rule],
    context: &[Rule],
    examples: &[ExampleSpec],
    budget: Duration,
) -> Result<InductionResult> {
    let start = Instant::now();
    let deadline = start.checked_add(budget);
    let mut program = background.to_vec();
    program.extend_from_slice(context);
    let (rules, facts) = split_facts(&program);
    let t = total_literals(pruned);

    let mut order: Vec<usize> = (0..pruned.len()).collect();
    order.sort_by(|&a, &b| pruned[b].support.cmp(&pruned[a].support).then(a.cmp(&b)));
    let (mut opts, _) = build_options(pruned, &order);

    let mut everything = rules.clone();
    everything.extend(opts.iter().map(|o| o.rule.clone()));
    stratify(&everything)?;
    let open: BTreeSet<PredKey> = pruned
        .iter()
        .filter_map(|g| g.rule.head.as_ref().map(|h| h.key()))
        .collect();
    if pruned.iter().any(|g| g.rule.head.is_none()) {
        return Err(Error::InvalidArgument("kernel rules must have heads".into()));
    }

    let probe = Residual::build(&rules, &facts, &open, &[])?;
    let decomposable = opts
        .iter()
        .all(|o| o.rule.body.iter().all(|l| !probe.is_dynamic_pred(&l.atom.key())));

    let n = order.len();
    let model;
    let mut exs: Vec<Ex> = Vec::with_capacity(examples.len());
    let mut values = Vec::new();
    if decomposable {
        // Options with no effect, or the same effect as a smaller option of
        // the same rule, can never be part of a unique best choice.
        let mut kept: Vec<Opt> = Vec::new();
        let mut derived_atoms: Vec<Vec<Atom>> = Vec::new();
        let mut best_of: HashMap<(usize, Vec<Atom>), usize> = HashMap::new();
        for o in opts {
            let d = fire_rule(&o.rule, probe.base());
            if d.is_empty() {
                continue;
            }
            match best_of.get(&(o.depth, d.clone())) {
                Some(&i) if (kept[i].size, &kept[i].rule) <= (o.size, &o.rule) => {}
                Some(&i) => kept[i] = o,
                None => {
                    best_of.insert((o.depth, d.clone()), kept.len());
                    kept.push(o);
                    derived_atoms.push(d);
                }
            }
        }
        opts = kept;
        let candidates: Vec<Atom> = derived_atoms
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        drop(probe);
        let res = Residual::build(&rules, &facts, &open, &candidates)?;
        let open_atoms: Vec<AtomId> = candidates
            .iter()
            .map(|a| res.id(a).expect("candidate interned"))
            .collect();
        let mut bit_of = vec![u32::MAX; res.num_atoms()];
        for (i, &a) in open_atoms.iter().enumerate() {
            bit_of[a as usize] = i as u32;
        }
        for (o, d) in opts.iter_mut().zip(&derived_atoms) {
            o.derived = d.iter().map(|a| res.id(a).expect("interned")).collect();
        }

        values = vec![Truth::False; res.num_atoms()];
        let mut by_atom: HashMap<AtomId, Vec<usize>> = HashMap::new();
        for (e, spec) in examples.iter().enumerate() {
            let lit = &spec.literal;
            let weight = u64::from(spec.weight);
            let mut ex = Ex {
                weight,
                fixed: None,
                cone_rules: Vec::new(),
                helpers: Vec::new(),
            };
            match res.id(&lit.atom).filter(|_| res.is_dynamic_pred(&lit.atom.key())) {
                None => {
                    ex.fixed = Some(res.literal_truth(lit, &values) == Truth::True);
                }
                Some(id) => {
                    let (cone_rules, cone_open) = res.cone(id);
                    if cone_open.is_empty() {
                        res.eval(&cone_rules, &mut values);
                        ex.fixed = Some(res.literal_truth(lit, &values) == Truth::True);
                    } else {
                        for a in cone_open {
                            by_atom.entry(a).or_default().push(e);
                        }
                        ex.cone_rules = cone_rules;
                    }
                }
            }
            exs.push(ex);
        }
        for o in opts.iter_mut() {
            let mut touched: Vec<usize> = o
                .derived
                .iter()
                .flat_map(|a| by_atom.get(a).into_iter().flatten().copied())
                .collect();
            touched.sort_unstable();
            touched.dedup();
            o.touched = touched;
        }
        for (i, o) in opts.iter().enumerate() {
            for &a in &open_atoms {
                values[a as usize] = Truth::Unknown;
            }
            for &a in &o.derived {
                values[a as usize] = Truth::True;
            }
            for &e in &o.touched {
                res.eval(&exs[e].cone_rules, &mut values);
                if res.literal_truth(&examples[e].literal, &values) != Truth::False {
                    exs[e].helpers.push(i);
                }
            }
        }
        let mut suffix_atoms = vec![Vec::new(); n + 1];
        let mut acc: BTreeSet<AtomId> = BTreeSet::new();
        for d in (0..n).rev() {
            for o in opts.iter().filter(|o| o.depth == d) {
                acc.extend(o.derived.iter().copied());
            }
            suffix_atoms[d] = acc.iter().copied().collect();
        }
        model = Model::Decomposable {
            res,
            open_atoms,
            suffix_atoms,
            bit_of,
        };
    } else {
        log::info!("kernel rules depend on hypothesis predicates; using exact evaluation per node");
        for spec in examples {
            exs.push(Ex {
                weight: u64::from(spec.weight),
                fixed: None,
                cone_rules: Vec::new(),
                helpers: Vec::new(),
            });
        }
        model = Model::General { rules: rules.clone(), facts: facts.clone() };
    }

    let mut by_depth = vec![Vec::new(); n];
    for (i, o) in opts.iter().enumerate() {
        by_depth[o.depth].push(i);
    }
    let fixed_uncovered = exs
        .iter()
        .filter(|e| e.fixed == Some(false))
        .map(|e| e.weight)
        .sum();
    let num_opts = opts.len();
    let mut search = Search {
        model,
        opts,
        by_depth,
        examples: exs,
        specs: examples,
        m: t + 1,
        fixed_uncovered,
        empty_covered: Vec::new(),
        empty_uncovered: 0,
        values,
        stamp: vec![0; num_opts],
        count: vec![0; num_opts],
        generation: 0,
        memo: HashMap::new(),
        best: Vec::new(),
        upper: u64::MAX,
        lower: 0,
        events: Vec::new(),
        start,
    };
    if matches!(search.model, Model::Decomposable { .. }) {
        search.set_open(&[], n);
        for e in 0..search.examples.len() {
            let covered = search.examples[e].fixed.is_some() || search.example_truth(e) == Truth::True;
            search.empty_covered.push(covered);
            if !covered {
                search.empty_uncovered += search.examples[e].weight;
            }
        }
    }

    search.greedy()?;
    let root = search.evaluate(0, &[])?;
    search.offer(&[], root.completion);
    search.raise_lower(root.lb);

    let mut exhausted = budget.is_zero();
    if !budget.is_zero() {
        let mut stack = vec![Node {
            depth: 0,
            chosen: Vec::new(),
            size: 0,
            lb: root.lb,
        }];
        exhausted = true;
        while let Some(node) = stack.pop() {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                stack.push(node);
                exhausted = false;
                break;
            }
            if node.lb >= search.upper || node.depth == n {
                continue;
            }
            let mut children = Vec::new();
            let choices: Vec<Option<usize>> = std::iter::once(None)
                .chain(search.by_depth[node.depth].iter().copied().map(Some))
                .collect();
            for choice in choices {
                let mut chosen = node.chosen.clone();
                if let Some(o) = choice {
                    let canon = search.opts[o].canon;
                    if chosen.iter().any(|&c| search.opts[c].canon == canon) {
                        continue;
                    }
                    chosen.push(o);
                }
                let depth = node.depth + 1;
                let size = node.size + choice.map_or(0, |o| search.opts[o].size);
                if search.dominated(depth, &chosen, size) {
                    continue;
                }
                let ev = search.evaluate(depth, &chosen)?;
                search.offer(&chosen, ev.completion);
                if ev.lb < search.upper {
                    children.push(Node {
                        depth,
                        chosen,
                        size,
                        lb: ev.lb,
                    });
                }
            }
            children.sort_by_key(|c| c.lb);
            stack.extend(children.into_iter().rev());
            let open_min = stack.iter().map(|n| n.lb).min().unwrap_or(u64::MAX);
            search.raise_lower(open_min);
        }
    }
    if exhausted && !budget.is_zero() {
        search.raise_lower(search.upper);
    }

    let mut best = search.best.clone();
    best.sort_by_key(|&o| search.opts[o].kernel);
    let hypothesis: Vec<Rule> = best.iter().map(|&o| search.opts[o].rule.clone()).collect();
    let mut full = rules;
    full.extend(hypothesis.iter().cloned());
    let (covered, _) = coverage(&full, &facts, examples)?;
    let uncovered: Vec<ExampleSpec> = examples
        .iter()
        .zip(&covered)
        .filter(|(_, &c)| !c)
        .map(|(e, _)| e.clone())
        .collect();
    let uncovered_weight: u64 = uncovered.iter().map(|e| u64::from(e.weight)).sum();
    let total_weight: u64 = examples.iter().map(|e| u64::from(e.weight)).sum();
    debug_assert_eq!(cost(&hypothesis, uncovered_weight, t), search.upper);

    let (upper, lower) = (search.upper, search.lower);
    Ok(InductionResult {
        hypothesis,
        covered_weight: total_weight - uncovered_weight,
        uncovered,
        upper_bound: upper,
        lower_bound: lower,
        so: suboptimality(upper, lower),
        optimal: upper == lower,
        elapsed_s: start.elapsed().as_secs_f64(),
        events: search.events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bias::{aggregate_support, parse_mode_file};
    use crate::kernel::{abduce, deduce, prune_kernel};
    use crate::logic::parse_program;

    const FLIES: &str = "#modeh flies(+bird).\n#modeb penguin(+bird).\n#modeb not penguin(+bird).\n\
        #example flies(a).\n#example flies(b).\n#example flies(c).\n#example not flies(d).\n";
    const FLIES_B: &str = "bird(X) :- penguin(X). bird(a). bird(b). bird(c). penguin(d).";

    fn rule(text: &str) -> Rule {
        parse_program(text).unwrap().remove(0)
    }

    #[test]
    fn cost_fixtures() {
        let h = [rule("flies(X) :- bird(X), not penguin(X).")];
        assert_eq!(cost(&h, 0, 3), 3);
        assert_eq!(cost(&[], 4, 3), 16);
        assert_eq!(cost(&[], 0, 0), 0);
    }

    #[test]
    fn gap_formula() {
        assert!((suboptimality(12, 10) - 0.2).abs() < 1e-12);
        assert_eq!(suboptimality(7, 7), 0.0);
    }

    #[test]
    fn subrules_are_safe_and_distinct() {
        let subs = subrules(&rule("flies(X) :- bird(X), not penguin(X)."));
        let text: Vec<String> = subs.iter().map(|r| r.to_string()).collect();
        assert_eq!(text, ["flies(V1) :- bird(V1), not penguin(V1).", "flies(V1) :- bird(V1)."]);
        let subs = subrules(&rule("s(X) :- t(X), p(c,X), n(d,X)."));
        assert_eq!(subs.len(), 7);
    }

    #[test]
    fn flies_hypothesis() {
        let b = parse_program(FLIES_B).unwrap();
        let mf = parse_mode_file(FLIES).unwrap();
        let d = abduce(&b, &mf.examples, &[], &mf.bias, None).unwrap();
        let k = deduce(&b, &[], &d.delta, &mf.bias).unwrap();
        let g = prune_kernel(&aggregate_support(&k.rules, &mf.bias).unwrap(), 0);
        let r = induce(&g, &b, &[], &mf.examples, Duration::from_secs(10)).unwrap();
        assert_eq!(r.hypothesis.len(), 1);
        assert_eq!(r.hypothesis[0].to_string(), "flies(V1) :- bird(V1), not penguin(V1).");
        assert_eq!(r.covered_weight, 4);
        assert!(r.optimal);
        assert_eq!(r.so, 0.0);
        assert_eq!(r.upper_bound, 3);
    }

    #[test]
    fn empty_kernel_is_trivially_optimal() {
        let b = parse_program("t(a).").unwrap();
        let mf = parse_mode_file("#example p(a).\n#example not p(b).\n#example not p(c).").unwrap();
        let r = induce(&[], &b, &[], &mf.examples, Duration::from_secs(1)).unwrap();
        assert!(r.hypothesis.is_empty());
        assert_eq!(r.covered_weight, 2);
        assert_eq!(r.uncovered.len(), 1);
        assert!(r.optimal);
    }

    #[test]
    fn zero_budget_returns_seed() {
        let b = parse_program(FLIES_B).unwrap();
        let mf = parse_mode_file(FLIES).unwrap();
        let g = vec![GeneralRule {
            rule: rule("flies(V1) :- bird(V1), not penguin(V1)."),
            support: 3,
            origin_ids: vec![0, 1, 2],
        }];
        let r = induce(&g, &b, &[], &mf.examples, Duration::ZERO).unwrap();
        assert_eq!(r.upper_bound, 3);
        assert!(r.lower_bound <= r.upper_bound);
        assert_eq!(r.optimal, r.upper_bound == r.lower_bound);
    }

    #[test]
    fn recursive_kernel_uses_exact_evaluation() {
        let b = parse_program("e(1,2). e(2,3). n(1). n(2). n(3).").unwrap();
        let mf = parse_mode_file("#example r(1).\n#example r(2).\n#example r(3).").unwrap();
        let g = vec![
            GeneralRule {
                rule: rule("r(X) :- n(X), e(X,Y), r(Y)."),
                support: 1,
                origin_ids: vec![0],
            },
            GeneralRule {
                rule: rule("r(X) :- n(X)."),
                support: 1,
                origin_ids: vec![1],
            },
        ];
        let r = induce(&g, &b, &[], &mf.examples, Duration::from_secs(5)).unwrap();
        assert!(r.optimal);
        assert_eq!(r.covered_weight, 3);
        assert_eq!(r.hypothesis.len(), 1);
        assert_eq!(r.hypothesis[0].to_string(), "r(V1) :- n(V1).");
    }
}
