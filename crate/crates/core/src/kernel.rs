//! Kernel set construction: abduction of head atoms, deduction of ground
//! kernel rules, and support-based pruning of the generalised kernel.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::bias::{ExampleSpec, GeneralRule, Marker, ModeBias, ModeDecl};
use crate::error::{Error, Result};
use crate::eval::residual::{AtomId, Residual, Truth};
use crate::eval::{evaluate, split_facts};
use crate::logic::{Atom, FactBase, Literal, PredKey, Rule, Term};

#[derive(Clone, Debug, PartialEq)]
pub struct AbductionResult {
    pub delta: FactBase,
    /// Number of examples entailed by B ∪ context ∪ delta.
    pub covered: usize,
    pub uncovered: Vec<ExampleSpec>,
    pub optimal: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundKernel {
    pub rules: Vec<Rule>,
    /// `origins[i]` is the abduced atom heading `rules[i]`.
    pub origins: Vec<Atom>,
}

impl GroundKernel {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

fn type_extension(model: &FactBase, type_name: &str) -> Vec<Term> {
    model.tuples(type_name, 1).map(|t| t[0].clone()).collect()
}

fn cartesian(lists: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for t in list {
                let mut v = prefix.clone();
                v.push(t.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// All ground instances of the head declarations over the type extensions
/// in `model`, sorted.
pub fn candidate_abducibles(bias: &ModeBias, model: &FactBase) -> Vec<Atom> {
    let mut out = BTreeSet::new();
    for decl in &bias.heads {
        let lists: Vec<Vec<Term>> = decl
            .placeholders
            .iter()
            .map(|p| type_extension(model, &p.type_name))
            .collect();
        for args in cartesian(&lists) {
            out.insert(Atom {
                predicate: decl.predicate.clone(),
                args,
            });
        }
    }
    out.into_iter().collect()
}

/// Lexicographic abduction cost: (uncovered weight, |Δ|).
type AbdCost = (u64, usize);

struct Component {
    examples: Vec<usize>,
    atoms: Vec<AtomId>,
    rules: Vec<usize>,
}

struct AbductionSearch<'a> {
    res: &'a Residual,
    examples: &'a [ExampleSpec],
    comp: &'a Component,
    values: Vec<Truth>,
    deadline: Option<Instant>,
    timed_out: bool,
    best: Vec<bool>,
    best_cost: AbdCost,
    best_is_seed: bool,
}

impl AbductionSearch<'_> {
    /// Cost under the assignment in `assign`; `Unknown` atoms make this a
    /// lower bound.
    fn bound(&mut self, assign: &[Truth]) -> AbdCost {
        for (&a, &t) in self.comp.atoms.iter().zip(assign) {
            self.values[a as usize] = t;
        }
        self.res.eval(&self.comp.rules, &mut self.values);
        let mut uncovered = 0;
        for &e in &self.comp.examples {
            let ex = &self.examples[e];
            if self.res.literal_truth(&ex.literal, &self.values) == Truth::False {
                uncovered += u64::from(ex.weight);
            }
        }
        let size = assign.iter().filter(|&&t| t == Truth::True).count();
        (uncovered, size)
    }

    fn exact(&mut self, chosen: &[bool]) -> AbdCost {
        let assign: Vec<Truth> = chosen
            .iter()
            .map(|&c| if c { Truth::True } else { Truth::False })
            .collect();
        let (_, size) = self.bound(&assign);
        let mut uncovered = 0;
        for &e in &self.comp.examples {
            let ex = &self.examples[e];
            if self.res.literal_truth(&ex.literal, &self.values) != Truth::True {
                uncovered += u64::from(ex.weight);
            }
        }
        (uncovered, size)
    }

    fn expired(&mut self) -> bool {
        if !self.timed_out && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        self.timed_out
    }

    /// Seed: assume positive example atoms that are abducible, then flip
    /// single atoms while that strictly lowers the cost.
    fn seed(&mut self) {
        let mut chosen: Vec<bool> = self
            .comp
            .atoms
            .iter()
            .map(|&a| {
                let atom = self.res.atom(a);
                self.comp.examples.iter().any(|&e| {
                    let l = &self.examples[e].literal;
                    !l.negated && &l.atom == atom
                })
            })
            .collect();
        let mut cost = self.exact(&chosen);
        loop {
            if self.expired() {
                break;
            }
            let mut best: Option<(AbdCost, usize)> = None;
            for i in 0..chosen.len() {
                chosen[i] = !chosen[i];
                let c = self.exact(&chosen);
                chosen[i] = !chosen[i];
                if c < cost && best.is_none_or(|(b, _)| c < b) {
                    best = Some((c, i));
                }
            }
            match best {
                Some((c, i)) => {
                    chosen[i] = !chosen[i];
                    cost = c;
                }
                None => break,
            }
        }
        self.best = chosen;
        self.best_cost = cost;
        self.best_is_seed = true;
    }

    fn pruned(&self, lb: AbdCost) -> bool {
        if self.best_is_seed {
            lb > self.best_cost
        } else {
            lb >= self.best_cost
        }
    }

    /// Include-first DFS over the component's atoms in sorted order, so
    /// among equal-cost sets the lexicographically smallest is met first.
    fn dfs(&mut self, k: usize, assign: &mut Vec<Truth>) {
        if self.expired() {
            return;
        }
        let lb = self.bound(assign);
        if self.pruned(lb) {
            return;
        }
        if k == assign.len() {
            let chosen: Vec<bool> = assign.iter().map(|&t| t == Truth::True).collect();
            let cost = self.exact(&chosen);
            let better = cost < self.best_cost
                || (cost == self.best_cost
                    && self.best_is_seed
                    && self.as_atoms(&chosen) < self.as_atoms(&self.best));
            if better {
                self.best = chosen;
                self.best_cost = cost;
            }
            if cost <= self.best_cost {
                self.best_is_seed = false;
            }
            return;
        }
        for t in [Truth::True, Truth::False] {
            assign[k] = t;
            self.dfs(k + 1, assign);
        }
        assign[k] = Truth::Unknown;
    }

    fn as_atoms(&self, chosen: &[bool]) -> Vec<&Atom> {
        self.comp
            .atoms
            .iter()
            .zip(chosen)
            .filter(|(_, &c)| c)
            .map(|(&a, _)| self.res.atom(a))
            .collect()
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Groups examples whose truth depends on overlapping abducibles.
fn components(res: &Residual, examples: &[ExampleSpec]) -> Vec<Component> {
    let cones: Vec<Option<(Vec<usize>, Vec<AtomId>)>> = examples
        .iter()
        .map(|ex| res.id(&ex.literal.atom).map(|id| res.cone(id)))
        .collect();
    let mut parent: Vec<usize> = (0..examples.len()).collect();
    let mut owner: BTreeMap<AtomId, usize> = BTreeMap::new();
    for (e, cone) in cones.iter().enumerate() {
        for &a in cone.iter().flat_map(|c| &c.1) {
            match owner.get(&a) {
                Some(&o) => {
                    let (ra, rb) = (find(&mut parent, o), find(&mut parent, e));
                    parent[rb.max(ra)] = ra.min(rb);
                }
                None => {
                    owner.insert(a, e);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
    for (e, cone) in cones.into_iter().enumerate() {
        let root = find(&mut parent, e);
        let comp = groups.entry(root).or_insert_with(|| Component {
            examples: Vec::new(),
            atoms: Vec::new(),
            rules: Vec::new(),
        });
        comp.examples.push(e);
        if let Some((rules, atoms)) = cone {
            comp.rules.extend(rules);
            comp.atoms.extend(atoms);
        }
    }
    groups
        .into_values()
        .map(|mut c| {
            c.rules.sort_unstable();
            c.rules.dedup();
            c.atoms.sort_by(|a, b| res.atom(*a).cmp(res.atom(*b)));
            c.atoms.dedup();
            c
        })
        .collect()
}

/// Checks every example against the model of `rules` over `facts`.
pub(crate) fn coverage(
    rules: &[Rule],
    facts: &FactBase,
    examples: &[ExampleSpec],
) -> Result<(Vec<bool>, FactBase)> {
    let model = evaluate(rules, facts)?;
    let covered = examples
        .iter()
        .map(|ex| model.contains(&ex.literal.atom) != ex.literal.negated)
        .collect();
    Ok((covered, model))
}

fn head_keys(bias: &ModeBias) -> BTreeSet<PredKey> {
    bias.heads
        .iter()
        .map(|d| (d.predicate.clone(), d.arity()))
        .collect()
}

/// Finds a set Δ of head-declaration instances minimising first the weight
/// of examples left uncovered by B ∪ context ∪ Δ, then |Δ|, preferring the
/// lexicographically smaller Δ on ties. Examples that depend on disjoint
/// abducibles are solved independently.
pub fn abduce(
    background: &[Rule],
    examples: &[ExampleSpec],
    context: &[Rule],
    bias: &ModeBias,
    budget: Option<Duration>,
) -> Result<AbductionResult> {
    let mut program = background.to_vec();
    program.extend_from_slice(context);
    let (rules, facts) = split_facts(&program);
    if examples.is_empty() {
        return Ok(AbductionResult {
            delta: FactBase::new(),
            covered: 0,
            uncovered: Vec::new(),
            optimal: true,
        });
    }
    let deadline = budget.map(|b| Instant::now() + b);
    let model0 = evaluate(&rules, &facts)?;
    let candidates = candidate_abducibles(bias, &model0);
    if candidates.is_empty() {
        let decls: Vec<String> = bias.heads.iter().map(|d| d.to_string()).collect();
        return Err(Error::NoAbducibles(format!(
            "type predicates of [{}] are empty",
            decls.join(" ")
        )));
    }
    let res = Residual::build(&rules, &facts, &head_keys(bias), &candidates)?;

    let mut delta = FactBase::new();
    let mut optimal = true;
    let mut values = vec![Truth::False; res.num_atoms()];
    for comp in components(&res, examples) {
        let mut search = AbductionSearch {
            res: &res,
            examples,
            comp: &comp,
            values: std::mem::take(&mut values),
            deadline,
            timed_out: false,
            best: Vec::new(),
            best_cost: (0, 0),
            best_is_seed: true,
        };
        search.seed();
        let mut assign = vec![Truth::Unknown; comp.atoms.len()];
        search.dfs(0, &mut assign);
        optimal &= !search.timed_out;
        for (&a, &c) in comp.atoms.iter().zip(&search.best) {
            if c {
                delta.insert_ground(res.atom(a).clone());
            }
        }
        values = search.values;
    }

    let mut with_delta = facts;
    with_delta.extend_from(&delta);
    let (covered, _) = coverage(&rules, &with_delta, examples)?;
    Ok(AbductionResult {
        delta,
        covered: covered.iter().filter(|&&c| c).count(),
        uncovered: examples
            .iter()
            .zip(&covered)
            .filter(|(_, &c)| !c)
            .map(|(e, _)| e.clone())
            .collect(),
        optimal,
    })
}

fn has_type(model: &FactBase, type_name: &str, c: &Term) -> bool {
    model.contains(&Atom {
        predicate: type_name.into(),
        args: vec![c.clone()],
    })
}

/// Ground instances of a body declaration linked to the head's `+`
/// constants, true in `model` (or, for a negated declaration, false in it).
fn body_instances(
    decl: &ModeDecl,
    linked: &[Term],
    model: &FactBase,
) -> Vec<Literal> {
    let allowed = |i: usize, t: &Term| {
        let ph = &decl.placeholders[i];
        has_type(model, &ph.type_name, t) && (ph.marker == Marker::Constant || linked.contains(t))
    };
    let mut atoms: Vec<Atom> = if decl.negated {
        let lists: Vec<Vec<Term>> = decl
            .placeholders
            .iter()
            .map(|ph| match ph.marker {
                Marker::Input => linked
                    .iter()
                    .filter(|c| has_type(model, &ph.type_name, c))
                    .cloned()
                    .collect(),
                Marker::Constant => type_extension(model, &ph.type_name),
            })
            .collect();
        cartesian(&lists)
            .into_iter()
            .map(|args| Atom {
                predicate: decl.predicate.clone(),
                args,
            })
            .filter(|a| !model.contains(a))
            .collect()
    } else {
        model
            .tuples(&decl.predicate, decl.arity())
            .filter(|args| args.iter().enumerate().all(|(i, t)| allowed(i, t)))
            .map(|args| Atom {
                predicate: decl.predicate.clone(),
                args: args.clone(),
            })
            .collect()
    };
    atoms.sort();
    atoms
        .into_iter()
        .map(|atom| Literal {
            atom,
            negated: decl.negated,
        })
        .collect()
}

/// Builds one ground rule per abduced atom: type guards for the head's
/// `+` constants, then the linked body-declaration instances in
/// declaration order.
pub fn deduce(
    background: &[Rule],
    context: &[Rule],
    delta: &FactBase,
    bias: &ModeBias,
) -> Result<GroundKernel> {
    let mut program = background.to_vec();
    program.extend_from_slice(context);
    let (rules, mut facts) = split_facts(&program);
    facts.extend_from(delta);
    let model = evaluate(&rules, &facts)?;

    let mut kernel = GroundKernel::default();
    for head in delta.iter() {
        let decl = bias.head_for(&head).ok_or_else(|| {
            Error::Mode(format!("abduced atom {head} matches no head declaration"))
        })?;
        let mut body: Vec<Literal> = Vec::new();
        let mut linked: Vec<Term> = Vec::new();
        for (ph, c) in decl.placeholders.iter().zip(&head.args) {
            if ph.marker == Marker::Input {
                let guard = Literal::pos(Atom {
                    predicate: ph.type_name.clone(),
                    args: vec![c.clone()],
                });
                if !body.contains(&guard) {
                    body.push(guard);
                }
                if !linked.contains(c) {
                    linked.push(c.clone());
                }
            }
        }
        for d in &bias.bodies {
            for lit in body_instances(d, &linked, &model) {
                if !body.contains(&lit) {
                    body.push(lit);
                }
            }
        }
        kernel.rules.push(Rule {
            head: Some(head.clone()),
            body,
        });
        kernel.origins.push(head);
    }
    Ok(kernel)
}

/// Keeps the rules with support strictly above `pr`, in order.
pub fn prune_kernel(general: &[GeneralRule], pr: usize) -> Vec<GeneralRule> {
    general.iter().filter(|g| g.support > pr).cloned().collect()
}
