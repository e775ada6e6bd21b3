//! Ground residual programs with three-valued evaluation.
//!
//! Given a program and a set of *open* predicates whose atoms are chosen by a
//! search (abducibles, or heads derived by a candidate hypothesis), the
//! program splits into a base part that does not depend on open atoms and
//! a residual part that does. The base is evaluated once. The residual is
//! grounded against the over-approximation "every candidate open atom is
//! true, every NAF literal may hold" and then evaluated per assignment in
//! Kleene logic, so partial assignments yield sound bounds.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{evaluate, join_positive, stratify, substitute, Binding};
use crate::error::{Error, Result};
use crate::logic::{Atom, FactBase, Literal, PredKey, Rule};

pub(crate) type AtomId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Truth {
    False,
    Unknown,
    True,
}

impl Truth {
    pub(crate) fn not(self) -> Truth {
        match self {
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
            Truth::True => Truth::False,
        }
    }
}

#[derive(Clone, Debug)]
struct GroundRule {
    head: AtomId,
    pos: Vec<AtomId>,
    neg: Vec<AtomId>,
    level: usize,
}

#[derive(Debug)]
pub(crate) struct Residual {
    atoms: Vec<Atom>,
    ids: HashMap<Atom, AtomId>,
    open: Vec<bool>,
    /// Sorted by level, so any increasing subset is stratum-ordered.
    rules: Vec<GroundRule>,
    rules_by_head: HashMap<AtomId, Vec<usize>>,
    base: FactBase,
    residual_preds: BTreeSet<PredKey>,
    open_preds: BTreeSet<PredKey>,
}

impl Residual {
    /// Builds the residual of `program` over `facts`, treating atoms of
    /// `open_preds` as assumable. `candidates` over-approximates the open
    /// atoms any assignment may make true.
    pub(crate) fn build(
        program: &[Rule],
        facts: &FactBase,
        open_preds: &BTreeSet<PredKey>,
        candidates: &[Atom],
    ) -> Result<Self> {
        if let Some(c) = program.iter().find(|r| r.head.is_none()) {
            return Err(Error::Constraint(c.to_string()));
        }
        if let Some(r) = program
            .iter()
            .find(|r| open_preds.contains(&r.head.as_ref().unwrap().key()))
        {
            return Err(Error::InvalidArgument(format!(
                "predicate of `{}` is both assumable and defined by the program",
                r
            )));
        }
        if let Some(k) = facts.predicates().find(|k| open_preds.contains(*k)) {
            return Err(Error::InvalidArgument(format!(
                "assumable predicate {}/{} has input facts",
                k.0, k.1
            )));
        }
        let strat = stratify(program)?;

        let mut residual_preds: BTreeSet<PredKey> = BTreeSet::new();
        loop {
            let before = residual_preds.len();
            for r in program {
                let head = r.head.as_ref().unwrap().key();
                if r.body.iter().any(|l| {
                    let k = l.atom.key();
                    open_preds.contains(&k) || residual_preds.contains(&k)
                }) {
                    residual_preds.insert(head);
                }
            }
            if residual_preds.len() == before {
                break;
            }
        }

        let (base_rules, residual_rules): (Vec<Rule>, Vec<Rule>) = program
            .iter()
            .cloned()
            .partition(|r| !residual_preds.contains(&r.head.as_ref().unwrap().key()));
        let mut base_facts = FactBase::new();
        let mut residual_facts = Vec::new();
        for atom in facts.iter() {
            if residual_preds.contains(&atom.key()) {
                residual_facts.push(atom);
            } else {
                base_facts.insert_ground(atom);
            }
        }
        let base = evaluate(&base_rules, &base_facts)?;

        let is_dynamic = |k: &PredKey| open_preds.contains(k) || residual_preds.contains(k);

        // Over-approximate the reachable residual atoms, recording instances.
        let mut poss = base.clone();
        for a in candidates {
            poss.insert_ground(a.clone());
        }
        for a in &residual_facts {
            poss.insert_ground(a.clone());
        }
        let mut instances: Vec<(Atom, Vec<Atom>, Vec<Atom>, usize)> = Vec::new();
        let mut seen: HashSet<(Atom, Vec<Atom>, Vec<Atom>)> = HashSet::new();
        loop {
            let mut fresh = Vec::new();
            for rule in &residual_rules {
                let head = rule.head.as_ref().unwrap();
                let positive: Vec<&Atom> = rule.positive_body().collect();
                let mut bad = None;
                join_positive(&positive, &poss, &mut Binding::default(), &mut |b| {
                    let h = substitute(head, b);
                    let pos: Vec<Atom> = positive.iter().map(|a| substitute(a, b)).collect();
                    let neg: Vec<Atom> = rule.negative_body().map(|a| substitute(a, b)).collect();
                    if neg.iter().any(|a| !a.is_ground() && is_dynamic(&a.key())) {
                        bad = Some(rule.to_string());
                        return;
                    }
                    fresh.push((h, pos, neg, rule));
                });
                if let Some(r) = bad {
                    return Err(Error::InvalidArgument(format!(
                        "`_` inside a negated literal over an assumable predicate is not supported: {r}"
                    )));
                }
            }
            let mut changed = false;
            for (h, pos, neg, rule) in fresh {
                if seen.insert((h.clone(), pos.clone(), neg.clone())) {
                    let level = strat.predicate_level[&rule.head.as_ref().unwrap().key()];
                    poss.insert_ground(h.clone());
                    instances.push((h, pos, neg, level));
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut res = Residual {
            atoms: Vec::new(),
            ids: HashMap::new(),
            open: Vec::new(),
            rules: Vec::new(),
            rules_by_head: HashMap::new(),
            base,
            residual_preds: residual_preds.clone(),
            open_preds: open_preds.clone(),
        };
        for a in candidates {
            let id = res.intern(a);
            res.open[id as usize] = true;
        }
        for a in residual_facts {
            let level = strat.predicate_level[&a.key()];
            let head = res.intern(&a);
            res.rules.push(GroundRule {
                head,
                pos: Vec::new(),
                neg: Vec::new(),
                level,
            });
        }
        'inst: for (h, pos, neg, level) in instances {
            let mut gpos = Vec::new();
            for a in &pos {
                if is_dynamic(&a.key()) {
                    gpos.push(res.intern(a));
                }
            }
            let mut gneg = Vec::new();
            for a in &neg {
                if is_dynamic(&a.key()) {
                    if poss.contains(a) {
                        gneg.push(res.intern(a));
                    }
                } else if super::join::exists_match(a, &res.base, &Binding::default()) {
                    continue 'inst;
                }
            }
            let head = res.intern(&h);
            res.rules.push(GroundRule {
                head,
                pos: gpos,
                neg: gneg,
                level,
            });
        }
        res.rules.sort_by_key(|r| r.level);
        for (i, r) in res.rules.iter().enumerate() {
            res.rules_by_head.entry(r.head).or_default().push(i);
        }
        Ok(res)
    }

    fn intern(&mut self, atom: &Atom) -> AtomId {
        if let Some(&id) = self.ids.get(atom) {
            return id;
        }
        let id = self.atoms.len() as AtomId;
        self.atoms.push(atom.clone());
        self.open.push(false);
        self.ids.insert(atom.clone(), id);
        id
    }

    pub(crate) fn base(&self) -> &FactBase {
        &self.base
    }

    pub(crate) fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub(crate) fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id as usize]
    }

    pub(crate) fn id(&self, atom: &Atom) -> Option<AtomId> {
        self.ids.get(atom).copied()
    }


    pub(crate) fn is_dynamic_pred(&self, key: &PredKey) -> bool {
        self.open_preds.contains(key) || self.residual_preds.contains(key)
    }


    /// Rules and open atoms the truth of `atom` can depend on. Rule indices
    /// come back sorted.
    pub(crate) fn cone(&self, atom: AtomId) -> (Vec<usize>, Vec<AtomId>) {
        let mut rules = BTreeSet::new();
        let mut open = BTreeSet::new();
        let mut seen = HashSet::new();
        let mut stack = vec![atom];
        while let Some(a) = stack.pop() {
            if !seen.insert(a) {
                continue;
            }
            if self.open[a as usize] {
                open.insert(a);
            }
            for &ri in self.rules_by_head.get(&a).into_iter().flatten() {
                rules.insert(ri);
                let r = &self.rules[ri];
                stack.extend(r.pos.iter().chain(&r.neg).copied());
            }
        }
        (rules.into_iter().collect(), open.into_iter().collect())
    }

    /// Kleene evaluation of the given rules (indices in increasing order).
    /// `values` holds the assignment of open atoms on entry; derived atoms
    /// are overwritten.
    pub(crate) fn eval(&self, rule_ids: &[usize], values: &mut [Truth]) {
        let mut start = 0;
        while start < rule_ids.len() {
            let level = self.rules[rule_ids[start]].level;
            let mut end = start;
            while end < rule_ids.len() && self.rules[rule_ids[end]].level == level {
                end += 1;
            }
            let group = &rule_ids[start..end];
            for &ri in group {
                values[self.rules[ri].head as usize] = Truth::False;
            }
            // possible atoms
            let mut possible: HashSet<AtomId> = HashSet::new();
            loop {
                let mut changed = false;
                for &ri in group {
                    let r = &self.rules[ri];
                    if possible.contains(&r.head) {
                        continue;
                    }
                    let ok = r.pos.iter().all(|&a| {
                        possible.contains(&a) || values[a as usize] != Truth::False
                    }) && r.neg.iter().all(|&a| values[a as usize] != Truth::True);
                    if ok {
                        possible.insert(r.head);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            // certainly true atoms
            let mut certain: HashSet<AtomId> = HashSet::new();
            loop {
                let mut changed = false;
                for &ri in group {
                    let r = &self.rules[ri];
                    if certain.contains(&r.head) {
                        continue;
                    }
                    let ok = r
                        .pos
                        .iter()
                        .all(|&a| certain.contains(&a) || values[a as usize] == Truth::True)
                        && r.neg.iter().all(|&a| values[a as usize] == Truth::False);
                    if ok {
                        certain.insert(r.head);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            for &ri in group {
                let h = self.rules[ri].head;
                values[h as usize] = if certain.contains(&h) {
                    Truth::True
                } else if possible.contains(&h) {
                    Truth::Unknown
                } else {
                    Truth::False
                };
            }
            start = end;
        }
    }

    #[cfg(test)]
    pub(crate) fn all_rules(&self) -> Vec<usize> {
        (0..self.rules.len()).collect()
    }

    /// Truth of a ground literal given evaluated residual values.
    pub(crate) fn literal_truth(&self, lit: &Literal, values: &[Truth]) -> Truth {
        let t = if self.is_dynamic_pred(&lit.atom.key()) {
            self.id(&lit.atom)
                .map_or(Truth::False, |id| values[id as usize])
        } else if self.base.contains(&lit.atom) {
            Truth::True
        } else {
            Truth::False
        };
        if lit.negated {
            t.not()
        } else {
            t
        }
    }
}
