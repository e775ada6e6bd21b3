//! Bottom-up evaluation of stratified programs.
//!
//! Rules are instantiated by joining their positive body literals left to
//! right against the current model; NAF literals are checked afterwards
//! against the (already complete) lower strata.

mod join;
pub(crate) mod residual;

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub(crate) use join::{join_positive, substitute, Binding};

use crate::error::{Error, Result};
use crate::logic::{Atom, FactBase, Literal, PredKey, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification {
    /// Rule indices grouped by stratum, lowest first.
    pub strata: Vec<Vec<usize>>,
    pub predicate_level: BTreeMap<PredKey, usize>,
}

pub(crate) fn pred_name(key: &PredKey) -> String {
    format!("{}/{}", key.0, key.1)
}

/// Dependency edges `head -> (body predicate, through negation)`.
fn dependency_graph(program: &[Rule]) -> BTreeMap<PredKey, BTreeSet<(PredKey, bool)>> {
    let mut graph: BTreeMap<PredKey, BTreeSet<(PredKey, bool)>> = BTreeMap::new();
    for rule in program {
        for lit in &rule.body {
            graph.entry(lit.atom.key()).or_default();
        }
        if let Some(head) = &rule.head {
            let edges = graph.entry(head.key()).or_default();
            for lit in &rule.body {
                edges.insert((lit.atom.key(), lit.negated));
            }
        }
    }
    graph
}

/// Tarjan's algorithm; components come out dependencies-first.
fn strongly_connected(graph: &BTreeMap<PredKey, BTreeSet<(PredKey, bool)>>) -> Vec<Vec<PredKey>> {
    struct State<'g> {
        graph: &'g BTreeMap<PredKey, BTreeSet<(PredKey, bool)>>,
        index: HashMap<&'g PredKey, usize>,
        low: HashMap<&'g PredKey, usize>,
        on_stack: BTreeSet<&'g PredKey>,
        stack: Vec<&'g PredKey>,
        next: usize,
        out: Vec<Vec<PredKey>>,
    }

    fn visit<'g>(s: &mut State<'g>, v: &'g PredKey) {
        s.index.insert(v, s.next);
        s.low.insert(v, s.next);
        s.next += 1;
        s.stack.push(v);
        s.on_stack.insert(v);
        for (w, _) in &s.graph[v] {
            let w = s.graph.get_key_value(w).map(|(k, _)| k).expect("node");
            if !s.index.contains_key(w) {
                visit(s, w);
                let lw = s.low[w];
                let lv = s.low.get_mut(v).unwrap();
                *lv = (*lv).min(lw);
            } else if s.on_stack.contains(w) {
                let iw = s.index[w];
                let lv = s.low.get_mut(v).unwrap();
                *lv = (*lv).min(iw);
            }
        }
        if s.low[v] == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().unwrap();
                s.on_stack.remove(w);
                comp.push(w.clone());
                if w == v {
                    break;
                }
            }
            comp.sort();
            s.out.push(comp);
        }
    }

    let mut s = State {
        graph,
        index: HashMap::new(),
        low: HashMap::new(),
        on_stack: BTreeSet::new(),
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in graph.keys() {
        if !s.index.contains_key(v) {
            visit(&mut s, v);
        }
    }
    s.out
}

/// Assigns every predicate a level so that negative dependencies point
/// strictly downwards, or reports a negative cycle.
pub fn stratify(program: &[Rule]) -> Result<Stratification> {
    let graph = dependency_graph(program);
    let mut predicate_level: BTreeMap<PredKey, usize> = BTreeMap::new();
    for comp in strongly_connected(&graph) {
        let members: BTreeSet<&PredKey> = comp.iter().collect();
        let mut level = 0;
        for p in &comp {
            for (q, negated) in &graph[p] {
                if members.contains(q) {
                    if *negated {
                        return Err(Error::NotStratified(comp.iter().map(pred_name).collect()));
                    }
                } else {
                    level = level.max(predicate_level[q] + usize::from(*negated));
                }
            }
        }
        for p in comp {
            predicate_level.insert(p, level);
        }
    }
    let height = predicate_level.values().max().map_or(0, |m| m + 1);
    let mut strata = vec![Vec::new(); height.max(1)];
    for (i, rule) in program.iter().enumerate() {
        let level = rule.head.as_ref().map_or(0, |h| predicate_level[&h.key()]);
        strata[level].push(i);
    }
    Ok(Stratification {
        strata,
        predicate_level,
    })
}

fn body_holds_negatively(rule: &Rule, model: &FactBase, binding: &Binding) -> bool {
    rule.negative_body()
        .all(|atom| !join::exists_match(atom, model, binding))
}

/// Evaluates `program` over `facts` and returns the stratified model, input
/// facts included.
pub fn evaluate(program: &[Rule], facts: &FactBase) -> Result<FactBase> {
    if let Some(c) = program.iter().find(|r| r.head.is_none()) {
        return Err(Error::Constraint(c.to_string()));
    }
    let strat = stratify(program)?;
    let mut model = facts.clone();
    for stratum in &strat.strata {
        let rules: Vec<&Rule> = stratum.iter().map(|&i| &program[i]).collect();
        loop {
            let mut derived = Vec::new();
            for rule in &rules {
                let head = rule.head.as_ref().expect("checked above");
                let positive: Vec<&Atom> = rule.positive_body().collect();
                join_positive(&positive, &model, &mut Binding::default(), &mut |b| {
                    if body_holds_negatively(rule, &model, b) {
                        let atom = substitute(head, b);
                        if !model.contains(&atom) {
                            derived.push(atom);
                        }
                    }
                });
            }
            let mut changed = false;
            for atom in derived {
                changed |= model.insert_ground(atom);
            }
            if !changed {
                break;
            }
        }
    }
    Ok(model)
}

/// Head instances of one rule whose body holds in `model`, which must
/// already be closed under every predicate the body mentions. Sorted.
pub fn fire_rule(rule: &Rule, model: &FactBase) -> Vec<Atom> {
    let Some(head) = &rule.head else {
        return Vec::new();
    };
    let positive: Vec<&Atom> = rule.positive_body().collect();
    let mut out = Vec::new();
    join_positive(&positive, model, &mut Binding::default(), &mut |b| {
        if body_holds_negatively(rule, model, b) {
            out.push(substitute(head, b));
        }
    });
    out.sort();
    out.dedup();
    out
}

/// Whether a ground literal holds in the model of `program` over `facts`.
pub fn holds(program: &[Rule], facts: &FactBase, query: &Literal) -> Result<bool> {
    if !query.atom.is_ground() {
        return Err(Error::NonGround(query.atom.to_string()));
    }
    let model = evaluate(program, facts)?;
    Ok(model.contains(&query.atom) != query.negated)
}

/// Splits a program into its ground facts and the remaining rules.
pub fn split_facts(program: &[Rule]) -> (Vec<Rule>, FactBase) {
    let mut facts = FactBase::new();
    let mut rules = Vec::new();
    for r in program {
        if r.is_fact() {
            facts.insert_ground(r.head.clone().expect("fact has head"));
        } else {
            rules.push(r.clone());
        }
    }
    (rules, facts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_program, Term};

    fn lit(text: &str) -> Literal {
        let mut p = crate::logic::Parser::new(text).unwrap();
        p.parse_literal().unwrap()
    }

    const FLIES_B: &str = "bird(X) :- penguin(X). bird(a). bird(b). bird(c). penguin(d).";
    const FLIES_H: &str = "flies(X) :- bird(X), not penguin(X).";

    #[test]
    fn background_program_has_one_stratum() {
        let p = parse_program("postype(X) :- pos(X,_). token(X) :- pos(_,X).").unwrap();
        let s = stratify(&p).unwrap();
        assert_eq!(s.strata.len(), 1);
    }

    #[test]
    fn goodchunk_sits_above_split() {
        let p = parse_program(
            "goodchunk(1) :- not split(1), not split(2), not split(3), not split(4), not split(5), split(6).\n\
             goodchunk(7) :- split(6), split(7).\n\
             goodchunk(8) :- split(7), not split(8).",
        )
        .unwrap();
        let s = stratify(&p).unwrap();
        let split = s.predicate_level[&("split".into(), 1)];
        let good = s.predicate_level[&("goodchunk".into(), 1)];
        assert!(split < good);
    }

    #[test]
    fn self_negation_is_not_stratified() {
        let p = parse_program("p :- not p.").unwrap();
        match stratify(&p) {
            Err(Error::NotStratified(cycle)) => assert_eq!(cycle, ["p/0"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn flies_model() {
        let mut program = parse_program(FLIES_B).unwrap();
        program.extend(parse_program(FLIES_H).unwrap());
        let (rules, facts) = split_facts(&program);
        let model = evaluate(&rules, &facts).unwrap();
        for c in ["a", "b", "c"] {
            assert!(model.contains(&Atom::new("flies", vec![Term::constant(c)])));
        }
        assert!(!model.contains(&Atom::new("flies", vec![Term::constant("d")])));
        assert!(model.contains(&Atom::new("bird", vec![Term::constant("d")])));
    }

    #[test]
    fn holds_queries() {
        let mut program = parse_program(FLIES_B).unwrap();
        let facts = FactBase::new();
        assert!(!holds(&program, &facts, &lit("flies(d)")).unwrap());
        program.extend(parse_program(FLIES_H).unwrap());
        assert!(holds(&program, &facts, &lit("flies(a)")).unwrap());
        assert!(holds(&program, &facts, &lit("not flies(d)")).unwrap());
    }

    #[test]
    fn empty_program_is_identity() {
        let facts: FactBase = vec![Atom::new("p", vec![Term::Int(1)])].into_iter().collect();
        assert_eq!(evaluate(&[], &facts).unwrap(), facts);
    }

    #[test]
    fn positive_recursion() {
        let p = parse_program(
            "edge(1,2). edge(2,3). edge(3,4).\n\
             path(X,Y) :- edge(X,Y).\n\
             path(X,Z) :- path(X,Y), edge(Y,Z).",
        )
        .unwrap();
        let model = evaluate(&p, &FactBase::new()).unwrap();
        assert_eq!(model.tuples("path", 2).count(), 6);
    }

    #[test]
    fn constraints_are_rejected() {
        let p = parse_program(":- p(a).").unwrap();
        assert!(matches!(evaluate(&p, &FactBase::new()), Err(Error::Constraint(_))));
    }

    #[test]
    fn anonymous_in_negation_means_no_match() {
        let p = parse_program("q(a,1). r(a). r(b). s(X) :- r(X), not q(X,_).").unwrap();
        let model = evaluate(&p, &FactBase::new()).unwrap();
        assert_eq!(model.tuples("s", 1).count(), 1);
    }
}
