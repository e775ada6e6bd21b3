//! Random induction instances with a brute-force optimum that does not go
//! through the library's evaluator.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::Rng;
use xhail_lite::bias::{canonicalize, ExampleSpec, GeneralRule};
use xhail_lite::logic::{parse_program, Atom, Literal, Rule, Term};

pub fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Lit {
    /// `d(V1)`, the domain guard.
    Dom,
    /// `p<k>(V<var>)`.
    Unary { pred: usize, var: usize },
    /// `e(V1,V2)`.
    Edge,
}

#[derive(Clone, Debug)]
struct BodyLit {
    neg: bool,
    lit: Lit,
}

#[derive(Clone, Debug)]
pub struct Instance {
    consts: usize,
    unary: Vec<BTreeSet<usize>>,
    edges: BTreeSet<(usize, usize)>,
    rules: Vec<Vec<BodyLit>>,
    /// `(constant, positive, weight)`
    examples: Vec<(usize, bool, u32)>,
}

pub struct Shape {
    pub rules: std::ops::RangeInclusive<usize>,
    pub body: std::ops::RangeInclusive<usize>,
    pub max_total_body: usize,
    pub consts: usize,
    pub preds: usize,
}

impl Instance {
    pub fn random<R: Rng>(rng: &mut R, shape: &Shape) -> Self {
        let consts = shape.consts;
        let unary = (0..shape.preds)
            .map(|_| (0..consts).filter(|_| rng.gen_bool(0.45)).collect())
            .collect();
        let mut edges = BTreeSet::new();
        for a in 0..consts {
            for b in 0..consts {
                if rng.gen_bool(0.2) {
                    edges.insert((a, b));
                }
            }
        }
        let n_rules = rng.gen_range(shape.rules.clone());
        let mut rules = Vec::new();
        let mut total = 0;
        for _ in 0..n_rules {
            let remaining = shape.max_total_body - total;
            if remaining == 0 {
                break;
            }
            let len = rng.gen_range(shape.body.clone()).min(remaining);
            let mut body = vec![BodyLit { neg: false, lit: Lit::Dom }];
            let use_edge = len >= 3 && rng.gen_bool(0.35);
            if use_edge {
                body.push(BodyLit { neg: false, lit: Lit::Edge });
            }
            let mut attempts = 0;
            while body.len() < len && attempts < 100 {
                attempts += 1;
                let var = if use_edge && rng.gen_bool(0.5) { 2 } else { 1 };
                let lit = Lit::Unary {
                    pred: rng.gen_range(0..shape.preds),
                    var,
                };
                if body.iter().any(|b| b.lit == lit) {
                    continue;
                }
                body.push(BodyLit {
                    neg: rng.gen_bool(0.35),
                    lit,
                });
            }
            total += body.len();
            rules.push(body);
        }
        let mut examples = Vec::new();
        for c in 0..consts {
            if rng.gen_bool(0.85) {
                examples.push((c, rng.gen_bool(0.55), rng.gen_range(1..=3)));
            }
        }
        Instance {
            consts,
            unary,
            edges,
            rules,
            examples,
        }
    }

    fn lit_text(l: &BodyLit) -> String {
        let a = match l.lit {
            Lit::Dom => "d(V1)".to_string(),
            Lit::Unary { pred, var } => format!("p{pred}(V{var})"),
            Lit::Edge => "e(V1,V2)".to_string(),
        };
        if l.neg {
            format!("not {a}")
        } else {
            a
        }
    }

    pub fn kernel(&self) -> Vec<GeneralRule> {
        self.rules
            .iter()
            .enumerate()
            .map(|(i, body)| {
                let body: Vec<String> = body.iter().map(Self::lit_text).collect();
                let text = format!("t(V1) :- {}.", body.join(", "));
                let rule = parse_program(&text).expect("generated rule parses").remove(0);
                GeneralRule {
                    rule: canonicalize(&rule),
                    support: 1,
                    origin_ids: vec![i],
                }
            })
            .collect()
    }

    pub fn background(&self) -> Vec<Rule> {
        let mut text = String::new();
        for c in 0..self.consts {
            let _ = writeln!(text, "d(c{c}).");
        }
        for (p, set) in self.unary.iter().enumerate() {
            for c in set {
                let _ = writeln!(text, "p{p}(c{c}).");
            }
        }
        for (a, b) in &self.edges {
            let _ = writeln!(text, "e(c{a},c{b}).");
        }
        parse_program(&text).expect("generated facts parse")
    }

    pub fn examples(&self) -> Vec<ExampleSpec> {
        self.examples
            .iter()
            .map(|&(c, positive, weight)| {
                let atom = Atom::new("t", vec![Term::constant(&format!("c{c}"))]);
                ExampleSpec {
                    literal: if positive { Literal::pos(atom) } else { Literal::neg(atom) },
                    weight,
                }
            })
            .collect()
    }

    fn lit_holds(&self, l: &BodyLit, v1: usize, v2: usize) -> bool {
        let v = match l.lit {
            Lit::Dom => true,
            Lit::Unary { pred, var } => self.unary[pred].contains(if var == 1 { &v1 } else { &v2 }),
            Lit::Edge => self.edges.contains(&(v1, v2)),
        };
        v != l.neg
    }

    /// Range restriction of the sub-rule of `rule` keeping `mask`.
    fn safe(body: &[BodyLit], mask: u32) -> bool {
        let kept = || body.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| l);
        let bound = |v: usize| {
            kept().any(|l| {
                !l.neg
                    && match l.lit {
                        Lit::Dom => v == 1,
                        Lit::Unary { var, .. } => var == v,
                        Lit::Edge => true,
                    }
            })
        };
        let uses_v2 = kept().any(|l| matches!(l.lit, Lit::Edge | Lit::Unary { var: 2, .. }));
        bound(1) && (!uses_v2 || bound(2))
    }

    fn fires(&self, body: &[BodyLit], mask: u32, c: usize) -> bool {
        let kept: Vec<&BodyLit> = body.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| l).collect();
        let uses_v2 = kept.iter().any(|l| matches!(l.lit, Lit::Edge | Lit::Unary { var: 2, .. }));
        let witnesses = if uses_v2 { 0..self.consts } else { 0..1 };
        witnesses.into_iter().any(|v2| kept.iter().all(|l| self.lit_holds(l, c, v2)))
    }

    fn total_literals(&self) -> u64 {
        self.rules.iter().map(|b| 1 + b.len() as u64).sum()
    }

    /// Cost of choosing `masks[i]` (None = rule left out) per kernel rule.
    fn cost_of(&self, masks: &[Option<u32>]) -> u64 {
        let mut uncovered = 0u64;
        for &(c, positive, w) in &self.examples {
            let derived = self
                .rules
                .iter()
                .zip(masks)
                .any(|(body, m)| m.is_some_and(|m| self.fires(body, m, c)));
            if derived != positive {
                uncovered += w as u64;
            }
        }
        let size: u64 = masks.iter().flatten().map(|m| 1 + m.count_ones() as u64).sum();
        uncovered * (self.total_literals() + 1) + size
    }

    /// Minimum cost over every choice of safe sub-rule or nothing per
    /// kernel rule.
    pub fn brute_force_optimum(&self) -> u64 {
        let choices: Vec<Vec<Option<u32>>> = self
            .rules
            .iter()
            .map(|body| {
                let mut c = vec![None];
                c.extend((0..1u32 << body.len()).filter(|&m| Self::safe(body, m)).map(Some));
                c
            })
            .collect();
        let mut best = u64::MAX;
        let mut pick = vec![None; choices.len()];
        fn go(inst: &Instance, choices: &[Vec<Option<u32>>], i: usize, pick: &mut Vec<Option<u32>>, best: &mut u64) {
            if i == choices.len() {
                *best = (*best).min(inst.cost_of(pick));
                return;
            }
            for &c in &choices[i] {
                pick[i] = c;
                go(inst, choices, i + 1, pick, best);
            }
        }
        go(self, &choices, 0, &mut pick, &mut best);
        best
    }

    /// Cost of an arbitrary hypothesis over this instance's vocabulary,
    /// evaluated directly on the instance data.
    pub fn cost_of_hypothesis(&self, hypothesis: &[Rule]) -> u64 {
        let bodies: Vec<Vec<BodyLit>> = hypothesis.iter().map(|r| self.decode(r)).collect();
        let mut uncovered = 0u64;
        for &(c, positive, w) in &self.examples {
            let derived = bodies.iter().any(|b| self.fires(b, (1 << b.len()) - 1, c));
            if derived != positive {
                uncovered += w as u64;
            }
        }
        let size: u64 = hypothesis.iter().map(|r| r.size() as u64).sum();
        uncovered * (self.total_literals() + 1) + size
    }

    /// Reads a hypothesis rule back into the instance's literal form, with
    /// the head variable as `V1`.
    fn decode(&self, rule: &Rule) -> Vec<BodyLit> {
        let head = rule.head.as_ref().expect("hypothesis rules have heads");
        assert_eq!(head.predicate.as_ref(), "t");
        let x = head.args[0].clone();
        let var_of = |t: &Term| if *t == x { 1 } else { 2 };
        rule.body
            .iter()
            .map(|l| {
                let a = &l.atom;
                let lit = match a.predicate.as_ref() {
                    "d" => Lit::Dom,
                    "e" => {
                        assert!(a.args[0] == x && a.args[1] != x, "unexpected edge literal {l}");
                        Lit::Edge
                    }
                    p => Lit::Unary {
                        pred: p[1..].parse().expect("unary predicate p<k>"),
                        var: var_of(&a.args[0]),
                    },
                };
                BodyLit { neg: l.negated, lit }
            })
            .collect()
    }
}
