//! Mode declarations, examples, and the lifting of ground kernel rules to
//! canonical non-ground rules.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Atom, Literal, Parser, Program, Rule, Term};
use crate::logic::parser::Token;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Marker {
    /// `+type`: a typed variable linked through the head.
    Input,
    /// `$type`: a constant of the type, kept as is.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Placeholder {
    pub marker: Marker,
    pub type_name: Arc<str>,
}

impl fmt::Display for Placeholder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = match self.marker {
            Marker::Input => '+',
            Marker::Constant => '$',
        };
        write!(f, "{m}{}", self.type_name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Head,
    Body,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeDecl {
    pub kind: ModeKind,
    pub negated: bool,
    pub predicate: Arc<str>,
    pub placeholders: Vec<Placeholder>,
}

impl ModeDecl {
    pub fn arity(&self) -> usize {
        self.placeholders.len()
    }

    fn matches_shape(&self, atom: &Atom) -> bool {
        self.predicate == atom.predicate && self.arity() == atom.arity()
    }
}

impl fmt::Display for ModeDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModeKind::Head => f.write_str("#modeh ")?,
            ModeKind::Body => f.write_str("#modeb ")?,
        }
        if self.negated {
            f.write_str("not ")?;
        }
        f.write_str(&self.predicate)?;
        if !self.placeholders.is_empty() {
            let ps: Vec<String> = self.placeholders.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(","))?;
        }
        f.write_str(".")
    }
}

/// The hypothesis language: head and body declarations in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModeBias {
    pub heads: Vec<ModeDecl>,
    pub bodies: Vec<ModeDecl>,
}

impl ModeBias {
    pub fn head_for(&self, atom: &Atom) -> Option<&ModeDecl> {
        self.heads.iter().find(|d| d.matches_shape(atom))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExampleSpec {
    pub literal: Literal,
    pub weight: u32,
}

impl ExampleSpec {
    pub fn new(literal: Literal) -> Self {
        ExampleSpec { literal, weight: 1 }
    }
}

impl fmt::Display for ExampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#example {}", self.literal)?;
        if self.weight != 1 {
            write!(f, " ={}", self.weight)?;
        }
        f.write_str(".")
    }
}

/// Contents of a mode file: declarations, examples, and every ordinary rule
/// in the file (background and example context alike).
#[derive(Clone, Debug, Default)]
pub struct ModeFile {
    pub bias: ModeBias,
    pub examples: Vec<ExampleSpec>,
    pub rules: Program,
}

fn parse_mode_decl(p: &mut Parser, kind: ModeKind) -> Result<ModeDecl> {
    let negated = p.at_naf();
    if negated {
        if kind == ModeKind::Head {
            return Err(Error::Mode("head declarations cannot be negated".into()));
        }
        p.bump();
    }
    let predicate = p.parse_predicate()?;
    let mut placeholders = Vec::new();
    if p.eat(&Token::LParen) {
        loop {
            let marker = match p.bump() {
                Some(Token::Plus) => Marker::Input,
                Some(Token::Dollar) => Marker::Constant,
                other => {
                    return Err(Error::Mode(format!(
                        "malformed placeholder in `{predicate}`: expected `+type` or `$type`, found {}",
                        other.map_or("end of input".into(), |t| format!("{t:?}"))
                    )))
                }
            };
            let type_name = match p.bump() {
                Some(Token::Ident(t)) => t,
                _ => {
                    return Err(Error::Mode(format!(
                        "malformed placeholder in `{predicate}`: missing type name"
                    )))
                }
            };
            placeholders.push(Placeholder { marker, type_name });
            if p.eat(&Token::Comma) {
                continue;
            }
            p.expect(Token::RParen, "`,` or `)`")?;
            break;
        }
    }
    p.expect(Token::Dot, "`.` after mode declaration")?;
    Ok(ModeDecl {
        kind,
        negated,
        predicate,
        placeholders,
    })
}

fn parse_example(p: &mut Parser) -> Result<ExampleSpec> {
    let literal = p.parse_literal()?;
    if !literal.atom.is_ground() {
        return Err(p.error(format!("example `{}` is not ground", literal)));
    }
    let mut weight = 1;
    if p.eat(&Token::Eq) {
        match p.bump() {
            Some(Token::Int(w)) if w > 0 && w <= u32::MAX as i64 => weight = w as u32,
            _ => return Err(p.error("example weight must be a positive integer")),
        }
    }
    p.expect(Token::Dot, "`.` after example")?;
    Ok(ExampleSpec { literal, weight })
}

/// Parses `#modeh`, `#modeb` and `#example` directives; any other statement
/// is an ordinary rule and is returned in [`ModeFile::rules`].
pub fn parse_mode_file(text: &str) -> Result<ModeFile> {
    let mut p = Parser::new(text)?;
    let mut out = ModeFile::default();
    while !p.at_end() {
        match p.peek() {
            Some(Token::Directive(d)) => {
                let d = d.clone();
                p.bump();
                match d.as_str() {
                    "modeh" => out.bias.heads.push(parse_mode_decl(&mut p, ModeKind::Head)?),
                    "modeb" => out.bias.bodies.push(parse_mode_decl(&mut p, ModeKind::Body)?),
                    "example" => out.examples.push(parse_example(&mut p)?),
                    other => return Err(Error::Mode(format!("unknown directive `#{other}`"))),
                }
            }
            _ => out.rules.push(p.parse_rule()?),
        }
    }
    Ok(out)
}

/// Variable-agnostic view of an argument, used to order body literals
/// before renaming. Ground terms sort before variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Ground(Term),
    Var,
    Anon,
}

type LiteralKey = (bool, Arc<str>, usize, Vec<Shape>);

fn literal_key(lit: &Literal) -> LiteralKey {
    let shapes = lit
        .atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(_) => Shape::Var,
            Term::Anon => Shape::Anon,
            g => Shape::Ground(g.clone()),
        })
        .collect();
    (
        lit.negated,
        lit.atom.predicate.clone(),
        lit.atom.arity(),
        shapes,
    )
}

fn rename_in_order(head: Option<&Atom>, body: &[&Literal]) -> Rule {
    let mut names: HashMap<Arc<str>, Arc<str>> = HashMap::new();
    let mut rename = |atom: &Atom| Atom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => {
                    let n = names.len();
                    Term::Var(
                        names
                            .entry(v.clone())
                            .or_insert_with(|| Arc::from(format!("V{}", n + 1)))
                            .clone(),
                    )
                }
                other => other.clone(),
            })
            .collect(),
    };
    let head = head.map(&mut rename);
    let body = body
        .iter()
        .map(|l| Literal {
            atom: rename(&l.atom),
            negated: l.negated,
        })
        .collect();
    Rule { head, body }
}

/// Upper bound on the in-group orderings tried per rule.
const MAX_ORDERINGS: usize = 40_320;

fn for_each_permutation<T: Clone>(items: &mut Vec<T>, k: usize, f: &mut dyn FnMut(&[T])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Puts a rule in canonical form modulo variable renaming and body order.
///
/// Body literals are deduplicated and sorted by a variable-agnostic key
/// (negation flag, predicate, arity, argument shapes). Literals with equal
/// keys are interchangeable for that sort, so every ordering within such
/// groups is tried; each is renamed `V1, V2, ...` by first occurrence over
/// head then body, and the least resulting rule is the canonical form. This
/// is exact as long as the number of in-group orderings stays below
/// 8!; past that the plain sorted order is used.
pub fn canonicalize(rule: &Rule) -> Rule {
    let mut body: Vec<&Literal> = Vec::with_capacity(rule.body.len());
    for l in &rule.body {
        if !body.contains(&l) {
            body.push(l);
        }
    }
    body.sort_by_cached_key(|l| literal_key(l));

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=body.len() {
        if i == body.len() || literal_key(body[i]) != literal_key(body[start]) {
            groups.push((start, i));
            start = i;
        }
    }
    let mut orderings: usize = 1;
    for &(s, e) in &groups {
        for k in 2..=(e - s) {
            orderings = orderings.saturating_mul(k);
        }
    }
    let distinct_vars = {
        let mut vs: Vec<&Arc<str>> = rule
            .head
            .iter()
            .flat_map(Atom::variables)
            .chain(body.iter().flat_map(|l| l.atom.variables()))
            .collect();
        vs.sort();
        vs.dedup();
        vs.len()
    };
    if orderings == 1 || distinct_vars <= 1 || orderings > MAX_ORDERINGS {
        return rename_in_order(rule.head.as_ref(), &body);
    }

    let mut best: Option<Rule> = None;
    permute_groups(&body, &groups, 0, &mut body.clone(), &mut |order| {
        let cand = rename_in_order(rule.head.as_ref(), order);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    });
    best.expect("at least one ordering")
}

fn permute_groups<'a>(
    sorted: &[&'a Literal],
    groups: &[(usize, usize)],
    g: usize,
    current: &mut Vec<&'a Literal>,
    f: &mut dyn FnMut(&[&'a Literal]),
) {
    if g == groups.len() {
        f(current);
        return;
    }
    let (s, e) = groups[g];
    if e - s == 1 {
        permute_groups(sorted, groups, g + 1, current, f);
        return;
    }
    let mut items: Vec<&'a Literal> = sorted[s..e].to_vec();
    for_each_permutation(&mut items, 0, &mut |perm| {
        current[s..e].copy_from_slice(perm);
        permute_groups(sorted, groups, g + 1, &mut current.clone(), f);
    });
}

/// A canonical non-ground kernel rule with the ground rules it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralRule {
    #[serde(serialize_with = "crate::serialize_display")]
    pub rule: Rule,
    pub support: usize,
    pub origin_ids: Vec<usize>,
}

/// Whether `lit` is the type guard `type(c)` for a `+type` head constant.
fn is_type_guard(lit: &Literal, head: &Atom, decl: &ModeDecl) -> bool {
    !lit.negated
        && lit.atom.arity() == 1
        && decl
            .placeholders
            .iter()
            .zip(&head.args)
            .any(|(ph, c)| {
                ph.marker == Marker::Input
                    && ph.type_name == lit.atom.predicate
                    && &lit.atom.args[0] == c
            })
}

/// Replaces `+`-position constants of a ground kernel rule by variables
/// (one variable per distinct constant), keeps `$` constants, and returns
/// the canonical form.
pub fn generalise(ground_rule: &Rule, bias: &ModeBias) -> Result<Rule> {
    let head = ground_rule
        .head
        .as_ref()
        .ok_or_else(|| Error::Generalise {
            literal: ground_rule.to_string(),
        })?;
    let head_decl = bias.head_for(head).ok_or_else(|| Error::Generalise {
        literal: head.to_string(),
    })?;

    let mut vars: BTreeMap<Term, Term> = BTreeMap::new();
    let var_for = |c: &Term, vars: &mut BTreeMap<Term, Term>| -> Term {
        if c.is_var() {
            return c.clone();
        }
        let n = vars.len();
        vars.entry(c.clone())
            .or_insert_with(|| Term::Var(Arc::from(format!("X{}", n + 1))))
            .clone()
    };
    let lift = |atom: &Atom, decl: &ModeDecl, vars: &mut BTreeMap<Term, Term>| -> Atom {
        Atom {
            predicate: atom.predicate.clone(),
            args: atom
                .args
                .iter()
                .zip(&decl.placeholders)
                .map(|(t, ph)| match ph.marker {
                    Marker::Input => var_for(t, vars),
                    Marker::Constant => t.clone(),
                })
                .collect(),
        }
    };

    let new_head = lift(head, head_decl, &mut vars);
    let mut body = Vec::with_capacity(ground_rule.body.len());
    for lit in &ground_rule.body {
        let candidates: Vec<&ModeDecl> = bias
            .bodies
            .iter()
            .filter(|d| d.negated == lit.negated && d.matches_shape(&lit.atom))
            .collect();
        let linked = candidates.iter().find(|d| {
            d.placeholders
                .iter()
                .zip(&lit.atom.args)
                .all(|(ph, t)| ph.marker != Marker::Input || vars.contains_key(t))
        });
        if let Some(decl) = linked.or(candidates.first()) {
            body.push(Literal {
                atom: lift(&lit.atom, decl, &mut vars),
                negated: lit.negated,
            });
        } else if is_type_guard(lit, head, head_decl) {
            let arg = var_for(&lit.atom.args[0], &mut vars);
            body.push(Literal::pos(Atom {
                predicate: lit.atom.predicate.clone(),
                args: vec![arg],
            }));
        } else {
            return Err(Error::Generalise {
                literal: lit.to_string(),
            });
        }
    }
    Ok(canonicalize(&Rule {
        head: Some(new_head),
        body,
    }))
}

/// Groups ground kernel rules by their canonical generalisation. Output is
/// in canonical rule order; `support` counts the group.
pub fn aggregate_support(ground_kernel: &[Rule], bias: &ModeBias) -> Result<Vec<GeneralRule>> {
    let mut groups: BTreeMap<Rule, Vec<usize>> = BTreeMap::new();
    for (i, r) in ground_kernel.iter().enumerate() {
        groups.entry(generalise(r, bias)?).or_default().push(i);
    }
    Ok(groups
        .into_iter()
        .map(|(rule, origin_ids)| GeneralRule {
            rule,
            support: origin_ids.len(),
            origin_ids,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_program;

    fn rule(text: &str) -> Rule {
        parse_program(text).unwrap().remove(0)
    }

    const FIG_MODES: &str = "#modeh split(+token).\n#modeb pos($postype,+token).\n#modeb nextpos($postype,+token).\n";

    #[test]
    fn parses_chunking_modes() {
        let mf = parse_mode_file(FIG_MODES).unwrap();
        assert_eq!(mf.bias.heads.len(), 1);
        assert_eq!(mf.bias.bodies.len(), 2);
        assert_eq!(mf.bias.heads[0].to_string(), "#modeh split(+token).");
        assert_eq!(mf.bias.bodies[0].to_string(), "#modeb pos($postype,+token).");
        assert_eq!(mf.bias.bodies[1].to_string(), "#modeb nextpos($postype,+token).");
    }

    #[test]
    fn parses_flies_modes_and_examples() {
        let mf = parse_mode_file(
            "#modeh flies(+bird).\n#modeb penguin(+bird).\n#modeb not penguin(+bird).\n\
             #example flies(a).\n#example not flies(d).\nbird(a).",
        )
        .unwrap();
        assert_eq!(mf.bias.heads[0].predicate.as_ref(), "flies");
        assert!(!mf.bias.bodies[0].negated);
        assert!(mf.bias.bodies[1].negated);
        assert_eq!(mf.examples.len(), 2);
        assert_eq!(mf.examples[1].weight, 1);
        assert!(mf.examples[1].literal.negated);
        assert_eq!(mf.examples[1].to_string(), "#example not flies(d).");
        assert_eq!(mf.rules.len(), 1);
    }

    #[test]
    fn example_weights() {
        let mf = parse_mode_file("#example goodchunk(1) =3.").unwrap();
        assert_eq!(mf.examples[0].weight, 3);
        assert!(parse_mode_file("#example goodchunk(1) =0.").is_err());
    }

    #[test]
    fn mode_file_errors() {
        assert!(matches!(parse_mode_file("#constraint p(a)."), Err(Error::Mode(_))));
        assert!(matches!(parse_mode_file("#modeb pos(-postype)."), Err(Error::Mode(_))));
        assert!(matches!(parse_mode_file("#modeb pos(+)."), Err(Error::Mode(_))));
        assert!(matches!(parse_mode_file("#modeh not p(+t)."), Err(Error::Mode(_))));
        assert!(parse_mode_file("#example p(X).").is_err());
    }

    #[test]
    fn kernel_variants_share_one_canonical_form() {
        let forms = [
            "flies(X) :- bird(X), not penguin(X).",
            "flies(Y) :- bird(Y), not penguin(Y).",
            "flies(Z) :- not penguin(Z), bird(Z).",
        ];
        let canon: Vec<Rule> = forms.iter().map(|t| canonicalize(&rule(t))).collect();
        assert!(canon.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(canon[0].to_string(), "flies(V1) :- bird(V1), not penguin(V1).");
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let r = rule("p(A,B) :- q(B,A), q(A,C), r(C), not s(B).");
        let c = canonicalize(&r);
        assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonical_form_of_two_literal_permutations() {
        // every renaming and body order of split(X) :- nextpos(c_IN,X), token(X)
        let mut seen = Vec::new();
        for v in ["X", "T", "V1", "Tok"] {
            for body in [
                format!("nextpos(c_IN,{v}), token({v})"),
                format!("token({v}), nextpos(c_IN,{v})"),
            ] {
                seen.push(canonicalize(&rule(&format!("split({v}) :- {body}."))));
            }
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(seen[0].to_string(), "split(V1) :- nextpos(c_IN,V1), token(V1).");
    }

    #[test]
    fn automorphic_bodies_canonicalize_exactly() {
        let a = canonicalize(&rule("p(X) :- e(X,Y), e(X,Z), f(Y), g(Z)."));
        let b = canonicalize(&rule("p(X) :- e(X,B), e(X,A), g(B), f(A)."));
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_body_literals_collapse() {
        let c = canonicalize(&rule("p(X) :- q(X), q(X)."));
        assert_eq!(c.body.len(), 1);
    }

    #[test]
    fn generalises_flies_kernel_rule() {
        let bias = parse_mode_file("#modeh flies(+bird).\n#modeb penguin(+bird).\n#modeb not penguin(+bird).")
            .unwrap()
            .bias;
        let g = generalise(&rule("flies(a) :- bird(a), not penguin(a)."), &bias).unwrap();
        assert_eq!(g.to_string(), "flies(V1) :- bird(V1), not penguin(V1).");
    }

    #[test]
    fn generalise_keeps_dollar_constants() {
        let bias = parse_mode_file(FIG_MODES).unwrap().bias;
        let g = generalise(&rule("split(6) :- token(6), nextpos(c_VBD,6)."), &bias).unwrap();
        assert_eq!(g, canonicalize(&rule("split(V1) :- token(V1), nextpos(c_VBD,V1).")));
        assert_eq!(g.body.len(), 2);
    }

    #[test]
    fn generalise_reports_unmatched_literal() {
        let bias = parse_mode_file(FIG_MODES).unwrap().bias;
        match generalise(&rule("split(6) :- form(6,\"x\")."), &bias) {
            Err(Error::Generalise { literal }) => assert_eq!(literal, "form(6,\"x\")"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generalise_bodyless_rules() {
        let bias = parse_mode_file("#modeh label($kind).").unwrap().bias;
        let g = generalise(&rule("label(noun)."), &bias).unwrap();
        assert_eq!(g, rule("label(noun)."));
        let bias = parse_mode_file(FIG_MODES).unwrap().bias;
        let g = generalise(&Rule::fact(Atom::new("split", vec![Term::Int(6)])), &bias).unwrap();
        assert!(g.body.is_empty());
        assert_eq!(g.to_string(), "split(V1).");
    }

    #[test]
    fn support_counts() {
        let bias = parse_mode_file("#modeh flies(+bird).\n#modeb not penguin(+bird).").unwrap().bias;
        let kernel: Vec<Rule> = ["a", "b", "c"]
            .iter()
            .map(|c| rule(&format!("flies({c}) :- bird({c}), not penguin({c}).")))
            .collect();
        let g = aggregate_support(&kernel, &bias).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].support, 3);
        assert_eq!(g[0].origin_ids, [0, 1, 2]);
        assert!(aggregate_support(&[], &bias).unwrap().is_empty());
    }
}
