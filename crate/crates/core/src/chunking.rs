//! Shallow chunking as a learning task: corpus formats, background facts,
//! example programs, and prediction from learned split rules.
//!
//! Token file: tab-separated `sentence_id token_index surface pos_tag
//! head:rel`, where `head:rel` is `_` when absent and head `0` is the root.
//! Sentences are separated by blank lines; lines starting with `#` are
//! comments. Gold file: one line per sentence, chunks as `[ tok tok ]`.

use std::fmt::Write as _;
use std::path::Path;

use crate::bias::{parse_mode_file, ExampleSpec, ModeBias};
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::logic::{parse_program, Atom, FactBase, Literal, Rule, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub pos: String,
    /// `Some(0)` is the root.
    pub head: Option<usize>,
    pub rel: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chunking {
    pub sentence_id: String,
    /// Inclusive, 1-based token intervals.
    pub chunks: Vec<(usize, usize)>,
}

impl Chunking {
    /// Chunks ending at each split point; splits at or beyond `n` are
    /// ignored.
    pub fn from_splits(sentence_id: &str, n: usize, splits: &[usize]) -> Self {
        let mut chunks = Vec::new();
        let mut lo = 1;
        let mut ends: Vec<usize> = splits.iter().copied().filter(|&s| s >= 1 && s < n).collect();
        ends.sort_unstable();
        ends.dedup();
        for s in ends {
            chunks.push((lo, s));
            lo = s + 1;
        }
        if n > 0 {
            chunks.push((lo, n));
        }
        Chunking {
            sentence_id: sentence_id.to_string(),
            chunks,
        }
    }

    /// Each chunk's surface tokens joined by single spaces.
    pub fn chunk_strings(&self, s: &Sentence) -> Vec<String> {
        self.chunks
            .iter()
            .map(|&(lo, hi)| {
                s.tokens[lo - 1..hi]
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    /// Gold-file line: `[ a b ] [ c ]`.
    pub fn format(&self, s: &Sentence) -> String {
        self.chunk_strings(s)
            .iter()
            .map(|c| format!("[ {c} ]"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn corpus_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Corpus(format!("line {line}: {msg}"))
}

pub fn parse_tokens(text: &str) -> Result<Vec<Sentence>> {
    let mut out: Vec<Sentence> = Vec::new();
    let mut current: Option<Sentence> = None;
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            out.extend(current.take());
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').collect();
        if cols.len() != 5 {
            return Err(corpus_err(ln, format!("expected 5 tab-separated columns, found {}", cols.len())));
        }
        let index: usize = cols[1]
            .parse()
            .map_err(|_| corpus_err(ln, format!("bad token index `{}`", cols[1])))?;
        if cols[2].is_empty() {
            return Err(corpus_err(ln, "empty surface form"));
        }
        if cols[3].is_empty() {
            return Err(corpus_err(ln, "empty POS tag"));
        }
        let (head, rel) = if cols[4] == "_" {
            (None, None)
        } else {
            let (h, r) = cols[4]
                .split_once(':')
                .ok_or_else(|| corpus_err(ln, format!("bad head:rel `{}`", cols[4])))?;
            let h: usize = h
                .parse()
                .map_err(|_| corpus_err(ln, format!("bad head `{h}`")))?;
            (Some(h), (!r.is_empty()).then(|| r.to_string()))
        };
        let token = Token {
            index,
            surface: cols[2].to_string(),
            pos: cols[3].to_string(),
            head,
            rel,
        };
        match &mut current {
            Some(s) if s.id == cols[0] => s.tokens.push(token),
            _ => {
                out.extend(current.take());
                current = Some(Sentence {
                    id: cols[0].to_string(),
                    tokens: vec![token],
                });
            }
        }
    }
    out.extend(current);
    for s in &out {
        for (i, t) in s.tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(Error::Corpus(format!(
                    "sentence {}: token indices must run 1..n, found {} at position {}",
                    s.id,
                    t.index,
                    i + 1
                )));
            }
        }
    }
    Ok(out)
}

/// Parses one gold line against its sentence.
pub fn parse_gold_line(line: &str, s: &Sentence) -> Result<Chunking> {
    let err = |msg: String| Error::Corpus(format!("sentence {}: {msg}", s.id));
    let mut chunks = Vec::new();
    let mut open: Option<usize> = None;
    let mut next = 1;
    for word in line.split_whitespace() {
        match word {
            "[" => {
                if open.is_some() {
                    return Err(err("nested `[`".into()));
                }
                open = Some(next);
            }
            "]" => {
                let lo = open.take().ok_or_else(|| err("`]` without `[`".into()))?;
                if lo == next {
                    return Err(err(format!("empty chunk before token {next}")));
                }
                chunks.push((lo, next - 1));
            }
            w => {
                if open.is_none() {
                    return Err(err(format!("token {next} outside brackets")));
                }
                let t = s
                    .tokens
                    .get(next - 1)
                    .ok_or_else(|| err(format!("extra token `{w}` after token {}", s.len())))?;
                if t.surface != w {
                    return Err(err(format!(
                        "token {next} is `{}` in the token file but `{w}` in the gold file",
                        t.surface
                    )));
                }
                next += 1;
            }
        }
    }
    if open.is_some() {
        return Err(err("unclosed `[`".into()));
    }
    if next <= s.len() {
        return Err(err(format!("coverage gap at token {next}")));
    }
    Ok(Chunking {
        sentence_id: s.id.clone(),
        chunks,
    })
}

pub fn parse_gold(text: &str, sentences: &[Sentence]) -> Result<Vec<Chunking>> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != sentences.len() {
        return Err(Error::Corpus(format!(
            "{} sentences in the token file but {} gold lines",
            sentences.len(),
            lines.len()
        )));
    }
    lines
        .iter()
        .zip(sentences)
        .map(|(l, s)| parse_gold_line(l, s))
        .collect()
}

pub fn load_sentences(path: &Path) -> Result<Vec<Sentence>> {
    parse_tokens(&std::fs::read_to_string(path)?)
}

pub fn load_corpus(token_file: &Path, gold_file: &Path) -> Result<Vec<(Sentence, Chunking)>> {
    let sentences = load_sentences(token_file)?;
    let gold = parse_gold(&std::fs::read_to_string(gold_file)?, &sentences)?;
    Ok(sentences.into_iter().zip(gold).collect())
}

/// `c_` plus the tag with special characters replaced by fixed letters.
pub fn mangle_tag(tag: &str) -> String {
    let mut out = String::from("c_");
    for ch in tag.chars() {
        out.push(match ch {
            c if c.is_ascii_alphanumeric() || c == '_' => c,
            '$' => 'd',
            '.' | '?' | '!' => 'p',
            ',' | ';' | ':' => 'c',
            '-' => 'h',
            '\'' | '"' => 'q',
            '`' => 'b',
            '#' => 's',
            '(' | '[' | '{' => 'l',
            ')' | ']' | '}' => 'r',
            _ => 'x',
        });
    }
    out
}

fn int(i: usize) -> Term {
    Term::Int(i as i64)
}

fn atom(p: &str, args: Vec<Term>) -> Atom {
    Atom::new(p, args)
}

/// Background facts for a sentence, with token `i` numbered `offset + i`.
pub fn sentence_facts_at(s: &Sentence, offset: usize) -> FactBase {
    let mut fb = FactBase::new();
    let n = s.len();
    for (i, t) in s.tokens.iter().enumerate() {
        let id = int(offset + t.index);
        let tag = Term::constant(&mangle_tag(&t.pos));
        fb.insert_ground(atom("pos", vec![tag.clone(), id.clone()]));
        fb.insert_ground(atom("form", vec![id.clone(), Term::string(&t.surface)]));
        fb.insert_ground(atom("token", vec![id.clone()]));
        fb.insert_ground(atom("postype", vec![tag]));
        if let Some(h) = t.head {
            let h = if h == 0 { Term::constant("root") } else { int(offset + h) };
            fb.insert_ground(atom("head", vec![h, id.clone()]));
        }
        if let Some(r) = &t.rel {
            fb.insert_ground(atom("rel", vec![Term::constant(&mangle_tag(r)), id.clone()]));
        }
        if i + 1 < n {
            let next = Term::constant(&mangle_tag(&s.tokens[i + 1].pos));
            fb.insert_ground(atom("nextpos", vec![next, id]));
        }
    }
    fb
}

pub fn sentence_facts(s: &Sentence) -> FactBase {
    sentence_facts_at(s, 0)
}

/// Per-token `.lp` text in the layout `pos(..). head(..). form(..). rel(..).`
pub fn sentence_lp(s: &Sentence) -> String {
    let mut out = String::new();
    for t in &s.tokens {
        let i = t.index;
        let _ = write!(out, "pos({},{i}).", mangle_tag(&t.pos));
        if let Some(h) = t.head {
            if h == 0 {
                let _ = write!(out, " head(root,{i}).");
            } else {
                let _ = write!(out, " head({h},{i}).");
            }
        }
        let _ = write!(out, " form({i},{}).", Term::string(&t.surface));
        if let Some(r) = &t.rel {
            let _ = write!(out, " rel({},{i}).", mangle_tag(r));
        }
        out.push('\n');
    }
    for (i, pair) in s.tokens.windows(2).enumerate() {
        let _ = writeln!(out, "nextpos({},{}).", mangle_tag(&pair[1].pos), i + 1);
    }
    out
}

/// One `goodchunk` rule and example per chunk, with token ids shifted by
/// `offset`.
pub fn make_examples_at(c: &Chunking, n: usize, offset: usize) -> (Vec<Rule>, Vec<ExampleSpec>) {
    let split = |i: usize| atom("split", vec![int(offset + i)]);
    let mut rules = Vec::new();
    let mut examples = Vec::new();
    for &(lo, hi) in &c.chunks {
        let mut body = Vec::new();
        if lo > 1 {
            body.push(Literal::pos(split(lo - 1)));
        }
        for i in lo..hi {
            body.push(Literal::neg(split(i)));
        }
        if hi < n {
            body.push(Literal::pos(split(hi)));
        }
        let head = atom("goodchunk", vec![int(offset + lo)]);
        rules.push(Rule {
            head: Some(head.clone()),
            body,
        });
        examples.push(ExampleSpec::new(Literal::pos(head)));
    }
    (rules, examples)
}

pub fn make_examples(c: &Chunking, n: usize) -> (Vec<Rule>, Vec<ExampleSpec>) {
    make_examples_at(c, n, 0)
}

pub const BACKGROUND: &str = "postype(X) :- pos(X,_).\ntoken(X) :- pos(_,X).\n";
pub const MODES: &str = "#modeh split(+token).\n#modeb pos($postype,+token).\n#modeb nextpos($postype,+token).\n";

pub fn background_rules() -> Vec<Rule> {
    parse_program(BACKGROUND).expect("built-in background parses")
}

pub fn default_bias() -> ModeBias {
    parse_mode_file(MODES).expect("built-in modes parse").bias
}

/// Predicted chunking: chunks end at every derived `split(i)` with
/// `i < n`.
pub fn predict(hypothesis: &[Rule], s: &Sentence) -> Result<Chunking> {
    let mut program = background_rules();
    program.extend_from_slice(hypothesis);
    let model = evaluate(&program, &sentence_facts(s))?;
    let splits: Vec<usize> = model
        .tuples("split", 1)
        .filter_map(|t| match t[0] {
            Term::Int(i) if i > 0 => Some(i as usize),
            _ => None,
        })
        .collect();
    Ok(Chunking::from_splits(&s.id, s.len(), &splits))
}
