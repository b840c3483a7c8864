//! Tokenizer and recursive-descent parser for utterances.
//!
//! The grammar is small and lexicon driven:
//!
//! ```text
//! UTT    := CLAUSE (SEP CLAUSE)*
//! CLAUSE := [CONJ] ITEM*            -- at most one verb per clause
//! ITEM   := NEG | V | ADJ | ARG | P ARG | CONJ ARG
//! ARG    := PRO | DET [NUM] ADJ* (N | ONE)
//! ```
//!
//! A preposition right after an argument attaches to it when the lexicon
//! marks it noun-relational, otherwise it introduces an oblique argument of
//! the verb. A noun-relational preposition with no preceding argument is
//! fronted and attaches to the next one. Fillers are dropped, negation may
//! appear anywhere in a clause, and a clause without a verb borrows the verb
//! of the previous clause.

use std::fmt;

use serde::Serialize;

use crate::domain::{Polarity, Properties};
use crate::error::{Error, Result};
use crate::lexicon::{
    normalize_phrase, AdjectiveEntry, Attach, DetClass, Features, Lexicon, NounEntry, Number,
    PrepEntry, Prominent,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UnknownPolicy {
    #[default]
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Det(DetClass),
    Pro(Features),
    Noun(NounEntry),
    One,
    Adj(AdjectiveEntry),
    Prep(PrepEntry),
    Verb(String),
    Neg,
    Conj,
    Sep,
    Filler,
}

impl TokenKind {
    fn tag(&self) -> &'static str {
        match self {
            TokenKind::Det(_) => "DET",
            TokenKind::Pro(_) => "PRO",
            TokenKind::Noun(_) => "N",
            TokenKind::One => "ONE",
            TokenKind::Adj(_) => "ADJ",
            TokenKind::Prep(_) => "P",
            TokenKind::Verb(_) => "V",
            TokenKind::Neg => "NEG",
            TokenKind::Conj => "CONJ",
            TokenKind::Sep => "SEP",
            TokenKind::Filler => "FILLER",
        }
    }
}

/// A word or multiword phrase with every lexicon reading it has.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub readings: Vec<TokenKind>,
}

impl Token {
    fn det(&self) -> Option<DetClass> {
        self.readings.iter().find_map(|r| match r {
            TokenKind::Det(d) => Some(*d),
            _ => None,
        })
    }

    fn pro(&self) -> Option<&Features> {
        self.readings.iter().find_map(|r| match r {
            TokenKind::Pro(f) => Some(f),
            _ => None,
        })
    }

    fn noun(&self) -> Option<&NounEntry> {
        self.readings.iter().find_map(|r| match r {
            TokenKind::Noun(n) => Some(n),
            _ => None,
        })
    }

    fn adj(&self) -> Option<&AdjectiveEntry> {
        self.readings.iter().find_map(|r| match r {
            TokenKind::Adj(a) => Some(a),
            _ => None,
        })
    }

    fn prep(&self) -> Option<&PrepEntry> {
        self.readings.iter().find_map(|r| match r {
            TokenKind::Prep(p) => Some(p),
            _ => None,
        })
    }

    fn verb(&self) -> Option<&str> {
        self.readings.iter().find_map(|r| match r {
            TokenKind::Verb(v) => Some(v.as_str()),
            _ => None,
        })
    }

    fn is(&self, kind: &TokenKind) -> bool {
        self.readings.iter().any(|r| r == kind)
    }

    fn is_one(&self) -> bool {
        self.is(&TokenKind::One)
    }

    /// Can this token continue a noun phrase after a determiner?
    fn continues_np(&self) -> bool {
        self.noun().is_some() || self.adj().is_some() || self.is_one() || self.numeral().is_some()
    }

    fn numeral(&self) -> Option<u32> {
        match self.det() {
            Some(DetClass::Numeral(n)) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.readings.first() {
            Some(TokenKind::Verb(lemma)) => write!(f, "V:{lemma}"),
            Some(r) => write!(f, "{}:{}", r.tag(), self.surface),
            None => write!(f, "?:{}", self.surface),
        }
    }
}

fn lookup(lex: &Lexicon, phrase: &str) -> Vec<TokenKind> {
    let mut out = Vec::new();
    if let Some(d) = lex.determiners.get(phrase) {
        out.push(TokenKind::Det(*d));
    } else if let Ok(n) = phrase.parse::<u32>() {
        if n > 0 {
            out.push(TokenKind::Det(DetClass::Numeral(n)));
        }
    }
    if let Some(f) = lex.pronouns.get(phrase) {
        out.push(TokenKind::Pro(f.clone()));
    }
    if let Some(n) = lex.nouns.get(phrase) {
        out.push(TokenKind::Noun(n.clone()));
    }
    if lex.anaphoric_heads.iter().any(|h| h == phrase) {
        out.push(TokenKind::One);
    }
    if let Some(a) = lex.adjectives.get(phrase) {
        out.push(TokenKind::Adj(a.clone()));
    }
    if let Some(p) = lex.prepositions.get(phrase) {
        out.push(TokenKind::Prep(p.clone()));
    }
    if let Some(v) = lex.verbs.get(phrase) {
        out.push(TokenKind::Verb(v.clone()));
    }
    let listed = |list: &[String]| list.iter().any(|w| w == phrase);
    if listed(&lex.negations) {
        out.push(TokenKind::Neg);
    }
    if listed(&lex.conjunctions) {
        out.push(TokenKind::Conj);
    }
    if listed(&lex.separators) {
        out.push(TokenKind::Sep);
    }
    if listed(&lex.fillers) {
        out.push(TokenKind::Filler);
    }
    out
}

/// Splits text into lexicon tokens, preferring the longest multiword entry.
/// Contractions are expanded first. Unknown words either fail (reporting
/// their word position) or are dropped.
pub fn tokenize(text: &str, lexicon: &Lexicon, policy: UnknownPolicy) -> Result<Vec<Token>> {
    let mut words: Vec<String> = Vec::new();
    for w in normalize_phrase(text).split_whitespace() {
        match lexicon.contractions.get(w) {
            Some(expansion) => words.extend(normalize_phrase(expansion).split_whitespace().map(String::from)),
            None => words.push(w.to_string()),
        }
    }
    let max = lexicon.max_phrase_words();
    let mut tokens = Vec::new();
    let mut i = 0;
    'outer: while i < words.len() {
        for len in (1..=max.min(words.len() - i)).rev() {
            let phrase = words[i..i + len].join(" ");
            let readings = lookup(lexicon, &phrase);
            if !readings.is_empty() {
                tokens.push(Token {
                    surface: phrase,
                    readings,
                });
                i += len;
                continue 'outer;
            }
        }
        if policy == UnknownPolicy::Fail {
            return Err(Error::UnknownToken {
                token: words[i].clone(),
                position: i,
            });
        }
        i += 1;
    }
    Ok(tokens)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    None,
    Noun(String),
    One,
}

/// A classified referring expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefExpr {
    pub det: DetClass,
    pub head: Head,
    pub modifiers: Properties,
    pub number: Number,
    /// Cardinal after a determiner, as in "the two figures".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
    pub features: Features,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complement: Option<Box<Complement>>,
    /// The expression's own words, without its complement.
    pub surface: String,
}

impl RefExpr {
    /// Noun type of the head, if it has one.
    pub fn head_type(&self) -> Option<&str> {
        match &self.head {
            Head::Noun(t) => Some(t),
            _ => None,
        }
    }

    /// Required minimum size of the referent, from a numeral determiner or
    /// a cardinal.
    pub fn quantity(&self) -> Option<u32> {
        match self.det {
            DetClass::Numeral(n) => Some(n),
            _ => self.count,
        }
    }
}

/// A relational phrase attached to a noun phrase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Complement {
    pub relation: String,
    pub prominent: Prominent,
    pub object: RefExpr,
    /// The phrase came before its host, as in "on the left of X, a Y".
    pub fronted: bool,
    pub preposition: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Oblique {
    pub relation: String,
    pub preposition: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arg {
    pub expr: RefExpr,
    /// Set when the argument is introduced by a verb-attached preposition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oblique: Option<Oblique>,
    pub preverbal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attribute {
    pub surface: String,
    pub property: String,
    pub value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Clause {
    /// Verb lemma; `None` in an elliptical clause.
    pub verb: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verb_surface: Option<String>,
    pub polarity: Polarity,
    pub args: Vec<Arg>,
    /// Groups of argument indices joined by a conjunction.
    pub coordinations: Vec<Vec<usize>>,
    /// Predicative adjectives, as in "the block is big".
    pub attributes: Vec<Attribute>,
}

impl Clause {
    fn is_empty(&self) -> bool {
        self.verb.is_none()
            && self.args.is_empty()
            && self.attributes.is_empty()
            && self.polarity == Polarity::Positive
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Utterance {
    pub clauses: Vec<Clause>,
}

/// Where a referring expression sits in an utterance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mention<'a> {
    pub clause: usize,
    pub arg: usize,
    pub expr: &'a RefExpr,
    /// Index (in the mention list) of the expression this one is a
    /// complement of.
    pub host: Option<usize>,
}

impl Utterance {
    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Every referring expression, in the order it is resolved: surface
    /// order, with complements nested after (or, when fronted, before)
    /// their host.
    pub fn mentions(&self) -> Vec<Mention<'_>> {
        let mut out = Vec::new();
        for (ci, clause) in self.clauses.iter().enumerate() {
            for (ai, arg) in clause.args.iter().enumerate() {
                push_mentions(&mut out, ci, ai, &arg.expr);
            }
        }
        out
    }

    /// The verb in force for each clause, borrowing from the previous clause
    /// when elided.
    pub fn effective_verbs(&self) -> Vec<Option<String>> {
        let mut last = None;
        self.clauses
            .iter()
            .map(|c| {
                if c.verb.is_some() {
                    last = c.verb.clone();
                }
                last.clone()
            })
            .collect()
    }
}

/// Pushes `expr` and its complements, returning the index of `expr`.
fn push_mentions<'a>(out: &mut Vec<Mention<'a>>, clause: usize, arg: usize, expr: &'a RefExpr) -> usize {
    match &expr.complement {
        Some(c) if c.fronted => {
            let object = push_mentions(out, clause, arg, &c.object);
            let me = out.len();
            out.push(Mention {
                clause,
                arg,
                expr,
                host: None,
            });
            out[object].host = Some(me);
            me
        }
        Some(c) => {
            let me = out.len();
            out.push(Mention {
                clause,
                arg,
                expr,
                host: None,
            });
            let object = push_mentions(out, clause, arg, &c.object);
            out[object].host = Some(me);
            me
        }
        None => {
            out.push(Mention {
                clause,
                arg,
                expr,
                host: None,
            });
            out.len() - 1
        }
    }
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
}

fn no_parse(position: usize, message: impl Into<String>) -> Error {
    Error::NoParse {
        position,
        message: message.into(),
    }
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + offset)
    }

    /// Does the token at the cursor start an argument?
    fn starts_arg(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        if t.det().is_some() {
            return true;
        }
        t.pro().is_some()
    }

    fn arg(&mut self) -> Result<RefExpr> {
        let start = self.pos;
        let tok = self.peek().ok_or_else(|| no_parse(start, "expected a referring expression"))?;
        let next_continues = self.peek_at(1).is_some_and(Token::continues_np);
        let det = match (tok.det(), tok.pro()) {
            (Some(d), Some(_)) if next_continues => d,
            (_, Some(features)) => {
                self.pos += 1;
                return Ok(RefExpr {
                    det: DetClass::Pronoun,
                    head: Head::None,
                    modifiers: Properties::new(),
                    number: features.number.unwrap_or_default(),
                    count: None,
                    features: features.clone(),
                    complement: None,
                    surface: tok.surface.clone(),
                });
            }
            (Some(d), None) => d,
            (None, None) => return Err(no_parse(start, format!("`{}` cannot start a noun phrase", tok.surface))),
        };
        self.pos += 1;
        let mut count = None;
        if !matches!(det, DetClass::Numeral(_)) {
            if let Some(n) = self.peek().and_then(Token::numeral) {
                count = Some(n);
                self.pos += 1;
            }
        }
        let mut modifiers = Properties::new();
        while let Some((t, adj)) = self.peek().and_then(|t| t.adj().map(|a| (t, a))) {
            let head_here = (t.noun().is_some() || t.is_one())
                && !self.peek_at(1).is_some_and(|n| n.noun().is_some() || n.adj().is_some() || n.is_one());
            if head_here {
                break;
            }
            modifiers.insert(adj.property.clone(), adj.value.clone());
            self.pos += 1;
        }
        let t = self
            .peek()
            .ok_or_else(|| no_parse(self.pos, "expected a noun after the determiner"))?;
        let (head, mut number, gender) = if let Some(n) = t.noun() {
            (Head::Noun(n.ty.clone()), n.number, n.gender.clone())
        } else if t.is_one() {
            if !det.is_definite() {
                return Err(no_parse(self.pos, "an empty head needs a definite determiner"));
            }
            (Head::One, Number::Singular, None)
        } else {
            return Err(no_parse(self.pos, format!("expected a noun, found `{}`", t.surface)));
        };
        self.pos += 1;
        let quantity = match det {
            DetClass::Numeral(n) => Some(n),
            _ => count,
        };
        if quantity.is_some_and(|n| n >= 2) {
            number = Number::Plural;
        }
        let surface = self.toks[start..self.pos]
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        Ok(RefExpr {
            det,
            head,
            modifiers,
            number,
            count,
            features: Features {
                gender,
                number: Some(number),
            },
            complement: None,
            surface,
        })
    }
}

fn attach_complement(host: &mut RefExpr, complement: Complement) {
    match &mut host.complement {
        Some(c) if !c.fronted => attach_complement(&mut c.object, complement),
        Some(_) => {}
        slot @ None => *slot = Some(Box::new(complement)),
    }
}

/// Parses a token list into clauses. Fails with the token position when the
/// input does not fit the grammar.
pub fn parse_utterance(tokens: &[Token]) -> Result<Utterance> {
    let mut p = Parser { toks: tokens, pos: 0 };
    let mut clauses = Vec::new();
    let mut cur = Clause::default();
    let mut after_arg = false;
    let mut pending_conj = false;
    let mut fronted: Option<(PrepEntry, String, RefExpr, usize)> = None;

    while let Some(tok) = p.peek() {
        let at = p.pos;
        if tok.is(&TokenKind::Sep) && !p.starts_arg() {
            if let Some((.., pos)) = fronted {
                return Err(no_parse(pos, "fronted phrase without a host"));
            }
            p.pos += 1;
            if !cur.is_empty() {
                clauses.push(std::mem::take(&mut cur));
            }
            after_arg = false;
            pending_conj = false;
            continue;
        }
        if p.starts_arg() {
            let expr = p.arg()?;
            let mut expr = expr;
            if let Some((prep, surface, object, _)) = fronted.take() {
                expr.complement = Some(Box::new(Complement {
                    relation: prep.relation,
                    prominent: prep.prominent,
                    object,
                    fronted: true,
                    preposition: surface,
                }));
            }
            let index = cur.args.len();
            cur.args.push(Arg {
                expr,
                oblique: None,
                preverbal: cur.verb.is_none(),
            });
            if pending_conj && index > 0 {
                coordinate(&mut cur, index);
            }
            pending_conj = false;
            after_arg = true;
            continue;
        }
        if let Some(prep) = tok.prep() {
            let surface = tok.surface.clone();
            p.pos += 1;
            if !p.starts_arg() {
                return Err(no_parse(p.pos, format!("`{surface}` needs an object")));
            }
            let object = p.arg()?;
            match prep.attach {
                Attach::Noun if after_arg => {
                    let host = &mut cur.args.last_mut().expect("after an argument").expr;
                    attach_complement(
                        host,
                        Complement {
                            relation: prep.relation.clone(),
                            prominent: prep.prominent,
                            object,
                            fronted: false,
                            preposition: surface,
                        },
                    );
                }
                Attach::Noun => {
                    if fronted.is_some() {
                        return Err(no_parse(at, "two fronted phrases in a row"));
                    }
                    fronted = Some((prep.clone(), surface, object, at));
                    continue;
                }
                Attach::Verb => {
                    let index = cur.args.len();
                    cur.args.push(Arg {
                        expr: object,
                        oblique: Some(Oblique {
                            relation: prep.relation.clone(),
                            preposition: surface,
                        }),
                        preverbal: cur.verb.is_none(),
                    });
                    if pending_conj && index > 0 {
                        coordinate(&mut cur, index);
                    }
                    pending_conj = false;
                }
            }
            after_arg = true;
            continue;
        }
        if let Some(lemma) = tok.verb() {
            if cur.verb.is_some() {
                return Err(no_parse(at, format!("second verb `{}` in one clause", tok.surface)));
            }
            cur.verb = Some(lemma.to_string());
            cur.verb_surface = Some(tok.surface.clone());
            p.pos += 1;
            after_arg = false;
            pending_conj = false;
            continue;
        }
        if tok.is(&TokenKind::Neg) {
            cur.polarity = Polarity::Negative;
            p.pos += 1;
            continue;
        }
        if tok.is(&TokenKind::Conj) {
            // A leading conjunction links to the previous utterance.
            pending_conj = !cur.args.is_empty();
            after_arg = false;
            p.pos += 1;
            continue;
        }
        if let Some(adj) = tok.adj() {
            cur.attributes.push(Attribute {
                surface: tok.surface.clone(),
                property: adj.property.clone(),
                value: adj.value.clone(),
            });
            p.pos += 1;
            continue;
        }
        if tok.is(&TokenKind::Filler) {
            p.pos += 1;
            continue;
        }
        return Err(no_parse(at, format!("unexpected `{}`", tok.surface)));
    }
    if let Some((.., pos)) = fronted {
        return Err(no_parse(pos, "fronted phrase without a host"));
    }
    if !cur.is_empty() {
        clauses.push(cur);
    }
    Ok(Utterance { clauses })
}

fn coordinate(clause: &mut Clause, index: usize) {
    let prev = index - 1;
    match clause.coordinations.iter_mut().find(|g| g.contains(&prev)) {
        Some(group) => group.push(index),
        None => clause.coordinations.push(vec![prev, index]),
    }
}

pub fn parse_text(text: &str, lexicon: &Lexicon, policy: UnknownPolicy) -> Result<Utterance> {
    parse_utterance(&tokenize(text, lexicon, policy)?)
}

/// Canonical surface form: re-parsing it yields the same tree.
pub fn render_utterance(utt: &Utterance, lexicon: &Lexicon) -> String {
    let word = |list: &[String], fallback: &str| list.first().cloned().unwrap_or_else(|| fallback.to_string());
    let conj = word(&lexicon.conjunctions, "and");
    let neg = word(&lexicon.negations, "not");
    let sep = word(&lexicon.separators, "but");
    let mut parts: Vec<String> = Vec::new();
    for (ci, clause) in utt.clauses.iter().enumerate() {
        if ci > 0 {
            parts.push(sep.clone());
        }
        let coordinated = |i: usize| i > 0 && clause.coordinations.iter().any(|g| g.contains(&i) && g.contains(&(i - 1)));
        let render_arg = |parts: &mut Vec<String>, i: usize, arg: &Arg| {
            if coordinated(i) {
                parts.push(conj.clone());
            }
            if let Some(o) = &arg.oblique {
                parts.push(o.preposition.clone());
            }
            render_expr(parts, &arg.expr);
        };
        for (i, arg) in clause.args.iter().enumerate().filter(|(_, a)| a.preverbal) {
            render_arg(&mut parts, i, arg);
        }
        if clause.polarity == Polarity::Negative {
            parts.push(neg.clone());
        }
        if let Some(v) = &clause.verb_surface {
            parts.push(v.clone());
        }
        for a in &clause.attributes {
            parts.push(a.surface.clone());
        }
        for (i, arg) in clause.args.iter().enumerate().filter(|(_, a)| !a.preverbal) {
            render_arg(&mut parts, i, arg);
        }
    }
    parts.join(" ")
}

fn render_expr(parts: &mut Vec<String>, expr: &RefExpr) {
    match &expr.complement {
        Some(c) if c.fronted => {
            parts.push(c.preposition.clone());
            render_expr(parts, &c.object);
            parts.push(expr.surface.clone());
        }
        Some(c) => {
            parts.push(expr.surface.clone());
            parts.push(c.preposition.clone());
            render_expr(parts, &c.object);
        }
        None => parts.push(expr.surface.clone()),
    }
}
