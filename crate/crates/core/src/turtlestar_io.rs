//! A Turtle-star subset: parser, deterministic serializer, and unfolding of
//! embedded triples into plain RDF via reification.
//!
//! Supported: `@prefix`/`PREFIX`, `<absolute IRIs>`, prefixed names, `_:labels`,
//! `a`, short quoted strings with escapes, `@lang`, `^^datatype`, bare
//! numbers and booleans, `;` and `,` lists, `<< s p o >>` at any depth and
//! `#` comments. Anonymous nodes, collections, long strings and base IRIs
//! are rejected with a diagnostic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::rdf_model::{
    canonicalize, escape_string, is_language_tag, BlankNode, Iri, Literal, Object, RdfStarGraph, Subject, TermError,
    Triple,
};
use crate::vocab;

/// Prefix label → namespace IRI text. Later declarations replace earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixTable {
    map: BTreeMap<String, String>,
}

impl PrefixTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(label.into(), namespace.into());
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.map.get(label).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Sorted by label.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Shortest form `label:local` for `iri`, using the longest namespace
    /// whose remainder is a plain local name.
    fn shorten(&self, iri: &str) -> Option<String> {
        self.map
            .iter()
            .filter_map(|(label, ns)| {
                let local = iri.strip_prefix(ns.as_str())?;
                is_plain_local(local).then(|| (ns.len(), format!("{label}:{local}")))
            })
            .max_by_key(|(len, _)| *len)
            .map(|(_, s)| s)
    }
}

/// Error position is 1-based; the column counts characters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not plain RDF: {triple} contains an embedded triple")]
pub struct NotPlainRdf {
    pub triple: Box<Triple>,
}

pub fn parse_turtle_star(text: &str) -> Result<(RdfStarGraph, PrefixTable), ParseDiagnostic> {
    let mut p = Parser {
        src: text,
        pos: 0,
        prefixes: PrefixTable::new(),
        graph: RdfStarGraph::new(),
    };
    p.document()?;
    Ok((p.graph, p.prefixes))
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

fn is_prefix_label(s: &str) -> bool {
    s.is_empty() || (s.starts_with(|c: char| c.is_alphabetic()) && s.chars().all(is_name_char) && !s.ends_with('.'))
}

/// Local names the serializer writes without escapes.
fn is_plain_local(s: &str) -> bool {
    s.is_empty()
        || (s.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_')
            && s.chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
            && !s.ends_with('.'))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    prefixes: PrefixTable,
    graph: RdfStarGraph,
}

type PResult<T> = Result<T, ParseDiagnostic>;

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn error_at<T>(&self, pos: usize, message: impl Into<String>) -> PResult<T> {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        Err(ParseDiagnostic {
            line,
            column: before[line_start..].chars().count() + 1,
            message: message.into(),
        })
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        self.error_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    /// True when the keyword `kw` starts here and is not part of a longer name.
    fn at_keyword(&self, kw: &str, case_insensitive: bool) -> bool {
        let rest = self.rest();
        let Some(head) = rest.get(..kw.len()) else {
            return false;
        };
        let matches = if case_insensitive {
            head.eq_ignore_ascii_case(kw)
        } else {
            head == kw
        };
        matches && !rest[kw.len()..].starts_with(|c: char| is_name_char(c) || c == ':')
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            if self.rest().starts_with("@prefix") {
                self.pos += "@prefix".len();
                self.prefix_declaration()?;
                self.expect_dot("expected '.' after @prefix declaration")?;
            } else if self.rest().starts_with("@base") || self.at_keyword("BASE", true) {
                return self.error("base IRIs are not supported");
            } else if self.at_keyword("PREFIX", true) {
                self.pos += "PREFIX".len();
                self.prefix_declaration()?;
            } else if self.peek() == Some('@') {
                return self.error("unknown directive");
            } else {
                self.statement()?;
            }
        }
    }

    fn expect_dot(&mut self, message: &str) -> PResult<()> {
        self.skip_ws();
        if self.eat(".") {
            Ok(())
        } else if self.rest().starts_with(">>") {
            self.error("unbalanced '>>'")
        } else {
            self.error(message)
        }
    }

    fn prefix_declaration(&mut self) -> PResult<()> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(is_name_char) {
            self.bump();
        }
        let label = self.src[start..self.pos].to_owned();
        if !self.eat(":") || !is_prefix_label(&label) {
            return self.error_at(start, "expected a prefix label followed by ':'");
        }
        self.skip_ws();
        if self.peek() != Some('<') {
            return self.error("expected '<' to start the namespace IRI");
        }
        let ns = self.iri_ref()?;
        self.prefixes.insert(label, ns.into_string());
        Ok(())
    }

    fn statement(&mut self) -> PResult<()> {
        let start = self.pos;
        let subject = match self.term()? {
            Object::Literal(_) => return self.error_at(start, "a literal cannot be a subject"),
            other => object_to_subject(other),
        };
        loop {
            self.skip_ws();
            let predicate = self.verb()?;
            loop {
                self.skip_ws();
                let object = self.term()?;
                self.graph
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.skip_ws();
                if !self.eat(",") {
                    break;
                }
            }
            self.skip_ws();
            if !self.eat(";") {
                break;
            }
            loop {
                self.skip_ws();
                if !self.eat(";") {
                    break;
                }
            }
            if matches!(self.peek(), Some('.') | None) {
                break;
            }
        }
        self.expect_dot("expected '.' at end of statement")
    }

    fn verb(&mut self) -> PResult<Iri> {
        if self.at_keyword("a", false) {
            self.bump();
            return Ok(Iri::from_static(vocab::RDF_TYPE));
        }
        match self.peek() {
            Some('<') if self.rest().starts_with("<<") => self.error("an embedded triple cannot be a predicate"),
            Some('<') => self.iri_ref(),
            Some('_') if self.rest().starts_with("_:") => self.error("a blank node cannot be a predicate"),
            Some('"' | '\'') => self.error("a literal cannot be a predicate"),
            Some('.' | ';' | ',') | None => self.error("expected a predicate"),
            _ => self.prefixed_name(),
        }
    }

    fn term(&mut self) -> PResult<Object> {
        let rest = self.rest();
        if rest.starts_with("<<") {
            return self.embedded().map(Object::from);
        }
        if rest.starts_with(">>") {
            return self.error("unbalanced '>>'");
        }
        if rest.starts_with("_:") {
            return self.blank_node().map(Object::BlankNode);
        }
        match self.peek() {
            None => self.error("unexpected end of input, expected a term"),
            Some('<') => self.iri_ref().map(Object::Iri),
            Some('"' | '\'') => self.string_literal().map(Object::Literal),
            Some('[') => self.error("anonymous blank nodes '[ ]' are not supported"),
            Some('(') => self.error("collections '( )' are not supported"),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-') => self.number().map(Object::Literal),
            Some('.') if self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) => self.number().map(Object::Literal),
            Some('.' | ';' | ',') => self.error("expected a term"),
            _ if self.at_keyword("true", false) || self.at_keyword("false", false) => {
                let value = if self.eat("true") {
                    "true"
                } else {
                    self.eat("false");
                    "false"
                };
                Ok(Object::Literal(Literal::with_static_type(value, vocab::XSD_BOOLEAN)))
            }
            _ => self.prefixed_name().map(Object::Iri),
        }
    }

    fn embedded(&mut self) -> PResult<Triple> {
        self.pos += 2;
        self.skip_ws();
        let start = self.pos;
        let subject = match self.term()? {
            Object::Literal(_) => return self.error_at(start, "embedded triple with a literal subject"),
            other => object_to_subject(other),
        };
        self.skip_ws();
        let predicate = self.verb()?;
        self.skip_ws();
        let object = self.term()?;
        self.skip_ws();
        if !self.eat(">>") {
            return self.error("expected '>>' to close the embedded triple");
        }
        Ok(Triple::new(subject, predicate, object))
    }

    fn iri_ref(&mut self) -> PResult<Iri> {
        let start = self.pos;
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return self.error_at(start, "unterminated IRI"),
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape(start)?),
                Some(c) => value.push(c),
            }
        }
        match Iri::new(value) {
            Ok(iri) => Ok(iri),
            Err(TermError::InvalidIri(v, _)) if !v.contains(':') => {
                self.error_at(start, format!("relative IRI <{v}> is not supported"))
            }
            Err(e) => self.error_at(start, e.to_string()),
        }
    }

    /// After a backslash: `uXXXX` or `UXXXXXXXX`.
    fn unicode_escape(&mut self, start: usize) -> PResult<char> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return self.error_at(start, "invalid escape sequence"),
        };
        let digits = self.rest().get(..len).unwrap_or("");
        let code = (digits.len() == len && digits.chars().all(|c| c.is_ascii_hexdigit()))
            .then(|| u32::from_str_radix(digits, 16).ok())
            .flatten()
            .and_then(char::from_u32);
        match code {
            Some(c) => {
                self.pos += len;
                Ok(c)
            }
            None => self.error("invalid unicode escape"),
        }
    }

    fn prefixed_name(&mut self) -> PResult<Iri> {
        let start = self.pos;
        while self.peek().is_some_and(is_name_char) {
            self.bump();
        }
        let label = &self.src[start..self.pos];
        if self.peek() != Some(':') || !is_prefix_label(label) {
            return self.error_at(start, "expected a term");
        }
        self.bump();
        let label = label.to_owned();
        let mut local = String::new();
        loop {
            match self.peek() {
                Some(c) if is_name_char(c) || c == ':' => {
                    local.push(c);
                    self.bump();
                }
                Some('%') => {
                    let hex = self.rest().get(1..3).unwrap_or("");
                    if hex.len() != 2 || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
                        return self.error("invalid percent escape in local name");
                    }
                    local.push('%');
                    local.push_str(hex);
                    self.pos += 3;
                }
                Some('\\') => match self.peek_nth(1) {
                    Some(c) if "_~.-!$&'()*+,;=/?#@%".contains(c) => {
                        local.push(c);
                        self.pos += 1 + c.len_utf8();
                    }
                    _ => return self.error("invalid escape in local name"),
                },
                _ => break,
            }
        }
        // a trailing '.' ends the statement
        while local.ends_with('.') && self.src[..self.pos].ends_with('.') {
            local.pop();
            self.pos -= 1;
        }
        let Some(ns) = self.prefixes.get(&label) else {
            return self.error_at(start, format!("unknown prefix '{label}:'"));
        };
        match Iri::new(format!("{ns}{local}")) {
            Ok(iri) => Ok(iri),
            Err(e) => self.error_at(start, e.to_string()),
        }
    }

    fn blank_node(&mut self) -> PResult<BlankNode> {
        let start = self.pos;
        self.pos += 2;
        let label_start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            self.bump();
        }
        while self.src[label_start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        match BlankNode::new(&self.src[label_start..self.pos]) {
            Ok(b) => Ok(b),
            Err(_) => self.error_at(start, "invalid blank node label"),
        }
    }

    fn string_literal(&mut self) -> PResult<Literal> {
        let start = self.pos;
        let quote = self.bump().expect("quote");
        let triple: String = std::iter::repeat_n(quote, 3).collect();
        if self.src[start..].starts_with(&triple) {
            return self.error_at(start, "long (triple-quoted) strings are not supported");
        }
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => return self.error_at(start, "unterminated string literal"),
                Some(c) if c == quote => break,
                Some('\\') => {
                    let c = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u' | 'U') => {
                            lexical.push(self.unicode_escape(start)?);
                            continue;
                        }
                        _ => return self.error("invalid escape sequence in string"),
                    };
                    self.bump();
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        if self.eat("@") {
            let tag_start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '-') {
                self.bump();
            }
            let tag = &self.src[tag_start..self.pos];
            if !is_language_tag(tag) {
                return self.error_at(tag_start, "invalid language tag");
            }
            return Literal::lang_string(lexical, tag).or_else(|e| self.error_at(start, e.to_string()));
        }
        if self.eat("^^") {
            let datatype = match self.peek() {
                Some('<') if !self.rest().starts_with("<<") => self.iri_ref()?,
                _ => self.prefixed_name()?,
            };
            return Literal::typed(lexical, datatype).or_else(|e| self.error_at(start, e.to_string()));
        }
        Ok(Literal::string(lexical))
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.pos - start
    }

    fn number(&mut self) -> PResult<Literal> {
        let start = self.pos;
        if matches!(self.peek(), Some('+' | '-')) {
            self.bump();
        }
        let int_digits = self.digits();
        let mut datatype = vocab::XSD_INTEGER;
        let mut frac_digits = 0;
        let exponent_follows = |p: &Self, at: usize| matches!(p.peek_nth(at), Some('e' | 'E'));
        if self.peek() == Some('.')
            && (self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) || (int_digits > 0 && exponent_follows(self, 1)))
        {
            self.bump();
            frac_digits = self.digits();
            datatype = vocab::XSD_DECIMAL;
        }
        if int_digits + frac_digits == 0 {
            return self.error_at(start, "expected a number");
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if self.digits() == 0 {
                return self.error("expected exponent digits");
            }
            datatype = vocab::XSD_DOUBLE;
        }
        Ok(Literal::with_static_type(&self.src[start..self.pos], datatype))
    }
}

fn object_to_subject(o: Object) -> Subject {
    match o {
        Object::Iri(i) => Subject::Iri(i),
        Object::BlankNode(b) => Subject::BlankNode(b),
        Object::Triple(t) => Subject::Triple(t),
        Object::Literal(_) => unreachable!("literal subjects are rejected before conversion"),
    }
}

/// Writes one statement per line, prefixes first (sorted by label). Blank
/// nodes are relabelled canonically, so isomorphic graphs serialize
/// identically.
pub fn serialize_turtle_star(g: &RdfStarGraph, prefixes: &PrefixTable) -> String {
    let mut out = String::new();
    for (label, ns) in prefixes.iter() {
        out.push_str(&format!("@prefix {label}: <{ns}> .\n"));
    }
    if !prefixes.is_empty() && !g.is_empty() {
        out.push('\n');
    }
    let w = Writer { prefixes };
    for t in &canonicalize(g) {
        w.subject(&t.subject, &mut out);
        out.push(' ');
        w.predicate(&t.predicate, &mut out);
        out.push(' ');
        w.object(&t.object, &mut out);
        out.push_str(" .\n");
    }
    out
}

struct Writer<'a> {
    prefixes: &'a PrefixTable,
}

impl Writer<'_> {
    fn iri(&self, iri: &Iri, out: &mut String) {
        match self.prefixes.shorten(iri.as_str()) {
            Some(short) => out.push_str(&short),
            None => out.push_str(&iri.to_string()),
        }
    }

    fn predicate(&self, iri: &Iri, out: &mut String) {
        if iri.as_str() == vocab::RDF_TYPE {
            out.push('a');
        } else {
            self.iri(iri, out);
        }
    }

    fn triple(&self, t: &Triple, out: &mut String) {
        out.push_str("<<");
        self.subject(&t.subject, out);
        out.push(' ');
        self.predicate(&t.predicate, out);
        out.push(' ');
        self.object(&t.object, out);
        out.push_str(">>");
    }

    fn subject(&self, s: &Subject, out: &mut String) {
        match s {
            Subject::Iri(i) => self.iri(i, out),
            Subject::BlankNode(b) => out.push_str(&b.to_string()),
            Subject::Triple(t) => self.triple(t, out),
        }
    }

    fn object(&self, o: &Object, out: &mut String) {
        match o {
            Object::Iri(i) => self.iri(i, out),
            Object::BlankNode(b) => out.push_str(&b.to_string()),
            Object::Literal(l) => self.literal(l, out),
            Object::Triple(t) => self.triple(t, out),
        }
    }

    fn literal(&self, l: &Literal, out: &mut String) {
        let lex = l.lexical_form();
        if has_bare_form(l) {
            out.push_str(lex);
            return;
        }
        out.push('"');
        out.push_str(&escape_string(lex));
        out.push('"');
        if let Some(tag) = l.language() {
            out.push('@');
            out.push_str(tag);
        } else if l.datatype().as_str() != vocab::XSD_STRING {
            out.push_str("^^");
            self.iri(l.datatype(), out);
        }
    }
}

fn unsigned_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

/// Whether the literal reparses identically from its unquoted lexical form.
fn has_bare_form(l: &Literal) -> bool {
    let lex = l.lexical_form();
    match l.datatype().as_str() {
        vocab::XSD_BOOLEAN => lex == "true" || lex == "false",
        vocab::XSD_INTEGER => unsigned_digits(strip_sign(lex)),
        vocab::XSD_DECIMAL => match strip_sign(lex).split_once('.') {
            Some((int, frac)) => (int.is_empty() || unsigned_digits(int)) && unsigned_digits(frac),
            None => false,
        },
        vocab::XSD_DOUBLE => {
            let Some((mantissa, exp)) = strip_sign(lex).split_once(['e', 'E']) else {
                return false;
            };
            let mantissa_ok = match mantissa.split_once('.') {
                None => unsigned_digits(mantissa),
                Some((int, frac)) => {
                    (unsigned_digits(int) && (frac.is_empty() || unsigned_digits(frac)))
                        || (int.is_empty() && unsigned_digits(frac))
                }
            };
            mantissa_ok && unsigned_digits(strip_sign(exp))
        }
        _ => false,
    }
}

/// Replaces every embedded triple by a fresh blank node described with
/// `rdf:Statement`/`rdf:subject`/`rdf:predicate`/`rdf:object`. Each distinct
/// embedded triple gets one node, labelled `r1, r2, ...` (skipping labels
/// already used in the graph) in triple order.
pub fn unfold_to_rdf(g: &RdfStarGraph) -> RdfStarGraph {
    let trefs = g.trefs();
    if trefs.is_empty() {
        return g.clone();
    }
    let mut used = BTreeSet::new();
    for t in g {
        t.for_each_blank_node(&mut |b| {
            used.insert(b.label().to_owned());
        });
    }
    let mut counter = 0;
    let mut nodes: BTreeMap<&Triple, BlankNode> = BTreeMap::new();
    for t in &trefs {
        let node = loop {
            counter += 1;
            let candidate = BlankNode::numbered("r", counter);
            if !used.contains(candidate.label()) {
                break candidate;
            }
        };
        nodes.insert(t, node);
    }
    let flat_subject = |s: &Subject| match s {
        Subject::Triple(t) => Subject::BlankNode(nodes[t.as_ref()].clone()),
        other => other.clone(),
    };
    let flat_object = |o: &Object| match o {
        Object::Triple(t) => Object::BlankNode(nodes[t.as_ref()].clone()),
        other => other.clone(),
    };
    let rdf = Iri::from_static;
    let mut out = RdfStarGraph::new();
    for (t, node) in &nodes {
        let r = Subject::BlankNode(node.clone());
        out.insert(Triple::new(r.clone(), rdf(vocab::RDF_TYPE), rdf(vocab::RDF_STATEMENT)));
        out.insert(Triple::new(
            r.clone(),
            rdf(vocab::RDF_SUBJECT),
            Object::from(flat_subject(&t.subject)),
        ));
        out.insert(Triple::new(r.clone(), rdf(vocab::RDF_PREDICATE), t.predicate.clone()));
        out.insert(Triple::new(r, rdf(vocab::RDF_OBJECT), flat_object(&t.object)));
    }
    for t in g {
        out.insert(Triple::new(
            flat_subject(&t.subject),
            t.predicate.clone(),
            flat_object(&t.object),
        ));
    }
    out
}

/// Plain RDF read as RDF-star: the identity, defined only without nesting.
pub fn embed_plain_rdf(g: &RdfStarGraph) -> Result<RdfStarGraph, NotPlainRdf> {
    match g.iter().find(|t| t.is_metadata()) {
        Some(t) => Err(NotPlainRdf {
            triple: Box::new(t.clone()),
        }),
        None => Ok(g.clone()),
    }
}

impl fmt::Display for PrefixTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, ns) in self.iter() {
            writeln!(f, "@prefix {label}: <{ns}> .")?;
        }
        Ok(())
    }
}
