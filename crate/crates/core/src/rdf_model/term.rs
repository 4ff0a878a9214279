use std::fmt;

use thiserror::Error;

use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid IRI {0:?}: {1}")]
    InvalidIri(String, &'static str),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("datatype rdf:langString requires a language tag")]
    LangStringWithoutTag,
}

/// An absolute IRI.
///
/// Validation is shallow: a scheme followed by `:`, and no whitespace or
/// characters that cannot appear inside `<...>` in Turtle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        validate_iri(&value).map_err(|why| TermError::InvalidIri(value.clone(), why))?;
        Ok(Iri(value))
    }

    /// For compile-time vocabulary constants that are known to be valid.
    pub(crate) fn from_static(value: &'static str) -> Self {
        debug_assert!(validate_iri(value).is_ok(), "{value}");
        Iri(value.to_owned())
    }

    /// Caller guarantees validity (e.g. a valid prefix plus percent-encoded text).
    pub(crate) fn new_unchecked(value: String) -> Self {
        debug_assert!(validate_iri(&value).is_ok(), "{value}");
        Iri(value)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

fn validate_iri(value: &str) -> Result<(), &'static str> {
    if value.is_empty() {
        return Err("empty");
    }
    let Some(colon) = value.find(':') else {
        return Err("missing scheme separator ':'");
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return Err("scheme must start with a letter"),
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return Err("invalid scheme character");
    }
    if value.chars().any(char::is_whitespace) {
        return Err("contains whitespace");
    }
    if value
        .chars()
        .any(|c| c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
    {
        return Err("contains a character not allowed in an IRI reference");
    }
    Ok(())
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// A blank node label, scoped to a single graph. Labels use the ASCII part
/// of the Turtle label grammar: `[A-Za-z0-9_]`, then also `-` and inner `.`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        let mut chars = label.chars();
        let valid = matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
            && !label.ends_with('.');
        if valid {
            Ok(BlankNode(label))
        } else {
            Err(TermError::InvalidBlankNode(label))
        }
    }

    /// Label `<prefix><n>`; always valid for an alphabetic prefix.
    pub(crate) fn numbered(prefix: &str, n: usize) -> Self {
        BlankNode(format!("{prefix}{n}"))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

/// An RDF literal. The datatype is always present; a language tag implies
/// the datatype `rdf:langString` and vice versa.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri::from_static(vocab::XSD_STRING),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, TermError> {
        if datatype.as_str() == vocab::RDF_LANG_STRING {
            return Err(TermError::LangStringWithoutTag);
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        })
    }

    pub fn lang_string(lexical: impl Into<String>, tag: impl Into<String>) -> Result<Self, TermError> {
        let tag = tag.into();
        if !is_language_tag(&tag) {
            return Err(TermError::InvalidLanguageTag(tag));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri::from_static(vocab::RDF_LANG_STRING),
            language: Some(tag),
        })
    }

    /// Typed literal with a datatype from [`crate::vocab`].
    pub(crate) fn with_static_type(lexical: impl Into<String>, datatype: &'static str) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri::from_static(datatype),
            language: None,
        }
    }

    pub fn lexical_form(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

/// `[a-zA-Z]+ ('-' [a-zA-Z0-9]+)*`
pub fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first_ok = parts
        .next()
        .is_some_and(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphabetic()));
    first_ok && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_string(&self.lexical))?;
        match &self.language {
            Some(tag) => write!(f, "@{tag}"),
            None if self.datatype.as_str() == vocab::XSD_STRING => Ok(()),
            None => write!(f, "^^{}", self.datatype),
        }
    }
}

/// Escapes text for a double-quoted Turtle/N-Triples string.
pub(crate) fn escape_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Subject position: IRI, blank node or embedded triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Iri(Iri),
    BlankNode(BlankNode),
    Triple(Box<Triple>),
}

/// Object position: IRI, blank node, literal or embedded triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Object {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
    Triple(Box<Triple>),
}

/// Anything that can be mentioned in a triple. Variant order gives the
/// crate-wide total order: IRIs, then blank nodes, then literals, then
/// embedded triples.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
    Triple(Triple),
}

impl Subject {
    pub fn as_triple(&self) -> Option<&Triple> {
        match self {
            Subject::Triple(t) => Some(t),
            _ => None,
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Subject::Iri(i) => Term::Iri(i.clone()),
            Subject::BlankNode(b) => Term::BlankNode(b.clone()),
            Subject::Triple(t) => Term::Triple((**t).clone()),
        }
    }
}

impl Object {
    pub fn as_triple(&self) -> Option<&Triple> {
        match self {
            Object::Triple(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Object::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Object::Iri(i) => Term::Iri(i.clone()),
            Object::BlankNode(b) => Term::BlankNode(b.clone()),
            Object::Literal(l) => Term::Literal(l.clone()),
            Object::Triple(t) => Term::Triple((**t).clone()),
        }
    }
}

impl Term {
    /// Converts back to a subject; `None` for literals.
    pub fn to_subject(&self) -> Option<Subject> {
        match self {
            Term::Iri(i) => Some(Subject::Iri(i.clone())),
            Term::BlankNode(b) => Some(Subject::BlankNode(b.clone())),
            Term::Literal(_) => None,
            Term::Triple(t) => Some(Subject::Triple(Box::new(t.clone()))),
        }
    }

    pub fn to_object(&self) -> Object {
        match self {
            Term::Iri(i) => Object::Iri(i.clone()),
            Term::BlankNode(b) => Object::BlankNode(b.clone()),
            Term::Literal(l) => Object::Literal(l.clone()),
            Term::Triple(t) => Object::Triple(Box::new(t.clone())),
        }
    }
}

impl From<Iri> for Subject {
    fn from(i: Iri) -> Self {
        Subject::Iri(i)
    }
}

impl From<BlankNode> for Subject {
    fn from(b: BlankNode) -> Self {
        Subject::BlankNode(b)
    }
}

impl From<Triple> for Subject {
    fn from(t: Triple) -> Self {
        Subject::Triple(Box::new(t))
    }
}

impl From<Iri> for Object {
    fn from(i: Iri) -> Self {
        Object::Iri(i)
    }
}

impl From<BlankNode> for Object {
    fn from(b: BlankNode) -> Self {
        Object::BlankNode(b)
    }
}

impl From<Literal> for Object {
    fn from(l: Literal) -> Self {
        Object::Literal(l)
    }
}

impl From<Triple> for Object {
    fn from(t: Triple) -> Self {
        Object::Triple(Box::new(t))
    }
}

impl From<Subject> for Object {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(i) => Object::Iri(i),
            Subject::BlankNode(b) => Object::BlankNode(b),
            Subject::Triple(t) => Object::Triple(t),
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Iri(i) => i.fmt(f),
            Subject::BlankNode(b) => b.fmt(f),
            Subject::Triple(t) => write!(f, "<< {t} >>"),
        }
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::Iri(i) => i.fmt(f),
            Object::BlankNode(b) => b.fmt(f),
            Object::Literal(l) => l.fmt(f),
            Object::Triple(t) => write!(f, "<< {t} >>"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::BlankNode(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
            Term::Triple(t) => write!(f, "<< {t} >>"),
        }
    }
}

/// An RDF-star triple. Nesting is finite because values are finite trees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Object,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Object>) -> Self {
        Triple {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }

    /// The smallest `k` for which the triple is k-nested: 0 for a plain RDF
    /// triple, otherwise one more than the deepest embedded triple.
    pub fn nesting_depth(&self) -> usize {
        self.embedded().map(|t| t.nesting_depth() + 1).max().unwrap_or(0)
    }

    /// True iff the subject or object is an embedded triple.
    pub fn is_metadata(&self) -> bool {
        self.embedded().next().is_some()
    }

    /// Triples directly embedded in subject or object position.
    pub fn embedded(&self) -> impl Iterator<Item = &Triple> {
        self.subject.as_triple().into_iter().chain(self.object.as_triple())
    }

    /// All terms and triples mentioned in this triple, recursively.
    pub fn terms_plus(&self) -> std::collections::BTreeSet<Term> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_terms_plus(&mut out);
        out
    }

    pub(crate) fn collect_terms_plus(&self, out: &mut std::collections::BTreeSet<Term>) {
        out.insert(self.subject.to_term());
        out.insert(Term::Iri(self.predicate.clone()));
        out.insert(self.object.to_term());
        for t in self.embedded() {
            t.collect_terms_plus(out);
        }
    }

    /// Visits every triple embedded at any depth (not `self`).
    pub(crate) fn for_each_embedded(&self, f: &mut impl FnMut(&Triple)) {
        for t in self.embedded() {
            f(t);
            t.for_each_embedded(f);
        }
    }

    /// Visits every blank node mentioned at any depth.
    pub(crate) fn for_each_blank_node(&self, f: &mut impl FnMut(&BlankNode)) {
        match &self.subject {
            Subject::BlankNode(b) => f(b),
            Subject::Triple(t) => t.for_each_blank_node(f),
            Subject::Iri(_) => {}
        }
        match &self.object {
            Object::BlankNode(b) => f(b),
            Object::Triple(t) => t.for_each_blank_node(f),
            _ => {}
        }
    }

    /// Rebuilds the triple with every blank node passed through `f`.
    pub(crate) fn map_blank_nodes(&self, f: &mut impl FnMut(&BlankNode) -> BlankNode) -> Triple {
        let subject = match &self.subject {
            Subject::BlankNode(b) => Subject::BlankNode(f(b)),
            Subject::Triple(t) => Subject::Triple(Box::new(t.map_blank_nodes(f))),
            s @ Subject::Iri(_) => s.clone(),
        };
        let object = match &self.object {
            Object::BlankNode(b) => Object::BlankNode(f(b)),
            Object::Triple(t) => Object::Triple(Box::new(t.map_blank_nodes(f))),
            o => o.clone(),
        };
        Triple {
            subject,
            predicate: self.predicate.clone(),
            object,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}
