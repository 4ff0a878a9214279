//! Convertibility checks and the transformations between RDF-star graphs and
//! property graphs: the RDF-like representation (and its inverse), the simple
//! representation, and the property-graph-to-RDF-star direction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::mappings::{
    assign_vertex_identities, im, im_inverse, literal_for_value, vm, vm_inverse, LiteralMode, TemplateIriMapping,
    VertexIdentityStrategy,
};
use crate::pg_model::{
    EdgeId, EdgeViolation, Property, PropertyGraph, PropertyGraphBuilder, PropertyValue, PropertyViolation, VertexId,
};
use crate::rdf_model::{is_language_tag, BlankNode, Literal, Object, RdfStarGraph, Subject, Term, Triple};

pub const KEY_KIND: &str = "kind";
pub const KEY_IRI: &str = "IRI";
pub const KEY_LITERAL: &str = "literal";
pub const KEY_DATATYPE: &str = "datatype";
pub const KEY_LANGUAGE: &str = "language";

pub const KIND_IRI: &str = "IRI";
pub const KIND_BLANK_NODE: &str = "blank node";
pub const KIND_LITERAL: &str = "literal";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("graph is not PG-convertible:\n{0}")]
    NotConvertible(ConvertibilityReport),
    #[error("graph is not strongly PG-convertible:\n{0}")]
    NotStronglyConvertible(ConvertibilityReport),
    #[error("not an RDF-like property graph: {0}")]
    MalformedRdfLikePg(String),
    #[error("property graph is not property-unique ({} violation(s), first: {} has key {:?} twice)", .0.len(), .0[0].element, .0[0].key)]
    NotPropertyUnique(Vec<PropertyViolation>),
    #[error("property graph is not edge-unique ({} violation(s), first: edges {} and {})", .0.len(), .0[0].first, .0[0].second)]
    NotEdgeUnique(Vec<EdgeViolation>),
}

/// Which convertibility condition a triple breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// An embedded subject must not itself be a metadata triple.
    NestedMetadata,
    /// The object must not be an embedded triple.
    EmbeddedObject,
    /// A metadata triple's object must be a literal.
    NonLiteralMetadataObject,
    /// Every literal must decode to a property value.
    UndecodableLiteral,
    /// No metadata about triples whose object is a literal.
    AttributeMetadata,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::NestedMetadata => "1",
            Condition::EmbeddedObject => "2",
            Condition::NonLiteralMetadataObject => "3",
            Condition::UndecodableLiteral => "4",
            Condition::AttributeMetadata => "strong",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub triple: Triple,
    pub condition: Condition,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} : {}", self.condition, self.triple, self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConvertibilityReport {
    pub violations: Vec<Violation>,
}

impl ConvertibilityReport {
    pub fn is_convertible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ConvertibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Value stored for a literal that becomes a vertex. Language-tagged
/// literals keep their text here; the tag goes in a separate property.
fn vertex_literal_value(l: &Literal, mode: LiteralMode) -> Option<PropertyValue> {
    match l.language() {
        Some(_) => Some(PropertyValue::Text(l.lexical_form().to_owned())),
        None => vm_inverse(l, mode),
    }
}

/// Visits literals with a flag telling whether the literal sits in the
/// object position of a metadata triple (and so becomes a property value).
fn for_each_literal_position(t: &Triple, f: &mut impl FnMut(&Literal, bool)) {
    if let Subject::Triple(s) = &t.subject {
        for_each_literal_position(s, f);
    }
    match &t.object {
        Object::Literal(l) => f(l, t.is_metadata()),
        Object::Triple(o) => for_each_literal_position(o, f),
        _ => {}
    }
}

fn convertibility_violations(t: &Triple, mode: LiteralMode, out: &mut Vec<Violation>) {
    let mut push = |condition, reason: String| {
        out.push(Violation {
            triple: t.clone(),
            condition,
            reason,
        })
    };
    if let Subject::Triple(s) = &t.subject {
        if s.is_metadata() {
            push(
                Condition::NestedMetadata,
                format!("embedded subject {s} is itself a metadata triple"),
            );
        }
        if t.object.as_literal().is_none() {
            push(
                Condition::NonLiteralMetadataObject,
                format!("metadata object {} is not a literal", t.object),
            );
        }
    }
    if let Object::Triple(o) = &t.object {
        push(Condition::EmbeddedObject, format!("object {o} is an embedded triple"));
    }
    let mut seen = BTreeSet::new();
    for_each_literal_position(t, &mut |l, as_value| {
        let decodable = if as_value {
            vm_inverse(l, mode).is_some()
        } else {
            vertex_literal_value(l, mode).is_some()
        };
        if !decodable && seen.insert(l.clone()) {
            let reason = if as_value && l.language().is_some() {
                format!("language-tagged literal {l} cannot be a property value")
            } else {
                format!("literal {l} does not decode to a property value in {mode:?} mode")
            };
            push(Condition::UndecodableLiteral, reason);
        }
    });
}

pub fn check_pg_convertible(g: &RdfStarGraph, mode: LiteralMode) -> ConvertibilityReport {
    let mut violations = Vec::new();
    for t in g {
        convertibility_violations(t, mode, &mut violations);
    }
    ConvertibilityReport { violations }
}

pub fn check_strongly_pg_convertible(g: &RdfStarGraph, mode: LiteralMode) -> ConvertibilityReport {
    let mut report = check_pg_convertible(g, mode);
    for t in g {
        t.for_each_embedded(&mut |e| {
            if e.object.as_literal().is_some() {
                report.violations.push(Violation {
                    triple: t.clone(),
                    condition: Condition::AttributeMetadata,
                    reason: format!("metadata about attribute triple {e}"),
                });
            }
        });
    }
    report
}

/// Non-triple subjects and objects of the ordinary triples.
pub fn so_terms_plus(g: &RdfStarGraph) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for t in g.ord() {
        if t.subject.as_triple().is_none() {
            out.insert(t.subject.to_term());
        }
        if t.object.as_triple().is_none() {
            out.insert(t.object.to_term());
        }
    }
    out
}

/// IRIs and blank nodes among the subjects and objects of the ordinary triples.
pub fn so_plus(g: &RdfStarGraph) -> BTreeSet<Term> {
    so_terms_plus(g)
        .into_iter()
        .filter(|x| matches!(x, Term::Iri(_) | Term::BlankNode(_)))
        .collect()
}

/// Ordinary triples with a literal object.
pub fn ord_a(g: &RdfStarGraph) -> BTreeSet<Triple> {
    g.ord()
        .into_iter()
        .filter(|t| t.object.as_literal().is_some())
        .collect()
}

/// Ordinary triples with an IRI or blank-node object.
pub fn ord_r(g: &RdfStarGraph) -> BTreeSet<Triple> {
    g.ord()
        .into_iter()
        .filter(|t| matches!(t.object, Object::Iri(_) | Object::BlankNode(_)))
        .collect()
}

/// Top-level metadata triples grouped by their embedded subject.
fn metadata_by_subject(g: &RdfStarGraph) -> BTreeMap<&Triple, Vec<&Triple>> {
    let mut out: BTreeMap<&Triple, Vec<&Triple>> = BTreeMap::new();
    for t in g {
        if let Subject::Triple(s) = &t.subject {
            out.entry(s.as_ref()).or_default().push(t);
        }
    }
    out
}

fn edge_properties(metadata: Option<&Vec<&Triple>>, mode: LiteralMode) -> Vec<Property> {
    metadata
        .into_iter()
        .flatten()
        .map(|m| {
            let l = m.object.as_literal().expect("convertible metadata object is a literal");
            Property::new(
                im(&m.predicate),
                vm_inverse(l, mode).expect("convertible literal decodes"),
            )
        })
        .collect()
}

fn vertex_id(n: usize) -> VertexId {
    VertexId::new(format!("v{n}")).expect("non-empty id")
}

fn edge_id(n: usize) -> EdgeId {
    EdgeId::new(format!("e{n}")).expect("non-empty id")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdfLikePgResult {
    pub graph: PropertyGraph,
    pub vertex_map: BTreeMap<Term, VertexId>,
    pub edge_map: BTreeMap<Triple, EdgeId>,
}

fn rdf_like_vertex_properties(term: &Term, mode: LiteralMode) -> Vec<Property> {
    let text = |k: &str, v: &str| Property::new(k, PropertyValue::text(v));
    match term {
        Term::Iri(i) => vec![text(KEY_KIND, KIND_IRI), text(KEY_IRI, &im(i))],
        Term::BlankNode(_) => vec![text(KEY_KIND, KIND_BLANK_NODE)],
        Term::Literal(l) => {
            let mut props = vec![
                text(KEY_KIND, KIND_LITERAL),
                Property::new(
                    KEY_LITERAL,
                    vertex_literal_value(l, mode).expect("convertible literal decodes"),
                ),
                text(KEY_DATATYPE, &im(l.datatype())),
            ];
            if let Some(tag) = l.language() {
                props.push(text(KEY_LANGUAGE, tag));
            }
            props
        }
        Term::Triple(_) => unreachable!("embedded triples are never vertices"),
    }
}

/// The RDF-like property graph: a vertex per subject/object term of the
/// ordinary triples, an edge per ordinary triple, metadata as edge properties.
///
/// Vertices are numbered `v1, v2, ...` in term order and edges `e1, e2, ...`
/// in triple order.
pub fn to_rdf_like_pg(g: &RdfStarGraph, mode: LiteralMode) -> Result<RdfLikePgResult, TransformError> {
    let report = check_pg_convertible(g, mode);
    if !report.is_convertible() {
        return Err(TransformError::NotConvertible(report));
    }
    let mut b = PropertyGraphBuilder::new();
    let mut vertex_map = BTreeMap::new();
    for (i, term) in so_terms_plus(g).into_iter().enumerate() {
        let id = vertex_id(i + 1);
        b.vertex(id.clone());
        for p in rdf_like_vertex_properties(&term, mode) {
            b.vertex_property(&id, p);
        }
        vertex_map.insert(term, id);
    }
    let metadata = metadata_by_subject(g);
    let mut edge_map = BTreeMap::new();
    for (i, t) in g.ord().into_iter().enumerate() {
        let id = edge_id(i + 1);
        let src = vertex_map[&t.subject.to_term()].clone();
        let tgt = vertex_map[&t.object.to_term()].clone();
        b.edge(id.clone(), src, tgt, im(&t.predicate));
        for p in edge_properties(metadata.get(&t), mode) {
            b.edge_property(&id, p);
        }
        edge_map.insert(t, id);
    }
    let graph = b.build().expect("generated graph is well formed");
    Ok(RdfLikePgResult {
        graph,
        vertex_map,
        edge_map,
    })
}

/// Whether the inverse keeps triples that are also embedded in metadata.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Reconstruction {
    /// Drop them, giving a minimal graph.
    #[default]
    Minimal,
    /// Keep every edge's triple at the top level as well.
    Full,
}

fn malformed(msg: impl Into<String>) -> TransformError {
    TransformError::MalformedRdfLikePg(msg.into())
}

fn single<'a>(
    v: &VertexId,
    props: &'a BTreeSet<Property>,
    key: &str,
) -> Result<Option<&'a PropertyValue>, TransformError> {
    let mut found = props.iter().filter(|p| p.key == key);
    let first = found.next();
    if found.next().is_some() {
        return Err(malformed(format!("vertex {v} has more than one {key:?} property")));
    }
    Ok(first.map(|p| &p.value))
}

fn single_text<'a>(v: &VertexId, props: &'a BTreeSet<Property>, key: &str) -> Result<Option<&'a str>, TransformError> {
    match single(v, props, key)? {
        None => Ok(None),
        Some(PropertyValue::Text(s)) => Ok(Some(s)),
        Some(other) => Err(malformed(format!(
            "vertex {v}: {key:?} must be a string, found {}",
            other.type_name()
        ))),
    }
}

fn decode_vertex(v: &VertexId, props: &BTreeSet<Property>, next_blank: &mut usize) -> Result<Term, TransformError> {
    let kind =
        single_text(v, props, KEY_KIND)?.ok_or_else(|| malformed(format!("vertex {v} has no \"kind\" property")))?;
    let allowed: &[&str] = match kind {
        KIND_IRI => &[KEY_KIND, KEY_IRI],
        KIND_BLANK_NODE => &[KEY_KIND],
        KIND_LITERAL => &[KEY_KIND, KEY_LITERAL, KEY_DATATYPE, KEY_LANGUAGE],
        other => return Err(malformed(format!("vertex {v} has unknown kind {other:?}"))),
    };
    if let Some(p) = props.iter().find(|p| !allowed.contains(&p.key.as_str())) {
        return Err(malformed(format!(
            "vertex {v} of kind {kind:?} has unexpected property {:?}",
            p.key
        )));
    }
    match kind {
        KIND_IRI => {
            let text = single_text(v, props, KEY_IRI)?
                .ok_or_else(|| malformed(format!("IRI vertex {v} has no \"IRI\" property")))?;
            let iri = im_inverse(text).ok_or_else(|| malformed(format!("vertex {v}: {text:?} is not an IRI")))?;
            Ok(Term::Iri(iri))
        }
        KIND_BLANK_NODE => {
            *next_blank += 1;
            Ok(Term::BlankNode(BlankNode::numbered("b", *next_blank)))
        }
        _ => {
            let value = single(v, props, KEY_LITERAL)?
                .ok_or_else(|| malformed(format!("literal vertex {v} has no \"literal\" property")))?;
            let datatype = single_text(v, props, KEY_DATATYPE)?
                .map(|d| im_inverse(d).ok_or_else(|| malformed(format!("vertex {v}: datatype {d:?} is not an IRI"))))
                .transpose()?;
            let language = single_text(v, props, KEY_LANGUAGE)?;
            if let Some(tag) = language {
                if !is_language_tag(tag) {
                    return Err(malformed(format!("vertex {v}: {tag:?} is not a language tag")));
                }
            }
            let literal = literal_for_value(value, datatype.as_ref(), language).ok_or_else(|| {
                malformed(format!(
                    "vertex {v}: value {value} cannot be written with the recorded datatype/language"
                ))
            })?;
            Ok(Term::Literal(literal))
        }
    }
}

/// Rebuilds the RDF-star graph from an RDF-like property graph, as a minimal
/// graph. Blank-node vertices get fresh labels `b1, b2, ...` in vertex order.
pub fn from_rdf_like_pg(p: &PropertyGraph) -> Result<RdfStarGraph, TransformError> {
    from_rdf_like_pg_with(p, Reconstruction::Minimal)
}

pub fn from_rdf_like_pg_with(p: &PropertyGraph, how: Reconstruction) -> Result<RdfStarGraph, TransformError> {
    let mut next_blank = 0;
    let mut terms = BTreeMap::new();
    for (v, props) in p.vertices() {
        terms.insert(v, decode_vertex(v, props, &mut next_blank)?);
    }
    let mut out = RdfStarGraph::new();
    for (id, e) in p.edges() {
        let subject = terms[&e.src]
            .to_subject()
            .filter(|s| s.as_triple().is_none())
            .ok_or_else(|| malformed(format!("edge {id} starts at literal vertex {}", e.src)))?;
        let predicate =
            im_inverse(&e.label).ok_or_else(|| malformed(format!("edge {id}: label {:?} is not an IRI", e.label)))?;
        let t = Triple::new(subject, predicate, terms[&e.tgt].to_object());
        for prop in &e.properties {
            let key = im_inverse(&prop.key)
                .ok_or_else(|| malformed(format!("edge {id}: property key {:?} is not an IRI", prop.key)))?;
            out.insert(Triple::new(t.clone(), key, vm(&prop.value)));
        }
        if e.properties.is_empty() || how == Reconstruction::Full {
            out.insert(t);
        }
    }
    Ok(out)
}

/// What a round trip through the RDF-like representation turns a minimal
/// convertible graph into. Literals are re-derived from their decoded values:
/// metadata objects via `vm`, vertex literals in their own datatype. With
/// canonical literals this is the identity.
pub fn rdf_like_normal_form(g: &RdfStarGraph, mode: LiteralMode) -> Result<RdfStarGraph, TransformError> {
    let report = check_pg_convertible(g, mode);
    if !report.is_convertible() {
        return Err(TransformError::NotConvertible(report));
    }
    let vertex_literal = |o: &Object| -> Object {
        match o {
            Object::Literal(l) => {
                let value = vertex_literal_value(l, mode).expect("checked");
                Object::Literal(
                    literal_for_value(&value, Some(l.datatype()), l.language()).expect("recorded form is expressible"),
                )
            }
            other => other.clone(),
        }
    };
    Ok(g.iter()
        .map(|t| match &t.subject {
            Subject::Triple(s) => {
                let inner = Triple::new(s.subject.clone(), s.predicate.clone(), vertex_literal(&s.object));
                let l = t.object.as_literal().expect("checked");
                Triple::new(inner, t.predicate.clone(), vm(&vm_inverse(l, mode).expect("checked")))
            }
            _ => Triple::new(t.subject.clone(), t.predicate.clone(), vertex_literal(&t.object)),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplePgResult {
    pub graph: PropertyGraph,
    pub vertex_map: BTreeMap<Term, VertexId>,
    pub edge_map: BTreeMap<Triple, EdgeId>,
}

/// The simple property graph: IRIs and blank nodes become vertices, literal
/// attributes become vertex properties, relationship triples become edges.
pub fn to_simple_pg(g: &RdfStarGraph, mode: LiteralMode) -> Result<SimplePgResult, TransformError> {
    let report = check_strongly_pg_convertible(g, mode);
    if !report.is_convertible() {
        return Err(TransformError::NotStronglyConvertible(report));
    }
    let mut b = PropertyGraphBuilder::new();
    let mut vertex_map = BTreeMap::new();
    for (i, term) in so_plus(g).into_iter().enumerate() {
        let id = vertex_id(i + 1);
        b.vertex(id.clone());
        if let Term::Iri(iri) = &term {
            b.vertex_property(&id, Property::new(KEY_IRI, PropertyValue::text(im(iri))));
        }
        vertex_map.insert(term, id);
    }
    for t in ord_a(g) {
        let l = t.object.as_literal().expect("attribute triple");
        let value = vertex_literal_value(l, mode).expect("checked");
        b.vertex_property(
            &vertex_map[&t.subject.to_term()],
            Property::new(im(&t.predicate), value),
        );
    }
    let metadata = metadata_by_subject(g);
    let mut edge_map = BTreeMap::new();
    for (i, t) in ord_r(g).into_iter().enumerate() {
        let id = edge_id(i + 1);
        let src = vertex_map[&t.subject.to_term()].clone();
        let tgt = vertex_map[&t.object.to_term()].clone();
        b.edge(id.clone(), src, tgt, im(&t.predicate));
        for p in edge_properties(metadata.get(&t), mode) {
            b.edge_property(&id, p);
        }
        edge_map.insert(t, id);
    }
    let graph = b.build().expect("generated graph is well formed");
    Ok(SimplePgResult {
        graph,
        vertex_map,
        edge_map,
    })
}

/// RDF-star representation of a property graph: vertex properties as
/// triples on the vertex's identity, edges as triples, edge properties as
/// metadata about the edge's triple (which is then not asserted on its own).
pub fn pg_to_rdf_star(
    p: &PropertyGraph,
    strategy: &VertexIdentityStrategy,
    labels: &TemplateIriMapping,
    keys: &TemplateIriMapping,
) -> Result<RdfStarGraph, TransformError> {
    let violations = p.property_uniqueness_violations();
    if !violations.is_empty() {
        return Err(TransformError::NotPropertyUnique(violations));
    }
    let violations = p.edge_uniqueness_violations();
    if !violations.is_empty() {
        return Err(TransformError::NotEdgeUnique(violations));
    }
    let ids = assign_vertex_identities(strategy, p);
    let mut out = RdfStarGraph::new();
    for (v, props) in p.vertices() {
        for prop in props {
            out.insert(Triple::new(ids[v].clone(), keys.apply(&prop.key), vm(&prop.value)));
        }
    }
    for (_, e) in p.edges() {
        let t = Triple::new(
            ids[&e.src].clone(),
            labels.apply(&e.label),
            Object::from(ids[&e.tgt].clone()),
        );
        if e.properties.is_empty() {
            out.insert(t);
        } else {
            for prop in &e.properties {
                out.insert(Triple::new(t.clone(), keys.apply(&prop.key), vm(&prop.value)));
            }
        }
    }
    Ok(out)
}

/// `|G_vp| + |G_ep| + |G_en|` for a property- and edge-unique graph.
pub fn expected_rdf_star_size(p: &PropertyGraph) -> usize {
    let vertex: usize = p.vertices().map(|(_, props)| props.len()).sum();
    let edge: usize = p.edges().map(|(_, e)| e.properties.len().max(1)).sum();
    vertex + edge
}
