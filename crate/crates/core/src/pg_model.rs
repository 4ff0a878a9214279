//! Property graphs: an edge-labelled directed multigraph with sets of
//! key/value properties on every vertex and edge.
//!
//! Property sets hold pairs rather than a key→value map, so graphs where one
//! element carries the same key twice are representable. Such graphs are
//! valid here and are only flagged by [`PropertyGraph::property_uniqueness_violations`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgError {
    #[error("element ids must be non-empty")]
    EmptyId,
    #[error("edge {edge} refers to unknown vertex {vertex}")]
    DanglingEdge { edge: EdgeId, vertex: String },
    #[error("edge {0} has no {1} vertex")]
    MissingEndpoint(EdgeId, &'static str),
    #[error("edge {0} has no label")]
    MissingEdgeLabel(EdgeId),
    #[error("id {0} is used by both a vertex and an edge")]
    IdCollision(String),
    #[error("id {0} is declared more than once")]
    DuplicateId(String),
    #[error("{0} is not a vertex or edge of the graph")]
    UnknownElement(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> Result<Self, PgError> {
        let id = id.into();
        if id.is_empty() {
            return Err(PgError::EmptyId);
        }
        Ok(VertexId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl EdgeId {
    pub fn new(id: impl Into<String>) -> Result<Self, PgError> {
        let id = id.into();
        if id.is_empty() {
            return Err(PgError::EmptyId);
        }
        Ok(EdgeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Either kind of graph element, for property lookups and diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementId {
    Vertex(VertexId),
    Edge(EdgeId),
}

impl ElementId {
    pub fn as_str(&self) -> &str {
        match self {
            ElementId::Vertex(v) => v.as_str(),
            ElementId::Edge(e) => e.as_str(),
        }
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A non-NaN 64-bit float with a total order; `-0.0` and `0.0` are distinct.
#[derive(Debug, Clone, Copy)]
pub struct Double(f64);

impl Double {
    pub fn new(value: f64) -> Option<Self> {
        (!value.is_nan()).then_some(Double(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for Double {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Double {}

impl PartialOrd for Double {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Double {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Hash for Double {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

impl fmt::Display for Double {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A property value. The variant is part of the identity, so
/// `Integer(1)` and `Double(1.0)` are different values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyValue {
    Text(String),
    Integer(BigInt),
    Double(Double),
    Boolean(bool),
}

impl PropertyValue {
    pub fn text(s: impl Into<String>) -> Self {
        PropertyValue::Text(s.into())
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        PropertyValue::Integer(n.into())
    }

    /// Panics on NaN.
    pub fn double(d: f64) -> Self {
        PropertyValue::Double(Double::new(d).expect("property values cannot be NaN"))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            PropertyValue::Text(_) => "string",
            PropertyValue::Integer(_) => "integer",
            PropertyValue::Double(_) => "double",
            PropertyValue::Boolean(_) => "boolean",
        }
    }
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Text(s) => write!(f, "{s:?}"),
            PropertyValue::Integer(n) => write!(f, "{n}"),
            PropertyValue::Double(d) => write!(f, "{d}"),
            PropertyValue::Boolean(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Property {
    pub key: String,
    pub value: PropertyValue,
}

impl Property {
    pub fn new(key: impl Into<String>, value: PropertyValue) -> Self {
        Property { key: key.into(), value }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}, {}>", self.key, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub tgt: VertexId,
    pub label: String,
    pub properties: BTreeSet<Property>,
}

/// The six components of a property graph, as plain maps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyGraphParts {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
    pub src: BTreeMap<EdgeId, VertexId>,
    pub tgt: BTreeMap<EdgeId, VertexId>,
    pub lbl: BTreeMap<EdgeId, String>,
    /// Missing entries mean the empty property set.
    pub props: BTreeMap<ElementId, BTreeSet<Property>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PropertyGraph {
    vertices: BTreeMap<VertexId, BTreeSet<Property>>,
    edges: BTreeMap<EdgeId, Edge>,
}

/// Two distinct properties of one element sharing a key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyViolation {
    pub element: ElementId,
    pub key: String,
}

/// Two distinct edges with the same source, target and label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeViolation {
    pub first: EdgeId,
    pub second: EdgeId,
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validating constructor from the six components.
    pub fn from_parts(parts: PropertyGraphParts) -> Result<Self, PgError> {
        let PropertyGraphParts {
            vertices,
            edges,
            mut src,
            mut tgt,
            mut lbl,
            mut props,
        } = parts;
        for e in &edges {
            if vertices.contains(&VertexId(e.0.clone())) {
                return Err(PgError::IdCollision(e.0.clone()));
            }
        }
        for e in src.keys().chain(tgt.keys()).chain(lbl.keys()) {
            if !edges.contains(e) {
                return Err(PgError::UnknownElement(e.0.clone()));
            }
        }
        for x in props.keys() {
            let known = match x {
                ElementId::Vertex(v) => vertices.contains(v),
                ElementId::Edge(e) => edges.contains(e),
            };
            if !known {
                return Err(PgError::UnknownElement(x.as_str().to_owned()));
            }
        }
        let mut graph = PropertyGraph::new();
        for v in vertices {
            let p = props.remove(&ElementId::Vertex(v.clone())).unwrap_or_default();
            graph.vertices.insert(v, p);
        }
        for e in edges {
            let s = src
                .remove(&e)
                .ok_or_else(|| PgError::MissingEndpoint(e.clone(), "source"))?;
            let t = tgt
                .remove(&e)
                .ok_or_else(|| PgError::MissingEndpoint(e.clone(), "target"))?;
            let label = lbl.remove(&e).ok_or_else(|| PgError::MissingEdgeLabel(e.clone()))?;
            for end in [&s, &t] {
                if !graph.vertices.contains_key(end) {
                    return Err(PgError::DanglingEdge {
                        edge: e.clone(),
                        vertex: end.0.clone(),
                    });
                }
            }
            let properties = props.remove(&ElementId::Edge(e.clone())).unwrap_or_default();
            graph.edges.insert(
                e,
                Edge {
                    src: s,
                    tgt: t,
                    label,
                    properties,
                },
            );
        }
        Ok(graph)
    }

    pub fn into_parts(self) -> PropertyGraphParts {
        let mut parts = PropertyGraphParts::default();
        for (v, p) in self.vertices {
            parts.vertices.insert(v.clone());
            if !p.is_empty() {
                parts.props.insert(ElementId::Vertex(v), p);
            }
        }
        for (id, e) in self.edges {
            parts.edges.insert(id.clone());
            parts.src.insert(id.clone(), e.src);
            parts.tgt.insert(id.clone(), e.tgt);
            parts.lbl.insert(id.clone(), e.label);
            if !e.properties.is_empty() {
                parts.props.insert(ElementId::Edge(id), e.properties);
            }
        }
        parts
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    /// Vertices with their properties, ordered by id.
    pub fn vertices(&self) -> impl Iterator<Item = (&VertexId, &BTreeSet<Property>)> {
        self.vertices.iter()
    }

    /// Edges ordered by id.
    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &Edge)> {
        self.edges.iter()
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains_key(v)
    }

    pub fn vertex_properties(&self, v: &VertexId) -> Option<&BTreeSet<Property>> {
        self.vertices.get(v)
    }

    pub fn edge(&self, e: &EdgeId) -> Option<&Edge> {
        self.edges.get(e)
    }

    pub fn properties(&self, x: &ElementId) -> Option<&BTreeSet<Property>> {
        match x {
            ElementId::Vertex(v) => self.vertices.get(v),
            ElementId::Edge(e) => self.edges.get(e).map(|e| &e.properties),
        }
    }

    /// Every pair of distinct properties on one element that share a key,
    /// reported once per (element, key).
    pub fn property_uniqueness_violations(&self) -> Vec<PropertyViolation> {
        let elements = self
            .vertices
            .iter()
            .map(|(v, p)| (ElementId::Vertex(v.clone()), p))
            .chain(
                self.edges
                    .iter()
                    .map(|(e, d)| (ElementId::Edge(e.clone()), &d.properties)),
            );
        let mut out = Vec::new();
        for (element, props) in elements {
            // sorted by key, so duplicates are adjacent
            let keys: Vec<&str> = props.iter().map(|p| p.key.as_str()).collect();
            let mut last_reported: Option<&str> = None;
            for pair in keys.windows(2) {
                if pair[0] == pair[1] && last_reported != Some(pair[0]) {
                    out.push(PropertyViolation {
                        element: element.clone(),
                        key: pair[0].to_owned(),
                    });
                    last_reported = Some(pair[0]);
                }
            }
        }
        out
    }

    pub fn is_property_unique(&self) -> bool {
        self.property_uniqueness_violations().is_empty()
    }

    /// Pairs of distinct edges agreeing on source, target and label.
    pub fn edge_uniqueness_violations(&self) -> Vec<EdgeViolation> {
        let mut groups: BTreeMap<(&VertexId, &VertexId, &str), Vec<&EdgeId>> = BTreeMap::new();
        for (id, e) in &self.edges {
            groups.entry((&e.src, &e.tgt, e.label.as_str())).or_default().push(id);
        }
        let mut out = Vec::new();
        for ids in groups.values() {
            for (i, a) in ids.iter().enumerate() {
                for b in &ids[i + 1..] {
                    out.push(EdgeViolation {
                        first: (*a).clone(),
                        second: (*b).clone(),
                    });
                }
            }
        }
        out
    }

    pub fn is_edge_unique(&self) -> bool {
        self.edge_uniqueness_violations().is_empty()
    }
}

/// Incremental construction; validation happens in [`PropertyGraphBuilder::build`].
#[derive(Debug, Default)]
pub struct PropertyGraphBuilder {
    parts: PropertyGraphParts,
    duplicate: Option<String>,
}

impl PropertyGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: VertexId) -> &mut Self {
        if !self.parts.vertices.insert(id.clone()) {
            self.duplicate.get_or_insert(id.0);
        }
        self
    }

    pub fn edge(&mut self, id: EdgeId, src: VertexId, tgt: VertexId, label: impl Into<String>) -> &mut Self {
        if !self.parts.edges.insert(id.clone()) {
            self.duplicate.get_or_insert(id.0.clone());
        }
        self.parts.src.insert(id.clone(), src);
        self.parts.tgt.insert(id.clone(), tgt);
        self.parts.lbl.insert(id, label.into());
        self
    }

    pub fn property(&mut self, element: ElementId, property: Property) -> &mut Self {
        self.parts.props.entry(element).or_default().insert(property);
        self
    }

    pub fn vertex_property(&mut self, v: &VertexId, property: Property) -> &mut Self {
        self.property(ElementId::Vertex(v.clone()), property)
    }

    pub fn edge_property(&mut self, e: &EdgeId, property: Property) -> &mut Self {
        self.property(ElementId::Edge(e.clone()), property)
    }

    pub fn build(self) -> Result<PropertyGraph, PgError> {
        if let Some(id) = self.duplicate {
            return Err(PgError::DuplicateId(id));
        }
        PropertyGraph::from_parts(self.parts)
    }
}
