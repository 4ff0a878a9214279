//! Alice/Bob and Kubrick/Welles graphs shared by unit tests.

use crate::rdf_model::{Iri, Literal, RdfStarGraph, Triple};
use crate::vocab;

pub fn ex(local: &str) -> Iri {
    Iri::new(format!("http://example.org/{local}")).unwrap()
}

pub fn foaf(local: &str) -> Iri {
    Iri::new(format!("http://xmlns.com/foaf/0.1/{local}")).unwrap()
}

pub fn lit_str(s: &str) -> Literal {
    Literal::string(s)
}

pub fn lit_int(s: &str) -> Literal {
    Literal::with_static_type(s, vocab::XSD_INTEGER)
}

pub fn lit_decimal(s: &str) -> Literal {
    Literal::with_static_type(s, vocab::XSD_DECIMAL)
}

/// Alice/Bob graph with certainty metadata on `knows` (0.5) and `age` (0.9).
pub fn g_ex() -> RdfStarGraph {
    let knows = Triple::new(ex("alice"), foaf("knows"), ex("bob"));
    let age = Triple::new(ex("bob"), foaf("age"), lit_int("23"));
    [
        Triple::new(knows, ex("certainty"), lit_decimal("0.5")),
        Triple::new(ex("alice"), foaf("name"), lit_str("Alice")),
        Triple::new(ex("bob"), foaf("name"), lit_str("Bob")),
        Triple::new(age, ex("certainty"), lit_decimal("0.9")),
    ]
    .into_iter()
    .collect()
}

/// `g_ex` without the metadata triple about Bob's age.
pub fn g_ex_prime() -> RdfStarGraph {
    let knows = Triple::new(ex("alice"), foaf("knows"), ex("bob"));
    [
        Triple::new(knows, ex("certainty"), lit_decimal("0.5")),
        Triple::new(ex("alice"), foaf("name"), lit_str("Alice")),
        Triple::new(ex("bob"), foaf("name"), lit_str("Bob")),
    ]
    .into_iter()
    .collect()
}

/// The Kubrick/Welles property graph.
pub fn pg_ex() -> crate::pg_model::PropertyGraph {
    use crate::pg_model::{EdgeId, Property, PropertyGraphBuilder, PropertyValue, VertexId};
    let kubrick = VertexId::new("Kubrick").unwrap();
    let welles = VertexId::new("Welles").unwrap();
    let e1 = EdgeId::new("e1").unwrap();
    let e2 = EdgeId::new("e2").unwrap();
    let mut b = PropertyGraphBuilder::new();
    b.vertex(kubrick.clone())
        .vertex(welles.clone())
        .edge(e1, welles.clone(), kubrick.clone(), "mentioned")
        .edge(e2.clone(), kubrick.clone(), welles.clone(), "influencedBy")
        .vertex_property(&kubrick, Property::new("name", PropertyValue::text("Stanley Kubrick")))
        .vertex_property(&kubrick, Property::new("birthyear", PropertyValue::integer(1928)))
        .vertex_property(&welles, Property::new("name", PropertyValue::text("Orson Welles")))
        .edge_property(&e2, Property::new("certainty", PropertyValue::double(0.8)));
    b.build().unwrap()
}
