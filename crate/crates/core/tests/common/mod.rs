//! Seeded random corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rdfstar_pg::mappings::vm;
use rdfstar_pg::pg_model::{EdgeId, Property, PropertyGraph, PropertyGraphBuilder, PropertyValue, VertexId};
use rdfstar_pg::rdf_model::{BlankNode, Iri, Literal, Object, RdfStarGraph, Subject, Triple};

pub const EX: &str = "http://example.org/";

pub fn ex(local: &str) -> Iri {
    Iri::new(format!("{EX}{local}")).unwrap()
}

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap()
}

pub fn random_value(rng: &mut ChaCha8Rng) -> PropertyValue {
    match rng.gen_range(0..4) {
        0 => {
            let pool = [
                "",
                "a",
                "Alice",
                "say \"hi\"",
                "tab\there",
                "line\nbreak",
                "back\\slash",
                "ünï",
                "0.5",
                "@en",
            ];
            PropertyValue::text(*pool.choose(rng).unwrap())
        }
        1 => {
            if rng.gen_bool(0.1) {
                PropertyValue::integer(num_bigint::BigInt::from(i64::MAX) * rng.gen_range(2..1000i64))
            } else {
                PropertyValue::integer(rng.gen_range(-50..50i64))
            }
        }
        2 => {
            let pool = [
                0.5,
                0.9,
                0.8,
                -1.25,
                0.0,
                1e300,
                1e-7,
                3.0,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ];
            if rng.gen_bool(0.3) {
                PropertyValue::double(rng.gen_range(-1e6..1e6))
            } else {
                PropertyValue::double(*pool.choose(rng).unwrap())
            }
        }
        _ => PropertyValue::Boolean(rng.gen()),
    }
}

/// A subject/object resource: a few IRIs and a few blank nodes.
fn resource(rng: &mut ChaCha8Rng) -> Subject {
    if rng.gen_bool(0.7) {
        Subject::Iri(ex(&format!("n{}", rng.gen_range(0..6))))
    } else {
        Subject::BlankNode(BlankNode::new(format!("x{}", rng.gen_range(0..3))).unwrap())
    }
}

/// Literal in a vertex position: a value-mapping image or a language-tagged string.
fn vertex_literal(rng: &mut ChaCha8Rng) -> Literal {
    if rng.gen_bool(0.15) {
        let tag = ["en", "de", "en-US"].choose(rng).unwrap();
        Literal::lang_string(["chat", "Hund", "color"].choose(rng).unwrap().to_string(), *tag).unwrap()
    } else {
        vm(&random_value(rng))
    }
}

/// A minimal PG-convertible graph together with what went into it.
pub struct ConvertibleSample {
    pub graph: RdfStarGraph,
    /// Asserted and embedded ordinary triples.
    pub ordinary: BTreeSet<Triple>,
    pub metadata: BTreeSet<Triple>,
    /// No embedded triple has a literal object.
    pub strong: bool,
}

/// At most 30 triples, nesting at most 1, metadata objects are value-mapping
/// images, and no embedded triple is asserted.
pub fn random_convertible(rng: &mut ChaCha8Rng) -> ConvertibleSample {
    let allow_attribute_metadata = rng.gen_bool(0.5);
    let target = rng.gen_range(0..=30usize);
    let mut ordinary = BTreeSet::new();
    let mut asserted = BTreeSet::new();
    let mut metadata = BTreeSet::new();
    let mut graph = RdfStarGraph::new();
    let mut attempts = 0;
    while graph.len() < target && attempts < 200 {
        attempts += 1;
        let s = resource(rng);
        let p = ex(&format!("p{}", rng.gen_range(0..4)));
        let o: Object = if rng.gen_bool(0.5) {
            resource(rng).into()
        } else {
            vertex_literal(rng).into()
        };
        let t = Triple::new(s, p, o);
        let literal_object = t.object.as_literal().is_some();
        let embed = rng.gen_bool(0.35) && (allow_attribute_metadata || !literal_object);
        if embed && !asserted.contains(&t) {
            let n = if rng.gen_bool(0.3) { 2 } else { 1 };
            for _ in 0..n {
                if graph.len() >= target {
                    break;
                }
                let m = Triple::new(
                    t.clone(),
                    ex(&format!("m{}", rng.gen_range(0..3))),
                    vm(&random_value(rng)),
                );
                if graph.insert(m.clone()) {
                    metadata.insert(m);
                    ordinary.insert(t.clone());
                }
            }
        } else if !embed && !ordinary.contains(&t) && graph.insert(t.clone()) {
            asserted.insert(t.clone());
            ordinary.insert(t);
        }
    }
    let strong = metadata
        .iter()
        .all(|m| m.subject.as_triple().unwrap().object.as_literal().is_none());
    ConvertibleSample {
        graph,
        ordinary,
        metadata,
        strong,
    }
}

fn any_literal(rng: &mut ChaCha8Rng) -> Literal {
    match rng.gen_range(0..4) {
        0 => vertex_literal(rng),
        1 => Literal::string(
            ["", "x y", "q\"uote", "multi\nline", "\u{1F600}"]
                .choose(rng)
                .unwrap()
                .to_string(),
        ),
        2 => Literal::typed(
            ["abc", "2024-01-01", " spaced "].choose(rng).unwrap().to_string(),
            ex("dt"),
        )
        .unwrap(),
        _ => Literal::typed(
            ["0.50", "+7", "1e3", "true"].choose(rng).unwrap().to_string(),
            Iri::new(
                *[
                    "http://www.w3.org/2001/XMLSchema#decimal",
                    "http://www.w3.org/2001/XMLSchema#integer",
                ]
                .choose(rng)
                .unwrap(),
            )
            .unwrap(),
        )
        .unwrap(),
    }
}

fn any_triple(rng: &mut ChaCha8Rng, depth: usize) -> Triple {
    let s: Subject = if depth > 0 && rng.gen_bool(0.25) {
        any_triple(rng, depth - 1).into()
    } else {
        resource(rng)
    };
    let p = if rng.gen_bool(0.1) {
        Iri::new("http://www.w3.org/1999/02/22-rdf-syntax-ns#type").unwrap()
    } else {
        ex(&format!("p{}", rng.gen_range(0..4)))
    };
    let o: Object = match rng.gen_range(0..10) {
        0..=3 => resource(rng).into(),
        4 if depth > 0 => any_triple(rng, depth - 1).into(),
        _ => any_literal(rng).into(),
    };
    Triple::new(s, p, o)
}

/// Unrestricted RDF-star graph: nesting up to 2, embedded objects,
/// arbitrary datatypes.
pub fn random_rdf_star(rng: &mut ChaCha8Rng) -> RdfStarGraph {
    let n = rng.gen_range(0..=20);
    (0..n).map(|_| any_triple(rng, 2)).collect()
}

/// Property- and edge-unique graph with awkward ids, keys and labels.
pub fn random_unique_pg(rng: &mut ChaCha8Rng) -> PropertyGraph {
    let keys = ["name", "age", "a b", "ü", "x/y", "50%", "certainty"];
    let labels = ["knows", "influencedBy", "a b", "é#", "rel~1"];
    let nv = rng.gen_range(0..8usize);
    let vertices: Vec<VertexId> = (0..nv)
        .map(|i| {
            VertexId::new(if rng.gen_bool(0.3) {
                format!("v {i}/é")
            } else {
                format!("v{i}")
            })
            .unwrap()
        })
        .collect();
    let mut b = PropertyGraphBuilder::new();
    for v in &vertices {
        b.vertex(v.clone());
        let n = rng.gen_range(0..3);
        for key in keys.choose_multiple(rng, n) {
            b.vertex_property(v, Property::new(*key, random_value(rng)));
        }
    }
    if !vertices.is_empty() {
        let mut used = BTreeSet::new();
        for i in 0..rng.gen_range(0..12) {
            let src = vertices.choose(rng).unwrap().clone();
            let tgt = vertices.choose(rng).unwrap().clone();
            let label = *labels.choose(rng).unwrap();
            if !used.insert((src.clone(), tgt.clone(), label)) {
                continue;
            }
            let e = EdgeId::new(format!("e{i}")).unwrap();
            b.edge(e.clone(), src, tgt, label);
            let n = rng.gen_range(0..3);
            for key in keys.choose_multiple(rng, n) {
                b.edge_property(&e, Property::new(*key, random_value(rng)));
            }
        }
    }
    b.build().unwrap()
}
