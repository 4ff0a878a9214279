//! PG-JSON: the JSON exchange format for property graphs.
//!
//! ```json
//! {"vertices":[{"id":"v1","properties":[{"key":"name","value":{"type":"string","value":"Alice"}}]}],
//!  "edges":[{"id":"e1","src":"v1","tgt":"v1","label":"knows","properties":[]}]}
//! ```
//!
//! Values carry an explicit type tag. Integers outside ±(2^53 − 1) are
//! written as decimal strings, infinite doubles as `"INF"`/`"-INF"`.

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::pg_model::{
    Double, EdgeId, PgError, Property, PropertyGraph, PropertyGraphBuilder, PropertyValue, VertexId,
};

const MAX_SAFE_INTEGER: i64 = (1 << 53) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgIoError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Graph(#[from] PgError),
}

fn schema<T>(path: &str, message: impl Into<String>) -> Result<T, PgIoError> {
    Err(PgIoError::Schema {
        path: path.to_owned(),
        message: message.into(),
    })
}

#[derive(Serialize)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize)]
struct VertexDoc {
    id: String,
    properties: Vec<PropertyDoc>,
}

#[derive(Serialize)]
struct EdgeDoc {
    id: String,
    src: String,
    tgt: String,
    label: String,
    properties: Vec<PropertyDoc>,
}

#[derive(Serialize)]
struct PropertyDoc {
    key: String,
    value: ValueDoc,
}

#[derive(Serialize)]
struct ValueDoc {
    #[serde(rename = "type")]
    kind: &'static str,
    value: Value,
}

fn encode_value(v: &PropertyValue) -> ValueDoc {
    let value = match v {
        PropertyValue::Text(s) => Value::String(s.clone()),
        PropertyValue::Boolean(b) => Value::Bool(*b),
        PropertyValue::Integer(n) => match i64::try_from(n) {
            Ok(small) if small.abs() <= MAX_SAFE_INTEGER => Value::from(small),
            _ => Value::String(n.to_string()),
        },
        PropertyValue::Double(d) => {
            let d = d.get();
            if d.is_infinite() {
                Value::String(if d > 0.0 { "INF" } else { "-INF" }.into())
            } else {
                Value::from(d)
            }
        }
    };
    ValueDoc {
        kind: v.type_name(),
        value,
    }
}

fn encode_properties<'a>(props: impl IntoIterator<Item = &'a Property>) -> Vec<PropertyDoc> {
    props
        .into_iter()
        .map(|p| PropertyDoc {
            key: p.key.clone(),
            value: encode_value(&p.value),
        })
        .collect()
}

/// Compact, deterministic output: elements sorted by id, properties by
/// (key, value).
pub fn serialize_pg_json(g: &PropertyGraph) -> String {
    let doc = GraphDoc {
        vertices: g
            .vertices()
            .map(|(id, props)| VertexDoc {
                id: id.as_str().to_owned(),
                properties: encode_properties(props),
            })
            .collect(),
        edges: g
            .edges()
            .map(|(id, e)| EdgeDoc {
                id: id.as_str().to_owned(),
                src: e.src.as_str().to_owned(),
                tgt: e.tgt.as_str().to_owned(),
                label: e.label.clone(),
                properties: encode_properties(&e.properties),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn parse_pg_json(text: &str) -> Result<PropertyGraph, PgIoError> {
    let root: Value = serde_json::from_str(text).map_err(|e| PgIoError::Json(e.to_string()))?;
    let root = object(&root, "$", &["vertices", "edges"])?;
    let mut b = PropertyGraphBuilder::new();
    for (i, v) in array(root.get("vertices"), "$.vertices")?.iter().enumerate() {
        let path = format!("$.vertices[{i}]");
        let obj = object(v, &path, &["id", "properties"])?;
        let id = VertexId::new(string(obj.get("id"), &format!("{path}.id"))?)?;
        b.vertex(id.clone());
        for p in properties(obj.get("properties"), &path)? {
            b.vertex_property(&id, p);
        }
    }
    for (i, e) in array(root.get("edges"), "$.edges")?.iter().enumerate() {
        let path = format!("$.edges[{i}]");
        let obj = object(e, &path, &["id", "src", "tgt", "label", "properties"])?;
        let field = |name: &str| string(obj.get(name), &format!("{path}.{name}"));
        let id = EdgeId::new(field("id")?)?;
        let src = VertexId::new(field("src")?)?;
        let tgt = VertexId::new(field("tgt")?)?;
        b.edge(id.clone(), src, tgt, field("label")?);
        for p in properties(obj.get("properties"), &path)? {
            b.edge_property(&id, p);
        }
    }
    Ok(b.build()?)
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>, PgIoError> {
    let Value::Object(map) = v else {
        return schema(path, "expected an object");
    };
    if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return schema(path, format!("unexpected field {k:?}"));
    }
    Ok(map)
}

fn array<'a>(v: Option<&'a Value>, path: &str) -> Result<&'a [Value], PgIoError> {
    match v {
        Some(Value::Array(items)) => Ok(items),
        Some(_) => schema(path, "expected an array"),
        None => schema(path, "missing field"),
    }
}

fn string(v: Option<&Value>, path: &str) -> Result<String, PgIoError> {
    match v {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => schema(path, "expected a string"),
        None => schema(path, "missing field"),
    }
}

/// A missing `properties` field means no properties.
fn properties(v: Option<&Value>, parent: &str) -> Result<Vec<Property>, PgIoError> {
    let path = format!("{parent}.properties");
    let Some(v) = v else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for (i, p) in array(Some(v), &path)?.iter().enumerate() {
        let path = format!("{path}[{i}]");
        let obj = object(p, &path, &["key", "value"])?;
        let key = string(obj.get("key"), &format!("{path}.key"))?;
        let value = typed_value(obj.get("value"), &format!("{path}.value"))?;
        out.push(Property::new(key, value));
    }
    Ok(out)
}

fn typed_value(v: Option<&Value>, path: &str) -> Result<PropertyValue, PgIoError> {
    let Some(v) = v else {
        return schema(path, "missing field");
    };
    let obj = object(v, path, &["type", "value"])?;
    let kind = string(obj.get("type"), &format!("{path}.type"))?;
    let value_path = format!("{path}.value");
    let Some(raw) = obj.get("value") else {
        return schema(&value_path, "missing field");
    };
    match (kind.as_str(), raw) {
        ("string", Value::String(s)) => Ok(PropertyValue::Text(s.clone())),
        ("boolean", Value::Bool(b)) => Ok(PropertyValue::Boolean(*b)),
        ("integer", Value::Number(n)) if n.is_i64() || n.is_u64() => Ok(PropertyValue::Integer(
            n.to_string().parse::<BigInt>().expect("integral JSON number"),
        )),
        ("integer", Value::String(s)) => {
            let digits = s.strip_prefix('-').unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return schema(&value_path, format!("{s:?} is not a decimal integer"));
            }
            Ok(PropertyValue::Integer(s.parse().expect("checked digits")))
        }
        ("double", Value::Number(n)) => {
            let d = n.as_f64().expect("JSON numbers convert to f64");
            Ok(PropertyValue::Double(Double::new(d).expect("JSON numbers are not NaN")))
        }
        ("double", Value::String(s)) if s == "INF" => Ok(PropertyValue::double(f64::INFINITY)),
        ("double", Value::String(s)) if s == "-INF" => Ok(PropertyValue::double(f64::NEG_INFINITY)),
        ("string" | "boolean" | "integer" | "double", other) => {
            schema(&value_path, format!("{other} is not a valid {kind} value"))
        }
        _ => schema(&format!("{path}.type"), format!("unknown value type {kind:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn example_graph_round_trip() {
        let g = fixtures::pg_ex();
        let text = serialize_pg_json(&g);
        assert_eq!(parse_pg_json(&text).unwrap(), g);
        assert!(
            text.contains(r#"{"key":"certainty","value":{"type":"double","value":0.8}}"#),
            "{text}"
        );
        assert!(
            text.contains(r#"{"key":"birthyear","value":{"type":"integer","value":1928}}"#),
            "{text}"
        );
        assert!(text.starts_with(r#"{"vertices":[{"id":"Kubrick""#), "{text}");
    }

    #[test]
    fn empty_graph() {
        assert_eq!(
            serialize_pg_json(&PropertyGraph::new()),
            r#"{"vertices":[],"edges":[]}"#
        );
        assert!(parse_pg_json(r#"{"vertices":[],"edges":[]}"#).unwrap().is_empty());
    }

    #[test]
    fn value_types_are_preserved() {
        let text = r#"{"vertices":[{"id":"a","properties":[
            {"key":"i","value":{"type":"integer","value":1}},
            {"key":"d","value":{"type":"double","value":1.0}},
            {"key":"big","value":{"type":"integer","value":"123456789012345678901234567890"}},
            {"key":"inf","value":{"type":"double","value":"-INF"}}]}],"edges":[]}"#;
        let g = parse_pg_json(text).unwrap();
        let props = g.vertex_properties(&VertexId::new("a").unwrap()).unwrap();
        assert!(props.contains(&Property::new("i", PropertyValue::integer(1))));
        assert!(props.contains(&Property::new("d", PropertyValue::double(1.0))));
        assert!(props.contains(&Property::new("inf", PropertyValue::double(f64::NEG_INFINITY))));
        let out = serialize_pg_json(&g);
        assert!(out.contains(r#""value":"123456789012345678901234567890""#));
        assert!(out.contains(r#"{"type":"double","value":1.0}"#));
        assert_eq!(parse_pg_json(&out).unwrap(), g);
    }

    #[test]
    fn schema_and_graph_errors() {
        let dangling = r#"{"vertices":[{"id":"a"}],"edges":[{"id":"e","src":"a","tgt":"zz","label":"l"}]}"#;
        assert!(matches!(
            parse_pg_json(dangling),
            Err(PgIoError::Graph(PgError::DanglingEdge { .. }))
        ));
        let cases = [
            (r#"[]"#, "$"),
            (r#"{"vertices":[]}"#, "$.edges"),
            (r#"{"vertices":[{"id":1}],"edges":[]}"#, "$.vertices[0].id"),
            (
                r#"{"vertices":[{"id":"a","colour":"red"}],"edges":[]}"#,
                "$.vertices[0]",
            ),
            (
                r#"{"vertices":[{"id":"a","properties":[{"key":"k","value":{"type":"integer","value":1.5}}]}],"edges":[]}"#,
                "$.vertices[0].properties[0].value.value",
            ),
            (
                r#"{"vertices":[{"id":"a","properties":[{"key":"k","value":{"type":"date","value":"x"}}]}],"edges":[]}"#,
                "$.vertices[0].properties[0].value.type",
            ),
            (
                r#"{"vertices":[],"edges":[{"id":"e","src":"a","label":"l"}]}"#,
                "$.edges[0].tgt",
            ),
        ];
        for (text, expected) in cases {
            match parse_pg_json(text) {
                Err(PgIoError::Schema { path, .. }) => assert_eq!(path, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(parse_pg_json("{"), Err(PgIoError::Json(_))));
        let dup = r#"{"vertices":[{"id":"a"},{"id":"a"}],"edges":[]}"#;
        assert!(matches!(
            parse_pg_json(dup),
            Err(PgIoError::Graph(PgError::DuplicateId(_)))
        ));
    }

    fn arb_value() -> impl Strategy<Value = PropertyValue> {
        prop_oneof![
            any::<String>().prop_map(PropertyValue::Text),
            any::<i64>().prop_map(PropertyValue::integer),
            any::<u128>().prop_map(PropertyValue::integer),
            any::<f64>()
                .prop_filter("not NaN", |d| !d.is_nan())
                .prop_map(PropertyValue::double),
            any::<bool>().prop_map(PropertyValue::Boolean),
        ]
    }

    fn arb_graph() -> impl Strategy<Value = PropertyGraph> {
        let props = || prop::collection::vec(("[a-c]", arb_value()), 0..3);
        (
            prop::collection::vec(props(), 1..5),
            prop::collection::vec((0usize..5, 0usize..5, "[xy]", props()), 0..6),
        )
            .prop_map(|(vs, es)| {
                let mut b = PropertyGraphBuilder::new();
                let ids: Vec<VertexId> = (0..vs.len()).map(|i| VertexId::new(format!("n{i}")).unwrap()).collect();
                for (id, ps) in ids.iter().zip(vs) {
                    b.vertex(id.clone());
                    for (k, v) in ps {
                        b.vertex_property(id, Property::new(k, v));
                    }
                }
                for (i, (s, t, l, ps)) in es.into_iter().enumerate() {
                    let e = EdgeId::new(format!("e{i}")).unwrap();
                    b.edge(e.clone(), ids[s % ids.len()].clone(), ids[t % ids.len()].clone(), l);
                    for (k, v) in ps {
                        b.edge_property(&e, Property::new(k, v));
                    }
                }
                b.build().unwrap()
            })
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(g in arb_graph()) {
            let text = serialize_pg_json(&g);
            prop_assert_eq!(parse_pg_json(&text).unwrap(), g);
        }
    }
}
