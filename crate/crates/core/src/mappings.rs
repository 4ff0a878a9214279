//! Mappings between property-graph values/strings and RDF terms:
//! value↔literal, IRI↔string, label/key templates, and vertex identities.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pg_model::{Double, PropertyGraph, PropertyValue, VertexId};
use crate::rdf_model::{BlankNode, Iri, Literal, Subject, TermError};
use crate::vocab;

pub const DEFAULT_PROPERTY_KEY_PREFIX: &str = "http://example.org/property/";
pub const DEFAULT_EDGE_LABEL_PREFIX: &str = "http://example.org/relationship/";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("invalid template prefix: {0}")]
    InvalidPrefix(#[from] TermError),
    #[error("property key prefix {keys:?} and edge label prefix {labels:?} overlap")]
    OverlappingPrefixes { keys: String, labels: String },
    #[error("invalid vertex id strategy {0:?} (expected \"bnode\" or \"iri:<prefix>\")")]
    InvalidVertexStrategy(String),
    #[error("invalid literal mode {0:?} (expected \"strict\" or \"lenient\")")]
    InvalidLiteralMode(String),
}

/// Which literals count as decodable to property values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiteralMode {
    /// Only literals that `vm` itself produces; decoding is exactly invertible.
    Strict,
    /// Any parseable lexical form of the supported datatypes, plus `xsd:decimal`.
    #[default]
    Lenient,
}

impl FromStr for LiteralMode {
    type Err = MappingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(LiteralMode::Strict),
            "lenient" => Ok(LiteralMode::Lenient),
            other => Err(MappingError::InvalidLiteralMode(other.to_owned())),
        }
    }
}

/// The value-to-literal mapping and its inverse.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValueLiteralMapping {
    pub mode: LiteralMode,
}

impl ValueLiteralMapping {
    pub fn new(mode: LiteralMode) -> Self {
        ValueLiteralMapping { mode }
    }

    pub fn to_literal(&self, value: &PropertyValue) -> Literal {
        vm(value)
    }

    pub fn to_value(&self, literal: &Literal) -> Option<PropertyValue> {
        vm_inverse(literal, self.mode)
    }
}

/// Maps a value to its literal. Never produces a language-tagged literal.
pub fn vm(value: &PropertyValue) -> Literal {
    match value {
        PropertyValue::Text(s) => Literal::string(s.clone()),
        PropertyValue::Integer(n) => Literal::with_static_type(n.to_string(), vocab::XSD_INTEGER),
        PropertyValue::Double(d) => Literal::with_static_type(canonical_double(d.get()), vocab::XSD_DOUBLE),
        PropertyValue::Boolean(b) => Literal::with_static_type(b.to_string(), vocab::XSD_BOOLEAN),
    }
}

/// Decodes a literal, or `None` when it is outside the mapping's domain.
pub fn vm_inverse(literal: &Literal, mode: LiteralMode) -> Option<PropertyValue> {
    if literal.language().is_some() {
        return None;
    }
    let lex = literal.lexical_form();
    let value = match literal.datatype().as_str() {
        vocab::XSD_STRING => PropertyValue::Text(lex.to_owned()),
        vocab::XSD_INTEGER => PropertyValue::Integer(parse_integer(lex)?),
        vocab::XSD_DOUBLE => PropertyValue::Double(parse_double(lex)?),
        vocab::XSD_BOOLEAN => PropertyValue::Boolean(parse_boolean(lex)?),
        vocab::XSD_DECIMAL if mode == LiteralMode::Lenient => PropertyValue::Double(parse_decimal(lex)?),
        _ => return None,
    };
    if mode == LiteralMode::Strict && vm(&value).lexical_form() != lex {
        return None;
    }
    Some(value)
}

/// Canonical `xsd:double` form: shortest round-tripping mantissa with one
/// digit before the point and at least one after, then `E` and the exponent
/// (`0.5` → `5.0E-1`, `1928.0` → `1.928E3`).
pub fn canonical_double(d: f64) -> String {
    if d.is_nan() {
        return "NaN".into();
    }
    if d.is_infinite() {
        return if d > 0.0 { "INF".into() } else { "-INF".into() };
    }
    if d == 0.0 {
        return if d.is_sign_negative() {
            "-0.0E0".into()
        } else {
            "0.0E0".into()
        };
    }
    let s = format!("{d:E}");
    let (mantissa, exponent) = s.split_once('E').expect("exponent format");
    if mantissa.contains('.') {
        format!("{mantissa}E{exponent}")
    } else {
        format!("{mantissa}.0E{exponent}")
    }
}

/// `xsd:decimal` rendering of a finite double without exponent, always with
/// a fractional part (`0.5`, `23.0`).
pub fn canonical_decimal(d: f64) -> Option<String> {
    if !d.is_finite() {
        return None;
    }
    let s = format!("{d}");
    Some(if s.contains('.') { s } else { format!("{s}.0") })
}

fn split_sign(lex: &str) -> (&str, &str) {
    match lex.as_bytes().first() {
        Some(b'+') | Some(b'-') => lex.split_at(1),
        _ => ("", lex),
    }
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// `[0-9]+ ('.' [0-9]*)? | '.' [0-9]+`
fn is_unsigned_decimal(s: &str) -> bool {
    match s.split_once('.') {
        None => all_digits(s),
        Some((int, frac)) => {
            (all_digits(int) && (frac.is_empty() || all_digits(frac))) || (int.is_empty() && all_digits(frac))
        }
    }
}

fn parse_integer(lex: &str) -> Option<BigInt> {
    let (_, digits) = split_sign(lex);
    if !all_digits(digits) {
        return None;
    }
    lex.parse().ok()
}

fn parse_decimal(lex: &str) -> Option<Double> {
    let (_, rest) = split_sign(lex);
    if !is_unsigned_decimal(rest) {
        return None;
    }
    lex.parse::<f64>().ok().and_then(Double::new)
}

fn parse_double(lex: &str) -> Option<Double> {
    match lex {
        "INF" | "+INF" => return Double::new(f64::INFINITY),
        "-INF" => return Double::new(f64::NEG_INFINITY),
        _ => {}
    }
    let (_, rest) = split_sign(lex);
    let mantissa = match rest.find(['e', 'E']) {
        Some(pos) => {
            let (_, exp_digits) = split_sign(&rest[pos + 1..]);
            if !all_digits(exp_digits) {
                return None;
            }
            &rest[..pos]
        }
        None => rest,
    };
    if !is_unsigned_decimal(mantissa) {
        return None;
    }
    lex.parse::<f64>().ok().and_then(Double::new)
}

fn parse_boolean(lex: &str) -> Option<bool> {
    match lex {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

/// Renders `value` as a literal of a recorded datatype/language, used when a
/// property graph stores these separately from the value.
///
/// Without a recorded datatype this is [`vm`]. Returns `None` when the
/// combination cannot be expressed.
pub fn literal_for_value(value: &PropertyValue, datatype: Option<&Iri>, language: Option<&str>) -> Option<Literal> {
    if let Some(tag) = language {
        let PropertyValue::Text(s) = value else {
            return None;
        };
        if datatype.is_some_and(|d| d.as_str() != vocab::RDF_LANG_STRING) {
            return None;
        }
        return Literal::lang_string(s.clone(), tag).ok();
    }
    let Some(datatype) = datatype else {
        return Some(vm(value));
    };
    let natural = vm(value);
    if natural.datatype() == datatype {
        return Some(natural);
    }
    match value {
        PropertyValue::Double(d) if datatype.as_str() == vocab::XSD_DECIMAL => {
            canonical_decimal(d.get()).map(|lex| Literal::with_static_type(lex, vocab::XSD_DECIMAL))
        }
        PropertyValue::Text(s) => Literal::typed(s.clone(), datatype.clone()).ok(),
        _ => None,
    }
}

/// IRI-to-string mapping: the IRI text itself.
pub fn im(iri: &Iri) -> String {
    iri.as_str().to_owned()
}

/// Inverse of [`im`]; `None` for text that is not an absolute IRI.
pub fn im_inverse(s: &str) -> Option<Iri> {
    Iri::new(s).ok()
}

/// Every byte outside `A-Z a-z 0-9 - . _ ~` is percent-encoded.
const TEMPLATE_ENCODE_SET: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// Maps text `s` to `prefix + percent-encode(s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateIriMapping {
    prefix: Iri,
}

impl TemplateIriMapping {
    pub fn new(prefix: &str) -> Result<Self, MappingError> {
        Ok(TemplateIriMapping {
            prefix: Iri::new(prefix)?,
        })
    }

    pub fn property_keys() -> Self {
        Self::new(DEFAULT_PROPERTY_KEY_PREFIX).expect("valid default prefix")
    }

    pub fn edge_labels() -> Self {
        Self::new(DEFAULT_EDGE_LABEL_PREFIX).expect("valid default prefix")
    }

    pub fn prefix(&self) -> &str {
        self.prefix.as_str()
    }

    pub fn apply(&self, s: &str) -> Iri {
        let encoded = utf8_percent_encode(s, TEMPLATE_ENCODE_SET).to_string();
        Iri::new_unchecked(format!("{}{}", self.prefix.as_str(), encoded))
    }

    /// Defined only on IRIs this mapping can produce: the prefix must match
    /// and the suffix must be the exact encoding of its decoded text.
    pub fn invert(&self, iri: &Iri) -> Option<String> {
        let suffix = iri.as_str().strip_prefix(self.prefix.as_str())?;
        let decoded = percent_decode_str(suffix).decode_utf8().ok()?.into_owned();
        (utf8_percent_encode(&decoded, TEMPLATE_ENCODE_SET).to_string() == suffix).then_some(decoded)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum VertexIdentityStrategy {
    /// `b1, b2, ...` in vertex-id order.
    #[default]
    FreshBlankNodes,
    /// The vertex id, percent-encoded onto a prefix.
    IriTemplate(TemplateIriMapping),
}

impl FromStr for VertexIdentityStrategy {
    type Err = MappingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "bnode" {
            return Ok(VertexIdentityStrategy::FreshBlankNodes);
        }
        match s.strip_prefix("iri:") {
            Some(prefix) => Ok(VertexIdentityStrategy::IriTemplate(TemplateIriMapping::new(prefix)?)),
            None => Err(MappingError::InvalidVertexStrategy(s.to_owned())),
        }
    }
}

impl fmt::Display for VertexIdentityStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexIdentityStrategy::FreshBlankNodes => f.write_str("bnode"),
            VertexIdentityStrategy::IriTemplate(t) => write!(f, "iri:{}", t.prefix()),
        }
    }
}

/// Builds an injective vertex identity mapping for `graph`.
pub fn assign_vertex_identities(
    strategy: &VertexIdentityStrategy,
    graph: &PropertyGraph,
) -> BTreeMap<VertexId, Subject> {
    graph
        .vertices()
        .enumerate()
        .map(|(i, (v, _))| {
            let term = match strategy {
                VertexIdentityStrategy::FreshBlankNodes => Subject::BlankNode(BlankNode::numbered("b", i + 1)),
                VertexIdentityStrategy::IriTemplate(t) => Subject::Iri(t.apply(v.as_str())),
            };
            (v.clone(), term)
        })
        .collect()
}

/// User-facing mapping configuration, as read from a config file or flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MappingConfig {
    pub property_key_prefix: String,
    pub edge_label_prefix: String,
    pub vertex_id_strategy: String,
    pub literal_mode: LiteralMode,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            property_key_prefix: DEFAULT_PROPERTY_KEY_PREFIX.into(),
            edge_label_prefix: DEFAULT_EDGE_LABEL_PREFIX.into(),
            vertex_id_strategy: "bnode".into(),
            literal_mode: LiteralMode::Lenient,
        }
    }
}

impl MappingConfig {
    pub fn build(&self) -> Result<MappingBundle, MappingError> {
        let keys = TemplateIriMapping::new(&self.property_key_prefix)?;
        let labels = TemplateIriMapping::new(&self.edge_label_prefix)?;
        let (k, l) = (keys.prefix(), labels.prefix());
        if k.starts_with(l) || l.starts_with(k) {
            return Err(MappingError::OverlappingPrefixes {
                keys: k.to_owned(),
                labels: l.to_owned(),
            });
        }
        Ok(MappingBundle {
            values: ValueLiteralMapping::new(self.literal_mode),
            property_keys: keys,
            edge_labels: labels,
            vertex_ids: self.vertex_id_strategy.parse()?,
        })
    }
}

/// Validated mappings used by the transformations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingBundle {
    pub values: ValueLiteralMapping,
    pub property_keys: TemplateIriMapping,
    pub edge_labels: TemplateIriMapping,
    pub vertex_ids: VertexIdentityStrategy,
}

impl Default for MappingBundle {
    fn default() -> Self {
        MappingConfig::default()
            .build()
            .expect("default configuration is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn typed(lex: &str, dt: &'static str) -> Literal {
        Literal::with_static_type(lex, dt)
    }

    #[test]
    fn vm_examples() {
        assert_eq!(vm(&PropertyValue::integer(23)), typed("23", vocab::XSD_INTEGER));
        assert_eq!(vm(&PropertyValue::Boolean(true)), typed("true", vocab::XSD_BOOLEAN));
        assert_eq!(vm(&PropertyValue::text("Alice")), Literal::string("Alice"));
        let half = vm(&PropertyValue::double(0.5));
        assert_eq!(half, typed("5.0E-1", vocab::XSD_DOUBLE));
        assert_eq!(vm_inverse(&half, LiteralMode::Strict), Some(PropertyValue::double(0.5)));
    }

    #[test]
    fn canonical_double_forms() {
        // expected strings worked out by hand from the mantissa/exponent rule
        let cases = [
            (0.5, "5.0E-1"),
            (0.8, "8.0E-1"),
            (1928.0, "1.928E3"),
            (1.0, "1.0E0"),
            (-12.5, "-1.25E1"),
            (0.0, "0.0E0"),
            (-0.0, "-0.0E0"),
            (1e300, "1.0E300"),
            (f64::INFINITY, "INF"),
            (f64::NEG_INFINITY, "-INF"),
        ];
        for (d, s) in cases {
            assert_eq!(canonical_double(d), s, "{d}");
        }
        assert_eq!(canonical_decimal(0.5).unwrap(), "0.5");
        assert_eq!(canonical_decimal(23.0).unwrap(), "23.0");
        assert!(canonical_decimal(f64::INFINITY).is_none());
    }

    #[test]
    fn vm_inverse_examples() {
        let lenient = LiteralMode::Lenient;
        assert_eq!(
            vm_inverse(&Literal::string("Alice"), lenient),
            Some(PropertyValue::text("Alice"))
        );
        assert_eq!(vm_inverse(&Literal::lang_string("chat", "fr").unwrap(), lenient), None);
        let l23 = typed("23", vocab::XSD_INTEGER);
        assert_eq!(vm_inverse(&l23, lenient), Some(PropertyValue::integer(23)));
        assert_eq!(vm(&PropertyValue::integer(23)), l23);
    }

    #[test]
    fn lenient_and_strict_domains() {
        let cases = [
            (
                typed("0.50", vocab::XSD_DECIMAL),
                Some(PropertyValue::double(0.5)),
                None,
            ),
            (typed("0.5", vocab::XSD_DECIMAL), Some(PropertyValue::double(0.5)), None),
            (typed("+007", vocab::XSD_INTEGER), Some(PropertyValue::integer(7)), None),
            (typed("1", vocab::XSD_BOOLEAN), Some(PropertyValue::Boolean(true)), None),
            (typed("0.5", vocab::XSD_DOUBLE), Some(PropertyValue::double(0.5)), None),
            (
                typed("5.0E-1", vocab::XSD_DOUBLE),
                Some(PropertyValue::double(0.5)),
                Some(PropertyValue::double(0.5)),
            ),
            (
                typed("-INF", vocab::XSD_DOUBLE),
                Some(PropertyValue::double(f64::NEG_INFINITY)),
                Some(PropertyValue::double(f64::NEG_INFINITY)),
            ),
            (typed("NaN", vocab::XSD_DOUBLE), None, None),
            (typed("abc", vocab::XSD_INTEGER), None, None),
            (typed("1.", vocab::XSD_DOUBLE), Some(PropertyValue::double(1.0)), None),
            (typed("e5", vocab::XSD_DOUBLE), None, None),
            (typed("inf", vocab::XSD_DOUBLE), None, None),
            (typed("2020-01-01", "http://www.w3.org/2001/XMLSchema#date"), None, None),
        ];
        for (lit, lenient, strict) in cases {
            assert_eq!(vm_inverse(&lit, LiteralMode::Lenient), lenient, "lenient {lit}");
            assert_eq!(vm_inverse(&lit, LiteralMode::Strict), strict, "strict {lit}");
        }
    }

    #[test]
    fn literal_reconstruction_with_recorded_datatype() {
        let dec = Iri::new(vocab::XSD_DECIMAL).unwrap();
        assert_eq!(
            literal_for_value(&PropertyValue::double(0.5), Some(&dec), None),
            Some(typed("0.5", vocab::XSD_DECIMAL))
        );
        assert_eq!(
            literal_for_value(&PropertyValue::text("chat"), None, Some("fr")),
            Some(Literal::lang_string("chat", "fr").unwrap())
        );
        assert_eq!(literal_for_value(&PropertyValue::integer(1), None, Some("fr")), None);
        assert_eq!(literal_for_value(&PropertyValue::integer(1), Some(&dec), None), None);
        let date = Iri::new("http://www.w3.org/2001/XMLSchema#date").unwrap();
        assert_eq!(
            literal_for_value(&PropertyValue::text("2020-01-01"), Some(&date), None),
            Some(Literal::typed("2020-01-01", date).unwrap())
        );
    }

    #[test]
    fn im_examples() {
        let alice = Iri::new("http://example.org/alice").unwrap();
        assert_eq!(im(&alice), "http://example.org/alice");
        assert_eq!(im_inverse(&im(&alice)), Some(alice));
        assert_eq!(im_inverse("not an iri"), None);
        assert_eq!(im_inverse("kind"), None);
    }

    #[test]
    fn template_examples() {
        let km = TemplateIriMapping::property_keys();
        let lm = TemplateIriMapping::edge_labels();
        assert_eq!(km.apply("name").as_str(), "http://example.org/property/name");
        assert_eq!(
            lm.apply("influencedBy").as_str(),
            "http://example.org/relationship/influencedBy"
        );
        let encoded = km.apply("a b/c");
        assert_eq!(encoded.as_str(), "http://example.org/property/a%20b%2Fc");
        assert_eq!(km.invert(&encoded).as_deref(), Some("a b/c"));
        assert_eq!(km.invert(&lm.apply("x")), None);
        // non-canonical encodings are outside the image
        let lower = Iri::new("http://example.org/property/a%2fc").unwrap();
        assert_eq!(km.invert(&lower), None);
        let needless = Iri::new("http://example.org/property/%61").unwrap();
        assert_eq!(km.invert(&needless), None);
        let broken = Iri::new("http://example.org/property/%FF").unwrap();
        assert_eq!(km.invert(&broken), None);
    }

    #[test]
    fn vertex_identities() {
        let g = fixtures::pg_ex();
        let ids = assign_vertex_identities(&VertexIdentityStrategy::FreshBlankNodes, &g);
        assert_eq!(
            ids[&VertexId::new("Kubrick").unwrap()],
            Subject::BlankNode(BlankNode::new("b1").unwrap())
        );
        assert_eq!(
            ids[&VertexId::new("Welles").unwrap()],
            Subject::BlankNode(BlankNode::new("b2").unwrap())
        );
        assert!(assign_vertex_identities(&VertexIdentityStrategy::FreshBlankNodes, &PropertyGraph::new()).is_empty());

        let strategy: VertexIdentityStrategy = "iri:http://example.org/v/".parse().unwrap();
        let mut b = crate::pg_model::PropertyGraphBuilder::new();
        b.vertex(VertexId::new("n 1").unwrap());
        let g = b.build().unwrap();
        let ids = assign_vertex_identities(&strategy, &g);
        assert_eq!(
            ids[&VertexId::new("n 1").unwrap()],
            Subject::Iri(Iri::new("http://example.org/v/n%201").unwrap())
        );
    }

    #[test]
    fn config_validation() {
        let bundle = MappingConfig::default().build().unwrap();
        assert_eq!(bundle.vertex_ids, VertexIdentityStrategy::FreshBlankNodes);
        let overlapping = MappingConfig {
            edge_label_prefix: "http://example.org/property/rel/".into(),
            ..MappingConfig::default()
        };
        assert!(matches!(
            overlapping.build(),
            Err(MappingError::OverlappingPrefixes { .. })
        ));
        let same = MappingConfig {
            edge_label_prefix: DEFAULT_PROPERTY_KEY_PREFIX.into(),
            ..MappingConfig::default()
        };
        assert!(same.build().is_err());
        let bad = MappingConfig {
            vertex_id_strategy: "uuid".into(),
            ..MappingConfig::default()
        };
        assert_eq!(bad.build(), Err(MappingError::InvalidVertexStrategy("uuid".into())));
        let cfg: MappingConfig =
            serde_json::from_str(r#"{"literal_mode":"strict","vertex_id_strategy":"iri:urn:v:"}"#).unwrap();
        let bundle = cfg.build().unwrap();
        assert_eq!(bundle.values.mode, LiteralMode::Strict);
        assert_eq!(bundle.vertex_ids.to_string(), "iri:urn:v:");
    }

    fn arb_value() -> impl Strategy<Value = PropertyValue> {
        prop_oneof![
            any::<String>().prop_map(PropertyValue::Text),
            any::<i64>().prop_map(PropertyValue::integer),
            "[0-9]{20,40}".prop_map(|s| PropertyValue::Integer(s.parse().unwrap())),
            any::<f64>()
                .prop_filter("not NaN", |d| !d.is_nan())
                .prop_map(PropertyValue::double),
            any::<bool>().prop_map(PropertyValue::Boolean),
        ]
    }

    proptest! {
        #[test]
        fn vm_is_invertible(v in arb_value()) {
            let l = vm(&v);
            prop_assert!(l.language().is_none());
            prop_assert_eq!(vm_inverse(&l, LiteralMode::Strict), Some(v.clone()));
            prop_assert_eq!(vm_inverse(&l, LiteralMode::Lenient), Some(v));
        }

        #[test]
        fn strict_domain_is_canonical(lex in "[+-]?[0-9]{1,5}(\\.[0-9]{0,3})?([eE][+-]?[0-9]{1,2})?", dt in 0usize..4) {
            let dt = [vocab::XSD_INTEGER, vocab::XSD_DOUBLE, vocab::XSD_BOOLEAN, vocab::XSD_DECIMAL][dt];
            let l = typed(&lex, dt);
            if let Some(v) = vm_inverse(&l, LiteralMode::Strict) {
                prop_assert_eq!(vm(&v), l);
            }
        }

        #[test]
        fn template_round_trip(s in any::<String>()) {
            let km = TemplateIriMapping::property_keys();
            prop_assert_eq!(km.invert(&km.apply(&s)), Some(s));
        }
    }
}
