//! The RDF-star data model: terms, possibly nested triples, graphs, the
//! ordinary/metadata split, minimality, and blank-node canonicalisation.

mod canon;
mod graph;
mod term;

pub use canon::{blank_nodes_in_order, canonicalize, is_isomorphic, relabel_blank_nodes};
pub use graph::RdfStarGraph;
pub(crate) use term::escape_string;
pub use term::{is_language_tag, BlankNode, Iri, Literal, Object, Subject, Term, TermError, Triple};
