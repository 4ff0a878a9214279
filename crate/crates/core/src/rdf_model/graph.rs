use std::collections::{btree_set, BTreeSet};

use super::term::{Term, Triple};

/// A finite set of RDF-star triples. Iteration follows the crate-wide
/// deterministic term order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RdfStarGraph {
    triples: BTreeSet<Triple>,
}

impl RdfStarGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` if an equal triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Triple> {
        self.triples.iter()
    }

    pub fn as_set(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn union(&self, other: &RdfStarGraph) -> RdfStarGraph {
        self.triples.union(&other.triples).cloned().collect()
    }

    /// Every term and embedded triple mentioned by the graph's triples.
    pub fn terms_plus(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            t.collect_terms_plus(&mut out);
        }
        out
    }

    /// Triples embedded (at any depth) in the graph's triples.
    pub fn trefs(&self) -> BTreeSet<Triple> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            t.for_each_embedded(&mut |e| {
                out.insert(e.clone());
            });
        }
        out
    }

    /// Top-level metadata triples.
    pub fn meta(&self) -> BTreeSet<Triple> {
        self.triples.iter().filter(|t| t.is_metadata()).cloned().collect()
    }

    /// `(G ∪ trefs(G)) \ meta(G)`.
    ///
    /// For graphs with nesting deeper than one this also contains embedded
    /// metadata triples, exactly as the set formula says.
    pub fn ord(&self) -> BTreeSet<Triple> {
        let mut out = self.trefs();
        out.extend(self.triples.iter().cloned());
        out.retain(|t| !(self.triples.contains(t) && t.is_metadata()));
        out
    }

    /// Triples that also occur embedded inside another triple of the graph.
    ///
    /// A triple never occurs inside itself, so this is `G ∩ trefs(G)`.
    pub fn find_redundant(&self) -> BTreeSet<Triple> {
        let trefs = self.trefs();
        self.triples.intersection(&trefs).cloned().collect()
    }

    pub fn is_minimal(&self) -> bool {
        self.find_redundant().is_empty()
    }

    /// Drops redundant triples. Removing top-level triples never changes
    /// `trefs`, so one pass reaches a minimal graph.
    pub fn minimize(&self) -> RdfStarGraph {
        let redundant = self.find_redundant();
        self.triples.difference(&redundant).cloned().collect()
    }
}

impl FromIterator<Triple> for RdfStarGraph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        RdfStarGraph {
            triples: iter.into_iter().collect(),
        }
    }
}

impl Extend<Triple> for RdfStarGraph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter)
    }
}

impl IntoIterator for RdfStarGraph {
    type Item = Triple;
    type IntoIter = btree_set::IntoIter<Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.into_iter()
    }
}

impl<'a> IntoIterator for &'a RdfStarGraph {
    type Item = &'a Triple;
    type IntoIter = btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}
