//! Canonical blank-node relabeling and isomorphism of RDF-star graphs.
//!
//! Colour refinement over blank nodes, then individualisation of the first
//! non-singleton cell with an exhaustive search for the smallest relabelled
//! graph. Branches that differ by a swap of two interchangeable blank nodes
//! are pruned. The result depends only on the graph up to blank-node renaming.

use std::collections::{BTreeMap, HashMap};

use super::graph::RdfStarGraph;
use super::term::{BlankNode, Object, Subject, Triple};

/// Relabels the blank nodes of `g` to `b1, b2, ...` such that isomorphic
/// graphs produce identical output. Labels follow first appearance in the
/// deterministic triple order of the result.
pub fn canonicalize(g: &RdfStarGraph) -> RdfStarGraph {
    let c = Canonicalizer::new(g);
    if c.nodes.is_empty() {
        return g.clone();
    }
    let best = c.search(vec![0; c.nodes.len()]);
    renumber_by_appearance(&best)
}

/// True iff the graphs are equal up to a bijective renaming of blank nodes.
pub fn is_isomorphic(a: &RdfStarGraph, b: &RdfStarGraph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    canonicalize(a) == canonicalize(b)
}

/// Applies `map` to every blank node; unmapped nodes keep their label.
pub fn relabel_blank_nodes(g: &RdfStarGraph, map: &BTreeMap<BlankNode, BlankNode>) -> RdfStarGraph {
    g.iter()
        .map(|t| t.map_blank_nodes(&mut |b| map.get(b).cloned().unwrap_or_else(|| b.clone())))
        .collect()
}

/// Blank nodes in order of first appearance (subject before object, depth first).
pub fn blank_nodes_in_order(g: &RdfStarGraph) -> Vec<BlankNode> {
    let mut seen = BTreeMap::new();
    let mut order = Vec::new();
    for t in g {
        t.for_each_blank_node(&mut |b| {
            if seen.insert(b.clone(), ()).is_none() {
                order.push(b.clone());
            }
        });
    }
    order
}

fn renumber_by_appearance(g: &RdfStarGraph) -> RdfStarGraph {
    let map: BTreeMap<BlankNode, BlankNode> = blank_nodes_in_order(g)
        .into_iter()
        .enumerate()
        .map(|(i, b)| (b, BlankNode::numbered("b", i + 1)))
        .collect();
    relabel_blank_nodes(g, &map)
}

enum Segment {
    Text(String),
    Node(usize),
}

struct Canonicalizer<'a> {
    graph: &'a RdfStarGraph,
    triples: Vec<&'a Triple>,
    templates: Vec<Vec<Segment>>,
    nodes: Vec<BlankNode>,
    /// triple indices mentioning each node
    occurrences: Vec<Vec<usize>>,
}

impl<'a> Canonicalizer<'a> {
    fn new(graph: &'a RdfStarGraph) -> Self {
        let mut index: HashMap<BlankNode, usize> = HashMap::new();
        let mut nodes = Vec::new();
        for t in graph {
            t.for_each_blank_node(&mut |b| {
                if !index.contains_key(b) {
                    index.insert(b.clone(), nodes.len());
                    nodes.push(b.clone());
                }
            });
        }
        let triples: Vec<&Triple> = graph.iter().collect();
        let mut occurrences = vec![Vec::new(); nodes.len()];
        let mut templates = Vec::with_capacity(triples.len());
        for (ti, t) in triples.iter().enumerate() {
            let mut segs = Vec::new();
            let mut text = String::new();
            template_triple(t, &index, &mut segs, &mut text);
            if !text.is_empty() {
                segs.push(Segment::Text(text));
            }
            for seg in &segs {
                if let Segment::Node(n) = seg {
                    if occurrences[*n].last() != Some(&ti) {
                        occurrences[*n].push(ti);
                    }
                }
            }
            templates.push(segs);
        }
        Canonicalizer {
            graph,
            triples,
            templates,
            nodes,
            occurrences,
        }
    }

    fn render(&self, triple: usize, me: usize, colors: &[usize]) -> String {
        let mut out = String::new();
        for seg in &self.templates[triple] {
            match seg {
                Segment::Text(s) => out.push_str(s),
                Segment::Node(n) if *n == me => out.push('@'),
                Segment::Node(n) => {
                    out.push('#');
                    out.push_str(&colors[*n].to_string());
                }
            }
        }
        out
    }

    /// Splits colour classes until stable. New colours are ranks, ordered
    /// first by the old colour so the order of existing classes is kept.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut classes = distinct(&colors);
        loop {
            let sigs: Vec<(usize, Vec<String>)> = (0..self.nodes.len())
                .map(|i| {
                    let mut parts: Vec<String> = self.occurrences[i]
                        .iter()
                        .map(|&t| self.render(t, i, &colors))
                        .collect();
                    parts.sort();
                    (colors[i], parts)
                })
                .collect();
            let mut sorted: Vec<&(usize, Vec<String>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            let next: Vec<usize> = sigs
                .iter()
                .map(|s| sorted.binary_search(&s).expect("signature present"))
                .collect();
            let next_classes = distinct(&next);
            colors = next;
            if next_classes == classes {
                return colors;
            }
            classes = next_classes;
        }
    }

    fn search(&self, colors: Vec<usize>) -> RdfStarGraph {
        let colors = self.refine(colors);
        let n = self.nodes.len();
        if distinct(&colors) == n {
            return self.leaf(&colors);
        }
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in &colors {
            *counts.entry(c).or_default() += 1;
        }
        let target = *counts
            .iter()
            .find(|(_, &k)| k > 1)
            .map(|(c, _)| c)
            .expect("non-discrete colouring has a non-singleton cell");
        let cell: Vec<usize> = (0..n).filter(|&i| colors[i] == target).collect();

        let mut best: Option<RdfStarGraph> = None;
        let mut explored: Vec<usize> = Vec::new();
        for &m in &cell {
            if explored.iter().any(|&e| self.swap_is_automorphism(e, m)) {
                continue;
            }
            let individualized: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(i, &c)| if i == m { 2 * c } else { 2 * c + 1 })
                .collect();
            let candidate = self.search(individualized);
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
            explored.push(m);
        }
        best.expect("cell is non-empty")
    }

    /// Whether exchanging nodes `a` and `b` maps the graph onto itself. Only
    /// triples mentioning either node can change.
    fn swap_is_automorphism(&self, a: usize, b: usize) -> bool {
        let (na, nb) = (&self.nodes[a], &self.nodes[b]);
        self.occurrences[a].iter().chain(&self.occurrences[b]).all(|&ti| {
            let swapped = self.triples[ti].map_blank_nodes(&mut |x| {
                if x == na {
                    nb.clone()
                } else if x == nb {
                    na.clone()
                } else {
                    x.clone()
                }
            });
            self.graph.contains(&swapped)
        })
    }

    fn leaf(&self, colors: &[usize]) -> RdfStarGraph {
        let map: BTreeMap<BlankNode, BlankNode> = self
            .nodes
            .iter()
            .zip(colors)
            .map(|(b, &c)| (b.clone(), BlankNode::numbered("c", c)))
            .collect();
        relabel_blank_nodes(self.graph, &map)
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn template_triple(t: &Triple, index: &HashMap<BlankNode, usize>, segs: &mut Vec<Segment>, text: &mut String) {
    text.push_str("<<");
    match &t.subject {
        Subject::Iri(i) => text.push_str(&i.to_string()),
        Subject::BlankNode(b) => push_node(index[b], segs, text),
        Subject::Triple(inner) => template_triple(inner, index, segs, text),
    }
    text.push(' ');
    text.push_str(&t.predicate.to_string());
    text.push(' ');
    match &t.object {
        Object::Iri(i) => text.push_str(&i.to_string()),
        Object::BlankNode(b) => push_node(index[b], segs, text),
        Object::Literal(l) => text.push_str(&l.to_string()),
        Object::Triple(inner) => template_triple(inner, index, segs, text),
    }
    text.push_str(">>");
}

fn push_node(n: usize, segs: &mut Vec<Segment>, text: &mut String) {
    if !text.is_empty() {
        segs.push(Segment::Text(std::mem::take(text)));
    }
    segs.push(Segment::Node(n));
}
