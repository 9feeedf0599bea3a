//! Label-frequency pruning, dictionary coding and the initial 1-edge
//! embedding maps.
//!
//! Vertices with infrequent labels are dropped first, together with their
//! incident edges. Edge-label frequencies are then counted on what remains,
//! so an edge label can become infrequent only because of the first step.
//! Frequencies count graphs, not occurrences.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::canonical::{DfsCode, Extension, Mode};
use crate::embedding::{EmbeddingMap, KeyCodec, PatternKey, Shape};
use crate::error::{Error, Result};
use crate::graph::{encode_graph, EncodedGraph, GraphCollection, LabeledGraph};

/// Bijective label ↔ integer mapping with dense integers from 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    to_int: HashMap<String, u32>,
    to_str: Vec<String>,
}

impl Dictionary {
    /// Assigns integers in the given order. Duplicates keep their first slot.
    pub fn from_ordered(labels: Vec<String>) -> Self {
        let mut dict = Dictionary::default();
        for label in labels {
            if !dict.to_int.contains_key(&label) {
                dict.to_int.insert(label.clone(), dict.to_str.len() as u32);
                dict.to_str.push(label);
            }
        }
        dict
    }

    /// Labels with frequency ≥ `min_frequency`, ordered by descending
    /// frequency and then by string.
    pub fn from_frequencies(frequencies: &BTreeMap<String, usize>, min_frequency: usize) -> Self {
        let mut kept: Vec<(&String, usize)> = frequencies
            .iter()
            .filter(|(_, &n)| n >= min_frequency)
            .map(|(l, &n)| (l, n))
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Dictionary::from_ordered(kept.into_iter().map(|(l, _)| l.clone()).collect())
    }

    pub fn encode(&self, label: &str) -> Result<u32> {
        self.to_int
            .get(label)
            .copied()
            .ok_or_else(|| Error::DictionaryMiss(label.to_string()))
    }

    pub fn decode(&self, id: u32) -> Result<&str> {
        self.to_str
            .get(id as usize)
            .map(String::as_str)
            .ok_or(Error::UnknownLabelId(id))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.to_int.contains_key(label)
    }

    pub fn len(&self) -> usize {
        self.to_str.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_str.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.to_str
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelKind {
    Vertex,
    Edge,
}

/// Number of graphs containing at least one element with each label.
pub fn label_frequencies(collection: &GraphCollection, kind: LabelKind) -> BTreeMap<String, usize> {
    count_labels(collection.graphs.iter(), kind)
}

fn count_labels<'a>(
    graphs: impl Iterator<Item = &'a LabeledGraph>,
    kind: LabelKind,
) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for g in graphs {
        let labels: BTreeSet<&str> = match kind {
            LabelKind::Vertex => g.vertices.iter().map(|v| v.label.as_str()).collect(),
            LabelKind::Edge => g.edges.iter().map(|e| e.label.as_str()).collect(),
        };
        for label in labels {
            *counts.entry(label.to_string()).or_insert(0) += 1;
        }
    }
    counts
}

/// The pruned graphs together with their vertex and edge dictionaries.
pub fn prune(collection: &GraphCollection, min_frequency: usize) -> (Vec<LabeledGraph>, Dictionary, Dictionary) {
    let vertex_dict = Dictionary::from_frequencies(
        &label_frequencies(collection, LabelKind::Vertex),
        min_frequency,
    );
    let without_vertices: Vec<LabeledGraph> = collection
        .graphs
        .iter()
        .map(|g| {
            let kept: HashSet<u64> = g
                .vertices
                .iter()
                .filter(|v| vertex_dict.contains(&v.label))
                .map(|v| v.id)
                .collect();
            LabeledGraph {
                id: g.id,
                vertices: g
                    .vertices
                    .iter()
                    .filter(|v| kept.contains(&v.id))
                    .cloned()
                    .collect(),
                edges: g
                    .edges
                    .iter()
                    .filter(|e| kept.contains(&e.source) && kept.contains(&e.target))
                    .cloned()
                    .collect(),
            }
        })
        .collect();
    let edge_dict = Dictionary::from_frequencies(
        &count_labels(without_vertices.iter(), LabelKind::Edge),
        min_frequency,
    );
    let pruned = without_vertices
        .into_iter()
        .map(|mut g| {
            g.edges.retain(|e| edge_dict.contains(&e.label));
            g
        })
        .collect();
    (pruned, vertex_dict, edge_dict)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreprocessedGraph {
    pub graph: EncodedGraph,
    pub embeddings: EmbeddingMap,
}

#[derive(Clone, Debug)]
pub struct PreprocessedCollection {
    pub graphs: Vec<PreprocessedGraph>,
    pub vertex_dict: Dictionary,
    pub edge_dict: Dictionary,
    pub mode: Mode,
    /// Size of the collection before empty graphs were dropped.
    pub input_graph_count: usize,
}

pub fn preprocess(collection: &GraphCollection, min_frequency: usize, mode: Mode) -> Result<PreprocessedCollection> {
    preprocess_with(collection, min_frequency, mode, &KeyCodec::plain())
}

pub fn preprocess_with(
    collection: &GraphCollection,
    min_frequency: usize,
    mode: Mode,
    codec: &KeyCodec,
) -> Result<PreprocessedCollection> {
    if min_frequency < 1 {
        return Err(Error::param("minimum frequency must be at least 1"));
    }
    let (pruned, vertex_dict, edge_dict) = prune(collection, min_frequency);
    let mut graphs = Vec::with_capacity(pruned.len());
    for g in &pruned {
        if g.edges.is_empty() {
            continue;
        }
        let encoded = encode_graph(g, &vertex_dict, &edge_dict, mode)?;
        let embeddings = initial_embeddings(&encoded, mode, codec)?;
        graphs.push(PreprocessedGraph {
            graph: encoded,
            embeddings,
        });
    }
    Ok(PreprocessedCollection {
        graphs,
        vertex_dict,
        edge_dict,
        mode,
        input_graph_count: collection.len(),
    })
}

/// One embedding per edge under its 1-edge minimum code; two for an
/// undirected non-loop edge whose endpoints share a label.
pub fn initial_embeddings(graph: &EncodedGraph, mode: Mode, codec: &KeyCodec) -> Result<EmbeddingMap> {
    let mut grouped: HashMap<Vec<u32>, (Shape, Vec<u32>)> = HashMap::new();
    for (index, edge) in graph.edges().enumerate() {
        let ext: Extension = edge.branch().0;
        let code = DfsCode::from_extensions(vec![ext]);
        let shape = Shape::of(&code);
        let slot = &mut grouped.entry(code.to_flat()).or_insert_with(|| (shape, Vec::new())).1;
        let edge_id = index as u32;
        if edge.is_loop() {
            slot.extend_from_slice(&[edge.start, edge_id]);
        } else {
            slot.extend_from_slice(&[edge.start, edge.end, edge_id]);
            if mode == Mode::Undirected && edge.start_label == edge.end_label {
                slot.extend_from_slice(&[edge.end, edge.start, edge_id]);
            }
        }
    }
    let entries = grouped
        .into_iter()
        .map(|(flat, (shape, data))| Ok((codec.encode_flat(flat)?, shape, data)))
        .collect::<Result<Vec<(PatternKey, Shape, Vec<u32>)>>>()?;
    Ok(EmbeddingMap::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_tlf;

    const PENDANT_PAIR: &str = "t # 1\nv 1 A\nv 2 A\nv 3 A\nv 4 B\ne 1 2 a\ne 2 3 a\ne 3 1 a\ne 2 4 b\n\
                            t # 2\nv 1 A\nv 2 A\nv 3 A\nv 4 B\ne 1 2 a\ne 2 3 a\ne 3 1 a\ne 3 4 b\n";

    #[test]
    fn counts_graphs_not_occurrences() {
        let c = parse_tlf("t # 0\nv 0 X\nv 1 X\nv 2 X\n").unwrap();
        let f = label_frequencies(&c, LabelKind::Vertex);
        assert_eq!(f.get("X"), Some(&1));
        assert!(label_frequencies(&GraphCollection::default(), LabelKind::Edge).is_empty());
    }

    #[test]
    fn pendant_pair_label_counts() {
        let c = parse_tlf(PENDANT_PAIR).unwrap();
        let v = label_frequencies(&c, LabelKind::Vertex);
        let e = label_frequencies(&c, LabelKind::Edge);
        assert_eq!(v, BTreeMap::from([("A".into(), 2), ("B".into(), 2)]));
        assert_eq!(e, BTreeMap::from([("a".into(), 2), ("b".into(), 2)]));
    }

    #[test]
    fn dictionary_order_is_frequency_then_string() {
        let f = BTreeMap::from([("z".to_string(), 3), ("b".to_string(), 1), ("a".to_string(), 1), ("m".to_string(), 3)]);
        let d = Dictionary::from_frequencies(&f, 1);
        assert_eq!(d.labels(), &["m", "z", "a", "b"]);
        assert_eq!(d.encode("a").unwrap(), 2);
        assert_eq!(d.decode(0).unwrap(), "m");
        assert!(d.decode(9).is_err());
        assert_eq!(Dictionary::from_frequencies(&f, 2).len(), 2);
    }

    #[test]
    fn rejects_zero_frequency() {
        assert!(matches!(
            preprocess(&GraphCollection::default(), 0, Mode::Directed),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn min_frequency_one_prunes_nothing() {
        let c = parse_tlf(PENDANT_PAIR).unwrap();
        let p = preprocess(&c, 1, Mode::Directed).unwrap();
        assert_eq!(p.graphs.len(), 2);
        assert!(p.graphs.iter().all(|g| g.graph.edge_count() == 4));
    }

    #[test]
    fn pruning_cascades_from_vertices_to_edges() {
        // graph 0: C -b-> A plus A -a-> A, graph 1: A -b-> A plus A -a-> A
        let text = "t # 0\nv 0 C\nv 1 A\nv 2 A\ne 0 1 b\ne 1 2 a\n\
                    t # 1\nv 0 A\nv 1 A\ne 0 1 b\ne 0 1 a\n";
        let c = parse_tlf(text).unwrap();
        assert_eq!(label_frequencies(&c, LabelKind::Edge).get("b"), Some(&2));
        let (pruned, vd, ed) = prune(&c, 2);
        assert!(!vd.contains("C"));
        assert!(!ed.contains("b"));
        assert_eq!(pruned[0].vertices.len(), 2);
        assert_eq!(pruned[0].edges.len(), 1);
        assert_eq!(pruned[1].edges.len(), 1);
        assert!(pruned.iter().flat_map(|g| &g.edges).all(|e| e.label == "a"));
    }

    #[test]
    fn empty_graphs_are_dropped() {
        let text = "t # 0\nv 0 A\nv 1 A\ne 0 1 a\nt # 1\nv 0 Z\nv 1 A\ne 0 1 a\nt # 2\nv 0 A\nv 1 A\ne 0 1 a\n";
        let p = preprocess(&parse_tlf(text).unwrap(), 2, Mode::Directed).unwrap();
        assert_eq!(p.graphs.iter().map(|g| g.graph.id).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(p.input_graph_count, 3);
    }

    #[test]
    fn pendant_pair_initial_maps_count_automorphisms() {
        let c = parse_tlf(PENDANT_PAIR).unwrap();
        let p = preprocess(&c, 2, Mode::Undirected).unwrap();
        for g in &p.graphs {
            assert_eq!(g.embeddings.len(), 2);
            let counts: Vec<usize> = (0..2).map(|i| g.embeddings.embeddings_at(i).count()).collect();
            let mut sorted = counts.clone();
            sorted.sort();
            assert_eq!(sorted, vec![1, 6]);
        }
        let directed = preprocess(&c, 2, Mode::Directed).unwrap();
        assert_eq!(directed.graphs[0].embeddings.embedding_count(), 4);
    }
}
