//! Synthetic benchmark collections and a brute-force reference miner.
//!
//! # Generator
//!
//! Graph `i` belongs to size class `c = i mod 10` and has `10 + 9c` vertices
//! and `14 + 14c` edges. Every graph contains the same seed family:
//!
//! * a directed triangle `A→A→A→A` with edge label `a` (rotational
//!   automorphisms),
//! * a pair `B⇄B` with label `b` in both directions (a mirrored automorphism
//!   and parallel edges against direction),
//! * two parallel `C→C` edges with label `c` and a loop on the second `C`,
//! * connectors `A→B` (`b`) and `A→C` (`c`) joining the three parts.
//!
//! Class `c` additionally carries an arm of `c` pendant edges hanging off
//! the first triangle vertex, using vertex labels `D`, `E`, `F` and edge
//! labels `a`, `b`, `c`. Arm edge `t` therefore occurs in `(10 - t) / 10`
//! of the graphs, so lowering the support by 10% admits one more arm edge.
//!
//! The remaining vertices are fillers labeled `G`..`K` by class (`c mod 5`),
//! so each filler label occurs in a fifth of the graphs. Filler edges use
//! the labels after `c` and always touch a filler vertex. At supports above
//! 20% the fillers are pruned before mining and the frequent set is exactly
//! the subgraphs of family plus arm.
//!
//! # Oracle
//!
//! [`oracle_mine`] enumerates every connected edge subset of every graph,
//! computes its minimum DFS code and counts the graphs containing each
//! code. It shares nothing with growth or the engine beyond the label
//! ranking, which it takes from preprocessing so both outputs render
//! identically.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::canonical::{compare_code, min_dfs_code, DfsCode, Mode, PatternEdge, PatternGraph};
use crate::engine::{format_result_lines, FrequentPattern};
use crate::error::{Error, Result};
use crate::graph::{GraphCollection, LabeledGraph};
use crate::preprocess::{prune, Dictionary};

pub const SIZE_CLASSES: usize = 10;
pub const FAMILY_VERTICES: usize = 7;
pub const FAMILY_EDGES: usize = 10;

const VERTEX_LABELS: [&str; 11] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub graph_count: usize,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(graph_count: usize, seed: u64) -> Self {
        GeneratorConfig { graph_count, seed }
    }

    /// Number of distinct edge labels, `5 + graph_count / 1000`.
    pub fn edge_label_count(&self) -> usize {
        5 + self.graph_count / 1000
    }
}

/// `(vertices, edges)` of size class `class`.
pub fn class_size(class: usize) -> (usize, usize) {
    (10 + 9 * class, 14 + 14 * class)
}

/// Edge label number `i`: `a`..`z`, then `aa`, `ab`, ...
fn edge_label(i: usize) -> String {
    let letters = b"abcdefghijklmnopqrstuvwxyz";
    if i < 26 {
        (letters[i] as char).to_string()
    } else {
        format!("{}{}", edge_label(i / 26 - 1), letters[i % 26] as char)
    }
}

pub fn generate(config: &GeneratorConfig) -> Result<GraphCollection> {
    if config.graph_count < 1 {
        return Err(Error::param("graph count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let filler_edge_labels: Vec<String> = (3..config.edge_label_count()).map(edge_label).collect();
    let graphs = (0..config.graph_count)
        .map(|i| generate_graph(i, &filler_edge_labels, &mut rng))
        .collect();
    GraphCollection::new(graphs)
}

fn generate_graph(index: usize, filler_edge_labels: &[String], rng: &mut ChaCha8Rng) -> LabeledGraph {
    let class = index % SIZE_CLASSES;
    let (vertex_total, edge_total) = class_size(class);
    let mut g = LabeledGraph::new(index as u64);

    // family: 0,1,2 = A triangle; 3,4 = B pair; 5,6 = C pair
    for (id, label) in ["A", "A", "A", "B", "B", "C", "C"].iter().enumerate() {
        g.add_vertex(id as u64, *label);
    }
    g.add_edge(0, 1, "a").add_edge(1, 2, "a").add_edge(2, 0, "a");
    g.add_edge(3, 4, "b").add_edge(4, 3, "b");
    g.add_edge(5, 6, "c").add_edge(5, 6, "c").add_edge(6, 6, "c");
    g.add_edge(0, 3, "b").add_edge(1, 5, "c");

    let mut previous = 0u64;
    for t in 0..class {
        let id = (FAMILY_VERTICES + t) as u64;
        g.add_vertex(id, ["D", "E", "F"][t % 3]);
        g.add_edge(previous, id, ["a", "b", "c"][t / 3]);
        previous = id;
    }

    let first_filler = FAMILY_VERTICES + class;
    let filler_label = VERTEX_LABELS[6 + class % 5];
    for id in first_filler..vertex_total {
        g.add_vertex(id as u64, filler_label);
    }
    let mut edges_left = edge_total - FAMILY_EDGES - class;
    let pick_label = |rng: &mut ChaCha8Rng| filler_edge_labels[rng.gen_range(0..filler_edge_labels.len())].clone();
    for id in first_filler..vertex_total {
        let other = rng.gen_range(0..id) as u64;
        let label = pick_label(rng);
        if rng.gen_bool(0.5) {
            g.add_edge(other, id as u64, label);
        } else {
            g.add_edge(id as u64, other, label);
        }
        edges_left -= 1;
    }
    for _ in 0..edges_left {
        let filler = rng.gen_range(first_filler..vertex_total) as u64;
        let other = rng.gen_range(0..vertex_total) as u64;
        let label = pick_label(rng);
        if rng.gen_bool(0.5) {
            g.add_edge(other, filler, label);
        } else {
            g.add_edge(filler, other, label);
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub min_frequency: usize,
    pub mode: Mode,
    /// Largest pattern size to enumerate; unlimited when `None`.
    pub max_pattern_edges: Option<usize>,
    /// Refuse graphs whose enumeration would go deeper than this many edges.
    pub edge_guard: usize,
    /// Drop vertices and edges whose labels are too rare to occur in any
    /// frequent pattern before enumerating.
    pub label_prefilter: bool,
}

impl OracleConfig {
    pub fn new(min_frequency: usize, mode: Mode) -> Self {
        OracleConfig {
            min_frequency,
            mode,
            max_pattern_edges: None,
            edge_guard: 10,
            label_prefilter: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    /// Sorted ascending by code.
    pub frequent: Vec<(DfsCode, usize)>,
    pub vertex_dict: Dictionary,
    pub edge_dict: Dictionary,
    pub graph_count: usize,
}

impl OracleResult {
    pub fn to_result_file(&self) -> Result<String> {
        let patterns: Vec<FrequentPattern> = self
            .frequent
            .iter()
            .map(|(code, frequency)| FrequentPattern {
                code: code.clone(),
                frequency: *frequency,
                support: *frequency as f64 / self.graph_count as f64,
            })
            .collect();
        format_result_lines(&patterns, &self.vertex_dict, &self.edge_dict)
    }
}

pub fn oracle_mine(collection: &GraphCollection, min_frequency: usize, mode: Mode) -> Result<OracleResult> {
    oracle_mine_with(collection, &OracleConfig::new(min_frequency, mode))
}

/// Labels ranked as preprocessing ranks them, followed by the labels it
/// would prune in string order.
fn full_dictionary(ranked: &Dictionary, all: impl IntoIterator<Item = String>) -> Dictionary {
    let mut rest: Vec<String> = all
        .into_iter()
        .filter(|l| !ranked.contains(l))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut labels = ranked.labels().to_vec();
    labels.append(&mut rest);
    Dictionary::from_ordered(labels)
}

pub fn oracle_mine_with(collection: &GraphCollection, config: &OracleConfig) -> Result<OracleResult> {
    if config.min_frequency < 1 {
        return Err(Error::param("minimum frequency must be at least 1"));
    }
    let (pruned, ranked_vertices, ranked_edges) = prune(collection, config.min_frequency);
    let vertex_dict = full_dictionary(
        &ranked_vertices,
        collection.graphs.iter().flat_map(|g| g.vertices.iter().map(|v| v.label.clone())),
    );
    let edge_dict = full_dictionary(
        &ranked_edges,
        collection.graphs.iter().flat_map(|g| g.edges.iter().map(|e| e.label.clone())),
    );
    let graphs: &[LabeledGraph] = if config.label_prefilter {
        &pruned
    } else {
        &collection.graphs
    };

    let per_graph = graphs
        .par_iter()
        .map(|g| graph_patterns(g, &vertex_dict, &edge_dict, config))
        .collect::<Result<Vec<HashSet<DfsCode>>>>()?;
    let mut counts: HashMap<DfsCode, usize> = HashMap::new();
    for set in per_graph {
        for code in set {
            *counts.entry(code).or_insert(0) += 1;
        }
    }
    let mut frequent: Vec<(DfsCode, usize)> = counts
        .into_iter()
        .filter(|(_, n)| *n >= config.min_frequency)
        .collect();
    frequent.sort_by(|a, b| compare_code(&a.0, &b.0, config.mode));
    debug_assert!(frequent
        .windows(2)
        .all(|w| compare_code(&w[0].0, &w[1].0, config.mode) == Ordering::Less));
    Ok(OracleResult {
        frequent,
        vertex_dict,
        edge_dict,
        graph_count: collection.len(),
    })
}

/// Minimum codes of all connected edge subsets of one graph.
fn graph_patterns(
    graph: &LabeledGraph,
    vertex_dict: &Dictionary,
    edge_dict: &Dictionary,
    config: &OracleConfig,
) -> Result<HashSet<DfsCode>> {
    let depth = config
        .max_pattern_edges
        .map_or(graph.edges.len(), |m| m.min(graph.edges.len()));
    if depth > config.edge_guard {
        return Err(Error::GuardExceeded {
            graph: graph.id,
            depth,
            guard: config.edge_guard,
        });
    }
    let index: HashMap<u64, usize> = graph.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
    let vertex_labels: Vec<u32> = graph
        .vertices
        .iter()
        .map(|v| vertex_dict.encode(&v.label))
        .collect::<Result<_>>()?;
    let edges: Vec<(usize, usize, u32)> = graph
        .edges
        .iter()
        .map(|e| Ok((index[&e.source], index[&e.target], edge_dict.encode(&e.label)?)))
        .collect::<Result<_>>()?;
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertex_labels.len()];
    for (i, &(s, t, _)) in edges.iter().enumerate() {
        incident[s].push(i);
        if t != s {
            incident[t].push(i);
        }
    }

    let mut codes = HashSet::new();
    let mut level: HashSet<Vec<usize>> = (0..edges.len()).map(|i| vec![i]).collect();
    for _ in 0..depth {
        if level.is_empty() {
            break;
        }
        let mut next = HashSet::new();
        for subset in &level {
            codes.insert(subset_code(subset, &edges, &vertex_labels, config.mode)?);
            let touched: HashSet<usize> = subset.iter().flat_map(|&e| [edges[e].0, edges[e].1]).collect();
            for &v in &touched {
                for &e in &incident[v] {
                    if let Err(at) = subset.binary_search(&e) {
                        let mut grown = subset.clone();
                        grown.insert(at, e);
                        next.insert(grown);
                    }
                }
            }
        }
        level = next;
    }
    Ok(codes)
}

fn subset_code(subset: &[usize], edges: &[(usize, usize, u32)], labels: &[u32], mode: Mode) -> Result<DfsCode> {
    let mut local: HashMap<usize, u32> = HashMap::new();
    let mut pattern = PatternGraph::default();
    let mut local_of = |v: usize, pattern: &mut PatternGraph| {
        *local.entry(v).or_insert_with(|| {
            pattern.vertex_labels.push(labels[v]);
            (pattern.vertex_labels.len() - 1) as u32
        })
    };
    for &e in subset {
        let (s, t, label) = edges[e];
        let source = local_of(s, &mut pattern);
        let target = local_of(t, &mut pattern);
        pattern.edges.push(PatternEdge { source, target, label });
    }
    min_dfs_code(&pattern, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_tlf, write_tlf};

    fn is_connected(g: &LabeledGraph) -> bool {
        let index: HashMap<u64, usize> = g.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let mut parent: Vec<usize> = (0..g.vertices.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for e in &g.edges {
            let (a, b) = (find(&mut parent, index[&e.source]), find(&mut parent, index[&e.target]));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..g.vertices.len()).all(|v| find(&mut parent, v) == root)
    }

    #[test]
    fn size_classes_and_connectivity() {
        let c = generate(&GeneratorConfig::new(20, 7)).unwrap();
        assert_eq!(c.len(), 20);
        for (i, g) in c.graphs.iter().enumerate() {
            let (v, e) = class_size(i % 10);
            assert_eq!((g.vertices.len(), g.edges.len()), (v, e), "graph {i}");
            assert!(is_connected(g), "graph {i}");
            g.validate().unwrap();
        }
        assert_eq!(class_size(9), (91, 140));
    }

    #[test]
    fn label_alphabets() {
        let c = generate(&GeneratorConfig::new(2000, 1)).unwrap();
        let vertex: HashSet<&str> = c.graphs.iter().flat_map(|g| g.vertices.iter().map(|v| v.label.as_str())).collect();
        let edge: HashSet<&str> = c.graphs.iter().flat_map(|g| g.edges.iter().map(|e| e.label.as_str())).collect();
        assert_eq!(vertex.len(), 11);
        assert_eq!(edge.len(), 7);
    }

    #[test]
    fn deterministic_output() {
        let cfg = GeneratorConfig::new(30, 99);
        assert_eq!(write_tlf(&generate(&cfg).unwrap()), write_tlf(&generate(&cfg).unwrap()));
        assert_ne!(
            write_tlf(&generate(&cfg).unwrap()),
            write_tlf(&generate(&GeneratorConfig::new(30, 100)).unwrap())
        );
        assert!(generate(&GeneratorConfig::new(0, 1)).is_err());
    }

    #[test]
    fn edge_label_names() {
        assert_eq!(edge_label(0), "a");
        assert_eq!(edge_label(25), "z");
        assert_eq!(edge_label(26), "aa");
        assert_eq!(edge_label(27), "ab");
    }

    #[test]
    fn single_edge() {
        let c = parse_tlf("t # 0\nv 0 A\nv 1 B\ne 0 1 x\n").unwrap();
        let r = oracle_mine(&c, 1, Mode::Directed).unwrap();
        assert_eq!(r.frequent.len(), 1);
        assert_eq!(r.frequent[0].1, 1);
    }

    #[test]
    fn counts_graphs_not_embeddings() {
        // the triangle has three automorphic embeddings of every path
        let c = parse_tlf("t # 0\nv 0 A\nv 1 A\nv 2 A\ne 0 1 a\ne 1 2 a\ne 2 0 a\n").unwrap();
        let r = oracle_mine(&c, 1, Mode::Undirected).unwrap();
        assert_eq!(r.frequent.len(), 3);
        assert!(r.frequent.iter().all(|(_, n)| *n == 1));
    }

    #[test]
    fn guard_names_graph() {
        let mut text = String::from("t # 42\nv 0 A\n");
        for _ in 0..11 {
            text.push_str("e 0 0 a\n");
        }
        let c = parse_tlf(&text).unwrap();
        assert_eq!(
            oracle_mine(&c, 1, Mode::Directed).unwrap_err(),
            Error::GuardExceeded {
                graph: 42,
                depth: 11,
                guard: 10
            }
        );
        let mut cfg = OracleConfig::new(1, Mode::Directed);
        cfg.max_pattern_edges = Some(3);
        assert_eq!(oracle_mine_with(&c, &cfg).unwrap().frequent.len(), 3);
    }
}
