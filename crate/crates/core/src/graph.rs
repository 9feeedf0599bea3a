//! Labeled multigraphs, the line-oriented text format and the integer edge
//! encoding the miner works on.
//!
//! Text format, one record per line:
//!
//! ```text
//! t # <graph-id>
//! v <vertex-id> <label>
//! e <source-id> <target-id> <label>
//! ```
//!
//! Blank lines and lines starting with `#` are skipped; `t # -1` ends the
//! input early.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::canonical::{edge_min_code, Branch, Direction, Extension, Mode};
use crate::error::{Error, Result};
use crate::preprocess::Dictionary;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: u64,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: u64,
    pub source: u64,
    pub target: u64,
    pub label: String,
}

/// A directed labeled multigraph. Loops and parallel edges are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    pub id: u64,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl LabeledGraph {
    pub fn new(id: u64) -> Self {
        LabeledGraph {
            id,
            ..Default::default()
        }
    }

    pub fn add_vertex(&mut self, id: u64, label: impl Into<String>) -> &mut Self {
        self.vertices.push(Vertex {
            id,
            label: label.into(),
        });
        self
    }

    /// Appends an edge with the next free edge id.
    pub fn add_edge(&mut self, source: u64, target: u64, label: impl Into<String>) -> &mut Self {
        let id = self.edges.len() as u64;
        self.edges.push(Edge {
            id,
            source,
            target,
            label: label.into(),
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::with_capacity(self.vertices.len());
        for v in &self.vertices {
            if !ids.insert(v.id) {
                return Err(Error::contract(format!(
                    "graph {}: duplicate vertex id {}",
                    self.id, v.id
                )));
            }
        }
        let mut edge_ids = HashSet::with_capacity(self.edges.len());
        for e in &self.edges {
            if !edge_ids.insert(e.id) {
                return Err(Error::contract(format!(
                    "graph {}: duplicate edge id {}",
                    self.id, e.id
                )));
            }
            for end in [e.source, e.target] {
                if !ids.contains(&end) {
                    return Err(Error::UndeclaredVertex {
                        graph: self.id,
                        edge: e.id,
                        vertex: end,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphCollection {
    pub graphs: Vec<LabeledGraph>,
}

impl GraphCollection {
    pub fn new(graphs: Vec<LabeledGraph>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(graphs.len());
        for g in &graphs {
            if !ids.insert(g.id) {
                return Err(Error::DuplicateGraph(g.id));
            }
            g.validate()?;
        }
        Ok(GraphCollection { graphs })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Every graph repeated `times` times with fresh ids, keeping order.
    pub fn duplicated(&self, times: usize) -> GraphCollection {
        let mut graphs = Vec::with_capacity(self.graphs.len() * times);
        let mut next = 0u64;
        for _ in 0..times {
            for g in &self.graphs {
                let mut copy = g.clone();
                copy.id = next;
                next += 1;
                graphs.push(copy);
            }
        }
        GraphCollection { graphs }
    }
}

pub fn parse_tlf(text: &str) -> Result<GraphCollection> {
    let mut graphs: Vec<LabeledGraph> = Vec::new();
    let mut current: Option<(LabeledGraph, HashSet<u64>, bool)> = None;
    let mut graph_ids = HashSet::new();

    let finish = |graph: Option<(LabeledGraph, HashSet<u64>, bool)>, graphs: &mut Vec<LabeledGraph>| {
        if let Some((g, _, _)) = graph {
            graphs.push(g);
        }
    };

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |message: &str| Error::Parse {
            line: line_no,
            message: message.to_string(),
        };
        match tokens[0] {
            "t" => {
                if tokens.len() != 3 || tokens[1] != "#" {
                    return Err(parse_err("expected `t # <graph-id>`"));
                }
                if tokens[2] == "-1" {
                    break;
                }
                let id: u64 = tokens[2]
                    .parse()
                    .map_err(|_| parse_err("graph id is not a non-negative integer"))?;
                if !graph_ids.insert(id) {
                    return Err(Error::DuplicateGraph(id));
                }
                finish(current.take(), &mut graphs);
                current = Some((LabeledGraph::new(id), HashSet::new(), false));
            }
            "v" => {
                let (graph, vertex_ids, seen_edge) = current
                    .as_mut()
                    .ok_or_else(|| parse_err("vertex before any `t #` line"))?;
                if tokens.len() != 3 {
                    return Err(parse_err("expected `v <vertex-id> <label>`"));
                }
                if *seen_edge {
                    return Err(parse_err("vertex declared after an edge"));
                }
                let id: u64 = tokens[1]
                    .parse()
                    .map_err(|_| parse_err("vertex id is not a non-negative integer"))?;
                if !vertex_ids.insert(id) {
                    return Err(parse_err("duplicate vertex id"));
                }
                graph.add_vertex(id, tokens[2]);
            }
            "e" => {
                let (graph, vertex_ids, seen_edge) = current
                    .as_mut()
                    .ok_or_else(|| parse_err("edge before any `t #` line"))?;
                if tokens.len() != 4 {
                    return Err(parse_err("expected `e <source-id> <target-id> <label>`"));
                }
                let source: u64 = tokens[1]
                    .parse()
                    .map_err(|_| parse_err("source id is not a non-negative integer"))?;
                let target: u64 = tokens[2]
                    .parse()
                    .map_err(|_| parse_err("target id is not a non-negative integer"))?;
                for end in [source, target] {
                    if !vertex_ids.contains(&end) {
                        return Err(Error::UndeclaredVertex {
                            graph: graph.id,
                            edge: graph.edges.len() as u64,
                            vertex: end,
                        });
                    }
                }
                *seen_edge = true;
                graph.add_edge(source, target, tokens[3]);
            }
            _ => return Err(parse_err("unknown record type")),
        }
    }
    finish(current.take(), &mut graphs);
    Ok(GraphCollection { graphs })
}

pub fn write_tlf(collection: &GraphCollection) -> String {
    let mut out = String::new();
    for g in &collection.graphs {
        let _ = writeln!(out, "t # {}", g.id);
        for v in &g.vertices {
            let _ = writeln!(out, "v {} {}", v.id, v.label);
        }
        for e in &g.edges {
            let _ = writeln!(out, "e {} {} {}", e.source, e.target, e.label);
        }
    }
    out
}

/// One stored edge: `(v_a, v_b, l_a, d, l_e, l_b)` in its minimal traversal
/// orientation, with `v_a`/`v_b` local vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EncodedEdge {
    pub start: u32,
    pub end: u32,
    pub start_label: u32,
    pub direction: Direction,
    pub edge_label: u32,
    pub end_label: u32,
}

impl EncodedEdge {
    pub fn is_loop(&self) -> bool {
        self.start == self.end
    }

    /// The edge's 1-edge minimum code.
    pub fn branch(&self) -> Branch {
        Branch(Extension::new(
            0,
            if self.is_loop() { 0 } else { 1 },
            self.start_label,
            self.direction,
            self.edge_label,
            self.end_label,
        ))
    }

    /// Label of `vertex`, which must be one of the endpoints.
    pub fn label_of(&self, vertex: u32) -> u32 {
        if vertex == self.start {
            self.start_label
        } else {
            self.end_label
        }
    }

    /// The source vertex; for undirected storage this is `start`.
    pub fn source(&self) -> u32 {
        match self.direction {
            Direction::Out => self.start,
            Direction::In => self.end,
        }
    }
}

/// A graph as a flat integer sequence of per-edge sextuples, sorted by the
/// edges' 1-edge minimum codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedGraph {
    pub id: u64,
    edges: Vec<u32>,
    vertex_count: usize,
    vertex_ids: Vec<u64>,
    edge_ids: Vec<u64>,
}

impl EncodedGraph {
    pub fn from_parts(
        id: u64,
        edges: Vec<u32>,
        vertex_count: usize,
        vertex_ids: Vec<u64>,
        edge_ids: Vec<u64>,
    ) -> Result<Self> {
        if !edges.len().is_multiple_of(6) || edges.len() / 6 != edge_ids.len() || vertex_ids.len() != vertex_count {
            return Err(Error::contract("inconsistent encoded graph parts"));
        }
        Ok(EncodedGraph {
            id,
            edges,
            vertex_count,
            vertex_ids,
            edge_ids,
        })
    }

    pub fn flat(&self) -> &[u32] {
        &self.edges
    }

    /// `(id, flat edges, vertex count, vertex ids, edge ids)`, the inverse of
    /// [`EncodedGraph::from_parts`].
    pub fn into_parts(self) -> (u64, Vec<u32>, usize, Vec<u64>, Vec<u64>) {
        (self.id, self.edges, self.vertex_count, self.vertex_ids, self.edge_ids)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / 6
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge(&self, index: usize) -> EncodedEdge {
        let s = &self.edges[index * 6..index * 6 + 6];
        EncodedEdge {
            start: s[0],
            end: s[1],
            start_label: s[2],
            direction: if s[3] == 0 { Direction::Out } else { Direction::In },
            edge_label: s[4],
            end_label: s[5],
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = EncodedEdge> + '_ {
        (0..self.edge_count()).map(|i| self.edge(i))
    }

    /// Original vertex id of a local vertex index.
    pub fn vertex_id(&self, local: u32) -> u64 {
        self.vertex_ids[local as usize]
    }

    /// Original edge id of a local edge index.
    pub fn edge_id(&self, local: u32) -> u64 {
        self.edge_ids[local as usize]
    }

    pub fn is_sorted(&self, mode: Mode) -> bool {
        (1..self.edge_count()).all(|i| {
            self.edge(i - 1).branch().compare(&self.edge(i).branch(), mode)
                != std::cmp::Ordering::Greater
        })
    }
}

pub fn encode_graph(
    graph: &LabeledGraph,
    vertex_dict: &Dictionary,
    edge_dict: &Dictionary,
    mode: Mode,
) -> Result<EncodedGraph> {
    let mut local = HashMap::with_capacity(graph.vertices.len());
    let mut labels = Vec::with_capacity(graph.vertices.len());
    let mut vertex_ids = Vec::with_capacity(graph.vertices.len());
    for (i, v) in graph.vertices.iter().enumerate() {
        local.insert(v.id, i as u32);
        labels.push(vertex_dict.encode(&v.label)?);
        vertex_ids.push(v.id);
    }
    let mut rows: Vec<(EncodedEdge, u64)> = Vec::with_capacity(graph.edges.len());
    for e in &graph.edges {
        let lookup = |vertex: u64| {
            local.get(&vertex).copied().ok_or(Error::UndeclaredVertex {
                graph: graph.id,
                edge: e.id,
                vertex,
            })
        };
        let source = lookup(e.source)?;
        let target = lookup(e.target)?;
        let edge_label = edge_dict.encode(&e.label)?;
        let (ls, lt) = (labels[source as usize], labels[target as usize]);
        let branch = edge_min_code(ls, lt, edge_label, source == target, mode);
        let keeps_orientation = source == target
            || branch.0
                == Extension::new(0, 1, ls, Direction::Out, edge_label, lt);
        let (start, end) = if keeps_orientation {
            (source, target)
        } else {
            (target, source)
        };
        rows.push((
            EncodedEdge {
                start,
                end,
                start_label: branch.0.from_label,
                direction: branch.0.direction,
                edge_label,
                end_label: branch.0.to_label,
            },
            e.id,
        ));
    }
    rows.sort_by(|(x, _), (y, _)| {
        x.branch()
            .compare(&y.branch(), mode)
            .then_with(|| (x.start, x.end).cmp(&(y.start, y.end)))
    });
    let mut flat = Vec::with_capacity(rows.len() * 6);
    let mut edge_ids = Vec::with_capacity(rows.len());
    for (edge, id) in rows {
        flat.extend_from_slice(&[
            edge.start,
            edge.end,
            edge.start_label,
            edge.direction as u32,
            edge.edge_label,
            edge.end_label,
        ]);
        edge_ids.push(id);
    }
    Ok(EncodedGraph {
        id: graph.id,
        edges: flat,
        vertex_count: graph.vertices.len(),
        vertex_ids,
        edge_ids,
    })
}

/// Rebuilds a labeled graph from its encoding, used for diagnostics and
/// roundtrip checks.
pub fn decode_graph(
    graph: &EncodedGraph,
    vertex_labels: &[u32],
    vertex_dict: &Dictionary,
    edge_dict: &Dictionary,
) -> Result<LabeledGraph> {
    let mut out = LabeledGraph::new(graph.id);
    for (i, &label) in vertex_labels.iter().enumerate() {
        out.add_vertex(graph.vertex_id(i as u32), vertex_dict.decode(label)?);
    }
    for (i, e) in graph.edges().enumerate() {
        let source = e.source();
        let target = if source == e.start { e.end } else { e.start };
        out.edges.push(Edge {
            id: graph.edge_id(i as u32),
            source: graph.vertex_id(source),
            target: graph.vertex_id(target),
            label: edge_dict.decode(e.edge_label)?.to_string(),
        });
    }
    Ok(out)
}
