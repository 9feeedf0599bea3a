//! Constrained pattern growth for a single graph.
//!
//! Every embedding of every supported frequent pattern is extended by one
//! edge. Forward growth starts from a vertex on the pattern's rightmost path
//! and discovers a new vertex; backward growth connects the rightmost vertex
//! to a rightmost-path vertex (or itself, for a loop). The branch constraint
//! skips edges whose 1-edge code is smaller than the pattern's first
//! extension: a child built from such an edge has a smaller branch and is
//! grown from another parent. Because the frequent patterns arrive sorted and
//! the graph's edges are sorted by 1-edge code, the constraint reduces to
//! advancing a floor index into the edge list.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::canonical::{branch_of, compare_code, rightmost_path, Branch, DfsCode, Direction, Extension, Mode};
use crate::embedding::{EmbeddingMap, KeyCodec, PatternKey, Shape};
use crate::error::{Error, Result};
use crate::graph::EncodedGraph;

/// A frequent pattern as held by a worker after broadcast reception.
#[derive(Clone, Debug)]
pub struct BroadcastPattern {
    pub key: PatternKey,
    pub code: DfsCode,
    pub branch: Branch,
    on_rightmost_path: Vec<bool>,
}

impl BroadcastPattern {
    pub fn new(key: PatternKey, code: DfsCode) -> Result<Self> {
        let branch = branch_of(&code).ok_or_else(|| Error::contract("empty frequent pattern"))?;
        let mut on_rightmost_path = vec![false; code.vertex_count()];
        for t in rightmost_path(&code) {
            on_rightmost_path[t as usize] = true;
        }
        Ok(BroadcastPattern {
            key,
            code,
            branch,
            on_rightmost_path,
        })
    }
}

/// The iteration's frequent patterns, sorted ascending by code.
#[derive(Clone, Debug, Default)]
pub struct FrequentView {
    patterns: Vec<BroadcastPattern>,
}

impl FrequentView {
    pub fn new(patterns: Vec<BroadcastPattern>, mode: Mode) -> Result<Self> {
        for pair in patterns.windows(2) {
            if compare_code(&pair[0].code, &pair[1].code, mode) != Ordering::Less {
                return Err(Error::contract(format!(
                    "frequent patterns not strictly ascending at {}",
                    pair[1].code
                )));
            }
        }
        Ok(FrequentView { patterns })
    }

    pub fn patterns(&self) -> &[BroadcastPattern] {
        &self.patterns
    }

    pub fn keys(&self) -> Vec<PatternKey> {
        self.patterns.iter().map(|p| p.key.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GrowthState {
    pub current_min_branch: Option<Branch>,
    pub candidate_edge_floor: usize,
}

impl GrowthState {
    /// Raises the minimum branch if `branch` exceeds it and moves the floor
    /// past every edge whose 1-edge code is now too small.
    pub fn advance(&mut self, graph: &EncodedGraph, branch: Branch, mode: Mode) {
        let raise = match self.current_min_branch {
            None => true,
            Some(current) => branch.compare(&current, mode) == Ordering::Greater,
        };
        if !raise {
            return;
        }
        self.current_min_branch = Some(branch);
        while self.candidate_edge_floor < graph.edge_count()
            && graph
                .edge(self.candidate_edge_floor)
                .branch()
                .compare(&branch, mode)
                == Ordering::Less
        {
            self.candidate_edge_floor += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrownEmbedding {
    pub extension: Extension,
    pub new_vertex: Option<u32>,
}

/// The extension obtained by adding `edge_index` to an embedding, if the
/// time constraint allows it.
pub fn extend_embedding(
    graph: &EncodedGraph,
    vertices: &[u32],
    edges: &[u32],
    on_rightmost_path: &[bool],
    edge_index: u32,
    mode: Mode,
) -> Option<GrownEmbedding> {
    if edges.contains(&edge_index) {
        return None;
    }
    let edge = graph.edge(edge_index as usize);
    let rightmost = (vertices.len() - 1) as u32;
    let time_of = |v: u32| vertices.iter().position(|&x| x == v).map(|t| t as u32);
    let direction_from = |start: u32| match mode {
        Mode::Undirected => Direction::Out,
        Mode::Directed if edge.source() == start => Direction::Out,
        Mode::Directed => Direction::In,
    };

    if edge.is_loop() {
        let t = time_of(edge.start)?;
        if t != rightmost {
            return None;
        }
        let l = edge.start_label;
        return Some(GrownEmbedding {
            extension: Extension::new(t, t, l, Direction::Out, edge.edge_label, l),
            new_vertex: None,
        });
    }

    let (ts, te) = (time_of(edge.start), time_of(edge.end));
    let (from, to, from_time, to_time, new_vertex) = match (ts, te) {
        (Some(a), Some(b)) => {
            if a == rightmost && on_rightmost_path[b as usize] {
                (edge.start, edge.end, a, b, None)
            } else if b == rightmost && on_rightmost_path[a as usize] {
                (edge.end, edge.start, b, a, None)
            } else {
                return None;
            }
        }
        (Some(a), None) if on_rightmost_path[a as usize] => {
            (edge.start, edge.end, a, vertices.len() as u32, Some(edge.end))
        }
        (None, Some(b)) if on_rightmost_path[b as usize] => {
            (edge.end, edge.start, b, vertices.len() as u32, Some(edge.start))
        }
        _ => return None,
    };
    Some(GrownEmbedding {
        extension: Extension::new(
            from_time,
            to_time,
            edge.label_of(from),
            direction_from(from),
            edge.edge_label,
            edge.label_of(to),
        ),
        new_vertex,
    })
}

/// Grows every embedding of every supported pattern in `frequent` by one
/// edge and returns the next-level embedding map.
pub fn grow(
    graph: &EncodedGraph,
    embeddings: &EmbeddingMap,
    frequent: &FrequentView,
    mode: Mode,
    branch_check: bool,
    codec: &KeyCodec,
) -> Result<EmbeddingMap> {
    let mut state = GrowthState::default();
    let mut children: HashMap<Vec<u32>, (Shape, Vec<u32>)> = HashMap::new();
    let edge_count = graph.edge_count() as u32;
    let mut child_vertices = Vec::new();

    for pattern in frequent.patterns() {
        let Some(index) = embeddings.position(&pattern.key) else {
            continue;
        };
        let shape = embeddings.shape_at(index);
        if shape != Shape::of(&pattern.code) {
            return Err(Error::contract(format!(
                "embedding width does not match pattern {}",
                pattern.code
            )));
        }
        if branch_check {
            state.advance(graph, pattern.branch, mode);
        }
        let floor = if branch_check {
            state.candidate_edge_floor as u32
        } else {
            0
        };
        let parent_flat = pattern.code.to_flat();
        let j = shape.vertices as usize;

        for chunk in embeddings.multiplexed_at(index).chunks_exact(shape.width()) {
            let (vertices, edges) = chunk.split_at(j);
            for edge_index in floor..edge_count {
                let Some(grown) = extend_embedding(
                    graph,
                    vertices,
                    edges,
                    &pattern.on_rightmost_path,
                    edge_index,
                    mode,
                ) else {
                    continue;
                };
                let mut flat = parent_flat.clone();
                grown.extension.write_flat(&mut flat);
                let child_shape = Shape {
                    vertices: shape.vertices + grown.new_vertex.is_some() as u32,
                    edges: shape.edges + 1,
                };
                child_vertices.clear();
                child_vertices.extend_from_slice(vertices);
                child_vertices.extend(grown.new_vertex);
                let slot = &mut children
                    .entry(flat)
                    .or_insert_with(|| (child_shape, Vec::new()))
                    .1;
                slot.extend_from_slice(&child_vertices);
                slot.extend_from_slice(edges);
                slot.push(edge_index);
            }
        }
    }

    let entries = children
        .into_iter()
        .map(|(flat, (shape, data))| Ok((codec.encode_flat(flat)?, shape, data)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EmbeddingMap::from_entries(entries))
}
