//! DFS codes and the minimum DFS code used as canonical pattern labels.
//!
//! An [`Extension`] records the traversal of one edge: the discovery times of
//! its start and end vertex, the start label, the traversal direction, the
//! edge label and the end label. A [`DfsCode`] is the sequence of extensions
//! of one depth-first traversal. Among all traversals of a connected pattern
//! the smallest code under [`compare_code`] identifies the pattern up to
//! isomorphism.
//!
//! Extension order at a shared position:
//!
//! * a backward extension (end vertex already discovered, loops included) is
//!   smaller than a forward one;
//! * two backward extensions order by end time, then start time;
//! * two forward extensions order by end time, then by *descending* start
//!   time (growing from deeper on the rightmost path is smaller);
//! * remaining ties compare `(start label, direction, edge label, end label)`
//!   with `out < in`. Undirected mode skips the direction.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::preprocess::Dictionary;

/// Traversal direction of an edge relative to its stored orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Traversed from source to target.
    Out = 0,
    /// Traversed from target to source.
    In = 1,
}

impl Direction {
    pub fn from_u32(value: u32) -> Option<Self> {
        match value {
            0 => Some(Direction::Out),
            1 => Some(Direction::In),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Out => "out",
            Direction::In => "in",
        }
    }
}

/// Whether edge directions take part in pattern identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Directed,
    Undirected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Extension {
    pub from_time: u32,
    pub to_time: u32,
    pub from_label: u32,
    pub direction: Direction,
    pub edge_label: u32,
    pub to_label: u32,
}

impl Extension {
    pub const WIDTH: usize = 6;

    pub fn new(
        from_time: u32,
        to_time: u32,
        from_label: u32,
        direction: Direction,
        edge_label: u32,
        to_label: u32,
    ) -> Self {
        Extension {
            from_time,
            to_time,
            from_label,
            direction,
            edge_label,
            to_label,
        }
    }

    pub fn is_forward(&self) -> bool {
        self.to_time > self.from_time
    }

    pub fn is_loop(&self) -> bool {
        self.to_time == self.from_time
    }

    fn order_key(&self, mode: Mode) -> [u32; 7] {
        let direction = match mode {
            Mode::Directed => self.direction as u32,
            Mode::Undirected => 0,
        };
        let (class, second) = if self.is_forward() {
            (1, u32::MAX - self.from_time)
        } else {
            (0, self.from_time)
        };
        [
            class,
            self.to_time,
            second,
            self.from_label,
            direction,
            self.edge_label,
            self.to_label,
        ]
    }

    pub(crate) fn write_flat(&self, out: &mut Vec<u32>) {
        out.extend_from_slice(&[
            self.from_time,
            self.to_time,
            self.from_label,
            self.direction as u32,
            self.edge_label,
            self.to_label,
        ]);
    }

    pub(crate) fn from_flat(chunk: &[u32]) -> Result<Self> {
        let direction = Direction::from_u32(chunk[3])
            .ok_or_else(|| Error::contract(format!("invalid direction value {}", chunk[3])))?;
        Ok(Extension::new(
            chunk[0], chunk[1], chunk[2], direction, chunk[4], chunk[5],
        ))
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{}",
            self.from_time,
            self.to_time,
            self.from_label,
            self.direction.as_str(),
            self.edge_label,
            self.to_label
        )
    }
}

pub fn compare_extension(x: &Extension, y: &Extension, mode: Mode) -> Ordering {
    x.order_key(mode).cmp(&y.order_key(mode))
}

/// A sequence of extensions describing one depth-first traversal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DfsCode(Vec<Extension>);

impl DfsCode {
    pub fn new() -> Self {
        DfsCode(Vec::new())
    }

    pub fn from_extensions(extensions: Vec<Extension>) -> Self {
        DfsCode(extensions)
    }

    pub fn extensions(&self) -> &[Extension] {
        &self.0
    }

    pub fn edge_count(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.0
            .iter()
            .map(|x| x.from_time.max(x.to_time) as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn push(&mut self, extension: Extension) {
        self.0.push(extension);
    }

    /// The code with the last extension dropped.
    pub fn parent(&self) -> DfsCode {
        let mut parent = self.0.clone();
        parent.pop();
        DfsCode(parent)
    }

    pub fn child(&self, extension: Extension) -> DfsCode {
        let mut child = self.0.clone();
        child.push(extension);
        DfsCode(child)
    }

    pub fn to_flat(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.0.len() * Extension::WIDTH);
        for x in &self.0 {
            x.write_flat(&mut out);
        }
        out
    }

    pub fn from_flat(flat: &[u32]) -> Result<Self> {
        if !flat.len().is_multiple_of(Extension::WIDTH) {
            return Err(Error::contract(format!(
                "flat code length {} is not a multiple of {}",
                flat.len(),
                Extension::WIDTH
            )));
        }
        flat.chunks_exact(Extension::WIDTH)
            .map(Extension::from_flat)
            .collect::<Result<Vec<_>>>()
            .map(DfsCode)
    }

    /// Checks the structural shape every DFS code has: the first extension
    /// starts at time 0, forward extensions discover exactly the next time and
    /// every start vertex is already discovered.
    pub fn is_well_formed(&self) -> bool {
        let mut discovered = 0u32;
        for (i, x) in self.0.iter().enumerate() {
            if i == 0 {
                if x.from_time != 0 || x.to_time > 1 {
                    return false;
                }
                discovered = x.to_time + 1;
                continue;
            }
            if x.from_time >= discovered {
                return false;
            }
            if x.is_forward() {
                if x.to_time != discovered {
                    return false;
                }
                discovered += 1;
            }
        }
        true
    }

    /// The pattern this code describes, vertices indexed by discovery time.
    pub fn to_graph(&self) -> PatternGraph {
        let mut labels = vec![0u32; self.vertex_count()];
        let mut edges = Vec::with_capacity(self.0.len());
        for x in &self.0 {
            labels[x.from_time as usize] = x.from_label;
            labels[x.to_time as usize] = x.to_label;
            let (source, target) = match x.direction {
                Direction::Out => (x.from_time, x.to_time),
                Direction::In => (x.to_time, x.from_time),
            };
            edges.push(PatternEdge {
                source,
                target,
                label: x.edge_label,
            });
        }
        PatternGraph {
            vertex_labels: labels,
            edges,
        }
    }

    /// `0,1,A,out,a,B;1,2,...` with labels decoded through the dictionaries.
    pub fn render(&self, vertex_labels: &Dictionary, edge_labels: &Dictionary) -> Result<String> {
        let mut out = String::new();
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                x.from_time,
                x.to_time,
                vertex_labels.decode(x.from_label)?,
                x.direction.as_str(),
                edge_labels.decode(x.edge_label)?,
                vertex_labels.decode(x.to_label)?
            ));
        }
        Ok(out)
    }
}

impl fmt::Display for DfsCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

pub fn compare_code(a: &DfsCode, b: &DfsCode, mode: Mode) -> Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        match compare_extension(x, y, mode) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.0.len().cmp(&b.0.len())
}

/// The 1-edge code a pattern's minimum code starts with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Branch(pub Extension);

impl Branch {
    pub fn extension(&self) -> &Extension {
        &self.0
    }

    pub fn compare(&self, other: &Branch, mode: Mode) -> Ordering {
        compare_extension(&self.0, &other.0, mode)
    }
}

pub fn edge_min_code(
    source_label: u32,
    target_label: u32,
    edge_label: u32,
    is_loop: bool,
    mode: Mode,
) -> Branch {
    if is_loop {
        return Branch(Extension::new(
            0,
            0,
            source_label,
            Direction::Out,
            edge_label,
            source_label,
        ));
    }
    let forward = Extension::new(0, 1, source_label, Direction::Out, edge_label, target_label);
    let reverse_direction = match mode {
        Mode::Directed => Direction::In,
        Mode::Undirected => Direction::Out,
    };
    let reverse = Extension::new(0, 1, target_label, reverse_direction, edge_label, source_label);
    if compare_extension(&reverse, &forward, mode) == Ordering::Less {
        Branch(reverse)
    } else {
        Branch(forward)
    }
}

pub fn branch_of(code: &DfsCode) -> Option<Branch> {
    code.0.first().map(|x| {
        let mut first = *x;
        first.from_time = 0;
        first.to_time = x.to_time.min(1);
        Branch(first)
    })
}

/// Discovery times from the root to the rightmost vertex along forward edges.
pub fn rightmost_path(code: &DfsCode) -> Vec<u32> {
    let vertices = code.vertex_count();
    if vertices == 0 {
        return Vec::new();
    }
    let mut parent = vec![u32::MAX; vertices];
    for x in &code.0 {
        if x.is_forward() {
            parent[x.to_time as usize] = x.from_time;
        }
    }
    let mut path = Vec::new();
    let mut time = (vertices - 1) as u32;
    loop {
        path.push(time);
        if time == 0 {
            break;
        }
        time = parent[time as usize];
        if time == u32::MAX {
            break;
        }
    }
    path.reverse();
    path
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatternEdge {
    pub source: u32,
    pub target: u32,
    pub label: u32,
}

/// A small labeled multigraph with dense vertex indices, the input of the
/// minimum-code search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternGraph {
    pub vertex_labels: Vec<u32>,
    pub edges: Vec<PatternEdge>,
}

impl PatternGraph {
    pub fn is_connected(&self) -> bool {
        let n = self.vertex_labels.len();
        if n == 0 {
            return false;
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &self.edges {
            adjacency[e.source as usize].push(e.target as usize);
            adjacency[e.target as usize].push(e.source as usize);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }
}

pub fn min_dfs_code(graph: &PatternGraph, mode: Mode) -> Result<DfsCode> {
    if graph.edges.is_empty() {
        return Err(Error::contract("minimum DFS code of a graph without edges"));
    }
    let n = graph.vertex_labels.len();
    if graph
        .edges
        .iter()
        .any(|e| e.source as usize >= n || e.target as usize >= n)
    {
        return Err(Error::contract("pattern edge references a missing vertex"));
    }
    if !graph.is_connected() {
        return Err(Error::contract("minimum DFS code of a disconnected graph"));
    }
    let search = MinCodeSearch::new(graph, mode);
    let mut code = Vec::with_capacity(graph.edges.len());
    if search.descend(&[], &mut code) {
        Ok(DfsCode(code))
    } else {
        Err(Error::contract("no complete DFS traversal found"))
    }
}

/// True iff `code` is the minimum DFS code of the pattern it describes.
pub fn is_minimal(code: &DfsCode, mode: Mode) -> bool {
    if code.is_empty() || !code.is_well_formed() {
        return false;
    }
    match min_dfs_code(&code.to_graph(), mode) {
        Ok(min) => compare_code(&min, code, mode) == Ordering::Equal,
        Err(_) => false,
    }
}

const UNSEEN: u32 = u32::MAX;

#[derive(Clone)]
struct SearchState {
    time_to_vertex: Vec<u32>,
    vertex_to_time: Vec<u32>,
    used: Vec<u64>,
    rightmost_path: Vec<u32>,
}

impl SearchState {
    fn is_used(&self, edge: usize) -> bool {
        self.used[edge / 64] & (1 << (edge % 64)) != 0
    }

    fn mark(&mut self, edge: usize) {
        self.used[edge / 64] |= 1 << (edge % 64);
    }

    fn on_path(&self, time: u32) -> bool {
        self.rightmost_path.contains(&time)
    }
}

/// Depth-first search over traversal states. Children are visited in
/// ascending extension order, so the first complete code reached is the
/// lexicographic minimum; dead ends (traversals that strand an edge) simply
/// backtrack.
struct MinCodeSearch<'g> {
    graph: &'g PatternGraph,
    mode: Mode,
    // An edge is only taken after every earlier identical parallel edge; the
    // skipped alternatives are automorphic.
    earlier_twin: Vec<Option<usize>>,
    words: usize,
}

impl<'g> MinCodeSearch<'g> {
    fn new(graph: &'g PatternGraph, mode: Mode) -> Self {
        let mut earlier_twin = vec![None; graph.edges.len()];
        let mut last_seen = std::collections::HashMap::new();
        for (i, e) in graph.edges.iter().enumerate() {
            let key = match mode {
                Mode::Directed => (e.source, e.target, e.label),
                Mode::Undirected => (e.source.min(e.target), e.source.max(e.target), e.label),
            };
            earlier_twin[i] = last_seen.insert(key, i);
        }
        MinCodeSearch {
            graph,
            mode,
            earlier_twin,
            words: graph.edges.len().div_ceil(64),
        }
    }

    fn orientations(&self, edge: &PatternEdge) -> [(u32, u32, Direction); 2] {
        let back = match self.mode {
            Mode::Directed => Direction::In,
            Mode::Undirected => Direction::Out,
        };
        [
            (edge.source, edge.target, Direction::Out),
            (edge.target, edge.source, back),
        ]
    }

    fn label(&self, vertex: u32) -> u32 {
        self.graph.vertex_labels[vertex as usize]
    }

    fn initial_candidates(&self) -> Vec<(Extension, SearchState)> {
        let n = self.graph.vertex_labels.len();
        let mut out = Vec::new();
        for (i, e) in self.graph.edges.iter().enumerate() {
            if self.earlier_twin[i].is_some() {
                continue;
            }
            let is_loop = e.source == e.target;
            let orientations = self.orientations(e);
            let count = if is_loop { 1 } else { 2 };
            for &(a, b, direction) in &orientations[..count] {
                let mut state = SearchState {
                    time_to_vertex: vec![a],
                    vertex_to_time: vec![UNSEEN; n],
                    used: vec![0; self.words],
                    rightmost_path: vec![0],
                };
                state.vertex_to_time[a as usize] = 0;
                state.mark(i);
                let to_time = if is_loop {
                    0
                } else {
                    state.time_to_vertex.push(b);
                    state.vertex_to_time[b as usize] = 1;
                    state.rightmost_path.push(1);
                    1
                };
                let ext = Extension::new(
                    0,
                    to_time,
                    self.label(a),
                    direction,
                    e.label,
                    self.label(b),
                );
                out.push((ext, state));
            }
        }
        out
    }

    fn candidates(&self, state: &SearchState, out: &mut Vec<(Extension, SearchState)>) {
        let rightmost = (state.time_to_vertex.len() - 1) as u32;
        let rightmost_vertex = state.time_to_vertex[rightmost as usize];
        let next_time = state.time_to_vertex.len() as u32;
        for (i, e) in self.graph.edges.iter().enumerate() {
            if state.is_used(i) {
                continue;
            }
            if let Some(twin) = self.earlier_twin[i] {
                if !state.is_used(twin) {
                    continue;
                }
            }
            if e.source == e.target {
                if e.source == rightmost_vertex {
                    let l = self.label(e.source);
                    let mut next = state.clone();
                    next.mark(i);
                    out.push((
                        Extension::new(rightmost, rightmost, l, Direction::Out, e.label, l),
                        next,
                    ));
                }
                continue;
            }
            for (a, b, direction) in self.orientations(e) {
                let ta = state.vertex_to_time[a as usize];
                let tb = state.vertex_to_time[b as usize];
                if ta == UNSEEN {
                    continue;
                }
                if ta == rightmost && tb != UNSEEN {
                    if state.on_path(tb) {
                        let mut next = state.clone();
                        next.mark(i);
                        out.push((
                            Extension::new(
                                rightmost,
                                tb,
                                self.label(a),
                                direction,
                                e.label,
                                self.label(b),
                            ),
                            next,
                        ));
                    }
                } else if tb == UNSEEN && state.on_path(ta) {
                    let mut next = state.clone();
                    next.mark(i);
                    next.time_to_vertex.push(b);
                    next.vertex_to_time[b as usize] = next_time;
                    let keep = next
                        .rightmost_path
                        .iter()
                        .position(|&t| t == ta)
                        .expect("start lies on the rightmost path");
                    next.rightmost_path.truncate(keep + 1);
                    next.rightmost_path.push(next_time);
                    out.push((
                        Extension::new(
                            ta,
                            next_time,
                            self.label(a),
                            direction,
                            e.label,
                            self.label(b),
                        ),
                        next,
                    ));
                }
            }
        }
    }

    fn descend(&self, states: &[SearchState], code: &mut Vec<Extension>) -> bool {
        if code.len() == self.graph.edges.len() {
            return true;
        }
        let mut candidates = Vec::new();
        if code.is_empty() {
            candidates = self.initial_candidates();
        } else {
            for state in states {
                self.candidates(state, &mut candidates);
            }
        }
        if candidates.is_empty() {
            return false;
        }
        candidates.sort_by(|(x, _), (y, _)| compare_extension(x, y, self.mode));
        let mut start = 0;
        while start < candidates.len() {
            let ext = candidates[start].0;
            let mut end = start + 1;
            while end < candidates.len()
                && compare_extension(&candidates[end].0, &ext, self.mode) == Ordering::Equal
            {
                end += 1;
            }
            let group: Vec<SearchState> = candidates[start..end]
                .iter()
                .map(|(_, s)| s.clone())
                .collect();
            code.push(ext);
            if self.descend(&group, code) {
                return true;
            }
            code.pop();
            start = end;
        }
        false
    }
}
