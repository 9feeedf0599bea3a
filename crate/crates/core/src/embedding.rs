//! Per-graph pattern → embeddings maps.
//!
//! A map is a pair of parallel arrays: pattern keys and, at the same index,
//! one multiplexed integer sequence holding every embedding of that pattern.
//! For a pattern with `j` vertices and `k` edges each embedding occupies
//! `j + k` consecutive slots: the graph vertex discovered at time `t` sits at
//! offset `t`, the graph edge matched by extension `i` at offset `j + i`.
//! Entries are kept sorted by key so lookups are binary searches over the
//! (possibly compressed) key bytes.

use crate::canonical::DfsCode;
use crate::error::{Error, Result};
use crate::intcompress::{self, CompressedBlock};

/// Pattern identity as used for map access and counting: the flat integer
/// code, optionally Simple16-compressed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternKey {
    Plain(Vec<u32>),
    Packed(CompressedBlock),
}

impl PatternKey {
    pub fn packed_block(&self) -> Option<&CompressedBlock> {
        match self {
            PatternKey::Packed(b) => Some(b),
            PatternKey::Plain(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KeyCodec {
    pub compress: bool,
}

impl KeyCodec {
    pub fn plain() -> Self {
        KeyCodec { compress: false }
    }

    pub fn packed() -> Self {
        KeyCodec { compress: true }
    }

    pub fn encode(&self, code: &DfsCode) -> Result<PatternKey> {
        self.encode_flat(code.to_flat())
    }

    pub fn encode_flat(&self, flat: Vec<u32>) -> Result<PatternKey> {
        if self.compress {
            intcompress::compress(&flat).map(PatternKey::Packed)
        } else {
            Ok(PatternKey::Plain(flat))
        }
    }

    pub fn decode(&self, key: &PatternKey) -> Result<DfsCode> {
        match key {
            PatternKey::Plain(flat) => DfsCode::from_flat(flat),
            PatternKey::Packed(block) => DfsCode::from_flat(&intcompress::decompress(block)?),
        }
    }
}

/// Vertex and edge count of a pattern, which fixes the embedding width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub vertices: u32,
    pub edges: u32,
}

impl Shape {
    pub fn of(code: &DfsCode) -> Self {
        Shape {
            vertices: code.vertex_count() as u32,
            edges: code.edge_count() as u32,
        }
    }

    pub fn width(&self) -> usize {
        (self.vertices + self.edges) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    /// Graph vertex per discovery time.
    pub vertices: Vec<u32>,
    /// Graph edge per extension index.
    pub edges: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmbeddingMap {
    patterns: Vec<PatternKey>,
    shapes: Vec<Shape>,
    embeddings: Vec<Vec<u32>>,
}

impl EmbeddingMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn keys(&self) -> &[PatternKey] {
        &self.patterns
    }

    pub fn position(&self, key: &PatternKey) -> Option<usize> {
        self.patterns.binary_search(key).ok()
    }

    pub fn shape_at(&self, index: usize) -> Shape {
        self.shapes[index]
    }

    pub fn multiplexed_at(&self, index: usize) -> &[u32] {
        &self.embeddings[index]
    }

    pub fn embedding_count(&self) -> usize {
        self.shapes
            .iter()
            .zip(&self.embeddings)
            .map(|(s, e)| e.len() / s.width())
            .sum()
    }

    pub fn add_embedding(
        &mut self,
        codec: &KeyCodec,
        code: &DfsCode,
        vertices: &[u32],
        edges: &[u32],
    ) -> Result<()> {
        let key = codec.encode(code)?;
        self.add_keyed(key, Shape::of(code), vertices, edges)
    }

    pub fn add_keyed(
        &mut self,
        key: PatternKey,
        shape: Shape,
        vertices: &[u32],
        edges: &[u32],
    ) -> Result<()> {
        if vertices.len() != shape.vertices as usize || edges.len() != shape.edges as usize {
            return Err(Error::contract(format!(
                "embedding arity ({}, {}) does not match pattern shape ({}, {})",
                vertices.len(),
                edges.len(),
                shape.vertices,
                shape.edges
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if edges[..i].contains(e) {
                return Err(Error::contract(format!("edge {e} mapped twice in one embedding")));
            }
        }
        let index = match self.patterns.binary_search(&key) {
            Ok(i) => {
                if self.shapes[i] != shape {
                    return Err(Error::contract("pattern key registered with another shape"));
                }
                i
            }
            Err(i) => {
                self.patterns.insert(i, key);
                self.shapes.insert(i, shape);
                self.embeddings.insert(i, Vec::new());
                i
            }
        };
        let slot = &mut self.embeddings[index];
        slot.extend_from_slice(vertices);
        slot.extend_from_slice(edges);
        Ok(())
    }

    /// Builds a map from unsorted, already multiplexed entries with distinct keys.
    pub(crate) fn from_entries(mut entries: Vec<(PatternKey, Shape, Vec<u32>)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut map = EmbeddingMap::new();
        for (key, shape, data) in entries {
            debug_assert_eq!(data.len() % shape.width(), 0);
            map.patterns.push(key);
            map.shapes.push(shape);
            map.embeddings.push(data);
        }
        map
    }

    pub fn embeddings_at(&self, index: usize) -> impl Iterator<Item = Embedding> + '_ {
        let shape = self.shapes[index];
        let j = shape.vertices as usize;
        self.embeddings[index]
            .chunks_exact(shape.width())
            .map(move |chunk| Embedding {
                vertices: chunk[..j].to_vec(),
                edges: chunk[j..].to_vec(),
            })
    }

    /// All embeddings of `code` in insertion order; empty when absent.
    pub fn enumerate(&self, codec: &KeyCodec, code: &DfsCode) -> Result<Vec<Embedding>> {
        let key = codec.encode(code)?;
        Ok(match self.position(&key) {
            Some(i) => self.embeddings_at(i).collect(),
            None => Vec::new(),
        })
    }

    /// Keeps only entries whose key is in `frequent`.
    pub fn filter_to_frequent(&self, frequent: &[PatternKey]) -> EmbeddingMap {
        let mut wanted: Vec<&PatternKey> = frequent.iter().collect();
        wanted.sort();
        let mut out = EmbeddingMap::new();
        for i in 0..self.patterns.len() {
            if wanted.binary_search(&&self.patterns[i]).is_ok() {
                out.patterns.push(self.patterns[i].clone());
                out.shapes.push(self.shapes[i]);
                out.embeddings.push(self.embeddings[i].clone());
            }
        }
        out
    }

    pub(crate) fn retain_keys(&mut self, keep: impl FnMut(&PatternKey) -> bool) {
        let mask: Vec<bool> = self.patterns.iter().map(keep).collect();
        retain_masked(&mut self.patterns, &mask);
        retain_masked(&mut self.shapes, &mask);
        retain_masked(&mut self.embeddings, &mask);
    }

    pub fn pack(&self) -> Result<PackedEmbeddingMap> {
        Ok(PackedEmbeddingMap {
            patterns: self.patterns.clone(),
            shapes: self.shapes.clone(),
            blocks: self
                .embeddings
                .iter()
                .map(|e| intcompress::compress(e))
                .collect::<Result<_>>()?,
        })
    }
}

/// An embedding map whose multiplexed sequences are Simple16 blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackedEmbeddingMap {
    patterns: Vec<PatternKey>,
    shapes: Vec<Shape>,
    blocks: Vec<CompressedBlock>,
}

impl PackedEmbeddingMap {
    pub fn keys(&self) -> &[PatternKey] {
        &self.patterns
    }

    pub fn blocks(&self) -> &[CompressedBlock] {
        &self.blocks
    }

    pub fn unpack(&self) -> Result<EmbeddingMap> {
        Ok(EmbeddingMap {
            patterns: self.patterns.clone(),
            shapes: self.shapes.clone(),
            embeddings: self
                .blocks
                .iter()
                .map(intcompress::decompress)
                .collect::<Result<_>>()?,
        })
    }

    pub(crate) fn retain_keys(&mut self, keep: impl FnMut(&PatternKey) -> bool) {
        let mask: Vec<bool> = self.patterns.iter().map(keep).collect();
        retain_masked(&mut self.patterns, &mask);
        retain_masked(&mut self.shapes, &mask);
        retain_masked(&mut self.blocks, &mask);
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

fn retain_masked<T>(items: &mut Vec<T>, mask: &[bool]) {
    let mut flags = mask.iter();
    items.retain(|_| *flags.next().unwrap());
}
