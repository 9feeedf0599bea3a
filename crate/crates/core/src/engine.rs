//! The iterative mining dataflow.
//!
//! Graphs are split round-robin into worker partitions that never share
//! mutable state. Each iteration runs
//!
//! 1. report: every graph emits the keys of its current embedding map,
//! 2. combine: each partition counts its keys (one tuple per key),
//! 3. shuffle + reduce: tuples are routed to reducers by key hash and summed,
//! 4. filter: patterns below the minimum frequency are dropped,
//! 5. broadcast: the sorted frequent set is handed to every partition,
//! 6. growth: every graph extends the embeddings of its frequent patterns,
//! 7. obsolescence: graphs without any grown embedding leave the collection.
//!
//! Minimality verification runs at one configurable point of that pipeline;
//! codes failing it are discarded there and never grown.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;

use crate::canonical::{compare_code, is_minimal, DfsCode, Mode};
use crate::embedding::{EmbeddingMap, KeyCodec, PackedEmbeddingMap, PatternKey};
use crate::error::{Error, Result};
use crate::graph::{EncodedGraph, GraphCollection};
use crate::growth::{grow, BroadcastPattern, FrequentView};
use crate::intcompress::{self, CompressedBlock};
use crate::preprocess::{preprocess_with, Dictionary, PreprocessedGraph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    /// Fraction of the input graphs, in `(0, 1]`.
    Relative(f64),
    /// Minimum number of graphs.
    Absolute(usize),
}

impl Support {
    /// The minimum frequency for a collection of `graph_count` graphs,
    /// rounding a relative support up. Never below 1.
    pub fn min_frequency(&self, graph_count: usize) -> Result<usize> {
        match *self {
            Support::Relative(s) => {
                if !(s > 0.0 && s <= 1.0) {
                    return Err(Error::param(format!("relative support {s} is outside (0, 1]")));
                }
                // the epsilon absorbs float noise such as 0.1 * 30 = 3.0000000000000004
                let f = (s * graph_count as f64 - 1e-9).ceil();
                Ok((f as usize).max(1))
            }
            Support::Absolute(0) => Err(Error::param("minimum frequency must be at least 1")),
            Support::Absolute(f) => Ok(f),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VerificationPosition {
    /// Each graph verifies its keys before reporting them.
    PreReport,
    /// Each partition verifies its distinct keys after combining.
    #[default]
    PostCombine,
    /// Only patterns passing the frequency filter are verified.
    PostFilter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompressionFlags {
    pub patterns: bool,
    pub embeddings: bool,
    pub graphs: bool,
}

impl CompressionFlags {
    pub fn all() -> Self {
        CompressionFlags {
            patterns: true,
            embeddings: true,
            graphs: true,
        }
    }

    pub fn none() -> Self {
        CompressionFlags {
            patterns: false,
            embeddings: false,
            graphs: false,
        }
    }

    /// All eight flag combinations.
    pub fn combinations() -> impl Iterator<Item = CompressionFlags> {
        (0..8u8).map(|bits| CompressionFlags {
            patterns: bits & 1 != 0,
            embeddings: bits & 2 != 0,
            graphs: bits & 4 != 0,
        })
    }
}

impl Default for CompressionFlags {
    fn default() -> Self {
        CompressionFlags::all()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiningConfig {
    pub support: Support,
    pub mode: Mode,
    pub workers: usize,
    pub verification: VerificationPosition,
    pub compression: CompressionFlags,
    pub branch_check: bool,
    pub max_edge_count: Option<usize>,
}

impl MiningConfig {
    /// Directed mining with one worker per available core, post-combine
    /// verification, full compression and the branch constraint on.
    pub fn new(support: Support) -> Self {
        MiningConfig {
            support,
            mode: Mode::Directed,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            verification: VerificationPosition::default(),
            compression: CompressionFlags::default(),
            branch_check: true,
            max_edge_count: None,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_verification(mut self, verification: VerificationPosition) -> Self {
        self.verification = verification;
        self
    }

    pub fn with_compression(mut self, compression: CompressionFlags) -> Self {
        self.compression = compression;
        self
    }

    pub fn with_branch_check(mut self, branch_check: bool) -> Self {
        self.branch_check = branch_check;
        self
    }

    pub fn with_max_edge_count(mut self, max_edge_count: Option<usize>) -> Self {
        self.max_edge_count = max_edge_count;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::param("at least one worker is required"));
        }
        if self.max_edge_count == Some(0) {
            return Err(Error::param("maximum edge count must be at least 1"));
        }
        self.support.min_frequency(1).map(|_| ())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    Partition(usize),
    Global,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternCount {
    pub key: PatternKey,
    pub count: usize,
    pub scope: Scope,
}

/// Splits `items` into `n` sets round-robin by index.
pub fn partition<T>(items: Vec<T>, n: usize) -> Result<Vec<Vec<T>>> {
    if n == 0 {
        return Err(Error::param("partition count must be at least 1"));
    }
    let mut parts: Vec<Vec<T>> = (0..n).map(|_| Vec::new()).collect();
    for (i, item) in items.into_iter().enumerate() {
        parts[i % n].push(item);
    }
    Ok(parts)
}

/// Counts reported keys within one partition; one tuple per distinct key,
/// sorted by key.
pub fn combine<'a>(partition: usize, reported: impl IntoIterator<Item = &'a PatternKey>) -> Vec<PatternCount> {
    let mut counts: HashMap<&PatternKey, usize> = HashMap::new();
    for key in reported {
        *counts.entry(key).or_insert(0) += 1;
    }
    let mut out: Vec<PatternCount> = counts
        .into_iter()
        .map(|(key, count)| PatternCount {
            key: key.clone(),
            count,
            scope: Scope::Partition(partition),
        })
        .collect();
    out.sort_by(|a, b| a.key.cmp(&b.key));
    out
}

fn reducer_of(key: &PatternKey, reducers: usize) -> usize {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    (h.finish() % reducers as u64) as usize
}

/// Routes partition-scope tuples to `reducers` buckets by key hash, so all
/// tuples of one key meet in the same bucket.
pub fn shuffle(partials: Vec<Vec<PatternCount>>, reducers: usize) -> Vec<Vec<PatternCount>> {
    let reducers = reducers.max(1);
    let mut buckets: Vec<Vec<PatternCount>> = (0..reducers).map(|_| Vec::new()).collect();
    for tuple in partials.into_iter().flatten() {
        buckets[reducer_of(&tuple.key, reducers)].push(tuple);
    }
    buckets
}

/// Sums counts per key into global-scope tuples, sorted by key.
pub fn reduce(partials: impl IntoIterator<Item = PatternCount>) -> Vec<PatternCount> {
    let mut sums: HashMap<PatternKey, usize> = HashMap::new();
    for t in partials {
        *sums.entry(t.key).or_insert(0) += t.count;
    }
    let mut out: Vec<PatternCount> = sums
        .into_iter()
        .map(|(key, count)| PatternCount {
            key,
            count,
            scope: Scope::Global,
        })
        .collect();
    out.sort_by(|a, b| a.key.cmp(&b.key));
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationMetrics {
    /// Edge count `k` of the patterns handled in this iteration.
    pub edge_count: usize,
    pub active_graphs: usize,
    /// (graph, pattern) tuples reported.
    pub reported: usize,
    /// Distinct patterns present in any embedding map before verification.
    pub distinct_reported: usize,
    /// Partition-scope count tuples moved to reducers.
    pub shuffled: usize,
    /// Minimality verifications, each one minimum-code computation.
    pub isomorphism_resolutions: usize,
    /// Patterns meeting the minimum frequency, before any verification at
    /// the filter.
    pub passed_filter: usize,
    pub frequent: usize,
    /// Rightmost-path preparations done at broadcast reception.
    pub broadcast_preparations: usize,
    /// Graphs left after growth and the obsolescence filter; zero when the
    /// iteration ended the run.
    pub surviving_graphs: usize,
    pub grown_embeddings: usize,
    pub embedding_compression_ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metrics {
    pub input_graphs: usize,
    pub preprocessed_graphs: usize,
    pub min_frequency: usize,
    pub workers: usize,
    pub iterations: Vec<IterationMetrics>,
    /// Values per word when the frequent codes are Simple16-compressed.
    pub pattern_compression_ratio: Option<f64>,
}

impl Metrics {
    /// Per-iteration counters summed over the run; `edge_count` holds the
    /// number of iterations.
    pub fn totals(&self) -> IterationMetrics {
        let mut t = IterationMetrics {
            edge_count: self.iterations.len(),
            ..IterationMetrics::default()
        };
        for it in &self.iterations {
            t.active_graphs += it.active_graphs;
            t.reported += it.reported;
            t.distinct_reported += it.distinct_reported;
            t.shuffled += it.shuffled;
            t.isomorphism_resolutions += it.isomorphism_resolutions;
            t.passed_filter += it.passed_filter;
            t.frequent += it.frequent;
            t.broadcast_preparations += it.broadcast_preparations;
            t.surviving_graphs += it.surviving_graphs;
            t.grown_embeddings += it.grown_embeddings;
        }
        t
    }

    /// Key-value report: one line per iteration, then totals.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "run input_graphs={} preprocessed_graphs={} min_frequency={} workers={}",
            self.input_graphs, self.preprocessed_graphs, self.min_frequency, self.workers
        );
        for it in &self.iterations {
            let _ = writeln!(out, "iteration {}", format_counters(it));
        }
        let _ = writeln!(out, "total {}", format_counters(&self.totals()));
        let ratio = self
            .pattern_compression_ratio
            .map_or_else(|| "none".to_string(), |r| format!("{r:.4}"));
        let _ = writeln!(out, "compression pattern_ratio={ratio}");
        out
    }
}

fn format_counters(it: &IterationMetrics) -> String {
    let mut s = format!(
        "k={} active_graphs={} reported={} distinct_reported={} shuffled={} isomorphism_resolutions={} \
         passed_filter={} frequent={} broadcast_preparations={} surviving_graphs={} grown_embeddings={}",
        it.edge_count,
        it.active_graphs,
        it.reported,
        it.distinct_reported,
        it.shuffled,
        it.isomorphism_resolutions,
        it.passed_filter,
        it.frequent,
        it.broadcast_preparations,
        it.surviving_graphs,
        it.grown_embeddings
    );
    if let Some(r) = it.embedding_compression_ratio {
        let _ = write!(s, " embedding_ratio={r:.4}");
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequentPattern {
    pub code: DfsCode,
    pub frequency: usize,
    pub support: f64,
}

#[derive(Clone, Debug)]
pub struct MiningResult {
    /// Sorted ascending by code.
    pub frequent: Vec<FrequentPattern>,
    pub vertex_dict: Dictionary,
    pub edge_dict: Dictionary,
    pub mode: Mode,
    pub min_frequency: usize,
    pub graph_count: usize,
    pub metrics: Metrics,
}

impl MiningResult {
    /// `(code, frequency)` pairs, convenient for comparisons.
    pub fn code_frequencies(&self) -> Vec<(DfsCode, usize)> {
        self.frequent.iter().map(|p| (p.code.clone(), p.frequency)).collect()
    }

    /// One `code<TAB>frequency<TAB>support` line per pattern.
    pub fn to_result_file(&self) -> Result<String> {
        format_result_lines(&self.frequent, &self.vertex_dict, &self.edge_dict)
    }
}

pub fn format_result_lines(patterns: &[FrequentPattern], vertex_dict: &Dictionary, edge_dict: &Dictionary) -> Result<String> {
    let mut out = String::new();
    for p in patterns {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}",
            p.code.render(vertex_dict, edge_dict)?,
            p.frequency,
            p.support
        );
    }
    Ok(out)
}

enum StoredGraph {
    Plain(EncodedGraph),
    Packed {
        id: u64,
        block: CompressedBlock,
        vertex_count: usize,
        vertex_ids: Vec<u64>,
        edge_ids: Vec<u64>,
    },
}

impl StoredGraph {
    fn store(graph: EncodedGraph, compress: bool) -> Result<Self> {
        if !compress {
            return Ok(StoredGraph::Plain(graph));
        }
        let (id, edges, vertex_count, vertex_ids, edge_ids) = graph.into_parts();
        Ok(StoredGraph::Packed {
            id,
            block: intcompress::compress(&edges)?,
            vertex_count,
            vertex_ids,
            edge_ids,
        })
    }

    fn load(&self) -> Result<Cow<'_, EncodedGraph>> {
        match self {
            StoredGraph::Plain(g) => Ok(Cow::Borrowed(g)),
            StoredGraph::Packed {
                id,
                block,
                vertex_count,
                vertex_ids,
                edge_ids,
            } => EncodedGraph::from_parts(
                *id,
                intcompress::decompress(block)?,
                *vertex_count,
                vertex_ids.clone(),
                edge_ids.clone(),
            )
            .map(Cow::Owned),
        }
    }
}

enum StoredEmbeddings {
    Plain(EmbeddingMap),
    Packed(PackedEmbeddingMap),
}

impl StoredEmbeddings {
    fn store(map: EmbeddingMap, compress: bool) -> Result<Self> {
        Ok(if compress {
            StoredEmbeddings::Packed(map.pack()?)
        } else {
            StoredEmbeddings::Plain(map)
        })
    }

    fn take(&mut self) -> Result<EmbeddingMap> {
        match std::mem::replace(self, StoredEmbeddings::Plain(EmbeddingMap::new())) {
            StoredEmbeddings::Plain(m) => Ok(m),
            StoredEmbeddings::Packed(p) => p.unpack(),
        }
    }

    fn keys(&self) -> &[PatternKey] {
        match self {
            StoredEmbeddings::Plain(m) => m.keys(),
            StoredEmbeddings::Packed(p) => p.keys(),
        }
    }

    fn is_empty(&self) -> bool {
        self.keys().is_empty()
    }

    fn retain_keys(&mut self, keep: impl FnMut(&PatternKey) -> bool) {
        match self {
            StoredEmbeddings::Plain(m) => m.retain_keys(keep),
            StoredEmbeddings::Packed(p) => p.retain_keys(keep),
        }
    }

    fn packed_size(&self) -> (usize, usize) {
        match self {
            StoredEmbeddings::Plain(_) => (0, 0),
            StoredEmbeddings::Packed(p) => p
                .blocks()
                .iter()
                .fold((0, 0), |(v, w), b| (v + b.original_length(), w + b.word_count())),
        }
    }
}

struct Slot {
    graph: StoredGraph,
    embeddings: StoredEmbeddings,
}

struct PartitionReport {
    counts: Vec<PatternCount>,
    seen: Vec<PatternKey>,
    reported: usize,
    active: usize,
    verifications: usize,
}

struct GrowthReport {
    surviving: usize,
    embeddings: usize,
    packed_values: usize,
    packed_words: usize,
}

struct Worker<'a> {
    config: &'a MiningConfig,
    codec: KeyCodec,
}

impl Worker<'_> {
    fn verify(&self, key: &PatternKey, counter: &mut usize) -> Result<bool> {
        *counter += 1;
        Ok(is_minimal(&self.codec.decode(key)?, self.config.mode))
    }

    fn report(&self, index: usize, slots: &mut [Slot]) -> Result<PartitionReport> {
        let mut verifications = 0;
        let mut seen: HashSet<PatternKey> = HashSet::new();
        for slot in slots.iter_mut() {
            seen.extend(slot.embeddings.keys().iter().cloned());
            if self.config.verification == VerificationPosition::PreReport {
                let mut failure = None;
                slot.embeddings.retain_keys(|key| match self.verify(key, &mut verifications) {
                    Ok(keep) => keep,
                    Err(e) => {
                        failure.get_or_insert(e);
                        false
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
            }
        }
        let reported = slots.iter().map(|s| s.embeddings.keys().len()).sum();
        let mut counts = combine(index, slots.iter().flat_map(|s| s.embeddings.keys()));
        if self.config.verification == VerificationPosition::PostCombine {
            let mut kept = Vec::with_capacity(counts.len());
            for c in counts {
                if self.verify(&c.key, &mut verifications)? {
                    kept.push(c);
                }
            }
            counts = kept;
        }
        Ok(PartitionReport {
            counts,
            seen: seen.into_iter().collect(),
            reported,
            active: slots.len(),
            verifications,
        })
    }

    fn grow(&self, slots: &mut Vec<Slot>, broadcast: &[(PatternKey, DfsCode)]) -> Result<GrowthReport> {
        let patterns = broadcast
            .iter()
            .map(|(key, code)| BroadcastPattern::new(key.clone(), code.clone()))
            .collect::<Result<Vec<_>>>()?;
        let view = FrequentView::new(patterns, self.config.mode)?;
        let mut wanted: Vec<&PatternKey> = broadcast.iter().map(|(k, _)| k).collect();
        wanted.sort();

        let mut report = GrowthReport {
            surviving: 0,
            embeddings: 0,
            packed_values: 0,
            packed_words: 0,
        };
        for slot in slots.iter_mut() {
            let graph = slot.graph.load()?;
            let mut current = slot.embeddings.take()?;
            current.retain_keys(|k| wanted.binary_search(&k).is_ok());
            let next = grow(
                &graph,
                &current,
                &view,
                self.config.mode,
                self.config.branch_check,
                &self.codec,
            )?;
            report.embeddings += next.embedding_count();
            slot.embeddings = StoredEmbeddings::store(next, self.config.compression.embeddings)?;
            let (v, w) = slot.embeddings.packed_size();
            report.packed_values += v;
            report.packed_words += w;
        }
        slots.retain(|s| !s.embeddings.is_empty());
        report.surviving = slots.len();
        Ok(report)
    }
}

/// Mines every connected pattern occurring in at least the configured
/// number of graphs.
pub fn mine(collection: &GraphCollection, config: &MiningConfig) -> Result<MiningResult> {
    config.validate()?;
    let min_frequency = config.support.min_frequency(collection.len())?;
    let codec = KeyCodec {
        compress: config.compression.patterns,
    };
    let pre = preprocess_with(collection, min_frequency, config.mode, &codec)?;
    let mut metrics = Metrics {
        input_graphs: pre.input_graph_count,
        preprocessed_graphs: pre.graphs.len(),
        min_frequency,
        workers: config.workers,
        ..Metrics::default()
    };

    let mut partitions: Vec<Vec<Slot>> = partition(pre.graphs, config.workers)?
        .into_iter()
        .map(|graphs| {
            graphs
                .into_iter()
                .map(|PreprocessedGraph { graph, embeddings }| {
                    Ok(Slot {
                        graph: StoredGraph::store(graph, config.compression.graphs)?,
                        embeddings: StoredEmbeddings::store(embeddings, config.compression.embeddings)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let worker = Worker { config, codec };
    let mut frequent: Vec<(DfsCode, usize)> = Vec::new();
    let mut k = 1;
    while partitions.iter().any(|p| !p.is_empty()) {
        let at = |e: Error| Error::Iteration {
            iteration: k,
            source: Box::new(e),
        };
        let mut it = IterationMetrics {
            edge_count: k,
            ..IterationMetrics::default()
        };

        let reports = partitions
            .par_iter_mut()
            .enumerate()
            .map(|(w, slots)| worker.report(w, slots))
            .collect::<Result<Vec<_>>>()
            .map_err(at)?;
        let mut distinct: HashSet<&PatternKey> = HashSet::new();
        for r in &reports {
            it.reported += r.reported;
            it.active_graphs += r.active;
            it.isomorphism_resolutions += r.verifications;
            distinct.extend(r.seen.iter());
        }
        it.distinct_reported = distinct.len();
        drop(distinct);

        let partials: Vec<Vec<PatternCount>> = reports.into_iter().map(|r| r.counts).collect();
        it.shuffled = partials.iter().map(Vec::len).sum();
        let global: Vec<PatternCount> = shuffle(partials, config.workers)
            .into_par_iter()
            .flat_map_iter(reduce)
            .collect();

        let mut passed: Vec<(PatternKey, DfsCode, usize)> = Vec::new();
        for c in global.into_iter().filter(|c| c.count >= min_frequency) {
            it.passed_filter += 1;
            if config.verification == VerificationPosition::PostFilter
                && !worker.verify(&c.key, &mut it.isomorphism_resolutions).map_err(at)?
            {
                continue;
            }
            let code = codec.decode(&c.key).map_err(at)?;
            passed.push((c.key, code, c.count));
        }
        passed.sort_by(|a, b| compare_code(&a.1, &b.1, config.mode));
        if passed.windows(2).any(|w| compare_code(&w[0].1, &w[1].1, config.mode) == Ordering::Equal) {
            return Err(at(Error::contract("one code reported under two keys")));
        }
        it.frequent = passed.len();
        frequent.extend(passed.iter().map(|(_, code, count)| (code.clone(), *count)));

        if passed.is_empty() || config.max_edge_count == Some(k) {
            metrics.iterations.push(it);
            break;
        }

        let broadcast: Vec<(PatternKey, DfsCode)> = passed.into_iter().map(|(key, code, _)| (key, code)).collect();
        it.broadcast_preparations = broadcast.len() * partitions.len();
        let growth = partitions
            .par_iter_mut()
            .map(|slots| worker.grow(slots, &broadcast))
            .collect::<Result<Vec<_>>>()
            .map_err(at)?;
        let (mut values, mut words) = (0, 0);
        for g in &growth {
            it.surviving_graphs += g.surviving;
            it.grown_embeddings += g.embeddings;
            values += g.packed_values;
            words += g.packed_words;
        }
        if words > 0 {
            it.embedding_compression_ratio = Some(values as f64 / words as f64);
        }
        metrics.iterations.push(it);
        k += 1;
    }

    frequent.sort_by(|a, b| compare_code(&a.0, &b.0, config.mode));
    let blocks = frequent
        .iter()
        .map(|(code, _)| intcompress::compress(&code.to_flat()))
        .collect::<Result<Vec<_>>>()?;
    metrics.pattern_compression_ratio = intcompress::compression_ratio(&blocks).ok();

    let graph_count = pre.input_graph_count;
    Ok(MiningResult {
        frequent: frequent
            .into_iter()
            .map(|(code, frequency)| FrequentPattern {
                support: frequency as f64 / graph_count as f64,
                code,
                frequency,
            })
            .collect(),
        vertex_dict: pre.vertex_dict,
        edge_dict: pre.edge_dict,
        mode: config.mode,
        min_frequency,
        graph_count,
        metrics,
    })
}
