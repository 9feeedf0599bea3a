//! Frequent subgraph mining over graph collections.
//!
//! Patterns are identified by minimum DFS codes and grown level-wise from
//! their embeddings. Each iteration runs as a partitioned dataflow: graphs
//! report their patterns, partitions pre-aggregate counts, a shuffle sums
//! them globally, and the frequent set is broadcast back for the next round
//! of growth.
//!
//! ```
//! use fsm_core::{mine, parse_tlf, MiningConfig, Mode, Support};
//!
//! let input = "t # 1\nv 1 A\nv 2 B\ne 1 2 x\nt # 2\nv 1 A\nv 2 B\ne 2 1 x\n";
//! let graphs = parse_tlf(input).unwrap();
//! let config = MiningConfig::new(Support::Absolute(2)).with_mode(Mode::Undirected);
//! let result = mine(&graphs, &config).unwrap();
//! assert_eq!(result.frequent.len(), 1);
//! assert_eq!(result.frequent[0].frequency, 2);
//! ```

pub mod canonical;
pub mod embedding;
pub mod engine;
pub mod error;
pub mod genbench;
pub mod graph;
pub mod growth;
pub mod intcompress;
pub mod preprocess;

pub use canonical::{compare_code, is_minimal, min_dfs_code, DfsCode, Direction, Extension, Mode, PatternGraph};
pub use engine::{mine, CompressionFlags, FrequentPattern, Metrics, MiningConfig, MiningResult, Support, VerificationPosition};
pub use error::{Error, Result};
pub use genbench::{generate, oracle_mine, GeneratorConfig, OracleConfig};
pub use graph::{parse_tlf, write_tlf, GraphCollection, LabeledGraph};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/getting-started.md")]
    mod getting_started {}
    #[doc = include_str!("../../../book/src/dfs-codes.md")]
    mod dfs_codes {}
    #[doc = include_str!("../../../book/src/growth.md")]
    mod growth {}
    #[doc = include_str!("../../../book/src/dataflow.md")]
    mod dataflow {}
    #[doc = include_str!("../../../book/src/compression.md")]
    mod compression {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
}
