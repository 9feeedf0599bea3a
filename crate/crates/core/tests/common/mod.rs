#![allow(dead_code)]

use fsm_core::{GraphCollection, LabeledGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PENDANT_PAIR: &str = "t # 1\nv 1 A\nv 2 A\nv 3 A\nv 4 B\ne 1 2 a\ne 2 3 a\ne 3 1 a\ne 2 4 b\n\
                            t # 2\nv 1 A\nv 2 A\nv 3 A\nv 4 B\ne 1 2 a\ne 2 3 a\ne 3 1 a\ne 3 4 b\n";

/// Parameters of one randomized small collection.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub graphs: usize,
    pub vertex_labels: usize,
    pub edge_labels: usize,
}

/// A random collection: `graphs` graphs of 2–8 edges over up to 6 vertices,
/// loops and parallel edges allowed.
pub fn random_collection(rng: &mut ChaCha8Rng, shape: Shape) -> GraphCollection {
    let graphs = (0..shape.graphs)
        .map(|i| {
            let mut g = LabeledGraph::new(i as u64);
            let n = rng.gen_range(2..=6u64);
            for v in 0..n {
                g.add_vertex(v, ((b'A' + rng.gen_range(0..shape.vertex_labels) as u8) as char).to_string());
            }
            for _ in 0..rng.gen_range(2..=8) {
                let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
                g.add_edge(s, t, ((b'a' + rng.gen_range(0..shape.edge_labels) as u8) as char).to_string());
            }
            g
        })
        .collect();
    GraphCollection::new(graphs).unwrap()
}

pub fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    Shape {
        graphs: rng.gen_range(3..=12),
        vertex_labels: rng.gen_range(2..=4),
        edge_labels: rng.gen_range(1..=3),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
