#![allow(dead_code)]

use cube_rigidity::WeightedGraph;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph on `n` vertices: a random spanning tree plus extra edges
/// with probability `p`, weights and measures uniform in `[0.5, 2]`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> WeightedGraph {
    let id = |i: usize| format!("v{i:02}");
    let vertices = (0..n).map(|i| (id(i), rng.gen_range(0.5..2.0))).collect();
    let mut pairs = std::collections::BTreeSet::new();
    for i in 1..n {
        pairs.insert((rng.gen_range(0..i), i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                pairs.insert((i, j));
            }
        }
    }
    let edges = pairs.into_iter().map(|(i, j)| (id(i), id(j), rng.gen_range(0.5..2.0))).collect();
    WeightedGraph::build(vertices, edges, false).unwrap()
}

pub fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn distances(g: &WeightedGraph, x: usize) -> Vec<f64> {
    g.distances_from(x).unwrap().into_iter().map(|k| k as f64).collect()
}
