//! Seeded instance generators for experiments, benchmarks, and tests.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::instance::{MetricInstance, RawSiteGraph};

/// Instance whose vertices sit at the given positions on a line, with
/// pairwise absolute distance as the metric.
pub fn line_instance(
    positions: &[f64],
    depots: &[usize],
    k: usize,
    epsilon: f64,
) -> MetricInstance {
    let matrix: Vec<Vec<f64>> = positions
        .iter()
        .map(|&a| positions.iter().map(|&b| (a - b).abs()).collect())
        .collect();
    MetricInstance::new(matrix, depots.to_vec(), k, epsilon).expect("line instance shape")
}

/// Random geometric instance: `n` points uniform in the unit square with the
/// Euclidean metric. Depots are the `m` points nearest the square's corners,
/// cycling through the corners.
pub fn geometric_instance(n: usize, m: usize, k: usize, epsilon: f64, seed: u64) -> MetricInstance {
    assert!(m >= 1 && m <= n, "need 1 <= m <= n, got m = {m}, n = {n}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();

    const CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut chosen = vec![false; n];
    let mut depots = Vec::with_capacity(m);
    for i in 0..m {
        let (cx, cy) = CORNERS[i % 4];
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (id, &(x, y)) in points.iter().enumerate() {
            if chosen[id] {
                continue;
            }
            let d = (x - cx).powi(2) + (y - cy).powi(2);
            if d < best_d {
                best = id;
                best_d = d;
            }
        }
        chosen[best] = true;
        depots.push(best);
    }

    let matrix: Vec<Vec<f64>> = points
        .iter()
        .map(|&(ax, ay)| {
            points
                .iter()
                .map(|&(bx, by)| ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt())
                .collect()
        })
        .collect();
    MetricInstance::new(matrix, depots, k, epsilon).expect("geometric instance shape")
}

/// Random connected sparse graph: a random spanning tree plus roughly
/// `extra_per_vertex * n` additional edges, weights uniform in (0, 1].
/// The first vertex is the sole depot.
pub fn random_connected_graph(n: usize, seed: u64, extra_per_vertex: f64) -> RawSiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.push((parent, v, positive_weight(&mut rng)));
    }
    let extra = ((n as f64) * extra_per_vertex) as usize;
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            let (a, b) = (u.min(v), u.max(v));
            if !edges.iter().any(|&(x, y, _)| (x, y) == (a, b)) {
                edges.push((a, b, positive_weight(&mut rng)));
            }
        }
    }
    RawSiteGraph::new(n, edges, vec![0]).expect("generated graph is structurally valid")
}

/// Random metric instance obtained by closing a random connected graph, with
/// `m` depots drawn uniformly without replacement.
pub fn random_metric_instance(
    n: usize,
    m: usize,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> MetricInstance {
    assert!(m >= 1 && m <= n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let raw = random_connected_graph(n, seed, 1.5);
    let matrix = crate::instance::metric_closure(&raw).expect("generated graph is connected");
    let mut depots: Vec<usize> = rand::seq::index::sample(&mut rng, n, m).into_vec();
    depots.sort_unstable();
    MetricInstance::new(matrix, depots, k, epsilon).expect("closed instance shape")
}

/// Uniform random labeled tree on `n` vertices (random parent construction)
/// with edge weights uniform in (0, 1].
pub fn random_weighted_tree(n: usize, seed: u64) -> Vec<(usize, usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..n)
        .map(|v| {
            let parent = rng.random_range(0..v);
            (parent, v, positive_weight(&mut rng))
        })
        .collect()
}

fn positive_weight(rng: &mut ChaCha8Rng) -> f64 {
    // random::<f64>() is in [0, 1); flip to (0, 1] so weights are never zero.
    1.0 - rng.random::<f64>()
}
