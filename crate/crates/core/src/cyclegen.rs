//! Cycle generation: attach depot-less subtrees to their nearest depot, then
//! turn every rooted tree into a depot-rooted cycle by doubling its edges and
//! shortcutting repeated vertices out of the Euler tour.

use serde::Serialize;

use crate::decompose::DecomposedForest;
use crate::forest::RootedTree;
use crate::instance::MetricInstance;

/// Whether a cycle may visit depots other than its root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepotRule {
    /// Exactly one depot per cycle (the formal constraint).
    ExactlyOne,
    /// The designated root must be a depot; other depots may appear as
    /// interior vertices. This is what merged candidate trees produce.
    RootOnly,
}

/// Closed route starting and ending at its root depot. Degenerate forms are
/// `[d]` (weight 0) and `[d, v, d]` (weight `2 w(d, v)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cycle {
    pub root: usize,
    pub route: Vec<usize>,
    pub weight: f64,
}

impl Cycle {
    /// Undirected edges of the route, deduplicated; the degenerate two-vertex
    /// cycle contributes its sole edge once.
    pub fn edge_set(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .route
            .windows(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn recompute_weight(&self, inst: &MetricInstance) -> f64 {
        self.route.windows(2).map(|p| inst.w(p[0], p[1])).sum()
    }
}

/// A set of depot-rooted cycles covering the vertex set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleCover {
    pub cycles: Vec<Cycle>,
    pub max_weight: f64,
}

impl CycleCover {
    pub fn new(cycles: Vec<Cycle>) -> Self {
        let max_weight = cycles.iter().map(|c| c.weight).fold(0.0f64, f64::max);
        Self { cycles, max_weight }
    }
}

/// Roots every subtree at a depot. Subtrees already containing a depot keep
/// their lowest-id depot as root; each depot-less subtree gains the cheapest
/// depot-to-vertex edge (ties: lowest depot id, then lowest vertex id).
pub fn attach_depots(forest: &DecomposedForest, inst: &MetricInstance) -> Vec<RootedTree> {
    forest
        .subtrees
        .iter()
        .map(|st| {
            if let Some(&d) = st.vertices.iter().find(|&&v| inst.is_depot(v)) {
                return RootedTree {
                    root: d,
                    vertices: st.vertices.clone(),
                    edges: st.edges.clone(),
                    weight: st.weight,
                };
            }
            let mut best = (f64::INFINITY, usize::MAX, usize::MAX);
            for &d in inst.depots() {
                for &v in &st.vertices {
                    let w = inst.w(d, v);
                    if w < best.0 {
                        best = (w, d, v);
                    }
                }
            }
            let (w, d, v) = best;
            let mut vertices = st.vertices.clone();
            vertices.insert(vertices.binary_search(&d).unwrap_err(), d);
            let mut edges = st.edges.clone();
            edges.push((d, v));
            RootedTree {
                root: d,
                vertices,
                edges,
                weight: st.weight + w,
            }
        })
        .collect()
}

/// Doubled-edge Euler tour with shortcutting: depth-first preorder from the
/// root with children visited in ascending id, closed back to the root.
/// The resulting cycle weighs at most twice the tree.
pub fn tree_to_cycle(tree: &RootedTree, inst: &MetricInstance) -> Cycle {
    if tree.vertices.len() == 1 {
        return Cycle {
            root: tree.root,
            route: vec![tree.root],
            weight: 0.0,
        };
    }
    let idx = |v: usize| tree.vertices.binary_search(&v).expect("tree vertex");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); tree.vertices.len()];
    for &(u, v) in &tree.edges {
        adj[idx(u)].push(idx(v));
        adj[idx(v)].push(idx(u));
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
    }

    let mut route = Vec::with_capacity(tree.vertices.len() + 1);
    let mut visited = vec![false; tree.vertices.len()];
    let mut stack = vec![idx(tree.root)];
    while let Some(v) = stack.pop() {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        route.push(tree.vertices[v]);
        for &c in adj[v].iter().rev() {
            if !visited[c] {
                stack.push(c);
            }
        }
    }
    route.push(tree.root);
    let weight = route.windows(2).map(|p| inst.w(p[0], p[1])).sum();
    Cycle {
        root: tree.root,
        route,
        weight,
    }
}

/// Full cycle generation for a decomposed forest: depot attachment followed
/// by one cycle per tree.
pub fn cover_from_forest(forest: &DecomposedForest, inst: &MetricInstance) -> CycleCover {
    let cycles = attach_depots(forest, inst)
        .iter()
        .map(|t| tree_to_cycle(t, inst))
        .collect();
    CycleCover::new(cycles)
}

/// Graphviz rendering of a cover, one color per cycle.
pub fn cover_to_dot(cover: &CycleCover, inst: &MetricInstance) -> String {
    const COLORS: [&str; 8] = [
        "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#9a6324",
    ];
    let mut out = String::from("graph cover {\n  node [shape=circle];\n");
    for &d in inst.depots() {
        out.push_str(&format!("  {d} [shape=doublecircle];\n"));
    }
    for (i, cycle) in cover.cycles.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for pair in cycle.route.windows(2) {
            out.push_str(&format!(
                "  {} -- {} [color=\"{color}\", label=\"{}\"];\n",
                pair[0],
                pair[1],
                inst.w(pair[0], pair[1])
            ));
        }
    }
    out.push_str("}\n");
    out
}
