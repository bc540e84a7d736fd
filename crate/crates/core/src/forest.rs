//! Rooted spanning forests and candidate enumeration.
//!
//! Construction proceeds in two stages. First all depots are collapsed into a
//! single node, a minimum spanning tree of the collapsed graph is built with
//! Prim's algorithm, and the collapsed node is uncoupled back into the
//! original depots, yielding a minimum rooted spanning forest with one tree
//! per depot. Second, a greedy pass selects the `m - 1` cheapest inter-tree
//! connector edges; the `2^(m-1)` subsets of that connector set index every
//! candidate forest the solver later searches.

use crate::instance::MetricInstance;

/// Tree with a designated depot root. Vertices are kept sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    pub root: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub weight: f64,
}

impl RootedTree {
    pub fn singleton(root: usize) -> Self {
        Self {
            root,
            vertices: vec![root],
            edges: Vec::new(),
            weight: 0.0,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Largest edge weight, 0 for edgeless trees.
    pub fn w_max_edge(&self, inst: &MetricInstance) -> f64 {
        self.edges
            .iter()
            .map(|&(u, v)| inst.w(u, v))
            .fold(0.0f64, f64::max)
    }

    /// Sum of edge weights looked up from the instance.
    pub fn recompute_weight(&self, inst: &MetricInstance) -> f64 {
        self.edges.iter().map(|&(u, v)| inst.w(u, v)).sum()
    }
}

/// Set of vertex-disjoint rooted trees.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedForest {
    pub trees: Vec<RootedTree>,
}

impl RootedForest {
    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.trees.iter().map(|t| t.weight).sum()
    }

    pub fn w_max_edge(&self, inst: &MetricInstance) -> f64 {
        self.trees
            .iter()
            .map(|t| t.w_max_edge(inst))
            .fold(0.0f64, f64::max)
    }
}

/// One edge chosen by the greedy connector pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectorEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// The `m - 1` connector edges in selection order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectorEdgeSet {
    pub edges: Vec<ConnectorEdge>,
}

/// A forest obtained by merging the base forest along a subset of connector
/// edges. `mask` bit `i` selects connector `i`; masks double as candidate ids.
#[derive(Debug, Clone)]
pub struct ForestCandidate {
    pub mask: u64,
    pub forest: RootedForest,
}

impl ForestCandidate {
    pub fn selected_connectors(&self) -> Vec<usize> {
        (0..64).filter(|i| self.mask >> i & 1 == 1).collect()
    }

    pub fn w_max_edge(&self, inst: &MetricInstance) -> f64 {
        self.forest.w_max_edge(inst)
    }
}

/// Builds the minimum rooted spanning forest with one tree per depot.
///
/// Collapses the depots into a single node `d_hat` with
/// `w(d_hat, v) = min_d w(d, v)`, runs dense Prim on the collapsed graph, and
/// replaces every `(d_hat, v)` tree edge by `(nearest depot, v)`. Ties break
/// to the smallest (min endpoint, max endpoint) pair, with the collapsed node
/// ordered before all sites, and to the lowest depot id when uncoupling.
pub fn build_rooted_spanning_forest(inst: &MetricInstance) -> RootedForest {
    let n = inst.n();
    let sites: Vec<usize> = inst.sites().collect();
    if sites.is_empty() {
        return RootedForest {
            trees: inst
                .depots()
                .iter()
                .map(|&d| RootedTree::singleton(d))
                .collect(),
        };
    }

    // Compact index space: 0 is the collapsed depot node, 1..=s the sites.
    let s = sites.len();
    let hat_w = |ci: usize, cj: usize| -> f64 {
        if ci == 0 {
            inst.w(inst.nearest_depot(sites[cj - 1]), sites[cj - 1])
        } else if cj == 0 {
            inst.w(inst.nearest_depot(sites[ci - 1]), sites[ci - 1])
        } else {
            inst.w(sites[ci - 1], sites[cj - 1])
        }
    };

    let mut in_tree = vec![false; s + 1];
    let mut best_w = vec![f64::INFINITY; s + 1];
    let mut best_from = vec![0usize; s + 1];
    in_tree[0] = true;
    for (ci, slot) in best_w.iter_mut().enumerate().skip(1) {
        *slot = hat_w(0, ci);
    }
    let mut collapsed_edges: Vec<(usize, usize)> = Vec::with_capacity(s);
    for _ in 0..s {
        let mut pick: Option<(f64, usize, usize, usize)> = None;
        for ci in 1..=s {
            if in_tree[ci] {
                continue;
            }
            let (a, b) = (best_from[ci].min(ci), best_from[ci].max(ci));
            let better = match pick {
                None => true,
                Some((w, pa, pb, _)) => best_w[ci] < w || (best_w[ci] == w && (a, b) < (pa, pb)),
            };
            if better {
                pick = Some((best_w[ci], a, b, ci));
            }
        }
        let (_, _, _, ci) = pick.expect("complete collapsed graph is connected");
        in_tree[ci] = true;
        collapsed_edges.push((best_from[ci], ci));
        for cj in 1..=s {
            if in_tree[cj] {
                continue;
            }
            let w = hat_w(ci, cj);
            let new_pair = (ci.min(cj), ci.max(cj));
            let old_pair = (best_from[cj].min(cj), best_from[cj].max(cj));
            if w < best_w[cj] || (w == best_w[cj] && new_pair < old_pair) {
                best_w[cj] = w;
                best_from[cj] = ci;
            }
        }
    }

    // Uncouple: map compact edges back to original ids, routing collapsed-node
    // edges to each site's nearest depot.
    let edges: Vec<(usize, usize)> = collapsed_edges
        .iter()
        .map(|&(a, b)| {
            let (hub, site) = if a == 0 {
                (a, b)
            } else if b == 0 {
                (b, a)
            } else {
                (a, b)
            };
            if hub == 0 {
                let v = sites[site - 1];
                (inst.nearest_depot(v), v)
            } else {
                (sites[a - 1], sites[b - 1])
            }
        })
        .collect();

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut trees = Vec::with_capacity(inst.m());
    let mut seen = vec![false; n];
    for &d in inst.depots() {
        let mut verts = Vec::new();
        let mut tree_edges = Vec::new();
        let mut stack = vec![d];
        seen[d] = true;
        while let Some(u) = stack.pop() {
            verts.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    tree_edges.push((u, v));
                    stack.push(v);
                }
            }
        }
        verts.sort_unstable();
        let weight = tree_edges.iter().map(|&(u, v)| inst.w(u, v)).sum();
        trees.push(RootedTree {
            root: d,
            vertices: verts,
            edges: tree_edges,
            weight,
        });
    }
    debug_assert!(seen.iter().all(|&b| b), "forest must span all vertices");
    RootedForest { trees }
}

/// Greedy connector selection: repeatedly add the globally minimum-weight
/// edge joining two distinct trees and merge them, `m - 1` times. Ties break
/// by (weight, min endpoint id, max endpoint id).
pub fn build_connector_edges(inst: &MetricInstance, fstar: &RootedForest) -> ConnectorEdgeSet {
    let n = inst.n();
    let m = fstar.tree_count();
    let mut comp = vec![0usize; n];
    for (ti, t) in fstar.trees.iter().enumerate() {
        for &v in &t.vertices {
            comp[v] = ti;
        }
    }
    let mut dsu = Dsu::new(m);
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    for _ in 1..m {
        let mut best: Option<(f64, usize, usize)> = None;
        for u in 0..n {
            for v in (u + 1)..n {
                if dsu.find(comp[u]) == dsu.find(comp[v]) {
                    continue;
                }
                let w = inst.w(u, v);
                let better = match best {
                    None => true,
                    Some((bw, bu, bv)) => w < bw || (w == bw && (u, v) < (bu, bv)),
                };
                if better {
                    best = Some((w, u, v));
                }
            }
        }
        let (weight, u, v) = best.expect("forest still has multiple trees");
        dsu.union(comp[u], comp[v]);
        edges.push(ConnectorEdge { u, v, weight });
    }
    ConnectorEdgeSet { edges }
}

/// All `2^(m-1)` candidate forests in ascending subset-mask order. Mask 0 is
/// the base forest itself; the full mask is a single spanning tree. A merged
/// tree is rooted at the lowest-id depot it contains.
pub fn enumerate_candidates(fstar: &RootedForest, conn: &ConnectorEdgeSet) -> Vec<ForestCandidate> {
    let m = fstar.tree_count();
    assert_eq!(
        conn.edges.len(),
        m - 1,
        "connector set must have m - 1 edges"
    );
    assert!(m <= 63, "candidate enumeration is limited to 63 depots");

    let max_vertex = fstar
        .trees
        .iter()
        .flat_map(|t| t.vertices.iter().copied())
        .max()
        .unwrap_or(0);
    let mut tree_of = vec![usize::MAX; max_vertex + 1];
    for (ti, t) in fstar.trees.iter().enumerate() {
        for &v in &t.vertices {
            tree_of[v] = ti;
        }
    }

    let mut candidates = Vec::with_capacity(1usize << (m - 1));
    for mask in 0u64..(1u64 << (m - 1)) {
        let mut dsu = Dsu::new(m);
        for (i, e) in conn.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                dsu.union(tree_of[e.u], tree_of[e.v]);
            }
        }
        // Group base trees and selected connectors by merged component.
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m];
        for ti in 0..m {
            groups[dsu.find(ti)].push(ti);
        }
        let mut group_conns: Vec<Vec<&ConnectorEdge>> = vec![Vec::new(); m];
        for (i, e) in conn.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                group_conns[dsu.find(tree_of[e.u])].push(e);
            }
        }
        let mut trees = Vec::with_capacity(m - mask.count_ones() as usize);
        for rep in 0..m {
            if groups[rep].is_empty() {
                continue;
            }
            let mut vertices = Vec::new();
            let mut edges = Vec::new();
            let mut weight = 0.0;
            let mut root = usize::MAX;
            for &ti in &groups[rep] {
                let t = &fstar.trees[ti];
                vertices.extend_from_slice(&t.vertices);
                edges.extend_from_slice(&t.edges);
                weight += t.weight;
                root = root.min(t.root);
            }
            for e in &group_conns[rep] {
                edges.push((e.u, e.v));
                weight += e.weight;
            }
            vertices.sort_unstable();
            trees.push(RootedTree {
                root,
                vertices,
                edges,
                weight,
            });
        }
        trees.sort_by_key(|t| t.root);
        candidates.push(ForestCandidate {
            mask,
            forest: RootedForest { trees },
        });
    }
    candidates
}

/// Graphviz rendering of a forest; depots are drawn as double circles and
/// edges carry their weights.
pub fn forest_to_dot(forest: &RootedForest, inst: &MetricInstance) -> String {
    let mut out = String::from("graph forest {\n  node [shape=circle];\n");
    for &d in inst.depots() {
        out.push_str(&format!("  {d} [shape=doublecircle];\n"));
    }
    for tree in &forest.trees {
        for &(u, v) in &tree.edges {
            out.push_str(&format!("  {u} -- {v} [label=\"{}\"];\n", inst.w(u, v)));
        }
    }
    out.push_str("}\n");
    out
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::instance::MetricInstance;
    use approx::assert_relative_eq;

    fn line4() -> MetricInstance {
        generate::line_instance(&[0.0, 1.0, 2.0, 3.0], &[0, 3], 2, 0.25)
    }

    #[test]
    fn line4_forest_has_expected_trees() {
        let f = build_rooted_spanning_forest(&line4());
        assert_eq!(f.tree_count(), 2);
        assert_eq!(f.trees[0].root, 0);
        assert_eq!(f.trees[0].vertices, vec![0, 1]);
        assert_relative_eq!(f.trees[0].weight, 1.0);
        assert_eq!(f.trees[1].root, 3);
        assert_eq!(f.trees[1].vertices, vec![2, 3]);
        assert_relative_eq!(f.trees[1].weight, 1.0);
    }

    #[test]
    fn all_depot_instance_yields_singletons() {
        let inst = generate::line_instance(&[0.0, 1.0, 5.0], &[0, 1, 2], 3, 0.25);
        let f = build_rooted_spanning_forest(&inst);
        assert_eq!(f.tree_count(), 3);
        assert!(f
            .trees
            .iter()
            .all(|t| t.edges.is_empty() && t.weight == 0.0));
    }

    #[test]
    fn single_depot_forest_is_the_mst() {
        let inst = generate::random_metric_instance(9, 1, 1, 0.25, 11);
        let f = build_rooted_spanning_forest(&inst);
        assert_eq!(f.tree_count(), 1);
        assert_relative_eq!(
            f.trees[0].weight,
            kruskal_mst_weight(&inst),
            max_relative = 1e-9
        );
    }

    fn kruskal_mst_weight(inst: &MetricInstance) -> f64 {
        let n = inst.n();
        let mut edges: Vec<(f64, usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .map(|(u, v)| (inst.w(u, v), u, v))
            .collect();
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut dsu = Dsu::new(n);
        let mut total = 0.0;
        for (w, u, v) in edges {
            if dsu.union(u, v) {
                total += w;
            }
        }
        total
    }

    #[test]
    fn line4_connector_is_the_middle_edge() {
        let inst = line4();
        let f = build_rooted_spanning_forest(&inst);
        let conn = build_connector_edges(&inst, &f);
        assert_eq!(conn.edges.len(), 1);
        assert_eq!((conn.edges[0].u, conn.edges[0].v), (1, 2));
        assert_relative_eq!(conn.edges[0].weight, 1.0);
    }

    #[test]
    fn single_tree_needs_no_connectors() {
        let inst = generate::random_metric_instance(6, 1, 2, 0.25, 5);
        let f = build_rooted_spanning_forest(&inst);
        let conn = build_connector_edges(&inst, &f);
        assert!(conn.edges.is_empty());
    }

    #[test]
    fn greedy_connectors_on_three_depot_line() {
        let inst = generate::line_instance(&[0.0, 1.0, 3.0], &[0, 1, 2], 3, 0.25);
        let f = build_rooted_spanning_forest(&inst);
        let conn = build_connector_edges(&inst, &f);
        assert_eq!(conn.edges.len(), 2);
        assert_eq!(
            (conn.edges[0].u, conn.edges[0].v, conn.edges[0].weight),
            (0, 1, 1.0)
        );
        assert_eq!(
            (conn.edges[1].u, conn.edges[1].v, conn.edges[1].weight),
            (1, 2, 2.0)
        );
    }

    #[test]
    fn line4_has_two_candidates() {
        let inst = line4();
        let f = build_rooted_spanning_forest(&inst);
        let conn = build_connector_edges(&inst, &f);
        let cands = enumerate_candidates(&f, &conn);
        assert_eq!(cands.len(), 2);
        assert_eq!(cands[0].mask, 0);
        assert_eq!(cands[0].forest.tree_count(), 2);
        assert_eq!(cands[1].mask, 1);
        assert_eq!(cands[1].forest.tree_count(), 1);
        let merged = &cands[1].forest.trees[0];
        assert_eq!(merged.vertices, vec![0, 1, 2, 3]);
        assert_eq!(merged.root, 0);
        assert_relative_eq!(merged.weight, 3.0);
    }

    #[test]
    fn candidate_tree_counts_follow_subset_size() {
        let inst = generate::random_metric_instance(10, 4, 4, 0.25, 21);
        let f = build_rooted_spanning_forest(&inst);
        let conn = build_connector_edges(&inst, &f);
        let cands = enumerate_candidates(&f, &conn);
        assert_eq!(cands.len(), 8);
        let counts: Vec<usize> = cands.iter().map(|c| c.forest.tree_count()).collect();
        assert_eq!(counts, vec![4, 3, 3, 2, 3, 2, 2, 1]);
    }

    #[test]
    fn single_depot_forest_is_its_own_sole_candidate() {
        let inst = generate::random_metric_instance(5, 1, 1, 0.25, 2);
        let f = build_rooted_spanning_forest(&inst);
        let conn = build_connector_edges(&inst, &f);
        let cands = enumerate_candidates(&f, &conn);
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].forest.tree_count(), 1);
    }

    #[test]
    fn forest_plus_connectors_spans_as_a_tree() {
        for seed in 0..20 {
            let inst = generate::random_metric_instance(8, 1 + (seed as usize % 4), 5, 0.25, seed);
            let f = build_rooted_spanning_forest(&inst);
            let conn = build_connector_edges(&inst, &f);
            let edge_total: usize =
                f.trees.iter().map(|t| t.edges.len()).sum::<usize>() + conn.edges.len();
            assert_eq!(edge_total, inst.n() - 1);
            let mut dsu = Dsu::new(inst.n());
            let mut acyclic = true;
            for &(u, v) in f.trees.iter().flat_map(|t| t.edges.iter()) {
                acyclic &= dsu.union(u, v);
            }
            for e in &conn.edges {
                acyclic &= dsu.union(e.u, e.v);
            }
            assert!(
                acyclic,
                "seed {seed}: union of forest and connectors has a cycle"
            );
        }
    }

    #[test]
    fn candidates_preserve_spanning_and_depot_coverage() {
        for seed in 0..20 {
            let m = 1 + (seed as usize % 4);
            let inst = generate::random_metric_instance(9, m, 5, 0.25, 100 + seed);
            let f = build_rooted_spanning_forest(&inst);
            let conn = build_connector_edges(&inst, &f);
            let base_max = f.w_max_edge(&inst);
            let conn_max = conn.edges.iter().map(|e| e.weight).fold(0.0f64, f64::max);
            for cand in enumerate_candidates(&f, &conn) {
                let mut covered = vec![false; inst.n()];
                for t in &cand.forest.trees {
                    assert!(inst.is_depot(t.root));
                    assert!(t.contains(t.root));
                    for &v in &t.vertices {
                        assert!(!covered[v], "vertex {v} appears in two trees");
                        covered[v] = true;
                    }
                    assert_relative_eq!(t.weight, t.recompute_weight(&inst), max_relative = 1e-9);
                }
                assert!(covered.iter().all(|&c| c));
                assert_eq!(
                    cand.forest.tree_count(),
                    m - cand.mask.count_ones() as usize
                );
                assert!(cand.w_max_edge(&inst) <= base_max.max(conn_max) + 1e-12);
                let depot_trees: usize = inst
                    .depots()
                    .iter()
                    .map(|&d| cand.forest.trees.iter().filter(|t| t.contains(d)).count())
                    .sum();
                assert_eq!(depot_trees, inst.m(), "each depot in exactly one tree");
            }
        }
    }

    #[test]
    fn forest_minimality_on_small_instances() {
        for seed in 0..30 {
            let n = 3 + (seed as usize % 5);
            let m = 1 + (seed as usize % 3).min(n - 1);
            let inst = generate::random_metric_instance(n, m, n, 0.25, 500 + seed);
            let f = build_rooted_spanning_forest(&inst);
            let best = exhaustive_min_forest_weight(&inst);
            assert_relative_eq!(f.total_weight(), best, max_relative = 1e-9);
        }
    }

    /// Brute-force minimum over all spanning forests with exactly one depot
    /// per tree, by enumerating all (n - m)-edge subsets.
    fn exhaustive_min_forest_weight(inst: &MetricInstance) -> f64 {
        let n = inst.n();
        let m = inst.m();
        let all_edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        let need = n - m;
        let mut best = f64::INFINITY;
        let mut chosen = Vec::new();
        fn rec(
            inst: &MetricInstance,
            all: &[(usize, usize)],
            start: usize,
            need: usize,
            chosen: &mut Vec<(usize, usize)>,
            best: &mut f64,
        ) {
            if need == 0 {
                let n = inst.n();
                let mut dsu = Dsu::new(n);
                for &(u, v) in chosen.iter() {
                    if !dsu.union(u, v) {
                        return;
                    }
                }
                let mut depot_count = vec![0usize; n];
                for &d in inst.depots() {
                    depot_count[dsu.find(d)] += 1;
                }
                for v in 0..n {
                    if depot_count[dsu.find(v)] != 1 {
                        return;
                    }
                }
                let w: f64 = chosen.iter().map(|&(u, v)| inst.w(u, v)).sum();
                if w < *best {
                    *best = w;
                }
                return;
            }
            if all.len() - start < need {
                return;
            }
            for i in start..all.len() {
                chosen.push(all[i]);
                rec(inst, all, i + 1, need - 1, chosen, best);
                chosen.pop();
            }
        }
        rec(inst, &all_edges, 0, need, &mut chosen, &mut best);
        best
    }

    #[test]
    fn dot_export_mentions_depots_and_weights() {
        let inst = line4();
        let f = build_rooted_spanning_forest(&inst);
        let dot = forest_to_dot(&f, &inst);
        assert!(dot.contains("0 [shape=doublecircle]"));
        assert!(dot.contains("3 [shape=doublecircle]"));
        assert!(dot.contains("label=\"1\""));
    }
}
