//! Tree decomposition: split heavy trees into vertex-disjoint subtrees of
//! weight below `2 * lambda`.
//!
//! The splitter peels the tree bottom-up. Each vertex accumulates child
//! residuals while the bundle, counted together with the connecting edge,
//! stays below `lambda`; a child residual that would push past the cap is
//! detached as a finished piece and its connecting edge is dropped. A final
//! pass walks the dropped edges cheapest-first and re-merges neighboring
//! pieces whenever the combined weight stays below `2 * lambda`. Detached
//! residuals weigh less than `lambda` and merges respect the cap, so every
//! output subtree stays below `2 * lambda`, the vertex sets partition the
//! input tree, and no new edges are introduced.
//!
//! The peel is linear but can over-fragment around high-degree vertices. If
//! it produces more than `max(floor(w(T)/lambda), 1)` pieces, a quadratic
//! dynamic program recomputes a minimum-count partition exactly and the
//! smaller result wins.

use thiserror::Error;

use crate::forest::{ForestCandidate, RootedTree};
use crate::instance::MetricInstance;

/// Connected piece of a split tree. Unlike [`RootedTree`] it carries no root;
/// depot membership is recomputed when cycles are generated.
#[derive(Debug, Clone, PartialEq)]
pub struct Subtree {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub weight: f64,
}

impl Subtree {
    fn single(v: usize) -> Self {
        Self {
            vertices: vec![v],
            edges: Vec::new(),
            weight: 0.0,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

/// A candidate forest after heavy trees were split at a given `lambda`.
#[derive(Debug, Clone)]
pub struct DecomposedForest {
    pub subtrees: Vec<Subtree>,
    pub lambda: f64,
    /// Candidate mask this forest was decomposed from.
    pub origin: u64,
}

impl DecomposedForest {
    pub fn tree_count(&self) -> usize {
        self.subtrees.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplitError {
    #[error("lambda = {lambda} is below the maximum edge weight {w_max}")]
    PreconditionViolation { lambda: f64, w_max: f64 },
    #[error("lambda must be positive, got {lambda}")]
    NonPositiveLambda { lambda: f64 },
}

/// Splits one tree into vertex-disjoint subtrees of weight `< 2 * lambda`.
/// Trees already below `2 * lambda` are returned unchanged. Requires
/// `lambda >= w_max(tree)`.
pub fn split_tree(
    tree: &RootedTree,
    lambda: f64,
    inst: &MetricInstance,
) -> Result<Vec<Subtree>, SplitError> {
    check_lambda(lambda, tree.w_max_edge(inst))?;
    if tree.weight < 2.0 * lambda {
        return Ok(vec![Subtree {
            vertices: tree.vertices.clone(),
            edges: tree.edges.clone(),
            weight: tree.weight,
        }]);
    }

    let idx = |v: usize| tree.vertices.binary_search(&v).expect("tree vertex");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); tree.vertices.len()];
    for &(u, v) in &tree.edges {
        adj[idx(u)].push(idx(v));
        adj[idx(v)].push(idx(u));
    }

    let mut peeler = Peeler {
        verts: &tree.vertices,
        adj: adj.clone(),
        inst,
        lambda,
        pieces: Vec::new(),
        dropped: Vec::new(),
    };
    let root_residual = peeler.peel(idx(tree.root), usize::MAX);
    let mut pieces = peeler.pieces;
    pieces.push(root_residual);
    let mut pieces = remerge(pieces, &peeler.dropped, lambda, inst, &tree.vertices);

    let bound = ((tree.weight / lambda).floor() as usize).max(1);
    if pieces.len() > bound {
        let optimal = min_count_partition(tree, &adj, lambda, inst);
        if optimal.len() < pieces.len() {
            pieces = optimal;
        }
    }
    Ok(pieces)
}

struct Peeler<'a> {
    verts: &'a [usize],
    adj: Vec<Vec<usize>>,
    inst: &'a MetricInstance,
    lambda: f64,
    pieces: Vec<Subtree>,
    dropped: Vec<(usize, usize)>,
}

impl Peeler<'_> {
    fn peel(&mut self, v: usize, parent: usize) -> Subtree {
        let vid = self.verts[v];
        let mut items: Vec<(f64, usize, Subtree)> = Vec::new();
        let children: Vec<usize> = self.adj[v]
            .iter()
            .copied()
            .filter(|&c| c != parent)
            .collect();
        for c in children {
            let residual = self.peel(c, v);
            let s = residual.weight + self.inst.w(vid, self.verts[c]);
            items.push((s, c, residual));
        }
        // Heaviest pending subtree first: high-weight branches detach while
        // the bundle is still empty, keeping detachments close to lambda.
        items.sort_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then(self.verts[a.1].cmp(&self.verts[b.1]))
        });

        let mut residual = Subtree::single(vid);
        for (s, c, piece) in items {
            if residual.weight + s < self.lambda {
                residual.edges.push((vid, self.verts[c]));
                residual.edges.extend_from_slice(&piece.edges);
                residual.vertices.extend_from_slice(&piece.vertices);
                residual.weight += s;
            } else {
                self.pieces.push(piece);
                self.dropped.push((vid, self.verts[c]));
            }
        }
        residual
    }
}

/// Exact minimum-count partition into connected pieces of weight below
/// `2 * lambda`, by a Pareto dynamic program over (piece count, weight of the
/// piece still open at the current vertex). Quadratic in the tree size.
fn min_count_partition(
    tree: &RootedTree,
    adj: &[Vec<usize>],
    lambda: f64,
    inst: &MetricInstance,
) -> Vec<Subtree> {
    let cap = 2.0 * lambda;
    let n = tree.vertices.len();
    let root = tree
        .vertices
        .binary_search(&tree.root)
        .expect("root in tree");

    #[derive(Clone, Copy)]
    struct Entry {
        count: usize,
        residual: f64,
        prev: usize,
        child_entry: usize,
        kept: bool,
    }
    const SENTINEL: usize = usize::MAX;

    // Preorder from the root; reversed it processes children before parents.
    let mut parent = vec![SENTINEL; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    let mut seen = vec![false; n];
    seen[root] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &c in &adj[v] {
            if !seen[c] {
                seen[c] = true;
                parent[c] = v;
                stack.push(c);
            }
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &order {
        children[v] = adj[v].iter().copied().filter(|&c| parent[c] == v).collect();
        children[v].sort_unstable();
    }

    // steps[v][s] = Pareto front after merging the first s children of v,
    // sorted by ascending count with strictly decreasing residuals.
    let mut steps: Vec<Vec<Vec<Entry>>> = vec![Vec::new(); n];
    for &v in order.iter().rev() {
        let mut table = vec![vec![Entry {
            count: 1,
            residual: 0.0,
            prev: SENTINEL,
            child_entry: SENTINEL,
            kept: false,
        }]];
        for &c in &children[v] {
            let w = inst.w(tree.vertices[v], tree.vertices[c]);
            let prev_front = table.last().expect("step table is never empty");
            let child_front = steps[c].last().expect("children are processed first");
            let mut merged = Vec::with_capacity(prev_front.len() * child_front.len() * 2);
            for (pi, pe) in prev_front.iter().enumerate() {
                for (cei, ce) in child_front.iter().enumerate() {
                    merged.push(Entry {
                        count: pe.count + ce.count,
                        residual: pe.residual,
                        prev: pi,
                        child_entry: cei,
                        kept: false,
                    });
                    let joined = pe.residual + w + ce.residual;
                    if joined < cap {
                        merged.push(Entry {
                            count: pe.count + ce.count - 1,
                            residual: joined,
                            prev: pi,
                            child_entry: cei,
                            kept: true,
                        });
                    }
                }
            }
            merged.sort_by(|a, b| {
                a.count
                    .cmp(&b.count)
                    .then(a.residual.total_cmp(&b.residual))
            });
            let mut front = Vec::new();
            let mut best_residual = f64::INFINITY;
            for e in merged {
                if e.residual < best_residual {
                    best_residual = e.residual;
                    front.push(e);
                }
            }
            table.push(front);
        }
        steps[v] = table;
    }

    // The fronts are count-ascending, so entry 0 of the root is the optimum.
    fn collect_cuts(
        v: usize,
        entry_idx: usize,
        steps: &[Vec<Vec<Entry>>],
        children: &[Vec<usize>],
        cuts: &mut Vec<(usize, usize)>,
    ) {
        let table = &steps[v];
        let mut s = table.len() - 1;
        let mut e = table[s][entry_idx];
        while s > 0 {
            let c = children[v][s - 1];
            if !e.kept {
                cuts.push((v.min(c), v.max(c)));
            }
            collect_cuts(c, e.child_entry, steps, children, cuts);
            e = table[s - 1][e.prev];
            s -= 1;
        }
    }
    let mut cuts = Vec::new();
    collect_cuts(root, 0, &steps, &children, &mut cuts);
    let cut_set: std::collections::HashSet<(usize, usize)> = cuts.into_iter().collect();

    // Materialize the components left after removing the cut edges.
    let mut assigned = vec![false; n];
    let mut pieces = Vec::new();
    for start in 0..n {
        if assigned[start] {
            continue;
        }
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut weight = 0.0;
        let mut stack = vec![start];
        assigned[start] = true;
        while let Some(u) = stack.pop() {
            vertices.push(tree.vertices[u]);
            for &c in &adj[u] {
                if assigned[c] || cut_set.contains(&(u.min(c), u.max(c))) {
                    continue;
                }
                assigned[c] = true;
                edges.push((tree.vertices[u], tree.vertices[c]));
                weight += inst.w(tree.vertices[u], tree.vertices[c]);
                stack.push(c);
            }
        }
        vertices.sort_unstable();
        pieces.push(Subtree {
            vertices,
            edges,
            weight,
        });
    }
    pieces
}

/// Re-merges peeled pieces along dropped tree edges, cheapest edge first,
/// while the combined weight stays below `2 * lambda`. The dropped edges form
/// a tree over the pieces, so every merge joins two distinct groups.
fn remerge(
    pieces: Vec<Subtree>,
    dropped: &[(usize, usize)],
    lambda: f64,
    inst: &MetricInstance,
    tree_vertices: &[usize],
) -> Vec<Subtree> {
    if dropped.is_empty() {
        let mut pieces = pieces;
        for p in &mut pieces {
            p.vertices.sort_unstable();
        }
        return pieces;
    }
    let local = |v: usize| tree_vertices.binary_search(&v).expect("tree vertex");
    let mut piece_of = vec![usize::MAX; tree_vertices.len()];
    for (pi, p) in pieces.iter().enumerate() {
        for &v in &p.vertices {
            piece_of[local(v)] = pi;
        }
    }
    let mut edges: Vec<(f64, usize, usize)> =
        dropped.iter().map(|&(u, v)| (inst.w(u, v), u, v)).collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut parent: Vec<usize> = (0..pieces.len()).collect();
    let mut weight: Vec<f64> = pieces.iter().map(|p| p.weight).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut kept: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pieces.len()];
    for (w, u, v) in edges {
        let (ru, rv) = (
            find(&mut parent, piece_of[local(u)]),
            find(&mut parent, piece_of[local(v)]),
        );
        debug_assert_ne!(ru, rv);
        let combined = weight[ru] + w + weight[rv];
        if combined < 2.0 * lambda {
            let (keep, drop) = (ru.min(rv), ru.max(rv));
            parent[drop] = keep;
            weight[keep] = combined;
            let mut moved = std::mem::take(&mut kept[drop]);
            kept[keep].append(&mut moved);
            kept[keep].push((u, v));
        }
    }

    let mut grouped: Vec<Option<Subtree>> = vec![None; pieces.len()];
    for (pi, piece) in pieces.into_iter().enumerate() {
        let root = find(&mut parent, pi);
        let slot = grouped[root].get_or_insert_with(|| Subtree {
            vertices: Vec::new(),
            edges: Vec::new(),
            weight: 0.0,
        });
        slot.vertices.extend_from_slice(&piece.vertices);
        slot.edges.extend_from_slice(&piece.edges);
        slot.weight += piece.weight;
    }
    let mut out = Vec::new();
    for (pi, slot) in grouped.into_iter().enumerate() {
        if let Some(mut subtree) = slot {
            for &(u, v) in &kept[pi] {
                subtree.edges.push((u, v));
                subtree.weight += inst.w(u, v);
            }
            subtree.vertices.sort_unstable();
            out.push(subtree);
        }
    }
    out
}

/// Applies [`split_tree`] to every tree of the candidate whose weight reaches
/// `2 * lambda`; lighter trees pass through untouched.
pub fn decompose_forest(
    cand: &ForestCandidate,
    lambda: f64,
    inst: &MetricInstance,
) -> Result<DecomposedForest, SplitError> {
    check_lambda(lambda, cand.w_max_edge(inst))?;
    let mut subtrees = Vec::with_capacity(cand.forest.tree_count());
    for tree in &cand.forest.trees {
        if tree.weight < 2.0 * lambda {
            subtrees.push(Subtree {
                vertices: tree.vertices.clone(),
                edges: tree.edges.clone(),
                weight: tree.weight,
            });
        } else {
            subtrees.extend(split_tree(tree, lambda, inst)?);
        }
    }
    Ok(DecomposedForest {
        subtrees,
        lambda,
        origin: cand.mask,
    })
}

fn check_lambda(lambda: f64, w_max: f64) -> Result<(), SplitError> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(SplitError::NonPositiveLambda { lambda });
    }
    if lambda < w_max {
        return Err(SplitError::PreconditionViolation { lambda, w_max });
    }
    Ok(())
}
