//! Problem instances: raw site graphs, metric closure, and validation.
//!
//! Inputs arrive in one of two shapes. A [`RawSiteGraph`] lists the physically
//! available paths between points; [`metric_closure`] completes it into
//! all-pairs shortest-path distances. A [`MetricInstance`] holds the complete
//! weight matrix together with the depot set, the cycle budget `k`, and the
//! approximation parameter `epsilon`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

/// Relative tolerance absorbing closure round-off in metric and weight checks.
pub const METRIC_REL_TOL: f64 = 1e-9;

/// `a > b` beyond relative tolerance `rel`.
pub(crate) fn exceeds(a: f64, b: f64, rel: f64) -> bool {
    a > b + rel * a.abs().max(b.abs())
}

/// `a == b` within relative tolerance `rel`.
pub(crate) fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Depot,
    Site,
}

/// A vertex of the instance together with its role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    pub kind: VertexKind,
}

/// Sparse weighted graph of physically available paths.
#[derive(Debug, Clone)]
pub struct RawSiteGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, f64)>,
    depot_ids: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RawGraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge endpoint {id} is outside [0, {n})")]
    VertexOutOfRange { id: usize, n: usize },
    #[error("edge ({u}, {v}) has invalid weight {w}; weights must be finite and nonnegative")]
    BadWeight { u: usize, v: usize, w: f64 },
    #[error("depot id {id} is outside [0, {n})")]
    DepotOutOfRange { id: usize, n: usize },
    #[error("depot id {0} listed more than once")]
    DuplicateDepot(usize),
    #[error("at least one depot is required")]
    NoDepots,
}

impl RawSiteGraph {
    /// Builds a raw graph, rejecting self-loops, out-of-range ids, bad weights
    /// and duplicate depots. Depots are kept in ascending id order.
    pub fn new(
        vertex_count: usize,
        edges: Vec<(usize, usize, f64)>,
        depot_ids: Vec<usize>,
    ) -> Result<Self, RawGraphError> {
        if vertex_count == 0 {
            return Err(RawGraphError::Empty);
        }
        for &(u, v, w) in &edges {
            if u == v {
                return Err(RawGraphError::SelfLoop(u));
            }
            for id in [u, v] {
                if id >= vertex_count {
                    return Err(RawGraphError::VertexOutOfRange {
                        id,
                        n: vertex_count,
                    });
                }
            }
            if !w.is_finite() || w < 0.0 {
                return Err(RawGraphError::BadWeight { u, v, w });
            }
        }
        if depot_ids.is_empty() {
            return Err(RawGraphError::NoDepots);
        }
        let mut depots = depot_ids;
        depots.sort_unstable();
        for pair in depots.windows(2) {
            if pair[0] == pair[1] {
                return Err(RawGraphError::DuplicateDepot(pair[0]));
            }
        }
        if let Some(&id) = depots.last() {
            if id >= vertex_count {
                return Err(RawGraphError::DepotOutOfRange {
                    id,
                    n: vertex_count,
                });
            }
        }
        Ok(Self {
            vertex_count,
            edges,
            depot_ids: depots,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn depot_ids(&self) -> &[usize] {
        &self.depot_ids
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosureError {
    #[error("graph is disconnected: vertex {v} is unreachable from vertex {u}")]
    DisconnectedGraph { u: usize, v: usize },
}

/// All-pairs shortest-path distances of a connected raw graph, as a full
/// symmetric matrix. Runs Dijkstra from every vertex.
pub fn metric_closure(raw: &RawSiteGraph) -> Result<Vec<Vec<f64>>, ClosureError> {
    let n = raw.vertex_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in raw.edges() {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut matrix = vec![vec![0.0f64; n]; n];
    for src in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(HeapEntry {
            dist: 0.0,
            vertex: src,
        }));
        while let Some(Reverse(HeapEntry { dist: d, vertex: u })) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse(HeapEntry {
                        dist: nd,
                        vertex: v,
                    }));
                }
            }
        }
        if let Some(v) = dist.iter().position(|d| d.is_infinite()) {
            return Err(ClosureError::DisconnectedGraph { u: src, v });
        }
        matrix[src] = dist;
    }
    // Per-source runs can differ in the last ulp; keep the matrix exactly
    // symmetric by mirroring the upper triangle.
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in (i + 1)..n {
            matrix[j][i] = matrix[i][j];
        }
    }
    Ok(matrix)
}

#[derive(Debug)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.vertex.cmp(&other.vertex))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("weight matrix must be non-empty and square; row {row} has {got} entries, expected {expected}")]
    NotSquare {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("weight matrix is empty")]
    EmptyMatrix,
    #[error("depot id {id} is outside [0, {n})")]
    DepotOutOfRange { id: usize, n: usize },
    #[error("depot id {0} listed more than once")]
    DuplicateDepot(usize),
    #[error("at least one depot is required")]
    NoDepots,
}

/// Complete metric instance: vertex set `0..n`, symmetric weight matrix,
/// ordered depot set, cycle budget `k`, and `epsilon`.
///
/// Construction only enforces structural shape; semantic invariants (metric
/// property, `k >= m`, epsilon range) are checked by [`validate_instance`],
/// which reports violations instead of refusing to build the value.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance {
    n: usize,
    w: Vec<f64>,
    depots: Vec<usize>,
    is_depot: Vec<bool>,
    k: usize,
    epsilon: f64,
    max_weight: f64,
}

impl MetricInstance {
    pub fn new(
        matrix: Vec<Vec<f64>>,
        depots: Vec<usize>,
        k: usize,
        epsilon: f64,
    ) -> Result<Self, ShapeError> {
        let n = matrix.len();
        if n == 0 {
            return Err(ShapeError::EmptyMatrix);
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(ShapeError::NotSquare {
                    row,
                    got: r.len(),
                    expected: n,
                });
            }
        }
        if depots.is_empty() {
            return Err(ShapeError::NoDepots);
        }
        let mut depots = depots;
        depots.sort_unstable();
        for pair in depots.windows(2) {
            if pair[0] == pair[1] {
                return Err(ShapeError::DuplicateDepot(pair[0]));
            }
        }
        if let Some(&id) = depots.last() {
            if id >= n {
                return Err(ShapeError::DepotOutOfRange { id, n });
            }
        }
        let mut w = Vec::with_capacity(n * n);
        for r in &matrix {
            w.extend_from_slice(r);
        }
        let mut is_depot = vec![false; n];
        for &d in &depots {
            is_depot[d] = true;
        }
        let max_weight = w.iter().copied().fold(0.0f64, f64::max);
        Ok(Self {
            n,
            w,
            depots,
            is_depot,
            k,
            epsilon,
            max_weight,
        })
    }

    /// Closes a connected raw graph and wraps it as an instance.
    pub fn from_raw(raw: &RawSiteGraph, k: usize, epsilon: f64) -> Result<Self, ClosureError> {
        let matrix = metric_closure(raw)?;
        Ok(Self::new(matrix, raw.depot_ids().to_vec(), k, epsilon)
            .expect("closure of a valid raw graph has valid shape"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge weight between `i` and `j`.
    #[inline]
    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    /// Largest entry of the weight matrix.
    pub fn w_max(&self) -> f64 {
        self.max_weight
    }

    pub fn depots(&self) -> &[usize] {
        &self.depots
    }

    /// Number of depots, `m`.
    pub fn m(&self) -> usize {
        self.depots.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn is_depot(&self, v: usize) -> bool {
        self.is_depot[v]
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        let kind = if self.is_depot(id) {
            VertexKind::Depot
        } else {
            VertexKind::Site
        };
        Vertex { id, kind }
    }

    /// Non-depot vertices in ascending order.
    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| !self.is_depot(v))
    }

    /// Lowest-id depot minimizing the distance to `v`.
    pub fn nearest_depot(&self, v: usize) -> usize {
        let mut best = self.depots[0];
        let mut best_w = self.w(best, v);
        for &d in &self.depots[1..] {
            let w = self.w(d, v);
            if w < best_w {
                best = d;
                best_w = w;
            }
        }
        best
    }

    /// Same instance with a different epsilon.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Same instance with a different cycle budget.
    pub fn with_budget(mut self, k: usize) -> Self {
        self.k = k;
        self
    }
}

/// One violated instance invariant, with a witness where applicable.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFiniteWeight {
        i: usize,
        j: usize,
    },
    NegativeWeight {
        i: usize,
        j: usize,
        w: f64,
    },
    NonzeroDiagonal {
        i: usize,
        w: f64,
    },
    Asymmetric {
        i: usize,
        j: usize,
        w_ij: f64,
        w_ji: f64,
    },
    TriangleInequality {
        i: usize,
        via: usize,
        j: usize,
        direct: f64,
        detour: f64,
    },
    BudgetBelowDepots {
        k: usize,
        m: usize,
    },
    EpsilonOutOfRange {
        epsilon: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFiniteWeight { i, j } => write!(f, "w({i},{j}) is not finite"),
            Violation::NegativeWeight { i, j, w } => write!(f, "w({i},{j}) = {w} is negative"),
            Violation::NonzeroDiagonal { i, w } => write!(f, "w({i},{i}) = {w}, expected 0"),
            Violation::Asymmetric { i, j, w_ij, w_ji } => {
                write!(f, "w({i},{j}) = {w_ij} but w({j},{i}) = {w_ji}")
            }
            Violation::TriangleInequality { i, via, j, direct, detour } => write!(
                f,
                "triangle inequality violated: w({i},{j}) = {direct} > w({i},{via}) + w({via},{j}) = {detour}"
            ),
            Violation::BudgetBelowDepots { k, m } => {
                write!(f, "no feasible solution: k = {k} is below the depot count m = {m}")
            }
            Violation::EpsilonOutOfRange { epsilon } => {
                write!(f, "epsilon = {epsilon} is outside (0, 1)")
            }
        }
    }
}

/// Outcome of [`validate_instance`]; empty iff the instance is valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Violations beyond the reporting cap, counted but not stored.
    pub suppressed: usize,
}

const MAX_REPORTED_VIOLATIONS: usize = 64;

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.suppressed == 0
    }

    fn push(&mut self, v: Violation) {
        if self.violations.len() < MAX_REPORTED_VIOLATIONS {
            self.violations.push(v);
        } else {
            self.suppressed += 1;
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "instance is valid");
        }
        writeln!(f, "instance is invalid:")?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        if self.suppressed > 0 {
            writeln!(f, "  ... and {} further violations", self.suppressed)?;
        }
        Ok(())
    }
}

/// Checks every instance invariant and reports each violation found:
/// weight sanity, zero diagonal, symmetry, triangle inequality (with witness
/// triple), `k >= m`, and epsilon range.
pub fn validate_instance(inst: &MetricInstance) -> ValidationReport {
    let n = inst.n();
    let mut report = ValidationReport::default();
    for i in 0..n {
        let w_ii = inst.w(i, i);
        if w_ii != 0.0 {
            report.push(Violation::NonzeroDiagonal { i, w: w_ii });
        }
        for j in (i + 1)..n {
            let w_ij = inst.w(i, j);
            let w_ji = inst.w(j, i);
            if !w_ij.is_finite() {
                report.push(Violation::NonFiniteWeight { i, j });
                continue;
            }
            if w_ij < 0.0 {
                report.push(Violation::NegativeWeight { i, j, w: w_ij });
            }
            if !approx_eq(w_ij, w_ji, METRIC_REL_TOL) {
                report.push(Violation::Asymmetric { i, j, w_ij, w_ji });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let direct = inst.w(i, j);
            for via in 0..n {
                if via == i || via == j {
                    continue;
                }
                let detour = inst.w(i, via) + inst.w(via, j);
                if exceeds(direct, detour, METRIC_REL_TOL) {
                    report.push(Violation::TriangleInequality {
                        i,
                        via,
                        j,
                        direct,
                        detour,
                    });
                }
            }
        }
    }
    if inst.k() < inst.m() {
        report.push(Violation::BudgetBelowDepots {
            k: inst.k(),
            m: inst.m(),
        });
    }
    if !(inst.epsilon() > 0.0 && inst.epsilon() < 1.0) {
        report.push(Violation::EpsilonOutOfRange {
            epsilon: inst.epsilon(),
        });
    }
    report
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid raw graph: {0}")]
    Graph(#[from] RawGraphError),
    #[error("invalid matrix shape: {0}")]
    Shape(#[from] ShapeError),
    #[error("{0}")]
    Disconnected(#[from] ClosureError),
    #[error("{0}")]
    Validation(ValidationReport),
}

/// On-disk JSON schema. Exactly one of `matrix` and `edges` must be present;
/// `edges` entries are `[u, v, weight]` triples.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    depots: Vec<usize>,
    k: usize,
    epsilon: f64,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    edges: Option<Vec<(usize, usize, f64)>>,
}

/// Parses instance JSON and applies metric closure to raw-edge inputs,
/// without validating semantic invariants.
pub fn parse_instance(text: &str) -> Result<MetricInstance, LoadError> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))?;
    match (file.matrix, file.edges) {
        (Some(matrix), None) => {
            if matrix.len() != file.n {
                return Err(LoadError::Parse(format!(
                    "field \"matrix\" has {} rows, expected n = {}",
                    matrix.len(),
                    file.n
                )));
            }
            Ok(MetricInstance::new(
                matrix,
                file.depots,
                file.k,
                file.epsilon,
            )?)
        }
        (None, Some(edges)) => {
            let raw = RawSiteGraph::new(file.n, edges, file.depots)?;
            Ok(MetricInstance::from_raw(&raw, file.k, file.epsilon)?)
        }
        (Some(_), Some(_)) => Err(LoadError::Parse(
            "fields \"matrix\" and \"edges\" are mutually exclusive".into(),
        )),
        (None, None) => Err(LoadError::Parse(
            "one of \"matrix\" or \"edges\" is required".into(),
        )),
    }
}

/// [`parse_instance`] followed by [`validate_instance`]; any violation is an
/// error bundling the full report.
pub fn load_instance(text: &str) -> Result<MetricInstance, LoadError> {
    let inst = parse_instance(text)?;
    let report = validate_instance(&inst);
    if !report.is_valid() {
        return Err(LoadError::Validation(report));
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use proptest::prelude::*;

    fn line4() -> MetricInstance {
        generate::line_instance(&[0.0, 1.0, 2.0, 3.0], &[0, 3], 2, 0.25)
    }

    #[test]
    fn closure_of_path_graph() {
        let raw = RawSiteGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)], vec![0]).unwrap();
        let m = metric_closure(&raw).unwrap();
        assert_eq!(m[0][2], 2.0);
        assert_eq!(m[0][1], 1.0);
        assert_eq!(m[1][2], 1.0);
    }

    #[test]
    fn closure_prefers_shorter_detour() {
        // Triangle where the direct edge (0,2) is longer than the path via 1.
        let raw =
            RawSiteGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)], vec![0]).unwrap();
        let m = metric_closure(&raw).unwrap();
        assert_eq!(m[0][2], 2.0);
    }

    #[test]
    fn closure_rejects_isolated_vertex() {
        let raw = RawSiteGraph::new(3, vec![(0, 1, 1.0)], vec![0]).unwrap();
        assert!(matches!(
            metric_closure(&raw),
            Err(ClosureError::DisconnectedGraph { .. })
        ));
    }

    #[test]
    fn raw_graph_rejects_self_loop_and_bad_ids() {
        assert!(matches!(
            RawSiteGraph::new(2, vec![(0, 0, 1.0)], vec![0]),
            Err(RawGraphError::SelfLoop(0))
        ));
        assert!(matches!(
            RawSiteGraph::new(2, vec![(0, 5, 1.0)], vec![0]),
            Err(RawGraphError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            RawSiteGraph::new(2, vec![(0, 1, -1.0)], vec![0]),
            Err(RawGraphError::BadWeight { .. })
        ));
    }

    #[test]
    fn validate_accepts_line4() {
        assert!(validate_instance(&line4()).is_valid());
    }

    #[test]
    fn vertex_kinds_follow_the_depot_set() {
        let inst = line4();
        assert_eq!(
            inst.vertex(0),
            Vertex {
                id: 0,
                kind: VertexKind::Depot
            }
        );
        assert_eq!(
            inst.vertex(1),
            Vertex {
                id: 1,
                kind: VertexKind::Site
            }
        );
        assert_eq!(inst.sites().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(inst.m(), 2);
    }

    #[test]
    fn validate_reports_triangle_violation_with_witness() {
        let matrix = vec![
            vec![0.0, 1.0, 10.0],
            vec![1.0, 0.0, 1.0],
            vec![10.0, 1.0, 0.0],
        ];
        let inst = MetricInstance::new(matrix, vec![0], 1, 0.25).unwrap();
        let report = validate_instance(&inst);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::TriangleInequality {
                i: 0,
                via: 1,
                j: 2,
                ..
            }
        )));
    }

    #[test]
    fn validate_reports_budget_below_depots() {
        let inst = MetricInstance::new(
            vec![vec![0.0; 4]; 4]
                .iter()
                .enumerate()
                .map(|(i, _)| (0..4).map(|j| (i as f64 - j as f64).abs()).collect())
                .collect(),
            vec![0, 1, 2],
            2,
            0.25,
        )
        .unwrap();
        let report = validate_instance(&inst);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BudgetBelowDepots { k: 2, m: 3 })));
    }

    #[test]
    fn load_matrix_instance() {
        let text = r#"{
            "n": 4, "depots": [0, 3], "k": 2, "epsilon": 0.25,
            "matrix": [[0,1,2,3],[1,0,1,2],[2,1,0,1],[3,2,1,0]]
        }"#;
        let inst = load_instance(text).unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.depots(), &[0, 3]);
        assert_eq!(inst.w(0, 2), 2.0);
    }

    #[test]
    fn load_edges_instance_applies_closure() {
        let text = r#"{
            "n": 3, "depots": [0], "k": 1, "epsilon": 0.5,
            "edges": [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 5.0]]
        }"#;
        let inst = load_instance(text).unwrap();
        assert_eq!(inst.w(0, 2), 2.0);
        assert!(validate_instance(&inst).is_valid());
    }

    #[test]
    fn load_rejects_missing_depots() {
        let text = r#"{ "n": 3, "k": 1, "epsilon": 0.5, "matrix": [[0]] }"#;
        assert!(matches!(load_instance(text), Err(LoadError::Parse(_))));
    }

    #[test]
    fn load_rejects_both_matrix_and_edges() {
        let text = r#"{
            "n": 1, "depots": [0], "k": 1, "epsilon": 0.5,
            "matrix": [[0]], "edges": []
        }"#;
        assert!(matches!(load_instance(text), Err(LoadError::Parse(_))));
    }

    #[test]
    fn load_bundles_validation_report() {
        let text = r#"{
            "n": 3, "depots": [0, 1, 2], "k": 2, "epsilon": 0.25,
            "matrix": [[0,1,1],[1,0,1],[1,1,0]]
        }"#;
        match load_instance(text) {
            Err(LoadError::Validation(report)) => {
                assert!(!report.is_valid());
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    /// Independent all-pairs oracle for closure checks.
    fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for &(u, v, w) in edges {
            if w < d[u][v] {
                d[u][v] = w;
                d[v][u] = w;
            }
        }
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][l] + d[l][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }

    proptest! {
        #[test]
        fn closure_matches_floyd_warshall(seed in 0u64..400) {
            let raw = generate::random_connected_graph(2 + (seed as usize % 49), seed, 2.0);
            let closed = metric_closure(&raw).unwrap();
            let oracle = floyd_warshall(raw.vertex_count(), raw.edges());
            for i in 0..raw.vertex_count() {
                for j in 0..raw.vertex_count() {
                    prop_assert!(approx_eq(closed[i][j], oracle[i][j], 1e-12),
                        "({i},{j}): {} vs {}", closed[i][j], oracle[i][j]);
                }
            }
        }

        #[test]
        fn closure_output_is_metric(seed in 400u64..600) {
            let n = 2 + (seed as usize % 20);
            let raw = generate::random_connected_graph(n, seed, 1.5);
            let inst = MetricInstance::from_raw(&raw, raw.depot_ids().len(), 0.25).unwrap();
            let report = validate_instance(&inst);
            prop_assert!(report.is_valid(), "{report}");
        }
    }
}
