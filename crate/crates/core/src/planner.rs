//! The full solver: enumerate candidate forests, binary-search the splitting
//! parameter per candidate, gate on the cycle budget, and keep the best
//! cover found anywhere.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::cyclegen::{cover_from_forest, CycleCover, DepotRule};
use crate::decompose::decompose_forest;
use crate::forest::{
    build_connector_edges, build_rooted_spanning_forest, enumerate_candidates, ForestCandidate,
};
use crate::instance::{approx_eq, MetricInstance, METRIC_REL_TOL};

/// One binary-search iteration record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchIteration {
    pub ell: usize,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub tree_count: usize,
    pub feasible: bool,
    pub cover_weight: Option<f64>,
}

/// Per-candidate record of the binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub candidate: u64,
    pub iterations: Vec<SearchIteration>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub candidates: usize,
    pub total_iterations: usize,
    pub elapsed_ms: f64,
}

/// Best cover across all candidates, with search telemetry.
#[derive(Debug, Clone)]
pub struct Solution {
    pub cover: CycleCover,
    pub objective: f64,
    pub candidate_id: u64,
    pub traces: Vec<SearchTrace>,
    pub stats: SolveStats,
}

impl Solution {
    /// JSON object: the cover plus `objective`, `candidate_id`, `iterations`,
    /// and `elapsed_ms`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(&self.cover).expect("cover serializes");
        let obj = value.as_object_mut().expect("cover is an object");
        obj.insert("objective".into(), json!(self.objective));
        obj.insert("candidate_id".into(), json!(self.candidate_id));
        obj.insert("iterations".into(), json!(self.stats.total_iterations));
        obj.insert("elapsed_ms".into(), json!(self.stats.elapsed_ms));
        value
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Number of worker threads for the candidate fan-out; 1 keeps the whole
    /// run on the calling thread. Results are identical either way.
    pub parallelism: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { parallelism: 1 }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("no candidate produced a feasible cover at any lambda")]
    NoFeasibleSolution,
}

/// Binary search over the splitting parameter for one candidate forest.
///
/// Starts from `[w_max(candidate), (n + k) * w_max(G)]`, halves the interval
/// each round (feasible tree counts shrink the upper end, infeasible raise
/// the lower end), keeps the strictly best cover seen, and stops once
/// `b - a < 0.5 * epsilon * a` or below an absolute floor that guards the
/// zero-weight lower bound.
pub fn search_candidate(
    cand: &ForestCandidate,
    inst: &MetricInstance,
) -> (Option<CycleCover>, SearchTrace) {
    let mut a = cand.w_max_edge(inst);
    let mut b = (inst.n() + inst.k()) as f64 * inst.w_max();
    let floor = inst.epsilon() * inst.w_max().max(f64::MIN_POSITIVE) * 2f64.powi(-40);
    let mut best: Option<CycleCover> = None;
    let mut iterations = Vec::new();
    let mut ell = 1usize;
    loop {
        let lambda = 0.5 * (a + b);
        // lambda >= a >= w_max(candidate) holds throughout, so decomposition
        // cannot reject the parameter.
        let decomposed =
            decompose_forest(cand, lambda, inst).expect("midpoint respects the splitting bound");
        let tree_count = decomposed.tree_count();
        let feasible = tree_count <= inst.k();
        let mut cover_weight = None;
        if feasible {
            let cover = cover_from_forest(&decomposed, inst);
            cover_weight = Some(cover.max_weight);
            if best
                .as_ref()
                .is_none_or(|b| cover.max_weight < b.max_weight)
            {
                best = Some(cover);
            }
        }
        iterations.push(SearchIteration {
            ell,
            a,
            b,
            lambda,
            tree_count,
            feasible,
            cover_weight,
        });
        let stop = (b - a) < 0.5 * inst.epsilon() * a || (b - a) < floor;
        if feasible {
            b = lambda;
        } else {
            a = lambda;
        }
        if stop {
            break;
        }
        ell += 1;
    }
    (
        best,
        SearchTrace {
            candidate: cand.mask,
            iterations,
        },
    )
}

/// Solves the instance with default options (single-threaded).
pub fn solve(inst: &MetricInstance) -> Result<Solution, SolveError> {
    solve_with(inst, SolveOptions::default())
}

/// Runs the candidate loop, fanning searches out to `opts.parallelism`
/// workers, and returns the minimum-objective cover. Ties keep the earlier
/// candidate mask. Expects a validated instance.
pub fn solve_with(inst: &MetricInstance, opts: SolveOptions) -> Result<Solution, SolveError> {
    let started = Instant::now();

    if inst.w_max() == 0.0 {
        // Every distance is zero; any spanning structure yields a zero-weight
        // cover. Emit one cycle per base tree directly.
        let fstar = build_rooted_spanning_forest(inst);
        let cycles = fstar
            .trees
            .iter()
            .map(|t| crate::cyclegen::tree_to_cycle(t, inst))
            .collect();
        let cover = CycleCover::new(cycles);
        return Ok(Solution {
            objective: cover.max_weight,
            cover,
            candidate_id: 0,
            traces: Vec::new(),
            stats: SolveStats {
                candidates: 0,
                total_iterations: 0,
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            },
        });
    }

    let fstar = build_rooted_spanning_forest(inst);
    let connectors = build_connector_edges(inst, &fstar);
    let candidates = enumerate_candidates(&fstar, &connectors);

    let results: Vec<(Option<CycleCover>, SearchTrace)> = if opts.parallelism > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallelism)
            .build()
            .expect("worker pool");
        pool.install(|| {
            candidates
                .par_iter()
                .map(|cand| search_candidate(cand, inst))
                .collect()
        })
    } else {
        candidates
            .iter()
            .map(|cand| search_candidate(cand, inst))
            .collect()
    };

    let mut best: Option<(usize, &CycleCover)> = None;
    for (i, (cover, _)) in results.iter().enumerate() {
        if let Some(cover) = cover {
            if best.is_none_or(|(_, b)| cover.max_weight < b.max_weight) {
                best = Some((i, cover));
            }
        }
    }
    let (winner, cover) = best.ok_or(SolveError::NoFeasibleSolution)?;
    let cover = cover.clone();
    let traces: Vec<SearchTrace> = results.iter().map(|(_, t)| t.clone()).collect();
    let total_iterations = traces.iter().map(|t| t.iterations.len()).sum();
    Ok(Solution {
        objective: cover.max_weight,
        cover,
        candidate_id: candidates[winner].mask,
        traces,
        stats: SolveStats {
            candidates: candidates.len(),
            total_iterations,
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    })
}

/// One violated cover constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum CoverViolation {
    TooManyCycles {
        count: usize,
        k: usize,
    },
    RootNotDepot {
        cycle: usize,
        root: usize,
    },
    RouteEndpointMismatch {
        cycle: usize,
    },
    UnknownVertex {
        cycle: usize,
        vertex: usize,
    },
    RepeatedInteriorVertex {
        cycle: usize,
        vertex: usize,
    },
    ForeignDepot {
        cycle: usize,
        depot: usize,
    },
    MissingVertex {
        vertex: usize,
    },
    SharedEdge {
        cycle_a: usize,
        cycle_b: usize,
        u: usize,
        v: usize,
    },
    WeightMismatch {
        cycle: usize,
        stored: f64,
        recomputed: f64,
    },
    MaxWeightMismatch {
        stored: f64,
        recomputed: f64,
    },
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CoverViolation::*;
        match self {
            TooManyCycles { count, k } => write!(f, "{count} cycles exceed the budget k = {k}"),
            RootNotDepot { cycle, root } => write!(f, "cycle {cycle} root {root} is not a depot"),
            RouteEndpointMismatch { cycle } => {
                write!(f, "cycle {cycle} does not start and end at its root")
            }
            UnknownVertex { cycle, vertex } => {
                write!(f, "cycle {cycle} visits unknown vertex {vertex}")
            }
            RepeatedInteriorVertex { cycle, vertex } => {
                write!(f, "cycle {cycle} repeats interior vertex {vertex}")
            }
            ForeignDepot { cycle, depot } => {
                write!(f, "cycle {cycle} passes through foreign depot {depot}")
            }
            MissingVertex { vertex } => write!(f, "vertex {vertex} is not covered by any cycle"),
            SharedEdge {
                cycle_a,
                cycle_b,
                u,
                v,
            } => {
                write!(
                    f,
                    "edge ({u},{v}) appears in cycles {cycle_a} and {cycle_b}"
                )
            }
            WeightMismatch {
                cycle,
                stored,
                recomputed,
            } => {
                write!(
                    f,
                    "cycle {cycle} stores weight {stored}, recomputed {recomputed}"
                )
            }
            MaxWeightMismatch { stored, recomputed } => {
                write!(
                    f,
                    "cover stores max weight {stored}, recomputed {recomputed}"
                )
            }
        }
    }
}

/// Outcome of [`validate_cover`]; empty iff the cover is valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoverReport {
    pub violations: Vec<CoverViolation>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for CoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "cover is valid");
        }
        writeln!(f, "cover is invalid:")?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks the cover constraints: cycle budget, depot-rooted routes, vertex
/// coverage, pairwise edge-disjointness (degenerate two-vertex cycles count
/// their edge twice within themselves but never across cycles), and stored
/// weights against recomputation. Solver output may route through foreign
/// depots; use [`validate_cover_with`] and [`DepotRule::ExactlyOne`] for the
/// strict form.
pub fn validate_cover(cover: &CycleCover, inst: &MetricInstance) -> CoverReport {
    validate_cover_with(cover, inst, DepotRule::RootOnly)
}

pub fn validate_cover_with(
    cover: &CycleCover,
    inst: &MetricInstance,
    rule: DepotRule,
) -> CoverReport {
    let mut report = CoverReport::default();
    let n = inst.n();
    if cover.cycles.len() > inst.k() {
        report.violations.push(CoverViolation::TooManyCycles {
            count: cover.cycles.len(),
            k: inst.k(),
        });
    }

    let mut covered = vec![false; n];
    for (ci, cycle) in cover.cycles.iter().enumerate() {
        // Range-check every id first so the remaining checks can index the
        // instance safely; a cycle naming unknown vertices is reported but
        // not priced.
        let mut ids_ok = true;
        for &v in cycle.route.iter().chain(std::iter::once(&cycle.root)) {
            if v >= n {
                report.violations.push(CoverViolation::UnknownVertex {
                    cycle: ci,
                    vertex: v,
                });
                ids_ok = false;
            }
        }
        if !ids_ok {
            continue;
        }
        if !inst.is_depot(cycle.root) {
            report.violations.push(CoverViolation::RootNotDepot {
                cycle: ci,
                root: cycle.root,
            });
        }
        if cycle.route.first() != Some(&cycle.root) || cycle.route.last() != Some(&cycle.root) {
            report
                .violations
                .push(CoverViolation::RouteEndpointMismatch { cycle: ci });
        }
        let interior = if cycle.route.len() > 1 {
            &cycle.route[1..cycle.route.len() - 1]
        } else {
            &[]
        };
        let mut seen = std::collections::HashSet::new();
        for &v in interior {
            if v == cycle.root || !seen.insert(v) {
                report
                    .violations
                    .push(CoverViolation::RepeatedInteriorVertex {
                        cycle: ci,
                        vertex: v,
                    });
            }
            if rule == DepotRule::ExactlyOne && inst.is_depot(v) {
                report.violations.push(CoverViolation::ForeignDepot {
                    cycle: ci,
                    depot: v,
                });
            }
        }
        for &v in &cycle.route {
            covered[v] = true;
        }
        let recomputed = cycle.recompute_weight(inst);
        if !approx_eq(cycle.weight, recomputed, METRIC_REL_TOL) {
            report.violations.push(CoverViolation::WeightMismatch {
                cycle: ci,
                stored: cycle.weight,
                recomputed,
            });
        }
    }
    for (v, &ok) in covered.iter().enumerate() {
        if !ok {
            report
                .violations
                .push(CoverViolation::MissingVertex { vertex: v });
        }
    }

    for (i, a) in cover.cycles.iter().enumerate() {
        let ae = a.edge_set();
        for (j, b) in cover.cycles.iter().enumerate().skip(i + 1) {
            for &(u, v) in &b.edge_set() {
                if ae.binary_search(&(u, v)).is_ok() {
                    report.violations.push(CoverViolation::SharedEdge {
                        cycle_a: i,
                        cycle_b: j,
                        u,
                        v,
                    });
                }
            }
        }
    }

    let recomputed_max = cover.cycles.iter().map(|c| c.weight).fold(0.0f64, f64::max);
    if !approx_eq(cover.max_weight, recomputed_max, METRIC_REL_TOL) {
        report.violations.push(CoverViolation::MaxWeightMismatch {
            stored: cover.max_weight,
            recomputed: recomputed_max,
        });
    }
    report
}

/// CSV rendering of per-candidate search traces.
pub fn trace_csv(traces: &[SearchTrace]) -> String {
    let mut out = String::from("candidate,ell,a,b,lambda,tree_count,feasible,cover_weight\n");
    for trace in traces {
        for it in &trace.iterations {
            let cw = it.cover_weight.map(|w| w.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                trace.candidate, it.ell, it.a, it.b, it.lambda, it.tree_count, it.feasible, cw
            ));
        }
    }
    out
}
