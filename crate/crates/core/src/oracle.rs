//! Exact brute-force solver for small instances, used as ground truth.
//!
//! Enumerates every partition of the non-depot vertices into at most `k`
//! groups, every assignment of groups to depots (depots left without a group
//! consume budget as zero-weight singleton cycles), and prices each group
//! with an exact tour from dynamic programming over subsets. The result is
//! the true optimum under the strict one-depot-per-cycle constraint.

use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

use crate::cyclegen::{Cycle, CycleCover, DepotRule};
use crate::instance::MetricInstance;

/// Hard cap on non-depot vertices for the exact search.
pub const EXACT_SITE_LIMIT: usize = 9;
/// Hard cap on vertices per exact tour.
pub const EXACT_TSP_VERTEX_LIMIT: usize = 10;
/// Hard cap on depots for the relaxed exact search, which additionally
/// enumerates depot subsets per cycle.
pub const EXACT_RELAXED_DEPOT_LIMIT: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("instance too large for exact search: size {size} exceeds limit {limit}")]
    InstanceTooLarge { size: usize, limit: usize },
    #[error("subset has {size} vertices; exact tours are limited to {limit}")]
    SubsetTooLarge { size: usize, limit: usize },
    #[error("no feasible cover: k = {k} is below the depot count m = {m}")]
    NoFeasibleCover { k: usize, m: usize },
}

/// Optimal objective value together with a witnessing cover.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub lambda_star: f64,
    pub cover: CycleCover,
}

/// Exact optimum under the strict one-depot-per-cycle constraint.
/// Refuses instances with more than [`EXACT_SITE_LIMIT`] non-depot vertices.
pub fn exact_solve(inst: &MetricInstance) -> Result<ExactSolution, OracleError> {
    exact_solve_with(inst, DepotRule::ExactlyOne)
}

/// Exact optimum under either depot rule. The relaxed rule lets cycles pass
/// through several depots (each cycle still needs at least one) and is
/// intended for experimentation; it carries its own, tighter size guard.
pub fn exact_solve_with(
    inst: &MetricInstance,
    rule: DepotRule,
) -> Result<ExactSolution, OracleError> {
    if inst.k() < inst.m() {
        return Err(OracleError::NoFeasibleCover {
            k: inst.k(),
            m: inst.m(),
        });
    }
    match rule {
        DepotRule::ExactlyOne => exact_solve_strict(inst),
        DepotRule::RootOnly => exact_solve_relaxed(inst),
    }
}

fn exact_solve_strict(inst: &MetricInstance) -> Result<ExactSolution, OracleError> {
    let sites: Vec<usize> = inst.sites().collect();
    if sites.len() > EXACT_SITE_LIMIT {
        return Err(OracleError::InstanceTooLarge {
            size: sites.len(),
            limit: EXACT_SITE_LIMIT,
        });
    }

    let mut tours = TourTable::new(inst, &sites);
    let mut best: Option<(f64, Vec<(u32, usize)>)> = None;
    let max_groups = inst.k().min(sites.len());

    for_each_partition(sites.len(), max_groups.max(1), &mut |blocks| {
        // A depot-less instance has the single empty partition.
        assign_groups(inst, blocks, 0, 0.0, &mut Vec::new(), &mut tours, &mut best);
    });

    let (lambda_star, assignment) = best.expect("k >= m admits the single-group partition");
    let cover = build_cover(inst, &sites, &assignment, &mut tours);
    Ok(ExactSolution { lambda_star, cover })
}

/// Depth-first assignment of partition blocks to depots, pruning any branch
/// whose running maximum already matches the incumbent.
fn assign_groups(
    inst: &MetricInstance,
    blocks: &[Vec<usize>],
    next: usize,
    running_max: f64,
    chosen: &mut Vec<(u32, usize)>,
    tours: &mut TourTable,
    best: &mut Option<(f64, Vec<(u32, usize)>)>,
) {
    if let Some((incumbent, _)) = best {
        if running_max >= *incumbent {
            return;
        }
    }
    if next == blocks.len() {
        let mut used = vec![false; inst.n()];
        for &(_, d) in chosen.iter() {
            used[d] = true;
        }
        let idle = inst.depots().iter().filter(|&&d| !used[d]).count();
        if blocks.len() + idle > inst.k() {
            return;
        }
        let better = best.as_ref().is_none_or(|(inc, _)| running_max < *inc);
        if better {
            *best = Some((running_max, chosen.clone()));
        }
        return;
    }
    let mask = block_mask(&blocks[next]);
    for &d in inst.depots() {
        let cost = tours.cost(mask, d);
        chosen.push((mask, d));
        assign_groups(
            inst,
            blocks,
            next + 1,
            running_max.max(cost),
            chosen,
            tours,
            best,
        );
        chosen.pop();
    }
}

fn block_mask(block: &[usize]) -> u32 {
    block.iter().fold(0u32, |m, &i| m | 1 << i)
}

fn build_cover(
    inst: &MetricInstance,
    sites: &[usize],
    assignment: &[(u32, usize)],
    tours: &mut TourTable,
) -> CycleCover {
    let mut cycles = Vec::new();
    let mut used = vec![false; inst.n()];
    for &(mask, d) in assignment {
        used[d] = true;
        cycles.push(tours.route(mask, d, sites));
    }
    for &d in inst.depots() {
        if !used[d] {
            cycles.push(Cycle {
                root: d,
                route: vec![d],
                weight: 0.0,
            });
        }
    }
    CycleCover::new(cycles)
}

/// Memoized exact tours through site subsets rooted at a depot.
struct TourTable<'a> {
    inst: &'a MetricInstance,
    sites: &'a [usize],
    cost: HashMap<(u32, usize), f64>,
}

impl<'a> TourTable<'a> {
    fn new(inst: &'a MetricInstance, sites: &'a [usize]) -> Self {
        Self {
            inst,
            sites,
            cost: HashMap::new(),
        }
    }

    fn cost(&mut self, mask: u32, depot: usize) -> f64 {
        if let Some(&c) = self.cost.get(&(mask, depot)) {
            return c;
        }
        let members: Vec<usize> = (0..self.sites.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.sites[i])
            .collect();
        let (c, _) = held_karp(&members, depot, self.inst);
        self.cost.insert((mask, depot), c);
        c
    }

    fn route(&mut self, mask: u32, depot: usize, sites: &[usize]) -> Cycle {
        let members: Vec<usize> = (0..sites.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| sites[i])
            .collect();
        let (weight, order) = held_karp(&members, depot, self.inst);
        let mut route = Vec::with_capacity(members.len() + 2);
        route.push(depot);
        route.extend(order);
        if !members.is_empty() {
            route.push(depot);
        }
        Cycle {
            root: depot,
            route,
            weight,
        }
    }
}

/// Exact minimum-weight closed route from `root` through every vertex of
/// `vertices` (which must contain `root`), by dynamic programming over
/// subsets.
pub fn exact_tsp_cycle(
    vertices: &[usize],
    root: usize,
    inst: &MetricInstance,
) -> Result<Cycle, OracleError> {
    if vertices.len() > EXACT_TSP_VERTEX_LIMIT {
        return Err(OracleError::SubsetTooLarge {
            size: vertices.len(),
            limit: EXACT_TSP_VERTEX_LIMIT,
        });
    }
    assert!(
        vertices.contains(&root),
        "root must belong to the vertex set"
    );
    let others: Vec<usize> = vertices.iter().copied().filter(|&v| v != root).collect();
    let (weight, order) = held_karp(&others, root, inst);
    let mut route = vec![root];
    route.extend(order);
    if !others.is_empty() {
        route.push(root);
    }
    Ok(Cycle {
        root,
        route,
        weight,
    })
}

/// Same contract as [`exact_tsp_cycle`], by exhaustive permutation; the
/// independent cross-check for the dynamic program.
pub fn exact_tsp_cycle_by_permutations(
    vertices: &[usize],
    root: usize,
    inst: &MetricInstance,
) -> Result<Cycle, OracleError> {
    if vertices.len() > EXACT_TSP_VERTEX_LIMIT {
        return Err(OracleError::SubsetTooLarge {
            size: vertices.len(),
            limit: EXACT_TSP_VERTEX_LIMIT,
        });
    }
    assert!(
        vertices.contains(&root),
        "root must belong to the vertex set"
    );
    let others: Vec<usize> = vertices.iter().copied().filter(|&v| v != root).collect();
    if others.is_empty() {
        return Ok(Cycle {
            root,
            route: vec![root],
            weight: 0.0,
        });
    }
    let mut best_weight = f64::INFINITY;
    let mut best_order: Vec<usize> = Vec::new();
    for perm in others.iter().copied().permutations(others.len()) {
        let mut w = inst.w(root, perm[0]);
        for pair in perm.windows(2) {
            w += inst.w(pair[0], pair[1]);
        }
        w += inst.w(*perm.last().unwrap(), root);
        if w < best_weight {
            best_weight = w;
            best_order = perm;
        }
    }
    let mut route = vec![root];
    route.extend(best_order);
    route.push(root);
    Ok(Cycle {
        root,
        route,
        weight: best_weight,
    })
}

/// Held-Karp over the non-root members; returns (cost, visiting order).
fn held_karp(members: &[usize], root: usize, inst: &MetricInstance) -> (f64, Vec<usize>) {
    let s = members.len();
    if s == 0 {
        return (0.0, Vec::new());
    }
    let full = (1usize << s) - 1;
    let mut dp = vec![vec![f64::INFINITY; s]; full + 1];
    let mut parent = vec![vec![usize::MAX; s]; full + 1];
    for i in 0..s {
        dp[1 << i][i] = inst.w(root, members[i]);
    }
    for mask in 1..=full {
        for last in 0..s {
            let cost = dp[mask][last];
            if !cost.is_finite() || mask >> last & 1 == 0 {
                continue;
            }
            for next in 0..s {
                if mask >> next & 1 == 1 {
                    continue;
                }
                let nmask = mask | 1 << next;
                let ncost = cost + inst.w(members[last], members[next]);
                if ncost < dp[nmask][next] {
                    dp[nmask][next] = ncost;
                    parent[nmask][next] = last;
                }
            }
        }
    }
    let mut best_last = 0;
    let mut best_cost = f64::INFINITY;
    for last in 0..s {
        let cost = dp[full][last] + inst.w(members[last], root);
        if cost < best_cost {
            best_cost = cost;
            best_last = last;
        }
    }
    let mut order = Vec::with_capacity(s);
    let mut mask = full;
    let mut cur = best_last;
    loop {
        order.push(members[cur]);
        let prev = parent[mask][cur];
        mask &= !(1 << cur);
        if prev == usize::MAX {
            break;
        }
        cur = prev;
    }
    order.reverse();
    (best_cost, order)
}

/// Relaxed exact optimum: every cycle still roots at a depot, but may sweep
/// up foreign depots as interior vertices, and spare budget permitting,
/// leftover depots may share site-less sweep cycles instead of one singleton
/// cycle each. The strict search space is contained in this one, so the
/// relaxed optimum never exceeds the strict optimum.
fn exact_solve_relaxed(inst: &MetricInstance) -> Result<ExactSolution, OracleError> {
    let sites: Vec<usize> = inst.sites().collect();
    if sites.len() > EXACT_SITE_LIMIT {
        return Err(OracleError::InstanceTooLarge {
            size: sites.len(),
            limit: EXACT_SITE_LIMIT,
        });
    }
    if inst.m() > EXACT_RELAXED_DEPOT_LIMIT {
        return Err(OracleError::InstanceTooLarge {
            size: inst.m(),
            limit: EXACT_RELAXED_DEPOT_LIMIT,
        });
    }

    let mut search = RelaxedSearch {
        inst,
        sites: &sites,
        cost: HashMap::new(),
        best: None,
    };
    let max_groups = inst.k().min(sites.len()).max(1);
    for_each_partition(sites.len(), max_groups, &mut |blocks| {
        let site_masks: Vec<u32> = blocks.iter().map(|b| block_mask(b)).collect();
        search.assign_depot_sets(&site_masks, 0, 0, 0, 0.0, &mut Vec::new());
    });

    let (lambda_star, picks) = search.best.take().expect("k >= m admits a strict cover");
    let mut cycles = Vec::new();
    for (site_mask, depot_mask) in picks {
        cycles.push(search.route(site_mask, depot_mask));
    }
    Ok(ExactSolution {
        lambda_star,
        cover: CycleCover::new(cycles),
    })
}

/// Cycles are identified by (site mask, depot mask); sweep cycles have an
/// empty site mask.
struct RelaxedSearch<'a> {
    inst: &'a MetricInstance,
    sites: &'a [usize],
    cost: HashMap<(u32, u32), f64>,
    best: Option<(f64, Vec<(u32, u32)>)>,
}

impl RelaxedSearch<'_> {
    /// Members of a cycle: the masked sites plus masked depots.
    fn members(&self, site_mask: u32, depot_mask: u32) -> (usize, Vec<usize>) {
        let root = self
            .inst
            .depots()
            .iter()
            .enumerate()
            .find(|(i, _)| depot_mask >> i & 1 == 1)
            .map(|(_, &d)| d)
            .expect("depot set is nonempty");
        let mut members: Vec<usize> = (0..self.sites.len())
            .filter(|&i| site_mask >> i & 1 == 1)
            .map(|i| self.sites[i])
            .collect();
        members.extend(
            self.inst
                .depots()
                .iter()
                .enumerate()
                .filter(|&(i, &d)| depot_mask >> i & 1 == 1 && d != root)
                .map(|(_, &d)| d),
        );
        (root, members)
    }

    fn cycle_cost(&mut self, site_mask: u32, depot_mask: u32) -> f64 {
        if let Some(&c) = self.cost.get(&(site_mask, depot_mask)) {
            return c;
        }
        let (root, members) = self.members(site_mask, depot_mask);
        let (c, _) = held_karp(&members, root, self.inst);
        self.cost.insert((site_mask, depot_mask), c);
        c
    }

    fn route(&mut self, site_mask: u32, depot_mask: u32) -> Cycle {
        let (root, members) = self.members(site_mask, depot_mask);
        let (weight, order) = held_karp(&members, root, self.inst);
        let mut route = vec![root];
        route.extend(order);
        if !members.is_empty() {
            route.push(root);
        }
        Cycle {
            root,
            route,
            weight,
        }
    }

    /// Chooses a depot set per site group: a single depot (reusable across
    /// groups) or a multi-depot subset of the still-unconsumed depots. Depots
    /// covered by no group are then partitioned into sweep cycles.
    fn assign_depot_sets(
        &mut self,
        site_masks: &[u32],
        next: usize,
        multi_used: u32,
        singles_used: u32,
        running_max: f64,
        chosen: &mut Vec<(u32, u32)>,
    ) {
        if let Some((incumbent, _)) = &self.best {
            if running_max >= *incumbent {
                return;
            }
        }
        let m = self.inst.m();
        if next == site_masks.len() {
            let idle_mask = ((1u32 << m) - 1) & !(multi_used | singles_used);
            let idle: Vec<usize> = (0..m).filter(|&i| idle_mask >> i & 1 == 1).collect();
            let budget = self.inst.k().saturating_sub(site_masks.len());
            self.cover_idle_depots(&idle, budget, running_max, chosen);
            return;
        }
        for di in 0..m {
            chosen.push((site_masks[next], 1 << di));
            let cost = self.cycle_cost(site_masks[next], 1 << di);
            self.assign_depot_sets(
                site_masks,
                next + 1,
                multi_used,
                singles_used | 1 << di,
                running_max.max(cost),
                chosen,
            );
            chosen.pop();
        }
        let free = ((1u32 << m) - 1) & !multi_used;
        let mut sub = free;
        while sub > 0 {
            if sub.count_ones() >= 2 {
                chosen.push((site_masks[next], sub));
                let cost = self.cycle_cost(site_masks[next], sub);
                self.assign_depot_sets(
                    site_masks,
                    next + 1,
                    multi_used | sub,
                    singles_used,
                    running_max.max(cost),
                    chosen,
                );
                chosen.pop();
            }
            sub = (sub - 1) & free;
        }
    }

    /// Partitions leftover depots into at most `budget` cycles: singleton
    /// blocks are zero-weight parked cycles, larger blocks are sweeps.
    fn cover_idle_depots(
        &mut self,
        idle: &[usize],
        budget: usize,
        running_max: f64,
        chosen: &[(u32, u32)],
    ) {
        let depot_indices = idle.to_vec();
        let mut blocks_cb = |blocks: &[Vec<usize>]| {
            let mut worst = running_max;
            let mut picks = chosen.to_vec();
            for block in blocks {
                let mask = block.iter().fold(0u32, |m, &i| m | 1 << depot_indices[i]);
                picks.push((0, mask));
                // Singleton blocks are free; sweeps are priced exactly.
                if block.len() >= 2 {
                    worst = worst.max(self.cycle_cost(0, mask));
                }
            }
            if self.best.as_ref().is_none_or(|(inc, _)| worst < *inc) {
                self.best = Some((worst, picks));
            }
        };
        for_each_partition(idle.len(), budget, &mut blocks_cb);
    }
}

/// Calls `f` with every partition of `0..count` into at most `max_blocks`
/// non-empty blocks, in restricted-growth order. `count == 0` yields the
/// single empty partition.
fn for_each_partition(count: usize, max_blocks: usize, f: &mut impl FnMut(&[Vec<usize>])) {
    fn rec(
        i: usize,
        count: usize,
        max_blocks: usize,
        blocks: &mut Vec<Vec<usize>>,
        f: &mut impl FnMut(&[Vec<usize>]),
    ) {
        if i == count {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, count, max_blocks, blocks, f);
            blocks[b].pop();
        }
        if blocks.len() < max_blocks {
            blocks.push(vec![i]);
            rec(i + 1, count, max_blocks, blocks, f);
            blocks.pop();
        }
    }
    rec(0, count, max_blocks, &mut Vec::new(), f);
}
