//! Scaling harness: times the solver over size ladders and depot sweeps on
//! random geometric instances and fits simple scaling exponents.

use std::time::Instant;

use crate::generate::geometric_instance;
use crate::planner::{solve_with, SolveOptions};

/// One measured solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub phase: &'static str,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    pub elapsed_ms: f64,
    pub iterations: usize,
    pub objective: f64,
}

fn measure(phase: &'static str, n: usize, m: usize, k: usize, seed: u64, reps: usize) -> BenchRow {
    let inst = geometric_instance(n, m, k, 0.25, seed);
    let mut best_ms = f64::INFINITY;
    let mut iterations = 0;
    let mut objective = 0.0;
    for _ in 0..reps.max(1) {
        let started = Instant::now();
        let sol = solve_with(&inst, SolveOptions::default()).expect("geometric instances solve");
        let ms = started.elapsed().as_secs_f64() * 1e3;
        if ms < best_ms {
            best_ms = ms;
        }
        iterations = sol.stats.total_iterations;
        objective = sol.objective;
    }
    BenchRow {
        phase,
        n,
        m,
        k,
        seed,
        elapsed_ms: best_ms,
        iterations,
        objective,
    }
}

/// Times the solver across a vertex-count ladder at fixed `m`, with
/// `k = ceil(n / 10)`. The minimum over `reps` runs is recorded per size.
pub fn run_ladder(ns: &[usize], m: usize, seed: u64, reps: usize) -> Vec<BenchRow> {
    ns.iter()
        .map(|&n| measure("ladder", n, m, n.div_ceil(10), seed, reps))
        .collect()
}

/// Times the solver across a depot-count sweep at fixed `n` and `k`.
pub fn run_m_sweep(ms: &[usize], n: usize, k: usize, seed: u64, reps: usize) -> Vec<BenchRow> {
    ms.iter()
        .map(|&m| measure("m_sweep", n, m, k, seed, reps))
        .collect()
}

/// Least-squares slope of `ln(elapsed)` against `ln(n)`.
pub fn loglog_slope(rows: &[BenchRow]) -> f64 {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), r.elapsed_ms.max(1e-6).ln()))
        .collect();
    lsq_slope(&points)
}

/// Per-unit-of-`m` time ratio: exp of the least-squares slope of
/// `ln(elapsed)` against `m`.
pub fn per_unit_m_ratio(rows: &[BenchRow]) -> f64 {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.m as f64, r.elapsed_ms.max(1e-6).ln()))
        .collect();
    lsq_slope(&points).exp()
}

fn lsq_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// CSV rendering of measured rows.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("phase,n,m,k,seed,elapsed_ms,iterations,objective\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.phase, r.n, r.m, r.k, r.seed, r.elapsed_ms, r.iterations, r.objective
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_produces_one_row_per_size() {
        let rows = run_ladder(&[12, 24], 2, 3, 1);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].k, 2);
        assert_eq!(rows[1].k, 3);
        assert!(rows.iter().all(|r| r.elapsed_ms > 0.0 && r.iterations > 0));
    }

    #[test]
    fn trivial_run_is_fast() {
        let rows = run_m_sweep(&[1], 1, 1, 0, 1);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].objective, 0.0);
        assert!(rows[0].elapsed_ms < 1000.0);
    }

    #[test]
    fn slope_of_exact_quadratic_is_two() {
        let rows: Vec<BenchRow> = [10usize, 20, 40, 80]
            .iter()
            .map(|&n| BenchRow {
                phase: "ladder",
                n,
                m: 1,
                k: 1,
                seed: 0,
                elapsed_ms: (n * n) as f64,
                iterations: 1,
                objective: 0.0,
            })
            .collect();
        assert!((loglog_slope(&rows) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ratio_of_exact_doubling_is_two() {
        let rows: Vec<BenchRow> = (1usize..=5)
            .map(|m| BenchRow {
                phase: "m_sweep",
                n: 10,
                m,
                k: 2,
                seed: 0,
                elapsed_ms: (1 << (m - 1)) as f64,
                iterations: 1,
                objective: 0.0,
            })
            .collect();
        assert!((per_unit_m_ratio(&rows) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn csv_is_well_formed() {
        let rows = run_m_sweep(&[1, 2], 10, 3, 5, 1);
        let csv = rows_to_csv(&rows);
        assert!(csv.starts_with("phase,n,m,k,seed,elapsed_ms,iterations,objective\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
