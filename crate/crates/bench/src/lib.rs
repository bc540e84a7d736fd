//! Shared fixtures for the criterion benchmarks.

use cyclecover::generate;
use cyclecover::MetricInstance;

/// Geometric instance with three depots and a tenth of the vertices as
/// budget, seeded for reproducible benchmark runs.
pub fn geometric_fixture(n: usize) -> MetricInstance {
    generate::geometric_instance(n, 3, n.div_ceil(10), 0.25, 0xBE7C)
}

/// Small instance inside the exact oracle's guard.
pub fn oracle_fixture() -> MetricInstance {
    generate::random_metric_instance(9, 2, 3, 0.25, 0xBE7C)
}
