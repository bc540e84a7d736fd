//! Multi-depot route planning as a rooted min-max cycle cover problem.
//!
//! Given a metric graph whose vertices are inspection sites and robot depots,
//! the solver assigns every vertex to a depot-rooted cycle so that at most
//! `k` cycles are used and the heaviest cycle is as light as possible. The
//! pipeline builds a minimum rooted spanning forest, enumerates the
//! `2^(m-1)` ways of merging its trees along greedily chosen connector
//! edges, binary-searches a splitting parameter per candidate, and converts
//! the surviving trees into cycles by Euler-tour shortcutting.
//!
//! The [`oracle`] module solves small instances exactly by exhaustive
//! search and serves as ground truth for the solver's approximation
//! guarantee.
//!
//! ```
//! use cyclecover::{generate, oracle, planner};
//!
//! // Four vertices on a line, depots at both ends, two robots.
//! let inst = generate::line_instance(&[0.0, 1.0, 2.0, 3.0], &[0, 3], 2, 0.25);
//! let solution = planner::solve(&inst).unwrap();
//! assert_eq!(solution.objective, 2.0);
//! assert!(planner::validate_cover(&solution.cover, &inst).is_valid());
//!
//! // The exact optimum agrees on this instance.
//! let exact = oracle::exact_solve(&inst).unwrap();
//! assert_eq!(exact.lambda_star, 2.0);
//! ```

pub mod bench;
pub mod cyclegen;
pub mod decompose;
pub mod forest;
pub mod generate;
pub mod instance;
pub mod oracle;
pub mod planner;

pub use cyclegen::{Cycle, CycleCover, DepotRule};
pub use decompose::{DecomposedForest, Subtree};
pub use forest::{ConnectorEdge, ConnectorEdgeSet, ForestCandidate, RootedForest, RootedTree};
pub use instance::{
    load_instance, metric_closure, parse_instance, validate_instance, MetricInstance, RawSiteGraph,
    ValidationReport, Vertex, VertexKind,
};
pub use oracle::{exact_solve, exact_tsp_cycle, ExactSolution, OracleError};
pub use planner::{
    search_candidate, solve, solve_with, validate_cover, validate_cover_with, CoverReport,
    SearchIteration, SearchTrace, Solution, SolveError, SolveOptions, SolveStats,
};
