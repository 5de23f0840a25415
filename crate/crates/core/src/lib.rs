//! Time window assignment for vehicle routing under scenario uncertainty.
//!
//! The solver decomposes the sampled deterministic equivalent into one
//! vehicle routing subproblem per scenario inside a branch-and-bound tree.
//! Nodes carry enforced time windows and forbidden-path families; a
//! separation problem decides whether the per-scenario route sets admit a
//! common window assignment, and disjunctive branching restores
//! consistency when they do not.
//!
//! Module map:
//!
//! * [`instance`]: instance data, validation, document format, scenario generation.
//! * [`vrptw`]: single-scenario routing subproblems (exact and heuristic).
//! * [`separation`]: the window-consistency check and assignment extraction.
//! * [`branching`]: path statistics, branch selection, child construction.
//! * [`oracle`]: exhaustive reference solvers and random small instances.
//! * [`search`]: the tree driver, template upper bounds, assignment evaluation.
//! * [`report`]: run reports shared by the command-line front end.

pub mod branching;
pub mod instance;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod search;
pub mod separation;
pub mod vrptw;

/// Absolute tolerance used for window, capacity and objective comparisons.
pub const EPS: f64 = 1e-6;

pub use branching::{BranchDecision, NodeState, PathStatistics};
pub use instance::{
    parse_instance, Customer, Instance, InstanceError, Scenario, ScenarioParams, TravelNetwork,
    Violation, Window, WindowDomain,
};
pub use search::{
    evaluate_assignment, solve_twavrp, Incumbent, SearchConfig, SearchError, SearchOutcome,
    TerminationReason,
};
pub use separation::{Assignment, SeparationError, SeparationResult};
pub use vrptw::{
    ForbiddenPath, Route, RouteSet, SolveMode, SubproblemSpec, VrptwError, VrptwSolution,
};
