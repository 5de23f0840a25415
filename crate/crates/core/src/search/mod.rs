//! Scenario-decomposition branch-and-bound.
//!
//! Every node solves one routing subproblem per scenario under its enforced
//! windows and forbidden paths, skipping scenarios whose parent route set is
//! still feasible. The probability-weighted cost is a lower bound for the
//! subtree. Nodes are fathomed against the incumbent, checked for a common
//! window assignment, and otherwise split by a path or window branch.
//!
//! Nodes are explored depth first, left child first. When the next node's
//! bound sits too far above the global lower bound (more than
//! `backtrack_fraction` of the current gap), the open node with the smallest
//! bound is taken instead.

mod evaluate;
mod template;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branching::{
    apply_branch, attach_inheritance, compute_path_statistics, default_epsilon, select_path_branch,
    select_window_branch, BranchDecision, NodeState,
};
use crate::instance::{Instance, InstanceError, ScenarioParams, Window};
use crate::separation::{extract_assignment, solve_separation_with, Assignment, SeparationError};
use crate::vrptw::{
    repair_for_child, solve_vrptw, ForbiddenPath, RouteSet, SolveMode, SubproblemSpec, VrptwError,
    VrptwSolution, WarmStart,
};

pub use evaluate::{evaluate_assignment, out_of_sample_instance, Evaluation};
pub use template::{center_window, minimal_waiting_arrivals, template_upper_bound, TemplateBound};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SolveMode,
    /// Wall-clock limit in seconds; `None` runs to completion.
    pub time_limit: Option<f64>,
    pub workers: usize,
    pub path_branching: bool,
    /// Path-branch margin; `None` picks 1 for integral data, else 1e-6.
    pub epsilon: Option<f64>,
    pub backtrack_fraction: f64,
    /// Absolute tolerance for bound comparisons.
    pub tolerance: f64,
    pub seed: u64,
    pub template: TemplatePolicy,
    pub max_nodes: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            mode: SolveMode::Exact,
            time_limit: None,
            workers: 1,
            path_branching: true,
            epsilon: None,
            backtrack_fraction: 0.5,
            tolerance: 1e-6,
            seed: 0,
            template: TemplatePolicy::EveryNode,
            max_nodes: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::Config(m.into()));
        if let Some(t) = self.time_limit {
            if t.is_nan() || t <= 0.0 {
                return bad("time limit must be positive");
            }
        }
        if self.workers == 0 {
            return bad("worker count must be at least 1");
        }
        if !(self.backtrack_fraction > 0.0 && self.backtrack_fraction < 1.0) {
            return bad("backtrack fraction must lie in (0, 1)");
        }
        if let Some(e) = self.epsilon {
            if e.is_nan() || e <= 0.0 {
                return bad("epsilon must be positive");
            }
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return bad("tolerance must be non-negative");
        }
        Ok(())
    }
}

/// Where template upper bounds are built from fresh scenario solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemplatePolicy {
    #[default]
    EveryNode,
    RootOnly,
    Off,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("scenario {scenario} has no feasible route set under the exogenous windows: {reason}")]
    Infeasible { scenario: usize, reason: String },
    #[error("scenario {scenario} is infeasible under the assignment: {reason}")]
    InfeasibleScenario { scenario: usize, reason: String },
    #[error("invalid assignment: {0}")]
    Assignment(String),
    #[error(transparent)]
    Vrptw(#[from] VrptwError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("branching failed: {0}")]
    Branching(String),
}

/// Best assignment found, with route sets realizing its cost.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Incumbent {
    pub assignment: Assignment,
    pub upper_bound: f64,
    pub route_sets: Vec<RouteSet>,
    pub scenario_costs: Vec<f64>,
    /// Forbidden paths of the node that certified the assignment.
    #[serde(default)]
    pub forbidden: Vec<ForbiddenPath>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationReason {
    /// Tree exhausted in exact mode.
    Optimal,
    /// Tree exhausted in heuristic mode; bounds are not proven.
    Completed,
    TimeLimit,
    NodeLimit,
    /// Tree exhausted without any feasible assignment.
    Infeasible,
}

impl std::fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TerminationReason::Optimal => "optimal",
            TerminationReason::Completed => "completed",
            TerminationReason::TimeLimit => "time-limit",
            TerminationReason::NodeLimit => "node-limit",
            TerminationReason::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowChange {
    pub customer: usize,
    pub window: Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeOutcome {
    /// The inherited bound already met the incumbent.
    Pruned,
    Infeasible {
        scenario: usize,
    },
    Fathomed,
    Consistent,
    Branched {
        delta: f64,
        decision: BranchDecision,
    },
}

/// One processed node of the search log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub window_changes: Vec<WindowChange>,
    pub forbidden_added: Vec<ForbiddenPath>,
    pub objective: Option<f64>,
    pub solves: usize,
    pub outcome: NodeOutcome,
    /// Bounds after the node was processed.
    pub upper_bound: f64,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub incumbent: Option<Incumbent>,
    pub upper_bound: f64,
    pub lower_bound: f64,
    /// False in heuristic mode, where fathoming is not exact.
    pub lower_bound_proven: bool,
    pub gap: f64,
    pub nodes: usize,
    pub subproblem_solves: usize,
    pub wall_seconds: f64,
    /// Time spent in subproblem solves, summed over workers.
    pub solve_seconds: f64,
    pub termination: TerminationReason,
    pub root_objective: Option<f64>,
    pub root_decision: Option<BranchDecision>,
    pub epsilon: f64,
    pub log: Vec<NodeRecord>,
}

/// `min(UB, smallest open bound)`.
pub fn global_lower_bound(open: impl IntoIterator<Item = f64>, ub: f64) -> f64 {
    open.into_iter().fold(ub, f64::min)
}

/// `(UB - LB) / UB`, zero when both vanish, one when `UB` is infinite.
pub fn relative_gap(ub: f64, lb: f64) -> f64 {
    if !ub.is_finite() {
        1.0
    } else if ub.abs() <= 1e-12 {
        0.0
    } else {
        ((ub - lb) / ub).clamp(0.0, 1.0)
    }
}

struct Open {
    node: NodeState,
    id: usize,
    parent: Option<usize>,
    window_changes: Vec<WindowChange>,
    forbidden_added: Vec<ForbiddenPath>,
}

struct Driver<'a> {
    inst: &'a Instance,
    params: Vec<ScenarioParams>,
    cfg: &'a SearchConfig,
    epsilon: f64,
    pool: Option<rayon::ThreadPool>,
    start: Instant,
    ub: f64,
    lb: f64,
    incumbent: Option<Incumbent>,
    next_id: usize,
    solves: usize,
    solve_time: Duration,
    root_objective: Option<f64>,
    root_decision: Option<BranchDecision>,
    log: Vec<NodeRecord>,
}

type Solved = Result<(Option<VrptwSolution>, Duration), SearchError>;

impl<'a> Driver<'a> {
    fn offer(
        &mut self,
        assignment: Assignment,
        route_sets: Vec<RouteSet>,
        costs: Vec<f64>,
        forbidden: &[ForbiddenPath],
        value: f64,
    ) {
        if value < self.ub - 1e-9 {
            self.ub = value;
            self.incumbent = Some(Incumbent {
                assignment: Assignment {
                    expected_cost: Some(value),
                    ..assignment
                },
                upper_bound: value,
                route_sets,
                scenario_costs: costs,
                forbidden: forbidden.to_vec(),
            });
        }
    }

    /// `(UB - sum of the other scenarios' weighted costs) / p_s`.
    fn cutoff(&self, s: usize, costs: &[f64]) -> f64 {
        if !self.ub.is_finite() {
            return f64::INFINITY;
        }
        let rest: f64 = (0..costs.len())
            .filter(|&t| t != s)
            .map(|t| self.inst.scenarios[t].probability * costs[t])
            .sum();
        (self.ub - rest) / self.inst.scenarios[s].probability
    }

    fn solve_one(&self, node: &NodeState, s: usize, cutoff: f64) -> Solved {
        let t0 = Instant::now();
        let p = &self.params[s];
        let mut spec = SubproblemSpec::new(p, node.windows.clone(), node.forbidden.clone())
            .with_mode(self.cfg.mode);
        if let Some(parent) = &node.parent_routes[s] {
            let rep = repair_for_child(parent, &spec, &node.affected, cutoff);
            let routes = match (self.cfg.mode, rep.routes) {
                (SolveMode::Heuristic, Some(r)) => r.routes,
                (_, Some(r)) => r
                    .routes
                    .into_iter()
                    .chain(parent.routes.iter().cloned())
                    .collect(),
                (_, None) => parent.routes.clone(),
            };
            spec = spec.with_warm_start(WarmStart {
                routes,
                upper_bound: rep.bound,
            });
        }
        let sol = match solve_vrptw(&spec) {
            Ok(sol) => Some(sol),
            Err(VrptwError::Infeasible(_)) => None,
            Err(e) => return Err(e.into()),
        };
        Ok((sol, t0.elapsed()))
    }

    fn solve_node(
        &self,
        node: &NodeState,
    ) -> Result<Vec<(usize, Option<VrptwSolution>, Duration)>, SearchError> {
        let todo: Vec<usize> = (0..self.params.len())
            .filter(|&s| node.inherited[s].is_none())
            .collect();
        let mut costs: Vec<f64> = node
            .inherited
            .iter()
            .zip(&node.parent_costs)
            .map(|(inh, &pc)| inh.as_ref().map_or(pc, |(_, c)| *c))
            .collect();
        match &self.pool {
            None => {
                let mut out = Vec::with_capacity(todo.len());
                for &s in &todo {
                    let (sol, d) = self.solve_one(node, s, self.cutoff(s, &costs))?;
                    match &sol {
                        Some(v) => costs[s] = v.cost,
                        None => {
                            out.push((s, sol, d));
                            break;
                        }
                    }
                    out.push((s, sol, d));
                }
                Ok(out)
            }
            Some(pool) => {
                let cut: Vec<f64> = todo.iter().map(|&s| self.cutoff(s, &costs)).collect();
                let res: Vec<Solved> = pool.install(|| {
                    todo.par_iter()
                        .zip(cut.par_iter())
                        .map(|(&s, &c)| self.solve_one(node, s, c))
                        .collect()
                });
                todo.iter()
                    .zip(res)
                    .map(|(&s, r)| r.map(|(sol, d)| (s, sol, d)))
                    .collect()
            }
        }
    }

    fn record(&mut self, open: &Open, objective: Option<f64>, solves: usize, outcome: NodeOutcome) {
        self.log.push(NodeRecord {
            id: open.id,
            parent: open.parent,
            depth: open.node.depth,
            window_changes: open.window_changes.clone(),
            forbidden_added: open.forbidden_added.clone(),
            objective,
            solves,
            outcome,
            upper_bound: self.ub,
            lower_bound: self.lb,
        });
    }

    fn process(&mut self, open: Open) -> Result<Vec<Open>, SearchError> {
        let node = &open.node;
        let tol = self.cfg.tolerance;
        if node.depth > 0 && node.objective >= self.ub - tol {
            self.record(&open, None, 0, NodeOutcome::Pruned);
            return Ok(Vec::new());
        }
        let solved = self.solve_node(node)?;
        let mut sols: Vec<Option<(RouteSet, f64)>> = node.inherited.clone();
        let mut fresh = Vec::new();
        for (s, sol, d) in solved {
            self.solves += 1;
            self.solve_time += d;
            match sol {
                Some(v) => {
                    sols[s] = Some((v.routes, v.cost));
                    fresh.push(s);
                }
                None => {
                    if node.depth == 0 {
                        return Err(SearchError::Infeasible {
                            scenario: s,
                            reason: "no feasible route set".into(),
                        });
                    }
                    let n = fresh.len() + 1;
                    self.record(&open, None, n, NodeOutcome::Infeasible { scenario: s });
                    return Ok(Vec::new());
                }
            }
        }
        let solves = fresh.len();
        let sols: Vec<(RouteSet, f64)> = sols
            .into_iter()
            .map(|x| x.expect("every scenario solved"))
            .collect();
        let objective: f64 = sols
            .iter()
            .zip(&self.inst.scenarios)
            .map(|((_, c), sc)| sc.probability * c)
            .sum();
        if node.depth == 0 {
            self.root_objective = Some(objective);
        }

        let template = match self.cfg.template {
            TemplatePolicy::EveryNode => true,
            TemplatePolicy::RootOnly => node.depth == 0,
            TemplatePolicy::Off => false,
        };
        if template {
            let current: Vec<Option<&RouteSet>> = sols.iter().map(|(rs, _)| Some(rs)).collect();
            for &s in &fresh {
                if let Some(t) =
                    template_upper_bound(&sols[s].0, s, self.inst, &self.params, &current)
                {
                    self.offer(
                        t.assignment,
                        t.route_sets,
                        t.scenario_costs,
                        &[],
                        t.upper_bound,
                    );
                }
            }
        }

        if objective >= self.ub - tol {
            self.record(&open, Some(objective), solves, NodeOutcome::Fathomed);
            return Ok(Vec::new());
        }

        let route_sets: Vec<RouteSet> = sols.iter().map(|(rs, _)| rs.clone()).collect();
        let sep = solve_separation_with(&route_sets, &node.windows, self.inst, &self.params)?;
        if sep.is_consistent() {
            let tau = extract_assignment(&sep, self.inst)?;
            let costs = sols.iter().map(|(_, c)| *c).collect();
            self.offer(tau, route_sets, costs, &node.forbidden, objective);
            self.record(&open, Some(objective), solves, NodeOutcome::Consistent);
            return Ok(Vec::new());
        }

        let path = if self.cfg.path_branching {
            let stats = compute_path_statistics(&route_sets, self.inst, &self.params, self.epsilon);
            select_path_branch(&stats)
        } else {
            None
        };
        let decision = match path {
            Some(d) => d,
            None => select_window_branch(&sep, self.inst).map_err(SearchError::Branching)?,
        };
        if node.depth == 0 {
            self.root_decision = Some(decision);
        }
        let (left, right) = apply_branch(node, &decision, self.inst);
        let mut children = Vec::new();
        // Pushed right first so that the left child is explored next.
        for child in [right, left].into_iter().flatten() {
            let mut child = child;
            child.objective = objective;
            attach_inheritance(&mut child, &self.params, &sols);
            let window_changes = (1..child.windows.len())
                .filter(|&i| child.windows[i] != node.windows[i])
                .map(|i| WindowChange {
                    customer: i,
                    window: child.windows[i],
                })
                .collect();
            let forbidden_added = child.forbidden[node.forbidden.len()..].to_vec();
            children.push(Open {
                node: child,
                id: 0,
                parent: Some(open.id),
                window_changes,
                forbidden_added,
            });
        }
        let outcome = NodeOutcome::Branched {
            delta: sep.delta,
            decision,
        };
        self.record(&open, Some(objective), solves, outcome);
        Ok(children)
    }

    fn select(&mut self, open: &mut Vec<Open>) -> Open {
        let lb = global_lower_bound(open.iter().map(|o| o.node.objective), self.ub);
        self.lb = self.lb.max(lb);
        let top = open.last().expect("non-empty").node.objective;
        let gap = self.ub - self.lb;
        if self.ub.is_finite()
            && top - self.lb > self.cfg.backtrack_fraction * gap + self.cfg.tolerance
        {
            // Best bound; the most recent node among ties.
            let mut k = open.len() - 1;
            for (i, o) in open.iter().enumerate() {
                if o.node.objective < open[k].node.objective - 1e-12 {
                    k = i;
                }
            }
            return open.remove(k);
        }
        open.pop().expect("non-empty")
    }

    fn run(mut self) -> Result<SearchOutcome, SearchError> {
        let mut open = vec![Open {
            node: NodeState::root(self.inst),
            id: 0,
            parent: None,
            window_changes: Vec::new(),
            forbidden_added: Vec::new(),
        }];
        let limit = self.cfg.time_limit.map(Duration::from_secs_f64);
        let mut termination = None;
        let mut nodes = 0;
        while !open.is_empty() {
            if limit.is_some_and(|l| self.start.elapsed() >= l) {
                termination = Some(TerminationReason::TimeLimit);
                break;
            }
            if self.cfg.max_nodes.is_some_and(|m| nodes >= m) {
                termination = Some(TerminationReason::NodeLimit);
                break;
            }
            let mut o = self.select(&mut open);
            o.id = self.next_id;
            self.next_id += 1;
            nodes += 1;
            let children = self.process(o)?;
            open.extend(children);
        }
        let lb = global_lower_bound(open.iter().map(|o| o.node.objective), self.ub);
        self.lb = self.lb.max(lb).min(self.ub);
        let termination = termination.unwrap_or(if self.incumbent.is_none() {
            TerminationReason::Infeasible
        } else if self.cfg.mode == SolveMode::Heuristic {
            TerminationReason::Completed
        } else {
            TerminationReason::Optimal
        });
        Ok(SearchOutcome {
            upper_bound: self.ub,
            lower_bound: self.lb,
            lower_bound_proven: self.cfg.mode == SolveMode::Exact,
            gap: relative_gap(self.ub, self.lb),
            nodes,
            subproblem_solves: self.solves,
            wall_seconds: self.start.elapsed().as_secs_f64(),
            solve_seconds: self.solve_time.as_secs_f64(),
            termination,
            root_objective: self.root_objective,
            root_decision: self.root_decision,
            epsilon: self.epsilon,
            log: self.log,
            incumbent: self.incumbent,
        })
    }
}

/// Solve the sampled deterministic equivalent of `inst`.
pub fn solve_twavrp(inst: &Instance, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    cfg.validate()?;
    let params = inst.all_scenario_params();
    let epsilon = cfg.epsilon.unwrap_or_else(|| default_epsilon(&params));
    let threads = cfg.workers.min(params.len());
    let pool = if threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| SearchError::Config(e.to_string()))?,
        )
    } else {
        None
    };
    Driver {
        inst,
        params,
        cfg,
        epsilon,
        pool,
        start: Instant::now(),
        ub: f64::INFINITY,
        lb: 0.0,
        incumbent: None,
        next_id: 0,
        solves: 0,
        solve_time: Duration::ZERO,
        root_objective: None,
        root_decision: None,
        log: Vec::new(),
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::toy;

    #[test]
    fn toy_exact_with_paths() {
        let inst = toy();
        let out = solve_twavrp(&inst, &SearchConfig::default()).unwrap();
        assert!((out.upper_bound - 26.0).abs() < 1e-9, "{}", out.upper_bound);
        assert!((out.lower_bound - 26.0).abs() < 1e-9);
        assert_eq!(out.root_objective, Some(25.5));
        assert_eq!(out.nodes, 3);
        assert_eq!(
            out.root_decision,
            Some(BranchDecision::Path {
                from: 4,
                to: 3,
                d1: 7.0,
                d2: 5.0
            })
        );
        assert_eq!(out.termination, TerminationReason::Optimal);
        assert_eq!(out.gap, 0.0);
    }

    #[test]
    fn toy_exact_without_paths() {
        let inst = toy();
        let cfg = SearchConfig {
            path_branching: false,
            ..SearchConfig::default()
        };
        let out = solve_twavrp(&inst, &cfg).unwrap();
        assert!((out.upper_bound - 26.0).abs() < 1e-9, "{}", out.upper_bound);
        assert!(out.nodes >= 3);
    }

    #[test]
    fn incumbent_routes_realize_bound() {
        let inst = toy();
        let out = solve_twavrp(&inst, &SearchConfig::default()).unwrap();
        let inc = out.incumbent.unwrap();
        let w = inc.assignment.node_windows(&inst);
        let mut total = 0.0;
        for (s, p) in inst.all_scenario_params().iter().enumerate() {
            let spec = SubproblemSpec::new(p, w.clone(), vec![]);
            spec.check_route_set(&inc.route_sets[s]).unwrap();
            total += inst.scenarios[s].probability * inc.route_sets[s].cost(p).unwrap();
        }
        assert!((total - inc.upper_bound).abs() < 1e-9);
        inc.assignment.check_domains(&inst).unwrap();
    }

    #[test]
    fn bounds_monotone_in_log() {
        let inst = toy();
        let out = solve_twavrp(
            &inst,
            &SearchConfig {
                path_branching: false,
                ..SearchConfig::default()
            },
        )
        .unwrap();
        for w in out.log.windows(2) {
            assert!(w[1].upper_bound <= w[0].upper_bound);
            assert!(w[1].lower_bound >= w[0].lower_bound);
        }
        for r in &out.log {
            assert!(r.solves <= inst.scenario_count());
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let inst = toy();
        let a = solve_twavrp(&inst, &SearchConfig::default()).unwrap();
        let b = solve_twavrp(
            &inst,
            &SearchConfig {
                workers: 4,
                ..SearchConfig::default()
            },
        )
        .unwrap();
        assert_eq!(a.upper_bound, b.upper_bound);
        assert_eq!(a.lower_bound, b.lower_bound);
    }

    #[test]
    fn heuristic_mode_flags_bound() {
        let inst = toy();
        let out = solve_twavrp(
            &inst,
            &SearchConfig {
                mode: SolveMode::Heuristic,
                ..SearchConfig::default()
            },
        )
        .unwrap();
        assert!(!out.lower_bound_proven);
        assert!(out.upper_bound >= 26.0 - 1e-9);
        assert_eq!(out.termination, TerminationReason::Completed);
    }

    #[test]
    fn root_infeasibility() {
        let mut inst = toy();
        inst.customers[0].window = Window::new(0.0, 1.0);
        inst.customers[0].domain = crate::instance::WindowDomain::Continuous { width: 1.0 };
        assert!(matches!(
            solve_twavrp(&inst, &SearchConfig::default()),
            Err(SearchError::Infeasible { .. })
        ));
    }

    #[test]
    fn config_rejects_bad_values() {
        for cfg in [
            SearchConfig {
                workers: 0,
                ..SearchConfig::default()
            },
            SearchConfig {
                time_limit: Some(0.0),
                ..SearchConfig::default()
            },
            SearchConfig {
                backtrack_fraction: 1.0,
                ..SearchConfig::default()
            },
        ] {
            assert!(matches!(cfg.validate(), Err(SearchError::Config(_))));
        }
    }

    #[test]
    fn lower_bound_helper() {
        assert_eq!(global_lower_bound([], 7.0), 7.0);
        assert_eq!(global_lower_bound([25.5, 26.0], 26.0), 25.5);
        assert_eq!(global_lower_bound([30.0], 26.0), 26.0);
    }
}
