//! Single-scenario routing subproblems with enforced windows and forbidden
//! paths.
//!
//! A subproblem fixes one scenario, a window per node and a set of
//! forbidden-path families `(i, j, d)`: no route may contain a contiguous
//! sub-path from `i` to `j` whose travel time (arc times plus service times
//! of every node but the last, no waiting) is at least `d`.
//!
//! The exact engine enumerates every feasible route up to a length cap and
//! solves the resulting set partitioning problem by branch-and-bound. The
//! heuristic engine is a sequential insertion construction followed by
//! variable neighborhood descent.

mod enumerate;
mod heuristic;
mod partition;
mod preprocess;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{ScenarioParams, Window};
use crate::EPS;

pub use enumerate::{default_max_route_len, enumerate_routes, RoutePool};
pub use heuristic::{construct_i1, repair_for_child, vnd_improve, RepairOutcome};
pub use partition::solve_set_partitioning;
pub use preprocess::preprocess;

/// Default cap on enumerated labels before falling back to the heuristic.
pub const DEFAULT_POOL_LIMIT: usize = 3_000_000;

/// Slack used when comparing path times against forbidden-path thresholds.
/// Thresholds are themselves path times, so equal values must compare equal.
const PATH_TOL: f64 = 1e-9;

/// Customers of one vehicle route, depot endpoints implicit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route(pub Vec<usize>);

impl Route {
    pub fn customers(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0")?;
        for c in &self.0 {
            write!(f, "-{c}")?;
        }
        write!(f, "-0")
    }
}

/// Routes serving every positive-demand customer of one scenario.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RouteSet {
    pub routes: Vec<Route>,
}

impl RouteSet {
    pub fn new(routes: Vec<Vec<usize>>) -> Self {
        Self {
            routes: routes.into_iter().map(Route).collect(),
        }
    }

    /// Routes sorted lexicographically; the representation used to break
    /// ties between equal-cost solutions.
    pub fn canonical(mut self) -> Self {
        self.routes.retain(|r| !r.is_empty());
        self.routes.sort();
        self
    }

    pub fn cost(&self, p: &ScenarioParams) -> Result<f64, VrptwError> {
        self.routes.iter().map(|r| route_cost(r, p)).sum()
    }

    /// Route index and position of every routed customer, by node id.
    pub fn positions(&self, node_count: usize) -> Vec<Option<(usize, usize)>> {
        let mut pos = vec![None; node_count];
        for (k, r) in self.routes.iter().enumerate() {
            for (l, &c) in r.0.iter().enumerate() {
                if c < node_count {
                    pos[c] = Some((k, l));
                }
            }
        }
        pos
    }
}

impl fmt::Display for RouteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.routes.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Forbidden-path family: no `from -> to` sub-path with travel time at
/// least `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenPath {
    pub from: usize,
    pub to: usize,
    pub threshold: f64,
}

impl ForbiddenPath {
    pub fn new(from: usize, to: usize, threshold: f64) -> Self {
        Self {
            from,
            to,
            threshold,
        }
    }
}

impl fmt::Display for ForbiddenPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.from, self.to, self.threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    #[default]
    Exact,
    Heuristic,
}

/// Routes and a bound carried over from the parent node.
#[derive(Debug, Clone, Default)]
pub struct WarmStart {
    /// Candidate routes, filtered for feasibility before use.
    pub routes: Vec<Route>,
    /// A cost the caller does not need to beat; `INFINITY` when unknown.
    pub upper_bound: f64,
}

/// One scenario's routing problem under enforced windows and forbidden
/// paths.
#[derive(Debug, Clone)]
pub struct SubproblemSpec<'a> {
    pub params: &'a ScenarioParams,
    /// Enforced window by node id; entry 0 is the depot window.
    pub windows: Vec<Window>,
    pub forbidden: Vec<ForbiddenPath>,
    pub mode: SolveMode,
    pub warm_start: Option<WarmStart>,
    /// Longest route enumerated; `None` picks [`default_max_route_len`].
    pub max_route_len: Option<usize>,
    pub pool_limit: usize,
    arc_mask: Option<Vec<bool>>,
}

impl<'a> SubproblemSpec<'a> {
    pub fn new(
        params: &'a ScenarioParams,
        windows: Vec<Window>,
        forbidden: Vec<ForbiddenPath>,
    ) -> Self {
        Self {
            params,
            windows,
            forbidden,
            mode: SolveMode::Exact,
            warm_start: None,
            max_route_len: None,
            pool_limit: DEFAULT_POOL_LIMIT,
            arc_mask: None,
        }
    }

    /// Subproblem under the exogenous windows with no forbidden paths.
    pub fn exogenous(params: &'a ScenarioParams) -> Self {
        Self::new(params, params.exogenous.clone(), Vec::new())
    }

    pub fn with_mode(mut self, mode: SolveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_warm_start(mut self, ws: WarmStart) -> Self {
        self.warm_start = Some(ws);
        self
    }

    /// Whether arc `(i, j)` exists and survived preprocessing.
    #[inline]
    pub fn arc_allowed(&self, i: usize, j: usize) -> bool {
        self.params.has_arc(i, j)
            && self
                .arc_mask
                .as_ref()
                .is_none_or(|m| m[i * self.params.node_count + j])
    }

    pub fn removed_arc_count(&self) -> usize {
        self.arc_mask
            .as_ref()
            .map_or(0, |m| m.iter().filter(|&&b| !b).count())
    }

    /// Feasibility of a single route: arcs, capacity, windows and paths.
    pub fn route_feasible(&self, r: &[usize]) -> bool {
        if r.is_empty() {
            return false;
        }
        let p = self.params;
        let load: f64 = r.iter().map(|&c| p.demand[c]).sum();
        if load > p.capacity + EPS {
            return false;
        }
        let mut prev = 0;
        for &c in r {
            if !self.arc_allowed(prev, c) {
                return false;
            }
            prev = c;
        }
        if !self.arc_allowed(prev, 0) {
            return false;
        }
        route_schedule(r, &self.windows, p).is_some()
            && route_respects_forbidden_paths(r, &self.forbidden, p)
    }

    /// Full check of a route set: partition of the positive-demand
    /// customers plus per-route feasibility.
    pub fn check_route_set(&self, rs: &RouteSet) -> Result<(), String> {
        let p = self.params;
        let n = p.node_count;
        let mut seen = vec![false; n];
        for r in &rs.routes {
            if r.is_empty() {
                return Err("empty route".into());
            }
            for &c in &r.0 {
                if c == 0 || c >= n {
                    return Err(format!("node {c} is not a customer"));
                }
                if seen[c] {
                    return Err(format!("customer {c} visited twice"));
                }
                if p.demand[c] <= EPS {
                    return Err(format!("customer {c} has zero demand but is routed"));
                }
                seen[c] = true;
            }
            let load: f64 = r.0.iter().map(|&c| p.demand[c]).sum();
            if load > p.capacity + EPS {
                return Err(format!(
                    "route {r} exceeds capacity ({load} > {})",
                    p.capacity
                ));
            }
            if r.0
                .iter()
                .zip(r.0.iter().skip(1))
                .any(|(&a, &b)| !p.has_arc(a, b))
                || !p.has_arc(0, r.0[0])
                || !p.has_arc(r.0[r.len() - 1], 0)
            {
                return Err(format!("route {r} uses a missing arc"));
            }
            if route_schedule(&r.0, &self.windows, p).is_none() {
                return Err(format!("route {r} violates a time window"));
            }
            if !route_respects_forbidden_paths(&r.0, &self.forbidden, p) {
                return Err(format!("route {r} contains a forbidden path"));
            }
        }
        for c in 1..n {
            if p.demand[c] > EPS && !seen[c] {
                return Err(format!("customer {c} is not served"));
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, rs: &RouteSet) -> bool {
        self.check_route_set(rs).is_ok()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VrptwSolution {
    pub routes: RouteSet,
    pub cost: f64,
    /// Proven optimal for the subproblem.
    pub optimal: bool,
    /// The exact engine overflowed its pool and the heuristic answered.
    #[serde(default)]
    pub overflow: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VrptwError {
    #[error("missing arc ({0}, {1})")]
    MissingArc(usize, usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("infeasible subproblem: {0}")]
    Infeasible(String),
    #[error("route enumeration exceeded the pool limit of {0}")]
    Overflow(usize),
}

/// Cost of depot -> route -> depot.
pub fn route_cost(r: &Route, p: &ScenarioParams) -> Result<f64, VrptwError> {
    let mut prev = 0;
    let mut total = 0.0;
    for &c in r.0.iter().chain(std::iter::once(&0)) {
        let w = p.cost(prev, c);
        if prev == c || !w.is_finite() {
            return Err(VrptwError::MissingArc(prev, c));
        }
        total += w;
        prev = c;
    }
    Ok(total)
}

/// Travel time along an open simple path: arc times plus the service time
/// of every node but the last. The depot has no service time.
pub fn path_travel_time(path: &[usize], p: &ScenarioParams) -> Result<f64, VrptwError> {
    if path.len() < 2 {
        return Err(VrptwError::InvalidPath(
            "path needs at least two nodes".into(),
        ));
    }
    for (k, a) in path.iter().enumerate() {
        if *a >= p.node_count {
            return Err(VrptwError::InvalidPath(format!("node {a} out of range")));
        }
        if path[k + 1..].contains(a) {
            return Err(VrptwError::InvalidPath(format!("node {a} repeated")));
        }
    }
    let mut t = 0.0;
    for w in path.windows(2) {
        let tt = p.time(w[0], w[1]);
        if !tt.is_finite() {
            return Err(VrptwError::MissingArc(w[0], w[1]));
        }
        t += tt + p.service[w[0]];
    }
    Ok(t)
}

/// Path time between two positions of a route, `a < b`, without checks.
#[inline]
pub(crate) fn segment_time(r: &[usize], a: usize, b: usize, p: &ScenarioParams) -> f64 {
    let mut t = 0.0;
    for k in a..b {
        t += p.time(r[k], r[k + 1]) + p.service[r[k]];
    }
    t
}

/// Earliest service start at each position of a route, or `None` when a
/// window or the depot closing time is violated.
pub fn route_schedule(r: &[usize], windows: &[Window], p: &ScenarioParams) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(r.len());
    let mut prev = 0;
    let mut t = windows[0].lo;
    for &c in r {
        let arrive = t + p.service[prev] + p.time(prev, c);
        let a = arrive.max(windows[c].lo);
        if !(a <= windows[c].hi + EPS) {
            return None;
        }
        out.push(a);
        t = a;
        prev = c;
    }
    let back = t + p.service[prev] + p.time(prev, 0);
    if !(back <= windows[0].hi + EPS) {
        return None;
    }
    Some(out)
}

/// Componentwise-minimal arrival times by node id for a whole route set.
/// Unrouted customers get the start of their window. `None` if any route is
/// infeasible under `windows`.
pub fn earliest_arrival_schedule(
    rs: &RouteSet,
    windows: &[Window],
    p: &ScenarioParams,
) -> Option<Vec<f64>> {
    let mut a: Vec<f64> = windows.iter().map(|w| w.lo).collect();
    for r in &rs.routes {
        let s = route_schedule(&r.0, windows, p)?;
        for (&c, &t) in r.0.iter().zip(&s) {
            a[c] = t;
        }
    }
    Some(a)
}

/// Whether no contiguous sub-path of `r` realizes a family of `f`.
pub fn route_respects_forbidden_paths(
    r: &[usize],
    f: &[ForbiddenPath],
    p: &ScenarioParams,
) -> bool {
    f.iter().all(|fp| {
        let (Some(a), Some(b)) = (
            r.iter().position(|&c| c == fp.from),
            r.iter().position(|&c| c == fp.to),
        ) else {
            return true;
        };
        a >= b || segment_time(r, a, b, p) < fp.threshold - PATH_TOL
    })
}

/// Solve a subproblem. Exact mode preprocesses, enumerates and partitions;
/// an enumeration overflow falls back to the heuristic with `optimal` false.
pub fn solve_vrptw(spec: &SubproblemSpec) -> Result<VrptwSolution, VrptwError> {
    let pre = preprocess(spec)?;
    match spec.mode {
        SolveMode::Exact => solve_exact(&pre),
        SolveMode::Heuristic => solve_heuristic(&pre, false),
    }
}

fn warm_routes(spec: &SubproblemSpec) -> (Vec<Route>, f64) {
    match &spec.warm_start {
        Some(ws) => (
            ws.routes
                .iter()
                .filter(|r| spec.route_feasible(&r.0))
                .cloned()
                .collect(),
            ws.upper_bound,
        ),
        None => (Vec::new(), f64::INFINITY),
    }
}

fn solve_exact(spec: &SubproblemSpec) -> Result<VrptwSolution, VrptwError> {
    let mut pool = match enumerate_routes(spec, spec.max_route_len, spec.pool_limit) {
        Ok(pool) => pool,
        Err(VrptwError::Overflow(_)) => return solve_heuristic(spec, true),
        Err(e) => return Err(e),
    };
    let (warm, hint) = warm_routes(spec);
    pool.inject(warm, spec.params);
    let capped = pool.capped;
    let (routes, cost) = solve_set_partitioning(&pool, &spec.params.demand, hint)?;
    Ok(VrptwSolution {
        routes,
        cost,
        optimal: !capped,
        overflow: false,
    })
}

fn solve_heuristic(spec: &SubproblemSpec, overflow: bool) -> Result<VrptwSolution, VrptwError> {
    let p = spec.params;
    let mut best = vnd_improve(construct_i1(spec)?, spec);
    let mut best_cost = best.cost(p)?;
    if let Some(ws) = &spec.warm_start {
        let rs = RouteSet {
            routes: ws.routes.clone(),
        };
        if spec.is_feasible(&rs) {
            let improved = vnd_improve(rs, spec);
            let c = improved.cost(p)?;
            if c < best_cost - 1e-9 {
                best = improved;
                best_cost = c;
            }
        }
    }
    Ok(VrptwSolution {
        routes: best.canonical(),
        cost: best_cost,
        optimal: false,
        overflow,
    })
}
