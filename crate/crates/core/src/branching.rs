//! Branch selection and child construction.
//!
//! Window branches split one customer's enforced window so that the
//! current arrivals cannot all be kept. Path branches act on a customer pair
//! `(i, j)` whose opposite sub-paths in two scenarios take too long to fit
//! both windows: if `i -> j` takes `d1` in one scenario and `j -> i` takes
//! `d2` in another, with `d1 + d2 > w_i + w_j`, then one child forbids
//! `i -> j` sub-paths of time at least `d1` and the other forbids `j -> i`
//! sub-paths of time at least `w_i + w_j - d1 + eps`.

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, ScenarioParams, Window, WindowDomain};
use crate::separation::{SeparationResult, DELTA_TOL};
use crate::vrptw::{segment_time, ForbiddenPath, RouteSet, SubproblemSpec};

const TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchDecision {
    /// Split customer `customer` at `beta`.
    ContinuousWindow { customer: usize, beta: f64 },
    /// Split between candidate `candidate` and the next one (0-based).
    DiscreteWindow { customer: usize, candidate: usize },
    /// Forbid `from -> to` of time `>= d1` on the left, `to -> from` of time
    /// `>= d2` on the right.
    Path {
        from: usize,
        to: usize,
        d1: f64,
        d2: f64,
    },
}

impl BranchDecision {
    /// Customers whose placement the branch constrains.
    pub fn affected(&self) -> Vec<usize> {
        match *self {
            BranchDecision::ContinuousWindow { customer, .. }
            | BranchDecision::DiscreteWindow { customer, .. } => vec![customer],
            BranchDecision::Path { from, to, .. } => vec![from, to],
        }
    }
}

/// A search-tree node.
#[derive(Debug, Clone)]
pub struct NodeState {
    /// Enforced window by node id; entry 0 is the depot.
    pub windows: Vec<Window>,
    pub forbidden: Vec<ForbiddenPath>,
    /// Parent route sets still feasible here, with their costs.
    pub inherited: Vec<Option<(RouteSet, f64)>>,
    /// Parent route sets that were not inherited, for repair warm starts.
    pub parent_routes: Vec<Option<RouteSet>>,
    /// Parent cost per scenario; lower bounds on the costs here.
    pub parent_costs: Vec<f64>,
    /// Customers touched by the branch that created the node.
    pub affected: Vec<usize>,
    /// Objective bound: the parent's objective until processed.
    pub objective: f64,
    pub depth: usize,
}

impl NodeState {
    pub fn root(inst: &Instance) -> Self {
        let s = inst.scenario_count();
        Self {
            windows: inst.exogenous_windows(),
            forbidden: Vec::new(),
            inherited: vec![None; s],
            parent_routes: vec![None; s],
            parent_costs: vec![0.0; s],
            affected: Vec::new(),
            // Costs are non-negative.
            objective: 0.0,
            depth: 0,
        }
    }

    /// Enforced windows within exogenous windows, and never narrower than
    /// the assignable width.
    pub fn check_invariants(&self, inst: &Instance) -> Result<(), String> {
        for i in 1..=inst.customer_count() {
            let c = inst.customer(i);
            let w = self.windows[i];
            if !w.within(&c.window) {
                return Err(format!("customer {i}: window {w} outside {}", c.window));
            }
            if let WindowDomain::Continuous { width } = c.domain {
                if w.width() < width - 1e-6 {
                    return Err(format!("customer {i}: window {w} narrower than {width}"));
                }
            }
        }
        Ok(())
    }
}

/// Sub-path travel times between every ordered customer pair, per scenario.
#[derive(Debug, Clone)]
pub struct PathStatistics {
    n: usize,
    /// `times[i * n + j][s]`: time of the `i -> j` sub-path in scenario `s`.
    times: Vec<Vec<Option<f64>>>,
    widths: Vec<f64>,
    epsilon: f64,
}

/// A violating scenario pair for an ordered customer pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolatingPair {
    pub s1: usize,
    pub s2: usize,
    pub sum: f64,
}

impl PathStatistics {
    pub fn time(&self, i: usize, j: usize, s: usize) -> Option<f64> {
        self.times[i * self.n + j][s]
    }

    /// Scenarios containing an `i -> j` sub-path.
    pub fn scenarios(&self, i: usize, j: usize) -> Vec<usize> {
        self.times[i * self.n + j]
            .iter()
            .enumerate()
            .filter_map(|(s, t)| t.map(|_| s))
            .collect()
    }

    /// `w_i + w_j`, discrete customers counting their widest candidate.
    pub fn combined_width(&self, i: usize, j: usize) -> f64 {
        self.widths[i] + self.widths[j]
    }

    /// Pairs `(s1, s2)` with `d_ij^s1 + d_ji^s2 >= w_i + w_j + eps`.
    pub fn violating_pairs(&self, i: usize, j: usize) -> Vec<ViolatingPair> {
        let w = self.combined_width(i, j);
        let mut out = Vec::new();
        for s1 in self.scenarios(i, j) {
            for s2 in self.scenarios(j, i) {
                let sum = self.time(i, j, s1).unwrap() + self.time(j, i, s2).unwrap();
                if sum >= w + self.epsilon - TIE {
                    out.push(ViolatingPair { s1, s2, sum });
                }
            }
        }
        out
    }

    pub fn nu(&self, i: usize, j: usize) -> usize {
        self.violating_pairs(i, j).len()
    }

    /// Smallest violating sum with its scenario pair, lexicographic on ties.
    pub fn min_violation(&self, i: usize, j: usize) -> Option<ViolatingPair> {
        self.violating_pairs(i, j).into_iter().min_by(|a, b| {
            let tie = (a.sum - b.sum).abs() <= TIE;
            if tie {
                (a.s1, a.s2).cmp(&(b.s1, b.s2))
            } else {
                a.sum.total_cmp(&b.sum)
            }
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

/// Collect sub-path times from the route sets. `epsilon` is the margin by
/// which a pair must exceed the combined width to count as violating.
pub fn compute_path_statistics(
    route_sets: &[RouteSet],
    inst: &Instance,
    params: &[ScenarioParams],
    epsilon: f64,
) -> PathStatistics {
    let n = inst.network.node_count();
    let s_count = route_sets.len();
    let mut times = vec![vec![None; s_count]; n * n];
    for (s, rs) in route_sets.iter().enumerate() {
        for r in &rs.routes {
            let c = &r.0;
            for a in 0..c.len() {
                for b in a + 1..c.len() {
                    times[c[a] * n + c[b]][s] = Some(segment_time(c, a, b, &params[s]));
                }
            }
        }
    }
    PathStatistics {
        n,
        times,
        widths: inst.reference_widths(),
        epsilon,
    }
}

/// `1` when every travel and service time is integral, else `1e-6`.
pub fn default_epsilon(params: &[ScenarioParams]) -> f64 {
    if params.iter().all(|p| p.integral_times()) {
        1.0
    } else {
        1e-6
    }
}

/// Most violated customer pair: most violating scenario pairs, then the
/// smallest violating sum, then the lexicographically first scenario pair
/// attaining it, then the first customer pair.
pub fn select_path_branch(stats: &PathStatistics) -> Option<BranchDecision> {
    let n = stats.n;
    let mut best: Option<(usize, ViolatingPair, usize, usize)> = None;
    for i in 1..n {
        for j in 1..n {
            if i == j {
                continue;
            }
            let nu = stats.nu(i, j);
            if nu == 0 {
                continue;
            }
            let vp = stats.min_violation(i, j).expect("nu > 0");
            let better = match &best {
                None => true,
                Some((bn, bv, _, _)) => {
                    nu > *bn
                        || (nu == *bn
                            && (vp.sum < bv.sum - TIE
                                || ((vp.sum - bv.sum).abs() <= TIE
                                    && (vp.s1, vp.s2) < (bv.s1, bv.s2))))
                }
            };
            if better {
                best = Some((nu, vp, i, j));
            }
        }
    }
    let (_, vp, i, j) = best?;
    let w = stats.combined_width(i, j);
    let eps = stats.epsilon;
    let dij = stats.time(i, j, vp.s1).expect("pair present");
    let dji = stats.time(j, i, vp.s2).expect("pair present");
    let (d1, d2) = if dij <= dji {
        (dij, w - dij + eps)
    } else {
        (w - dji + eps, dji)
    };
    Some(BranchDecision::Path {
        from: i,
        to: j,
        d1,
        d2,
    })
}

/// Window branch from an inconsistent separation result.
pub fn select_window_branch(
    sep: &SeparationResult,
    inst: &Instance,
) -> Result<BranchDecision, String> {
    if sep.is_consistent() {
        return Err(format!("delta = {} is not positive", sep.delta));
    }
    let n = inst.network.node_count();
    let continuous = || {
        let mut best: Option<(f64, usize)> = None;
        for i in 1..n {
            if let WindowDomain::Continuous { width } = inst.customer(i).domain {
                let v = sep.spread_excess(i, width);
                if v > DELTA_TOL && best.is_none_or(|(b, _)| v > b + TIE) {
                    best = Some((v, i));
                }
            }
        }
        best.map(|(_, i)| BranchDecision::ContinuousWindow {
            customer: i,
            beta: 0.5 * (sep.max_arrival(i) + sep.min_arrival(i)),
        })
    };
    let discrete = || {
        let mut best: Option<(f64, usize)> = None;
        for i in 1..n {
            let v = sep.mu_up[i] + sep.mu_down[i];
            if v > DELTA_TOL && best.is_none_or(|(b, _)| v > b + TIE) {
                best = Some((v, i));
            }
        }
        best.and_then(|(_, i)| {
            let b = sep.choices[i]?;
            let candidate = if sep.mu_up[i] >= sep.mu_down[i] {
                b
            } else {
                b.checked_sub(1)?
            };
            Some(BranchDecision::DiscreteWindow {
                customer: i,
                candidate,
            })
        })
    };
    let d = if sep.delta > sep.discrete_violation() + 1e-7 {
        continuous().or_else(discrete)
    } else {
        discrete().or_else(continuous)
    };
    d.ok_or_else(|| format!("no branching candidate for delta = {}", sep.delta))
}

/// Children windows and forbidden sets. A child whose split window is empty
/// is returned as `None`. Route sets are not attached; see
/// [`attach_inheritance`].
pub fn apply_branch(
    node: &NodeState,
    d: &BranchDecision,
    inst: &Instance,
) -> (Option<NodeState>, Option<NodeState>) {
    let mut left = node.clone();
    let mut right = node.clone();
    for c in [&mut left, &mut right] {
        c.depth = node.depth + 1;
        c.affected = d.affected();
        c.inherited = vec![None; node.inherited.len()];
        c.parent_routes = vec![None; node.inherited.len()];
    }
    match *d {
        BranchDecision::ContinuousWindow { customer: i, beta } => {
            let WindowDomain::Continuous { width } = inst.customer(i).domain else {
                panic!("customer {i} is not continuous");
            };
            left.windows[i].hi = beta + width / 2.0;
            right.windows[i].lo = beta - width / 2.0;
        }
        BranchDecision::DiscreteWindow {
            customer: i,
            candidate: b,
        } => {
            let c = inst.customer(i).domain.candidates();
            left.windows[i].hi = left.windows[i].hi.min(c[b].hi);
            right.windows[i].lo = right.windows[i].lo.max(c[b + 1].lo);
        }
        BranchDecision::Path { from, to, d1, d2 } => {
            left.forbidden.push(ForbiddenPath::new(from, to, d1));
            right.forbidden.push(ForbiddenPath::new(to, from, d2));
        }
    }
    let keep = |n: NodeState| -> Option<NodeState> {
        let ok = n.windows.iter().all(|w| !w.is_empty());
        ok.then_some(n)
    };
    (keep(left), keep(right))
}

/// Copy each parent route set that remains feasible in `child`; record the
/// others for repair.
pub fn attach_inheritance(
    child: &mut NodeState,
    params: &[ScenarioParams],
    parent: &[(RouteSet, f64)],
) {
    child.parent_costs = parent.iter().map(|(_, c)| *c).collect();
    for (s, (rs, cost)) in parent.iter().enumerate() {
        let spec = SubproblemSpec::new(&params[s], child.windows.clone(), child.forbidden.clone());
        if spec.is_feasible(rs) {
            child.inherited[s] = Some((rs.clone(), *cost));
            child.parent_routes[s] = None;
        } else {
            child.inherited[s] = None;
            child.parent_routes[s] = Some(rs.clone());
        }
    }
}
