//! Template upper bounds: center windows on one scenario's minimal-waiting
//! arrival times, then cost every scenario under those windows.

use crate::instance::{Instance, ScenarioParams, Window, WindowDomain};
use crate::separation::Assignment;
use crate::vrptw::{solve_vrptw, RouteSet, SolveMode, SubproblemSpec};

/// A feasible assignment with the route sets realizing its cost.
#[derive(Debug, Clone)]
pub struct TemplateBound {
    pub assignment: Assignment,
    pub upper_bound: f64,
    pub route_sets: Vec<RouteSet>,
    pub scenario_costs: Vec<f64>,
}

/// Arrival times along each route that start every visit as early as the
/// exogenous windows allow. Customers not on any route sit at their
/// window start.
pub fn minimal_waiting_arrivals(rs: &RouteSet, p: &ScenarioParams) -> Vec<f64> {
    let mut a: Vec<f64> = p.exogenous.iter().map(|w| w.lo).collect();
    for r in &rs.routes {
        let mut prev = 0;
        let mut t = p.exogenous[0].lo;
        for &c in &r.0 {
            t = (t + p.service[prev] + p.time(prev, c)).max(p.exogenous[c].lo);
            a[c] = t;
            prev = c;
        }
    }
    a
}

/// Window for customer `i` around arrival `a`.
pub fn center_window(inst: &Instance, i: usize, a: f64) -> Window {
    let c = inst.customer(i);
    let (e, l) = (c.window.lo, c.window.hi);
    match &c.domain {
        WindowDomain::Continuous { width } => {
            let x = if a - width / 2.0 <= e {
                e
            } else if a + width / 2.0 >= l {
                l - width
            } else {
                a - width / 2.0
            };
            Window::new(x, x + width)
        }
        WindowDomain::Discrete { candidates } => {
            let mut best = candidates[0];
            for b in &candidates[1..] {
                if b.distance(a) < best.distance(a) {
                    best = *b;
                }
            }
            best
        }
    }
}

/// Template assignment from scenario `s_star`'s route set, costed over all
/// scenarios with the heuristic engine. `current[s]`, when given, is
/// also tried for scenario `s` and the cheaper feasible set kept. Returns
/// `None` when some scenario has no feasible route set under the template.
pub fn template_upper_bound(
    new_rs: &RouteSet,
    s_star: usize,
    inst: &Instance,
    params: &[ScenarioParams],
    current: &[Option<&RouteSet>],
) -> Option<TemplateBound> {
    let a = minimal_waiting_arrivals(new_rs, &params[s_star]);
    let windows: Vec<Window> = (1..=inst.customer_count())
        .map(|i| center_window(inst, i, a[i]))
        .collect();
    let assignment = Assignment {
        windows,
        expected_cost: None,
    };
    let node_windows = assignment.node_windows(inst);
    let mut route_sets = Vec::with_capacity(params.len());
    let mut costs = Vec::with_capacity(params.len());
    let mut total = 0.0;
    for (s, p) in params.iter().enumerate() {
        let spec = SubproblemSpec::new(p, node_windows.clone(), Vec::new())
            .with_mode(SolveMode::Heuristic);
        let mut best: Option<(RouteSet, f64)> =
            solve_vrptw(&spec).ok().map(|sol| (sol.routes, sol.cost));
        let extra = current
            .get(s)
            .copied()
            .flatten()
            .into_iter()
            .chain((s == s_star).then_some(new_rs));
        for rs in extra {
            if spec.is_feasible(rs) {
                if let Ok(c) = rs.cost(p) {
                    if best.as_ref().is_none_or(|(_, b)| c < *b - 1e-9) {
                        best = Some((rs.clone(), c));
                    }
                }
            }
        }
        let (rs, c) = best?;
        total += inst.scenarios[s].probability * c;
        route_sets.push(rs);
        costs.push(c);
    }
    let assignment = Assignment {
        expected_cost: Some(total),
        ..assignment
    };
    Some(TemplateBound {
        assignment,
        upper_bound: total,
        route_sets,
        scenario_costs: costs,
    })
}
