//! Independent oracle for the minimum violation.
//!
//! Every combination of discrete candidates is tried. For a fixed
//! combination and a trial `delta`, feasibility of the continuous spread
//! limits is a system of difference constraints (Bellman-Ford), and the
//! least achievable discrete violation is the optimum of a linear program
//! over the same system, evaluated through its min-cost-flow dual by
//! successive shortest paths. Bisection on `delta` then brackets the optimum
//! to within `grid_step`.

use crate::instance::{Instance, Window, WindowDomain};
use crate::vrptw::RouteSet;

const INF: f64 = f64::INFINITY;

/// Difference-constraint graph: arc `u -> v` with weight `c` encodes
/// `x_v - x_u <= c`. Node 0 is the zero reference.
struct Graph {
    nodes: usize,
    arcs: Vec<(usize, usize, f64)>,
}

impl Graph {
    fn add(&mut self, u: usize, v: usize, c: f64) {
        self.arcs.push((u, v, c));
    }

    fn node(&mut self) -> usize {
        self.nodes += 1;
        self.nodes - 1
    }

    fn has_negative_cycle(&self) -> bool {
        let mut d = vec![0.0; self.nodes];
        for _ in 0..self.nodes {
            let mut changed = false;
            for &(u, v, c) in &self.arcs {
                if d[u] + c < d[v] - 1e-9 {
                    d[v] = d[u] + c;
                    changed = true;
                }
            }
            if !changed {
                return false;
            }
        }
        true
    }

    /// `min sum_v w_v x_v` with `x_0 = 0`, through the flow dual: ship one
    /// unit out of every `+1` node into every `-1` node at least cost.
    fn min_weighted_sum(&self, sources: &[usize], sinks: &[usize]) -> f64 {
        // Residual arcs: forward uncapacitated, backward bounded by flow.
        let mut flow = vec![0.0f64; self.arcs.len()];
        let mut supply = vec![0i32; self.nodes];
        for &s in sources {
            supply[s] += 1;
        }
        for &t in sinks {
            supply[t] -= 1;
        }
        let mut total = 0.0;
        loop {
            let starts: Vec<usize> = (0..self.nodes).filter(|&v| supply[v] > 0).collect();
            if starts.is_empty() {
                break;
            }
            let mut dist = vec![INF; self.nodes];
            // `pred[v] = (arc, forward)`.
            let mut pred: Vec<Option<(usize, bool)>> = vec![None; self.nodes];
            for &s in &starts {
                dist[s] = 0.0;
            }
            for _ in 0..self.nodes {
                let mut changed = false;
                for (k, &(u, v, c)) in self.arcs.iter().enumerate() {
                    if dist[u] < INF && dist[u] + c < dist[v] - 1e-12 {
                        dist[v] = dist[u] + c;
                        pred[v] = Some((k, true));
                        changed = true;
                    }
                    if flow[k] > 0.5 && dist[v] < INF && dist[v] - c < dist[u] - 1e-12 {
                        dist[u] = dist[v] - c;
                        pred[u] = Some((k, false));
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            let Some(t) = (0..self.nodes)
                .filter(|&v| supply[v] < 0 && dist[v] < INF)
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            else {
                // Unreachable demand means the primal is unbounded below,
                // which cannot happen for the bounded systems built here.
                return -INF;
            };
            let mut v = t;
            while let Some((k, fwd)) = pred[v] {
                let (a, b, c) = self.arcs[k];
                if fwd {
                    flow[k] += 1.0;
                    total += c;
                    v = a;
                } else {
                    flow[k] -= 1.0;
                    total -= c;
                    v = b;
                }
            }
            supply[v] -= 1;
            supply[t] += 1;
        }
        -total
    }
}

struct Case<'a> {
    inst: &'a Instance,
    route_sets: &'a [RouteSet],
    windows: &'a [Window],
}

impl Case<'_> {
    /// Whether `delta` is achievable under candidate `choice`.
    fn feasible(&self, choice: &[Option<usize>], delta: f64) -> bool {
        let inst = self.inst;
        let n = inst.network.node_count();
        let s_count = self.route_sets.len();
        let mut g = Graph {
            nodes: 1,
            arcs: Vec::new(),
        };
        let mut a = vec![vec![0usize; n]; s_count];
        for (s, rs) in self.route_sets.iter().enumerate() {
            let p = inst.scenario_params(s);
            let mut lo: Vec<f64> = self.windows.iter().map(|w| w.lo).collect();
            let mut hi: Vec<f64> = self.windows.iter().map(|w| w.hi).collect();
            for r in &rs.routes {
                let (f, l) = (r.0[0], r.0[r.len() - 1]);
                lo[f] = lo[f].max(self.windows[0].lo + p.time(0, f));
                hi[l] = hi[l].min(self.windows[0].hi - p.service[l] - p.time(l, 0));
            }
            for i in 1..n {
                let v = g.node();
                a[s][i] = v;
                g.add(v, 0, -lo[i]);
                g.add(0, v, hi[i]);
            }
            for r in &rs.routes {
                for w in r.0.windows(2) {
                    let (x, y) = (w[0], w[1]);
                    g.add(a[s][y], a[s][x], -(p.time(x, y) + p.service[x]));
                }
            }
        }
        let mut sources = Vec::new();
        let mut sinks = Vec::new();
        let mut offset = 0.0;
        for i in 1..n {
            match &inst.customer(i).domain {
                WindowDomain::Continuous { width } => {
                    let y = g.node();
                    for row in &a {
                        g.add(row[i], y, 0.0);
                        g.add(y, row[i], width + delta);
                    }
                }
                WindowDomain::Discrete { candidates } => {
                    let c = candidates[choice[i].expect("every discrete customer has a choice")];
                    let up = g.node();
                    let down = g.node();
                    for row in &a {
                        g.add(up, row[i], 0.0);
                        g.add(row[i], down, 0.0);
                    }
                    g.add(up, 0, -c.hi);
                    g.add(0, down, c.lo);
                    sources.push(up);
                    sinks.push(down);
                    offset += c.lo - c.hi;
                }
            }
        }
        if g.has_negative_cycle() {
            return false;
        }
        if sources.is_empty() {
            return true;
        }
        let violation = g.min_weighted_sum(&sources, &sinks) + offset;
        violation <= delta + 1e-9
    }

    fn horizon(&self) -> f64 {
        let lo = self.windows.iter().map(|w| w.lo).fold(INF, f64::min);
        let hi = self.windows.iter().map(|w| w.hi).fold(-INF, f64::max);
        (hi - lo).max(1.0) * (self.inst.network.node_count() as f64 + 1.0)
    }
}

/// Minimum violation by exhaustive candidate enumeration and bisection.
/// The result `r` satisfies `r - grid_step <= delta* <= r`. Returns
/// infinity when some route set is infeasible under `windows`.
pub fn brute_force_delta(
    route_sets: &[RouteSet],
    windows: &[Window],
    inst: &Instance,
    grid_step: f64,
) -> f64 {
    let case = Case {
        inst,
        route_sets,
        windows,
    };
    let n = inst.network.node_count();
    let discrete: Vec<usize> = (1..n).filter(|&i| inst.is_discrete(i)).collect();
    let sizes: Vec<usize> = discrete
        .iter()
        .map(|&i| inst.customer(i).domain.candidates().len())
        .collect();
    let mut digits = vec![0usize; discrete.len()];
    let mut best = INF;
    let top = case.horizon();
    loop {
        let mut choice = vec![None; n];
        for (k, &i) in discrete.iter().enumerate() {
            choice[i] = Some(digits[k]);
        }
        let skip = best.is_finite() && !case.feasible(&choice, (best - grid_step).max(0.0));
        if !skip && (best > 0.0 || !best.is_finite()) {
            let val = if case.feasible(&choice, 0.0) {
                Some(0.0)
            } else if !case.feasible(&choice, top) {
                None
            } else {
                let (mut lo, mut hi) = (0.0, top.min(if best.is_finite() { best } else { top }));
                if !case.feasible(&choice, hi) {
                    hi = top;
                }
                while hi - lo > grid_step {
                    let mid = 0.5 * (lo + hi);
                    if case.feasible(&choice, mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Some(hi)
            };
            if let Some(v) = val {
                best = best.min(v);
            }
        }
        // Next combination, odometer order.
        let mut k = 0;
        loop {
            if k == digits.len() {
                return best;
            }
            digits[k] += 1;
            if digits[k] < sizes[k] {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{counterexample, toy_root_sets};
    use super::*;
    use crate::instance::fixtures::toy;

    #[test]
    fn toy_root() {
        let inst = toy();
        let d = brute_force_delta(&toy_root_sets(), &inst.exogenous_windows(), &inst, 0.25);
        assert!(d >= 5.5 - 1e-9 && d <= 5.75 + 1e-9, "{d}");
    }

    #[test]
    fn consistent_case_reports_small() {
        let inst = toy();
        let sets = vec![
            RouteSet::new(vec![vec![3, 1, 4], vec![2]]),
            RouteSet::new(vec![vec![1], vec![3, 4, 2]]),
        ];
        let d = brute_force_delta(&sets, &inst.exogenous_windows(), &inst, 0.25);
        assert!(d <= 0.25, "{d}");
    }

    #[test]
    fn single_route_single_scenario() {
        let mut inst = counterexample();
        inst.scenarios.truncate(1);
        inst.scenarios[0].probability = 1.0;
        let sets = vec![RouteSet::new(vec![vec![1, 2, 3], vec![4]])];
        assert_eq!(
            brute_force_delta(&sets, &inst.exogenous_windows(), &inst, 0.25),
            0.0
        );
    }

    #[test]
    fn counterexample_positive() {
        let inst = counterexample();
        let sets = vec![
            RouteSet::new(vec![vec![1, 2, 3], vec![4]]),
            RouteSet::new(vec![vec![4, 2, 1], vec![3]]),
        ];
        let d = brute_force_delta(&sets, &inst.exogenous_windows(), &inst, 0.25);
        assert!(d > 0.25, "{d}");
    }
}
