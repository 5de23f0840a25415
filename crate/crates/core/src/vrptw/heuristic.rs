//! Sequential insertion construction, variable neighborhood descent and
//! warm-start repair.
//!
//! Insertion follows the classic I1 criteria. The seed of each new route is
//! the unrouted customer farthest from the depot by cost. For an unrouted
//! customer `u` between `i` and `j`:
//!
//! * `c11 = d(i,u) + d(u,j) - MU * d(i,j)`
//! * `c12 = b_j' - b_j`, the push-forward of service start at `j`
//! * `c1 = ALPHA1 * c11 + ALPHA2 * c12`, minimized over positions
//! * `c2 = LAMBDA * d(0,u) - c1`, maximized over customers
//!
//! The descent visits Relocate, 2-opt, 2-opt* and Or-opt in that order,
//! takes the first improving feasible move and restarts from Relocate.

use super::{route_cost, route_schedule, Route, RouteSet, SubproblemSpec, VrptwError};

const ALPHA1: f64 = 0.5;
const ALPHA2: f64 = 0.5;
const LAMBDA: f64 = 1.0;
const MU: f64 = 1.0;
const IMPROVE: f64 = 1e-9;

/// Service start at each position plus the depot return time.
fn timing(r: &[usize], spec: &SubproblemSpec) -> Option<(Vec<f64>, f64)> {
    let p = spec.params;
    let s = route_schedule(r, &spec.windows, p)?;
    let last = *r.last()?;
    let back = s[s.len() - 1] + p.service[last] + p.time(last, 0);
    Some((s, back))
}

/// Build a feasible route set by sequential insertion.
pub fn construct_i1(spec: &SubproblemSpec) -> Result<RouteSet, VrptwError> {
    let p = spec.params;
    let mut unrouted = p.routed_customers();
    let mut routes = Vec::new();
    while !unrouted.is_empty() {
        let seed = unrouted
            .iter()
            .copied()
            .max_by(|&a, &b| p.cost(0, a).total_cmp(&p.cost(0, b)).then(b.cmp(&a)))
            .expect("nonempty");
        if !spec.route_feasible(&[seed]) {
            return Err(VrptwError::Infeasible(format!(
                "customer {seed} cannot be served by a dedicated vehicle"
            )));
        }
        unrouted.retain(|&c| c != seed);
        let mut route = vec![seed];
        loop {
            let (base, back) = timing(&route, spec).expect("current route is feasible");
            let mut pick: Option<(f64, usize, usize)> = None;
            for &u in &unrouted {
                let mut best_pos: Option<(f64, usize)> = None;
                for pos in 0..=route.len() {
                    let mut cand = route.clone();
                    cand.insert(pos, u);
                    if !spec.route_feasible(&cand) {
                        continue;
                    }
                    let i = if pos == 0 { 0 } else { route[pos - 1] };
                    let j = if pos == route.len() { 0 } else { route[pos] };
                    let c11 = p.cost(i, u) + p.cost(u, j) - MU * p.cost(i, j);
                    let (ns, nback) = timing(&cand, spec).expect("checked feasible");
                    let c12 = if j == 0 {
                        nback - back
                    } else {
                        ns[pos + 1] - base[pos]
                    };
                    let c1 = ALPHA1 * c11 + ALPHA2 * c12;
                    if best_pos.is_none_or(|(b, _)| c1 < b - IMPROVE) {
                        best_pos = Some((c1, pos));
                    }
                }
                if let Some((c1, pos)) = best_pos {
                    let c2 = LAMBDA * p.cost(0, u) - c1;
                    if pick.is_none_or(|(b, _, _)| c2 > b + IMPROVE) {
                        pick = Some((c2, u, pos));
                    }
                }
            }
            let Some((_, u, pos)) = pick else { break };
            route.insert(pos, u);
            unrouted.retain(|&c| c != u);
        }
        routes.push(route);
    }
    Ok(RouteSet::new(routes))
}

struct Vnd<'s, 'a> {
    spec: &'s SubproblemSpec<'a>,
    routes: Vec<Vec<usize>>,
    costs: Vec<f64>,
}

impl Vnd<'_, '_> {
    fn cost_of(&self, r: &[usize]) -> f64 {
        if r.is_empty() {
            0.0
        } else {
            route_cost(&Route(r.to_vec()), self.spec.params).unwrap_or(f64::INFINITY)
        }
    }

    fn ok(&self, r: &[usize]) -> bool {
        r.is_empty() || self.spec.route_feasible(r)
    }

    /// Try replacing routes `a` and `b` (possibly equal) with new contents.
    fn try_pair(&mut self, a: usize, b: usize, na: Vec<usize>, nb: Option<Vec<usize>>) -> bool {
        let old = self.costs[a] + if a != b { self.costs[b] } else { 0.0 };
        let ca = self.cost_of(&na);
        let cb = nb.as_ref().map_or(0.0, |r| self.cost_of(r));
        if ca + cb >= old - IMPROVE {
            return false;
        }
        if !self.ok(&na) || !nb.as_ref().is_none_or(|r| self.ok(r)) {
            return false;
        }
        self.routes[a] = na;
        self.costs[a] = ca;
        if let Some(r) = nb {
            self.routes[b] = r;
            self.costs[b] = cb;
        }
        true
    }

    fn relocate(&mut self) -> bool {
        let m = self.routes.len();
        for a in 0..m {
            for i in 0..self.routes[a].len() {
                let c = self.routes[a][i];
                let mut without = self.routes[a].clone();
                without.remove(i);
                for b in 0..m {
                    if b == a {
                        for j in 0..=without.len() {
                            if j == i {
                                continue;
                            }
                            let mut na = without.clone();
                            na.insert(j, c);
                            if self.try_pair(a, a, na, None) {
                                return true;
                            }
                        }
                    } else {
                        for j in 0..=self.routes[b].len() {
                            let mut nb = self.routes[b].clone();
                            nb.insert(j, c);
                            if self.try_pair(a, b, without.clone(), Some(nb)) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn two_opt(&mut self) -> bool {
        for a in 0..self.routes.len() {
            let len = self.routes[a].len();
            for i in 0..len {
                for j in i + 1..len {
                    let mut na = self.routes[a].clone();
                    na[i..=j].reverse();
                    if self.try_pair(a, a, na, None) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn two_opt_star(&mut self) -> bool {
        let m = self.routes.len();
        for a in 0..m {
            for b in a + 1..m {
                let (la, lb) = (self.routes[a].len(), self.routes[b].len());
                for i in 0..=la {
                    for j in 0..=lb {
                        if (i == 0 && j == 0) || (i == la && j == lb) {
                            continue;
                        }
                        let (ra, rb) = (&self.routes[a], &self.routes[b]);
                        let na: Vec<usize> = ra[..i].iter().chain(&rb[j..]).copied().collect();
                        let nb: Vec<usize> = rb[..j].iter().chain(&ra[i..]).copied().collect();
                        if self.try_pair(a, b, na, Some(nb)) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn or_opt(&mut self) -> bool {
        let m = self.routes.len();
        for seg in 2..=3 {
            for a in 0..m {
                let len = self.routes[a].len();
                if len < seg {
                    continue;
                }
                for i in 0..=len - seg {
                    let segment: Vec<usize> = self.routes[a][i..i + seg].to_vec();
                    let mut without = self.routes[a].clone();
                    without.drain(i..i + seg);
                    for b in 0..m {
                        let target = if b == a {
                            without.clone()
                        } else {
                            self.routes[b].clone()
                        };
                        for j in 0..=target.len() {
                            if b == a && j == i {
                                continue;
                            }
                            let mut nt = target.clone();
                            nt.splice(j..j, segment.iter().copied());
                            let moved = if b == a {
                                self.try_pair(a, a, nt, None)
                            } else {
                                self.try_pair(a, b, without.clone(), Some(nt))
                            };
                            if moved {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

/// Deterministic variable neighborhood descent. The input must be feasible;
/// every accepted move keeps it so and strictly lowers the cost.
pub fn vnd_improve(rs: RouteSet, spec: &SubproblemSpec) -> RouteSet {
    let routes: Vec<Vec<usize>> = rs.routes.into_iter().map(|r| r.0).collect();
    let mut v = Vnd {
        spec,
        costs: Vec::new(),
        routes,
    };
    v.costs = v.routes.iter().map(|r| v.cost_of(r)).collect();
    loop {
        let improved = v.relocate() || v.two_opt() || v.two_opt_star() || v.or_opt();
        if !improved {
            break;
        }
        let keep: Vec<bool> = v.routes.iter().map(|r| !r.is_empty()).collect();
        let mut k = keep.iter();
        v.routes.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        v.costs.retain(|_| *k.next().unwrap());
    }
    RouteSet::new(v.routes)
}

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    /// Upper bound on the child subproblem's useful cost.
    pub bound: f64,
    /// The repaired route set when repair beat the initial bound.
    pub routes: Option<RouteSet>,
}

/// Eject each customer of `h` in turn into a dedicated route and descend
/// under the child spec, keeping the cheapest feasible result below
/// `initial_bound`.
pub fn repair_for_child(
    parent: &RouteSet,
    spec: &SubproblemSpec,
    h: &[usize],
    initial_bound: f64,
) -> RepairOutcome {
    let mut out = RepairOutcome {
        bound: initial_bound,
        routes: None,
    };
    let mut cur: Vec<Vec<usize>> = parent.routes.iter().map(|r| r.0.clone()).collect();
    for &i in h {
        let Some(k) = cur.iter().position(|r| r.contains(&i)) else {
            continue;
        };
        cur[k].retain(|&c| c != i);
        if cur[k].is_empty() {
            cur.remove(k);
        }
        cur.push(vec![i]);
        let rs = RouteSet::new(cur.clone());
        if !spec.is_feasible(&rs) {
            continue;
        }
        let improved = vnd_improve(rs, spec);
        cur = improved.routes.iter().map(|r| r.0.clone()).collect();
        if let Ok(c) = improved.cost(spec.params) {
            if c < out.bound {
                out.bound = c;
                out.routes = Some(improved.canonical());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::instance::fixtures::toy;
    use crate::instance::Window;

    #[test]
    fn single_customer() {
        let mut inst = toy();
        for s in &mut inst.scenarios {
            s.demands = vec![0.0, 0.0, 1.0, 0.0];
        }
        let p = inst.scenario_params(0);
        let rs = construct_i1(&SubproblemSpec::exogenous(&p)).unwrap();
        assert_eq!(rs, RouteSet::new(vec![vec![3]]));
    }

    #[test]
    fn construction_is_feasible_and_bounded() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let spec = SubproblemSpec::exogenous(&p);
        let rs = construct_i1(&spec).unwrap();
        assert!(spec.is_feasible(&rs), "{rs}");
        assert!(rs.cost(&p).unwrap() >= 26.0);
    }

    #[test]
    fn unreachable_customer() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let mut w = p.exogenous.clone();
        w[3] = Window::new(0.0, 2.0);
        assert!(matches!(
            construct_i1(&SubproblemSpec::new(&p, w, vec![])),
            Err(VrptwError::Infeasible(_))
        ));
    }

    #[test]
    fn descent_from_singletons() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let spec = SubproblemSpec::exogenous(&p);
        let start = RouteSet::new(vec![vec![1], vec![4], vec![3], vec![2]]);
        let c0 = start.cost(&p).unwrap();
        let out = vnd_improve(start, &spec);
        let c1 = out.cost(&p).unwrap();
        assert!(spec.is_feasible(&out));
        assert!(c1 <= c0 && c1 >= 26.0, "{c0} -> {c1}");
        assert!(c1 < c0);
    }

    #[test]
    fn local_optimum_is_fixpoint() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let spec = SubproblemSpec::exogenous(&p);
        let opt = RouteSet::new(vec![vec![1, 4, 3], vec![2]]);
        assert_eq!(vnd_improve(opt.clone(), &spec), opt);
    }

    #[test]
    fn relocate_merges_singletons() {
        // Customers 3 and 4: 8 + 8 apart, 4 + 7 + 4 together.
        let mut inst = toy();
        for s in &mut inst.scenarios {
            s.demands = vec![0.0, 0.0, 1.0, 1.0];
        }
        let p = inst.scenario_params(1);
        let spec = SubproblemSpec::exogenous(&p);
        let out = vnd_improve(RouteSet::new(vec![vec![3], vec![4]]), &spec);
        assert_eq!(out.routes.len(), 1);
        assert_eq!(out.cost(&p).unwrap(), 15.0);
    }

    #[test]
    fn repair_left_child() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let f = vec![ForbiddenPath::new(4, 3, 7.0)];
        let spec = SubproblemSpec::new(&p, p.exogenous.clone(), f);
        let parent = RouteSet::new(vec![vec![1, 4, 3], vec![2]]);
        assert!(!spec.is_feasible(&parent));
        let r = repair_for_child(&parent, &spec, &[4, 3], f64::INFINITY);
        assert!(r.bound >= 27.0);
        assert!(r.bound.is_finite());
        let rs = r.routes.unwrap();
        assert!(spec.is_feasible(&rs));
        let none = repair_for_child(&parent, &spec, &[4, 3], 20.0);
        assert_eq!(none.bound, 20.0);
        assert!(none.routes.is_none());
    }
}
