//! Exhaustive enumeration of feasible elementary routes.

use std::collections::{BTreeMap, HashMap};

use super::{segment_time, Route, SubproblemSpec, VrptwError, PATH_TOL};
use crate::instance::ScenarioParams;
use crate::EPS;

/// Hard cap on customers per enumerated route.
pub const ROUTE_LEN_CAP: usize = 8;

/// One column: the cheapest feasible route found for a customer set.
#[derive(Debug, Clone)]
pub struct Column {
    pub mask: u128,
    pub cost: f64,
    pub route: Route,
}

#[derive(Debug, Clone, Default)]
pub struct RoutePool {
    pub columns: Vec<Column>,
    /// The length cap cut off feasible extensions.
    pub capped: bool,
    /// Labels created during enumeration.
    pub labels: usize,
}

impl RoutePool {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn contains(&self, r: &[usize]) -> bool {
        self.columns.iter().any(|c| c.route.0 == r)
    }

    /// Add routes not already dominated by a column over the same set.
    /// Callers pass only routes feasible for the subproblem.
    pub fn inject(&mut self, routes: Vec<Route>, p: &ScenarioParams) {
        for r in routes {
            let Ok(cost) = super::route_cost(&r, p) else {
                continue;
            };
            let mask = mask_of(&r.0);
            match self.columns.iter_mut().find(|c| c.mask == mask) {
                Some(c) => {
                    if better(cost, &r.0, c.cost, &c.route.0) {
                        c.cost = cost;
                        c.route = r;
                    }
                }
                None => self.columns.push(Column {
                    mask,
                    cost,
                    route: r,
                }),
            }
        }
    }
}

pub(crate) fn mask_of(r: &[usize]) -> u128 {
    r.iter().fold(0u128, |m, &c| m | (1u128 << c))
}

fn better(cost: f64, seq: &[usize], other_cost: f64, other: &[usize]) -> bool {
    cost < other_cost - 1e-9 || (cost <= other_cost + 1e-9 && seq < other)
}

/// `ceil(Q / smallest positive demand)`, at most [`ROUTE_LEN_CAP`].
pub fn default_max_route_len(p: &ScenarioParams) -> usize {
    natural_route_len(p).min(ROUTE_LEN_CAP)
}

fn natural_route_len(p: &ScenarioParams) -> usize {
    let qmin = p
        .routed_customers()
        .iter()
        .map(|&c| p.demand[c])
        .fold(f64::INFINITY, f64::min);
    if !qmin.is_finite() {
        return 0;
    }
    let k = (p.capacity / qmin + 1e-9).floor();
    (k as usize).min(p.routed_customers().len())
}

#[derive(Clone)]
struct Label {
    set: u128,
    last: usize,
    cost: f64,
    time: f64,
    load: f64,
    seq: Vec<usize>,
}

/// Every elementary route feasible for capacity, windows and forbidden
/// paths, with at most `max_len` customers (default
/// [`default_max_route_len`]). Only the cheapest route per customer set is
/// kept. Partial routes over the same set ending at the same customer are
/// pruned when another one is no later and no costlier, except when the
/// set contains the origin of a forbidden-path family.
pub fn enumerate_routes(
    spec: &SubproblemSpec,
    max_len: Option<usize>,
    pool_limit: usize,
) -> Result<RoutePool, VrptwError> {
    let p = spec.params;
    let n = p.node_count;
    if n > 128 {
        return Err(VrptwError::Overflow(pool_limit));
    }
    let routed = p.routed_customers();
    let natural = natural_route_len(p);
    let max_len = max_len.unwrap_or_else(|| default_max_route_len(p));
    let origins: u128 = spec
        .forbidden
        .iter()
        .filter(|f| f.from < n)
        .fold(0, |m, f| m | (1u128 << f.from));
    let w = &spec.windows;
    let depot = w[0];

    let mut best: HashMap<u128, (f64, Vec<usize>)> = HashMap::new();
    let mut labels = 0usize;
    let mut level: BTreeMap<(u128, usize), Vec<Label>> = BTreeMap::new();
    for &c in &routed {
        if !spec.arc_allowed(0, c) || p.demand[c] > p.capacity + EPS {
            continue;
        }
        let a = (depot.lo + p.time(0, c)).max(w[c].lo);
        if a > w[c].hi + EPS {
            continue;
        }
        labels += 1;
        level.insert(
            (1u128 << c, c),
            vec![Label {
                set: 1u128 << c,
                last: c,
                cost: p.cost(0, c),
                time: a,
                load: p.demand[c],
                seq: vec![c],
            }],
        );
    }
    let mut capped = false;
    let mut len = 1;
    while !level.is_empty() {
        for bucket in level.values() {
            for l in bucket {
                let k = l.last;
                if spec.arc_allowed(k, 0) && l.time + p.service[k] + p.time(k, 0) <= depot.hi + EPS
                {
                    let cost = l.cost + p.cost(k, 0);
                    match best.get(&l.set) {
                        Some((bc, bs)) if !better(cost, &l.seq, *bc, bs) => {}
                        _ => {
                            best.insert(l.set, (cost, l.seq.clone()));
                        }
                    }
                }
            }
        }
        if len >= max_len {
            if len < natural
                && level
                    .values()
                    .flatten()
                    .any(|l| has_extension(spec, &routed, l))
            {
                capped = true;
            }
            break;
        }
        let mut next: BTreeMap<(u128, usize), Vec<Label>> = BTreeMap::new();
        for bucket in level.values() {
            for l in bucket {
                for &j in &routed {
                    let Some(nl) = extend(spec, l, j) else {
                        continue;
                    };
                    let prune = nl.set & origins == 0;
                    let b = next.entry((nl.set, j)).or_default();
                    if prune {
                        if b.iter().any(|o| dominates(o, &nl)) {
                            continue;
                        }
                        b.retain(|o| !dominates(&nl, o));
                    }
                    b.push(nl);
                    labels += 1;
                    if labels > pool_limit {
                        return Err(VrptwError::Overflow(pool_limit));
                    }
                }
            }
        }
        level = next;
        len += 1;
    }
    let mut columns: Vec<Column> = best
        .into_iter()
        .map(|(mask, (cost, seq))| Column {
            mask,
            cost,
            route: Route(seq),
        })
        .collect();
    columns.sort_by(|a, b| a.route.cmp(&b.route));
    Ok(RoutePool {
        columns,
        capped,
        labels,
    })
}

fn dominates(a: &Label, b: &Label) -> bool {
    a.cost <= b.cost + 1e-9
        && a.time <= b.time + 1e-9
        && (a.cost < b.cost - 1e-9 || a.time < b.time - 1e-9 || a.seq <= b.seq)
}

fn has_extension(spec: &SubproblemSpec, routed: &[usize], l: &Label) -> bool {
    routed.iter().any(|&j| extend(spec, l, j).is_some())
}

fn extend(spec: &SubproblemSpec, l: &Label, j: usize) -> Option<Label> {
    let p = spec.params;
    let bit = 1u128 << j;
    if l.set & bit != 0 || !spec.arc_allowed(l.last, j) {
        return None;
    }
    let load = l.load + p.demand[j];
    if load > p.capacity + EPS {
        return None;
    }
    let a = (l.time + p.service[l.last] + p.time(l.last, j)).max(spec.windows[j].lo);
    if a > spec.windows[j].hi + EPS {
        return None;
    }
    let mut seq = l.seq.clone();
    seq.push(j);
    for f in &spec.forbidden {
        if f.to != j || f.from >= 128 || l.set & (1u128 << f.from) == 0 {
            continue;
        }
        let pos = seq.iter().position(|&c| c == f.from)?;
        if segment_time(&seq, pos, seq.len() - 1, p) >= f.threshold - PATH_TOL {
            return None;
        }
    }
    Some(Label {
        set: l.set | bit,
        last: j,
        cost: l.cost + p.cost(l.last, j),
        time: a,
        load,
        seq,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::instance::fixtures::toy;

    #[test]
    fn toy_pool_contains_optimal_routes() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let spec = preprocess(&SubproblemSpec::exogenous(&p)).unwrap();
        let pool = enumerate_routes(&spec, Some(3), DEFAULT_POOL_LIMIT).unwrap();
        assert!(pool.contains(&[1, 4, 3]));
        assert!(pool.contains(&[2]));
        assert!(!pool.capped);
    }

    #[test]
    fn forbidden_family_excluded() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let f = vec![ForbiddenPath::new(4, 3, 7.0)];
        let spec = preprocess(&SubproblemSpec::new(&p, p.exogenous.clone(), f.clone())).unwrap();
        let pool = enumerate_routes(&spec, None, DEFAULT_POOL_LIMIT).unwrap();
        for c in &pool.columns {
            assert!(
                route_respects_forbidden_paths(&c.route.0, &f, &p),
                "{}",
                c.route
            );
        }
        assert!(pool.contains(&[3, 1, 4]) || pool.contains(&[1, 3, 4]));
    }

    #[test]
    fn capacity_below_every_demand_gives_empty_pool() {
        let mut inst = toy();
        inst.capacity = 0.5;
        let p = inst.scenario_params(0);
        let spec = SubproblemSpec::exogenous(&p);
        let pool = enumerate_routes(&spec, None, DEFAULT_POOL_LIMIT).unwrap();
        assert!(pool.is_empty());
        assert!(solve_vrptw(&spec).is_err());
    }

    #[test]
    fn overflow_reported() {
        let inst = toy();
        let p = inst.scenario_params(1);
        let spec = SubproblemSpec::exogenous(&p);
        assert_eq!(
            enumerate_routes(&spec, None, 2).unwrap_err(),
            VrptwError::Overflow(2)
        );
    }

    #[test]
    fn default_length() {
        let inst = toy();
        assert_eq!(default_max_route_len(&inst.scenario_params(0)), 3);
    }
}
