//! Window tightening and arc elimination.

use super::{SubproblemSpec, VrptwError};
use crate::EPS;

const MAX_ROUNDS: usize = 1000;

/// Tighten windows of routed customers and drop arcs that no feasible route
/// can use. The optimal value of the subproblem is unchanged.
///
/// Windows: the earliest arrival at `k` is at least the cheapest way to
/// reach it from any remaining predecessor, and the latest arrival is at
/// most the latest departure that still reaches some successor in time.
/// Arcs are dropped when the window of the head cannot be met from the
/// window of the tail, when the two demands exceed capacity together, or
/// when the arc alone realizes a forbidden path.
pub fn preprocess<'a>(spec: &SubproblemSpec<'a>) -> Result<SubproblemSpec<'a>, VrptwError> {
    let p = spec.params;
    let n = p.node_count;
    let routed: Vec<usize> = p.routed_customers();
    for &c in &routed {
        if p.demand[c] > p.capacity + EPS {
            return Err(VrptwError::Infeasible(format!(
                "customer {c} demand {} exceeds capacity {}",
                p.demand[c], p.capacity
            )));
        }
    }
    let mut out = spec.clone();
    let mut mask = vec![false; n * n];
    let nodes: Vec<usize> = std::iter::once(0).chain(routed.iter().copied()).collect();
    for &i in &nodes {
        for &j in &nodes {
            mask[i * n + j] = i != j && spec.arc_allowed(i, j);
        }
    }
    for (i, j) in pairs(&routed) {
        if p.demand[i] + p.demand[j] > p.capacity + EPS {
            mask[i * n + j] = false;
        }
    }
    for fp in &spec.forbidden {
        let (i, j) = (fp.from, fp.to);
        if i < n && j < n && p.time(i, j) + p.service[i] >= fp.threshold - super::PATH_TOL {
            mask[i * n + j] = false;
        }
    }
    let w = &mut out.windows;
    let depot = w[0];
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        for &k in &routed {
            let lo = nodes
                .iter()
                .filter(|&&i| mask[i * n + k])
                .map(|&i| w[i].lo + p.service[i] + p.time(i, k))
                .fold(f64::INFINITY, f64::min);
            let hi = nodes
                .iter()
                .filter(|&&j| mask[k * n + j])
                .map(|&j| {
                    let cap = if j == 0 { depot.hi } else { w[j].hi };
                    cap - p.service[k] - p.time(k, j)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if lo > w[k].lo + EPS {
                w[k].lo = lo;
                changed = true;
            }
            if hi < w[k].hi - EPS {
                w[k].hi = hi;
                changed = true;
            }
            if w[k].is_empty() {
                return Err(VrptwError::Infeasible(format!(
                    "customer {k} cannot be reached within its window"
                )));
            }
        }
        for &i in &nodes {
            for &j in &nodes {
                let a = i * n + j;
                if !mask[a] {
                    continue;
                }
                let depart = if i == 0 {
                    depot.lo
                } else {
                    w[i].lo + p.service[i]
                };
                let latest = if j == 0 { depot.hi } else { w[j].hi };
                if depart + p.time(i, j) > latest + EPS {
                    mask[a] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    out.arc_mask = Some(mask);
    Ok(out)
}

fn pairs(c: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    c.iter()
        .flat_map(move |&i| c.iter().filter(move |&&j| j != i).map(move |&j| (i, j)))
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::instance::fixtures::toy;

    #[test]
    fn raises_earliest_arrival() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let spec = SubproblemSpec::exogenous(&p);
        let pre = preprocess(&spec).unwrap();
        // Node 3 is 4 from the depot and at least 4 from every customer.
        assert_eq!(pre.windows[3].lo, 4.0);
        assert_eq!(pre.windows[1].lo, 2.0);
    }

    #[test]
    fn single_predecessor() {
        // Only the depot can precede customer 2 once its demand fills a
        // vehicle.
        let inst = toy();
        let p = inst.scenario_params(0);
        let pre = preprocess(&SubproblemSpec::exogenous(&p)).unwrap();
        assert_eq!(pre.windows[2].lo, 4.0);
        assert!(!pre.arc_allowed(1, 2));
        assert!(pre.arc_allowed(0, 2));
    }

    #[test]
    fn forbidden_arc_removed() {
        let inst = toy();
        let p = inst.scenario_params(0);
        let spec =
            SubproblemSpec::new(&p, p.exogenous.clone(), vec![ForbiddenPath::new(1, 4, 3.0)]);
        let pre = preprocess(&spec).unwrap();
        assert!(!pre.arc_allowed(1, 4));
        assert!(pre.arc_allowed(4, 1));
    }

    #[test]
    fn fixpoint() {
        let inst = toy();
        let p = inst.scenario_params(1);
        let once = preprocess(&SubproblemSpec::exogenous(&p)).unwrap();
        let twice = preprocess(&once).unwrap();
        assert_eq!(once.windows, twice.windows);
        assert_eq!(once.removed_arc_count(), twice.removed_arc_count());
    }

    #[test]
    fn oversized_demand_is_infeasible() {
        let mut inst = toy();
        inst.capacity = 0.5;
        let p = inst.scenario_params(0);
        assert!(matches!(
            preprocess(&SubproblemSpec::exogenous(&p)),
            Err(VrptwError::Infeasible(_))
        ));
    }
}
