//! Exact set partitioning over an enumerated route pool.

use super::enumerate::RoutePool;
use super::{RouteSet, VrptwError};
use crate::EPS;

const TIE: f64 = 1e-9;

struct Search<'a> {
    pool: &'a RoutePool,
    by_customer: Vec<Vec<usize>>,
    ratio: Vec<f64>,
    customers: Vec<usize>,
    best: f64,
    best_cols: Option<Vec<usize>>,
    best_repr: Vec<Vec<usize>>,
    stack: Vec<usize>,
}

impl Search<'_> {
    fn repr(&self, cols: &[usize]) -> Vec<Vec<usize>> {
        let mut r: Vec<Vec<usize>> = cols
            .iter()
            .map(|&c| self.pool.columns[c].route.0.clone())
            .collect();
        r.sort();
        r
    }

    fn run(&mut self, covered: u128, cost: f64) {
        let Some(&k) = self
            .customers
            .iter()
            .find(|&&c| covered & (1u128 << c) == 0)
        else {
            let cols = self.stack.clone();
            if cost < self.best - TIE || self.best_cols.is_none() {
                self.best_repr = self.repr(&cols);
                self.best = cost;
                self.best_cols = Some(cols);
            } else if cost <= self.best + TIE {
                let repr = self.repr(&cols);
                if repr < self.best_repr {
                    self.best_repr = repr;
                    self.best = self.best.min(cost);
                    self.best_cols = Some(cols);
                }
            }
            return;
        };
        let bound: f64 = cost
            + self
                .customers
                .iter()
                .filter(|&&c| covered & (1u128 << c) == 0)
                .map(|&c| self.ratio[c])
                .sum::<f64>();
        if bound > self.best + TIE {
            return;
        }
        for idx in 0..self.by_customer[k].len() {
            let ci = self.by_customer[k][idx];
            let col = &self.pool.columns[ci];
            if col.mask & covered != 0 {
                continue;
            }
            let next = cost + col.cost;
            if next > self.best + TIE {
                // Columns are sorted by cost.
                break;
            }
            self.stack.push(ci);
            self.run(covered | col.mask, next);
            self.stack.pop();
        }
    }
}

/// Minimum-cost exact cover of the positive-demand customers by pool
/// columns. `upper_bound_hint` only prunes: when no cover within the hint
/// exists the search is repeated without it. Ties go to the
/// lexicographically smallest sorted route list.
pub fn solve_set_partitioning(
    pool: &RoutePool,
    demands: &[f64],
    upper_bound_hint: f64,
) -> Result<(RouteSet, f64), VrptwError> {
    let n = demands.len();
    let customers: Vec<usize> = (1..n).filter(|&c| demands[c] > EPS).collect();
    let routed_mask: u128 = customers.iter().fold(0, |m, &c| m | (1u128 << c));
    let mut by_customer = vec![Vec::new(); n];
    let mut ratio = vec![f64::INFINITY; n];
    for (ci, col) in pool.columns.iter().enumerate() {
        if col.mask & !routed_mask != 0 {
            continue;
        }
        let size = col.mask.count_ones() as f64;
        for &c in &col.route.0 {
            by_customer[c].push(ci);
            ratio[c] = ratio[c].min(col.cost / size);
        }
    }
    for &c in &customers {
        if by_customer[c].is_empty() {
            return Err(VrptwError::Infeasible(format!(
                "no feasible route serves customer {c}"
            )));
        }
        by_customer[c].sort_by(|&a, &b| {
            let (x, y) = (&pool.columns[a], &pool.columns[b]);
            x.cost
                .total_cmp(&y.cost)
                .then_with(|| x.route.cmp(&y.route))
        });
    }
    for hint in [upper_bound_hint, f64::INFINITY] {
        let mut s = Search {
            pool,
            by_customer: by_customer.clone(),
            ratio: ratio.clone(),
            customers: customers.clone(),
            best: hint,
            best_cols: None,
            best_repr: Vec::new(),
            stack: Vec::new(),
        };
        s.run(0, 0.0);
        if let Some(cols) = s.best_cols {
            let rs = RouteSet {
                routes: cols
                    .iter()
                    .map(|&c| pool.columns[c].route.clone())
                    .collect(),
            }
            .canonical();
            let cost = cols.iter().map(|&c| pool.columns[c].cost).sum();
            return Ok((rs, cost));
        }
        if hint.is_infinite() {
            break;
        }
    }
    Err(VrptwError::Infeasible(
        "no partition of the customers into feasible routes".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::super::enumerate::{Column, RoutePool};
    use super::super::Route;
    use super::*;

    fn col(route: Vec<usize>, cost: f64) -> Column {
        Column {
            mask: super::super::enumerate::mask_of(&route),
            cost,
            route: Route(route),
        }
    }

    fn pool() -> RoutePool {
        RoutePool {
            columns: vec![col(vec![1], 4.0), col(vec![2], 8.0), col(vec![1, 2], 8.0)],
            ..Default::default()
        }
    }

    #[test]
    fn picks_merged_route() {
        let (rs, cost) = solve_set_partitioning(&pool(), &[0.0, 1.0, 1.0], f64::INFINITY).unwrap();
        assert_eq!(cost, 8.0);
        assert_eq!(rs, RouteSet::new(vec![vec![1, 2]]));
    }

    #[test]
    fn low_hint_still_optimal() {
        let (_, cost) = solve_set_partitioning(&pool(), &[0.0, 1.0, 1.0], 3.0).unwrap();
        assert_eq!(cost, 8.0);
    }

    #[test]
    fn zero_demand_customers_ignored() {
        let (rs, cost) = solve_set_partitioning(&pool(), &[0.0, 1.0, 0.0], f64::INFINITY).unwrap();
        assert_eq!(cost, 4.0);
        assert_eq!(rs, RouteSet::new(vec![vec![1]]));
    }

    #[test]
    fn uncovered_customer_is_infeasible() {
        let p = RoutePool {
            columns: vec![col(vec![1], 4.0)],
            ..Default::default()
        };
        assert!(solve_set_partitioning(&p, &[0.0, 1.0, 1.0], f64::INFINITY).is_err());
    }

    #[test]
    fn ties_prefer_smaller_representation() {
        let p = RoutePool {
            columns: vec![col(vec![2, 1], 5.0), col(vec![1, 2], 5.0)],
            ..Default::default()
        };
        let (rs, _) = solve_set_partitioning(&p, &[0.0, 1.0, 1.0], f64::INFINITY).unwrap();
        assert_eq!(rs, RouteSet::new(vec![vec![1, 2]]));
    }
}
