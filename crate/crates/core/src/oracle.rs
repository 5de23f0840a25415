//! Exhaustive reference solvers and random small instances for checking the
//! main algorithm.
//!
//! * [`brute_force_vrptw`] enumerates every ordered partition of the routed
//!   customers.
//! * [`enumeration_oracle`] tries every window combination: all candidates
//!   of discrete customers and a grid of start times for continuous ones.
//!   Partial combinations are pruned with the bound obtained by leaving the
//!   remaining customers at their exogenous windows.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{
    generate_scenarios, nominal_demands, parse_instance_value, Customer, Instance, Scenario,
    TravelNetwork, Window, WindowDomain,
};
use crate::separation::Assignment;
use crate::vrptw::{solve_vrptw, RouteSet, SubproblemSpec, VrptwError};

pub const ORACLE_MAX_CUSTOMERS: usize = 8;
pub const ORACLE_MAX_SCENARIOS: usize = 3;

/// Minimum cost over every feasible route set, by brute force.
pub fn brute_force_vrptw(spec: &SubproblemSpec) -> Option<f64> {
    fn rec(
        k: usize,
        customers: &[usize],
        routes: &mut Vec<Vec<usize>>,
        spec: &SubproblemSpec,
        best: &mut f64,
    ) {
        if k == customers.len() {
            let rs = RouteSet::new(routes.clone());
            if spec.is_feasible(&rs) {
                let c = rs.cost(spec.params).unwrap();
                if c < *best {
                    *best = c;
                }
            }
            return;
        }
        let c = customers[k];
        for r in 0..routes.len() {
            for pos in 0..=routes[r].len() {
                routes[r].insert(pos, c);
                rec(k + 1, customers, routes, spec, best);
                routes[r].remove(pos);
            }
        }
        routes.push(vec![c]);
        rec(k + 1, customers, routes, spec, best);
        routes.pop();
    }
    let customers = spec.params.routed_customers();
    let mut best = f64::INFINITY;
    rec(0, &customers, &mut Vec::new(), spec, &mut best);
    best.is_finite().then_some(best)
}

/// Whether `inst` is small enough for the exhaustive oracles.
pub fn check_oracle_size(inst: &Instance) -> Result<(), String> {
    if inst.customer_count() > ORACLE_MAX_CUSTOMERS {
        return Err(format!(
            "{} customers exceed the oracle limit of {ORACLE_MAX_CUSTOMERS}",
            inst.customer_count()
        ));
    }
    if inst.scenario_count() > ORACLE_MAX_SCENARIOS {
        return Err(format!(
            "{} scenarios exceed the oracle limit of {ORACLE_MAX_SCENARIOS}",
            inst.scenario_count()
        ));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: f64,
    pub assignment: Assignment,
    /// Subproblems solved, memoized repeats excluded.
    pub solves: usize,
}

/// Assignable windows per customer: discrete candidates, or width-`w`
/// windows starting on the grid `e, e + step, ...` up to `l - w`.
pub fn window_choices(inst: &Instance, grid_step: f64) -> Vec<Vec<Window>> {
    inst.customers
        .iter()
        .map(|c| match &c.domain {
            WindowDomain::Discrete { candidates } => candidates.clone(),
            WindowDomain::Continuous { width } => {
                let last = c.window.hi - width;
                let mut out = Vec::new();
                let mut k = 0;
                loop {
                    let y = c.window.lo + k as f64 * grid_step;
                    if y > last + 1e-9 {
                        break;
                    }
                    out.push(Window::new(y, y + width));
                    k += 1;
                }
                if out.last().is_none_or(|w| w.lo < last - 1e-9) {
                    out.push(Window::new(last, last + width));
                }
                out
            }
        })
        .collect()
}

struct Enumerator<'a> {
    inst: &'a Instance,
    params: Vec<crate::instance::ScenarioParams>,
    choices: Vec<Vec<Window>>,
    memo: HashMap<(usize, Vec<u64>), Option<f64>>,
    best: f64,
    best_windows: Option<Vec<Window>>,
}

impl Enumerator<'_> {
    fn scenario_cost(&mut self, s: usize, windows: &[Window]) -> Result<Option<f64>, VrptwError> {
        let key = (
            s,
            windows
                .iter()
                .flat_map(|w| [w.lo.to_bits(), w.hi.to_bits()])
                .collect(),
        );
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        let spec = SubproblemSpec::new(&self.params[s], windows.to_vec(), Vec::new());
        let v = match solve_vrptw(&spec) {
            Ok(sol) => Some(sol.cost),
            Err(VrptwError::Infeasible(_)) => None,
            Err(e) => return Err(e),
        };
        self.memo.insert(key, v);
        Ok(v)
    }

    fn bound(&mut self, windows: &[Window]) -> Result<Option<f64>, VrptwError> {
        let mut total = 0.0;
        for s in 0..self.params.len() {
            match self.scenario_cost(s, windows)? {
                Some(c) => total += self.inst.scenarios[s].probability * c,
                None => return Ok(None),
            }
        }
        Ok(Some(total))
    }

    fn rec(&mut self, i: usize, windows: &mut Vec<Window>) -> Result<(), VrptwError> {
        let Some(lb) = self.bound(windows)? else {
            return Ok(());
        };
        if lb >= self.best - 1e-9 {
            return Ok(());
        }
        if i == windows.len() {
            self.best = lb;
            self.best_windows = Some(windows.clone());
            return Ok(());
        }
        let saved = windows[i];
        for k in 0..self.choices[i - 1].len() {
            windows[i] = self.choices[i - 1][k];
            self.rec(i + 1, windows)?;
        }
        windows[i] = saved;
        Ok(())
    }
}

/// Best expected cost over every window combination, `None` when no
/// combination is feasible.
pub fn enumeration_oracle(
    inst: &Instance,
    grid_step: f64,
) -> Result<Option<OracleResult>, VrptwError> {
    let mut e = Enumerator {
        inst,
        params: inst.all_scenario_params(),
        choices: window_choices(inst, grid_step),
        memo: HashMap::new(),
        best: f64::INFINITY,
        best_windows: None,
    };
    let mut windows = inst.exogenous_windows();
    e.rec(1, &mut windows)?;
    let solves = e.memo.len();
    Ok(e.best_windows.map(|w| OracleResult {
        value: e.best,
        assignment: Assignment {
            windows: w[1..].to_vec(),
            expected_cost: Some(e.best),
        },
        solves,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Continuous,
    Discrete,
    Mixed,
}

/// Shape of a random test instance.
#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub customers: usize,
    pub scenarios: usize,
    pub kind: DomainKind,
    pub max_candidates: usize,
    /// Add a random integer in `0..=3` to every arc.
    pub asymmetric: bool,
}

/// Small random instance with integral data on a 10 x 10 grid.
///
/// Costs and times are rounded Euclidean distances, capacity lies in
/// `5..=7` and demands in `0..=5` (zero about one time in ten). Every
/// customer can be served by a dedicated route under any of its windows.
pub fn random_instance(spec: &RandomSpec, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.customers;
    let coords: Vec<[f64; 2]> = (0..=n)
        .map(|k| {
            if k == 0 {
                [5.0, 5.0]
            } else {
                [
                    rng.random_range(0..=10) as f64,
                    rng.random_range(0..=10) as f64,
                ]
            }
        })
        .collect();
    let dist: Vec<Vec<f64>> = coords
        .iter()
        .map(|a| {
            coords
                .iter()
                .map(|b| {
                    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
                        .sqrt()
                        .round()
                })
                .collect::<Vec<f64>>()
        })
        .collect();
    let mut dist = dist;
    if spec.asymmetric {
        for row in dist.iter_mut() {
            for d in row.iter_mut() {
                *d += rng.random_range(0..=3) as f64;
            }
        }
    }
    let customers = (1..=n)
        .map(|i| {
            let e = dist[0][i] + rng.random_range(0..=4) as f64;
            let service_time = rng.random_range(0..=1) as f64;
            let discrete = match spec.kind {
                DomainKind::Continuous => false,
                DomainKind::Discrete => true,
                DomainKind::Mixed => rng.random_bool(0.5),
            };
            if discrete {
                let count = rng.random_range(1..=spec.max_candidates.max(1));
                let len = rng.random_range(10..=18) as f64;
                let width = if count == 1 {
                    len
                } else {
                    rng.random_range(2..=4) as f64
                };
                let candidates = (0..count)
                    .map(|k| {
                        let lo = if count == 1 {
                            e
                        } else {
                            e + ((len - width) * k as f64 / (count - 1) as f64).round()
                        };
                        Window::new(lo, (lo + width).min(e + len))
                    })
                    .collect();
                Customer {
                    window: Window::new(e, e + len),
                    service_time,
                    domain: WindowDomain::Discrete { candidates },
                }
            } else {
                let width = rng.random_range(1..=3) as f64;
                let slack = rng.random_range(4..=12) as f64;
                Customer {
                    window: Window::new(e, e + width + slack),
                    service_time,
                    domain: WindowDomain::Continuous { width },
                }
            }
        })
        .collect();
    let scenarios = (0..spec.scenarios)
        .map(|_| Scenario {
            probability: 1.0 / spec.scenarios as f64,
            demands: (0..n)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        0.0
                    } else {
                        rng.random_range(1..=5) as f64
                    }
                })
                .collect(),
            service_times: None,
            travel_times: None,
            costs: None,
        })
        .collect();
    let inst = Instance {
        name: Some(format!("random-{seed}")),
        network: TravelNetwork::from_dense(&dist),
        capacity: rng.random_range(5..=7) as f64,
        depot_window: Window::new(0.0, 100.0),
        customers,
        scenarios,
        nominal_demands: None,
    };
    parse_instance_value(inst).expect("generated instance is valid")
}

/// Random instance shaped like the published benchmarks: continuous
/// windows of common width 2 inside exogenous windows 17 long, capacity 20,
/// and `scenarios` demand scenarios. The first scenario holds the rounded-up
/// nominal demands, the rest come from [`generate_scenarios`].
pub fn generated_demand_instance(customers: usize, scenarios: usize, seed: u64) -> Instance {
    let mut inst = random_instance(
        &RandomSpec {
            customers,
            scenarios: 1,
            kind: DomainKind::Continuous,
            max_candidates: 1,
            asymmetric: false,
        },
        seed,
    );
    for c in &mut inst.customers {
        c.window = Window::new(c.window.lo, c.window.lo + 17.0);
        c.domain = WindowDomain::Continuous { width: 2.0 };
    }
    let nominal = nominal_demands(customers, seed);
    inst.scenarios[0].demands = nominal.iter().map(|q| q.max(1.0).ceil()).collect();
    inst.nominal_demands = Some(nominal);
    inst.capacity = 20.0;
    if scenarios <= 1 {
        return parse_instance_value(inst).expect("generated instance is valid");
    }
    generate_scenarios(&inst, scenarios - 1, seed).expect("generated instance is valid")
}

/// Random route sets, one per scenario, feasible under random node
/// windows. Windows are exogenous except for up to two customers whose
/// window is narrowed (never below the assignable width). Route sets are
/// random capacity-feasible orders, falling back to single-customer routes.
pub fn random_separation_case(inst: &Instance, seed: u64) -> (Vec<RouteSet>, Vec<Window>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = inst.all_scenario_params();
    let n = inst.customer_count();
    let mut windows = inst.exogenous_windows();
    for _ in 0..rng.random_range(0..=2) {
        let i = rng.random_range(1..=n);
        let c = inst.customer(i);
        let min_width = match &c.domain {
            WindowDomain::Continuous { width } => *width,
            WindowDomain::Discrete { candidates } => candidates[0].width(),
        };
        let span = c.window.width() - min_width;
        let cut_lo = (rng.random_range(0.0..=1.0) * span).round();
        let cut_hi = (rng.random_range(0.0..=1.0) * (span - cut_lo)).round();
        let w = Window::new(c.window.lo + cut_lo, c.window.hi - cut_hi);
        let mut trial = windows.clone();
        trial[i] = w;
        let ok = params.iter().all(|p| {
            p.routed_customers()
                .iter()
                .all(|&k| SubproblemSpec::new(p, trial.clone(), vec![]).route_feasible(&[k]))
        });
        if ok {
            windows = trial;
        }
    }
    let sets = params
        .iter()
        .map(|p| {
            let spec = SubproblemSpec::new(p, windows.clone(), Vec::new());
            let singles =
                RouteSet::new(p.routed_customers().into_iter().map(|k| vec![k]).collect());
            for _ in 0..200 {
                let mut order = p.routed_customers();
                for k in (1..order.len()).rev() {
                    order.swap(k, rng.random_range(0..=k));
                }
                let mut routes: Vec<Vec<usize>> = Vec::new();
                let mut load = f64::INFINITY;
                for c in order {
                    let q = p.demand[c];
                    if load + q > p.capacity + 1e-9 || rng.random_bool(0.25) {
                        routes.push(Vec::new());
                        load = 0.0;
                    }
                    routes.last_mut().unwrap().push(c);
                    load += q;
                }
                let rs = RouteSet::new(routes);
                if spec.is_feasible(&rs) {
                    return rs;
                }
            }
            singles
        })
        .collect();
    (sets, windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::toy;

    #[test]
    fn toy_oracle() {
        let r = enumeration_oracle(&toy(), 0.25).unwrap().unwrap();
        assert!((r.value - 26.0).abs() < 1e-9, "{}", r.value);
        r.assignment.check_domains(&toy()).unwrap();
    }

    #[test]
    fn grid_includes_last_start() {
        let inst = toy();
        let c = window_choices(&inst, 0.25);
        // Customer 1: [0, 10], width 3.
        assert_eq!(c[0].len(), 29);
        assert_eq!(c[0][28], Window::new(7.0, 10.0));
        let c = window_choices(&inst, 2.0);
        assert_eq!(c[0].last(), Some(&Window::new(7.0, 10.0)));
        assert_eq!(c[3].len(), 2);
    }

    #[test]
    fn random_instances_are_valid_and_deterministic() {
        for kind in [
            DomainKind::Continuous,
            DomainKind::Discrete,
            DomainKind::Mixed,
        ] {
            let spec = RandomSpec {
                customers: 5,
                scenarios: 3,
                kind,
                max_candidates: 3,
                asymmetric: kind == DomainKind::Mixed,
            };
            for seed in 0..20 {
                let a = random_instance(&spec, seed);
                assert!(a.validate().is_empty());
                assert_eq!(a, random_instance(&spec, seed));
            }
        }
    }
}
