//! Expected cost of a fixed window assignment.

use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::instance::{generate_scenarios, Instance};
use crate::separation::Assignment;
use crate::vrptw::{solve_vrptw, RouteSet, SolveMode, SubproblemSpec, VrptwError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Evaluation {
    pub expected_cost: f64,
    pub scenario_costs: Vec<f64>,
    pub route_sets: Vec<RouteSet>,
    /// Every scenario was solved to proven optimality.
    pub exact: bool,
}

/// Solve every scenario of `inst` under the fixed windows of `tau` and
/// average the costs by probability.
pub fn evaluate_assignment(
    inst: &Instance,
    tau: &Assignment,
    mode: SolveMode,
) -> Result<Evaluation, SearchError> {
    tau.check_domains(inst).map_err(SearchError::Assignment)?;
    let windows = tau.node_windows(inst);
    let mut out = Evaluation {
        expected_cost: 0.0,
        scenario_costs: Vec::new(),
        route_sets: Vec::new(),
        exact: true,
    };
    for (s, p) in inst.all_scenario_params().iter().enumerate() {
        let spec = SubproblemSpec::new(p, windows.clone(), Vec::new()).with_mode(mode);
        let sol = solve_vrptw(&spec).map_err(|e| match e {
            VrptwError::Infeasible(reason) => SearchError::InfeasibleScenario {
                scenario: s,
                reason,
            },
            e => SearchError::Vrptw(e),
        })?;
        out.expected_cost += inst.scenarios[s].probability * sol.cost;
        out.scenario_costs.push(sol.cost);
        out.route_sets.push(sol.routes);
        out.exact &= sol.optimal;
    }
    Ok(out)
}

/// `count` fresh demand scenarios on the network of `inst`, with equal
/// probabilities. Nominal demands come from the instance when stored,
/// otherwise from `seed`.
pub fn out_of_sample_instance(
    inst: &Instance,
    count: usize,
    seed: u64,
) -> Result<Instance, SearchError> {
    let mut base = inst.clone();
    base.scenarios.clear();
    generate_scenarios(&base, count, seed).map_err(SearchError::Instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::toy;
    use crate::instance::Window;

    #[test]
    fn toy_optimal_assignment() {
        let inst = toy();
        let out =
            crate::search::solve_twavrp(&inst, &crate::search::SearchConfig::default()).unwrap();
        let tau = out.incumbent.unwrap().assignment;
        let ev = evaluate_assignment(&inst, &tau, SolveMode::Exact).unwrap();
        assert!(
            (ev.expected_cost - 26.0).abs() < 1e-9,
            "{}",
            ev.expected_cost
        );
        assert!(ev.exact);
    }

    #[test]
    fn rejects_foreign_candidate() {
        let inst = toy();
        let tau = Assignment {
            windows: vec![
                Window::new(2.0, 5.0),
                Window::new(4.0, 7.0),
                Window::new(4.0, 7.0),
                Window::new(1.0, 7.0),
            ],
            expected_cost: None,
        };
        assert!(matches!(
            evaluate_assignment(&inst, &tau, SolveMode::Exact),
            Err(SearchError::Assignment(_))
        ));
    }

    #[test]
    fn infeasible_scenario_reported() {
        let inst = toy();
        let tau = Assignment {
            windows: vec![
                Window::new(0.0, 3.0),
                Window::new(0.0, 3.0),
                Window::new(0.0, 3.0),
                Window::new(0.0, 7.0),
            ],
            expected_cost: None,
        };
        assert!(matches!(
            evaluate_assignment(&inst, &tau, SolveMode::Exact),
            Err(SearchError::InfeasibleScenario { .. })
        ));
    }
}
