//! Run reports: a JSON document and an aligned text table.

use serde::{Deserialize, Serialize};

use crate::branching::BranchDecision;
use crate::instance::Instance;
use crate::search::{NodeRecord, SearchConfig, SearchOutcome, TerminationReason};
use crate::separation::Assignment;
use crate::vrptw::RouteSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCost {
    pub scenario: usize,
    pub probability: f64,
    pub cost: f64,
}

/// Expected cost of an assignment computed from the first `scenarios`
/// scenarios, evaluated on all of them. `None` when some scenario has no
/// feasible route set under that assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavingsRow {
    pub scenarios: usize,
    pub expected_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutOfSample {
    pub scenarios: usize,
    pub seed: u64,
    pub expected_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasible: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub config: SearchConfig,
    /// `None` when no feasible assignment was found.
    pub upper_bound: Option<f64>,
    pub lower_bound: f64,
    pub lower_bound_proven: bool,
    pub gap: f64,
    pub nodes: usize,
    pub subproblem_solves: usize,
    pub wall_seconds: f64,
    pub solve_seconds: f64,
    pub termination: TerminationReason,
    pub root_objective: Option<f64>,
    pub root_decision: Option<BranchDecision>,
    pub epsilon: f64,
    pub assignment: Option<Assignment>,
    pub scenario_costs: Vec<ScenarioCost>,
    pub route_sets: Vec<RouteSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_of_sample: Option<OutOfSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub savings: Option<Vec<SavingsRow>>,
    pub log: Vec<NodeRecord>,
}

impl RunReport {
    pub fn new(instance: &str, cfg: &SearchConfig, out: &SearchOutcome, inst: &Instance) -> Self {
        let inc = out.incumbent.as_ref();
        let scenario_costs = inc
            .map(|inc| {
                inc.scenario_costs
                    .iter()
                    .enumerate()
                    .map(|(s, &cost)| ScenarioCost {
                        scenario: s,
                        probability: inst.scenarios[s].probability,
                        cost,
                    })
                    .collect()
            })
            .unwrap_or_default();
        Self {
            instance: instance.to_string(),
            config: cfg.clone(),
            upper_bound: out.upper_bound.is_finite().then_some(out.upper_bound),
            lower_bound: out.lower_bound,
            lower_bound_proven: out.lower_bound_proven,
            gap: out.gap,
            nodes: out.nodes,
            subproblem_solves: out.subproblem_solves,
            wall_seconds: out.wall_seconds,
            solve_seconds: out.solve_seconds,
            termination: out.termination,
            root_objective: out.root_objective,
            root_decision: out.root_decision,
            epsilon: out.epsilon,
            assignment: inc.map(|i| i.assignment.clone()),
            scenario_costs,
            route_sets: inc.map(|i| i.route_sets.clone()).unwrap_or_default(),
            out_of_sample: None,
            savings: None,
            log: out.log.clone(),
        }
    }

    /// The upper bound must equal the weighted per-scenario costs.
    pub fn check_consistency(&self) -> Result<(), String> {
        let Some(ub) = self.upper_bound else {
            return if self.scenario_costs.is_empty() {
                Ok(())
            } else {
                Err("scenario costs without an upper bound".into())
            };
        };
        let total: f64 = self
            .scenario_costs
            .iter()
            .map(|c| c.probability * c.cost)
            .sum();
        if (total - ub).abs() > 1e-6 {
            return Err(format!(
                "upper bound {ub} differs from weighted scenario costs {total}"
            ));
        }
        if self.lower_bound > ub + 1e-6 {
            return Err(format!(
                "lower bound {} exceeds upper bound {ub}",
                self.lower_bound
            ));
        }
        Ok(())
    }

    /// Copy with timing fields zeroed, for run-to-run comparison.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_seconds: 0.0,
            solve_seconds: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn table(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("inf".to_string(), |x| format!("{x:.2}"));
        let mut rows: Vec<(String, String)> = vec![
            ("instance".into(), self.instance.clone()),
            (
                "mode".into(),
                format!("{:?}", self.config.mode).to_lowercase(),
            ),
            ("termination".into(), self.termination.to_string()),
            ("upper bound".into(), fmt(self.upper_bound)),
            (
                "lower bound".into(),
                format!(
                    "{:.2}{}",
                    self.lower_bound,
                    if self.lower_bound_proven {
                        ""
                    } else {
                        " (not proven)"
                    }
                ),
            ),
            ("gap".into(), format!("{:.2}%", 100.0 * self.gap)),
            ("root objective".into(), fmt(self.root_objective)),
            ("nodes".into(), self.nodes.to_string()),
            ("subproblems".into(), self.subproblem_solves.to_string()),
            ("time (s)".into(), format!("{:.3}", self.wall_seconds)),
        ];
        if let Some(o) = &self.out_of_sample {
            let v = match (&o.expected_cost, &o.infeasible) {
                (Some(c), _) => format!("{c:.2}"),
                (None, Some(e)) => e.clone(),
                (None, None) => "-".into(),
            };
            rows.push((format!("out-of-sample ({})", o.scenarios), v));
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &rows {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        if !self.scenario_costs.is_empty() {
            out.push_str(&format!(
                "\n{:>8}  {:>11}  {:>10}\n",
                "scenario", "probability", "cost"
            ));
            for c in &self.scenario_costs {
                out.push_str(&format!(
                    "{:>8}  {:>11.4}  {:>10.2}\n",
                    c.scenario, c.probability, c.cost
                ));
            }
        }
        if let Some(a) = &self.assignment {
            out.push_str(&format!("\n{:>8}  {}\n", "customer", "window"));
            for (k, w) in a.windows.iter().enumerate() {
                out.push_str(&format!("{:>8}  {w}\n", k + 1));
            }
        }
        if let Some(rows) = &self.savings {
            out.push_str(&format!("\n{:>9}  {:>13}\n", "scenarios", "expected cost"));
            for r in rows {
                let v = r
                    .expected_cost
                    .map_or("infeasible".to_string(), |c| format!("{c:.2}"));
                out.push_str(&format!("{:>9}  {v:>13}\n", r.scenarios));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::toy;
    use crate::search::solve_twavrp;

    #[test]
    fn toy_report_is_consistent() {
        let inst = toy();
        let cfg = SearchConfig::default();
        let out = solve_twavrp(&inst, &cfg).unwrap();
        let r = RunReport::new("toy", &cfg, &out, &inst);
        r.check_consistency().unwrap();
        assert!(r.table().contains("upper bound     26.00"), "{}", r.table());
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.upper_bound, Some(26.0));
    }

    #[test]
    fn inconsistent_report_detected() {
        let inst = toy();
        let cfg = SearchConfig::default();
        let out = solve_twavrp(&inst, &cfg).unwrap();
        let mut r = RunReport::new("toy", &cfg, &out, &inst);
        r.upper_bound = Some(25.0);
        assert!(r.check_consistency().is_err());
    }
}
