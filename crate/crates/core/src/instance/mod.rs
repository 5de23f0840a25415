//! Instance data: network, windows, window domains and scenarios.
//!
//! Node `0` is the depot and nodes `1..=n` are customers. Customer records
//! are stored in `customers[i - 1]`; per-node vectors elsewhere in the crate
//! (windows, demands, arrival times) are indexed by node id directly.

mod generate;
pub mod spliet;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::EPS;

pub use generate::{generate_scenarios, nominal_demands};
pub use spliet::parse_spliet;

/// A closed time interval `[lo, hi]`. Serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi + EPS
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo - EPS && t <= self.hi + EPS
    }

    /// Whether `self` lies inside `outer`, up to tolerance.
    pub fn within(&self, outer: &Window) -> bool {
        self.lo >= outer.lo - EPS && self.hi <= outer.hi + EPS
    }

    /// Distance from `t` to the nearest point of the window.
    pub fn distance(&self, t: f64) -> f64 {
        if t < self.lo {
            self.lo - t
        } else if t > self.hi {
            t - self.hi
        } else {
            0.0
        }
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

impl From<[f64; 2]> for Window {
    fn from(v: [f64; 2]) -> Self {
        Window::new(v[0], v[1])
    }
}

impl From<Window> for [f64; 2] {
    fn from(w: Window) -> Self {
        [w.lo, w.hi]
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Square matrix with `None` marking a missing arc.
pub type ArcMatrix = Vec<Vec<Option<f64>>>;

/// Directed graph with per-arc cost and travel time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravelNetwork {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<[f64; 2]>>,
    pub cost: ArcMatrix,
    pub time: ArcMatrix,
}

impl TravelNetwork {
    /// Complete graph over `coordinates` with Euclidean cost and time.
    pub fn euclidean(coordinates: Vec<[f64; 2]>) -> Self {
        let n = coordinates.len();
        let mut cost = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let dx = coordinates[i][0] - coordinates[j][0];
                    let dy = coordinates[i][1] - coordinates[j][1];
                    cost[i][j] = Some((dx * dx + dy * dy).sqrt());
                }
            }
        }
        Self {
            coordinates: Some(coordinates),
            time: cost.clone(),
            cost,
        }
    }

    /// Complete graph from a dense matrix used for both cost and time.
    pub fn from_dense(matrix: &[Vec<f64>]) -> Self {
        let n = matrix.len();
        let m: ArcMatrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { None } else { Some(matrix[i][j]) })
                    .collect()
            })
            .collect();
        Self {
            coordinates: None,
            cost: m.clone(),
            time: m,
        }
    }

    pub fn node_count(&self) -> usize {
        self.cost.len()
    }
}

/// Set of assignable windows for one customer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowDomain {
    /// Any sub-interval of the exogenous window of the given width.
    Continuous { width: f64 },
    /// One of an ordered list of candidate intervals.
    Discrete { candidates: Vec<Window> },
}

impl WindowDomain {
    pub fn is_discrete(&self) -> bool {
        matches!(self, WindowDomain::Discrete { .. })
    }

    /// Width used by path statistics: `w` for continuous customers and the
    /// widest candidate for discrete ones.
    pub fn reference_width(&self) -> f64 {
        match self {
            WindowDomain::Continuous { width } => *width,
            WindowDomain::Discrete { candidates } => {
                candidates.iter().map(Window::width).fold(0.0, f64::max)
            }
        }
    }

    pub fn candidates(&self) -> &[Window] {
        match self {
            WindowDomain::Continuous { .. } => &[],
            WindowDomain::Discrete { candidates } => candidates,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub window: Window,
    #[serde(default)]
    pub service_time: f64,
    pub domain: WindowDomain,
}

/// One joint realization of the operational parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub probability: f64,
    /// Demand per customer, `demands[i - 1]` for customer `i`.
    pub demands: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub service_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub travel_times: Option<ArcMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<ArcMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub network: TravelNetwork,
    pub capacity: f64,
    pub depot_window: Window,
    pub customers: Vec<Customer>,
    pub scenarios: Vec<Scenario>,
    /// Nominal demand per customer used when generating extra scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_demands: Option<Vec<f64>>,
}

/// A broken invariant, reported as data by [`Instance::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parse, canonicalize and validate an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let inst: Instance = serde_json::from_str(text).map_err(|e| {
        InstanceError::Parse(format!("{e} (line {}, column {})", e.line(), e.column()))
    })?;
    parse_instance_value(inst)
}

/// Canonicalize and validate an instance built in memory.
pub fn parse_instance_value(mut inst: Instance) -> Result<Instance, InstanceError> {
    inst.canonicalize();
    inst.check()?;
    Ok(inst)
}

/// Dense per-scenario parameters with overrides applied. Missing arcs are
/// stored as infinite cost and time.
#[derive(Debug, Clone)]
pub struct ScenarioParams {
    pub index: usize,
    pub probability: f64,
    pub node_count: usize,
    pub capacity: f64,
    pub depot: Window,
    /// Exogenous windows by node id (entry 0 is the depot window).
    pub exogenous: Vec<Window>,
    /// Service time by node id, zero at the depot.
    pub service: Vec<f64>,
    /// Demand by node id, zero at the depot.
    pub demand: Vec<f64>,
    cost: Vec<f64>,
    time: Vec<f64>,
}

impl ScenarioParams {
    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.node_count + j]
    }

    #[inline]
    pub fn time(&self, i: usize, j: usize) -> f64 {
        self.time[i * self.node_count + j]
    }

    #[inline]
    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        i != j && self.cost(i, j).is_finite() && self.time(i, j).is_finite()
    }

    pub fn customer_count(&self) -> usize {
        self.node_count - 1
    }

    /// Customers with positive demand, ascending.
    pub fn routed_customers(&self) -> Vec<usize> {
        (1..self.node_count)
            .filter(|&i| self.demand[i] > EPS)
            .collect()
    }

    /// Whether every travel and service time is integral.
    pub fn integral_times(&self) -> bool {
        let int = |x: f64| !x.is_finite() || (x - x.round()).abs() < 1e-9;
        self.time.iter().all(|&t| int(t)) && self.service.iter().all(|&u| int(u))
    }
}

impl Instance {
    pub fn customer_count(&self) -> usize {
        self.customers.len()
    }

    pub fn scenario_count(&self) -> usize {
        self.scenarios.len()
    }

    /// Customer record for node id `i` (1-based).
    pub fn customer(&self, i: usize) -> &Customer {
        &self.customers[i - 1]
    }

    pub fn is_discrete(&self, i: usize) -> bool {
        self.customer(i).domain.is_discrete()
    }

    /// Exogenous windows by node id, depot first.
    pub fn exogenous_windows(&self) -> Vec<Window> {
        std::iter::once(self.depot_window)
            .chain(self.customers.iter().map(|c| c.window))
            .collect()
    }

    /// Reference widths by node id (depot entry is zero).
    pub fn reference_widths(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.customers.iter().map(|c| c.domain.reference_width()))
            .collect()
    }

    pub fn scenario_params(&self, s: usize) -> ScenarioParams {
        let sc = &self.scenarios[s];
        let n = self.network.node_count();
        let pick = |over: &Option<ArcMatrix>, base: &ArcMatrix| -> Vec<f64> {
            let m = over.as_ref().unwrap_or(base);
            let mut out = vec![f64::INFINITY; n * n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        if let Some(v) = m[i][j] {
                            out[i * n + j] = v;
                        }
                    }
                }
            }
            out
        };
        let mut cost = pick(&sc.costs, &self.network.cost);
        let mut time = pick(&sc.travel_times, &self.network.time);
        // An arc exists only where both attributes are present.
        for k in 0..n * n {
            if !cost[k].is_finite() || !time[k].is_finite() {
                cost[k] = f64::INFINITY;
                time[k] = f64::INFINITY;
            }
        }
        let mut service = vec![0.0; n];
        let mut demand = vec![0.0; n];
        for i in 1..n {
            service[i] = sc
                .service_times
                .as_ref()
                .map_or(self.customers[i - 1].service_time, |u| u[i - 1]);
            demand[i] = sc.demands[i - 1];
        }
        ScenarioParams {
            index: s,
            probability: sc.probability,
            node_count: n,
            capacity: self.capacity,
            depot: self.depot_window,
            exogenous: self.exogenous_windows(),
            service,
            demand,
            cost,
            time,
        }
    }

    pub fn all_scenario_params(&self) -> Vec<ScenarioParams> {
        (0..self.scenario_count())
            .map(|s| self.scenario_params(s))
            .collect()
    }

    /// Apply the discrete-domain canonical form: nested candidates collapse
    /// to the larger one, endpoints are aligned with the exogenous window,
    /// and candidates are sorted by start.
    pub fn canonicalize(&mut self) {
        for c in &mut self.customers {
            let WindowDomain::Discrete { candidates } = &mut c.domain else {
                continue;
            };
            if candidates.is_empty() {
                continue;
            }
            let first_lo = candidates
                .iter()
                .map(|w| w.lo)
                .fold(f64::INFINITY, f64::min);
            let last_hi = candidates
                .iter()
                .map(|w| w.hi)
                .fold(f64::NEG_INFINITY, f64::max);
            // Shift the exogenous window inward to the candidate hull, then
            // clip candidates to the exogenous window.
            c.window.lo = c.window.lo.max(first_lo);
            c.window.hi = c.window.hi.min(last_hi);
            for w in candidates.iter_mut() {
                w.lo = w.lo.max(c.window.lo);
                w.hi = w.hi.min(c.window.hi);
            }
            candidates.retain(|w| w.lo <= w.hi);
            *candidates = remove_nested(candidates);
        }
    }

    /// All invariant violations, empty when the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.network.node_count();
        if n < 2 {
            out.push(Violation::new(
                "network",
                "needs a depot and at least one customer",
            ));
        }
        if self.customers.len() + 1 != n {
            out.push(Violation::new(
                "customers",
                format!("expected {} customers for {} nodes", n.saturating_sub(1), n),
            ));
        }
        check_matrix(&mut out, "network.cost", &self.network.cost, n);
        check_matrix(&mut out, "network.time", &self.network.time, n);
        if let Some(coords) = &self.network.coordinates {
            if coords.len() != n {
                out.push(Violation::new(
                    "network.coordinates",
                    "length must equal node count",
                ));
            }
        }
        if !(self.capacity.is_finite() && self.capacity > 0.0) {
            out.push(Violation::new("capacity", "must be finite and positive"));
        }
        check_window(&mut out, "depot_window", &self.depot_window);
        for (k, c) in self.customers.iter().enumerate() {
            let f = format!("customers[{k}]");
            check_window(&mut out, &format!("{f}.window"), &c.window);
            if !(c.service_time.is_finite() && c.service_time >= 0.0) {
                out.push(Violation::new(
                    format!("{f}.service_time"),
                    "must be finite and non-negative",
                ));
            }
            match &c.domain {
                WindowDomain::Continuous { width } => {
                    if !(width.is_finite() && *width >= 0.0) {
                        out.push(Violation::new(
                            format!("{f}.domain.width"),
                            "must be finite and non-negative",
                        ));
                    } else if c.window.lo > c.window.hi - width + EPS {
                        out.push(Violation::new(
                            format!("{f}.domain.width"),
                            "exogenous window must satisfy e <= l - w",
                        ));
                    }
                }
                WindowDomain::Discrete { candidates } => {
                    check_candidates(&mut out, &f, &c.window, candidates);
                }
            }
        }
        if self.scenarios.is_empty() {
            out.push(Violation::new(
                "scenarios",
                "at least one scenario is required",
            ));
        }
        let mut total = 0.0;
        for (s, sc) in self.scenarios.iter().enumerate() {
            let f = format!("scenarios[{s}]");
            if !(sc.probability.is_finite() && sc.probability > 0.0) {
                out.push(Violation::new(
                    format!("{f}.probability"),
                    "must be positive",
                ));
            }
            total += sc.probability;
            if sc.demands.len() != self.customers.len() {
                out.push(Violation::new(
                    format!("{f}.demands"),
                    "one demand per customer",
                ));
            }
            for (k, &q) in sc.demands.iter().enumerate() {
                if !(q.is_finite() && q >= 0.0) {
                    out.push(Violation::new(
                        format!("{f}.demands[{k}]"),
                        "demand must be non-negative",
                    ));
                }
            }
            if let Some(u) = &sc.service_times {
                if u.len() != self.customers.len()
                    || u.iter().any(|x| !(x.is_finite() && *x >= 0.0))
                {
                    out.push(Violation::new(
                        format!("{f}.service_times"),
                        "one finite non-negative service time per customer",
                    ));
                }
            }
            if let Some(m) = &sc.travel_times {
                check_matrix(&mut out, &format!("{f}.travel_times"), m, n);
            }
            if let Some(m) = &sc.costs {
                check_matrix(&mut out, &format!("{f}.costs"), m, n);
            }
        }
        if !self.scenarios.is_empty() && (total - 1.0).abs() > 1e-9 {
            out.push(Violation::new(
                "scenarios",
                format!("probabilities do not sum to 1 (sum = {total})"),
            ));
        }
        if let Some(q) = &self.nominal_demands {
            if q.len() != self.customers.len() || q.iter().any(|x| !x.is_finite()) {
                out.push(Violation::new(
                    "nominal_demands",
                    "one finite value per customer",
                ));
            }
        }
        out
    }

    pub(crate) fn check(&self) -> Result<(), InstanceError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(InstanceError::Invalid(v))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

fn remove_nested(candidates: &[Window]) -> Vec<Window> {
    let mut sorted: Vec<Window> = candidates.to_vec();
    // Larger windows first among equal starts so they absorb nested ones.
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.hi.total_cmp(&a.hi)));
    let mut out: Vec<Window> = Vec::with_capacity(sorted.len());
    for w in sorted {
        match out.last() {
            // Sorted by start, so `w` is nested iff it ends no later.
            Some(prev) if w.hi <= prev.hi => {}
            _ => out.push(w),
        }
    }
    out
}

fn check_window(out: &mut Vec<Violation>, field: &str, w: &Window) {
    if !(w.lo.is_finite() && w.hi.is_finite()) {
        out.push(Violation::new(field, "bounds must be finite"));
    } else if w.lo > w.hi {
        out.push(Violation::new(field, "window start exceeds end (e > l)"));
    }
}

fn check_candidates(out: &mut Vec<Violation>, field: &str, window: &Window, c: &[Window]) {
    let f = format!("{field}.domain.candidates");
    if c.is_empty() {
        out.push(Violation::new(f, "at least one candidate window"));
        return;
    }
    for (b, w) in c.iter().enumerate() {
        if !(w.lo.is_finite() && w.hi.is_finite()) || w.lo > w.hi {
            out.push(Violation::new(
                format!("{f}[{b}]"),
                "candidate must be a finite non-empty interval",
            ));
        }
    }
    for pair in c.windows(2) {
        if pair[1].lo < pair[0].lo || pair[1].hi < pair[0].hi {
            out.push(Violation::new(
                f.clone(),
                "candidates must be sorted by start and end",
            ));
        } else if pair[1].hi <= pair[0].hi || pair[1].lo <= pair[0].lo {
            out.push(Violation::new(f.clone(), "candidates must not be nested"));
        }
    }
    if (c[0].lo - window.lo).abs() > EPS {
        out.push(Violation::new(
            f.clone(),
            "first candidate must start at the exogenous window start",
        ));
    }
    if (c[c.len() - 1].hi - window.hi).abs() > EPS {
        out.push(Violation::new(
            f,
            "last candidate must end at the exogenous window end",
        ));
    }
}

fn check_matrix(out: &mut Vec<Violation>, field: &str, m: &ArcMatrix, n: usize) {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        out.push(Violation::new(field, format!("must be a {n}x{n} matrix")));
        return;
    }
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            match v {
                Some(x) if i == j && *x != 0.0 => {
                    out.push(Violation::new(
                        format!("{field}[{i}][{j}]"),
                        "self-arcs are not allowed",
                    ));
                }
                Some(x) if !(x.is_finite() && *x >= 0.0) => {
                    out.push(Violation::new(
                        format!("{field}[{i}][{j}]"),
                        "must be finite and non-negative",
                    ));
                }
                _ => {}
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The four-customer, two-scenario illustrative instance: nodes 3, 0, 1,
    /// 2 on a line at x = 0, 4, 6, 8 and node 4 off the line.
    pub fn toy() -> Instance {
        let text = include_str!("../../tests/data/toy.json");
        parse_instance(text).expect("toy instance parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_shape() {
        let inst = fixtures::toy();
        assert_eq!(inst.customer_count(), 4);
        assert_eq!(inst.scenario_count(), 2);
        assert_eq!(inst.capacity, 3.0);
        assert!(inst.validate().is_empty());
        let p = inst.scenario_params(0);
        assert_eq!(p.cost(0, 1), 2.0);
        assert_eq!(p.cost(3, 2), 8.0);
        assert_eq!(p.time(4, 3), 7.0);
        assert!(p.integral_times());
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let mut inst = fixtures::toy();
        inst.scenarios[1].probability = 0.4;
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].rule.contains("probabilities do not sum to 1"));
        let err = parse_instance(&inst.to_json()).unwrap_err();
        assert!(err.to_string().contains("probabilities do not sum to 1"));
    }

    #[test]
    fn continuous_width_boundary() {
        let mut inst = fixtures::toy();
        inst.customers[0].domain = WindowDomain::Continuous { width: 11.0 };
        let v = inst.validate();
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].field, "customers[0].domain.width");
    }

    #[test]
    fn negative_demand_is_one_violation() {
        let mut inst = fixtures::toy();
        inst.scenarios[0].demands[2] = -1.0;
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "scenarios[0].demands[2]");
    }

    #[test]
    fn zero_probability_rejected() {
        let mut inst = fixtures::toy();
        inst.scenarios[0].probability = 0.0;
        inst.scenarios[1].probability = 1.0;
        assert!(inst.validate().iter().any(|v| v.rule == "must be positive"));
    }

    #[test]
    fn nested_candidates_collapse() {
        let mut inst = fixtures::toy();
        inst.customers[0] = Customer {
            window: Window::new(0.0, 10.0),
            service_time: 0.0,
            domain: WindowDomain::Discrete {
                candidates: vec![Window::new(0.0, 10.0), Window::new(2.0, 8.0)],
            },
        };
        let inst = parse_instance(&inst.to_json()).unwrap();
        assert_eq!(
            inst.customers[0].domain.candidates(),
            &[Window::new(0.0, 10.0)]
        );
    }

    #[test]
    fn candidate_endpoints_shift_to_exogenous_window() {
        let mut inst = fixtures::toy();
        inst.customers[0] = Customer {
            window: Window::new(1.0, 30.0),
            service_time: 0.0,
            domain: WindowDomain::Discrete {
                candidates: vec![Window::new(8.0, 12.0), Window::new(0.0, 4.0)],
            },
        };
        let inst = parse_instance(&inst.to_json()).unwrap();
        let c = &inst.customers[0];
        assert_eq!(c.window, Window::new(1.0, 12.0));
        assert_eq!(
            c.domain.candidates(),
            &[Window::new(1.0, 4.0), Window::new(8.0, 12.0)]
        );
    }

    #[test]
    fn parse_error_names_location() {
        let err = parse_instance("{\"capacity\": 3,\n \"network\": 7}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn scenario_overrides_apply() {
        let mut inst = fixtures::toy();
        let mut m = inst.network.time.clone();
        m[0][1] = Some(9.0);
        inst.scenarios[1].travel_times = Some(m);
        inst.scenarios[1].service_times = Some(vec![1.0, 0.0, 0.0, 2.0]);
        let p0 = inst.scenario_params(0);
        let p1 = inst.scenario_params(1);
        assert_eq!(p0.time(0, 1), 2.0);
        assert_eq!(p1.time(0, 1), 9.0);
        assert_eq!(p1.cost(0, 1), 2.0);
        assert_eq!(p1.service[4], 2.0);
        assert_eq!(p1.service[0], 0.0);
    }

    #[test]
    fn euclidean_network() {
        let net = TravelNetwork::euclidean(vec![[0.0, 0.0], [3.0, 4.0]]);
        assert_eq!(net.cost[0][1], Some(5.0));
        assert_eq!(net.cost[1][1], None);
    }
}
