//! Importer for the whitespace-separated benchmark layout.
//!
//! The third-party benchmark files are not distributed with this crate, so
//! the reader accepts the following layout (tokens separated by any
//! whitespace, `#` starts a comment running to end of line):
//!
//! ```text
//! n S Q
//! e0 l0 x0 y0                       # depot window and coordinates
//! x y e l u C w                     # continuous customer, n lines total
//! x y e l u D k lo1 hi1 ... lok hik # discrete customer with k candidates
//! p q1 ... qn                       # S scenario lines
//! ```
//!
//! Costs and travel times are both the Euclidean distance between
//! coordinates, unrounded. Discrete candidates are canonicalized exactly as
//! for the native document format.

use super::{
    parse_instance_value, Customer, Instance, InstanceError, Scenario, TravelNetwork, Window,
    WindowDomain,
};

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(ln, line)| {
                let body = line.split('#').next().unwrap_or("");
                body.split_whitespace().map(move |t| (ln + 1, t))
            })
            .collect();
        Self { items, pos: 0 }
    }

    fn word(&mut self, what: &str) -> Result<(usize, &'a str), InstanceError> {
        let t = self.items.get(self.pos).copied().ok_or_else(|| {
            InstanceError::Parse(format!("unexpected end of file reading {what}"))
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn num(&mut self, what: &str) -> Result<f64, InstanceError> {
        let (ln, t) = self.word(what)?;
        t.parse::<f64>().map_err(|_| {
            InstanceError::Parse(format!("line {ln}: {what}: expected a number, got {t:?}"))
        })
    }

    fn count(&mut self, what: &str) -> Result<usize, InstanceError> {
        let (ln, t) = self.word(what)?;
        t.parse::<usize>().map_err(|_| {
            InstanceError::Parse(format!("line {ln}: {what}: expected a count, got {t:?}"))
        })
    }
}

/// Parse the benchmark layout into a validated, canonical instance.
pub fn parse_spliet(text: &str) -> Result<Instance, InstanceError> {
    let mut tk = Tokens::new(text);
    let n = tk.count("customer count")?;
    let s = tk.count("scenario count")?;
    let capacity = tk.num("capacity")?;
    let e0 = tk.num("depot window start")?;
    let l0 = tk.num("depot window end")?;
    let mut coords = vec![[tk.num("depot x")?, tk.num("depot y")?]];
    let mut customers = Vec::with_capacity(n);
    for i in 1..=n {
        let x = tk.num("customer x")?;
        let y = tk.num("customer y")?;
        coords.push([x, y]);
        let e = tk.num("customer window start")?;
        let l = tk.num("customer window end")?;
        let u = tk.num("service time")?;
        let (ln, kind) = tk.word("domain kind")?;
        let domain = match kind {
            "C" | "c" => WindowDomain::Continuous {
                width: tk.num("width")?,
            },
            "D" | "d" => {
                let k = tk.count("candidate count")?;
                let mut candidates = Vec::with_capacity(k);
                for _ in 0..k {
                    candidates.push(Window::new(
                        tk.num("candidate start")?,
                        tk.num("candidate end")?,
                    ));
                }
                WindowDomain::Discrete { candidates }
            }
            other => {
                return Err(InstanceError::Parse(format!(
                    "line {ln}: customer {i}: domain kind must be C or D, got {other:?}"
                )))
            }
        };
        customers.push(Customer {
            window: Window::new(e, l),
            service_time: u,
            domain,
        });
    }
    let mut scenarios = Vec::with_capacity(s);
    for _ in 0..s {
        let probability = tk.num("scenario probability")?;
        let demands = (0..n)
            .map(|_| tk.num("demand"))
            .collect::<Result<Vec<_>, _>>()?;
        scenarios.push(Scenario {
            probability,
            demands,
            service_times: None,
            travel_times: None,
            costs: None,
        });
    }
    if let Some((ln, t)) = tk.items.get(tk.pos) {
        return Err(InstanceError::Parse(format!(
            "line {ln}: trailing token {t:?}"
        )));
    }
    let inst = Instance {
        name: None,
        network: TravelNetwork::euclidean(coords),
        capacity,
        depot_window: Window::new(e0, l0),
        customers,
        scenarios,
        nominal_demands: None,
    };
    parse_instance_value(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
2 2 10
0 100 0 0
3 4 0 50 1 C 10
0 5 10 60 0 D 2 12 30 40 70  # second candidate clipped to 60
0.5 4 6
0.5 6 4
";

    #[test]
    fn reads_layout() {
        let inst = parse_spliet(SMALL).unwrap();
        assert_eq!(inst.customer_count(), 2);
        assert_eq!(inst.scenario_count(), 2);
        assert_eq!(inst.network.cost[0][1], Some(5.0));
        assert_eq!(inst.network.time[0][2], Some(5.0));
        assert_eq!(inst.customers[0].service_time, 1.0);
        assert_eq!(inst.customers[1].window, Window::new(12.0, 60.0));
        assert_eq!(
            inst.customers[1].domain.candidates(),
            &[Window::new(12.0, 30.0), Window::new(40.0, 60.0)]
        );
    }

    #[test]
    fn bad_kind_names_line() {
        let err = parse_spliet("1 1 5\n0 10 0 0\n1 1 0 5 0 X 1\n1 2\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn truncated_file() {
        assert!(parse_spliet("1 1 5\n0 10").is_err());
    }
}
