//! Demand scenario generation.
//!
//! Nominal demands are drawn from a normal distribution with mean 5 and
//! variance 1.5. A generated scenario scales every customer's perturbed
//! nominal demand by a common factor and rounds up:
//! `q = ceil(max(f * (q_bar + eps), 1e-6))` with `eps ~ U[-1.5, 1.5]` per
//! customer and `f ~ U[0.625, 1.375]` per scenario.
//!
//! Random streams are addressed as `(kind, scenario, customer)` where the
//! scenario index is the position of the new scenario in the extended list.

use super::{Instance, InstanceError, Scenario};
use crate::rng::{
    standard_normal, substream, uniform, STREAM_DEMAND_NOISE, STREAM_NOMINAL_DEMAND,
    STREAM_SCENARIO_FACTOR,
};

pub const NOMINAL_MEAN: f64 = 5.0;
pub const NOMINAL_VARIANCE: f64 = 1.5;

/// Nominal demand per customer, i.i.d. normal.
pub fn nominal_demands(n: usize, seed: u64) -> Vec<f64> {
    let sd = NOMINAL_VARIANCE.sqrt();
    (0..n)
        .map(|i| {
            let mut rng = substream(seed, &[STREAM_NOMINAL_DEMAND, i as u64]);
            NOMINAL_MEAN + sd * standard_normal(&mut rng)
        })
        .collect()
}

/// Append `count` demand scenarios and give every scenario equal
/// probability. Uses `base.nominal_demands` when present, otherwise draws
/// nominal demands from `seed` and stores them on the result.
pub fn generate_scenarios(
    base: &Instance,
    count: usize,
    seed: u64,
) -> Result<Instance, InstanceError> {
    if count == 0 {
        return Err(InstanceError::Argument(
            "scenario count must be at least 1".into(),
        ));
    }
    let n = base.customer_count();
    let nominal = match &base.nominal_demands {
        Some(q) => q.clone(),
        None => nominal_demands(n, seed),
    };
    let mut out = base.clone();
    out.nominal_demands = Some(nominal.clone());
    let first = base.scenarios.len();
    for k in 0..count {
        let s = (first + k) as u64;
        let f = uniform(
            &mut substream(seed, &[STREAM_SCENARIO_FACTOR, s]),
            0.625,
            1.375,
        );
        let demands = nominal
            .iter()
            .enumerate()
            .map(|(i, &qb)| {
                let mut rng = substream(seed, &[STREAM_DEMAND_NOISE, s, i as u64]);
                let eps = uniform(&mut rng, -1.5, 1.5);
                (f * (qb + eps)).max(1e-6).ceil()
            })
            .collect();
        out.scenarios.push(Scenario {
            probability: 0.0,
            demands,
            service_times: None,
            travel_times: None,
            costs: None,
        });
    }
    let p = 1.0 / out.scenarios.len() as f64;
    for sc in &mut out.scenarios {
        sc.probability = p;
    }
    // Equal shares of 1/S may not sum to exactly 1 in floating point; the
    // validation tolerance is far wider than the rounding error.
    out.check()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::toy;

    #[test]
    fn demands_are_positive_integers() {
        let inst = generate_scenarios(&toy(), 3, 42).unwrap();
        assert_eq!(inst.scenario_count(), 5);
        for sc in &inst.scenarios[2..] {
            for &q in &sc.demands {
                assert!(q >= 1.0 && q.fract() == 0.0, "{q}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_scenarios(&toy(), 4, 9).unwrap();
        let b = generate_scenarios(&toy(), 4, 9).unwrap();
        assert_eq!(a, b);
        let c = generate_scenarios(&toy(), 4, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_count_is_argument_error() {
        assert!(matches!(
            generate_scenarios(&toy(), 0, 1),
            Err(InstanceError::Argument(_))
        ));
    }

    #[test]
    fn probabilities_renormalized() {
        let inst = generate_scenarios(&toy(), 15, 7).unwrap();
        assert_eq!(inst.scenario_count(), 17);
        let total: f64 = inst.scenarios.iter().map(|s| s.probability).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(inst.scenarios.iter().all(|s| s.probability == 1.0 / 17.0));
    }

    #[test]
    fn mean_demand_near_nominal() {
        let mut base = toy();
        base.nominal_demands = Some(vec![5.0; 4]);
        let inst = generate_scenarios(&base, 1000, 3).unwrap();
        for i in 0..4 {
            let mean: f64 = inst.scenarios[2..]
                .iter()
                .map(|s| s.demands[i])
                .sum::<f64>()
                / 1000.0;
            // E[ceil(f (5 + eps))] is about 5.5 under these distributions.
            assert!((3.0..=7.0).contains(&mean), "customer {i}: {mean}");
            assert!((mean - 5.5).abs() < 0.2, "customer {i}: {mean}");
        }
    }

    #[test]
    fn nominal_demand_moments() {
        let q = nominal_demands(10_000, 5);
        let n = q.len() as f64;
        let mean = q.iter().sum::<f64>() / n;
        let var = q.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((mean - 5.0).abs() < 0.1, "{mean}");
        assert!((var - 1.5).abs() < 0.2, "{var}");
        assert_eq!(nominal_demands(1, 3).len(), 1);
        assert_eq!(nominal_demands(8, 3), nominal_demands(8, 3));
    }
}
