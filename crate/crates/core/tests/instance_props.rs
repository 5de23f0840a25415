use proptest::prelude::*;
use twavrp::instance::{generate_scenarios, parse_instance_value};
use twavrp::oracle::{random_instance, DomainKind, RandomSpec};
use twavrp::{parse_instance, Instance, Window, WindowDomain};

fn spec(n: usize, s: usize, k: u8) -> RandomSpec {
    RandomSpec {
        customers: n,
        scenarios: s,
        kind: [
            DomainKind::Continuous,
            DomainKind::Discrete,
            DomainKind::Mixed,
        ][k as usize % 3],
        max_candidates: 3,
        asymmetric: k % 2 == 1,
    }
}

fn with_nominal(mut inst: Instance) -> Instance {
    inst.capacity = 40.0;
    inst.nominal_demands = Some(vec![5.0; inst.customer_count()]);
    inst
}

proptest! {
    #[test]
    fn json_round_trip(seed: u64, n in 1usize..=8, s in 1usize..=4, k: u8) {
        let inst = random_instance(&spec(n, s, k), seed);
        let back = parse_instance(&inst.to_json()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn generated_demands_are_positive_integers(seed: u64, base_seed in 0u64..1000, count in 1usize..=6) {
        let base = with_nominal(random_instance(&spec(5, 1, 0), base_seed));
        let out = generate_scenarios(&base, count, seed).unwrap();
        prop_assert_eq!(out.scenario_count(), count + 1);
        for sc in &out.scenarios[1..] {
            for &q in &sc.demands {
                prop_assert!(q >= 1.0 && q.fract() == 0.0, "{q}");
            }
        }
        let total: f64 = out.scenarios.iter().map(|s| s.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert_eq!(&out, &generate_scenarios(&base, count, seed).unwrap());
    }

    #[test]
    fn canonical_candidates_are_ordered(
        raw in prop::collection::vec((0u8..30, 1u8..12), 1..=5),
    ) {
        let mut inst = random_instance(&spec(1, 1, 1), 3);
        let candidates: Vec<Window> = raw.iter().map(|&(lo, len)| Window::new(lo as f64, (lo + len) as f64)).collect();
        let lo = candidates.iter().map(|w| w.lo).fold(f64::INFINITY, f64::min);
        let hi = candidates.iter().map(|w| w.hi).fold(f64::NEG_INFINITY, f64::max);
        inst.customers[0].window = Window::new(lo, hi);
        inst.customers[0].domain = WindowDomain::Discrete { candidates };
        let inst = parse_instance_value(inst).unwrap();
        let c = &inst.customers[0];
        let WindowDomain::Discrete { candidates } = &c.domain else { unreachable!() };
        prop_assert_eq!(candidates[0].lo, c.window.lo);
        prop_assert_eq!(candidates[candidates.len() - 1].hi, c.window.hi);
        for w in candidates.windows(2) {
            prop_assert!(w[0].lo < w[1].lo && w[0].hi < w[1].hi, "{} {}", w[0], w[1]);
        }
    }
}

#[test]
fn generated_mean_demand_stays_near_nominal() {
    let base = with_nominal(random_instance(&spec(4, 1, 0), 11));
    let out = generate_scenarios(&base, 1000, 5).unwrap();
    for i in 0..4 {
        let mean: f64 = out.scenarios[1..].iter().map(|s| s.demands[i]).sum::<f64>() / 1000.0;
        assert!((3.0..=7.0).contains(&mean), "customer {i}: {mean}");
    }
}
