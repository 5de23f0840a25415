use proptest::prelude::*;
use twavrp::oracle::{random_instance, random_separation_case, DomainKind, RandomSpec};
use twavrp::separation::{brute_force_delta, extract_assignment, solve_separation, DELTA_TOL};
use twavrp::vrptw::route_schedule;
use twavrp::{Instance, SubproblemSpec, Window, WindowDomain};

const STEP: f64 = 0.01;

fn kind_of(k: u8) -> DomainKind {
    match k % 3 {
        0 => DomainKind::Continuous,
        1 => DomainKind::Discrete,
        _ => DomainKind::Mixed,
    }
}

fn case(seed: u64, n: usize, s: usize, k: u8) -> Instance {
    random_instance(
        &RandomSpec {
            customers: n,
            scenarios: s,
            kind: kind_of(k),
            max_candidates: 3,
            asymmetric: seed % 2 == 1,
        },
        seed,
    )
}

fn shift(w: Window, c: f64) -> Window {
    Window::new(w.lo + c, w.hi + c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_brute_force(seed in 0u64..100_000, n in 3usize..=6, s in 2usize..=3, k: u8) {
        let inst = case(seed, n, s, k);
        let (sets, windows) = random_separation_case(&inst, seed);
        let r = solve_separation(&sets, &windows, &inst).unwrap();
        let b = brute_force_delta(&sets, &windows, &inst, STEP);
        prop_assert!(r.delta >= -1e-9);
        prop_assert!(r.delta <= b + 1e-6 && r.delta >= b - STEP - 1e-6, "exact {} brute {b}", r.delta);
    }

    #[test]
    fn arrivals_certify_delta(seed in 0u64..100_000, n in 3usize..=6, s in 1usize..=3, k: u8) {
        let inst = case(seed, n, s, k);
        let (sets, windows) = random_separation_case(&inst, seed);
        let r = solve_separation(&sets, &windows, &inst).unwrap();
        let params = inst.all_scenario_params();
        for (s, rs) in sets.iter().enumerate() {
            let p = &params[s];
            for route in &rs.routes {
                let r0 = &route.0;
                let a = &r.arrivals[s];
                prop_assert!(a[r0[0]] >= windows[0].lo + p.time(0, r0[0]) - 1e-6);
                for w in r0.windows(2) {
                    prop_assert!(a[w[1]] >= a[w[0]] + p.service[w[0]] + p.time(w[0], w[1]) - 1e-6);
                }
                let last = r0[r0.len() - 1];
                prop_assert!(a[last] + p.service[last] + p.time(last, 0) <= windows[0].hi + 1e-6);
            }
            for i in 1..=n {
                prop_assert!(windows[i].lo - 1e-6 <= r.arrivals[s][i] && r.arrivals[s][i] <= windows[i].hi + 1e-6);
            }
        }
        for i in 1..=n {
            let v = match &inst.customer(i).domain {
                WindowDomain::Continuous { width } => r.spread_excess(i, *width),
                WindowDomain::Discrete { .. } => 0.0,
            };
            prop_assert!(v <= r.delta + 1e-6);
        }
        prop_assert!(r.discrete_violation() <= r.delta + 1e-6);
    }

    #[test]
    fn shifting_time_leaves_delta_unchanged(
        seed in 0u64..100_000,
        n in 3usize..=5,
        s in 1usize..=3,
        k: u8,
        c in 1u32..50,
    ) {
        let c = c as f64;
        let inst = case(seed, n, s, k);
        let (sets, windows) = random_separation_case(&inst, seed);
        let mut moved = inst.clone();
        moved.depot_window = shift(moved.depot_window, c);
        for cu in &mut moved.customers {
            cu.window = shift(cu.window, c);
            if let WindowDomain::Discrete { candidates } = &mut cu.domain {
                for w in candidates.iter_mut() {
                    *w = shift(*w, c);
                }
            }
        }
        let moved_windows: Vec<Window> = windows.iter().map(|&w| shift(w, c)).collect();
        let a = solve_separation(&sets, &windows, &inst).unwrap().delta;
        let b = solve_separation(&sets, &moved_windows, &moved).unwrap().delta;
        prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn extracted_windows_contain_arrivals(seed in 0u64..100_000, n in 3usize..=6, s in 1usize..=3, k: u8) {
        let inst = case(seed, n, s, k);
        // Optimal route sets under the exogenous windows are often
        // consistent, which exercises extraction.
        let params = inst.all_scenario_params();
        let sets: Vec<_> = params
            .iter()
            .map(|p| twavrp::vrptw::solve_vrptw(&SubproblemSpec::exogenous(p)).unwrap().routes)
            .collect();
        let r = solve_separation(&sets, &inst.exogenous_windows(), &inst).unwrap();
        if r.delta <= DELTA_TOL {
            let tau = extract_assignment(&r, &inst).unwrap();
            tau.check_domains(&inst).map_err(TestCaseError::fail)?;
            for (s, rs) in sets.iter().enumerate() {
                for route in &rs.routes {
                    for &i in &route.0 {
                        prop_assert!(tau.windows[i - 1].contains(r.arrivals[s][i]));
                    }
                }
                let w = tau.node_windows(&inst);
                prop_assert!(SubproblemSpec::new(&params[s], w.clone(), vec![]).is_feasible(rs));
                for route in &rs.routes {
                    prop_assert!(route_schedule(&route.0, &w, &params[s]).is_some());
                }
            }
        } else {
            prop_assert!(extract_assignment(&r, &inst).is_err());
        }
    }
}
