//! Fixed instances shared by the benchmarks.

use twavrp::oracle::{generated_demand_instance, random_instance, DomainKind, RandomSpec};
use twavrp::{parse_instance, Instance};

pub fn toy() -> Instance {
    parse_instance(include_str!("../../core/tests/data/toy.json")).expect("toy instance parses")
}

/// Eight customers, four scenarios, continuous windows, asymmetric times.
pub fn random_continuous(seed: u64) -> Instance {
    random_instance(
        &RandomSpec {
            customers: 8,
            scenarios: 4,
            kind: DomainKind::Continuous,
            max_candidates: 1,
            asymmetric: true,
        },
        seed,
    )
}

/// Ten customers and three generated demand scenarios.
pub fn generated(seed: u64) -> Instance {
    generated_demand_instance(10, 3, seed)
}
