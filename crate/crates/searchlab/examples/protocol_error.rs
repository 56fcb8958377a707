//! Protocol trees over a bipartite falsified-clause instance: runs the exact
//! baseline protocol and a few random protocols, reporting the exact falsified
//! mass (probability a uniformly random input lands on a leaf whose announced
//! clause it falsifies) with an exhaustive cross-check.
//!
//!     cargo run --example protocol_error

use searchlab::bigraph::Q64;
use searchlab::cnf::{sample_cnf, SamplerConfig};
use searchlab::partition::{bipartite_instance, random_partition, BipartiteInstance};
use searchlab::protocol::{
    baseline_protocol, falsified_mass, falsified_mass_exhaustive, random_protocol, LabelRule,
    NodeFamily, RandomProtocolConfig,
};
use searchlab::ratio::q_to_f64;

fn instance() -> BipartiteInstance {
    for seed in 0u64.. {
        let cnf = sample_cnf(&SamplerConfig {
            n: 12,
            delta: 3,
            m: 12,
            density_alpha: None,
            seed,
            chvatal_szemeredi: false,
        })
        .unwrap();
        let part = random_partition(12, seed ^ 0x5ee5);
        if let Ok(inst) = bipartite_instance(&cnf, &part, Q64::new(1, 10)) {
            if inst.n_right <= 7 {
                return inst;
            }
        }
    }
    unreachable!()
}

fn main() {
    let inst = instance();
    eprintln!(
        "instance: {} clauses, {} variables per side",
        inst.m(),
        inst.n_right
    );

    let base = baseline_protocol(&inst).unwrap();
    let mass = falsified_mass(&base, &inst).unwrap();
    assert_eq!(mass, falsified_mass_exhaustive(&base, &inst).unwrap());
    eprintln!(
        "baseline: depth {}, {} leaves, falsified mass {} = {:.6}",
        base.depth(),
        base.leaf_count(),
        mass,
        q_to_f64(&mass)
    );

    for (family, name) in [
        (NodeFamily::Coordinate, "coordinate"),
        (NodeFamily::Xor, "xor"),
        (NodeFamily::Random, "random"),
    ] {
        let p = random_protocol(
            &inst,
            &RandomProtocolConfig {
                depth: 4,
                family,
                labels: LabelRule::Greedy,
                seed: 11,
            },
        )
        .unwrap();
        let mass = falsified_mass(&p, &inst).unwrap();
        assert_eq!(mass, falsified_mass_exhaustive(&p, &inst).unwrap());
        eprintln!(
            "random {name:<10} depth {}: falsified mass {} = {:.6}",
            p.depth(),
            mass,
            q_to_f64(&mass)
        );
    }
}
