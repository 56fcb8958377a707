//! δ-good variable partitions: splits a random CNF's variables into two sides,
//! computes the error sets, and checks the three goodness conditions —
//! error-clause satisfaction probability on each side and residual expansion
//! of both incidence graphs.
//!
//!     cargo run --example good_partition

use searchlab::bigraph::Q64;
use searchlab::cnf::{sample_cnf, SamplerConfig};
use searchlab::partition::{check_good_partition, random_partition};

fn main() {
    let delta = Q64::new(1, 10);
    let mut passes = 0u32;
    let trials = 20u64;
    for seed in 0..trials {
        let cnf = sample_cnf(&SamplerConfig {
            n: 24,
            delta: 4,
            m: 48,
            density_alpha: None,
            seed,
            chvatal_szemeredi: false,
        })
        .unwrap();
        let part = random_partition(24, seed ^ 0xbeef);
        let rep = check_good_partition(&cnf, &part, delta, 2, 20_000, seed).unwrap();
        if seed < 3 {
            eprintln!(
                "seed {seed}: |Error_A| = {}, |Error_B| = {}, cond1 {:.4} (target {:.4}), \
                 cond2 {:.4} (target {:.4}), expanders {}",
                rep.error_a.len(),
                rep.error_b.len(),
                rep.cond1_prob.value(),
                rep.cond1_target,
                rep.cond2_prob.value(),
                rep.cond2_target,
                rep.cond3_pass,
            );
        }
        if rep.all_pass {
            passes += 1;
        }
    }
    eprintln!("δ-good partitions: {passes}/{trials}");
}
