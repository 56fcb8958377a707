//! Samples a random Δ-CNF above the unsatisfiability density, prints it in
//! DIMACS, and certifies unsatisfiability by exhaustive enumeration.
//!
//!     cargo run --example sample_and_check

use searchlab::cnf::{count_satisfying, is_unsatisfiable, sample_cnf, write_dimacs, SamplerConfig};

fn main() {
    let cfg = SamplerConfig {
        n: 12,
        delta: 3,
        m: 70,
        density_alpha: None,
        seed: 42,
        chvatal_szemeredi: false,
    };
    let cnf = sample_cnf(&cfg).unwrap();
    println!("{}", write_dimacs(&cnf));

    let unsat = is_unsatisfiable(&cnf, 24).unwrap();
    eprintln!(
        "n = {}, Δ = {}, m = {} (density m/n = {:.2})",
        cnf.n,
        cnf.delta,
        cnf.m(),
        cnf.m() as f64 / cnf.n as f64
    );
    eprintln!("unsatisfiable: {unsat}");
    if !unsat {
        let sat = count_satisfying(&cnf, 24).unwrap();
        eprintln!("satisfying assignments: {sat} of {}", 1u64 << cnf.n);
    }
}
