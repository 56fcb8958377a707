//! Adaptive concentration: Monte-Carlo estimates of Pr[Σ a_k ≥ 4n/ζ] for
//! several adversaries choosing the exponential rates, compared against the
//! exp(−n) tail bound (plus Wilson slack) and, in the i.i.d. case, the exact
//! Gamma tail.
//!
//!     cargo run --example concentration_demo

use searchlab::concentration::{concentration_experiment, Adversary, ConcentrationConfig};

fn main() {
    for adversary in [
        Adversary::IidExponential,
        Adversary::SumAdaptive,
        Adversary::WorstShift,
        Adversary::Zero,
    ] {
        let res = concentration_experiment(&ConcentrationConfig {
            n: 5,
            zeta: 2f64.ln(),
            adversary,
            trials: 200_000,
            seed: 9,
        })
        .unwrap();
        eprintln!(
            "{:?}: estimate {:.5} ≤ bound {:.5} (+{:.5} Wilson): {}{}",
            res.config.adversary,
            res.estimate,
            res.bound,
            res.wilson_half_width,
            res.pass,
            match res.analytic_tail {
                Some(t) => format!(", Gamma tail {t:.5}"),
                None => String::new(),
            }
        );
    }
}
