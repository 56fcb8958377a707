//! The full lower-bound pipeline on one instance: convert a random protocol
//! into a subcube-like one, build closures on both sides, and verify the leaf
//! bound, the bad-mass bound, the sub-cube error bound, and the chained
//! end-to-end bound on the original protocol's falsified mass. Prints the
//! whole report as JSON.
//!
//!     cargo run --example end_to_end_demo

use searchlab::bigraph::{BipartiteGraph, Q64};
use searchlab::bounds::end_to_end;
use searchlab::partition::BipartiteInstance;
use searchlab::protocol::{random_protocol, LabelRule, NodeFamily, RandomProtocolConfig};

fn main() {
    // three clauses over 12 variables per side; each side support misses a
    // distinct 4-block, making both side graphs (4, 8, 4)-expanders (α = 1/2);
    // the closure hypothesis at β = α/2 needs force mode at this tiny scale
    let full = 0xfffu64;
    let adj: Vec<u64> = (0..3).map(|i| full & !(0xfu64 << (4 * i))).collect();
    let g1 = BipartiteGraph::new(3, 12, 8, adj.clone()).unwrap();
    let g2 = BipartiteGraph::new(3, 12, 8, adj).unwrap();
    let inst = BipartiteInstance {
        g1,
        g2,
        x_falsify: vec![0, 0, 0],
        y_falsify: vec![0, 0, 0],
        clause_map: vec![0, 1, 2],
        n_right: 12,
        a_vars: (0..12).collect(),
        b_vars: (12..24).collect(),
    };
    let alpha = Q64::new(1, 2);
    let gamma = alpha; // the regime of interest sets γ = α

    let p = random_protocol(
        &inst,
        &RandomProtocolConfig {
            depth: 2,
            family: NodeFamily::Coordinate,
            labels: LabelRule::Greedy,
            seed: 1,
        },
    )
    .unwrap();

    let report = end_to_end(&inst, &p, gamma, 4, alpha, true).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    eprintln!(
        "end-to-end: codim {}, shaved mass {:.3e}, overall pass = {}",
        report.codim, report.shaved_mass, report.pass
    );
    for check in &report.checks {
        eprintln!(
            "  {:<16} measured {:.6} ≤ bound {:.6}: {}",
            check.check, check.measured, check.bound, check.pass
        );
    }
}
