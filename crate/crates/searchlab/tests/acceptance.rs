//! Acceptance gate: one test per criterion, each printing a single summary
//! line. Every check is property-based with explicit constants; asymptotic
//! statements are exercised as exact inequalities on finite instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use searchlab::bigraph::{
    check_expansion, expansion_rate_experiment, random_left_regular, BipartiteGraph,
    ExpanderParams, Q64, DEFAULT_ENUMERATION_CAP,
};
use searchlab::bounds::{
    check_bad_mass, check_leaf_bound, check_success_identity, leaf_analysis, subcube_error_bound,
};
use searchlab::closure::{build_closure, protocol_closures, verify_closure, ClosureParams, LabelTree};
use searchlab::cnf::{
    cnf_from_json, cnf_to_json, read_dimacs, sample_cnf, write_dimacs, Cnf, Lit, SamplerConfig,
};
use searchlab::concentration::{concentration_experiment, Adversary, ConcentrationConfig};
use searchlab::conversion::{
    audit_mass_conservation, check_codim_bound, check_deficiency_fact, check_fidelity,
    check_tail_bound, convert,
};
use searchlab::partition::{
    bipartite_instance, binary_entropy, check_good_partition, error_sets, random_partition,
    BipartiteInstance, VarPartition,
};
use searchlab::pointset::PointSet;
use searchlab::protocol::{random_protocol, LabelRule, NodeFamily, Protocol, RandomProtocolConfig};
use searchlab::ratio::{q_to_f64, Q};
use searchlab::report::Emitter;
use searchlab::structure::{density_restoring_partition, structured_check};
use serde_json::json;

fn verdict(k: u32, name: &str, pass: bool) {
    println!("[ACCEPTANCE {k:02}] {name}: {}", if pass { "pass" } else { "FAIL" });
    assert!(pass, "acceptance criterion {k} ({name}) failed");
}

/// m clauses on disjoint supports of the given width, all-positive literals,
/// split evenly across the sides.
fn disjoint_instance(m: usize, width: u32) -> BipartiteInstance {
    let per_side = width / 2;
    let n = m as u32 * width;
    let clauses: Vec<Vec<Lit>> = (0..m as u32)
        .map(|i| (0..width).map(|j| Lit::pos(i * width + j)).collect())
        .collect();
    let cnf = Cnf::new(n, width, clauses).unwrap();
    let a: Vec<usize> = (0..n as usize)
        .filter(|v| (*v as u32 % width) < per_side)
        .collect();
    let part = VarPartition::from_a_set(n as usize, &a);
    bipartite_instance(&cnf, &part, Q64::new(1, 10)).unwrap()
}

/// The protocol corpus shared by criteria 2–4: random protocols over an
/// instance with 8 variables per side, depths up to 5, mixed node families.
fn conversion_corpus() -> (BipartiteInstance, Vec<Protocol>) {
    let inst = disjoint_instance(4, 4);
    assert_eq!(inst.n_right, 8);
    let families = [NodeFamily::Coordinate, NodeFamily::Xor, NodeFamily::Random];
    let labels = [LabelRule::Greedy, LabelRule::UniformRandom];
    let mut out = Vec::new();
    for seed in 0..100u64 {
        let p = random_protocol(
            &inst,
            &RandomProtocolConfig {
                depth: 1 + (seed % 5) as u32,
                family: families[(seed % 3) as usize],
                labels: labels[(seed % 2) as usize],
                seed,
            },
        )
        .unwrap();
        out.push(p);
    }
    (inst, out)
}

#[test]
fn a01_density_restoring_partition() {
    let n = 10u32;
    let gammas = [Q64::new(1, 4), Q64::new(1, 2), Q64::new(3, 4)];
    let universe = (1u32 << n) - 1;
    let mut pass = true;
    for t in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(t);
        let mut x = PointSet::empty(n);
        for v in 0..(1u32 << n) {
            if rng.gen_range(0u8..2) == 1 {
                x.insert(v);
            }
        }
        if x.is_empty() {
            x.insert(rng.gen_range(0..(1u32 << n)));
        }
        for gamma in gammas {
            let parts = density_restoring_partition(&x, gamma, universe).unwrap();
            let gf = *gamma.numer() as f64 / *gamma.denom() as f64;
            let mut covered = PointSet::empty(n);
            let mut rem = x.len();
            for part in &parts {
                // parts are structured with their fixed set
                pass &= structured_check(&part.set, part.fix_mask, gamma).unwrap();
                // disjoint tiling
                pass &= covered.is_disjoint(&part.set);
                covered = covered.union(&part.set);
                // entropy inequality: |X^j| ≥ 2^{−γ|I^j|}·rem_j
                let lhs = (part.set.len() as f64).log2();
                let rhs = (rem as f64).log2() - gf * part.fix_mask.count_ones() as f64;
                pass &= lhs >= rhs - 1e-9;
                // p^{≥j} bookkeeping matches the remaining mass
                pass &= part.p_geq == Q::new(rem as i128, x.len() as i128);
                rem -= part.set.len();
            }
            pass &= covered.len() == x.len() && rem == 0;
        }
    }
    verdict(1, "density-restoring partition suite", pass);
}

#[test]
fn a02_conversion_fidelity() {
    let (_, protocols) = conversion_corpus();
    let mut pass = true;
    for p in &protocols {
        // no shaving: the tree must agree with the protocol everywhere
        let c = convert(p, Q64::new(1, 2), Some(u32::MAX)).unwrap();
        pass &= check_fidelity(&c, p).is_ok();
    }
    verdict(2, "pre-shave conversion fidelity on all inputs", pass);
}

#[test]
fn a03_codim_tail() {
    let (_, protocols) = conversion_corpus();
    let mut pass = true;
    for p in &protocols {
        let d = p.depth();
        let c = convert(p, Q64::new(1, 2), None).unwrap();
        // exact Pr[codim > 7d/(1−γ)] is the shaved mass
        pass &= q_to_f64(&c.shaved_mass) <= (-(d as f64)).exp();
    }
    verdict(3, "codimension tail ≤ exp(−d)", pass);
}

#[test]
fn a04_per_step_checks() {
    let (_, protocols) = conversion_corpus();
    let mut pass = true;
    for p in &protocols {
        let c = convert(p, Q64::new(1, 2), None).unwrap();
        pass &= check_deficiency_fact(&c).is_ok();
        pass &= check_tail_bound(&c, 8).is_ok();
        pass &= check_codim_bound(&c).is_ok();
    }
    verdict(4, "per-step deficiency, tail, and codimension checks", pass);
}

#[test]
fn a05_closure_suite() {
    // random certified (4, 8, 6)-expanders within the d ≤ (α−β)²rΔ/4
    // hypothesis (α = 3/4, β = 3/8 ⇒ d = 1); calibration: m = 4, n = 30
    // certifies ≈ 7% of samples
    let params = ClosureParams {
        r: 4,
        delta: 8,
        alpha: Q64::new(3, 4),
        beta: Q64::new(3, 8),
        d: 1,
    };
    assert!(params.hypothesis_holds());
    let p_exp = ExpanderParams::new(4, 8, Q64::new(3, 4));
    let mut pass = true;
    let mut found = 0u32;
    let mut seed = 0u64;
    while found < 50 && seed < 20_000 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_left_regular(30, 8, 4, &mut rng).unwrap();
        if !check_expansion(&g, &p_exp, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .is_expander
        {
            continue;
        }
        found += 1;
        // random label tree fixing one variable (the hypothesis envelope)
        let v = rng.gen_range(0..30u64);
        let tree = LabelTree::new(vec![None, Some(0)], vec![0, 1 << v]).unwrap();
        let c = build_closure(&g, &tree, &params, false).unwrap();
        let rep = verify_closure(&g, &tree, &c, &params).unwrap();
        pass &= rep.all_pass();
        // mutation: inject a spurious clause into the leaf closure and
        // demand a detected failure
        let mut bad = c.clone();
        bad.t[1] |= 1;
        bad.b[1] |= 1;
        let mrep = verify_closure(&g, &tree, &bad, &params).unwrap();
        pass &= !mrep.all_pass();
    }
    pass &= found == 50;
    verdict(5, "closure suite on certified expanders", pass);
}

#[test]
fn a06_expansion_experiment() {
    // calibrated regime; η = 1/4 gives the rate α = 1 − 2η = 1/2;
    // threshold 0.9 is our calibration
    let p = ExpanderParams::new(3, 4, Q64::new(1, 2));
    let exp =
        expansion_rate_experiment(24, 4, 48, &p, 500, 0, DEFAULT_ENUMERATION_CAP).unwrap();
    let pass = exp.frequency >= 0.9;
    println!(
        "          expansion frequency {:.3} over {} seeds",
        exp.frequency, exp.trials
    );
    verdict(6, "certified-expander frequency ≥ 0.9", pass);
}

#[test]
fn a07_good_partitions() {
    let delta = Q64::new(1, 10);
    let mut good = 0u32;
    let mut err_sizes = Vec::new();
    for seed in 0..200u64 {
        let cnf = sample_cnf(&SamplerConfig {
            n: 24,
            delta: 4,
            m: 48,
            density_alpha: None,
            seed,
            chvatal_szemeredi: false,
        })
        .unwrap();
        let part = random_partition(24, seed ^ 0x5bd1_e995);
        let (ea, eb) = error_sets(&cnf, &part, delta).unwrap();
        err_sizes.push((ea.len() + eb.len()) as f64);
        let rep = check_good_partition(&cnf, &part, delta, 2, 20_000, seed).unwrap();
        if rep.all_pass {
            good += 1;
        }
    }
    let rate = good as f64 / 200.0;
    // Error-set mean against the entropy bound m·2^{−(1−H(δ))Δ}
    let mean = err_sizes.iter().sum::<f64>() / err_sizes.len() as f64;
    let var = err_sizes.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        / (err_sizes.len() - 1) as f64;
    let se = (var / err_sizes.len() as f64).sqrt();
    let h = binary_entropy(delta).unwrap();
    let bound = 48.0 * 2f64.powf(-(1.0 - h) * 4.0);
    println!(
        "          pass rate {rate:.3}, error-set mean {mean:.2} vs bound {bound:.2} (se {se:.3})"
    );
    let pass = rate >= 0.8 && mean <= bound + 3.0 * se;
    verdict(7, "δ-good partition rate and error-set mean", pass);
}

#[test]
fn a08_concentration() {
    let mut pass = true;
    for n in 3..=6u32 {
        for zeta in [std::f64::consts::LN_2, 1.0, 2.0] {
            for adversary in [
                Adversary::IidExponential,
                Adversary::SumAdaptive,
                Adversary::WorstShift,
                Adversary::Zero,
            ] {
                let rep = concentration_experiment(&ConcentrationConfig {
                    n,
                    zeta,
                    adversary,
                    trials: 1_000_000,
                    seed: 0xC0FFEE ^ n as u64,
                })
                .unwrap();
                pass &= rep.pass && rep.analytic_pass.unwrap_or(true);
            }
        }
    }
    verdict(8, "adaptive concentration tails", pass);
}

/// Instance for the leaf-bound criterion: three clauses over 12 variables per
/// side, each side support missing a distinct block of 4 coordinates, so both
/// side graphs are (4, 8, 4)-expanders (α = 1/2) with Δ = 8.
fn wide_instance() -> BipartiteInstance {
    let full = 0xfffu64;
    let adj: Vec<u64> = (0..3).map(|i| full & !(0xfu64 << (4 * i))).collect();
    let g1 = BipartiteGraph::new(3, 12, 8, adj.clone()).unwrap();
    let g2 = BipartiteGraph::new(3, 12, 8, adj).unwrap();
    BipartiteInstance {
        g1,
        g2,
        x_falsify: vec![0, 0, 0],
        y_falsify: vec![0, 0, 0],
        clause_map: vec![0, 1, 2],
        n_right: 12,
        a_vars: (0..12).collect(),
        b_vars: (12..24).collect(),
    }
}

#[test]
fn a09_leaf_bounds() {
    let inst = wide_instance();
    let gamma = Q64::new(1, 2); // γ = α
    let alpha = Q64::new(1, 2);
    let p_exp = ExpanderParams::new(4, 8, alpha);
    assert!(check_expansion(&inst.g1, &p_exp, DEFAULT_ENUMERATION_CAP)
        .unwrap()
        .is_expander);
    let mut pass = true;
    for seed in 0..20u64 {
        let p = random_protocol(
            &inst,
            &RandomProtocolConfig {
                depth: 2,
                family: NodeFamily::Coordinate,
                labels: LabelRule::Greedy,
                seed,
            },
        )
        .unwrap();
        let c = convert(&p, gamma, None).unwrap();
        let pc =
            protocol_closures(&c, &inst.g1, &inst.g2, 4, alpha, Q64::new(1, 4), true).unwrap();
        let rx = verify_closure(&inst.g1, &pc.tree_x, &pc.closure_x, &pc.params).unwrap();
        let ry = verify_closure(&inst.g2, &pc.tree_y, &pc.closure_y, &pc.params).unwrap();
        pass &= rx.all_pass() && ry.all_pass();
        let a = leaf_analysis(&inst, &c, &pc).unwrap();
        pass &= check_leaf_bound(&a, gamma, alpha, 8).pass;
        pass &= check_bad_mass(&a, &c, &pc).pass;
        pass &= subcube_error_bound(&c, &inst, &pc).unwrap().pass;
    }
    verdict(9, "leaf bounds and sub-cube error bound", pass);
}

#[test]
fn a10_success_identity_and_mass_conservation() {
    let inst = disjoint_instance(3, 4);
    let alpha = Q64::new(1, 2);
    let mut pass = true;
    for seed in 0..50u64 {
        let gamma = if seed % 2 == 0 { Q64::new(1, 2) } else { Q64::new(3, 4) };
        let p = random_protocol(
            &inst,
            &RandomProtocolConfig {
                depth: 1 + (seed % 4) as u32,
                family: NodeFamily::Coordinate,
                labels: LabelRule::Greedy,
                seed,
            },
        )
        .unwrap();
        let c = convert(&p, gamma, None).unwrap();
        pass &= audit_mass_conservation(&c).is_ok();
        let pc =
            protocol_closures(&c, &inst.g1, &inst.g2, 48, alpha, alpha / 2, true).unwrap();
        let a = leaf_analysis(&inst, &c, &pc).unwrap();
        pass &= check_success_identity(&a, &c, &inst).unwrap().pass;
    }
    verdict(10, "leaf-sampling identity and mass conservation, exact", pass);
}

#[test]
fn a11_tooling_round_trips() {
    let mut pass = true;
    for seed in 0..10u64 {
        let cnf = sample_cnf(&SamplerConfig {
            n: 16,
            delta: 4,
            m: 32,
            density_alpha: None,
            seed,
            chvatal_szemeredi: false,
        })
        .unwrap();
        // DIMACS round-trip is byte-stable
        let d1 = write_dimacs(&cnf);
        let back = read_dimacs(&d1, true).unwrap();
        pass &= write_dimacs(&back) == d1;
        // JSON round-trip preserves the instance
        let j = cnf_to_json(&cnf);
        let back2 = cnf_from_json(&j).unwrap();
        pass &= back2.clauses == cnf.clauses && back2.n == cnf.n;
        pass &= cnf_to_json(&back2) == j;
    }
    // identical seeds → byte-identical reports
    let mk = |seed: u64| {
        let mut buf = Vec::new();
        let mut e = Emitter::new(&mut buf);
        e.emit_check(
            "probe",
            json!({"seed": seed, "n": 8}),
            Some(seed),
            json!({"pass": true}),
        )
        .unwrap();
        buf
    };
    pass &= mk(3) == mk(3);
    pass &= mk(3) != mk(4);
    verdict(11, "DIMACS/JSON round-trips and report determinism", pass);
}
