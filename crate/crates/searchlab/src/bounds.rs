//! Per-leaf falsification probabilities, the bad-clause mass bound, and the
//! explicit end-to-end error chain for converted protocols.
//!
//! For a converted protocol with per-leaf closure sets Cl^X(ℓ), Cl^Y(ℓ) over
//! the two side expanders, this module computes exact per-leaf probabilities
//! p_i(ℓ) = Pr_{(x,y)∼R_ℓ}[C_i(x,y) = 0] and checks the explicit
//! inequalities:
//!
//!   * leaf bound: p_i(ℓ) ≤ 2^{−γαΔ/2} whenever i ∉ J_ℓ = Cl^X(ℓ) ∪ Cl^Y(ℓ);
//!   * bad mass: E_ℓ[Σ_{i∈J_ℓ} p_i(ℓ)] ≤ d·2^{−γαΔ/2}, together with the
//!     entry-node decomposition the proof relies on (the rectangles of the
//!     maximal nodes where clause i enters J tile the region where it stays);
//!   * sub-cube error: the mass of inputs on which the output clause is
//!     falsified is ≤ (d+1)·2^{−γαΔ/2} under d ≤ α²rΔ/4;
//!   * end-to-end chain: the original protocol's falsified mass is at most
//!     that bound plus the exact mass shaved during conversion.

use crate::bigraph::Q64;
use crate::closure::{
    conv_preorder, protocol_closures, verify_closure, ProtocolClosures,
};
use crate::conversion::{
    conv_execute, conv_falsified_mass, conv_leaves, convert, verify_conversion, ConvKind,
    Conversion,
};
use crate::partition::BipartiteInstance;
use crate::protocol::{falsified_mass, Protocol};
use crate::ratio::{q_to_f64, q_to_string, Q};
use crate::{Error, Result};
use serde::Serialize;

/// Tolerance when an exact rational is compared against a float threshold.
pub const FLOAT_GUARD: f64 = 1e-12;

/// Outcome of one inequality check with explicit constants.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub check: String,
    pub bound: f64,
    pub measured: f64,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

impl BoundReport {
    fn new(check: &str, bound: f64, measured: f64, witnesses: Vec<String>) -> Self {
        BoundReport {
            check: check.into(),
            bound,
            measured,
            pass: measured <= bound + FLOAT_GUARD && witnesses.is_empty(),
            witnesses,
        }
    }
}

/// One converted-protocol leaf with its exact probability table.
#[derive(Debug, Clone)]
pub struct LeafInfo {
    /// |R_ℓ| / 2^{nx+ny}
    pub mass: Q,
    pub label: Option<usize>,
    pub shaved: bool,
    /// J_ℓ = Cl^X(ℓ) ∪ Cl^Y(ℓ) as a clause mask
    pub j_set: u64,
    /// p_i(ℓ) for every clause i, exact
    pub p: Vec<Q>,
    pub codim: u32,
}

/// Exact per-leaf analysis of a converted protocol against an instance.
#[derive(Debug, Clone)]
pub struct LeafAnalysis {
    pub m: usize,
    /// codimension of the converted protocol (max over leaves)
    pub d: u32,
    pub leaves: Vec<LeafInfo>,
}

fn q64_f64(v: Q64) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// 2^{−γαΔ/2}, the explicit per-clause bound.
pub fn leaf_bound_value(gamma: Q64, alpha: Q64, delta: u32) -> f64 {
    (-q64_f64(gamma) * q64_f64(alpha) * delta as f64 / 2.0).exp2()
}

/// Builds the per-leaf table: masses, J_ℓ from the closures, and exact
/// p_i(ℓ) for every clause via the product factorization of the rectangle.
pub fn leaf_analysis(
    inst: &BipartiteInstance,
    c: &Conversion,
    pc: &ProtocolClosures,
) -> Result<LeafAnalysis> {
    if inst.m() != c.m || inst.n_right != c.nx || inst.n_right != c.ny {
        return Err(Error::InvalidConfig(
            "conversion shape does not match the instance".into(),
        ));
    }
    let leaves = conv_leaves(c);
    if leaves.len() != pc.leaf_cl_x.len() {
        return Err(Error::PostconditionFailed(
            "closure leaf table misaligned with the conversion leaves".into(),
        ));
    }
    let m = inst.m();
    let denom = 1i128 << (c.nx + c.ny);
    let mut out = Vec::with_capacity(leaves.len());
    let mut total = Q::new(0, 1);
    for (k, leaf) in leaves.iter().enumerate() {
        let rect = leaf.x.len() as i128 * leaf.y.len() as i128;
        if rect == 0 {
            return Err(Error::PostconditionFailed(format!(
                "leaf {k} has an empty rectangle"
            )));
        }
        let (label, shaved) = match leaf.kind {
            ConvKind::Leaf { label, shaved } => (label, shaved),
            _ => unreachable!("conv_leaves returns leaves"),
        };
        let mut p = Vec::with_capacity(m);
        for i in 0..m {
            let cx = leaf
                .x
                .count_matching(inst.g1.adj[i] as u32, inst.x_falsify[i] as u32);
            let cy = leaf
                .y
                .count_matching(inst.g2.adj[i] as u32, inst.y_falsify[i] as u32);
            p.push(Q::new(cx as i128 * cy as i128, rect));
        }
        let mass = Q::new(rect, denom);
        total += mass;
        out.push(LeafInfo {
            mass,
            label,
            shaved,
            j_set: pc.leaf_cl_x[k] | pc.leaf_cl_y[k],
            p,
            codim: leaf.codim(),
        });
    }
    if total != Q::new(1, 1) {
        return Err(Error::PostconditionFailed(format!(
            "leaf masses sum to {}, not 1",
            q_to_string(&total)
        )));
    }
    Ok(LeafAnalysis {
        m,
        d: pc.params.d,
        leaves: out,
    })
}

/// Exact success probability from the leaf table: Σ_ℓ mass(ℓ)·p_{label}(ℓ)
/// over labeled, unshaved leaves.
pub fn leaf_success_mass(a: &LeafAnalysis) -> Q {
    let mut s = Q::new(0, 1);
    for l in &a.leaves {
        if let (Some(i), false) = (l.label, l.shaved) {
            s += l.mass * l.p[i];
        }
    }
    s
}

/// The leaf-sampling identity: the success probability written as an
/// expectation over a mass-weighted random leaf equals the direct count over
/// all inputs. Both sides are exact rationals and must agree exactly.
pub fn check_success_identity(
    a: &LeafAnalysis,
    c: &Conversion,
    inst: &BipartiteInstance,
) -> Result<BoundReport> {
    let lhs = leaf_success_mass(a);
    // direct enumeration over every input pair
    let mut num: i128 = 0;
    for x in 0..(1u32 << c.nx) {
        for y in 0..(1u32 << c.ny) {
            if let (Some(i), false) = conv_execute(c, x, y) {
                if inst.falsified(i, x as u64, y as u64) {
                    num += 1;
                }
            }
        }
    }
    let rhs = Q::new(num, 1i128 << (c.nx + c.ny));
    // and the factorized per-leaf count must agree as well
    let fact = conv_falsified_mass(c, inst)?;
    let mut witnesses = Vec::new();
    if lhs != rhs {
        witnesses.push(format!(
            "leaf expectation {} ≠ input enumeration {}",
            q_to_string(&lhs),
            q_to_string(&rhs)
        ));
    }
    if lhs != fact {
        witnesses.push(format!(
            "leaf expectation {} ≠ factorized mass {}",
            q_to_string(&lhs),
            q_to_string(&fact)
        ));
    }
    Ok(BoundReport::new(
        "success_identity",
        0.0,
        q_to_f64(&(lhs - rhs)).abs(),
        witnesses,
    ))
}

/// p_i(ℓ) ≤ 2^{−γαΔ/2} for every leaf ℓ and every clause i ∉ J_ℓ.
pub fn check_leaf_bound(
    a: &LeafAnalysis,
    gamma: Q64,
    alpha: Q64,
    delta: u32,
) -> BoundReport {
    let bound = leaf_bound_value(gamma, alpha, delta);
    let mut witnesses = Vec::new();
    let mut worst = 0.0f64;
    for (k, l) in a.leaves.iter().enumerate() {
        for i in 0..a.m {
            if l.j_set >> i & 1 == 1 {
                continue;
            }
            let v = q_to_f64(&l.p[i]);
            worst = worst.max(v);
            if v > bound + FLOAT_GUARD {
                witnesses.push(format!(
                    "leaf {k}: p_{i} = {} > {bound}",
                    q_to_string(&l.p[i])
                ));
            }
        }
    }
    BoundReport::new("leaf_bound", bound, worst, witnesses)
}

/// E_ℓ[Σ_{i∈J_ℓ} p_i(ℓ)] ≤ d·2^{−γαΔ/2}, plus the structural facts its
/// proof uses: J grows monotonically down the tree, |J_ℓ| ≤ d at every leaf,
/// and for each clause i the rectangles of the nodes where i first enters J
/// carry exactly the mass of the leaves where i ∈ J_ℓ.
pub fn check_bad_mass(
    a: &LeafAnalysis,
    c: &Conversion,
    pc: &ProtocolClosures,
) -> BoundReport {
    let bound = a.d as f64 * leaf_bound_value(c.gamma, pc.params.alpha, pc.params.delta);
    let mut witnesses = Vec::new();
    // exact expectation
    let mut expect = Q::new(0, 1);
    for (k, l) in a.leaves.iter().enumerate() {
        if l.j_set.count_ones() > a.d {
            witnesses.push(format!(
                "leaf {k}: |J| = {} exceeds codimension {}",
                l.j_set.count_ones(),
                a.d
            ));
        }
        for i in 0..a.m {
            if l.j_set >> i & 1 == 1 {
                expect += l.mass * l.p[i];
            }
        }
    }
    // per-node J sets in closure preorder
    let pre = conv_preorder(c);
    let denom = 1i128 << (c.nx + c.ny);
    let j_of: Vec<u64> = (0..pre.len())
        .map(|u| pc.closure_x.t[pc.image_x[u]] | pc.closure_y.t[pc.image_y[u]])
        .collect();
    for (u, (parent, _)) in pre.iter().enumerate() {
        if let Some(pu) = parent {
            if j_of[*pu] & !j_of[u] != 0 {
                witnesses.push(format!("node {u}: J not monotone below node {pu}"));
            }
        }
    }
    for i in 0..a.m {
        let mut entry_mass = Q::new(0, 1);
        let mut leaf_mass = Q::new(0, 1);
        for (u, (parent, node)) in pre.iter().enumerate() {
            let here = j_of[u] >> i & 1 == 1;
            let above = parent.map(|pu| j_of[pu] >> i & 1 == 1).unwrap_or(false);
            let mass = Q::new(node.x.len() as i128 * node.y.len() as i128, denom);
            if here && !above {
                entry_mass += mass;
            }
            if here && matches!(node.kind, ConvKind::Leaf { .. }) {
                leaf_mass += mass;
            }
        }
        if entry_mass != leaf_mass {
            witnesses.push(format!(
                "clause {i}: entry-node mass {} ≠ leaf mass {}",
                q_to_string(&entry_mass),
                q_to_string(&leaf_mass)
            ));
        }
    }
    BoundReport::new("bad_mass", bound, q_to_f64(&expect), witnesses)
}

/// Hypothesis of the sub-cube error bound: d ≤ α²rΔ/4, exactly.
pub fn subcube_hypothesis_holds(d: u32, alpha: Q64, r: usize, delta: u32) -> bool {
    let num = *alpha.numer() as i128;
    let den = *alpha.denom() as i128;
    4 * d as i128 * den * den <= num * num * r as i128 * delta as i128
}

/// The lower bound's heart: the probability that the converted protocol's
/// output clause is actually falsified is at most (d+1)·2^{−γαΔ/2} under
/// d ≤ α²rΔ/4 — shallow sub-cube-like protocols cannot solve the search.
pub fn subcube_error_bound(
    c: &Conversion,
    inst: &BipartiteInstance,
    pc: &ProtocolClosures,
) -> Result<BoundReport> {
    let d = pc.params.d;
    if !subcube_hypothesis_holds(d, pc.params.alpha, pc.params.r, pc.params.delta) {
        return Err(Error::HypothesisViolation(format!(
            "codimension {d} exceeds α²rΔ/4 with α = {}, r = {}, Δ = {}",
            pc.params.alpha, pc.params.r, pc.params.delta
        )));
    }
    let success = conv_falsified_mass(c, inst)?;
    let measured = q_to_f64(&success);
    let bound = (d as f64 + 1.0) * leaf_bound_value(c.gamma, pc.params.alpha, pc.params.delta);
    Ok(BoundReport::new("subcube_error", bound, measured, vec![]))
}

/// Full report of the end-to-end chain.
#[derive(Debug, Clone, Serialize)]
pub struct EndToEndReport {
    pub gamma: String,
    pub alpha: String,
    pub r: usize,
    pub delta: u32,
    pub codim: u32,
    pub shaved_mass: f64,
    pub checks: Vec<BoundReport>,
    pub pass: bool,
}

/// Runs the whole pipeline on one instance and protocol: convert at γ, audit
/// every conversion invariant, build and verify both closures at β = α/2,
/// check the leaf and bad-mass claims, the sub-cube error bound for the
/// converted protocol, and finally the chained bound for the original
/// protocol with the shaved mass added back.
pub fn end_to_end(
    inst: &BipartiteInstance,
    p: &Protocol,
    gamma: Q64,
    r: usize,
    alpha: Q64,
    force: bool,
) -> Result<EndToEndReport> {
    let c = convert(p, gamma, None)?;
    verify_conversion(&c, p)?;
    let beta = alpha / 2;
    let pc = protocol_closures(&c, &inst.g1, &inst.g2, r, alpha, beta, force)?;
    let rx = verify_closure(&inst.g1, &pc.tree_x, &pc.closure_x, &pc.params)?;
    let ry = verify_closure(&inst.g2, &pc.tree_y, &pc.closure_y, &pc.params)?;
    let mut checks = Vec::new();
    for (side, rep) in [("x", &rx), ("y", &ry)] {
        let mut witnesses = Vec::new();
        if !rep.item_expansion {
            witnesses.push(format!(
                "side {side}: residual expansion fails at node {:?}",
                rep.expansion_witness
            ));
        }
        if !rep.item_monotone {
            witnesses.push(format!("side {side}: closure not monotone"));
        }
        if !rep.item_size {
            witnesses.push(format!("side {side}: closure size bound fails"));
        }
        checks.push(BoundReport::new(
            &format!("closure_{side}"),
            0.0,
            0.0,
            witnesses,
        ));
    }
    let a = leaf_analysis(inst, &c, &pc)?;
    checks.push(check_success_identity(&a, &c, inst)?);
    checks.push(check_leaf_bound(&a, gamma, alpha, pc.params.delta));
    checks.push(check_bad_mass(&a, &c, &pc));
    checks.push(subcube_error_bound(&c, inst, &pc)?);
    // the original protocol differs from the converted one only on the
    // shaved mass, so its falsified mass obeys the bound plus that mass
    let shaved = q_to_f64(&c.shaved_mass);
    let mass = q_to_f64(&falsified_mass(p, inst)?);
    let chained = (pc.params.d as f64 + 1.0) * leaf_bound_value(gamma, alpha, pc.params.delta)
        + shaved;
    checks.push(BoundReport::new("end_to_end", chained, mass, vec![]));
    let pass = checks.iter().all(|c| c.pass);
    Ok(EndToEndReport {
        gamma: gamma.to_string(),
        alpha: alpha.to_string(),
        r,
        delta: pc.params.delta,
        codim: pc.params.d,
        shaved_mass: shaved,
        checks,
        pass,
    })
}
