//! Conversion of an arbitrary protocol into a subcube-like one: after every
//! spoken bit the speaking side's set is re-partitioned by the density-restoring
//! partition, so every node's rectangle is structured on both sides. The
//! conversion tracks, per step, the exact bit mass q, suffix mass p^{≥j},
//! entropy toll h = log2(1/q) + log2(1/p^{≥j}), and the number of newly fixed
//! coordinates, and can shave the low-probability deep-codimension fringe.

use crate::bigraph::Q64;
use crate::partition::BipartiteInstance;
use crate::pointset::PointSet;
use crate::protocol::{Node, Protocol, Side};
use crate::ratio::{log2_q, q_to_f64, Q};
use crate::structure::{density_restoring_partition, spread_check};
use crate::{Error, Result};

/// One child edge of a conversion node, carrying its step trace.
#[derive(Debug, Clone)]
pub struct ConvChild {
    /// the transmitted bit
    pub bit: bool,
    /// 1-based index of the density-restoring part within this bit
    pub part: usize,
    /// q_u^b = |X_b| / |X| (mass of the bit on the speaking side)
    pub q: Q,
    /// suffix mass p^{≥j} within the bit
    pub p_geq: Q,
    /// h_k = log2(1/q) + log2(1/p^{≥j})
    pub h: f64,
    /// newly fixed coordinates on the speaking side
    pub n_k: u32,
    pub node: ConvNode,
}

#[derive(Debug, Clone)]
pub enum ConvKind {
    Leaf {
        label: Option<usize>,
        /// true when this leaf replaced a subtree that exceeded the
        /// codimension cap
        shaved: bool,
    },
    Internal {
        speaker: Side,
        children: Vec<ConvChild>,
    },
}

#[derive(Debug, Clone)]
pub struct ConvNode {
    pub x: PointSet,
    pub y: PointSet,
    pub fx_mask: u32,
    pub fx_vals: u32,
    pub fy_mask: u32,
    pub fy_vals: u32,
    /// Σ h_k along the root path
    pub h_sum: f64,
    /// protocol depth consumed (number of conversion steps)
    pub steps: u32,
    pub kind: ConvKind,
}

impl ConvNode {
    pub fn codim(&self) -> u32 {
        self.fx_mask.count_ones() + self.fy_mask.count_ones()
    }

    /// D∞ of the rectangle: entropy missing from the free coordinates of both
    /// sides.
    pub fn deficiency(&self) -> f64 {
        let dx = self.x.n() as f64 - self.fx_mask.count_ones() as f64
            - (self.x.len() as f64).log2();
        let dy = self.y.n() as f64 - self.fy_mask.count_ones() as f64
            - (self.y.len() as f64).log2();
        dx + dy
    }
}

#[derive(Debug, Clone)]
pub struct Conversion {
    pub gamma: Q64,
    /// codimension cap used for shaving
    pub cap: u32,
    /// depth of the source protocol
    pub d: u32,
    pub nx: u32,
    pub ny: u32,
    pub m: usize,
    pub root: ConvNode,
    /// exact input mass of the shaved region
    pub shaved_mass: Q,
}

/// Default shaving cap ⌈7d / (1−γ)⌉.
pub fn default_codim_cap(d: u32, gamma: Q64) -> Result<u32> {
    let one_minus = Q64::new(1, 1) - gamma;
    if one_minus <= Q64::new(0, 1) {
        return Err(Error::InvalidConfig("γ = 1 leaves no codimension budget".into()));
    }
    let v = Q64::new(7 * d as i64, 1) / one_minus;
    Ok(v.ceil().to_integer() as u32)
}

struct Builder {
    gamma: Q64,
    cap: u32,
    nx: u32,
    ny: u32,
    shaved_num: i128,
}

impl Builder {
    fn build(
        &mut self,
        pnode: &Node,
        x: PointSet,
        y: PointSet,
        fx: (u32, u32),
        fy: (u32, u32),
        h_sum: f64,
        steps: u32,
    ) -> Result<ConvNode> {
        let codim = fx.0.count_ones() + fy.0.count_ones();
        if codim > self.cap {
            self.shaved_num += x.len() as i128 * y.len() as i128;
            return Ok(ConvNode {
                x,
                y,
                fx_mask: fx.0,
                fx_vals: fx.1,
                fy_mask: fy.0,
                fy_vals: fy.1,
                h_sum,
                steps,
                kind: ConvKind::Leaf { label: None, shaved: true },
            });
        }
        match pnode {
            Node::Leaf { label } => Ok(ConvNode {
                x,
                y,
                fx_mask: fx.0,
                fx_vals: fx.1,
                fy_mask: fy.0,
                fy_vals: fy.1,
                h_sum,
                steps,
                kind: ConvKind::Leaf { label: *label, shaved: false },
            }),
            Node::Internal { speaker, table, children } => {
                let (speak_set, side_n, side_fix) = match speaker {
                    Side::A => (&x, self.nx, fx),
                    Side::B => (&y, self.ny, fy),
                };
                let full = (1u32 << side_n) - 1;
                let universe = full & !side_fix.0;
                let total = speak_set.len();
                let mut out_children = Vec::new();
                for bit in [false, true] {
                    let sub = if bit {
                        speak_set.intersect(table)
                    } else {
                        speak_set.difference(table)
                    };
                    if sub.is_empty() {
                        continue;
                    }
                    let q = Q::new(sub.len() as i128, total as i128);
                    let parts = density_restoring_partition(&sub, self.gamma, universe)?;
                    for part in parts {
                        let h = -log2_q(&q) - log2_q(&part.p_geq);
                        let n_k = part.fix_mask.count_ones();
                        let new_fix = (
                            side_fix.0 | part.fix_mask,
                            side_fix.1 | part.fix_vals,
                        );
                        let (cx, cy, cfx, cfy) = match speaker {
                            Side::A => (part.set.clone(), y.clone(), new_fix, fy),
                            Side::B => (x.clone(), part.set.clone(), fx, new_fix),
                        };
                        let node = self.build(
                            &children[bit as usize],
                            cx,
                            cy,
                            cfx,
                            cfy,
                            h_sum + h,
                            steps + 1,
                        )?;
                        out_children.push(ConvChild {
                            bit,
                            part: part.index,
                            q,
                            p_geq: part.p_geq,
                            h,
                            n_k,
                            node,
                        });
                    }
                }
                Ok(ConvNode {
                    x,
                    y,
                    fx_mask: fx.0,
                    fx_vals: fx.1,
                    fy_mask: fy.0,
                    fy_vals: fy.1,
                    h_sum,
                    steps,
                    kind: ConvKind::Internal {
                        speaker: *speaker,
                        children: out_children,
                    },
                })
            }
        }
    }
}

/// Runs the conversion. `cap` defaults to ⌈7d/(1−γ)⌉ where d is the protocol
/// depth; subtrees whose rectangle reaches codimension above the cap are
/// replaced by ⊥ leaves and their input mass is accounted in `shaved_mass`.
pub fn convert(p: &Protocol, gamma: Q64, cap: Option<u32>) -> Result<Conversion> {
    let d = p.depth();
    let cap = match cap {
        Some(c) => c,
        None => default_codim_cap(d, gamma)?,
    };
    let mut b = Builder {
        gamma,
        cap,
        nx: p.nx,
        ny: p.ny,
        shaved_num: 0,
    };
    let root = b.build(
        &p.root,
        PointSet::full(p.nx),
        PointSet::full(p.ny),
        (0, 0),
        (0, 0),
        0.0,
        0,
    )?;
    Ok(Conversion {
        gamma,
        cap,
        d,
        nx: p.nx,
        ny: p.ny,
        m: p.m,
        root,
        shaved_mass: Q::new(b.shaved_num, 1i128 << (p.nx + p.ny)),
    })
}

/// Runs the converted protocol on one input pair: at each internal node the
/// unique child whose rectangle contains the input is taken.
pub fn conv_execute(c: &Conversion, x: u32, y: u32) -> (Option<usize>, bool) {
    let mut node = &c.root;
    loop {
        match &node.kind {
            ConvKind::Leaf { label, shaved } => return (*label, *shaved),
            ConvKind::Internal { children, .. } => {
                let next = children
                    .iter()
                    .find(|ch| ch.node.x.contains(x) && ch.node.y.contains(y))
                    .expect("children tile the rectangle");
                node = &next.node;
            }
        }
    }
}

/// All leaves of the conversion tree, preorder.
pub fn conv_leaves(c: &Conversion) -> Vec<&ConvNode> {
    let mut out = Vec::new();
    fn go<'a>(n: &'a ConvNode, out: &mut Vec<&'a ConvNode>) {
        match &n.kind {
            ConvKind::Leaf { .. } => out.push(n),
            ConvKind::Internal { children, .. } => {
                for ch in children {
                    go(&ch.node, out);
                }
            }
        }
    }
    go(&c.root, &mut out);
    out
}

fn walk_nodes<'a>(n: &'a ConvNode, f: &mut impl FnMut(&'a ConvNode) -> Result<()>) -> Result<()> {
    f(n)?;
    if let ConvKind::Internal { children, .. } = &n.kind {
        for ch in children {
            walk_nodes(&ch.node, f)?;
        }
    }
    Ok(())
}

/// Every node's rectangle is subcube-like: fixed coordinates constant with the
/// recorded values, free coordinates γ-spread, on both sides.
pub fn audit_subcube_like(c: &Conversion) -> Result<()> {
    let fullx = (1u32 << c.nx) - 1;
    let fully = (1u32 << c.ny) - 1;
    walk_nodes(&c.root, &mut |n| {
        for (set, mask, vals, full) in [
            (&n.x, n.fx_mask, n.fx_vals, fullx),
            (&n.y, n.fy_mask, n.fy_vals, fully),
        ] {
            if set.is_empty() {
                return Err(Error::PostconditionFailed("empty rectangle side".into()));
            }
            let (constant, cvals) = set.constant_coords();
            if constant & mask != mask || cvals & mask != vals {
                return Err(Error::PostconditionFailed(
                    "fixed coordinates are not constant with the recorded values".into(),
                ));
            }
            if spread_check(set, c.gamma, full & !mask)?.is_some() {
                return Err(Error::PostconditionFailed(
                    "free coordinates are not γ-spread".into(),
                ));
            }
        }
        Ok(())
    })
}

/// Children of every internal node tile its rectangle, and each child mass
/// equals q·p_j exactly.
pub fn audit_mass_conservation(c: &Conversion) -> Result<()> {
    walk_nodes(&c.root, &mut |n| {
        let ConvKind::Internal { speaker, children } = &n.kind else {
            return Ok(());
        };
        let area: u128 = children
            .iter()
            .map(|ch| ch.node.x.len() as u128 * ch.node.y.len() as u128)
            .sum();
        if area != n.x.len() as u128 * n.y.len() as u128 {
            return Err(Error::PostconditionFailed(
                "children do not tile the parent rectangle".into(),
            ));
        }
        let total = match speaker {
            Side::A => n.x.len(),
            Side::B => n.y.len(),
        } as i128;
        // per bit: q is shared and exact, and p^{≥j} telescopes down through
        // the part masses to zero
        for bit in [false, true] {
            let group: Vec<&ConvChild> = children.iter().filter(|ch| ch.bit == bit).collect();
            if group.is_empty() {
                continue;
            }
            let q = group[0].q;
            let xb = (q * Q::new(total, 1)).to_integer();
            let mut suffix = Q::new(1, 1);
            for ch in &group {
                if ch.q != q {
                    return Err(Error::PostconditionFailed(
                        "children of one bit disagree on q".into(),
                    ));
                }
                if ch.p_geq != suffix {
                    return Err(Error::PostconditionFailed(
                        "suffix masses do not telescope".into(),
                    ));
                }
                let side_len = match speaker {
                    Side::A => ch.node.x.len(),
                    Side::B => ch.node.y.len(),
                } as i128;
                suffix -= Q::new(side_len, xb);
            }
            if suffix != Q::new(0, 1) {
                return Err(Error::PostconditionFailed(
                    "part masses do not exhaust the bit".into(),
                ));
            }
        }
        Ok(())
    })
}

/// The deficiency fact on every edge: D∞(v) ≤ D∞(u) − (1−γ)·n_k + h_k.
pub fn check_deficiency_fact(c: &Conversion) -> Result<()> {
    let gamma = q_to_f64(&Q::new(*c.gamma.numer() as i128, *c.gamma.denom() as i128));
    walk_nodes(&c.root, &mut |n| {
        let ConvKind::Internal { children, .. } = &n.kind else {
            return Ok(());
        };
        let du = n.deficiency();
        for ch in children {
            let dv = ch.node.deficiency();
            if dv > du - (1.0 - gamma) * ch.n_k as f64 + ch.h + 1e-9 {
                return Err(Error::PostconditionFailed(format!(
                    "deficiency fact violated: {dv} > {du} − (1−γ)·{} + {}",
                    ch.n_k, ch.h
                )));
            }
        }
        Ok(())
    })
}

/// The codimension claim at every node: codim ≤ h_sum / (1−γ).
pub fn check_codim_bound(c: &Conversion) -> Result<()> {
    let gamma = q_to_f64(&Q::new(*c.gamma.numer() as i128, *c.gamma.denom() as i128));
    walk_nodes(&c.root, &mut |n| {
        if (n.codim() as f64) * (1.0 - gamma) > n.h_sum + 1e-9 {
            return Err(Error::PostconditionFailed(format!(
                "codimension claim violated: codim {} at h_sum {}",
                n.codim(),
                n.h_sum
            )));
        }
        Ok(())
    })
}

/// The per-step tail at every internal node, exactly: for t = 0..=t_max,
/// Σ {mass of children with q·p^{≥j} ≤ 2^{−1−t}} ≤ 2^{−t}.
pub fn check_tail_bound(c: &Conversion, t_max: u32) -> Result<()> {
    walk_nodes(&c.root, &mut |n| {
        let ConvKind::Internal { speaker, children } = &n.kind else {
            return Ok(());
        };
        let total = match speaker {
            Side::A => n.x.len(),
            Side::B => n.y.len(),
        } as i128;
        for t in 0..=t_max {
            let threshold = Q::new(1, 1i128 << (1 + t));
            let mut mass = Q::new(0, 1);
            for ch in children {
                if ch.q * ch.p_geq <= threshold {
                    let side_len = match speaker {
                        Side::A => ch.node.x.len(),
                        Side::B => ch.node.y.len(),
                    } as i128;
                    mass += Q::new(side_len, total);
                }
            }
            if mass > Q::new(1, 1i128 << t) {
                return Err(Error::PostconditionFailed(format!(
                    "step tail violated at t = {t}: mass {mass}"
                )));
            }
        }
        Ok(())
    })
}

/// Output fidelity: on every input pair the conversion either reproduces the
/// source protocol's label or lands in a shaved ⊥ leaf.
pub fn check_fidelity(c: &Conversion, p: &Protocol) -> Result<()> {
    for x in 0..(1u32 << c.nx) {
        for y in 0..(1u32 << c.ny) {
            let (label, shaved) = conv_execute(c, x, y);
            if !shaved && label != p.execute(x, y).0 {
                return Err(Error::PostconditionFailed(format!(
                    "label mismatch at ({x}, {y})"
                )));
            }
        }
    }
    Ok(())
}

/// Falsified mass of the converted protocol against an instance; shaved ⊥
/// leaves contribute nothing.
pub fn conv_falsified_mass(c: &Conversion, inst: &BipartiteInstance) -> Result<Q> {
    if inst.m() != c.m || inst.n_right != c.nx {
        return Err(Error::InvalidConfig(
            "conversion shape does not match the instance".into(),
        ));
    }
    let mut num: i128 = 0;
    for leaf in conv_leaves(c) {
        let ConvKind::Leaf { label: Some(i), shaved: false } = leaf.kind else {
            continue;
        };
        let cx = leaf
            .x
            .count_matching(inst.g1.adj[i] as u32, inst.x_falsify[i] as u32);
        let cy = leaf
            .y
            .count_matching(inst.g2.adj[i] as u32, inst.y_falsify[i] as u32);
        num += cx as i128 * cy as i128;
    }
    Ok(Q::new(num, 1i128 << (c.nx + c.ny)))
}

/// Bundle of every conversion invariant; the checks the acceptance gate runs
/// per converted protocol.
pub fn verify_conversion(c: &Conversion, p: &Protocol) -> Result<()> {
    audit_subcube_like(c)?;
    audit_mass_conservation(c)?;
    check_deficiency_fact(c)?;
    check_codim_bound(c)?;
    check_tail_bound(c, 8)?;
    check_fidelity(c, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{sample_cnf, SamplerConfig};
    use crate::partition::{bipartite_instance, random_partition};
    use crate::protocol::{
        baseline_protocol, falsified_mass, random_protocol, LabelRule, NodeFamily,
        RandomProtocolConfig,
    };

    fn instance(seed: u64) -> BipartiteInstance {
        for s in seed.. {
            let cnf = sample_cnf(&SamplerConfig {
                n: 10,
                delta: 3,
                m: 10,
                density_alpha: None,
                seed: s,
                chvatal_szemeredi: false,
            })
            .unwrap();
            let part = random_partition(10, s ^ 0x77);
            if let Ok(inst) = bipartite_instance(&cnf, &part, Q64::new(1, 10)) {
                if inst.n_right <= 6 {
                    return inst;
                }
            }
        }
        unreachable!()
    }

    fn rand_protocol(inst: &BipartiteInstance, depth: u32, family: NodeFamily, seed: u64) -> Protocol {
        random_protocol(
            inst,
            &RandomProtocolConfig {
                depth,
                family,
                labels: LabelRule::Greedy,
                seed,
            },
        )
        .unwrap()
    }

    #[test]
    fn default_cap_values() {
        assert_eq!(default_codim_cap(4, Q64::new(1, 2)).unwrap(), 56);
        assert_eq!(default_codim_cap(3, Q64::new(3, 4)).unwrap(), 84);
        assert!(default_codim_cap(3, Q64::new(1, 1)).is_err());
    }

    #[test]
    fn trivial_leaf_protocol_converts_to_leaf() {
        let inst = instance(1);
        let p = Protocol::new(
            inst.n_right,
            inst.n_right,
            inst.m(),
            crate::protocol::Node::Leaf { label: Some(0) },
        )
        .unwrap();
        let c = convert(&p, Q64::new(1, 2), None).unwrap();
        assert_eq!(c.shaved_mass, Q::new(0, 1));
        assert!(matches!(c.root.kind, ConvKind::Leaf { label: Some(0), shaved: false }));
        verify_conversion(&c, &p).unwrap();
    }

    #[test]
    fn conversion_invariants_across_families_and_gammas() {
        for seed in 0..6u64 {
            let inst = instance(20 + seed);
            for family in [NodeFamily::Coordinate, NodeFamily::Xor, NodeFamily::Random] {
                let p = rand_protocol(&inst, 4, family, seed);
                for gamma in [Q64::new(1, 4), Q64::new(1, 2), Q64::new(3, 4)] {
                    let c = convert(&p, gamma, None).unwrap();
                    verify_conversion(&c, &p).unwrap();
                }
            }
        }
    }

    #[test]
    fn unshaved_conversion_preserves_falsified_mass() {
        let inst = instance(50);
        let p = rand_protocol(&inst, 4, NodeFamily::Xor, 3);
        let c = convert(&p, Q64::new(1, 2), None).unwrap();
        if c.shaved_mass == Q::new(0, 1) {
            assert_eq!(
                conv_falsified_mass(&c, &inst).unwrap(),
                falsified_mass(&p, &inst).unwrap()
            );
        }
    }

    #[test]
    fn shaving_caps_codimension_and_accounts_mass() {
        let inst = instance(70);
        let p = rand_protocol(&inst, 5, NodeFamily::Random, 9);
        // force heavy shaving with a tiny cap
        let c = convert(&p, Q64::new(1, 2), Some(2)).unwrap();
        let mut shaved = Q::new(0, 1);
        for leaf in conv_leaves(&c) {
            if let ConvKind::Leaf { shaved: true, .. } = leaf.kind {
                assert!(leaf.codim() > 2);
                shaved += Q::new(
                    leaf.x.len() as i128 * leaf.y.len() as i128,
                    1i128 << (c.nx + c.ny),
                );
            } else {
                assert!(leaf.codim() <= 2);
            }
        }
        assert_eq!(shaved, c.shaved_mass);
        // internal nodes never exceed the cap either
        walk_nodes(&c.root, &mut |n| {
            if !matches!(n.kind, ConvKind::Leaf { shaved: true, .. }) {
                assert!(n.codim() <= 2);
            }
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn converted_mass_between_protocol_mass_and_shave_slack() {
        for seed in 0..8u64 {
            let inst = instance(90 + seed);
            let p = rand_protocol(&inst, 5, NodeFamily::Random, seed);
            let c = convert(&p, Q64::new(1, 2), Some(4)).unwrap();
            let pm = falsified_mass(&p, &inst).unwrap();
            let cm = conv_falsified_mass(&c, &inst).unwrap();
            assert!(cm <= pm);
            assert!(cm >= pm - c.shaved_mass);
        }
    }

    #[test]
    fn baseline_converts_cleanly_at_default_cap() {
        let inst = instance(130);
        let p = baseline_protocol(&inst).unwrap();
        let c = convert(&p, Q64::new(1, 2), None).unwrap();
        verify_conversion(&c, &p).unwrap();
        // the default cap 7d/(1−γ) exceeds both sides entirely: nothing shaved
        assert_eq!(c.shaved_mass, Q::new(0, 1));
        assert_eq!(
            conv_falsified_mass(&c, &inst).unwrap(),
            falsified_mass(&p, &inst).unwrap()
        );
    }

    #[test]
    fn shaved_mass_bounded_by_exp_minus_d_at_default_cap() {
        for seed in 0..6u64 {
            let inst = instance(160 + seed);
            let p = rand_protocol(&inst, 4, NodeFamily::Random, seed);
            let c = convert(&p, Q64::new(1, 2), None).unwrap();
            assert!(q_to_f64(&c.shaved_mass) <= (-(c.d as f64)).exp() + 1e-12);
        }
    }
}
