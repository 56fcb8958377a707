//! Deterministic two-party protocol trees with explicit node tables, exact
//! rectangle propagation, and exact error accounting against a bipartite
//! instance.
//!
//! A node owned by a speaker holds the full truth table of its bit as the set
//! of that side's inputs mapped to 1. Leaf labels are clause indices of the
//! instance, or ⊥ for "no answer". The falsified mass of a protocol is the
//! probability, over uniform (x, y), that the output label is a clause
//! falsified by (x, y) — the quantity the lower bound caps.

use crate::partition::BipartiteInstance;
use crate::pointset::PointSet;
use crate::ratio::Q;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest side dimension for dense node tables.
pub const MAX_PROTOCOL_N: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone)]
pub enum Node {
    Internal {
        speaker: Side,
        /// side inputs on which the spoken bit is 1
        table: PointSet,
        children: [Box<Node>; 2],
    },
    Leaf {
        /// clause index, or None for ⊥
        label: Option<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct Protocol {
    pub nx: u32,
    pub ny: u32,
    /// number of clause labels; leaf labels lie in [0, m)
    pub m: usize,
    pub root: Node,
}

/// A leaf together with its reachability rectangle.
#[derive(Debug, Clone)]
pub struct LeafRect {
    pub id: usize,
    pub label: Option<usize>,
    pub depth: u32,
    pub x: PointSet,
    pub y: PointSet,
}

impl Protocol {
    pub fn new(nx: u32, ny: u32, m: usize, root: Node) -> Result<Self> {
        if nx > MAX_PROTOCOL_N || ny > MAX_PROTOCOL_N {
            return Err(Error::Capacity(format!(
                "side dimensions {nx}/{ny} exceed the dense-table cap {MAX_PROTOCOL_N}"
            )));
        }
        let p = Protocol { nx, ny, m, root };
        p.validate_node(&p.root)?;
        Ok(p)
    }

    fn validate_node(&self, node: &Node) -> Result<()> {
        match node {
            Node::Leaf { label } => {
                if let Some(i) = label {
                    if *i >= self.m {
                        return Err(Error::IndexOutOfRange(format!(
                            "leaf label {i} outside [0, {})",
                            self.m
                        )));
                    }
                }
                Ok(())
            }
            Node::Internal { speaker, table, children } => {
                let want = match speaker {
                    Side::A => self.nx,
                    Side::B => self.ny,
                };
                if table.n() != want {
                    return Err(Error::InvalidConfig(format!(
                        "node table over {} inputs, speaker side has {want}",
                        table.n()
                    )));
                }
                self.validate_node(&children[0])?;
                self.validate_node(&children[1])
            }
        }
    }

    pub fn depth(&self) -> u32 {
        fn go(n: &Node) -> u32 {
            match n {
                Node::Leaf { .. } => 0,
                Node::Internal { children, .. } => 1 + go(&children[0]).max(go(&children[1])),
            }
        }
        go(&self.root)
    }

    pub fn leaf_count(&self) -> usize {
        fn go(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Internal { children, .. } => go(&children[0]) + go(&children[1]),
            }
        }
        go(&self.root)
    }

    /// Runs the protocol on a concrete input pair; returns the label and the
    /// transcript bits.
    pub fn execute(&self, x: u32, y: u32) -> (Option<usize>, Vec<bool>) {
        let mut node = &self.root;
        let mut transcript = Vec::new();
        loop {
            match node {
                Node::Leaf { label } => return (*label, transcript),
                Node::Internal { speaker, table, children } => {
                    let input = match speaker {
                        Side::A => x,
                        Side::B => y,
                    };
                    let bit = table.contains(input);
                    transcript.push(bit);
                    node = &children[bit as usize];
                }
            }
        }
    }

    /// All leaves with their rectangles, in DFS preorder (0-branch first).
    /// The rectangles tile {0,1}^nx × {0,1}^ny.
    pub fn leaves(&self) -> Vec<LeafRect> {
        let mut out = Vec::new();
        fn go(
            node: &Node,
            x: PointSet,
            y: PointSet,
            depth: u32,
            out: &mut Vec<LeafRect>,
        ) {
            match node {
                Node::Leaf { label } => {
                    let id = out.len();
                    out.push(LeafRect { id, label: *label, depth, x, y });
                }
                Node::Internal { speaker, table, children } => {
                    match speaker {
                        Side::A => {
                            let one = x.intersect(table);
                            let zero = x.difference(table);
                            go(&children[0], zero, y.clone(), depth + 1, out);
                            go(&children[1], one, y, depth + 1, out);
                        }
                        Side::B => {
                            let one = y.intersect(table);
                            let zero = y.difference(table);
                            go(&children[0], x.clone(), zero, depth + 1, out);
                            go(&children[1], x, one, depth + 1, out);
                        }
                    }
                }
            }
        }
        go(
            &self.root,
            PointSet::full(self.nx),
            PointSet::full(self.ny),
            0,
            &mut out,
        );
        out
    }
}

/// Pr over uniform (x, y) that the protocol outputs a clause falsified by
/// (x, y). Computed leaf by leaf from the rectangle factorization: within a
/// leaf labeled i the falsifying pairs are a product of two pattern fibers.
pub fn falsified_mass(p: &Protocol, inst: &BipartiteInstance) -> Result<Q> {
    if inst.m() != p.m || inst.n_right != p.nx || inst.n_right != p.ny {
        return Err(Error::InvalidConfig(
            "protocol shape does not match the instance".into(),
        ));
    }
    let mut num: i128 = 0;
    for leaf in p.leaves() {
        let Some(i) = leaf.label else { continue };
        let cx = leaf
            .x
            .count_matching(inst.g1.adj[i] as u32, inst.x_falsify[i] as u32);
        let cy = leaf
            .y
            .count_matching(inst.g2.adj[i] as u32, inst.y_falsify[i] as u32);
        num += cx as i128 * cy as i128;
    }
    Ok(Q::new(num, 1i128 << (p.nx + p.ny)))
}

/// 1 − falsified mass: the probability the protocol fails to name a falsified
/// clause (including ⊥ outputs and wrongly-named clauses).
pub fn search_error(p: &Protocol, inst: &BipartiteInstance) -> Result<Q> {
    Ok(Q::new(1, 1) - falsified_mass(p, inst)?)
}

/// Same mass by brute-force execution over every input pair; exact, for
/// cross-checking the factorized computation.
pub fn falsified_mass_exhaustive(p: &Protocol, inst: &BipartiteInstance) -> Result<Q> {
    if inst.m() != p.m {
        return Err(Error::InvalidConfig(
            "protocol shape does not match the instance".into(),
        ));
    }
    let mut num: i128 = 0;
    for x in 0..(1u64 << p.nx) {
        for y in 0..(1u64 << p.ny) {
            if let (Some(i), _) = p.execute(x as u32, y as u32) {
                if inst.falsified(i, x, y) {
                    num += 1;
                }
            }
        }
    }
    Ok(Q::new(num, 1i128 << (p.nx + p.ny)))
}

/// First clause of the instance falsified by (x, y), if any.
pub fn smallest_falsified(inst: &BipartiteInstance, x: u64, y: u64) -> Option<usize> {
    (0..inst.m()).find(|&i| inst.falsified(i, x, y))
}

/// The trivial optimal protocol: Alice announces x bit by bit, then Bob
/// announces the smallest falsified clause index (⌈log2(m+1)⌉ bits; value 0
/// encodes "none", mapped to ⊥). Depth nx + ⌈log2(m+1)⌉; its search error is
/// exactly the satisfying-pair mass of the instance.
pub fn baseline_protocol(inst: &BipartiteInstance) -> Result<Protocol> {
    let nx = inst.n_right;
    let ny = inst.n_right;
    if nx > MAX_PROTOCOL_N {
        return Err(Error::Capacity(format!(
            "baseline protocol needs 2^{nx} subtrees, over the cap"
        )));
    }
    let m = inst.m();
    // values 0..=m: 0 = none, i+1 = clause i
    let bits = (64 - (m as u64).leading_zeros()).max(1);

    // Bob's answer subtree for a fixed x: branch on bits of v(y), MSB first.
    fn bob_subtree(v: &[u64], ny: u32, bit: u32, acc: u64, m: usize) -> Node {
        if bit == 0 {
            let label = if acc == 0 || acc > m as u64 {
                None
            } else {
                Some(acc as usize - 1)
            };
            return Node::Leaf { label };
        }
        let k = bit - 1;
        let mut table = PointSet::empty(ny);
        for (y, &val) in v.iter().enumerate() {
            if (val >> k) & 1 == 1 {
                table.insert(y as u32);
            }
        }
        let zero = bob_subtree(v, ny, k, acc, m);
        let one = bob_subtree(v, ny, k, acc | (1 << k), m);
        Node::Internal {
            speaker: Side::B,
            table,
            children: [Box::new(zero), Box::new(one)],
        }
    }

    fn alice_subtree(inst: &BipartiteInstance, nx: u32, ny: u32, bits: u32, k: u32, x: u64) -> Node {
        if k == nx {
            let v: Vec<u64> = (0..(1u64 << ny))
                .map(|y| smallest_falsified(inst, x, y).map_or(0, |i| i as u64 + 1))
                .collect();
            return bob_subtree(&v, ny, bits, 0, inst.m());
        }
        let mut table = PointSet::empty(nx);
        for p in 0..(1u32 << nx) {
            if (p >> k) & 1 == 1 {
                table.insert(p);
            }
        }
        let zero = alice_subtree(inst, nx, ny, bits, k + 1, x);
        let one = alice_subtree(inst, nx, ny, bits, k + 1, x | (1 << k));
        Node::Internal {
            speaker: Side::A,
            table,
            children: [Box::new(zero), Box::new(one)],
        }
    }

    let root = alice_subtree(inst, nx, ny, bits, 0, 0);
    Protocol::new(nx, ny, m, root)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeFamily {
    /// query a uniformly random coordinate of the speaker's input
    Coordinate,
    /// parity of a uniformly random nonempty subset of coordinates
    Xor,
    /// an independent fair bit per input
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelRule {
    /// uniform over the m clauses and ⊥
    UniformRandom,
    /// the clause falsified on the largest fraction of the leaf rectangle,
    /// ⊥ when no clause is falsified anywhere in it
    Greedy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomProtocolConfig {
    pub depth: u32,
    pub family: NodeFamily,
    pub labels: LabelRule,
    pub seed: u64,
}

/// Samples a full binary protocol tree of the given depth with alternating
/// speakers (A at the root).
pub fn random_protocol(
    inst: &BipartiteInstance,
    cfg: &RandomProtocolConfig,
) -> Result<Protocol> {
    let n = inst.n_right;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    fn table(n: u32, family: NodeFamily, rng: &mut ChaCha8Rng) -> PointSet {
        match family {
            NodeFamily::Coordinate => {
                let c = rng.gen_range(0..n);
                PointSet::full(n).retain(|p| (p >> c) & 1 == 1)
            }
            NodeFamily::Xor => {
                let mask = rng.gen_range(1..(1u32 << n));
                let sign = rng.gen_range(0u8..2) == 1;
                PointSet::full(n).retain(|p| ((p & mask).count_ones() % 2 == 1) != sign)
            }
            NodeFamily::Random => {
                let mut t = PointSet::empty(n);
                for p in 0..(1u32 << n) {
                    if rng.gen_range(0u8..2) == 1 {
                        t.insert(p);
                    }
                }
                t
            }
        }
    }

    fn greedy_label(inst: &BipartiteInstance, x: &PointSet, y: &PointSet) -> Option<usize> {
        let mut best: Option<(u128, usize)> = None;
        for i in 0..inst.m() {
            let cx = x.count_matching(inst.g1.adj[i] as u32, inst.x_falsify[i] as u32);
            let cy = y.count_matching(inst.g2.adj[i] as u32, inst.y_falsify[i] as u32);
            let c = cx as u128 * cy as u128;
            if c > 0 && best.map_or(true, |(b, _)| c > b) {
                best = Some((c, i));
            }
        }
        best.map(|(_, i)| i)
    }

    fn go(
        inst: &BipartiteInstance,
        cfg: &RandomProtocolConfig,
        depth: u32,
        x: PointSet,
        y: PointSet,
        rng: &mut ChaCha8Rng,
    ) -> Node {
        if depth == cfg.depth {
            let label = match cfg.labels {
                LabelRule::UniformRandom => {
                    let v = rng.gen_range(0..=inst.m());
                    if v == inst.m() {
                        None
                    } else {
                        Some(v)
                    }
                }
                LabelRule::Greedy => greedy_label(inst, &x, &y),
            };
            return Node::Leaf { label };
        }
        let speaker = if depth % 2 == 0 { Side::A } else { Side::B };
        let n = inst.n_right;
        let t = table(n, cfg.family, rng);
        let (x0, x1, y0, y1) = match speaker {
            Side::A => (x.difference(&t), x.intersect(&t), y.clone(), y),
            Side::B => (x.clone(), x, y.difference(&t), y.intersect(&t)),
        };
        // recurse even into empty rectangles: the tree shape is input-independent
        let zero = go(inst, cfg, depth + 1, x0, y0, rng);
        let one = go(inst, cfg, depth + 1, x1, y1, rng);
        Node::Internal {
            speaker,
            table: t,
            children: [Box::new(zero), Box::new(one)],
        }
    }

    let root = go(
        inst,
        cfg,
        0,
        PointSet::full(n),
        PointSet::full(n),
        &mut rng,
    );
    Protocol::new(n, n, inst.m(), root)
}

// --- JSON codec ---

fn table_to_hex(t: &PointSet) -> String {
    // nibble-pack, low point first
    let mut s = String::new();
    let size = 1u32 << t.n();
    let mut i = 0;
    while i < size {
        let mut nib = 0u8;
        for b in 0..4 {
            if i + b < size && t.contains(i + b) {
                nib |= 1 << b;
            }
        }
        s.push(char::from_digit(nib as u32, 16).unwrap());
        i += 4;
    }
    s
}

fn table_from_hex(n: u32, s: &str) -> Result<PointSet> {
    let size = 1u32 << n;
    let want = size.div_ceil(4) as usize;
    if s.len() != want {
        return Err(Error::Parse(format!(
            "table of {} hex digits, expected {want}",
            s.len()
        )));
    }
    let mut t = PointSet::empty(n);
    for (k, c) in s.chars().enumerate() {
        let nib = c
            .to_digit(16)
            .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?}")))? as u8;
        for b in 0..4u32 {
            let p = k as u32 * 4 + b;
            if p < size && (nib >> b) & 1 == 1 {
                t.insert(p);
            }
        }
    }
    Ok(t)
}

fn node_to_json(n: &Node) -> serde_json::Value {
    match n {
        Node::Leaf { label } => match label {
            Some(i) => serde_json::json!({"label": i}),
            None => serde_json::json!({"label": "bot"}),
        },
        Node::Internal { speaker, table, children } => serde_json::json!({
            "speaker": match speaker { Side::A => "A", Side::B => "B" },
            "table": table_to_hex(table),
            "children": [node_to_json(&children[0]), node_to_json(&children[1])],
        }),
    }
}

pub fn protocol_to_json(p: &Protocol) -> serde_json::Value {
    serde_json::json!({
        "nx": p.nx,
        "ny": p.ny,
        "m": p.m,
        "root": node_to_json(&p.root),
    })
}

fn node_from_json(v: &serde_json::Value, nx: u32, ny: u32) -> Result<Node> {
    if let Some(label) = v.get("label") {
        if label == "bot" {
            return Ok(Node::Leaf { label: None });
        }
        let i = label
            .as_u64()
            .ok_or_else(|| Error::Parse(format!("bad leaf label {label}")))?;
        return Ok(Node::Leaf {
            label: Some(i as usize),
        });
    }
    let speaker = match v.get("speaker").and_then(|s| s.as_str()) {
        Some("A") => Side::A,
        Some("B") => Side::B,
        other => return Err(Error::Parse(format!("bad speaker {other:?}"))),
    };
    let hex = v
        .get("table")
        .and_then(|t| t.as_str())
        .ok_or_else(|| Error::Parse("missing node table".into()))?;
    let table = table_from_hex(if speaker == Side::A { nx } else { ny }, hex)?;
    let children = v
        .get("children")
        .and_then(|c| c.as_array())
        .filter(|c| c.len() == 2)
        .ok_or_else(|| Error::Parse("internal node needs exactly two children".into()))?;
    Ok(Node::Internal {
        speaker,
        table,
        children: [
            Box::new(node_from_json(&children[0], nx, ny)?),
            Box::new(node_from_json(&children[1], nx, ny)?),
        ],
    })
}

pub fn protocol_from_json(v: &serde_json::Value) -> Result<Protocol> {
    let nx = v.get("nx").and_then(|x| x.as_u64()).ok_or_else(|| Error::Parse("missing nx".into()))? as u32;
    let ny = v.get("ny").and_then(|x| x.as_u64()).ok_or_else(|| Error::Parse("missing ny".into()))? as u32;
    let m = v.get("m").and_then(|x| x.as_u64()).ok_or_else(|| Error::Parse("missing m".into()))? as usize;
    let root = node_from_json(
        v.get("root").ok_or_else(|| Error::Parse("missing root".into()))?,
        nx,
        ny,
    )?;
    Protocol::new(nx, ny, m, root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::Q64;
    use crate::cnf::{sample_cnf, SamplerConfig};
    use crate::partition::{bipartite_instance, random_partition, VarPartition};
    use crate::ratio::q_to_f64;

    fn small_instance(n: u32, delta: u32, m: usize, seed: u64) -> BipartiteInstance {
        for s in seed.. {
            let cnf = sample_cnf(&SamplerConfig {
                n,
                delta,
                m,
                density_alpha: None,
                seed: s,
                chvatal_szemeredi: false,
            })
            .unwrap();
            let part = random_partition(n as usize, s ^ 0x5a5a);
            if let Ok(inst) = bipartite_instance(&cnf, &part, Q64::new(1, 10)) {
                if inst.n_right <= 8 {
                    return inst;
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn baseline_finds_smallest_falsified_everywhere() {
        let inst = small_instance(10, 3, 12, 3);
        let p = baseline_protocol(&inst).unwrap();
        assert_eq!(
            p.depth(),
            inst.n_right + (64 - (inst.m() as u64).leading_zeros()).max(1)
        );
        for x in 0..(1u64 << p.nx) {
            for y in 0..(1u64 << p.ny) {
                let (label, _) = p.execute(x as u32, y as u32);
                assert_eq!(label, smallest_falsified(&inst, x, y));
            }
        }
    }

    #[test]
    fn baseline_error_is_satisfying_mass() {
        let inst = small_instance(10, 3, 12, 5);
        let p = baseline_protocol(&inst).unwrap();
        let err = search_error(&p, &inst).unwrap();
        let mut sat = 0i128;
        for x in 0..(1u64 << p.nx) {
            for y in 0..(1u64 << p.ny) {
                if smallest_falsified(&inst, x, y).is_none() {
                    sat += 1;
                }
            }
        }
        assert_eq!(err, Q::new(sat, 1i128 << (p.nx + p.ny)));
    }

    #[test]
    fn leaves_tile_the_domain() {
        let inst = small_instance(10, 3, 10, 11);
        let cfg = RandomProtocolConfig {
            depth: 5,
            family: NodeFamily::Random,
            labels: LabelRule::UniformRandom,
            seed: 4,
        };
        let p = random_protocol(&inst, &cfg).unwrap();
        let leaves = p.leaves();
        let total: u128 = leaves
            .iter()
            .map(|l| l.x.len() as u128 * l.y.len() as u128)
            .sum();
        assert_eq!(total, 1u128 << (p.nx + p.ny));
        // execution lands in the leaf whose rectangle contains the input
        for x in (0..(1u32 << p.nx)).step_by(7) {
            for y in (0..(1u32 << p.ny)).step_by(5) {
                let (label, transcript) = p.execute(x, y);
                let hits: Vec<&LeafRect> = leaves
                    .iter()
                    .filter(|l| l.x.contains(x) && l.y.contains(y))
                    .collect();
                assert_eq!(hits.len(), 1);
                assert_eq!(hits[0].label, label);
                assert_eq!(hits[0].depth as usize, transcript.len());
            }
        }
    }

    #[test]
    fn factorized_mass_equals_exhaustive() {
        for seed in 0..12u64 {
            let inst = small_instance(10, 3, 10, 40 + seed);
            for family in [NodeFamily::Coordinate, NodeFamily::Xor, NodeFamily::Random] {
                let cfg = RandomProtocolConfig {
                    depth: 4,
                    family,
                    labels: LabelRule::UniformRandom,
                    seed,
                };
                let p = random_protocol(&inst, &cfg).unwrap();
                assert_eq!(
                    falsified_mass(&p, &inst).unwrap(),
                    falsified_mass_exhaustive(&p, &inst).unwrap()
                );
            }
        }
    }

    #[test]
    fn greedy_labels_dominate_uniform() {
        let inst = small_instance(10, 3, 10, 60);
        let base = RandomProtocolConfig {
            depth: 4,
            family: NodeFamily::Coordinate,
            labels: LabelRule::UniformRandom,
            seed: 9,
        };
        let greedy = RandomProtocolConfig {
            labels: LabelRule::Greedy,
            ..base.clone()
        };
        let pu = random_protocol(&inst, &base).unwrap();
        let pg = random_protocol(&inst, &greedy).unwrap();
        assert!(falsified_mass(&pg, &inst).unwrap() >= falsified_mass(&pu, &inst).unwrap());
    }

    #[test]
    fn mass_and_error_are_complementary() {
        let inst = small_instance(10, 3, 10, 80);
        let p = baseline_protocol(&inst).unwrap();
        let fm = falsified_mass(&p, &inst).unwrap();
        let se = search_error(&p, &inst).unwrap();
        assert_eq!(fm + se, Q::new(1, 1));
        assert!(q_to_f64(&fm) >= 0.0 && q_to_f64(&fm) <= 1.0);
    }

    #[test]
    fn json_round_trip() {
        let inst = small_instance(10, 3, 8, 100);
        let cfg = RandomProtocolConfig {
            depth: 4,
            family: NodeFamily::Xor,
            labels: LabelRule::Greedy,
            seed: 2,
        };
        let p = random_protocol(&inst, &cfg).unwrap();
        let v = protocol_to_json(&p);
        let back = protocol_from_json(&v).unwrap();
        assert_eq!(back.depth(), p.depth());
        for x in 0..(1u32 << p.nx) {
            for y in 0..(1u32 << p.ny) {
                assert_eq!(p.execute(x, y).0, back.execute(x, y).0);
            }
        }
    }

    #[test]
    fn bad_labels_rejected() {
        assert!(matches!(
            Protocol::new(2, 2, 3, Node::Leaf { label: Some(3) }),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn constant_bot_protocol_has_full_error() {
        let inst = small_instance(10, 3, 10, 120);
        let p = Protocol::new(inst.n_right, inst.n_right, inst.m(), Node::Leaf { label: None }).unwrap();
        assert_eq!(falsified_mass(&p, &inst).unwrap(), Q::new(0, 1));
        assert_eq!(search_error(&p, &inst).unwrap(), Q::new(1, 1));
    }

    #[test]
    fn instance_with_empty_partition_side_still_works() {
        // degenerate: all variables on side A never yields an instance (every
        // clause errs), so use a lopsided but valid split
        let cnf = sample_cnf(&SamplerConfig {
            n: 8,
            delta: 2,
            m: 12,
            density_alpha: None,
            seed: 1,
            chvatal_szemeredi: false,
        })
        .unwrap();
        let part = VarPartition::from_a_set(8, &[0, 1, 2, 3, 4, 5]);
        if let Ok(inst) = bipartite_instance(&cnf, &part, Q64::new(1, 2)) {
            let p = baseline_protocol(&inst).unwrap();
            let fm = falsified_mass(&p, &inst).unwrap();
            assert_eq!(fm, falsified_mass_exhaustive(&p, &inst).unwrap());
        }
    }
}
