//! Random variable partitions, error-set extraction, δ-good partition
//! certification, and construction of the bipartite instance consumed by the
//! protocol pipeline.

use crate::bigraph::{check_expansion, incidence_graphs, BipartiteGraph, ExpanderParams, ExpansionReport, Q64};
use crate::cnf::{Assignment, Cnf};
use crate::ratio::{q_to_f64, Q};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A two-way split A ⊔ B = [n] of the variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarPartition {
    n: usize,
    in_a: Vec<u64>,
}

impl VarPartition {
    pub fn from_a_set(n: usize, a: &[usize]) -> Self {
        let mut in_a = vec![0u64; n.div_ceil(64)];
        for &v in a {
            assert!(v < n);
            in_a[v / 64] |= 1 << (v % 64);
        }
        VarPartition { n, in_a }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_a(&self, v: usize) -> bool {
        self.in_a[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn a_vars(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.is_a(v)).collect()
    }

    pub fn b_vars(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.is_a(v)).collect()
    }

    pub fn a_len(&self) -> usize {
        self.in_a.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Assigns each variable to A or B by an independent fair bit.
pub fn random_partition(n: usize, seed: u64) -> VarPartition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_a = vec![0u64; n.div_ceil(64)];
    for v in 0..n {
        if rng.gen_range(0u8..2) == 1 {
            in_a[v / 64] |= 1 << (v % 64);
        }
    }
    VarPartition { n, in_a }
}

/// Base-2 binary entropy, with H(0) = H(1) = 0 by continuity.
pub fn binary_entropy(p: Q64) -> Result<f64> {
    if p < Q64::new(0, 1) || p > Q64::new(1, 1) {
        return Err(Error::InvalidConfig(format!("entropy argument {p} outside [0, 1]")));
    }
    let pf = *p.numer() as f64 / *p.denom() as f64;
    if pf == 0.0 || pf == 1.0 {
        return Ok(0.0);
    }
    Ok(-pf * pf.log2() - (1.0 - pf) * (1.0 - pf).log2())
}

/// Clauses whose side degree exceeds (1−δ)Δ, on each side. Exact rational
/// threshold; a warning-free δ is ≤ 1/10.
pub fn error_sets(cnf: &Cnf, part: &VarPartition, delta: Q64) -> Result<(Vec<usize>, Vec<usize>)> {
    if delta < Q64::new(0, 1) || delta > Q64::new(1, 1) {
        return Err(Error::InvalidConfig(format!("δ = {delta} outside [0, 1]")));
    }
    let width = cnf.delta as i64;
    // deg > (1−δ)Δ  ⟺  deg·q > (q−p)·Δ
    let p = *delta.numer();
    let q = *delta.denom();
    let mut err_a = Vec::new();
    let mut err_b = Vec::new();
    for (i, c) in cnf.clauses.iter().enumerate() {
        let deg_a = c.iter().filter(|l| part.is_a(l.var as usize)).count() as i64;
        let deg_b = c.len() as i64 - deg_a;
        if deg_a * q > (q - p) * width {
            err_a.push(i);
        }
        if deg_b * q > (q - p) * width {
            err_b.push(i);
        }
    }
    Ok((err_a, err_b))
}

/// An exactly-computed or Monte-Carlo-estimated probability.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbEstimate {
    Exact { value: String, value_f64: f64 },
    Estimated { estimate: f64, trials: u64 },
}

impl ProbEstimate {
    pub fn exact(v: Q) -> Self {
        ProbEstimate::Exact {
            value: crate::ratio::q_to_string(&v),
            value_f64: q_to_f64(&v),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            ProbEstimate::Exact { value_f64, .. } => *value_f64,
            ProbEstimate::Estimated { estimate, .. } => *estimate,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ProbEstimate::Exact { .. })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GoodPartitionReport {
    pub delta: Q64,
    pub error_a: Vec<usize>,
    pub error_b: Vec<usize>,
    pub cond1_prob: ProbEstimate,
    pub cond2_prob: ProbEstimate,
    /// Instance-wise union-bound targets 1 − |Error|·2^{−(1−δ)Δ}.
    pub cond1_target: f64,
    pub cond2_target: f64,
    /// Advisory global target 1 − m·2^{−(1−δ)Δ}.
    pub advisory_target: f64,
    pub cond3_a: ExpansionReport,
    pub cond3_b: ExpansionReport,
    pub r_used: usize,
    pub cond1_pass: bool,
    pub cond2_pass: bool,
    pub cond3_pass: bool,
    pub all_pass: bool,
}

pub const DEFAULT_EXACT_COND_CAP: u32 = 20;

/// Pr over uniform side assignments that every error clause is already
/// satisfied by its side literals. Exact when the union of relevant side
/// variables is small, Monte-Carlo otherwise.
fn error_sat_probability(
    cnf: &Cnf,
    part: &VarPartition,
    errors: &[usize],
    on_a: bool,
    cap: u32,
    mc_trials: u64,
    seed: u64,
) -> ProbEstimate {
    if errors.is_empty() {
        return ProbEstimate::exact(Q::new(1, 1));
    }
    // side literals of each error clause, as (var, negated)
    let side_lits: Vec<Vec<(usize, bool)>> = errors
        .iter()
        .map(|&i| {
            cnf.clauses[i]
                .iter()
                .filter(|l| part.is_a(l.var as usize) == on_a)
                .map(|l| (l.var as usize, l.negated))
                .collect()
        })
        .collect();
    let mut relevant: Vec<usize> = side_lits.iter().flatten().map(|&(v, _)| v).collect();
    relevant.sort_unstable();
    relevant.dedup();
    let k = relevant.len() as u32;
    if k <= cap {
        // exhaust the sub-cube on the relevant variables only
        let pos: std::collections::HashMap<usize, u32> = relevant
            .iter()
            .enumerate()
            .map(|(p, &v)| (v, p as u32))
            .collect();
        let mut good = 0u64;
        for a in 0..(1u64 << k) {
            let all_sat = side_lits.iter().all(|lits| {
                lits.iter()
                    .any(|&(v, neg)| ((a >> pos[&v]) & 1 == 1) != neg)
            });
            if all_sat {
                good += 1;
            }
        }
        ProbEstimate::exact(Q::new(good as i128, 1i128 << k))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut good = 0u64;
        for _ in 0..mc_trials {
            let mut bits = std::collections::HashMap::new();
            for &v in &relevant {
                bits.insert(v, rng.gen_range(0u8..2) == 1);
            }
            let sat = side_lits
                .iter()
                .all(|lits| lits.iter().any(|&(v, neg)| bits[&v] != neg));
            if sat {
                good += 1;
            }
        }
        ProbEstimate::Estimated {
            estimate: good as f64 / mc_trials as f64,
            trials: mc_trials,
        }
    }
}

/// Certifies the three δ-good-partition conditions: error clauses almost
/// surely pre-satisfied on each side (exact sub-cube computation when
/// feasible), and both reduced side graphs (r, Δ, δΔ/2)-expanders.
pub fn check_good_partition(
    cnf: &Cnf,
    part: &VarPartition,
    delta: Q64,
    r: usize,
    mc_trials: u64,
    seed: u64,
) -> Result<GoodPartitionReport> {
    let (err_a, err_b) = error_sets(cnf, part, delta)?;
    let cond1 = error_sat_probability(cnf, part, &err_a, true, DEFAULT_EXACT_COND_CAP, mc_trials, seed);
    let cond2 = error_sat_probability(cnf, part, &err_b, false, DEFAULT_EXACT_COND_CAP, mc_trials, seed ^ 1);
    let deltaf = *delta.numer() as f64 / *delta.denom() as f64;
    let tail = 2f64.powf(-(1.0 - deltaf) * cnf.delta as f64);
    let cond1_target = (1.0 - err_a.len() as f64 * tail).max(0.0);
    let cond2_target = (1.0 - err_b.len() as f64 * tail).max(0.0);
    let advisory_target = 1.0 - cnf.m() as f64 * tail;

    let (ga, gb) = incidence_graphs(cnf, part)?;
    let mut removed = 0u64;
    for &i in err_a.iter().chain(&err_b) {
        removed |= 1 << i;
    }
    let ga_red = ga.remove_left(removed);
    let gb_red = gb.remove_left(removed);
    let alpha = delta / 2; // αΔ = δΔ/2
    let pa = ExpanderParams::new(r, cnf.delta, alpha);
    let pb = ExpanderParams::new(r, cnf.delta, alpha);
    let cond3_a = check_expansion(&ga_red, &pa, crate::bigraph::DEFAULT_ENUMERATION_CAP)?;
    let cond3_b = check_expansion(&gb_red, &pb, crate::bigraph::DEFAULT_ENUMERATION_CAP)?;

    let cond1_pass = cond1.value() >= cond1_target - 1e-12;
    let cond2_pass = cond2.value() >= cond2_target - 1e-12;
    let cond3_pass = cond3_a.is_expander && cond3_b.is_expander;
    Ok(GoodPartitionReport {
        delta,
        error_a: err_a,
        error_b: err_b,
        cond1_prob: cond1,
        cond2_prob: cond2,
        cond1_target,
        cond2_target,
        advisory_target,
        cond3_a,
        cond3_b,
        r_used: r,
        cond1_pass,
        cond2_pass,
        cond3_pass,
        all_pass: cond1_pass && cond2_pass && cond3_pass,
    })
}

/// The two-party falsified-clause instance: surviving clauses over two
/// side graphs with equal right sizes (dummy variables pad the smaller side),
/// plus per-side falsifying patterns.
#[derive(Debug, Clone)]
pub struct BipartiteInstance {
    pub g1: BipartiteGraph,
    pub g2: BipartiteGraph,
    /// Falsifying pattern on the X side: clause i is falsified by x iff
    /// x agrees with `x_falsify[i]` on `g1.adj[i]`.
    pub x_falsify: Vec<u64>,
    pub y_falsify: Vec<u64>,
    /// Surviving index → original clause index.
    pub clause_map: Vec<usize>,
    /// Common right size after padding.
    pub n_right: u32,
    pub a_vars: Vec<usize>,
    pub b_vars: Vec<usize>,
}

impl BipartiteInstance {
    pub fn m(&self) -> usize {
        self.clause_map.len()
    }

    /// True iff surviving clause i is falsified by side assignments (x, y)
    /// given as bit vectors over the padded right sides.
    pub fn falsified(&self, i: usize, x: u64, y: u64) -> bool {
        let ax = self.g1.adj[i];
        let ay = self.g2.adj[i];
        (x ^ self.x_falsify[i]) & ax == 0 && (y ^ self.y_falsify[i]) & ay == 0
    }
}

/// Builds the instance G_1 = G_A − Error_A − Error_B, G_2 likewise, with
/// dummy right vertices appended to the smaller side.
pub fn bipartite_instance(cnf: &Cnf, part: &VarPartition, delta: Q64) -> Result<BipartiteInstance> {
    let (err_a, err_b) = error_sets(cnf, part, delta)?;
    let mut bad = vec![false; cnf.m()];
    for &i in err_a.iter().chain(&err_b) {
        bad[i] = true;
    }
    let survivors: Vec<usize> = (0..cnf.m()).filter(|&i| !bad[i]).collect();
    if survivors.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let a_vars = part.a_vars();
    let b_vars = part.b_vars();
    let n_right = a_vars.len().max(b_vars.len()) as u32;
    let a_pos: std::collections::HashMap<usize, u32> = a_vars
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k as u32))
        .collect();
    let b_pos: std::collections::HashMap<usize, u32> = b_vars
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k as u32))
        .collect();
    let mut adj1 = Vec::new();
    let mut adj2 = Vec::new();
    let mut x_falsify = Vec::new();
    let mut y_falsify = Vec::new();
    for &i in &survivors {
        let mut a1 = 0u64;
        let mut a2 = 0u64;
        let mut f1 = 0u64;
        let mut f2 = 0u64;
        for l in &cnf.clauses[i] {
            if let Some(&p) = a_pos.get(&(l.var as usize)) {
                a1 |= 1 << p;
                if l.negated {
                    f1 |= 1 << p;
                }
            } else {
                let p = b_pos[&(l.var as usize)];
                a2 |= 1 << p;
                if l.negated {
                    f2 |= 1 << p;
                }
            }
        }
        adj1.push(a1);
        adj2.push(a2);
        x_falsify.push(f1);
        y_falsify.push(f2);
    }
    let g1 = BipartiteGraph::new(survivors.len(), n_right, cnf.delta, adj1)?;
    let g2 = BipartiteGraph::new(survivors.len(), n_right, cnf.delta, adj2)?;
    Ok(BipartiteInstance {
        g1,
        g2,
        x_falsify,
        y_falsify,
        clause_map: survivors,
        n_right,
        a_vars,
        b_vars,
    })
}

/// Side views of a full assignment, as bit vectors over the padded sides.
pub fn split_assignment(inst: &BipartiteInstance, full: &Assignment) -> (u64, u64) {
    let mut x = 0u64;
    for (k, &v) in inst.a_vars.iter().enumerate() {
        if full.get(v as u32) {
            x |= 1 << k;
        }
    }
    let mut y = 0u64;
    for (k, &v) in inst.b_vars.iter().enumerate() {
        if full.get(v as u32) {
            y |= 1 << k;
        }
    }
    (x, y)
}
