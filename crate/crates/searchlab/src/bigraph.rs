//! Bipartite clause–variable incidence graphs, exact expansion certification
//! by subset enumeration, boundary and unique-neighbor decompositions, and the
//! random-graph expansion experiment.
//!
//! Left vertices are clauses (≤ 64, masks in u64), right vertices are
//! variables (≤ 64, masks in u64). |N(S)| is a popcount.

use crate::cnf::Cnf;
use crate::concentration::wilson_interval;
use crate::partition::VarPartition;
use crate::{Error, Result};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Rational over i64, for expansion factors and slacks.
pub type Q64 = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub m: usize,
    pub n: u32,
    pub delta: u32,
    /// adj[i] = bitmask of right neighbors of left vertex i.
    pub adj: Vec<u64>,
}

impl BipartiteGraph {
    pub fn new(m: usize, n: u32, delta: u32, adj: Vec<u64>) -> Result<Self> {
        if n > 64 {
            return Err(Error::Capacity(format!(
                "right side {n} exceeds the 64-variable mask width"
            )));
        }
        if m > 64 {
            return Err(Error::Capacity(format!(
                "left side {m} exceeds the 64-clause mask width"
            )));
        }
        if adj.len() != m {
            return Err(Error::InvalidConfig("adjacency length != m".into()));
        }
        let full = right_full_mask(n);
        for (i, &a) in adj.iter().enumerate() {
            if a & !full != 0 {
                return Err(Error::IndexOutOfRange(format!(
                    "left vertex {i} has neighbors outside [0, {n})"
                )));
            }
            if a.count_ones() > delta {
                return Err(Error::InvalidConfig(format!(
                    "left vertex {i} has degree {} > Δ = {delta}",
                    a.count_ones()
                )));
            }
        }
        Ok(BipartiteGraph { m, n, delta, adj })
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.adj[i].count_ones()
    }

    /// Graph with the given left vertices deleted (indices keep their meaning;
    /// deleted rows become isolated and are excluded from left-set iteration).
    pub fn remove_left(&self, removed: u64) -> BipartiteGraph {
        let mut g = self.clone();
        for i in 0..self.m {
            if removed >> i & 1 == 1 {
                g.adj[i] = 0;
            }
        }
        g
    }

    /// Graph with the given right vertices deleted from every adjacency.
    pub fn remove_right(&self, removed: u64) -> BipartiteGraph {
        let mut g = self.clone();
        for a in &mut g.adj {
            *a &= !removed;
        }
        g
    }

    pub fn to_json(&self) -> serde_json::Value {
        let adj: Vec<Vec<u32>> = self
            .adj
            .iter()
            .map(|&a| (0..self.n).filter(|&j| a >> j & 1 == 1).collect())
            .collect();
        serde_json::json!({"m": self.m, "n": self.n, "adj": adj})
    }
}

pub fn right_full_mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Union of adjacencies over the left set `s` (bitmask over [m]).
pub fn neighborhood(g: &BipartiteGraph, s: u64) -> u64 {
    let mut acc = 0u64;
    let mut rest = s;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        acc |= g.adj[i];
    }
    acc
}

/// Right vertices connected to exactly one vertex of `u`.
pub fn boundary(g: &BipartiteGraph, u: u64) -> u64 {
    let mut once = 0u64;
    let mut more = 0u64;
    let mut rest = u;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        more |= once & g.adj[i];
        once |= g.adj[i];
    }
    once & !more
}

/// Side incidence graphs G_A, G_B of a CNF under a variable partition. Right
/// vertices are indexed by position within the sorted side.
pub fn incidence_graphs(cnf: &Cnf, part: &VarPartition) -> Result<(BipartiteGraph, BipartiteGraph)> {
    if part.n() != cnf.n as usize {
        return Err(Error::InvalidPartition(format!(
            "partition over {} variables, CNF over {}",
            part.n(),
            cnf.n
        )));
    }
    let a_vars = part.a_vars();
    let b_vars = part.b_vars();
    let a_pos: std::collections::HashMap<u32, u32> = a_vars
        .iter()
        .enumerate()
        .map(|(k, &v)| (v as u32, k as u32))
        .collect();
    let b_pos: std::collections::HashMap<u32, u32> = b_vars
        .iter()
        .enumerate()
        .map(|(k, &v)| (v as u32, k as u32))
        .collect();
    let mut adj_a = vec![0u64; cnf.m()];
    let mut adj_b = vec![0u64; cnf.m()];
    for (i, c) in cnf.clauses.iter().enumerate() {
        for l in c {
            if let Some(&p) = a_pos.get(&l.var) {
                adj_a[i] |= 1 << p;
            } else if let Some(&p) = b_pos.get(&l.var) {
                adj_b[i] |= 1 << p;
            }
        }
    }
    let ga = BipartiteGraph::new(cnf.m(), a_vars.len() as u32, cnf.delta, adj_a)?;
    let gb = BipartiteGraph::new(cnf.m(), b_vars.len() as u32, cnf.delta, adj_b)?;
    Ok((ga, gb))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpanderParams {
    pub r: usize,
    pub delta: u32,
    /// expansion factor α ∈ (0, 1]; the requirement is |N(S)| ≥ αΔ|S|
    pub alpha: Q64,
    /// slack η for (1−η)Δ statements; informational unless used by the caller
    pub eta: Q64,
}

impl ExpanderParams {
    pub fn new(r: usize, delta: u32, alpha: Q64) -> Self {
        ExpanderParams {
            r,
            delta,
            alpha,
            eta: Q64::new(0, 1),
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.alpha <= Q64::new(0, 1) || self.alpha > Q64::new(1, 1) {
            return Err(Error::InvalidConfig(format!("α = {} outside (0, 1]", self.alpha)));
        }
        // r may exceed m: expansion then quantifies over every subset, and
        // enumeration caps at m
        let _ = m;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub is_expander: bool,
    /// Violating set and its neighborhood size, when not an expander.
    pub witness: Option<(Vec<usize>, u64)>,
    pub checked_sets: u64,
}

pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000_000;

/// Advances `idx` to the next k-combination of [0, n) in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exact expansion certification: enumerates every nonempty left set of size
/// ≤ r (increasing size, lexicographic within size) over the non-isolated
/// left vertices and returns the first witness, if any.
pub fn check_expansion(g: &BipartiteGraph, p: &ExpanderParams, cap: u128) -> Result<ExpansionReport> {
    p.validate(g.m)?;
    let live: Vec<usize> = (0..g.m).filter(|&i| g.adj[i] != 0).collect();
    let budget: u128 = (1..=p.r as u128).map(|s| binom(live.len() as u128, s)).sum();
    if budget > cap {
        return Err(Error::Capacity(format!(
            "{budget} candidate sets exceed the enumeration cap {cap}; use sampled mode"
        )));
    }
    let alpha_num = *p.alpha.numer() as i128;
    let alpha_den = *p.alpha.denom() as i128;
    let mut checked = 0u64;
    for size in 1..=p.r.min(live.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            checked += 1;
            let mask: u64 = idx.iter().map(|&k| 1u64 << live[k]).sum();
            let nb = neighborhood(g, mask).count_ones() as i128;
            // violation iff |N(S)| < αΔ|S|
            if nb * alpha_den < alpha_num * p.delta as i128 * size as i128 {
                return Ok(ExpansionReport {
                    is_expander: false,
                    witness: Some((
                        idx.iter().map(|&k| live[k]).collect(),
                        neighborhood(g, mask).count_ones() as u64,
                    )),
                    checked_sets: checked,
                });
            }
            if !next_combination(&mut idx, live.len()) {
                break;
            }
        }
    }
    Ok(ExpansionReport {
        is_expander: true,
        witness: None,
        checked_sets: checked,
    })
}

/// Greedy unique-neighbor decomposition: repeatedly peel a vertex i with
/// |∂U ∩ N(i)| ≥ (1−2η)Δ (smallest index first), assigning it N_i = ∂U ∩ N(i).
/// Returns None when no vertex qualifies at some step.
pub fn unique_neighbor_partition(
    g: &BipartiteGraph,
    u: u64,
    eta: Q64,
) -> Option<Vec<(usize, u64)>> {
    let mut remaining = u;
    let mut out = Vec::new();
    while remaining != 0 {
        let bd = boundary(g, remaining);
        // threshold (1−2η)Δ as a rational comparison
        let num = *eta.denom() - 2 * *eta.numer();
        let den = *eta.denom();
        let mut found = None;
        let mut rest = remaining;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let cnt = (bd & g.adj[i]).count_ones() as i64;
            if cnt * den >= num * g.delta as i64 {
                found = Some(i);
                break;
            }
        }
        let i = found?;
        out.push((i, bd & g.adj[i]));
        remaining &= !(1u64 << i);
    }
    Some(out)
}

/// Samples a left-Δ-regular graph: each left vertex picks Δ distinct right
/// neighbors uniformly at random.
pub fn random_left_regular(n: u32, delta: u32, m: usize, rng: &mut impl Rng) -> Result<BipartiteGraph> {
    if delta > n {
        return Err(Error::InvalidConfig(format!("Δ = {delta} > n = {n}")));
    }
    let mut pool: Vec<u32> = (0..n).collect();
    let mut adj = Vec::with_capacity(m);
    for _ in 0..m {
        let mut mask = 0u64;
        for k in 0..delta as usize {
            let j = k + rng.gen_range(0..n as usize - k);
            pool.swap(k, j);
            mask |= 1 << pool[k];
        }
        adj.push(mask);
    }
    BipartiteGraph::new(m, n, delta, adj)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionExperiment {
    pub trials: u64,
    pub certified: u64,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Fraction of random left-regular graphs certified as (r, Δ, αΔ)-expanders,
/// with a 95% Wilson interval. Per-trial seeds are seed ⊕ trial index.
pub fn expansion_rate_experiment(
    n: u32,
    delta: u32,
    m: usize,
    p: &ExpanderParams,
    trials: u64,
    seed: u64,
    cap: u128,
) -> Result<ExpansionExperiment> {
    let mut certified = 0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t);
        let g = random_left_regular(n, delta, m, &mut rng)?;
        if check_expansion(&g, p, cap)?.is_expander {
            certified += 1;
        }
    }
    let (lo, hi) = wilson_interval(certified, trials, 1.96);
    Ok(ExpansionExperiment {
        trials,
        certified,
        frequency: certified as f64 / trials as f64,
        wilson_low: lo,
        wilson_high: hi,
    })
}
