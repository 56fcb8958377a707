//! Structure analysis of subsets of the cube: exact projection-count tables,
//! min-entropy and deficiency, γ-spread / structured checks with deterministic
//! witnesses, and the density-restoring partition.
//!
//! Spread thresholds are decided by exact integer comparisons: for γ = p/q the
//! condition count ≤ 2^{−γ|I|}·|X| becomes count^q · 2^{p|I|} ≤ |X|^q in u128.

use crate::bigraph::Q64;
use crate::pointset::{coord_set_lex_less, PointSet};
use crate::ratio::Q;
use crate::{Error, Result};

/// Largest table dimension: the keep/drop recursion costs Θ(3^n).
pub const MAX_TABLE_N: u32 = 16;

/// For every coordinate set I (as a mask), the largest fiber |{x ∈ X : x_I = a}|
/// over patterns a, together with the smallest maximizing pattern.
#[derive(Debug, Clone)]
pub struct ProjectionTable {
    n: u32,
    /// indexed by mask I
    pub max_count: Vec<u64>,
    /// smallest maximizing pattern, zero outside I
    pub argmax: Vec<u32>,
}

impl ProjectionTable {
    pub fn n(&self) -> u32 {
        self.n
    }
}

/// Scatters the low bits of `compressed` into the set positions of `mask`.
fn expand_pattern(compressed: u32, mask: u32) -> u32 {
    let mut out = 0u32;
    let mut src = compressed;
    let mut m = mask;
    while m != 0 {
        let bit = m & m.wrapping_neg();
        if src & 1 == 1 {
            out |= bit;
        }
        src >>= 1;
        m &= m - 1;
    }
    out
}

fn table_rec(
    k: u32,
    n: u32,
    kept: u32,
    kept_mask: u32,
    v: &[u64],
    max_count: &mut [u64],
    argmax: &mut [u32],
) {
    if k == n {
        let mut best = 0u64;
        let mut best_idx = 0usize;
        for (i, &c) in v.iter().enumerate() {
            if c > best {
                best = c;
                best_idx = i;
            }
        }
        max_count[kept_mask as usize] = best;
        argmax[kept_mask as usize] = expand_pattern(best_idx as u32, kept_mask);
        return;
    }
    // coordinate k currently sits at bit position `kept` of the index
    let bit = 1usize << kept;
    let mut dropped = Vec::with_capacity(v.len() / 2);
    for i in 0..v.len() {
        if i & bit == 0 {
            dropped.push(v[i] + v[i | bit]);
        }
    }
    table_rec(k + 1, n, kept, kept_mask, &dropped, max_count, argmax);
    table_rec(k + 1, n, kept + 1, kept_mask | (1 << k), v, max_count, argmax);
}

/// Builds the full projection-count table of X, all 2^n masks at once.
pub fn max_projection_counts(x: &PointSet) -> Result<ProjectionTable> {
    let n = x.n();
    if n > MAX_TABLE_N {
        return Err(Error::Capacity(format!(
            "projection table over {n} coordinates exceeds the 3^{MAX_TABLE_N} work cap"
        )));
    }
    let size = 1usize << n;
    let mut base = vec![0u64; size];
    for p in x.iter() {
        base[p as usize] = 1;
    }
    let mut max_count = vec![0u64; size];
    let mut argmax = vec![0u32; size];
    table_rec(0, n, 0, 0, &base, &mut max_count, &mut argmax);
    Ok(ProjectionTable { n, max_count, argmax })
}

/// H∞ of the uniform distribution on X, in bits.
pub fn min_entropy(x: &PointSet) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInstance);
    }
    Ok((x.len() as f64).log2())
}

/// H∞ of the projection of uniform-on-X onto the coordinates of `mask`.
pub fn projection_min_entropy(x: &PointSet, mask: u32) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let mut best = 0u64;
    for p in x.iter() {
        let c = x.count_matching(mask, p);
        best = best.max(c);
    }
    Ok((x.len() as f64).log2() - (best as f64).log2())
}

/// Deficiency n − |fixed| − H∞(x_{∖fixed}): the entropy missing from the free
/// coordinates of X (the fixed coordinates are the constant ones).
pub fn deficiency(x: &PointSet) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let (fix, _) = x.constant_coords();
    Ok(x.n() as f64 - fix.count_ones() as f64 - (x.len() as f64).log2())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadViolation {
    pub mask: u32,
    pub pattern: u32,
    pub count: u64,
}

fn parse_gamma(gamma: Q64) -> Result<(u32, u32)> {
    if gamma < Q64::new(0, 1) || gamma > Q64::new(1, 1) {
        return Err(Error::InvalidConfig(format!("γ = {gamma} outside [0, 1]")));
    }
    Ok((*gamma.numer() as u32, *gamma.denom() as u32))
}

fn pow_u128(base: u128, exp: u32) -> Result<u128> {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .ok_or_else(|| Error::Capacity("spread comparison overflows u128".into()))?;
    }
    Ok(acc)
}

/// count > 2^{−γ|I|}·total, decided exactly for γ = p/q.
fn violates(count: u64, set_size: u32, total: u64, p: u32, q: u32) -> Result<bool> {
    let lhs = pow_u128(count as u128, q)?;
    let shift = p * set_size;
    if shift >= 128 {
        return Err(Error::Capacity("spread comparison overflows u128".into()));
    }
    let lhs = lhs
        .checked_mul(1u128 << shift)
        .ok_or_else(|| Error::Capacity("spread comparison overflows u128".into()))?;
    Ok(lhs > pow_u128(total as u128, q)?)
}

/// Checks γ-spread of uniform-on-X over every nonempty I ⊆ `universe`:
/// Pr[x_I = a] ≤ 2^{−γ|I|} for all patterns a. Returns the deterministic
/// extremal violation — largest |I|, then lexicographically smallest I, then
/// smallest violating pattern — or None when spread holds.
pub fn spread_check(x: &PointSet, gamma: Q64, universe: u32) -> Result<Option<SpreadViolation>> {
    let (p, q) = parse_gamma(gamma)?;
    let total = x.len();
    if total == 0 {
        return Err(Error::EmptyInstance);
    }
    let table = max_projection_counts(x)?;
    let full = if x.n() == 32 { u32::MAX } else { (1u32 << x.n()) - 1 };
    let universe = universe & full;
    let mut best: Option<u32> = None;
    // enumerate nonempty submasks of the universe
    let mut i = universe;
    while i != 0 {
        if violates(table.max_count[i as usize], i.count_ones(), total, p, q)? {
            let better = match best {
                None => true,
                Some(b) => {
                    i.count_ones() > b.count_ones()
                        || (i.count_ones() == b.count_ones() && coord_set_lex_less(i, b))
                }
            };
            if better {
                best = Some(i);
            }
        }
        i = (i - 1) & universe;
    }
    let Some(mask) = best else {
        return Ok(None);
    };
    // smallest violating pattern on the chosen mask, by direct recount
    let mut counts = std::collections::BTreeMap::new();
    for pt in x.iter() {
        *counts.entry(pt & mask).or_insert(0u64) += 1;
    }
    for (pattern, count) in counts {
        if violates(count, mask.count_ones(), total, p, q)? {
            return Ok(Some(SpreadViolation { mask, pattern, count }));
        }
    }
    Err(Error::PostconditionFailed(
        "violating mask lost its violating pattern on recount".into(),
    ))
}

/// X is (I, γ)-structured: the coordinates of `fix_mask` are constant on X and
/// the remaining coordinates are γ-spread.
pub fn structured_check(x: &PointSet, fix_mask: u32, gamma: Q64) -> Result<bool> {
    if x.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let (constant, _) = x.constant_coords();
    if fix_mask & !constant != 0 {
        return Ok(false);
    }
    let full = (1u32 << x.n()) - 1;
    Ok(spread_check(x, gamma, full & !fix_mask)?.is_none())
}

/// One part of a density-restoring partition.
#[derive(Debug, Clone)]
pub struct DrpPart {
    /// 1-based step index j.
    pub index: usize,
    pub set: PointSet,
    pub fix_mask: u32,
    pub fix_vals: u32,
    /// Suffix mass p^{≥j} = |X^j ∪ X^{j+1} ∪ …| / |X|, exact.
    pub p_geq: Q,
}

impl DrpPart {
    /// Mass p_j = |X^j| / |X| of the part within the whole partition, given the
    /// original total.
    pub fn mass(&self, total: u64) -> Q {
        Q::new(self.set.len() as i128, total as i128)
    }
}

/// Density-restoring partition of X over the free coordinates in `universe`:
/// repeatedly peel the extremal spread violation (largest |I|, lex-smallest I,
/// smallest pattern) as a structured part until the remainder is spread.
/// `fix_mask`/`fix_vals` of a part cover the newly fixed coordinates only —
/// coordinates outside the universe (typically already fixed by the caller)
/// are never part of a witness. Every part X^j is spread on universe ∖ I^j and
/// satisfies the exact entropy inequality
/// H∞(x | X^j) ≥ H∞(x | X) − γ|I^j| − log2(1/p^{≥j});
/// both are re-verified before returning.
pub fn density_restoring_partition(
    x: &PointSet,
    gamma: Q64,
    universe: u32,
) -> Result<Vec<DrpPart>> {
    let (p, q) = parse_gamma(gamma)?;
    let total = x.len();
    if total == 0 {
        return Err(Error::EmptyInstance);
    }
    let full = (1u32 << x.n()) - 1;
    let universe = universe & full;
    let mut rem = x.clone();
    let mut parts = Vec::new();
    let mut j = 1usize;
    while !rem.is_empty() {
        let rem_len = rem.len();
        let p_geq = Q::new(rem_len as i128, total as i128);
        let part = match spread_check(&rem, gamma, universe)? {
            Some(v) => {
                let set = rem.retain(|pt| pt & v.mask == v.pattern);
                DrpPart {
                    index: j,
                    set,
                    fix_mask: v.mask,
                    fix_vals: v.pattern,
                    p_geq,
                }
            }
            None => {
                // the remainder itself is spread; its constant coordinates
                // within the universe (none, unless γ = 0) become the fix set
                let (constant, vals) = rem.constant_coords();
                DrpPart {
                    index: j,
                    set: rem.clone(),
                    fix_mask: constant & universe,
                    fix_vals: vals & universe,
                    p_geq,
                }
            }
        };
        // exact entropy inequality: |X^j|^q · 2^{p|I^j|} ≥ |rem|^q
        let lhs = pow_u128(part.set.len() as u128, q)?
            .checked_mul(1u128 << (p * part.fix_mask.count_ones()).min(127))
            .ok_or_else(|| Error::Capacity("entropy comparison overflows u128".into()))?;
        if lhs < pow_u128(rem_len as u128, q)? {
            return Err(Error::PostconditionFailed(format!(
                "entropy inequality failed at part {j}"
            )));
        }
        let (constant, vals) = part.set.constant_coords();
        let fixed_ok = constant & part.fix_mask == part.fix_mask
            && vals & part.fix_mask == part.fix_vals;
        if !fixed_ok || spread_check(&part.set, gamma, universe & !part.fix_mask)?.is_some() {
            return Err(Error::PostconditionFailed(format!(
                "part {j} is not structured after peeling"
            )));
        }
        rem = rem.difference(&part.set);
        parts.push(part);
        j += 1;
    }
    // the parts tile X
    let covered: u64 = parts.iter().map(|p| p.set.len()).sum();
    if covered != total {
        return Err(Error::PostconditionFailed(
            "partition does not tile the input set".into(),
        ));
    }
    Ok(parts)
}
