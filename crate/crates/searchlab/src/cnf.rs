//! CNF representation, random width-Δ sampling, clause evaluation, the
//! search oracle, and brute-force satisfiability at small n.

use crate::partition::VarPartition;
use crate::ratio::Q;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_BRUTE_FORCE_CAP: u32 = 24;

/// A signed literal: variable index in [0, n) plus polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lit {
    pub var: u32,
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: u32) -> Self {
        Lit {
            var,
            negated: false,
        }
    }
    pub fn neg(var: u32) -> Self {
        Lit { var, negated: true }
    }
}

/// A width-Δ CNF over n variables. Clause order is sampling order; clause
/// identity is the index in `clauses`. Variables within a clause are kept in
/// ascending order (canonical form; the ordering carries no semantics).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub n: u32,
    pub delta: u32,
    pub clauses: Vec<Vec<Lit>>,
    pub seed: Option<u64>,
}

impl Cnf {
    pub fn new(n: u32, delta: u32, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        let cnf = Cnf {
            n,
            delta,
            clauses,
            seed: None,
        };
        cnf.validate()?;
        Ok(cnf)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.clauses.iter().enumerate() {
            let mut vars: Vec<u32> = c.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() != c.len() {
                return Err(Error::InvalidConfig(format!(
                    "clause {i} repeats a variable"
                )));
            }
            if c.iter().any(|l| l.var >= self.n) {
                return Err(Error::IndexOutOfRange(format!(
                    "clause {i} references a variable outside [0, {})",
                    self.n
                )));
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Checks the width-Δ invariant (all clauses exactly `delta` wide).
    pub fn is_uniform_width(&self) -> bool {
        self.clauses.iter().all(|c| c.len() == self.delta as usize)
    }
}

/// A full assignment to n variables; bit j is the value of variable j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub n: u32,
    pub bits: u64,
}

impl Assignment {
    pub fn new(n: u32, bits: u64) -> Self {
        assert!(n <= 64);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Assignment {
            n,
            bits: bits & mask,
        }
    }

    pub fn get(&self, var: u32) -> bool {
        (self.bits >> var) & 1 == 1
    }
}

/// Configuration for sampling from 𝔉(m, n, Δ).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: u32,
    pub delta: u32,
    pub m: usize,
    /// Clause density α in m = α·2^Δ·n, recorded for reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_alpha: Option<Q>,
    pub seed: u64,
    /// When set, require m ≥ ⌈ln2 · 2^Δ · n⌉ (the unsatisfiability density).
    #[serde(default)]
    pub chvatal_szemeredi: bool,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.delta == 0 || self.delta > self.n {
            return Err(Error::InvalidConfig(format!(
                "clause width {} must be in [1, {}]",
                self.delta, self.n
            )));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be positive".into()));
        }
        if self.chvatal_szemeredi {
            let required = unsat_density_m(self.n, self.delta);
            if self.m < required {
                return Err(Error::InvalidConfig(format!(
                    "m = {} below the unsatisfiability density {}",
                    self.m, required
                )));
            }
        }
        Ok(())
    }
}

/// ⌈ln2 · 2^Δ · n⌉, the clause count above which random Δ-CNFs are
/// unsatisfiable with high probability.
pub fn unsat_density_m(n: u32, delta: u32) -> usize {
    (std::f64::consts::LN_2 * (1u64 << delta) as f64 * n as f64).ceil() as usize
}

/// Samples m clauses i.i.d. uniformly over the binom(n,Δ)·2^Δ width-Δ clauses.
/// Variable sets by Fisher–Yates prefix (uniform without replacement), signs by
/// fair bits; integer-only randomness, deterministic per seed.
pub fn sample_cnf(cfg: &SamplerConfig) -> Result<Cnf> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut clauses = Vec::with_capacity(cfg.m);
    let mut pool: Vec<u32> = (0..cfg.n).collect();
    for _ in 0..cfg.m {
        for k in 0..cfg.delta as usize {
            let j = k + rng.gen_range(0..cfg.n as usize - k);
            pool.swap(k, j);
        }
        let mut vars: Vec<u32> = pool[..cfg.delta as usize].to_vec();
        vars.sort_unstable();
        let clause = vars
            .into_iter()
            .map(|var| Lit {
                var,
                negated: rng.gen_range(0u8..2) == 1,
            })
            .collect();
        clauses.push(clause);
    }
    let mut cnf = Cnf::new(cfg.n, cfg.delta, clauses)?;
    cnf.seed = Some(cfg.seed);
    Ok(cnf)
}

/// 1 iff some literal of clause i is satisfied by `a`.
pub fn eval_clause(cnf: &Cnf, i: usize, a: &Assignment) -> Result<bool> {
    let clause = cnf
        .clauses
        .get(i)
        .ok_or_else(|| Error::IndexOutOfRange(format!("clause index {i} out of [0, {})", cnf.m())))?;
    Ok(clause.iter().any(|l| a.get(l.var) != l.negated))
}

/// Joins side assignments (indexed by position within the sorted side) into a
/// full assignment per the partition.
pub fn join_assignment(part: &VarPartition, x_on_a: &Assignment, y_on_b: &Assignment) -> Result<Assignment> {
    let a_vars = part.a_vars();
    let b_vars = part.b_vars();
    if x_on_a.n as usize != a_vars.len() || y_on_b.n as usize != b_vars.len() {
        return Err(Error::InvalidPartition(format!(
            "side assignments of lengths {}/{} do not match partition sides {}/{}",
            x_on_a.n,
            y_on_b.n,
            a_vars.len(),
            b_vars.len()
        )));
    }
    let mut bits = 0u64;
    for (k, &v) in a_vars.iter().enumerate() {
        if x_on_a.get(k as u32) {
            bits |= 1 << v;
        }
    }
    for (k, &v) in b_vars.iter().enumerate() {
        if y_on_b.get(k as u32) {
            bits |= 1 << v;
        }
    }
    Ok(Assignment::new(part.n() as u32, bits))
}

/// The Search oracle: exactly the clause indices falsified by (x, y).
/// Empty output signals a satisfying assignment.
pub fn search_oracle(
    cnf: &Cnf,
    part: &VarPartition,
    x_on_a: &Assignment,
    y_on_b: &Assignment,
) -> Result<Vec<usize>> {
    if part.n() != cnf.n as usize {
        return Err(Error::InvalidPartition(format!(
            "partition over {} variables does not cover [0, {})",
            part.n(),
            cnf.n
        )));
    }
    let a = join_assignment(part, x_on_a, y_on_b)?;
    let mut out = Vec::new();
    for i in 0..cnf.m() {
        if !eval_clause(cnf, i, &a)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Exhaustive unsatisfiability check. Errors when n exceeds `cap`.
pub fn is_unsatisfiable(cnf: &Cnf, cap: u32) -> Result<bool> {
    if cnf.n > cap {
        return Err(Error::Capacity(format!(
            "n = {} over the brute-force cap {cap}",
            cnf.n
        )));
    }
    // per-clause masks: satisfied iff a hits a positive var or misses a negative one
    let masks: Vec<(u64, u64)> = cnf
        .clauses
        .iter()
        .map(|c| {
            let mut pos = 0u64;
            let mut neg = 0u64;
            for l in c {
                if l.negated {
                    neg |= 1 << l.var;
                } else {
                    pos |= 1 << l.var;
                }
            }
            (pos, neg)
        })
        .collect();
    let total = 1u64 << cnf.n;
    'outer: for a in 0..total {
        for &(pos, neg) in &masks {
            // clause satisfied iff a hits a positive var or misses a negative one
            if a & pos == 0 && (!a) & neg == 0 {
                continue 'outer; // clause falsified, try next assignment
            }
        }
        return Ok(false); // all clauses satisfied
    }
    Ok(true)
}

/// Number of satisfying assignments, by exhaustive scan.
pub fn count_satisfying(cnf: &Cnf, cap: u32) -> Result<u64> {
    if cnf.n > cap {
        return Err(Error::Capacity(format!(
            "n = {} over the brute-force cap {cap}",
            cnf.n
        )));
    }
    let mut count = 0;
    for a in 0..(1u64 << cnf.n) {
        let asg = Assignment::new(cnf.n, a);
        let mut sat = true;
        for i in 0..cnf.m() {
            if !eval_clause(cnf, i, &asg)? {
                sat = false;
                break;
            }
        }
        if sat {
            count += 1;
        }
    }
    Ok(count)
}

// --- DIMACS codec ---

/// Canonical DIMACS form: header, then one clause per line with variables
/// ascending, terminated by 0.
pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.n, cnf.m());
    for c in &cnf.clauses {
        let mut sorted = c.clone();
        sorted.sort_by_key(|l| l.var);
        for l in sorted {
            let v = l.var as i64 + 1;
            out.push_str(&format!("{} ", if l.negated { -v } else { v }));
        }
        out.push_str("0\n");
    }
    out
}

/// Reads standard DIMACS CNF. With `strict`, every clause must have exactly
/// the header-implied width Δ (the width of the first clause).
pub fn read_dimacs(input: &str, strict: bool) -> Result<Cnf> {
    let mut n: Option<u32> = None;
    let mut m: Option<usize> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    for line in input.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::Parse(format!("malformed DIMACS header {line:?}")));
            }
            n = Some(
                parts[2]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad variable count in {line:?}")))?,
            );
            m = Some(
                parts[3]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad clause count in {line:?}")))?,
            );
            continue;
        }
        let n = n.ok_or_else(|| Error::Parse("clause before DIMACS header".into()))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                let var = lit.unsigned_abs() - 1;
                if var >= n as u64 {
                    return Err(Error::Parse(format!(
                        "literal {lit} out of range for {n} variables"
                    )));
                }
                current.push(Lit {
                    var: var as u32,
                    negated: lit < 0,
                });
            }
        }
    }
    if !current.is_empty() {
        return Err(Error::Parse("unterminated final clause".into()));
    }
    let n = n.ok_or_else(|| Error::Parse("missing DIMACS header".into()))?;
    if let Some(m) = m {
        if clauses.len() != m {
            return Err(Error::Parse(format!(
                "header promised {m} clauses, found {}",
                clauses.len()
            )));
        }
    }
    let delta = clauses.iter().map(|c| c.len()).max().unwrap_or(0) as u32;
    let cnf = Cnf::new(n, delta, clauses)?;
    if strict && !cnf.is_uniform_width() {
        return Err(Error::Parse(format!(
            "strict mode: clause widths are not uniformly {delta}"
        )));
    }
    Ok(cnf)
}

// --- JSON codec ---

#[derive(Serialize, Deserialize)]
struct CnfJson {
    n: u32,
    delta: u32,
    clauses: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<String>,
}

pub fn cnf_to_json(cnf: &Cnf) -> serde_json::Value {
    let clauses = cnf
        .clauses
        .iter()
        .map(|c| {
            c.iter()
                .map(|l| {
                    let v = l.var as i64 + 1;
                    if l.negated {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    serde_json::to_value(CnfJson {
        n: cnf.n,
        delta: cnf.delta,
        clauses,
        seed: cnf.seed.map(|s| s.to_string()),
    })
    .expect("cnf serializes")
}

pub fn cnf_from_json(v: &serde_json::Value) -> Result<Cnf> {
    let raw: CnfJson = serde_json::from_value(v.clone())?;
    let clauses = raw
        .clauses
        .iter()
        .map(|c| {
            c.iter()
                .map(|&lit| {
                    if lit == 0 || lit.unsigned_abs() > raw.n as u64 {
                        return Err(Error::Parse(format!("literal {lit} out of range")));
                    }
                    Ok(Lit {
                        var: (lit.unsigned_abs() - 1) as u32,
                        negated: lit < 0,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cnf = Cnf::new(raw.n, raw.delta, clauses)?;
    cnf.seed = raw
        .seed
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad seed {s:?}"))))
        .transpose()?;
    Ok(cnf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::VarPartition;

    fn cfg(n: u32, delta: u32, m: usize, seed: u64) -> SamplerConfig {
        SamplerConfig {
            n,
            delta,
            m,
            density_alpha: None,
            seed,
            chvatal_szemeredi: false,
        }
    }

    #[test]
    fn delta_equals_n_forces_variable_set() {
        let cnf = sample_cnf(&cfg(4, 4, 1, 9)).unwrap();
        let vars: Vec<u32> = cnf.clauses[0].iter().map(|l| l.var).collect();
        assert_eq!(vars, vec![0, 1, 2, 3]);
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_cnf(&cfg(10, 3, 50, 7)).unwrap();
        let b = sample_cnf(&cfg(10, 3, 50, 7)).unwrap();
        assert_eq!(a, b);
        let c = sample_cnf(&cfg(10, 3, 50, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampler_rejects_wide_clauses() {
        assert!(matches!(
            sample_cnf(&cfg(3, 4, 1, 0)),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn sampled_clauses_have_exact_width() {
        let cnf = sample_cnf(&cfg(12, 5, 300, 3)).unwrap();
        assert!(cnf.is_uniform_width());
        cnf.validate().unwrap();
    }

    #[test]
    fn variable_frequency_matches_sampler_law() {
        // each variable appears in a clause w.p. Δ/n = 3/10
        let m = 100_000;
        let cnf = sample_cnf(&cfg(10, 3, m, 42)).unwrap();
        let mut counts = [0u64; 10];
        for c in &cnf.clauses {
            for l in c {
                counts[l.var as usize] += 1;
            }
        }
        let p = 0.3;
        let sigma = ((m as f64) * p * (1.0 - p)).sqrt();
        for &cnt in &counts {
            assert!(
                (cnt as f64 - m as f64 * p).abs() <= 3.0 * sigma,
                "variable frequency {cnt} outside 3σ of {}",
                m as f64 * p
            );
        }
    }

    #[test]
    fn eval_clause_basics() {
        let cnf = Cnf::new(2, 2, vec![vec![Lit::pos(0), Lit::pos(1)]]).unwrap();
        assert!(!eval_clause(&cnf, 0, &Assignment::new(2, 0b00)).unwrap());
        assert!(eval_clause(&cnf, 0, &Assignment::new(2, 0b01)).unwrap());

        let cnf = Cnf::new(2, 2, vec![vec![Lit::pos(0), Lit::neg(1)]]).unwrap();
        assert!(!eval_clause(&cnf, 0, &Assignment::new(2, 0b10)).unwrap());
        assert!(eval_clause(&cnf, 0, &Assignment::new(2, 0b00)).unwrap());
        assert!(matches!(
            eval_clause(&cnf, 5, &Assignment::new(2, 0)),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn all_positive_clause_satisfied_by_ones() {
        let cnf = sample_cnf(&cfg(8, 3, 20, 5)).unwrap();
        let ones = Assignment::new(8, 0xff);
        for (i, c) in cnf.clauses.iter().enumerate() {
            if c.iter().all(|l| !l.negated) {
                assert!(eval_clause(&cnf, i, &ones).unwrap());
            }
        }
    }

    #[test]
    fn oracle_matches_per_clause_evaluation_exhaustively() {
        let cnf = sample_cnf(&cfg(6, 3, 40, 11)).unwrap();
        let part = VarPartition::from_a_set(6, &[0, 2, 4]);
        let a_len = 3u32;
        let b_len = 3u32;
        for xa in 0..(1u64 << a_len) {
            for yb in 0..(1u64 << b_len) {
                let x = Assignment::new(a_len, xa);
                let y = Assignment::new(b_len, yb);
                let found = search_oracle(&cnf, &part, &x, &y).unwrap();
                let full = join_assignment(&part, &x, &y).unwrap();
                let expect: Vec<usize> = (0..cnf.m())
                    .filter(|&i| !eval_clause(&cnf, i, &full).unwrap())
                    .collect();
                assert_eq!(found, expect);
            }
        }
    }

    #[test]
    fn oracle_simple_cases() {
        // φ = {(x1 ∨ y1)} with x1 = variable 0 on side A, y1 = variable 1 on side B
        let cnf = Cnf::new(2, 2, vec![vec![Lit::pos(0), Lit::pos(1)]]).unwrap();
        let part = VarPartition::from_a_set(2, &[0]);
        let falsified = search_oracle(
            &cnf,
            &part,
            &Assignment::new(1, 0),
            &Assignment::new(1, 0),
        )
        .unwrap();
        assert_eq!(falsified, vec![0]);
        let sat = search_oracle(
            &cnf,
            &part,
            &Assignment::new(1, 1),
            &Assignment::new(1, 0),
        )
        .unwrap();
        assert!(sat.is_empty());
    }

    #[test]
    fn unsat_detection() {
        let cnf = Cnf::new(1, 1, vec![vec![Lit::pos(0)], vec![Lit::neg(0)]]).unwrap();
        assert!(is_unsatisfiable(&cnf, 24).unwrap());
        let cnf = Cnf::new(2, 2, vec![vec![Lit::pos(0), Lit::pos(1)]]).unwrap();
        assert!(!is_unsatisfiable(&cnf, 24).unwrap());
        assert!(matches!(
            is_unsatisfiable(&Cnf::new(2, 1, vec![vec![Lit::pos(0)]]).unwrap(), 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn unsat_agrees_with_satisfying_count() {
        for seed in 0..20 {
            let cnf = sample_cnf(&cfg(8, 3, unsat_density_m(8, 3), seed)).unwrap();
            let unsat = is_unsatisfiable(&cnf, 24).unwrap();
            let sat_count = count_satisfying(&cnf, 24).unwrap();
            assert_eq!(unsat, sat_count == 0);
        }
    }

    #[test]
    fn high_density_random_cnfs_mostly_unsat() {
        // n=8, Δ=3, m=⌈ln2·2^3·8⌉=45: unsatisfiable in a majority of trials
        let m = unsat_density_m(8, 3);
        assert_eq!(m, 45);
        let unsat = (0..100)
            .filter(|&seed| is_unsatisfiable(&sample_cnf(&cfg(8, 3, m, seed)).unwrap(), 24).unwrap())
            .count();
        assert!(unsat > 50, "only {unsat}/100 unsatisfiable");
    }

    #[test]
    fn dimacs_reads_simple_formula() {
        let cnf = read_dimacs("p cnf 2 1\n1 -2 0\n", false).unwrap();
        assert_eq!(cnf.n, 2);
        assert_eq!(cnf.clauses, vec![vec![Lit::pos(0), Lit::neg(1)]]);
    }

    #[test]
    fn dimacs_round_trip_is_byte_stable() {
        let cnf = sample_cnf(&cfg(10, 4, 30, 13)).unwrap();
        let text = write_dimacs(&cnf);
        let back = read_dimacs(&text, true).unwrap();
        assert_eq!(write_dimacs(&back), text);
    }

    #[test]
    fn dimacs_literal_range_error() {
        assert!(matches!(
            read_dimacs("p cnf 2 1\n3 0\n", false),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let cnf = sample_cnf(&cfg(9, 3, 12, 21)).unwrap();
        let v = cnf_to_json(&cnf);
        let back = cnf_from_json(&v).unwrap();
        assert_eq!(back, cnf);
    }
}
