//! Dense subsets of the boolean cube {0,1}^n, stored as bitsets over point
//! indices. Coordinate j of a point is bit j of its index.

/// A subset of {0,1}^n. The hot operations are popcount-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    n: u32,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(n: u32) -> Self {
        assert!(n <= 24, "cube dimension {n} too large for dense sets");
        let size = 1usize << n;
        PointSet {
            n,
            words: vec![0; size.div_ceil(64)],
        }
    }

    pub fn full(n: u32) -> Self {
        let mut s = Self::empty(n);
        let size = 1usize << n;
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            if lo + 64 <= size {
                *w = u64::MAX;
            } else {
                *w = (1u64 << (size - lo)) - 1;
            }
        }
        s
    }

    pub fn from_points(n: u32, points: &[u32]) -> Self {
        let mut s = Self::empty(n);
        for &p in points {
            s.insert(p);
        }
        s
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn insert(&mut self, p: u32) {
        assert!((p as usize) < (1usize << self.n));
        self.words[(p / 64) as usize] |= 1u64 << (p % 64);
    }

    pub fn remove(&mut self, p: u32) {
        self.words[(p / 64) as usize] &= !(1u64 << (p % 64));
    }

    pub fn contains(&self, p: u32) -> bool {
        (self.words[(p / 64) as usize] >> (p % 64)) & 1 == 1
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.n, other.n);
        PointSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = (i * 64) as u32;
            BitIter { word: w, base }
        })
    }

    pub fn retain(&self, pred: impl Fn(u32) -> bool) -> Self {
        let mut out = Self::empty(self.n);
        for p in self.iter() {
            if pred(p) {
                out.insert(p);
            }
        }
        out
    }

    /// Splits the set by a bit function given as a table over all 2^n points.
    pub fn split_by_table(&self, table: &[u64]) -> (Self, Self) {
        let mut zero = Self::empty(self.n);
        let one_words: Vec<u64> = self
            .words
            .iter()
            .zip(table)
            .map(|(&s, &t)| s & t)
            .collect();
        for (i, w) in zero.words.iter_mut().enumerate() {
            *w = self.words[i] & !table[i];
        }
        (
            zero,
            PointSet {
                n: self.n,
                words: one_words,
            },
        )
    }

    /// Coordinates constant over the whole set, as (mask, values-on-mask).
    /// Panics on the empty set, where constancy is not meaningful.
    pub fn constant_coords(&self) -> (u32, u32) {
        assert!(!self.is_empty(), "constant_coords of empty set");
        let mut and_acc = u32::MAX;
        let mut or_acc = 0u32;
        for p in self.iter() {
            and_acc &= p;
            or_acc |= p;
        }
        let full = (1u32 << self.n) - 1;
        let constant = (!(and_acc ^ or_acc)) & full;
        (constant, and_acc & constant)
    }

    /// Number of points whose bits on `mask` equal `pattern & mask`.
    pub fn count_matching(&self, mask: u32, pattern: u32) -> u64 {
        self.iter().filter(|&p| p & mask == pattern & mask).count() as u64
    }
}

struct BitIter {
    word: u64,
    base: u32,
}

impl Iterator for BitIter {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros();
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

/// Lexicographic order on coordinate sets of equal cardinality: the set
/// containing the lowest index where the two differ comes first.
pub fn coord_set_lex_less(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    a & (diff & diff.wrapping_neg()) != 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_count() {
        let s = PointSet::full(5);
        assert_eq!(s.len(), 32);
        let e = PointSet::empty(5);
        assert!(e.is_empty());
        assert_eq!(s.difference(&e).len(), 32);
    }

    #[test]
    fn constant_coords_detects_fixed_bits() {
        // all points with coordinate 0 = 1 and coordinate 2 = 0
        let s = PointSet::from_points(3, &[0b001, 0b011]);
        let (mask, vals) = s.constant_coords();
        assert_eq!(mask, 0b101);
        assert_eq!(vals, 0b001);
    }

    #[test]
    fn split_by_coordinate_table() {
        // table = coordinate 1 of the point index
        let n = 3;
        let mut table = vec![0u64];
        for p in 0u32..8 {
            if (p >> 1) & 1 == 1 {
                table[0] |= 1 << p;
            }
        }
        let (zero, one) = PointSet::full(n).split_by_table(&table);
        assert_eq!(zero.len(), 4);
        assert_eq!(one.len(), 4);
        assert!(one.iter().all(|p| (p >> 1) & 1 == 1));
    }

    #[test]
    fn lex_order_on_equal_size_sets() {
        // {0,3} < {1,2}
        assert!(coord_set_lex_less(0b1001, 0b0110));
        // {0,2} < {0,3}
        assert!(coord_set_lex_less(0b0101, 0b1001));
        assert!(!coord_set_lex_less(0b11, 0b11));
    }
}
