//! Boolean lattices over a ground set `{1, ..., d}`.
//!
//! A [`Subset`] is a bit pattern (element `i` lives at bit `i - 1`). An
//! [`Interval`] `[X, Y]` is the sublattice of all `S` with `X ⊆ S ⊆ Y`.
//! Dense tables over an interval are addressed by a *local index*: the bits
//! of `S \ X` compressed onto the free positions `Y \ X`. Local index order
//! coincides with ascending bit order, so every enumeration in this module is
//! deterministic and sorted.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ground set accepted unless the caller opts in to bigger tables.
pub const DEFAULT_MAX_DIM: usize = 20;
/// Absolute ceiling imposed by the bit width of [`Subset`].
pub const HARD_MAX_DIM: usize = 30;
/// Maximal chain enumeration is refused above this rank (10! chains).
pub const MAX_CHAIN_RANK: usize = 10;

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// `{1, ..., d}`.
    pub fn full(d: usize) -> Self {
        assert!(d <= HARD_MAX_DIM, "ground set too large: {d}");
        Subset(((1u64 << d) - 1) as u32)
    }

    /// Builds a subset from 1-based labels; duplicates are ignored.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut bits = 0u32;
        for e in elements {
            if e == 0 || e > HARD_MAX_DIM {
                return Err(Error::Argument(format!(
                    "element {e} outside 1..={HARD_MAX_DIM}"
                )));
            }
            bits |= 1 << (e - 1);
        }
        Ok(Subset(bits))
    }

    pub fn singleton(e: usize) -> Self {
        assert!((1..=HARD_MAX_DIM).contains(&e), "element {e} out of range");
        Subset(1 << (e - 1))
    }

    /// Sorted 1-based labels.
    pub fn elements(self) -> Vec<usize> {
        (0..32).filter(|i| self.0 >> i & 1 == 1).map(|i| i + 1).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        (1..=32).contains(&e) && self.0 >> (e - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Largest label present, or 0 for the empty set.
    pub fn max_element(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// Comma-joined labels, the key format used by set-function files.
    pub fn key(self) -> String {
        self.elements().iter().join(",")
    }

    pub fn parse_key(key: &str) -> Result<Self> {
        if key.trim().is_empty() {
            return Ok(Subset::EMPTY);
        }
        let elements = key
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad subset key {key:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Subset::from_elements(elements)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{{{}}}", self.key())
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<usize>::deserialize(d)?;
        Subset::from_elements(elements).map_err(serde::de::Error::custom)
    }
}

/// Ascending enumeration of all submasks of `mask`.
pub(crate) fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == mask {
            None
        } else {
            Some(current.wrapping_sub(mask) & mask)
        };
        Some(current)
    })
}

/// Scatters the low bits of `local` onto the set bits of `mask`.
pub(crate) fn deposit(local: u64, mut mask: u32) -> u32 {
    let mut out = 0u32;
    let mut bit = 0;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if local >> bit & 1 == 1 {
            out |= low;
        }
        mask ^= low;
        bit += 1;
    }
    out
}

/// Gathers the bits of `value` at the set positions of `mask` into the low bits.
pub(crate) fn extract(value: u32, mut mask: u32) -> usize {
    let mut out = 0usize;
    let mut bit = 0;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if value & low != 0 {
            out |= 1 << bit;
        }
        mask ^= low;
        bit += 1;
    }
    out
}

/// Ascending submasks of `mask` having exactly `size` bits (Gosper's hack in
/// local coordinates).
pub(crate) fn submasks_of_size(mask: u32, size: usize) -> impl Iterator<Item = u32> {
    let width = mask.count_ones() as usize;
    let mut next: Option<u64> = if size <= width {
        Some((1u64 << size) - 1)
    } else {
        None
    };
    std::iter::from_fn(move || {
        let local = next?;
        next = if local == 0 {
            None
        } else {
            let c = local & local.wrapping_neg();
            let r = local + c;
            let n = (((r ^ local) >> 2) / c) | r;
            (n < (1u64 << width)).then_some(n)
        };
        Some(deposit(local, mask))
    })
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// The Boolean lattice `[X, Y]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lower: Subset,
    upper: Subset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalInfo {
    pub rank: usize,
    pub size: u64,
    pub level_sizes: Vec<u64>,
}

impl Interval {
    pub fn new(lower: Subset, upper: Subset) -> Result<Self> {
        if !lower.is_subset_of(upper) {
            return Err(Error::InvalidInterval { lower, upper });
        }
        Ok(Interval { lower, upper })
    }

    /// `[∅, {1..d}]`.
    pub fn full(d: usize) -> Self {
        Interval {
            lower: Subset::EMPTY,
            upper: Subset::full(d),
        }
    }

    pub fn lower(&self) -> Subset {
        self.lower
    }

    pub fn upper(&self) -> Subset {
        self.upper
    }

    /// `Y \ X`.
    pub fn free(&self) -> Subset {
        self.upper.difference(self.lower)
    }

    pub fn rank(&self) -> usize {
        self.free().len()
    }

    pub fn size(&self) -> usize {
        1usize << self.rank()
    }

    /// True when the interval is `[∅, {1..d}]` for some `d`.
    pub fn is_full(&self) -> bool {
        self.lower.is_empty() && (self.upper.bits() & self.upper.bits().wrapping_add(1)) == 0
    }

    pub fn info(&self) -> IntervalInfo {
        let rank = self.rank();
        IntervalInfo {
            rank,
            size: 1u64 << rank,
            level_sizes: (0..=rank).map(|i| binomial(rank, i) as u64).collect(),
        }
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.lower.is_subset_of(s) && s.is_subset_of(self.upper)
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(other.lower) && self.contains(other.upper)
    }

    /// `r(S) = |S| - |X|`.
    pub fn rank_of(&self, s: Subset) -> usize {
        s.len() - self.lower.len()
    }

    pub fn index_of(&self, s: Subset) -> usize {
        debug_assert!(self.contains(s));
        extract(s.bits(), self.free().bits())
    }

    pub fn element_at(&self, index: usize) -> Subset {
        Subset(self.lower.bits() | deposit(index as u64, self.free().bits()))
    }

    /// All elements, ascending by bits.
    pub fn elements(&self) -> impl Iterator<Item = Subset> + '_ {
        let lower = self.lower.bits();
        submasks(self.free().bits()).map(move |m| Subset(lower | m))
    }

    /// Elements of level `i` (rank exactly `i`), ascending.
    pub fn level(&self, i: usize) -> impl Iterator<Item = Subset> + '_ {
        let lower = self.lower.bits();
        submasks_of_size(self.free().bits(), i).map(move |m| Subset(lower | m))
    }

    /// Every sub-interval `[S, T]` of rank `r`, ordered by `S` then `T`.
    pub fn intervals_of_rank(&self, r: usize) -> impl Iterator<Item = (Subset, Subset)> + '_ {
        let upper = self.upper;
        let in_range = r <= self.rank();
        self.elements()
            .filter(move |_| in_range)
            .flat_map(move |s| {
                let room = upper.difference(s).bits();
                submasks_of_size(room, r).map(move |t| (s, Subset(s.bits() | t)))
            })
    }

    /// Number of rank-`r` sub-intervals: `C(n, r) 2^(n - r)`.
    pub fn count_intervals_of_rank(&self, r: usize) -> u128 {
        let n = self.rank();
        if r > n {
            0
        } else {
            binomial(n, r) << (n - r)
        }
    }

    /// Saturated chains `X = S_0 ⋖ S_1 ⋖ ... ⋖ S_n = Y`, one per ordering of
    /// the free elements, in lexicographic order of those orderings.
    pub fn maximal_chains(&self) -> Result<impl Iterator<Item = Vec<Subset>>> {
        let rank = self.rank();
        if rank > MAX_CHAIN_RANK {
            let count = (1..=rank as u128).product();
            return Err(Error::ChainLimit {
                rank,
                count,
                limit: MAX_CHAIN_RANK,
            });
        }
        let lower = self.lower;
        let free = self.free().elements();
        Ok(free.into_iter().permutations(rank).map(move |order| {
            let mut chain = Vec::with_capacity(rank + 1);
            let mut current = lower;
            chain.push(current);
            for e in order {
                current = current.union(Subset::singleton(e));
                chain.push(current);
            }
            chain
        }))
    }

    /// Partition into `{[S, S ∪ T] : X ⊆ S ⊆ Y \ T}`, ascending by `S`.
    pub fn decompose_by(&self, t: Subset) -> Result<Vec<Interval>> {
        if !t.is_subset_of(self.free()) {
            return Err(Error::Argument(format!(
                "{t} is not a subset of the free elements {} of {self}",
                self.free()
            )));
        }
        let base = Interval {
            lower: self.lower,
            upper: self.upper.difference(t),
        };
        Ok(base
            .elements()
            .map(|s| Interval {
                lower: s,
                upper: s.union(t),
            })
            .collect())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    #[serde(rename = "X")]
    lower: Subset,
    #[serde(rename = "Y")]
    upper: Subset,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalJson {
            lower: self.lower,
            upper: self.upper,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = IntervalJson::deserialize(d)?;
        Interval::new(raw.lower, raw.upper).map_err(serde::de::Error::custom)
    }
}

/// Rejects ground sets above `limit`, or above the hard ceiling.
pub fn check_dimension(d: usize, limit: usize) -> Result<()> {
    let limit = limit.min(HARD_MAX_DIM);
    if d > limit {
        return Err(Error::DimensionLimit { d, limit });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(elements: &[usize]) -> Subset {
        Subset::from_elements(elements.iter().copied()).unwrap()
    }

    #[test]
    fn interval_info_examples() {
        let info = Interval::full(4).info();
        assert_eq!(info.rank, 4);
        assert_eq!(info.size, 16);
        assert_eq!(info.level_sizes, vec![1, 4, 6, 4, 1]);

        let x = set(&[2, 5]);
        let degenerate = Interval::new(x, x).unwrap().info();
        assert_eq!((degenerate.rank, degenerate.size), (0, 1));
        assert_eq!(degenerate.level_sizes, vec![1]);

        let i = Interval::new(set(&[1, 3]), set(&[1, 2, 3, 4, 5])).unwrap();
        assert_eq!((i.rank(), i.size()), (3, 8));
    }

    #[test]
    fn rejects_non_nested_bounds() {
        assert!(matches!(
            Interval::new(set(&[1, 2]), set(&[1, 3])),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn interval_enumeration_counts() {
        let i3 = Interval::full(3);
        let whole: Vec<_> = i3.intervals_of_rank(3).collect();
        assert_eq!(whole, vec![(Subset::EMPTY, Subset::full(3))]);
        assert_eq!(i3.intervals_of_rank(1).count(), 12);
        assert_eq!(Interval::full(4).intervals_of_rank(2).count(), 24);
        assert_eq!(i3.intervals_of_rank(4).count(), 0);
    }

    #[test]
    fn interval_enumeration_is_sorted_and_exact() {
        let i = Interval::new(set(&[2]), set(&[1, 2, 4, 6])).unwrap();
        for r in 0..=i.rank() {
            let pairs: Vec<_> = i.intervals_of_rank(r).collect();
            let mut sorted = pairs.clone();
            sorted.sort();
            assert_eq!(pairs, sorted);
            sorted.dedup();
            assert_eq!(sorted.len(), pairs.len());
            for (s, t) in &pairs {
                assert!(i.contains(*s) && i.contains(*t) && s.is_subset_of(*t));
                assert_eq!(t.len() - s.len(), r);
            }
            assert_eq!(pairs.len() as u128, i.count_intervals_of_rank(r));
        }
    }

    #[test]
    fn maximal_chain_examples() {
        let chains: Vec<_> = Interval::full(2).maximal_chains().unwrap().collect();
        assert_eq!(
            chains,
            vec![
                vec![Subset::EMPTY, set(&[1]), set(&[1, 2])],
                vec![Subset::EMPTY, set(&[2]), set(&[1, 2])],
            ]
        );
        let x = set(&[3]);
        let single: Vec<_> = Interval::new(x, x).unwrap().maximal_chains().unwrap().collect();
        assert_eq!(single, vec![vec![x]]);
        assert_eq!(Interval::full(4).maximal_chains().unwrap().count(), 24);
    }

    #[test]
    fn chain_guard_names_the_count() {
        let err = Interval::full(11).maximal_chains().err().unwrap();
        match err {
            Error::ChainLimit { rank, count, .. } => {
                assert_eq!(rank, 11);
                assert_eq!(count, 39_916_800);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn decompose_examples() {
        let i = Interval::full(4);
        let parts = i.decompose_by(set(&[3, 4])).unwrap();
        let expected: Vec<_> = [vec![], vec![1], vec![2], vec![1, 2]]
            .iter()
            .map(|s| {
                let s = set(s);
                Interval::new(s, s.union(set(&[3, 4]))).unwrap()
            })
            .collect();
        assert_eq!(parts, expected);

        assert_eq!(i.decompose_by(i.free()).unwrap(), vec![i]);
        let singletons = i.decompose_by(Subset::EMPTY).unwrap();
        assert_eq!(singletons.len(), 16);
        assert!(singletons.iter().all(|p| p.rank() == 0));

        let j = Interval::new(set(&[1]), set(&[1, 2, 3])).unwrap();
        assert!(j.decompose_by(set(&[1])).is_err());
    }

    #[test]
    fn local_index_round_trip() {
        let i = Interval::new(set(&[2, 7]), set(&[1, 2, 4, 7, 9])).unwrap();
        for (idx, s) in i.elements().enumerate() {
            assert_eq!(i.index_of(s), idx);
            assert_eq!(i.element_at(idx), s);
        }
    }

    #[test]
    fn subset_text_forms() {
        let s = set(&[5, 1, 4]);
        assert_eq!(s.key(), "1,4,5");
        assert_eq!(Subset::parse_key("1,4,5").unwrap(), s);
        assert_eq!(Subset::parse_key("").unwrap(), Subset::EMPTY);
        assert_eq!(s.to_string(), "{1,4,5}");
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,4,5]");
        let i = Interval::new(set(&[1]), s).unwrap();
        let text = serde_json::to_string(&i).unwrap();
        assert_eq!(text, r#"{"X":[1],"Y":[1,4,5]}"#);
        assert_eq!(serde_json::from_str::<Interval>(&text).unwrap(), i);
        assert!(serde_json::from_str::<Interval>(r#"{"X":[2],"Y":[1]}"#).is_err());
    }

    #[test]
    fn full_interval_detection() {
        assert!(Interval::full(5).is_full());
        assert!(Interval::full(0).is_full());
        assert!(!Interval::new(Subset::EMPTY, set(&[1, 3])).unwrap().is_full());
        assert!(!Interval::new(set(&[1]), set(&[1, 2])).unwrap().is_full());
    }
}
