//! Exact set functions on Boolean intervals.
//!
//! A [`SetFn`] stores one rational per element of its domain, in local-index
//! order. The pairing with the signed indicator of a sub-interval `[S, T]`
//! (the *alternating sum*) drives everything else here: membership in the
//! level spaces `Sf(k)`, the Möbius degree, and the witnesses reported when a
//! function falls outside a level.

mod conform;

pub use conform::{
    argmax_map, conformity_violation, in_cone, is_conforming, map_conformity_violation,
    pointwise_max, MAX_TUPLE,
};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Index;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{self, Interval, Subset, HARD_MAX_DIM};
use crate::linalg::RowSpace;
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct SetFn {
    domain: Interval,
    values: Vec<Rational>,
}

/// An interval `[S, T]` together with the nonzero alternating sum found there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalWitness {
    #[serde(rename = "S")]
    pub lower: Subset,
    #[serde(rename = "T")]
    pub upper: Subset,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

impl fmt::Display for IntervalWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<alpha[{}, {}], F> = {}",
            self.lower,
            self.upper,
            rational::format(&self.value)
        )
    }
}

/// Smallest `k` with `F ∈ Sf(k)`, and a failing interval of rank `k` when `k > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub k_min: usize,
    pub witness: Option<IntervalWitness>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Supports {
    pub support: Vec<Subset>,
    pub positive: Vec<Subset>,
    pub negative: Vec<Subset>,
}

/// Outcome of the low-support scan on a function in `Sf(k) ∩ HC`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowSupport {
    /// One of the sign supports is empty, nothing to find.
    OneSided,
    Found {
        low_positive: Subset,
        low_negative: Subset,
        high_positive: Subset,
        high_negative: Subset,
    },
    Missing(String),
}

const NONE: u32 = u32::MAX;

impl SetFn {
    pub fn new(domain: Interval, values: Vec<Rational>) -> Result<Self> {
        lattice::check_dimension(domain.rank(), HARD_MAX_DIM)?;
        if values.len() != domain.size() {
            return Err(Error::Argument(format!(
                "{} values supplied for a domain of size {}",
                values.len(),
                domain.size()
            )));
        }
        Ok(SetFn { domain, values })
    }

    pub fn from_fn(domain: Interval, mut f: impl FnMut(Subset) -> Rational) -> Self {
        assert!(domain.rank() <= HARD_MAX_DIM, "domain too large");
        let values = domain.elements().map(&mut f).collect();
        SetFn { domain, values }
    }

    pub fn zero(domain: Interval) -> Self {
        SetFn::constant(domain, rational::zero())
    }

    pub fn constant(domain: Interval, c: Rational) -> Self {
        SetFn {
            domain,
            values: vec![c; domain.size()],
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Values in local-index (ascending bit) order.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, s: Subset) -> Result<&Rational> {
        if !self.domain.contains(s) {
            return Err(Error::OutsideDomain(s.to_string(), self.domain));
        }
        Ok(&self.values[self.domain.index_of(s)])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, &Rational)> + '_ {
        self.domain.elements().zip(self.values.iter())
    }

    pub fn same_domain(&self, other: &SetFn) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(self.domain, other.domain));
        }
        Ok(())
    }

    fn zip_with(&self, other: &SetFn, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<SetFn> {
        self.same_domain(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(SetFn {
            domain: self.domain,
            values,
        })
    }

    pub fn checked_add(&self, other: &SetFn) -> Result<SetFn> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &SetFn) -> Result<SetFn> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> SetFn {
        SetFn {
            domain: self.domain,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn neg(&self) -> SetFn {
        SetFn {
            domain: self.domain,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// `F + c` pointwise.
    pub fn shift(&self, c: &Rational) -> SetFn {
        SetFn {
            domain: self.domain,
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    /// `F⁺ = max{0, F}`. Total: no conformity requirement.
    pub fn positive_part(&self) -> SetFn {
        SetFn {
            domain: self.domain,
            values: self
                .values
                .iter()
                .map(|v| if v.is_positive() { v.clone() } else { rational::zero() })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Sum over `Q` in the local interval `[s, t]` of `(-1)^|Q \ s| F(Q)`.
    fn alternating_sum_local(&self, s: usize, t: usize) -> Rational {
        let mut acc = rational::zero();
        for m in lattice::submasks((t ^ s) as u32) {
            let v = &self.values[s | m as usize];
            if m.count_ones() % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        acc
    }

    /// `<alpha_{S,T}, F> = Σ_{S ⊆ Q ⊆ T} (-1)^{|Q \ S|} F(Q)`.
    pub fn alternating_sum(&self, s: Subset, t: Subset) -> Result<Rational> {
        if !s.is_subset_of(t) {
            return Err(Error::Argument(format!("{s} is not a subset of {t}")));
        }
        for x in [s, t] {
            if !self.domain.contains(x) {
                return Err(Error::OutsideDomain(x.to_string(), self.domain));
            }
        }
        Ok(self.alternating_sum_local(self.domain.index_of(s), self.domain.index_of(t)))
    }

    /// First rank-`r` interval (in enumeration order) with a nonzero
    /// alternating sum. Parallel over the lower endpoint; the earliest lower
    /// endpoint wins, so the answer does not depend on scheduling.
    pub fn first_nonzero_of_rank(&self, r: usize) -> Option<IntervalWitness> {
        let n = self.domain.rank();
        if r > n {
            return None;
        }
        let full = ((1u64 << n) - 1) as u32;
        let scan = |s: usize| {
            let room = full & !(s as u32);
            lattice::submasks_of_size(room, r).find_map(|m| {
                let t = s | m as usize;
                let value = self.alternating_sum_local(s, t);
                (!value.is_zero()).then(|| IntervalWitness {
                    lower: self.domain.element_at(s),
                    upper: self.domain.element_at(t),
                    value,
                })
            })
        };
        if self.values.len() >= 1024 {
            (0..self.values.len()).into_par_iter().find_map_first(scan)
        } else {
            (0..self.values.len()).find_map(scan)
        }
    }

    /// Witness that `F ∉ Sf(k)`: a rank-`(k+1)` interval with nonzero sum.
    pub fn level_witness(&self, k: usize) -> Option<IntervalWitness> {
        self.first_nonzero_of_rank(k + 1)
    }

    /// `F ∈ Sf(k)`: every rank-`(k+1)` alternating sum vanishes.
    pub fn in_level_space(&self, k: usize) -> bool {
        self.level_witness(k).is_none()
    }

    /// Möbius coefficients relative to the bottom `X`, in local-index order:
    /// `m(U) = Σ_{V ⊆ U} (-1)^{|U \ V|} F(X ∪ V)`, so that `F(X ∪ U) = Σ_{V ⊆ U} m(V)`.
    pub fn mobius_coefficients(&self) -> Vec<Rational> {
        let mut m = self.values.clone();
        let n = self.domain.rank();
        for bit in 0..n {
            let step = 1usize << bit;
            for block in m.chunks_exact_mut(step * 2) {
                let (low, high) = block.split_at_mut(step);
                for (h, l) in high.iter_mut().zip(low.iter()) {
                    *h -= l;
                }
            }
        }
        m
    }

    /// Largest `|U|` with a nonzero Möbius coefficient (0 for constants).
    pub fn degree(&self) -> usize {
        self.mobius_coefficients()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(u, _)| u.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Smallest `k` with `F ∈ Sf(k)` plus a rank-`k` witness interval.
    ///
    /// The level is read off the Möbius degree; the witness is then located by
    /// the interval scan, which also confirms the level independently.
    pub fn min_level(&self) -> LevelReport {
        let k_min = self.degree();
        let witness = if k_min == 0 {
            None
        } else {
            let w = self.level_witness(k_min - 1);
            assert!(w.is_some(), "Möbius degree {k_min} without a witness interval");
            w
        };
        debug_assert!(self.in_level_space(k_min));
        LevelReport { k_min, witness }
    }

    pub fn supports(&self) -> Supports {
        let mut out = Supports::default();
        for (s, v) in self.iter() {
            if v.is_positive() {
                out.positive.push(s);
                out.support.push(s);
            } else if v.is_negative() {
                out.negative.push(s);
                out.support.push(s);
            }
        }
        out
    }

    /// A pair `S ⊆ T` with `F(S)`, `F(T)` of strictly opposite signs, if any.
    ///
    /// One sweep upward records, for every element, some element of its
    /// downset carrying a positive (resp. negative) value.
    pub fn hc_violation(&self) -> Option<(Subset, Subset)> {
        let n = self.domain.rank();
        let size = self.values.len();
        let mut pos_below = vec![NONE; size];
        let mut neg_below = vec![NONE; size];
        for v in 0..size {
            let value = &self.values[v];
            if value.is_positive() {
                pos_below[v] = v as u32;
            } else if value.is_negative() {
                neg_below[v] = v as u32;
            }
            for bit in 0..n {
                let u = v ^ (1 << bit);
                if u > v {
                    continue;
                }
                if pos_below[v] == NONE {
                    pos_below[v] = pos_below[u];
                }
                if neg_below[v] == NONE {
                    neg_below[v] = neg_below[u];
                }
            }
            let other = if value.is_negative() {
                pos_below[v]
            } else if value.is_positive() {
                neg_below[v]
            } else {
                NONE
            };
            if other != NONE {
                return Some((
                    self.domain.element_at(other as usize),
                    self.domain.element_at(v),
                ));
            }
        }
        None
    }

    /// No comparable pair carries strictly opposite signs.
    pub fn in_hc(&self) -> bool {
        self.hc_violation().is_none()
    }

    pub fn restrict(&self, interval: Interval) -> Result<SetFn> {
        if !self.domain.contains_interval(&interval) {
            return Err(Error::OutsideDomain(interval.to_string(), self.domain));
        }
        Ok(SetFn::from_fn(interval, |s| {
            self.values[self.domain.index_of(s)].clone()
        }))
    }

    /// Low-rank elements of both sign supports, for `F ∈ Sf(k) ∩ HC`.
    pub fn low_support(&self, k: usize) -> Result<LowSupport> {
        if !self.in_level_space(k) {
            return Err(Error::Precondition(format!("function is not in Sf({k})")));
        }
        if let Some((s, t)) = self.hc_violation() {
            return Err(Error::Precondition(format!(
                "function is not in HC: opposite signs at {s} ⊆ {t}"
            )));
        }
        let supports = self.supports();
        if supports.positive.is_empty() || supports.negative.is_empty() {
            return Ok(LowSupport::OneSided);
        }
        let n = self.domain.rank();
        let rank = |s: &Subset| self.domain.rank_of(*s);
        let low = |set: &[Subset]| set.iter().copied().find(|s| rank(s) <= k);
        let high = |set: &[Subset]| set.iter().copied().find(|s| rank(s) + k >= n);
        match (
            low(&supports.positive),
            low(&supports.negative),
            high(&supports.positive),
            high(&supports.negative),
        ) {
            (Some(lp), Some(ln), Some(hp), Some(hn)) => Ok(LowSupport::Found {
                low_positive: lp,
                low_negative: ln,
                high_positive: hp,
                high_negative: hn,
            }),
            found => Ok(LowSupport::Missing(format!(
                "rank bounds {k} / {} not met: {found:?}",
                n.saturating_sub(k)
            ))),
        }
    }

    /// True when the low-support elements exist (vacuously for one-sided functions).
    pub fn check_low_support(&self, k: usize) -> Result<bool> {
        Ok(!matches!(self.low_support(k)?, LowSupport::Missing(_)))
    }
}

impl Index<Subset> for SetFn {
    type Output = Rational;

    fn index(&self, s: Subset) -> &Rational {
        match self.value(s) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }
}

impl fmt::Debug for SetFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self
            .iter()
            .map(|(s, v)| format!("{s}: {}", rational::format(v)))
            .collect();
        write!(f, "SetFn{} {{{}}}", self.domain, entries.join(", "))
    }
}

/// Dimension of the span of the value vectors.
pub fn span_dimension(fns: &[SetFn]) -> Result<usize> {
    let Some(first) = fns.first() else {
        return Ok(0);
    };
    for f in fns {
        first.same_domain(f)?;
    }
    let mut space = RowSpace::new(first.domain.size());
    for f in fns {
        space.insert(f.values.clone());
        if space.rank() == space.width() {
            break;
        }
    }
    Ok(space.rank())
}

#[derive(Serialize, Deserialize)]
struct SetFnJson {
    interval: Interval,
    values: BTreeMap<String, String>,
}

impl Serialize for SetFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetFnJson {
            interval: self.domain,
            values: self
                .iter()
                .map(|(k, v)| (k.key(), rational::format(v)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SetFnJson::deserialize(d)?;
        let domain = raw.interval;
        lattice::check_dimension(domain.rank(), HARD_MAX_DIM).map_err(D::Error::custom)?;
        let mut values: Vec<Option<Rational>> = vec![None; domain.size()];
        for (key, text) in &raw.values {
            let s = Subset::parse_key(key).map_err(D::Error::custom)?;
            if !domain.contains(s) {
                return Err(D::Error::custom(format!("key {key:?} lies outside {domain}")));
            }
            let slot = &mut values[domain.index_of(s)];
            if slot.is_some() {
                return Err(D::Error::custom(format!("duplicate key for {s}")));
            }
            *slot = Some(rational::parse(text).map_err(D::Error::custom)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| D::Error::custom(format!("missing value for {}", domain.element_at(i))))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(SetFn { domain, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn set(elements: &[usize]) -> Subset {
        Subset::from_elements(elements.iter().copied()).unwrap()
    }

    /// `S ↦ 1` if `S` meets `M`, else 0.
    fn meets(d: usize, m: &[usize]) -> SetFn {
        let m = set(m);
        SetFn::from_fn(Interval::full(d), |s| int(s.intersects(m) as i64))
    }

    #[test]
    fn alternating_sum_examples() {
        let f = meets(3, &[1, 2, 3]);
        assert_eq!(f.alternating_sum(Subset::EMPTY, Subset::full(3)).unwrap(), int(-1));
        let c = SetFn::constant(Interval::full(3), ratio(5, 2));
        for (s, t) in Interval::full(3).intervals_of_rank(2) {
            assert!(c.alternating_sum(s, t).unwrap().is_zero());
        }
        assert!(f.alternating_sum(set(&[1]), set(&[2])).is_err());
        assert!(f.alternating_sum(Subset::EMPTY, set(&[4])).is_err());
    }

    #[test]
    fn level_space_examples() {
        for d in 3..=8 {
            let f = meets(d, &(1..=d).collect::<Vec<_>>());
            assert!(!f.in_level_space(d - 1), "d = {d}");
            assert!(f.in_level_space(d));
        }
        assert!(SetFn::zero(Interval::full(4)).in_level_space(0));
        let sigma = meets(5, &[2, 4]);
        assert!(sigma.in_level_space(2) && sigma.in_level_space(4));
        assert!(!sigma.in_level_space(1));
    }

    #[test]
    fn min_level_examples() {
        let report = meets(7, &[1, 2, 3, 4, 5, 6, 7]).min_level();
        assert_eq!(report.k_min, 7);
        assert_eq!(
            report.witness,
            Some(IntervalWitness {
                lower: Subset::EMPTY,
                upper: Subset::full(7),
                value: int(-1),
            })
        );
        let constant = SetFn::constant(Interval::full(4), int(3)).min_level();
        assert_eq!(constant, LevelReport { k_min: 0, witness: None });
    }

    #[test]
    fn supports_examples() {
        let f = meets(3, &[2]);
        let s = f.supports();
        assert_eq!(s.positive, vec![set(&[2]), set(&[1, 2]), set(&[2, 3]), set(&[1, 2, 3])]);
        assert!(s.negative.is_empty());
        assert_eq!(s.support, s.positive);
        assert_eq!(SetFn::zero(Interval::full(3)).supports(), Supports::default());
    }

    #[test]
    fn hc_examples() {
        assert!(meets(4, &[1, 3]).in_hc());
        let f = SetFn::from_fn(Interval::full(2), |s| {
            if s == set(&[1]) {
                int(1)
            } else if s == set(&[1, 2]) {
                int(-1)
            } else {
                int(0)
            }
        });
        assert_eq!(f.hc_violation(), Some((set(&[1]), set(&[1, 2]))));
        // negative below positive
        assert_eq!(f.neg().hc_violation(), Some((set(&[1]), set(&[1, 2]))));
    }

    #[test]
    fn restrict_examples() {
        let f = meets(4, &[1, 2]);
        assert_eq!(f.restrict(f.domain()).unwrap(), f);
        let sub = Interval::new(set(&[2]), set(&[1, 2, 3, 4])).unwrap();
        let r = f.restrict(sub).unwrap();
        assert!(r.values().iter().all(|v| *v == int(1)));
        let outside = Interval::new(set(&[5]), set(&[5])).unwrap();
        assert!(f.restrict(outside).is_err());
    }

    #[test]
    fn span_dimension_examples() {
        let d = 5;
        let singles: Vec<_> = (1..=d).map(|i| meets(d, &[i])).collect();
        assert_eq!(span_dimension(&singles).unwrap(), d);
        let mut doubled = singles.clone();
        doubled.extend(singles.iter().cloned());
        assert_eq!(span_dimension(&doubled).unwrap(), d);
        assert_eq!(span_dimension(&[]).unwrap(), 0);
        let other = SetFn::zero(Interval::full(4));
        assert!(span_dimension(&[singles[0].clone(), other]).is_err());
    }

    #[test]
    fn low_support_examples() {
        let d = 5;
        assert!(meets(d, &[1]).check_low_support(1).unwrap());
        let f = meets(d, &[1, 2]).checked_sub(&meets(d, &[3, 4])).unwrap();
        match f.low_support(2).unwrap() {
            LowSupport::Found {
                low_positive,
                low_negative,
                ..
            } => {
                assert!(low_positive.len() <= 2 && low_negative.len() <= 2);
                assert!(f[low_positive].is_positive() && f[low_negative].is_negative());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(f.low_support(1), Err(Error::Precondition(_))));
    }

    #[test]
    fn mobius_degree_matches_interval_scan() {
        let f = meets(6, &[1, 3, 5]);
        assert_eq!(f.degree(), 3);
        assert_eq!(f.min_level().k_min, 3);
        let g = meets(6, &[2]).checked_add(&meets(6, &[1, 4, 5, 6])).unwrap();
        assert_eq!(g.degree(), 4);
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let f = SetFn::from_fn(Interval::full(2), |s| ratio(s.bits() as i64, 2));
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"{"interval":{"X":[],"Y":[1,2]},"values":{"":"0","1":"1/2","1,2":"3/2","2":"1"}}"#
        );
        assert_eq!(serde_json::from_str::<SetFn>(&text).unwrap(), f);
        let missing = r#"{"interval":{"X":[],"Y":[1]},"values":{"":"0"}}"#;
        assert!(serde_json::from_str::<SetFn>(missing).is_err());
        let outside = r#"{"interval":{"X":[],"Y":[1]},"values":{"":"0","1":"1","2":"1"}}"#;
        assert!(serde_json::from_str::<SetFn>(outside).is_err());
    }
}
