//! Braid-fan compatible CPWL functions and their set-function images.
//!
//! A [`PwlExpr`] is `c + Σ λ_M σ_M` with `σ_M(x) = max_{i ∈ M} x_i`. The map
//! [`phi`] evaluates it on indicator vectors, `F(S) = f(𝟙_S)`; [`phi_inverse`]
//! recovers the coefficients by Möbius inversion and [`evaluate_setfn`]
//! interpolates a set function back to arbitrary points, cone by cone.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{self, Interval, Subset, HARD_MAX_DIM};
use crate::rational::{self, Rational};
use crate::setfn::SetFn;

#[derive(Clone, PartialEq, Eq)]
pub struct PwlExpr {
    d: usize,
    constant: Rational,
    terms: BTreeMap<Subset, Rational>,
}

impl PwlExpr {
    /// The zero function on `R^d`.
    pub fn zero(d: usize) -> Result<Self> {
        lattice::check_dimension(d, HARD_MAX_DIM)?;
        Ok(PwlExpr {
            d,
            constant: rational::zero(),
            terms: BTreeMap::new(),
        })
    }

    pub fn constant_fn(d: usize, c: Rational) -> Result<Self> {
        let mut f = PwlExpr::zero(d)?;
        f.constant = c;
        Ok(f)
    }

    /// `σ_M` on `R^d`.
    pub fn sigma(d: usize, m: Subset) -> Result<Self> {
        let mut f = PwlExpr::zero(d)?;
        f.add_term(m, rational::one())?;
        Ok(f)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn set_constant(&mut self, c: Rational) {
        self.constant = c;
    }

    /// Nonzero coefficients, ascending by subset bits.
    pub fn terms(&self) -> impl Iterator<Item = (Subset, &Rational)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, m: Subset) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(rational::zero)
    }

    /// Adds `c·σ_M`; `M` must be a nonempty subset of `{1..d}`.
    pub fn add_term(&mut self, m: Subset, c: Rational) -> Result<()> {
        if m.is_empty() {
            return Err(Error::Argument("σ_∅ is not a basis function; use the constant".into()));
        }
        if !m.is_subset_of(Subset::full(self.d)) {
            return Err(Error::Argument(format!("{m} is not a subset of [{}]", self.d)));
        }
        let slot = self.terms.entry(m).or_insert_with(rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
        Ok(())
    }

    fn same_d(&self, other: &PwlExpr) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Argument(format!(
                "dimension mismatch: {} vs {}",
                self.d, other.d
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PwlExpr) -> Result<PwlExpr> {
        self.same_d(other)?;
        let mut out = self.clone();
        out.constant += &other.constant;
        for (m, c) in other.terms() {
            out.add_term(m, c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &PwlExpr) -> Result<PwlExpr> {
        self.checked_add(&other.scale(&-rational::one()))
    }

    pub fn scale(&self, a: &Rational) -> PwlExpr {
        if a.is_zero() {
            return PwlExpr {
                d: self.d,
                constant: rational::zero(),
                terms: BTreeMap::new(),
            };
        }
        PwlExpr {
            d: self.d,
            constant: &self.constant * a,
            terms: self.terms.iter().map(|(m, c)| (*m, c * a)).collect(),
        }
    }

    /// `Σ λ_M`: the rate of change along `𝟙`, i.e. `f(x + t𝟙) = f(x) + t·slope`.
    pub fn slope(&self) -> Rational {
        self.terms.values().sum()
    }

    /// Largest `|M|` among the terms (0 for constants).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for PwlExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() || self.terms.is_empty() {
            parts.push(rational::format(&self.constant));
        }
        for (m, c) in &self.terms {
            parts.push(format!("{}·σ{}", rational::format(c), m));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for PwlExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PwlExpr[d={}]({self})", self.d)
    }
}

/// In-place subset sums over a table of length `2^n`: `t[U] ← Σ_{V ⊆ U} t[V]`.
fn zeta(table: &mut [Rational]) {
    let mut step = 1;
    while step < table.len() {
        for block in table.chunks_exact_mut(step * 2) {
            let (low, high) = block.split_at_mut(step);
            for (h, l) in high.iter_mut().zip(low.iter()) {
                *h += l;
            }
        }
        step *= 2;
    }
}

/// Inverse of [`zeta`].
fn mobius(table: &mut [Rational]) {
    let mut step = 1;
    while step < table.len() {
        for block in table.chunks_exact_mut(step * 2) {
            let (low, high) = block.split_at_mut(step);
            for (h, l) in high.iter_mut().zip(low.iter()) {
                *h -= l;
            }
        }
        step *= 2;
    }
}

/// `Φ(f)(S) = f(𝟙_S) = c + Σ_{M ∩ S ≠ ∅} λ_M` on `[∅, [d]]`, in `O(d 2^d)`.
///
/// With `G(U) = Σ_{M ⊆ U} λ_M`, the sum over `M` meeting `S` is the total
/// minus `G([d] \ S)`.
pub fn phi(f: &PwlExpr) -> SetFn {
    let size = 1usize << f.d;
    let mut g = vec![rational::zero(); size];
    for (m, c) in f.terms() {
        g[m.bits() as usize] = c.clone();
    }
    zeta(&mut g);
    let full = size - 1;
    let total = &f.constant + &g[full];
    let values = (0..size).map(|s| &total - &g[full ^ s]).collect();
    SetFn::new(Interval::full(f.d), values).expect("table sized to the domain")
}

/// Direct evaluation of `Φ(f)`, term by term; the reference for [`phi`].
pub fn phi_naive(f: &PwlExpr) -> SetFn {
    SetFn::from_fn(Interval::full(f.d), |s| {
        let mut acc = f.constant.clone();
        for (m, c) in f.terms() {
            if m.intersects(s) {
                acc += c;
            }
        }
        acc
    })
}

fn full_dimension(f: &SetFn) -> Result<usize> {
    let domain = f.domain();
    if !domain.is_full() {
        return Err(Error::Argument(format!(
            "expected a set function on [∅, [d]], got domain {domain}"
        )));
    }
    Ok(domain.rank())
}

/// Möbius inversion: constant `F(∅)` and `λ_M = -<α_{[d] \ M, [d]}, F>` for `M ≠ ∅`.
pub fn phi_inverse(f: &SetFn) -> Result<PwlExpr> {
    let d = full_dimension(f)?;
    let size = 1usize << d;
    let full = size - 1;
    // H(V) = F([d] \ V); then λ_M = -Σ_{V ⊆ M} (-1)^{|M \ V|} H(V).
    let mut h: Vec<Rational> = (0..size).map(|v| f.values()[full ^ v].clone()).collect();
    mobius(&mut h);
    let mut out = PwlExpr::constant_fn(d, f.values()[0].clone())?;
    for (m, c) in h.into_iter().enumerate().skip(1) {
        if !c.is_zero() {
            out.terms.insert(Subset::from_bits(m as u32), -c);
        }
    }
    Ok(out)
}

/// A point of `Q^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint(pub Vec<Rational>);

impl RationalPoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    /// Comma-separated coordinates, e.g. `"1,-2/3,0"`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(RationalPoint(Vec::new()));
        }
        text.split(',')
            .map(rational::parse)
            .collect::<Result<Vec<_>>>()
            .map(RationalPoint)
    }

    /// Indicator vector `𝟙_S` in `Q^d`.
    pub fn indicator(d: usize, s: Subset) -> Self {
        RationalPoint(
            (1..=d)
                .map(|i| if s.contains(i) { rational::one() } else { rational::zero() })
                .collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    #[serde(with = "rational::serde_str_vec")]
    x: Vec<Rational>,
}

impl Serialize for RationalPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointJson { x: self.0.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(RationalPoint(PointJson::deserialize(d)?.x))
    }
}

fn check_point(d: usize, x: &RationalPoint) -> Result<()> {
    if x.dim() != d {
        return Err(Error::Argument(format!(
            "point has {} coordinates, expected {d}",
            x.dim()
        )));
    }
    Ok(())
}

/// `c + Σ λ_M max_{i ∈ M} x_i`.
pub fn eval_direct(f: &PwlExpr, x: &RationalPoint) -> Result<Rational> {
    check_point(f.d, x)?;
    let mut acc = f.constant.clone();
    for (m, c) in f.terms() {
        let best = m
            .elements()
            .into_iter()
            .map(|i| &x.0[i - 1])
            .max()
            .expect("terms are nonempty");
        acc += c * best;
    }
    Ok(acc)
}

/// Evaluates `Φ^{-1}(F)` at `x` by interpolating along the chain of the cone
/// containing `x`. Coordinates are sorted descending, ties by ascending label.
pub fn evaluate_setfn(f: &SetFn, x: &RationalPoint) -> Result<Rational> {
    let d = full_dimension(f)?;
    check_point(d, x)?;
    let values = f.values();
    let base = &values[0];
    if d == 0 {
        return Ok(base.clone());
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| x.0[b].cmp(&x.0[a]).then(a.cmp(&b)));
    let mut acc = base.clone();
    let mut prefix = 0usize;
    for (pos, &j) in order.iter().enumerate() {
        prefix |= 1 << j;
        let gap = match order.get(pos + 1) {
            Some(&next) => &x.0[j] - &x.0[next],
            None => x.0[j].clone(),
        };
        if !gap.is_zero() {
            acc += gap * (&values[prefix] - base);
        }
    }
    Ok(acc)
}

/// Passing between the braid fan on `R^d` and the fan `B⁰_{d-1}` (the braid
/// fan on `R^{d-1}` refined by the coordinate hyperplanes).
///
/// A `B⁰_{d-1}` function `p` is stored as a `d`-dimensional expression read
/// with the last coordinate pinned to zero, `y ↦ p(y, 0)`; its `σ_{d}` term
/// vanishes there and is dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanChange {
    /// `f ↦ f ∘ g`, `g(y) = (y, 0)`.
    Project,
    /// `p ↦ p ∘ h + slope·σ_{d}`, `h(x) = (x_1 - x_d, ..., x_{d-1} - x_d)`.
    /// A slope of one turns `max{0, y_1, ..., y_{d-1}}` into `max{x_1, ..., x_d}`.
    Embed { slope: Rational },
}

pub fn change_fan(f: &PwlExpr, direction: &FanChange) -> Result<PwlExpr> {
    if f.d < 2 {
        return Err(Error::Argument(format!(
            "changing fans needs d ≥ 2, got d = {}",
            f.d
        )));
    }
    let last = Subset::singleton(f.d);
    let mut pinned = f.clone();
    pinned.terms.remove(&last);
    match direction {
        FanChange::Project => Ok(pinned),
        FanChange::Embed { slope } => {
            // σ_M(h(x), 0) = σ_M(x) - x_d for every M, so p ∘ h = p - slope(p)·σ_{d}.
            let correction = slope - pinned.slope();
            pinned.add_term(last, correction)?;
            Ok(pinned)
        }
    }
}

/// Parses `sigma:[1..5]` or `sigma:[1,3,4]` into the index set `M`.
pub fn parse_sigma_shorthand(text: &str) -> Result<Subset> {
    let bad = || Error::Parse(format!("expected sigma:[a..b] or sigma:[i,j,...], got {text:?}"));
    let body = text
        .trim()
        .strip_prefix("sigma:")
        .ok_or_else(bad)?
        .trim()
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(bad)?;
    if let Some((lo, hi)) = body.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        return Subset::from_elements(lo..=hi);
    }
    let elements = body
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    let m = Subset::from_elements(elements)?;
    if m.is_empty() {
        return Err(bad());
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(rename = "M")]
    m: Subset,
    #[serde(with = "rational::serde_str")]
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
struct PwlExprJson {
    d: usize,
    #[serde(with = "rational::serde_str")]
    constant: Rational,
    terms: Vec<TermJson>,
}

impl Serialize for PwlExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PwlExprJson {
            d: self.d,
            constant: self.constant.clone(),
            terms: self
                .terms()
                .map(|(m, c)| TermJson { m, coeff: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PwlExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PwlExprJson::deserialize(d)?;
        let mut f = PwlExpr::constant_fn(raw.d, raw.constant).map_err(D::Error::custom)?;
        for term in raw.terms {
            if f.terms.contains_key(&term.m) {
                return Err(D::Error::custom(format!("duplicate term for {}", term.m)));
            }
            f.add_term(term.m, term.coeff).map_err(D::Error::custom)?;
        }
        Ok(f)
    }
}
