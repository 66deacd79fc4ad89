//! Conforming tuples and argmax maps.
//!
//! A tuple `(F_1, ..., F_r)` is conforming when every maximal chain of the
//! domain has one index attaining the pointwise maximum at all of its
//! elements. Rather than walking the `n!` chains, a sweep over the lattice
//! tracks, per element `S`, the set of index sets `∩ argmax` reachable along
//! chains from the bottom to `S`. An empty intersection anywhere extends to a
//! full maximal chain, so the tuple is conforming iff the empty set is never
//! reached.

use crate::error::{Error, Result};
use crate::lattice::{Interval, Subset};
use crate::rational::Rational;

use super::SetFn;

/// Tuples are limited to eight members so index sets fit in a byte.
pub const MAX_TUPLE: usize = 8;

/// Bitset over the 256 possible index sets.
#[derive(Clone, Copy, Default, PartialEq, Eq)]
struct StateSet([u64; 4]);

impl StateSet {
    fn insert(&mut self, mask: u8) {
        self.0[(mask >> 6) as usize] |= 1 << (mask & 63);
    }

    fn contains(&self, mask: u8) -> bool {
        self.0[(mask >> 6) as usize] >> (mask & 63) & 1 == 1
    }

    fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..4).flat_map(move |w| {
            let mut word = self.0[w];
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros();
                word &= word - 1;
                Some((w as u32 * 64 + bit) as u8)
            })
        })
    }
}

fn check_tuple(fns: &[SetFn]) -> Result<Interval> {
    let Some(first) = fns.first() else {
        return Err(Error::Argument("empty tuple".into()));
    };
    if fns.len() > MAX_TUPLE {
        return Err(Error::Argument(format!(
            "tuple of {} functions exceeds the limit of {MAX_TUPLE}",
            fns.len()
        )));
    }
    for f in &fns[1..] {
        first.same_domain(f)?;
    }
    Ok(first.domain())
}

/// Per element (local-index order), the bitmask of indices attaining the maximum.
pub fn argmax_map(fns: &[SetFn]) -> Result<Vec<u8>> {
    let domain = check_tuple(fns)?;
    Ok((0..domain.size())
        .map(|v| {
            let best: &Rational = fns
                .iter()
                .map(|f| &f.values[v])
                .max()
                .expect("tuple is nonempty");
            fns.iter()
                .enumerate()
                .filter(|(_, f)| &f.values[v] == best)
                .fold(0u8, |acc, (i, _)| acc | 1 << i)
        })
        .collect())
}

/// A maximal chain along which the sets of `map` have empty intersection.
///
/// `map` holds one nonempty index set per element of `domain` in local-index
/// order; a map without such a chain is conforming.
pub fn map_conformity_violation(domain: Interval, map: &[u8]) -> Option<Vec<Subset>> {
    assert_eq!(map.len(), domain.size(), "map length must match the domain");
    let n = domain.rank();
    let size = map.len();
    let mut reach = vec![StateSet::default(); size];
    reach[0].insert(map[0]);
    let mut dead_end = (map[0] == 0).then_some(0);
    if dead_end.is_none() {
        'sweep: for v in 1..size {
            let here = map[v];
            let mut set = StateSet::default();
            let mut bits = v;
            while bits != 0 {
                let low = bits & bits.wrapping_neg();
                bits ^= low;
                for state in reach[v ^ low].iter() {
                    set.insert(state & here);
                }
            }
            reach[v] = set;
            if set.contains(0) {
                dead_end = Some(v);
                break 'sweep;
            }
        }
    }
    let end = dead_end?;

    // Walk back down from the dead end, choosing predecessors that realise
    // the empty state, then climb to the top in ascending label order.
    let mut down = vec![end];
    let mut v = end;
    let mut state = 0u8;
    while v != 0 {
        let mut bits = v;
        let mut step = None;
        while bits != 0 && step.is_none() {
            let low = bits & bits.wrapping_neg();
            bits ^= low;
            let u = v ^ low;
            step = reach[u]
                .iter()
                .find(|prev| prev & map[v] == state)
                .map(|prev| (u, prev));
        }
        let (u, prev) = step.expect("reachable state has a predecessor");
        down.push(u);
        v = u;
        state = prev;
    }
    down.reverse();
    let mut chain: Vec<Subset> = down.into_iter().map(|i| domain.element_at(i)).collect();
    let mut v = end;
    for bit in 0..n {
        if v >> bit & 1 == 0 {
            v |= 1 << bit;
            chain.push(domain.element_at(v));
        }
    }
    Some(chain)
}

/// A maximal chain on which no member of the tuple is maximal throughout.
pub fn conformity_violation(fns: &[SetFn]) -> Result<Option<Vec<Subset>>> {
    let map = argmax_map(fns)?;
    Ok(map_conformity_violation(fns[0].domain(), &map))
}

pub fn is_conforming(fns: &[SetFn]) -> Result<bool> {
    Ok(conformity_violation(fns)?.is_none())
}

/// Membership in the cone `C_a`: `a(S) ⊆ argmax(S)` for every `S`.
pub fn in_cone(fns: &[SetFn], map: &[u8]) -> Result<bool> {
    let argmax = argmax_map(fns)?;
    if map.len() != argmax.len() {
        return Err(Error::Argument("map length does not match the domain".into()));
    }
    Ok(map.iter().zip(&argmax).all(|(a, m)| a & !m == 0))
}

/// Entrywise maximum. With `require_conforming`, a non-conforming tuple is an
/// error carrying the offending chain.
pub fn pointwise_max(fns: &[SetFn], require_conforming: bool) -> Result<SetFn> {
    let domain = check_tuple(fns)?;
    if require_conforming {
        if let Some(chain) = conformity_violation(fns)? {
            return Err(Error::NotConforming {
                neuron: None,
                chain,
            });
        }
    }
    let values = (0..domain.size())
        .map(|v| fns.iter().map(|f| &f.values[v]).max().cloned().expect("nonempty"))
        .collect();
    SetFn::new(domain, values)
}
