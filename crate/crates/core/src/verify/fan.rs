//! Membership laws of the fan of conforming tuples.
//!
//! For a map `a` assigning a nonempty index set to every lattice element, the
//! cone `C_a` holds the tuples with `a(S) ⊆ argmax(S)` everywhere. Maps are
//! ordered by `a ≤ b` iff `b(S) ⊆ a(S)`. Checked laws:
//!
//! - a tuple lies in the cone of its own argmax map;
//! - `C_a ∩ C_b = C_{a ∪ b}`;
//! - `a ≤ b` implies `C_a ⊆ C_b`;
//! - the chain sweep on the argmax map agrees with brute-force chain enumeration;
//! - conforming maps are closed downward, and `C_a` of a conforming map
//!   contains only conforming tuples.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::Interval;
use crate::rational;
use crate::setfn::{argmax_map, in_cone, is_conforming, map_conformity_violation, SetFn};

use super::{Coverage, Report};

const MAX_D: usize = 4;
const MAX_R: usize = 3;

fn random_tuple(rng: &mut ChaCha8Rng, d: usize, r: usize) -> Vec<SetFn> {
    let domain = Interval::full(d);
    (0..r)
        .map(|_| SetFn::from_fn(domain, |_| rational::int(rng.random_range(0..=2))))
        .collect()
}

fn random_nonempty(rng: &mut ChaCha8Rng, within: u8) -> u8 {
    loop {
        let pick = rng.random_range(1..=u8::MAX) & within;
        if pick != 0 {
            return pick;
        }
    }
}

/// A coarser-or-equal map: each entry a nonempty subset of `a`'s entry.
fn random_submap(rng: &mut ChaCha8Rng, a: &[u8]) -> Vec<u8> {
    a.iter().map(|&s| random_nonempty(rng, s)).collect()
}

fn random_map(rng: &mut ChaCha8Rng, own: &[u8], r: usize) -> Vec<u8> {
    if rng.random_bool(0.5) {
        random_submap(rng, own)
    } else {
        let all = ((1u16 << r) - 1) as u8;
        own.iter().map(|_| random_nonempty(rng, all)).collect()
    }
}

/// Conformity by walking every maximal chain.
fn conforming_by_chains(domain: Interval, map: &[u8]) -> bool {
    domain
        .maximal_chains()
        .expect("small rank")
        .all(|chain| {
            chain
                .iter()
                .fold(u8::MAX, |acc, s| acc & map[domain.index_of(*s)])
                != 0
        })
}

fn map_conforming(domain: Interval, map: &[u8]) -> bool {
    map_conformity_violation(domain, map).is_none()
}

fn describe(fns: &[SetFn]) -> String {
    fns.iter()
        .map(|f| {
            let values: Vec<String> = f.values().iter().map(rational::format).collect();
            format!("[{}]", values.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Checks one sampled tuple; returns the first violated law.
fn check_sample(d: usize, r: usize, seed: u64, i: u64, union: bool) -> std::result::Result<[u64; 3], String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let domain = Interval::full(d);
    let tuple = random_tuple(&mut rng, d, r);
    let own = argmax_map(&tuple).expect("valid tuple");
    let witness = |law: &str| format!("sample {i}, tuple {}: {law}", describe(&tuple));
    let member = |map: &[u8]| in_cone(&tuple, map).expect("matching length");

    if !member(&own) {
        return Err(witness("not in the cone of its own argmax map"));
    }

    let a = random_map(&mut rng, &own, r);
    let b = random_map(&mut rng, &own, r);
    let joined: Vec<u8> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| if union { x | y } else { x & y })
        .collect();
    if (member(&a) && member(&b)) != member(&joined) {
        return Err(witness("C_a ∩ C_b differs from C_(a ∪ b)"));
    }

    let finer = random_submap(&mut rng, &a);
    if member(&a) && !member(&finer) {
        return Err(witness("a ≤ b but the tuple is in C_a and not in C_b"));
    }

    let sweep = map_conforming(domain, &own);
    if sweep != conforming_by_chains(domain, &own) || sweep != is_conforming(&tuple).expect("valid") {
        return Err(witness("chain sweep disagrees with chain enumeration"));
    }

    let mut nonvacuous = [0u64; 3];
    if map_conforming(domain, &finer) {
        nonvacuous[0] = 1;
        if !map_conforming(domain, &a) {
            return Err(witness("a ≤ b with b conforming but a not conforming"));
        }
    }
    if map_conforming(domain, &a) && member(&a) {
        nonvacuous[1] = 1;
        if !sweep {
            return Err(witness("tuple in the cone of a conforming map is not conforming"));
        }
    }
    if member(&a) && member(&b) {
        nonvacuous[2] = 1;
    }
    Ok(nonvacuous)
}

/// `F_1 = 1`, `F_2 = 0`, `a = {1,2}` and `b = {1}` everywhere: the tuple lies
/// in `C_b` but not in `C_a`, hence not in `C_{a ∪ b}`.
fn constructed_case(d: usize, union: bool) -> std::result::Result<(), String> {
    let domain = Interval::full(d);
    let tuple = [
        SetFn::constant(domain, rational::one()),
        SetFn::zero(domain),
    ];
    let a = vec![0b11u8; domain.size()];
    let b = vec![0b01u8; domain.size()];
    let joined: Vec<u8> = a.iter().zip(&b).map(|(x, y)| if union { x | y } else { x & y }).collect();
    let member = |map: &[u8]| in_cone(&tuple, map).expect("matching length");
    if member(&a) || !member(&b) {
        return Err("constructed tuple should lie in C_b only".into());
    }
    if member(&joined) {
        return Err("constructed tuple (1, 0) lies in C_(a ∪ b) although it is not in C_a".into());
    }
    Ok(())
}

/// The cone of the full map `a(S) = [r]` is the diagonal.
fn diagonal_case(d: usize, r: usize) -> std::result::Result<(), String> {
    let domain = Interval::full(d);
    let f = SetFn::from_fn(domain, |s| rational::int(s.bits() as i64 % 3));
    let full = vec![((1u16 << r) - 1) as u8; domain.size()];
    if !in_cone(&vec![f.clone(); r], &full).expect("valid") {
        return Err("diagonal tuple missing from the cone of the full map".into());
    }
    if r > 1 {
        let mut off = vec![f.clone(); r];
        off[0] = f.shift(&rational::one());
        if in_cone(&off, &full).expect("valid") {
            return Err("off-diagonal tuple inside the cone of the full map".into());
        }
    }
    Ok(())
}

fn run(d: usize, r: usize, n: usize, seed: u64, union: bool) -> Result<Report> {
    if d > MAX_D || r > MAX_R || r == 0 {
        return Err(Error::Argument(format!(
            "fan laws are checked for d ≤ {MAX_D} and 1 ≤ r ≤ {MAX_R}, got d = {d}, r = {r}"
        )));
    }
    let started = Instant::now();
    let mut report = Report::new("verify fan", Coverage::Sampled)
        .param("d", d)
        .param("r", r)
        .param("samples", n)
        .param("seed", seed);
    if let Err(w) = diagonal_case(d, r).and_then(|_| constructed_case(d, union)) {
        report.fail(w);
    }
    let outcomes: Vec<_> = (0..n as u64)
        .into_par_iter()
        .map(|i| check_sample(d, r, seed, i, union))
        .collect();
    report.attempted = n as u64;
    for outcome in outcomes {
        match outcome {
            Ok(hits) => {
                report.accepted += 1;
                report.count("closure_nonvacuous", hits[0]);
                report.count("cone_of_conforming_map", hits[1]);
                report.count("in_both_cones", hits[2]);
            }
            Err(w) => {
                report.fail(w);
                break;
            }
        }
    }
    Ok(report.finish(started))
}

pub fn verify_fan_laws(d: usize, r: usize, n: usize, seed: u64) -> Result<Report> {
    run(d, r, n, seed, true)
}

/// Replaces the union of maps by their intersection.
pub fn verify_fan_laws_mutated(d: usize, r: usize, n: usize, seed: u64) -> Result<Report> {
    Ok(run(d, r.max(2), n, seed, false)?.param("mutation", "intersection instead of union"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Status;

    #[test]
    fn laws_hold() {
        let r = verify_fan_laws(3, 2, 200, 3).unwrap();
        assert_eq!(r.status, Status::Pass, "{r}");
        assert!(r.counter("cone_of_conforming_map") > 0);
        assert!(r.counter("closure_nonvacuous") > 0);
    }

    #[test]
    fn mutation_fails() {
        let r = verify_fan_laws_mutated(3, 2, 50, 3).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.witness.unwrap().contains("constructed"));
    }

    #[test]
    fn brute_force_agrees_on_small_maps() {
        let domain = Interval::full(2);
        // {1} at ∅ and {1}, {2} at {2} and [2]: the chain ∅ < {2} < [2] fails.
        let map = [0b01, 0b01, 0b10, 0b10];
        assert!(!conforming_by_chains(domain, &map));
        assert!(!map_conforming(domain, &map));
    }
}
