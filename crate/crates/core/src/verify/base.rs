//! Interval decomposition identities and the one-layer base case.
//!
//! (i) `α_{X,Y} = Σ_{X ⊆ S ⊆ Y∖T} (-1)^{r(S)} α_{S,S∪T}` as integer vectors, for
//!     every interval and every `T ⊆ Y∖X`;
//! (ii) `<α_{S,S∪T}, G>` does not depend on `S` for `|T| = k` and `G` in the
//!     spanning family of `Sf(k)`;
//! (iii) positive parts of sign-consistent affine images lie in `Sf(2)` and
//!     span all of it.

use std::time::Instant;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::lattice::{self, binomial, Interval, Subset};
use crate::rational;
use crate::setfn::{span_dimension, SetFn};
use crate::transform::{phi, PwlExpr};

use super::{Coverage, Report};

const MAX_D: usize = 6;

/// Signed indicator of `[s, t]` on `2^[d]`.
fn alpha(d: usize, s: Subset, t: Subset) -> Vec<i64> {
    let mut v = vec![0i64; 1 << d];
    for q in 0..1u32 << d {
        let q = Subset::from_bits(q);
        if s.is_subset_of(q) && q.is_subset_of(t) {
            v[q.bits() as usize] = if q.difference(s).len().is_multiple_of(2) { 1 } else { -1 };
        }
    }
    v
}

fn all_intervals(d: usize) -> impl Iterator<Item = Interval> {
    (0..1u32 << d).flat_map(move |y| {
        lattice::submasks(y).map(move |x| {
            Interval::new(Subset::from_bits(x), Subset::from_bits(y)).expect("x ⊆ y")
        })
    })
}

fn check_identities(d: usize, signed: bool, report: &mut Report) {
    let mut checks = 0u64;
    for interval in all_intervals(d) {
        let (x, y) = (interval.lower(), interval.upper());
        let lhs = alpha(d, x, y);
        for t in lattice::submasks(interval.free().bits()).map(Subset::from_bits) {
            let parts = interval.decompose_by(t).expect("t ⊆ Y∖X");
            let mut rhs = vec![0i64; 1 << d];
            for part in &parts {
                let s = part.lower();
                let sign = if !signed || s.difference(x).len() % 2 == 0 { 1 } else { -1 };
                for (acc, a) in rhs.iter_mut().zip(alpha(d, s, s.union(t))) {
                    *acc += sign * a;
                }
            }
            checks += 1;
            if lhs != rhs {
                report.fail(format!(
                    "(i) alpha[{x}, {y}] differs from its decomposition along T = {t}"
                ));
                report.count("identity_checks", checks);
                return;
            }
        }
    }
    report.count("identity_checks", checks);
}

fn spanning_family(d: usize, k: usize) -> Vec<(String, SetFn)> {
    let domain = Interval::full(d);
    let mut family = vec![("1".to_string(), SetFn::constant(domain, rational::one()))];
    for size in 1..=k.min(d) {
        for m in (1..=d).combinations(size) {
            let m = Subset::from_elements(m).expect("labels in range");
            let f = phi(&PwlExpr::sigma(d, m).expect("valid"));
            family.push((format!("sigma{m}"), f));
        }
    }
    family
}

fn check_translation(d: usize, k: usize, report: &mut Report) {
    let family = spanning_family(d, k);
    let mut checks = 0u64;
    for interval in all_intervals(d) {
        let free = interval.free().bits();
        if (free.count_ones() as usize) < k {
            continue;
        }
        for t in lattice::submasks_of_size(free, k).map(Subset::from_bits) {
            let parts = interval.decompose_by(t).expect("t ⊆ Y∖X");
            for (name, g) in &family {
                let first = g.alternating_sum(parts[0].lower(), parts[0].upper()).expect("in domain");
                for part in &parts[1..] {
                    checks += 1;
                    let v = g.alternating_sum(part.lower(), part.upper()).expect("in domain");
                    if v != first {
                        report.fail(format!(
                            "(ii) <alpha[{}, {}], {name}> = {} but <alpha[{}, {}], {name}> = {}",
                            parts[0].lower(),
                            parts[0].upper(),
                            rational::format(&first),
                            part.lower(),
                            part.upper(),
                            rational::format(&v)
                        ));
                        report.count("translation_checks", checks);
                        return;
                    }
                }
            }
        }
    }
    report.count("translation_checks", checks);
}

fn check_base_case(d: usize, report: &mut Report) {
    let domain = Interval::full(d);
    let mut images = Vec::new();
    let mut filtered = 0u64;
    // a + Σ c_i x_i with all coefficients in {-1, 0, 1}.
    for coeffs in std::iter::repeat_n([-1i64, 0, 1], d + 1).multi_cartesian_product() {
        let f = SetFn::from_fn(domain, |s| {
            let mut v = coeffs[0];
            for i in s.elements() {
                v += coeffs[i];
            }
            rational::int(v)
        });
        if !f.in_hc() {
            continue;
        }
        filtered += 1;
        let plus = f.positive_part();
        if let Some(w) = plus.level_witness(2) {
            report.fail(format!("(iii) max(0, F) leaves Sf(2) for coefficients {coeffs:?}: {w}"));
            return;
        }
        images.push(plus);
    }
    report.count("base_case_functions", filtered);
    let span = span_dimension(&images).expect("same domain");
    let expected = sf_dimension(d, 2);
    report.value("base_span_dim", span);
    report.value("dim_sf2", expected);
    if span as u128 != expected {
        report.fail(format!("(iii) span of max(0, F) has dimension {span}, Sf(2) has {expected}"));
    }
}

/// `1 + Σ_{i=1}^k C(d, i)`.
pub(crate) fn sf_dimension(d: usize, k: usize) -> u128 {
    1 + (1..=k.min(d)).map(|i| binomial(d, i)).sum::<u128>()
}

fn four_element_example(d: usize, report: &mut Report) {
    if d < 4 {
        return;
    }
    let s = |e: &[usize]| Subset::from_elements(e.iter().copied()).expect("valid");
    let lhs = alpha(d, Subset::EMPTY, s(&[1, 2, 3, 4]));
    let a = alpha(d, Subset::EMPTY, s(&[1, 2, 3]));
    let b = alpha(d, s(&[4]), s(&[1, 2, 3, 4]));
    let rhs: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let ok = lhs == rhs;
    report.value(
        "example",
        format!(
            "alpha[∅, {{1,2,3,4}}] = alpha[∅, {{1,2,3}}] - alpha[{{4}}, {{1,2,3,4}}]: {}",
            if ok { "holds" } else { "fails" }
        ),
    );
    if !ok {
        report.fail("alpha[∅, {1,2,3,4}] != alpha[∅, {1,2,3}] - alpha[{4}, {1,2,3,4}]");
    }
}

fn run(d: usize, k: usize, signed: bool) -> Result<Report> {
    if d > MAX_D {
        return Err(Error::DimensionLimit { d, limit: MAX_D });
    }
    let started = Instant::now();
    let mut report = Report::new("verify base", Coverage::Exhaustive)
        .param("d", d)
        .param("k", k);
    check_identities(d, signed, &mut report);
    four_element_example(d, &mut report);
    check_translation(d, k, &mut report);
    check_base_case(d, &mut report);
    Ok(report.finish(started))
}

pub fn verify_base_and_identities(d: usize, k: usize) -> Result<Report> {
    run(d, k, true)
}

/// Drops the sign `(-1)^{r(S)}` from the decomposition identity.
pub fn verify_base_and_identities_mutated(d: usize, k: usize) -> Result<Report> {
    Ok(run(d, k, false)?.param("mutation", "unsigned decomposition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Status;

    #[test]
    fn small_cases_pass() {
        for (d, k) in [(3, 1), (4, 2)] {
            let r = verify_base_and_identities(d, k).unwrap();
            assert_eq!(r.status, Status::Pass, "{r}");
        }
        let r = verify_base_and_identities(3, 1).unwrap();
        assert_eq!(r.values["base_span_dim"], "7");
    }

    #[test]
    fn mutation_fails() {
        let r = verify_base_and_identities_mutated(3, 1).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.witness.unwrap().starts_with("(i)"));
    }

    #[test]
    fn guard() {
        assert!(verify_base_and_identities(7, 2).is_err());
    }
}
