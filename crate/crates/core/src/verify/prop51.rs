//! The rank-(3,2) construction: two functions in `FB(3)` on `R^7` whose
//! maximum has level exactly 7.

use std::time::Instant;

use crate::lattice::Subset;
use crate::rational;
use crate::setfn::{conformity_violation, pointwise_max, SetFn};
use crate::transform::{phi, PwlExpr};

use super::{Coverage, Report};

fn set(elements: &[usize]) -> Subset {
    Subset::from_elements(elements.iter().copied()).expect("labels in range")
}

fn expr(terms: &[(i64, &[usize])]) -> PwlExpr {
    let mut f = PwlExpr::zero(7).expect("d = 7");
    for (c, m) in terms {
        f.add_term(set(m), rational::int(*c)).expect("valid term");
    }
    f
}

/// `f_1 = 2σ_{12} + σ_{145} + σ_{167} + σ_{246} + σ_{257}` and
/// `f_2 = σ_{345} + σ_{367} + σ_{124} + σ_{125} + σ_{126} + σ_{127}`.
pub fn outof6_pair() -> (PwlExpr, PwlExpr) {
    let f1 = expr(&[
        (2, &[1, 2]),
        (1, &[1, 4, 5]),
        (1, &[1, 6, 7]),
        (1, &[2, 4, 6]),
        (1, &[2, 5, 7]),
    ]);
    let f2 = expr(&[
        (1, &[3, 4, 5]),
        (1, &[3, 6, 7]),
        (1, &[1, 2, 4]),
        (1, &[1, 2, 5]),
        (1, &[1, 2, 6]),
        (1, &[1, 2, 7]),
    ]);
    (f1, f2)
}

/// Positive support of `Φ(f_1) - Φ(f_2)`.
fn expected_support() -> Vec<Subset> {
    let mut v: Vec<Subset> = [
        &[1, 2][..],
        &[1, 2, 4],
        &[1, 2, 5],
        &[1, 2, 6],
        &[1, 2, 7],
        &[1, 2, 4, 5],
        &[1, 2, 6, 7],
        &[1, 4, 5],
        &[1, 6, 7],
    ]
    .iter()
    .map(|m| set(m))
    .collect();
    v.sort();
    v
}

fn list(sets: &[Subset]) -> String {
    sets.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn verify_prop51() -> Report {
    let (f1, f2) = outof6_pair();
    verify_prop51_with(&f1, &f2)
}

/// The same pipeline with `f_2 + σ_{3}`, which breaks the sign condition.
pub fn verify_prop51_mutated() -> Report {
    let (f1, mut f2) = outof6_pair();
    f2.add_term(set(&[3]), rational::one()).expect("valid term");
    verify_prop51_with(&f1, &f2).param("mutation", "f2 + sigma_{3}")
}

/// Checks the five claims on an arbitrary pair in `d = 7`.
///
/// The support and alternating-sum claims are symmetric in the pair: they are
/// read off whichever of `F_1 - F_2`, `F_2 - F_1` has the expected support.
pub fn verify_prop51_with(f1: &PwlExpr, f2: &PwlExpr) -> Report {
    let started = Instant::now();
    let mut report = Report::new("verify prop51", Coverage::Exhaustive)
        .param("f1", f1)
        .param("f2", f2);
    if f1.d() != 7 || f2.d() != 7 {
        report.fail(format!("expected d = 7, got {} and {}", f1.d(), f2.d()));
        return report.finish(started);
    }
    let big1 = phi(f1);
    let big2 = phi(f2);
    let diff = big1.checked_sub(&big2).expect("same domain");
    let full = Subset::full(7);

    // (a) sign condition
    match diff.hc_violation() {
        None => report.value("a_in_hc", true),
        Some((s, t)) => {
            report.value("a_in_hc", false);
            report.fail(format!(
                "(a) F({s}) = {} and F({t}) = {} have opposite signs",
                rational::format(&diff[s]),
                rational::format(&diff[t])
            ));
        }
    }

    // (b), (c) positive support and the top alternating sum of F⁺
    let expected = expected_support();
    let oriented: Option<SetFn> = [diff.clone(), diff.neg()]
        .into_iter()
        .find(|g| g.supports().positive == expected);
    match &oriented {
        Some(g) => {
            report.value("b_supp_plus", list(&expected));
            let top = g
                .positive_part()
                .alternating_sum(Subset::EMPTY, full)
                .expect("full interval");
            report.value("c_alt_sum_plus", rational::format(&top));
            if top != rational::int(-2) {
                report.fail(format!(
                    "(c) <alpha[∅, {full}], F+> = {}, expected -2",
                    rational::format(&top)
                ));
            }
        }
        None => {
            let found = diff.supports().positive;
            let extra: Vec<Subset> = found.iter().filter(|s| !expected.contains(s)).copied().collect();
            let missing: Vec<Subset> =
                expected.iter().filter(|s| !found.contains(s)).copied().collect();
            report.value("b_supp_plus", list(&found));
            report.fail(format!(
                "(b) positive support differs: unexpected [{}], missing [{}]",
                list(&extra),
                list(&missing)
            ));
        }
    }

    // (e) conformity of the pair, (d) level of the maximum
    let pair = [big1, big2];
    match conformity_violation(&pair).expect("valid tuple") {
        None => report.value("e_conforming", true),
        Some(chain) => {
            report.value("e_conforming", false);
            report.fail(format!("(e) no member is maximal along {}", list(&chain)));
        }
    }
    let max = pointwise_max(&pair, false).expect("valid tuple");
    let level = max.min_level();
    report.value("d_min_level_max", level.k_min);
    if let Some(w) = &level.witness {
        report.value("d_level_witness", w);
    }
    if level.k_min != 7 {
        report.fail(format!("(d) min_level(max{{F1, F2}}) = {}, expected 7", level.k_min));
    }
    report.finish(started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Status;

    #[test]
    fn reproduces_the_construction() {
        let r = verify_prop51();
        assert_eq!(r.status, Status::Pass, "{r}");
        assert_eq!(r.values["c_alt_sum_plus"], "-2");
        assert_eq!(r.values["d_min_level_max"], "7");
    }

    #[test]
    fn swapping_is_harmless() {
        let (f1, f2) = outof6_pair();
        let r = verify_prop51_with(&f2, &f1);
        assert_eq!(r.status, Status::Pass, "{r}");
        assert_eq!(r.values["c_alt_sum_plus"], "-2");
    }

    #[test]
    fn mutation_fails_with_witness() {
        let r = verify_prop51_mutated();
        assert_eq!(r.status, Status::Fail);
        assert!(r.witness.as_deref().unwrap().starts_with("(a)"));
    }
}
