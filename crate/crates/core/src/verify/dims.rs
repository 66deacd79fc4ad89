//! Dimensions of the level spaces, computed two independent ways.
//!
//! The spanning family `{1} ∪ {Φ(σ_M) : 1 ≤ |M| ≤ k}` gives the dimension
//! from below; the orthogonality definition gives `2^d` minus the rank of the
//! rank-`(k+1)` alternating vectors. Both are compared with `1 + Σ C(d, i)`,
//! and the count without the constant, `Σ C(d, i)`, is printed next to it.

use std::time::Instant;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::lattice::{binomial, Interval, Subset};
use crate::linalg;
use crate::rational::{self, Rational};
use crate::setfn::{span_dimension, SetFn};
use crate::transform::{phi, PwlExpr};

use super::base::sf_dimension;
use super::{Coverage, Report};

const MAX_D: usize = 6;

fn family_dimension(d: usize, k: usize, with_constant: bool) -> usize {
    let domain = Interval::full(d);
    let mut family = Vec::new();
    if with_constant {
        family.push(SetFn::constant(domain, rational::one()));
    }
    for size in 1..=k.min(d) {
        for m in (1..=d).combinations(size) {
            let m = Subset::from_elements(m).expect("labels in range");
            family.push(phi(&PwlExpr::sigma(d, m).expect("valid")));
        }
    }
    span_dimension(&family).expect("same domain")
}

fn annihilator_dimension(d: usize, k: usize) -> usize {
    let domain = Interval::full(d);
    let width = 1usize << d;
    let rows = domain.intervals_of_rank(k + 1).map(|(s, t)| {
        let mut row: Vec<Rational> = vec![rational::zero(); width];
        for q in 0..width as u32 {
            let q = Subset::from_bits(q);
            if s.is_subset_of(q) && q.is_subset_of(t) {
                row[q.bits() as usize] =
                    rational::int(if q.difference(s).len().is_multiple_of(2) { 1 } else { -1 });
            }
        }
        row
    });
    width - linalg::rank(width, rows)
}

fn run(d: usize, kmax: usize, with_constant: bool) -> Result<Report> {
    if d > MAX_D {
        return Err(Error::DimensionLimit { d, limit: MAX_D });
    }
    let started = Instant::now();
    let mut report = Report::new("verify dims", Coverage::Exhaustive)
        .param("d", d)
        .param("kmax", kmax);
    for k in 0..=kmax.min(d) {
        let spanned = family_dimension(d, k, with_constant);
        let annihilated = annihilator_dimension(d, k);
        let formula = sf_dimension(d, k);
        let without_constant: u128 = (1..=k).map(|i| binomial(d, i)).sum();
        report.value(
            &format!("dim_k{k}"),
            format!(
                "{spanned} (family) / {annihilated} (orthogonality); 1 + sum C(d,i) = {formula}; sum C(d,i) = {without_constant}"
            ),
        );
        if spanned != annihilated || spanned as u128 != formula {
            report.fail(format!(
                "d = {d}, k = {k}: family spans {spanned}, orthogonality gives {annihilated}, expected {formula}"
            ));
        }
    }
    report.note(
        "the level space contains the constants, so its dimension is 1 + sum_{i=1}^k C(d,i); \
         the bare sum undercounts by one",
    );
    Ok(report.finish(started))
}

pub fn verify_dimensions(d: usize, kmax: usize) -> Result<Report> {
    run(d, kmax, true)
}

/// Leaves the constant out of the spanning family.
pub fn verify_dimensions_mutated(d: usize, kmax: usize) -> Result<Report> {
    Ok(run(d, kmax, false)?.param("mutation", "no constant in spanning family"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Status;

    #[test]
    fn table_entries() {
        assert_eq!(family_dimension(4, 2, true), 11);
        assert_eq!(annihilator_dimension(4, 2), 11);
        assert_eq!(annihilator_dimension(1, 0), 1);
        assert_eq!(family_dimension(5, 5, true), 32);
    }

    #[test]
    fn passes_and_mutation_fails() {
        let r = verify_dimensions(4, 4).unwrap();
        assert_eq!(r.status, Status::Pass, "{r}");
        assert!(r.values["dim_k2"].contains("sum C(d,i) = 10"));
        assert_eq!(verify_dimensions_mutated(4, 2).unwrap().status, Status::Fail);
    }
}
