//! One maxout layer squares the level: `F ∈ Sf(k) ∩ HC` implies
//! `F⁺ ∈ Sf(k² + k)`, and on rank-5 lattices with `k = 2` even `F⁺ ∈ Sf(4)`.
//!
//! Both claims are universal over a continuous set, so they are checked on
//! samples (see [`super::sampling`]); the rank-5 check additionally replays
//! the two structural cases of its argument on every sample they apply to.

use std::time::Instant;

use num_traits::Zero;

use crate::error::Result;
use crate::lattice::{Interval, Subset};
use crate::network::{depth_bound, BoundRule};
use crate::rational;
use crate::setfn::{LowSupport, SetFn};
use crate::transform::{phi, PwlExpr};

use super::sampling::{sample_with, Generator, Sample, SampleBatch};
use super::{Coverage, Report};

/// `Σ_{i ∈ T} x_i - (|T| - 1/2)` with `T = {1, ..., size}`: in `Sf(1)` but not
/// in `HC`, and its positive part has full level `size`.
fn injected(d: usize, size: usize) -> Sample {
    let mut expr = PwlExpr::constant_fn(d, rational::ratio(1 - 2 * size as i64, 2)).expect("valid d");
    for i in 1..=size.min(d) {
        expr.add_term(Subset::singleton(i), rational::one()).expect("valid term");
    }
    let f = phi(&expr);
    Sample {
        index: u64::MAX,
        generator: Generator::Terms,
        expr,
        f,
    }
}

fn record_batch(report: &mut Report, batch: &SampleBatch) {
    report.attempted = batch.attempted;
    report.accepted = batch.accepted();
    for (g, (tried, took)) in Generator::ALL.iter().zip(batch.per_generator) {
        report.value(&format!("acceptance_{}", g.name()), format!("{took}/{tried}"));
    }
    if batch.unsound > 0 {
        report.fail(format!(
            "{} generated candidates were outside the level space they were built in",
            batch.unsound
        ));
    }
}

fn sample_label(s: &Sample) -> String {
    if s.index == u64::MAX {
        format!("injected sample F = Φ({})", s.expr)
    } else {
        format!("sample {} ({}) F = Φ({})", s.index, s.generator, s.expr)
    }
}

fn draw(d: usize, k: usize, n: usize, seed: u64, mutate: Option<usize>, report: &mut Report) -> Result<Vec<Sample>> {
    let batch = sample_with(d, k, n, seed, true)?;
    record_batch(report, &batch);
    let mut samples = batch.samples;
    if let Some(size) = mutate {
        samples.insert(0, injected(d, size));
    }
    if samples.is_empty() {
        report.inconclusive("no sample accepted: generator starvation");
    } else if (batch.attempted > 0) && (report.accepted as usize) < n {
        report.inconclusive(format!(
            "only {} of {n} samples accepted before the attempt cap",
            report.accepted
        ));
    }
    Ok(samples)
}

/// Level check shared by both suites. Returns `false` on the first failure.
fn check_level(report: &mut Report, sample: &Sample, target: usize) -> bool {
    let plus = sample.f.positive_part();
    match plus.level_witness(target) {
        None => true,
        Some(w) => {
            report.fail(format!(
                "{}: F+ is not in Sf({target}), {w}",
                sample_label(sample)
            ));
            false
        }
    }
}

fn two_sided(f: &SetFn) -> bool {
    let s = f.supports();
    !s.positive.is_empty() && !s.negative.is_empty()
}

fn run_quadratic(d: usize, k: usize, n: usize, seed: u64, mutate: bool) -> Result<Report> {
    let started = Instant::now();
    let target = k * k + k;
    let mut report = Report::new("verify quadratic", Coverage::Sampled)
        .param("d", d)
        .param("k", k)
        .param("samples", n)
        .param("seed", seed);
    report.value("target_level", target);
    if d <= target {
        report.note(format!(
            "d = {d} ≤ k² + k: no interval of rank {} exists, so F+ ∈ Sf({target}) holds trivially",
            target + 1
        ));
    }
    let samples = draw(d, k, n, seed, mutate.then_some(target + 1), &mut report)?;
    for sample in &samples {
        if !check_level(&mut report, sample, target) {
            break;
        }
        if !sample.f.in_hc() || !two_sided(&sample.f) {
            continue;
        }
        report.count("two_sided", 1);
        match sample.f.low_support(k)? {
            LowSupport::Found { .. } => report.count("low_support_found", 1),
            LowSupport::OneSided => {}
            LowSupport::Missing(why) => {
                report.fail(format!("{}: low-support elements missing, {why}", sample_label(sample)));
                break;
            }
        }
    }
    Ok(report.finish(started))
}

pub fn verify_quadratic(d: usize, k: usize, n: usize, seed: u64) -> Result<Report> {
    run_quadratic(d, k, n, seed, false)
}

/// Injects a function outside `HC` whose positive part has level `k² + k + 1`.
pub fn verify_quadratic_mutated(d: usize, k: usize, n: usize, seed: u64) -> Result<Report> {
    Ok(run_quadratic(d, k, n, seed, true)?.param("mutation", "HC filter bypassed for an injected sample"))
}

/// Distinct rank levels occupied by a set of elements.
fn levels(domain: Interval, sets: &[Subset]) -> Vec<usize> {
    let mut v: Vec<usize> = sets.iter().map(|s| domain.rank_of(*s)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Pairing: when `supp⁺(F)` sits on two levels `i < j`, every element of
/// level `i` has exactly one superset in the support on level `j`, with the
/// same value, the matching is a bijection, and `<α_{X,Y}, F⁺> = 0`.
fn check_pairing(f: &SetFn) -> std::result::Result<(), String> {
    let domain = f.domain();
    let positive = f.supports().positive;
    let lv = levels(domain, &positive);
    let top = f
        .positive_part()
        .alternating_sum(domain.lower(), domain.upper())
        .expect("full interval");
    if !top.is_zero() {
        return Err(format!(
            "<alpha[X, Y], F+> = {} on a two-level support",
            rational::format(&top)
        ));
    }
    if lv.len() != 2 {
        return Ok(());
    }
    let (low, high): (Vec<Subset>, Vec<Subset>) =
        positive.iter().partition(|s| domain.rank_of(**s) == lv[0]);
    let mut used = vec![false; high.len()];
    for r in &low {
        let above: Vec<usize> = (0..high.len()).filter(|&j| r.is_subset_of(high[j])).collect();
        let [j] = above[..] else {
            return Err(format!("{r} has {} supersets in the upper support level", above.len()));
        };
        if f[*r] != f[high[j]] || used[j] {
            return Err(format!("{r} and {} are not matched with equal values", high[j]));
        }
        used[j] = true;
    }
    if used.iter().any(|u| !u) {
        return Err("upper support level has unmatched elements".into());
    }
    Ok(())
}

/// Level-1 positive and level-4 negative support: the lattice splits into
/// `[X⁺, Y]` and `[X, X⁻]`, so `<α_{X,Y}, F⁺> = -<α_{X⁺,Y}, F> = 0`.
fn check_split(f: &SetFn, x_plus: Subset) -> std::result::Result<(), String> {
    let domain = f.domain();
    let (x, y) = (domain.lower(), domain.upper());
    let top = f.positive_part().alternating_sum(x, y).expect("full interval");
    let upper = f.alternating_sum(x_plus, y).expect("inside");
    if top != -upper.clone() || !upper.is_zero() {
        return Err(format!(
            "<alpha[X, Y], F+> = {}, <alpha[{x_plus}, Y], F> = {}",
            rational::format(&top),
            rational::format(&upper)
        ));
    }
    Ok(())
}

fn split_points(f: &SetFn) -> Option<Subset> {
    let domain = f.domain();
    let s = f.supports();
    let x_plus = s.positive.iter().copied().find(|p| domain.rank_of(*p) == 1)?;
    s.negative.iter().find(|q| domain.rank_of(**q) == 4)?;
    Some(x_plus)
}

fn run_rank5(n: usize, seed: u64, mutate: bool) -> Result<Report> {
    let started = Instant::now();
    let (d, k, target) = (5, 2, 4);
    let mut report = Report::new("verify rank5", Coverage::Sampled)
        .param("samples", n)
        .param("seed", seed);
    let samples = draw(d, k, n, seed, mutate.then_some(5), &mut report)?;
    for sample in &samples {
        if !check_level(&mut report, sample, target) {
            break;
        }
        let f = &sample.f;
        if !f.in_hc() || !two_sided(f) {
            continue;
        }
        let domain = f.domain();
        let s = f.supports();
        let mut outcome = Ok(());
        let mut pairing = false;
        if levels(domain, &s.positive).len() <= 2 {
            pairing = true;
            outcome = check_pairing(f);
        } else if levels(domain, &s.negative).len() <= 2 {
            // Same argument for -F; (-F)⁺ = F⁺ - F and F has level ≤ 2.
            pairing = true;
            outcome = check_pairing(&f.neg());
        }
        if pairing {
            report.count("pairing_case", 1);
        }
        if outcome.is_ok() {
            let split = split_points(f)
                .map(|xp| (xp, f.clone()))
                .or_else(|| {
                    let g = f.neg();
                    split_points(&g).map(|xp| (xp, g))
                });
            if let Some((x_plus, g)) = split {
                report.count("case1_4", 1);
                outcome = check_split(&g, x_plus);
            }
        }
        if let Err(why) = outcome {
            report.fail(format!("{}: {why}", sample_label(sample)));
            break;
        }
    }

    let two_layers = depth_bound(2, BoundRule::Exact4)?;
    let five = phi(&PwlExpr::sigma(5, Subset::full(5))?);
    let level = five.min_level().k_min;
    report.value("two_layer_bound", two_layers);
    report.value("min_level_sigma_1..5", level);
    report.note(format!(
        "two hidden layers reach at most level {two_layers}; max{{x_1..x_5}} has level {level}, \
         so max{{0, x_1, ..., x_4}} needs three layers"
    ));
    Ok(report.finish(started))
}

pub fn verify_rank5(n: usize, seed: u64) -> Result<Report> {
    run_rank5(n, seed, false)
}

/// Injects `x_1 + ... + x_5 - 9/2`, which is not sign-consistent.
pub fn verify_rank5_mutated(n: usize, seed: u64) -> Result<Report> {
    Ok(run_rank5(n, seed, true)?.param("mutation", "HC filter bypassed for an injected sample"))
}
