//! Random members of `Sf(k) ∩ HC` on `[∅, [d]]`.
//!
//! There is no constructive description of this set, so candidates come from
//! four families that lie in `Sf(k)` by construction and are then filtered
//! through the `HC` test (membership in `Sf(k)` is re-checked as well):
//!
//! - `terms`: `Φ` of a random `c + Σ λ_M σ_M` with `|M| ≤ k`;
//! - `difference`: `c (σ_M - σ_M')`, always in `HC`;
//! - `disjoint`: sums of two differences on disjoint index sets;
//! - `overlap`: sums of two differences sharing elements, half of them in
//!   the crossed form `c (σ_{ac} + σ_{bd} - σ_{ad} - σ_{bc})`. These are the
//!   main source of functions whose sign supports sit on only two levels.
//!
//! Candidate `i` uses generator `i mod 4` and the RNG stream `i` of the seed,
//! so the accepted sequence does not depend on scheduling.

use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{self, Subset, HARD_MAX_DIM};
use crate::rational::{self, Rational};
use crate::setfn::SetFn;
use crate::transform::{phi, PwlExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Terms,
    Difference,
    Disjoint,
    Overlap,
}

impl Generator {
    pub const ALL: [Generator; 4] = [
        Generator::Terms,
        Generator::Difference,
        Generator::Disjoint,
        Generator::Overlap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Terms => "terms",
            Generator::Difference => "difference",
            Generator::Disjoint => "disjoint",
            Generator::Overlap => "overlap",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct Sample {
    /// Candidate index the sample was drawn at.
    pub index: u64,
    pub generator: Generator,
    pub expr: PwlExpr,
    pub f: SetFn,
}

#[derive(Debug, Clone, Default)]
pub struct SampleBatch {
    pub samples: Vec<Sample>,
    pub attempted: u64,
    /// Per generator: (attempted, accepted).
    pub per_generator: [(u64, u64); 4],
    /// Candidates that failed the `Sf(k)` re-check; nonzero means a generator bug.
    pub unsound: u64,
}

impl SampleBatch {
    pub fn accepted(&self) -> u64 {
        self.samples.len() as u64
    }
}

/// Upper bound on candidates drawn for `n` accepted samples.
pub fn attempt_cap(n: usize) -> u64 {
    (n as u64).saturating_mul(200).max(1000)
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let p = rng.random_range(1..=3i64) * if rng.random_bool(0.5) { 1 } else { -1 };
    let q = rng.random_range(1..=3i64);
    rational::ratio(p, q)
}

fn random_set(rng: &mut ChaCha8Rng, pool: &[usize], max: usize) -> Subset {
    let size = rng.random_range(1..=max.min(pool.len()));
    let picked = index::sample(rng, pool.len(), size);
    Subset::from_elements(picked.iter().map(|i| pool[i])).expect("pool holds valid labels")
}

/// `c (σ_M - σ_M')` with `M ≠ M'` drawn from `pool`.
fn difference(rng: &mut ChaCha8Rng, d: usize, k: usize, pool: &[usize]) -> Option<PwlExpr> {
    if pool.is_empty() {
        return None;
    }
    let m = random_set(rng, pool, k);
    let m2 = random_set(rng, pool, k);
    if m == m2 {
        return None;
    }
    let c = small_rational(rng);
    let mut f = PwlExpr::zero(d).ok()?;
    f.add_term(m, c.clone()).ok()?;
    f.add_term(m2, -c).ok()?;
    Some(f)
}

fn candidate(d: usize, k: usize, seed: u64, i: u64) -> Option<(Generator, PwlExpr)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let generator = Generator::ALL[(i % 4) as usize];
    let labels: Vec<usize> = (1..=d).collect();
    if d == 0 || k == 0 {
        // Sf(0) holds only constants.
        let c = small_rational(&mut rng);
        return Some((generator, PwlExpr::constant_fn(d, c).ok()?));
    }
    let expr = match generator {
        Generator::Terms => {
            let mut f = PwlExpr::zero(d).ok()?;
            if rng.random_bool(0.5) {
                f.set_constant(small_rational(&mut rng));
            }
            for _ in 0..rng.random_range(1..=2 * k + 1) {
                let m = random_set(&mut rng, &labels, k);
                f.add_term(m, small_rational(&mut rng)).ok()?;
            }
            f
        }
        Generator::Difference => difference(&mut rng, d, k, &labels)?,
        Generator::Disjoint => {
            let mut shuffled = labels.clone();
            let cut = rng.random_range(1..d.max(2));
            shuffled.shuffle(&mut rng);
            let (left, right) = shuffled.split_at(cut.min(d));
            let a = difference(&mut rng, d, k, left)?;
            let b = difference(&mut rng, d, k, right)?;
            a.checked_add(&b).ok()?
        }
        Generator::Overlap => {
            if k >= 2 && d >= 4 && rng.random_bool(0.5) {
                let picked = index::sample(&mut rng, d, 4);
                let [a, b, c, e] = [0, 1, 2, 3].map(|j| picked.index(j) + 1);
                let pair = |x: usize, y: usize| Subset::from_elements([x, y]).expect("distinct");
                let w = small_rational(&mut rng);
                let mut f = PwlExpr::zero(d).ok()?;
                f.add_term(pair(a, c), w.clone()).ok()?;
                f.add_term(pair(b, e), w.clone()).ok()?;
                f.add_term(pair(a, e), -w.clone()).ok()?;
                f.add_term(pair(b, c), -w).ok()?;
                f
            } else {
                let first = difference(&mut rng, d, k, &labels)?;
                let shared: Vec<Subset> = first.terms().map(|(m, _)| m).collect();
                let anchor = shared[rng.random_range(0..shared.len())];
                // The second difference reuses one element of the first.
                let pivot = anchor.elements()[rng.random_range(0..anchor.len())];
                let others: Vec<usize> = labels.iter().copied().filter(|&x| x != pivot).collect();
                let mut m = if k > 1 && !others.is_empty() {
                    random_set(&mut rng, &others, k - 1)
                } else {
                    Subset::EMPTY
                };
                m = m.union(Subset::singleton(pivot));
                let m2 = random_set(&mut rng, &labels, k);
                if m == m2 {
                    return None;
                }
                let w = small_rational(&mut rng);
                let mut second = PwlExpr::zero(d).ok()?;
                second.add_term(m, w.clone()).ok()?;
                second.add_term(m2, -w).ok()?;
                first.checked_add(&second).ok()?
            }
        }
    };
    Some((generator, expr))
}

enum Outcome {
    Accepted(Sample),
    Rejected(Generator),
    Unsound(Generator),
    Skipped(Generator),
}

fn evaluate(d: usize, k: usize, seed: u64, i: u64, require_hc: bool) -> Outcome {
    let Some((generator, expr)) = candidate(d, k, seed, i) else {
        return Outcome::Skipped(Generator::ALL[(i % 4) as usize]);
    };
    let f = phi(&expr);
    if !f.in_level_space(k) {
        return Outcome::Unsound(generator);
    }
    if f.is_zero() || (require_hc && !f.in_hc()) {
        return Outcome::Rejected(generator);
    }
    Outcome::Accepted(Sample {
        index: i,
        generator,
        expr,
        f,
    })
}

/// Draws candidates until `n` are accepted or the attempt cap is reached.
pub fn sample_sf_hc(d: usize, k: usize, n: usize, seed: u64) -> Result<SampleBatch> {
    sample_with(d, k, n, seed, true)
}

/// Like [`sample_sf_hc`]; with `require_hc = false` the `HC` filter is skipped.
pub fn sample_with(d: usize, k: usize, n: usize, seed: u64, require_hc: bool) -> Result<SampleBatch> {
    lattice::check_dimension(d, HARD_MAX_DIM)?;
    if d > 16 {
        return Err(Error::Argument(format!("sampling is limited to d ≤ 16, got {d}")));
    }
    const BATCH: u64 = 256;
    let cap = attempt_cap(n);
    let mut out = SampleBatch::default();
    let mut next = 0u64;
    while out.samples.len() < n && next < cap {
        let end = (next + BATCH).min(cap);
        let outcomes: Vec<Outcome> = (next..end)
            .into_par_iter()
            .map(|i| evaluate(d, k, seed, i, require_hc))
            .collect();
        for outcome in outcomes {
            if out.samples.len() == n {
                break;
            }
            out.attempted += 1;
            let slot = |g: Generator| g as usize;
            match outcome {
                Outcome::Accepted(sample) => {
                    let g = slot(sample.generator);
                    out.per_generator[g].0 += 1;
                    out.per_generator[g].1 += 1;
                    out.samples.push(sample);
                }
                Outcome::Rejected(g) | Outcome::Skipped(g) => out.per_generator[slot(g)].0 += 1,
                Outcome::Unsound(g) => {
                    out.per_generator[slot(g)].0 += 1;
                    out.unsound += 1;
                }
            }
        }
        next = end;
    }
    Ok(out)
}
