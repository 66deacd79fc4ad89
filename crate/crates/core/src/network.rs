//! Conforming maxout networks, simulated on the set-function side.
//!
//! A network on `R^d` reads the coordinate functions `x_1, ..., x_d`; every
//! neuron takes the maximum of `r` affine combinations of the previous layer.
//! For conforming neurons the maximum commutes with `Φ`, so a whole network
//! can be composed exactly as a [`SetFn`] on `[∅, [d]]`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Interval, Subset, HARD_MAX_DIM};
use crate::rational::{self, Rational};
use crate::setfn::{conformity_violation, pointwise_max, IntervalWitness, SetFn};
use crate::transform::RationalPoint;

/// `constant + Σ_j coeffs[j] · input_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affine {
    #[serde(with = "rational::serde_str_vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub constant: Rational,
}

impl Affine {
    /// The `j`-th input, unchanged.
    pub fn select(width: usize, j: usize) -> Self {
        let mut coeffs = vec![rational::zero(); width];
        coeffs[j] = rational::one();
        Affine {
            coeffs,
            constant: rational::zero(),
        }
    }

    pub fn constant(width: usize, c: Rational) -> Self {
        Affine {
            coeffs: vec![rational::zero(); width],
            constant: c,
        }
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if self.coeffs.len() != width {
            return Err(Error::Argument(format!(
                "affine map has {} coefficients but its input has width {width}",
                self.coeffs.len()
            )));
        }
        Ok(())
    }

    pub fn eval(&self, inputs: &[Rational]) -> Result<Rational> {
        self.check_width(inputs.len())?;
        let mut acc = self.constant.clone();
        for (c, x) in self.coeffs.iter().zip(inputs) {
            if !c.is_zero() {
                acc += c * x;
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, inputs: &[SetFn]) -> Result<SetFn> {
        self.check_width(inputs.len())?;
        let Some(first) = inputs.first() else {
            return Err(Error::Argument(
                "symbolic affine maps need at least one input to fix the domain".into(),
            ));
        };
        let mut acc = SetFn::constant(first.domain(), self.constant.clone());
        for (c, f) in self.coeffs.iter().zip(inputs) {
            if !c.is_zero() {
                acc = acc.checked_add(&f.scale(c))?;
            }
        }
        Ok(acc)
    }
}

/// A rank-`r` maxout layer: each neuron is a list of exactly `r` preactivations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub rank: usize,
    pub neurons: Vec<Vec<Affine>>,
}

impl LayerSpec {
    pub fn width(&self) -> usize {
        self.neurons.len()
    }

    fn validate(&self, input_width: usize) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Argument("layer rank must be at least 1".into()));
        }
        for (i, neuron) in self.neurons.iter().enumerate() {
            if neuron.len() != self.rank {
                return Err(Error::Argument(format!(
                    "neuron {i} has {} preactivations, layer rank is {}",
                    neuron.len(),
                    self.rank
                )));
            }
            for pre in neuron {
                pre.check_width(input_width)?;
            }
        }
        Ok(())
    }
}

/// Applies one layer symbolically, rejecting any neuron whose preactivations
/// are not conforming.
pub fn apply_maxout_layer(inputs: &[SetFn], layer: &LayerSpec) -> Result<Vec<SetFn>> {
    layer.validate(inputs.len())?;
    if let Some(first) = inputs.first() {
        for f in inputs {
            first.same_domain(f)?;
        }
    }
    layer
        .neurons
        .iter()
        .enumerate()
        .map(|(i, neuron)| {
            let pre = neuron
                .iter()
                .map(|a| a.apply(inputs))
                .collect::<Result<Vec<_>>>()?;
            if let Some(chain) = conformity_violation(&pre)? {
                return Err(Error::NotConforming {
                    neuron: Some(i),
                    chain,
                });
            }
            pointwise_max(&pre, false)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkPlan {
    pub d: usize,
    pub layers: Vec<LayerSpec>,
    pub output: Affine,
}

impl NetworkPlan {
    /// Checks that layer widths chain from the `d` inputs to the output.
    pub fn validate(&self) -> Result<()> {
        lattice::check_dimension(self.d, HARD_MAX_DIM)?;
        let mut width = self.d;
        for layer in &self.layers {
            layer.validate(width)?;
            width = layer.width();
        }
        self.output.check_width(width)
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.rank).collect()
    }

    /// The function computed by the plan, as a set function on `[∅, [d]]`.
    pub fn compose(&self) -> Result<SetFn> {
        self.validate()?;
        let domain = Interval::full(self.d);
        if self.d == 0 {
            return Ok(SetFn::constant(domain, self.output.constant.clone()));
        }
        let mut current: Vec<SetFn> = (1..=self.d)
            .map(|i| {
                SetFn::from_fn(domain, |s| {
                    if s.contains(i) {
                        rational::one()
                    } else {
                        rational::zero()
                    }
                })
            })
            .collect();
        for layer in &self.layers {
            current = apply_maxout_layer(&current, layer)?;
        }
        if current.is_empty() {
            return Ok(SetFn::constant(domain, self.output.constant.clone()));
        }
        self.output.apply(&current)
    }

    /// Exact forward pass at a point.
    pub fn run(&self, x: &RationalPoint) -> Result<Rational> {
        self.validate()?;
        if x.dim() != self.d {
            return Err(Error::Argument(format!(
                "point has {} coordinates, network expects {}",
                x.dim(),
                self.d
            )));
        }
        let mut current = x.coords().to_vec();
        for layer in &self.layers {
            current = layer
                .neurons
                .iter()
                .map(|neuron| {
                    let values = neuron
                        .iter()
                        .map(|a| a.eval(&current))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(values.into_iter().max().expect("rank ≥ 1"))
                })
                .collect::<Result<Vec<_>>>()?;
        }
        self.output.eval(&current)
    }
}

pub fn run_network(plan: &NetworkPlan, x: &RationalPoint) -> Result<Rational> {
    plan.run(x)
}

/// Tree of the balanced partition: a leaf is an input coordinate.
enum Block {
    Leaf(usize),
    Node(Vec<Block>),
}

fn partition(elements: &[usize], ranks: &[usize]) -> Block {
    let Some((&r, below)) = ranks.split_last() else {
        debug_assert_eq!(elements.len(), 1);
        return Block::Leaf(elements[0]);
    };
    let blocks = r.min(elements.len());
    let (base, extra) = (elements.len() / blocks, elements.len() % blocks);
    let mut children = Vec::with_capacity(blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        children.push(partition(&elements[start..start + len], below));
        start += len;
    }
    Block::Node(children)
}

/// A plan computing `σ_M` with the given layer ranks (Π ranks ≥ |M|).
///
/// The last layer takes one maximum over at most `r_ℓ` balanced blocks of
/// `M`, each of which is handled recursively by the earlier layers. Neurons
/// with fewer children than the rank repeat their last child.
pub fn build_max_network(d: usize, m: Subset, ranks: &[usize]) -> Result<NetworkPlan> {
    lattice::check_dimension(d, HARD_MAX_DIM)?;
    if m.is_empty() {
        return Err(Error::Argument("M must be nonempty".into()));
    }
    if !m.is_subset_of(Subset::full(d)) {
        return Err(Error::Argument(format!("{m} is not a subset of [{d}]")));
    }
    if ranks.is_empty() || ranks.contains(&0) {
        return Err(Error::Argument("ranks must be a nonempty list of positive integers".into()));
    }
    let capacity = ranks
        .iter()
        .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
        .unwrap_or(u128::MAX);
    if (m.len() as u128) > capacity {
        return Err(Error::Capacity {
            size: m.len(),
            capacity,
        });
    }

    let elements: Vec<usize> = m.elements().into_iter().map(|i| i - 1).collect();
    let tree = partition(&elements, ranks);

    // Layer by layer from the bottom: `frontier` holds the blocks whose
    // outputs the next layer consumes, each tagged with its index there.
    let mut layers = Vec::with_capacity(ranks.len());
    let mut level: Vec<&Block> = vec![&tree];
    let mut by_depth: Vec<Vec<&Block>> = Vec::new();
    while let Some(Block::Node(_)) = level.first() {
        by_depth.push(level.clone());
        level = level
            .iter()
            .flat_map(|b| match b {
                Block::Node(children) => children.iter().collect::<Vec<_>>(),
                Block::Leaf(_) => unreachable!("leaves only at the bottom"),
            })
            .collect();
    }
    by_depth.reverse();

    let mut width = d;
    let mut positions: Vec<usize> = level
        .iter()
        .map(|b| match b {
            Block::Leaf(i) => *i,
            Block::Node(_) => unreachable!(),
        })
        .collect();
    for (nodes, &rank) in by_depth.iter().zip(ranks) {
        let mut neurons = Vec::with_capacity(nodes.len());
        let mut next = 0;
        for node in nodes {
            let Block::Node(children) = node else { unreachable!() };
            let inputs = &positions[next..next + children.len()];
            next += children.len();
            let mut pre: Vec<Affine> = inputs.iter().map(|&j| Affine::select(width, j)).collect();
            let last = pre.last().expect("blocks are nonempty").clone();
            pre.resize(rank, last);
            neurons.push(pre);
        }
        positions = (0..nodes.len()).collect();
        width = nodes.len();
        layers.push(LayerSpec { rank, neurons });
    }
    Ok(NetworkPlan {
        d,
        layers,
        output: Affine::select(width, 0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundRule {
    /// `2^(2^ℓ - 1)`.
    Closed,
    /// `k_1 = 2`, `k_ℓ = k_{ℓ-1}^2 + k_{ℓ-1}`.
    Recursive,
    /// The recursion seeded with the sharp two-layer value `k_2 = 4`.
    #[default]
    Exact4,
}

impl BoundRule {
    pub fn name(self) -> &'static str {
        match self {
            BoundRule::Closed => "closed",
            BoundRule::Recursive => "recursive",
            BoundRule::Exact4 => "exact4",
        }
    }
}

impl fmt::Display for BoundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(BoundRule::Closed),
            "recursive" => Ok(BoundRule::Recursive),
            "exact4" => Ok(BoundRule::Exact4),
            other => Err(Error::Parse(format!(
                "unknown bound rule {other:?} (expected closed, recursive or exact4)"
            ))),
        }
    }
}

/// Every function of an `ℓ`-layer conforming network lies in `Sf(k)` for
/// the returned `k`.
pub fn depth_bound(layers: usize, rule: BoundRule) -> Result<u128> {
    if layers == 0 {
        return Err(Error::Argument("the number of layers must be at least 1".into()));
    }
    let overflow = || Error::Overflow(format!("{rule} bound for ℓ = {layers} exceeds 128 bits"));
    match rule {
        BoundRule::Closed => {
            let exponent = 1u32
                .checked_shl(layers as u32)
                .filter(|_| layers < 32)
                .map(|p| p - 1)
                .ok_or_else(overflow)?;
            1u128.checked_shl(exponent).filter(|_| exponent < 128).ok_or_else(overflow)
        }
        BoundRule::Recursive | BoundRule::Exact4 => {
            let (mut k, start) = match (rule, layers) {
                (BoundRule::Exact4, l) if l >= 2 => (4u128, 2),
                _ => (2u128, 1),
            };
            for _ in start..layers {
                k = k
                    .checked_mul(k)
                    .and_then(|sq| sq.checked_add(k))
                    .ok_or_else(overflow)?;
            }
            Ok(k)
        }
    }
}

/// Machine-checkable evidence that a target is not computed by any
/// conforming network of the given depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "S")]
    pub lower: Subset,
    #[serde(rename = "T")]
    pub upper: Subset,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    pub depth_bound: u128,
    pub rule: BoundRule,
}

impl Certificate {
    /// Re-checks the certificate against `target` from scratch.
    pub fn verify(&self, target: &SetFn) -> bool {
        let rank_ok = self.lower.is_subset_of(self.upper)
            && self.upper.difference(self.lower).len() as u128 == self.depth_bound + 1;
        rank_ok
            && !self.value.is_zero()
            && target
                .alternating_sum(self.lower, self.upper)
                .is_ok_and(|v| v == self.value)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<alpha[{}, {}], F> = {} with depth bound {} ({})",
            self.lower,
            self.upper,
            rational::format(&self.value),
            self.depth_bound,
            self.rule
        )
    }
}

/// A rank-`(k+1)` interval with nonzero alternating sum, `k = depth_bound(ℓ, rule)`,
/// or `None` when the target lies in `Sf(k)` (which proves nothing).
pub fn certify(target: &SetFn, layers: usize, rule: BoundRule) -> Result<Option<Certificate>> {
    let k = depth_bound(layers, rule)?;
    if k >= target.domain().rank() as u128 {
        return Ok(None);
    }
    Ok(target
        .first_nonzero_of_rank(k as usize + 1)
        .map(|IntervalWitness { lower, upper, value }| Certificate {
            lower,
            upper,
            value,
            depth_bound: k,
            rule,
        }))
}

/// [`certify`] with the sharpest rule.
pub fn certify_not_representable(target: &SetFn, layers: usize) -> Result<Option<Certificate>> {
    certify(target, layers, BoundRule::Exact4)
}
