//! Block-decomposed target space: sparse block vectors, sup-sum and lp-sum
//! norms, the `(n, k) -> block id` pairing, and block isomorphism factors.
//!
//! The target is modeled as a direct sum of finite-dimensional blocks in
//! which every block projection has norm one. Block isomorphisms are
//! modeled as scalar factors `theta_j` drawn from an interval inside `(0, 1]`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type BlockId = u64;

/// Sparse map from block id to coordinate vector. Zero blocks are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BlockVector {
    blocks: BTreeMap<BlockId, Vec<f64>>,
}

impl BlockVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_blocks(blocks: impl IntoIterator<Item = (BlockId, Vec<f64>)>) -> Self {
        let mut v = Self::new();
        for (id, block) in blocks {
            v.insert(id, block);
        }
        v
    }

    /// Stores `block` at `id`, replacing any previous block. A zero block clears `id`.
    pub fn insert(&mut self, id: BlockId, block: Vec<f64>) {
        if block.iter().all(|&x| x == 0.0) {
            self.blocks.remove(&id);
        } else {
            self.blocks.insert(id, block);
        }
    }

    pub fn get(&self, id: BlockId) -> Option<&[f64]> {
        self.blocks.get(&id).map(Vec::as_slice)
    }

    pub fn block_ids(&self) -> impl Iterator<Item = BlockId> + '_ {
        self.blocks.keys().copied()
    }

    pub fn blocks(&self) -> impl Iterator<Item = (BlockId, &[f64])> {
        self.blocks.iter().map(|(&id, b)| (id, b.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn scaled(&self, a: f64) -> BlockVector {
        BlockVector::from_blocks(
            self.blocks
                .iter()
                .map(|(&id, b)| (id, b.iter().map(|x| a * x).collect())),
        )
    }

    pub fn without_block(&self, id: BlockId) -> BlockVector {
        let mut v = self.clone();
        v.blocks.remove(&id);
        v
    }
}

impl Serialize for BlockVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.blocks.iter().map(|(id, b)| (id.to_string(), b)))
    }
}

/// A norm exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `lp` norm of the coordinates produced by `xs`.
    pub fn norm(self, xs: impl Iterator<Item = f64>) -> f64 {
        let p = self.0;
        if p.is_infinite() {
            xs.fold(0.0, |m, x| m.max(x.abs()))
        } else if p == 1.0 {
            xs.map(f64::abs).sum()
        } else if p == 2.0 {
            xs.map(|x| x * x).sum::<f64>().sqrt()
        } else {
            xs.map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter {
                    name: "p",
                    reason: format!("cannot parse exponent {s:?}"),
                })
                .and_then(Exponent::new),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// Outer aggregation exponent over blocks and inner exponent within a block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormSpec {
    pub outer: Exponent,
    pub inner: Exponent,
}

impl NormSpec {
    /// Sup over blocks of the sup norm inside each block.
    pub const SUP_SUM: NormSpec = NormSpec {
        outer: Exponent::INFINITY,
        inner: Exponent::INFINITY,
    };

    /// `lp`-sum of `lp` blocks.
    pub fn lp_sum(p: Exponent) -> Self {
        NormSpec { outer: p, inner: p }
    }
}

/// Norm of `v` under `spec`.
pub fn outer_norm(v: &BlockVector, spec: NormSpec) -> f64 {
    spec.outer
        .norm(v.blocks.values().map(|b| spec.inner.norm(b.iter().copied())))
}

/// `outer_norm(a - b)` without materializing the difference.
pub fn distance(a: &BlockVector, b: &BlockVector, spec: NormSpec) -> f64 {
    let mut left = a.blocks.iter().peekable();
    let mut right = b.blocks.iter().peekable();
    let mut inner_norms = Vec::with_capacity(a.len() + b.len());
    loop {
        match (left.peek(), right.peek()) {
            (None, None) => break,
            (Some((_, x)), None) => {
                inner_norms.push(spec.inner.norm(x.iter().copied()));
                left.next();
            }
            (None, Some((_, y))) => {
                inner_norms.push(spec.inner.norm(y.iter().copied()));
                right.next();
            }
            (Some((i, x)), Some((j, y))) => {
                if i < j {
                    inner_norms.push(spec.inner.norm(x.iter().copied()));
                    left.next();
                } else if j < i {
                    inner_norms.push(spec.inner.norm(y.iter().copied()));
                    right.next();
                } else {
                    debug_assert_eq!(x.len(), y.len(), "block {i} dimension mismatch");
                    let dim = x.len().max(y.len());
                    let diff = (0..dim).map(|c| {
                        x.get(c).copied().unwrap_or(0.0) - y.get(c).copied().unwrap_or(0.0)
                    });
                    inner_norms.push(spec.inner.norm(diff));
                    left.next();
                    right.next();
                }
            }
        }
    }
    spec.outer.norm(inner_norms.into_iter())
}

/// The component of `v` in block `j`.
pub fn project_block(v: &BlockVector, j: BlockId) -> BlockVector {
    match v.blocks.get(&j) {
        Some(b) => BlockVector::from_blocks([(j, b.clone())]),
        None => BlockVector::new(),
    }
}

/// `a * v + b * w`.
pub fn axpy(a: f64, v: &BlockVector, b: f64, w: &BlockVector) -> Result<BlockVector> {
    let mut out = BTreeMap::new();
    for (&id, x) in &v.blocks {
        out.insert(id, x.iter().map(|c| a * c).collect::<Vec<_>>());
    }
    for (&id, y) in &w.blocks {
        match out.get_mut(&id) {
            Some(acc) => {
                if acc.len() != y.len() {
                    return Err(Error::DimensionMismatch(id));
                }
                for (s, c) in acc.iter_mut().zip(y) {
                    *s += b * c;
                }
            }
            None => {
                out.insert(id, y.iter().map(|c| b * c).collect());
            }
        }
    }
    Ok(BlockVector::from_blocks(out))
}

/// Bijection `Z x {1, 2, ...} -> {0, 1, ...}`: zigzag on `n`, then Cantor pairing
/// with `k - 1`.
pub fn pair_index(n: i64, k: i64) -> Result<BlockId> {
    if k < 1 {
        return Err(Error::NonpositiveK(k));
    }
    let z = if n >= 0 { 2 * n as u64 } else { (-2 * n - 1) as u64 };
    let y = (k - 1) as u64;
    let s = z + y;
    Ok(s * (s + 1) / 2 + y)
}

/// Inverse of [`pair_index`].
pub fn unpair(id: BlockId) -> (i64, i64) {
    // largest s with s(s+1)/2 <= id
    let mut s = (((8.0 * id as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as u64;
    while s * (s + 1) / 2 > id {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= id {
        s += 1;
    }
    let y = id - s * (s + 1) / 2;
    let z = s - y;
    let n = if z.is_multiple_of(2) {
        (z / 2) as i64
    } else {
        -(z.div_ceil(2) as i64)
    };
    (n, y as i64 + 1)
}

/// Uniform draw in `[0, 1)` from a counter-based stream keyed by `(seed, domain, index)`.
pub(crate) fn unit_draw(seed: u64, domain: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.set_word_pos((domain as u128) << 32);
    rng.random::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum IsoMode {
    Exact,
    FixedFactor { theta: f64 },
    SeededRandom { seed: u64 },
}

/// Per-block isomorphism factors `theta_j` inside `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockIsoModel {
    pub mode: IsoMode,
    pub lo: f64,
    pub hi: f64,
}

const THETA_DOMAIN: u64 = 0;

impl BlockIsoModel {
    pub fn exact() -> Self {
        Self {
            mode: IsoMode::Exact,
            lo: 1.0,
            hi: 1.0,
        }
    }

    pub fn fixed(theta: f64, lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi)?;
        if !(lo..=hi).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("{theta} outside [{lo}, {hi}]"),
            });
        }
        Ok(Self {
            mode: IsoMode::FixedFactor { theta },
            lo,
            hi,
        })
    }

    pub fn seeded(seed: u64, lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi)?;
        Ok(Self {
            mode: IsoMode::SeededRandom { seed },
            lo,
            hi,
        })
    }

    pub fn factor(&self, j: BlockId) -> f64 {
        match self.mode {
            IsoMode::Exact => 1.0,
            IsoMode::FixedFactor { theta } => theta,
            IsoMode::SeededRandom { seed } => {
                let u = unit_draw(seed, THETA_DOMAIN, j);
                (self.lo + (self.hi - self.lo) * u).clamp(self.lo, self.hi)
            }
        }
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo > 0.0 && lo <= hi && hi <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidIsoBounds(lo, hi))
    }
}
