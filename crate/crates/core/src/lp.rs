//! Lipschitz embedding of finite subsets of `lp^d` into an `lp`-sum of blocks.
//!
//! After translating the basepoint to the origin and scaling so every nonzero
//! point has norm at least 1, a point with `2^n <= |t| < 2^(n+1)` (`n >= 0`)
//! is sent to `lambda_t theta_n R t` in block `n` plus
//! `(1 - lambda_t) theta_(n+1) R t` in block `n + 1`. `R` is a fixed diagonal
//! map with entries in `[1/lambda_sim, 1]`, `theta_n` are block isomorphism
//! factors in `[1/(1+delta), 1]`. The map obeys
//! `d / (20 lambda^2 (1+delta)^2) <= |f(a) - f(b)| <= 9 d`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{distance, unit_draw, BlockIsoModel, BlockVector, Exponent, NormSpec};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::proper::pow2;
use crate::verify::{verify_bounds, BoundsReport, Tolerance};

const DIAGONAL_DOMAIN: u64 = 1;

/// A finite point cloud in `R^dim` with the `lp` distance and a basepoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpPointSet {
    pub p: Exponent,
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub basepoint: usize,
}

impl LpPointSet {
    /// Checks dimensions and that the induced distances form a metric.
    pub fn new(p: Exponent, points: Vec<Vec<f64>>, basepoint: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "points must have at least one coordinate".into(),
            });
        }
        for (index, x) in points.iter().enumerate() {
            if x.len() != dim {
                return Err(Error::PointDimension {
                    index,
                    got: x.len(),
                    expected: dim,
                });
            }
            if let Some(c) = x.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteEntry(index, c));
            }
        }
        if basepoint >= points.len() {
            return Err(Error::IndexOutOfRange {
                index: basepoint,
                len: points.len(),
            });
        }
        let set = Self {
            p,
            dim,
            points,
            basepoint,
        };
        set.metric()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dist(&self, a: usize, b: usize) -> f64 {
        lp_distance(self.p, &self.points[a], &self.points[b])
    }

    pub fn norm_of(&self, x: &[f64]) -> f64 {
        self.p.norm(x.iter().copied())
    }

    /// The induced finite metric space (validated).
    pub fn metric(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::from_fn(self.len(), |a, b| self.dist(a, b))
    }
}

pub fn lp_distance(p: Exponent, x: &[f64], y: &[f64]) -> f64 {
    p.norm(x.iter().zip(y).map(|(a, b)| a - b))
}

/// Affine change of coordinates `x -> scale * (x - translation)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalization {
    pub translation: Vec<f64>,
    pub scale: f64,
}

impl Normalization {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.translation)
            .map(|(a, t)| self.scale * (a - t))
            .collect()
    }
}

/// Moves the basepoint to the origin and, if the smallest nonzero norm `m` is
/// below 1, scales by `1/m`.
pub fn normalize_pointed(set: &LpPointSet) -> (LpPointSet, Normalization) {
    let translation = set.points[set.basepoint].clone();
    let shifted: Vec<Vec<f64>> = set
        .points
        .iter()
        .map(|x| x.iter().zip(&translation).map(|(a, t)| a - t).collect())
        .collect();
    let min_norm = shifted
        .iter()
        .map(|x| set.p.norm(x.iter().copied()))
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut scale = 1.0;
    let mut points = shifted.clone();
    if min_norm < 1.0 {
        scale = 1.0 / min_norm;
        loop {
            points = shifted
                .iter()
                .map(|x| x.iter().map(|a| a * scale).collect())
                .collect();
            let smallest = points
                .iter()
                .map(|x: &Vec<f64>| set.p.norm(x.iter().copied()))
                .filter(|&r| r > 0.0)
                .fold(f64::INFINITY, f64::min);
            if smallest >= 1.0 {
                break;
            }
            // rounding left the closest point a hair inside the unit ball
            scale *= 1.0 + 4.0 * f64::EPSILON;
        }
    }
    (
        LpPointSet {
            p: set.p,
            dim: set.dim,
            points,
            basepoint: set.basepoint,
        },
        Normalization { translation, scale },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaMode {
    Exact,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpParams {
    /// Block isomorphism slack; factors lie in `[1/(1+delta), 1]`.
    pub delta: f64,
    /// Simulated isomorphism constant; diagonal entries lie in `[1/lambda_sim, 1]`.
    pub lambda_sim: f64,
    pub iso: BlockIsoModel,
    pub seed: u64,
}

impl LpParams {
    pub fn new(delta: f64, lambda_sim: f64, theta: ThetaMode, seed: u64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("{delta} is not a finite non-negative number"),
            });
        }
        if !(lambda_sim >= 1.0 && lambda_sim.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda_sim",
                reason: format!("{lambda_sim} is below 1"),
            });
        }
        let iso = match theta {
            ThetaMode::Exact => BlockIsoModel::exact(),
            ThetaMode::Random => BlockIsoModel::seeded(seed, 1.0 / (1.0 + delta), 1.0)?,
        };
        Ok(Self {
            delta,
            lambda_sim,
            iso,
            seed,
        })
    }

    /// `20 lambda^2 (1 + delta)^2`.
    pub fn lower_factor(&self) -> f64 {
        20.0 * self.lambda_sim.powi(2) * (1.0 + self.delta).powi(2)
    }

    /// Diagonal of the simulated isomorphism `R`.
    pub fn diagonal(&self, dim: usize) -> Vec<f64> {
        if self.lambda_sim == 1.0 {
            return vec![1.0; dim];
        }
        let lo = 1.0 / self.lambda_sim;
        (0..dim)
            .map(|i| (lo + (1.0 - lo) * unit_draw(self.seed, DIAGONAL_DOMAIN, i as u64)).clamp(lo, 1.0))
            .collect()
    }
}

impl Default for LpParams {
    fn default() -> Self {
        Self::new(0.01, 1.0, ThetaMode::Exact, 0).unwrap()
    }
}

/// Image of `t` (normalized coordinates) given the diagonal of `R`.
pub fn embed_point_lp(t: &[f64], p: Exponent, params: &LpParams, diagonal: &[f64]) -> Result<BlockVector> {
    let r = p.norm(t.iter().copied());
    if r == 0.0 {
        return Ok(BlockVector::new());
    }
    if r < 1.0 {
        return Err(Error::NormBelowOne(r));
    }
    let mut n = r.log2().floor() as i32;
    while pow2(n) > r {
        n -= 1;
    }
    while pow2(n + 1) <= r {
        n += 1;
    }
    Ok(embed_in_annulus(t, r, n, params, diagonal))
}

fn embed_in_annulus(t: &[f64], r: f64, n: i32, params: &LpParams, diagonal: &[f64]) -> BlockVector {
    let lambda = (pow2(n + 1) - r) / pow2(n);
    let mut out = BlockVector::new();
    for (tier, coefficient) in [(n, lambda), (n + 1, 1.0 - lambda)] {
        if coefficient == 0.0 {
            continue;
        }
        let id = tier as u64;
        let scale = coefficient * params.iso.factor(id);
        out.insert(id, t.iter().zip(diagonal).map(|(x, r)| scale * (r * x)).collect());
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpEmbedding {
    original: LpPointSet,
    set: LpPointSet,
    normalization: Normalization,
    params: LpParams,
    diagonal: Vec<f64>,
    norm: NormSpec,
    images: Vec<BlockVector>,
}

impl LpEmbedding {
    pub fn build(set: &LpPointSet, params: LpParams) -> Result<Self> {
        let (normalized, normalization) = normalize_pointed(set);
        let diagonal = params.diagonal(set.dim);
        let images = normalized
            .points
            .par_iter()
            .map(|t| embed_point_lp(t, normalized.p, &params, &diagonal))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            original: set.clone(),
            norm: NormSpec::lp_sum(set.p),
            set: normalized,
            normalization,
            params,
            diagonal,
            images,
        })
    }

    /// The normalized point set the images are computed on.
    pub fn set(&self) -> &LpPointSet {
        &self.set
    }

    pub fn original(&self) -> &LpPointSet {
        &self.original
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn params(&self) -> &LpParams {
        &self.params
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn norm(&self) -> NormSpec {
        self.norm
    }

    /// Images in normalized units.
    pub fn images(&self) -> &[BlockVector] {
        &self.images
    }

    /// Images in the units of the original point set (`f(t) / scale`).
    pub fn images_original_units(&self) -> Vec<BlockVector> {
        let s = 1.0 / self.normalization.scale;
        self.images.iter().map(|v| v.scaled(s)).collect()
    }

    /// Embeds an arbitrary vector given in normalized coordinates.
    pub fn embed(&self, t: &[f64]) -> Result<BlockVector> {
        if t.len() != self.set.dim {
            return Err(Error::PointDimension {
                index: 0,
                got: t.len(),
                expected: self.set.dim,
            });
        }
        embed_point_lp(t, self.set.p, &self.params, &self.diagonal)
    }

    /// Image of normalized point `t` using the gluing formula of annulus `n`
    /// (`2^n <= |t| <= 2^(n+1)`).
    pub fn embed_in_annulus(&self, t: &[f64], n: i32) -> Result<BlockVector> {
        let r = self.set.norm_of(t);
        if !(n >= 0 && pow2(n) <= r && r <= pow2(n + 1)) {
            return Err(Error::InvalidParameter {
                name: "annulus",
                reason: format!("|t| = {r} is not in [2^{n}, 2^{}]", n + 1),
            });
        }
        Ok(embed_in_annulus(t, r, n, &self.params, &self.diagonal))
    }

    pub fn image_distance(&self, a: usize, b: usize) -> f64 {
        distance(&self.images[a], &self.images[b], self.norm)
    }
}

pub const LP_TOLERANCE: Tolerance = Tolerance::relative(1e-9);

/// Certifies `d / (20 lambda^2 (1+delta)^2) <= |f(a) - f(b)| <= 9 d` on the
/// normalized set.
pub fn verify_lp(embedding: &LpEmbedding) -> Result<BoundsReport> {
    let metric = embedding.set.metric()?;
    let factor = embedding.params.lower_factor();
    let norm = embedding.norm;
    let report = verify_bounds(
        &metric,
        &embedding.images,
        |a, b| distance(a, b, norm),
        |d| d / factor,
        |d| 9.0 * d,
        LP_TOLERANCE,
    )?;
    Ok(report
        .with_constant("lower_factor", factor)
        .with_constant("upper_factor", 9.0)
        .with_constant("lambda_sim", embedding.params.lambda_sim)
        .with_constant("delta", embedding.params.delta)
        .with_constant("normalization_scale", embedding.normalization.scale))
}
