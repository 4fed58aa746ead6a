//! Coarse bi-Lipschitz embeddings: rounding to an `eps/2`-net followed by the
//! `lp` embedding, plus the grid nets `(1/k) Z^n ∩ k B_inf` and the rescaling
//! `x -> Theta(k x) / k` onto the unit ball.

use serde::Serialize;

use crate::ambient::{distance, BlockVector, Exponent, NormSpec};
use crate::error::{Error, Result};
use crate::lp::{lp_distance, LpEmbedding, LpParams, LpPointSet};
use crate::net::{greedy_maximal_net, Ball};
use crate::verify::{verify_bounds, BoundsReport, Tolerance};

/// Default cap on generated grid sizes.
pub const DEFAULT_GRID_CAP: u128 = 1 << 20;

pub const COARSE_TOLERANCE: Tolerance = Tolerance::relative(1e-9);

/// `(C_d, C_a)` in `d / C_d - C_a <= |f(a) - f(b)| <= C_d d + C_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoarseConstants {
    pub c_d: f64,
    pub c_a: f64,
    pub epsilon: f64,
}

impl CoarseConstants {
    pub fn lower(&self, d: f64) -> f64 {
        d / self.c_d - self.c_a
    }

    pub fn upper(&self, d: f64) -> f64 {
        self.c_d * d + self.c_a
    }
}

/// An `eps/2`-net `net` of a point set and the rounding map onto it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rounding {
    pub epsilon: f64,
    /// Net members as indices into the rounded set, seed (basepoint) first.
    pub net: Vec<usize>,
    /// `beta[t]` is the net member `t` rounds to.
    pub beta: Vec<usize>,
}

/// Greedy `eps/2`-net of the whole set seeded at the basepoint, and
/// `beta(t)` = first member strictly within `eps/2` of `t` in admission order.
pub fn net_round(set: &LpPointSet, epsilon: f64) -> Result<Rounding> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("{epsilon} is not a positive number"),
        });
    }
    let metric = set.metric()?;
    let net = greedy_maximal_net(&metric, Ball::everything(set.basepoint), epsilon / 2.0, set.basepoint)?;
    let beta = (0..set.len())
        .map(|t| {
            net.nearest_in_scan_order(&metric, t)
                .expect("greedy nets cover their ball")
        })
        .collect();
    Ok(Rounding {
        epsilon,
        net: net.members().to_vec(),
        beta,
    })
}

/// `f o beta`, where `f` is the `lp` embedding of the net.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseEmbedding {
    pub rounding: Rounding,
    pub constants: CoarseConstants,
    pub net_embedding: LpEmbedding,
    /// Image of every input point, in the input's units.
    pub images: Vec<BlockVector>,
    pub norm: NormSpec,
}

/// Rounds to an `eps/2`-net, embeds the net, and composes. The returned
/// constants are `C_d = max(9, 20 lambda^2 (1+delta)^2)` and `C_a = 9 eps`.
pub fn coarse_embed(set: &LpPointSet, epsilon: f64, params: LpParams) -> Result<CoarseEmbedding> {
    let rounding = net_round(set, epsilon)?;
    let net_points = rounding.net.iter().map(|&i| set.points[i].clone()).collect();
    // the seed is the basepoint and is admitted first
    let net_set = LpPointSet::new(set.p, net_points, 0)?;
    let c_d = params.lower_factor().max(9.0);
    let net_embedding = LpEmbedding::build(&net_set, params)?;
    let net_images = net_embedding.images_original_units();
    let position: std::collections::HashMap<usize, usize> =
        rounding.net.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let images = rounding
        .beta
        .iter()
        .map(|m| net_images[position[m]].clone())
        .collect();
    Ok(CoarseEmbedding {
        constants: CoarseConstants {
            c_d,
            c_a: 9.0 * epsilon,
            epsilon,
        },
        norm: net_embedding.norm(),
        rounding,
        net_embedding,
        images,
    })
}

/// Certifies the coarse inequality for `f o beta` on every pair of `set`.
pub fn verify_coarse(set: &LpPointSet, embedding: &CoarseEmbedding) -> Result<BoundsReport> {
    let metric = set.metric()?;
    let c = embedding.constants;
    let norm = embedding.norm;
    let report = verify_bounds(
        &metric,
        &embedding.images,
        |a, b| distance(a, b, norm),
        |d| c.lower(d),
        |d| c.upper(d),
        COARSE_TOLERANCE,
    )?;
    Ok(report
        .with_constant("c_d", c.c_d)
        .with_constant("c_a", c.c_a)
        .with_constant("epsilon", c.epsilon)
        .with_constant("net_size", embedding.rounding.net.len() as f64))
}

/// Largest `| |beta a - beta b| - |a - b| |` over all pairs.
pub fn max_rounding_defect(set: &LpPointSet, rounding: &Rounding) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..set.len() {
        for b in (a + 1)..set.len() {
            let rounded = set.dist(rounding.beta[a], rounding.beta[b]);
            worst = worst.max((rounded - set.dist(a, b)).abs());
        }
    }
    worst
}

/// `(1/k) Z^n ∩ [-k, k]^n` in lexicographic order (first coordinate slowest).
pub fn grid_net(n_dim: usize, k: u32, cap: u128) -> Result<Vec<Vec<f64>>> {
    if n_dim == 0 || k == 0 {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "dimension and k must be positive".into(),
        });
    }
    let side = 2 * (k as u128).pow(2) + 1;
    let requested = side.checked_pow(n_dim as u32).unwrap_or(u128::MAX);
    if requested > cap {
        return Err(Error::SizeCapExceeded { requested, cap });
    }
    let kk = (k as i64).pow(2);
    let coords: Vec<f64> = (-kk..=kk).map(|i| i as f64 / k as f64).collect();
    let mut out = Vec::with_capacity(requested as usize);
    let mut idx = vec![0usize; n_dim];
    loop {
        out.push(idx.iter().map(|&i| coords[i]).collect());
        let mut c = n_dim;
        loop {
            if c == 0 {
                return Ok(out);
            }
            c -= 1;
            idx[c] += 1;
            if idx[c] < coords.len() {
                break;
            }
            idx[c] = 0;
        }
    }
}

/// A map defined on `grid_net(n_dim, k)` together with its coarse constants.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMapping {
    pub n_dim: usize,
    pub k: u32,
    pub points: Vec<Vec<f64>>,
    pub images: Vec<BlockVector>,
    pub norm: NormSpec,
    pub c_d: f64,
    pub c_a: f64,
}

impl GridMapping {
    /// The identity of `grid_net(n_dim, k)` into a single sup-normed block.
    pub fn identity(n_dim: usize, k: u32, cap: u128) -> Result<Self> {
        let points = grid_net(n_dim, k, cap)?;
        let images = points
            .iter()
            .map(|x| BlockVector::from_blocks([(0, x.clone())]))
            .collect();
        Ok(Self {
            n_dim,
            k,
            points,
            images,
            norm: NormSpec::SUP_SUM,
            c_d: 1.0,
            c_a: 0.0,
        })
    }

    /// Coarse embedding of the grid (sup metric, origin as basepoint).
    pub fn coarse(n_dim: usize, k: u32, epsilon: f64, params: LpParams, cap: u128) -> Result<Self> {
        let points = grid_net(n_dim, k, cap)?;
        let origin = points.len() / 2;
        let set = LpPointSet::new(Exponent::INFINITY, points, origin)?;
        let emb = coarse_embed(&set, epsilon, params)?;
        Ok(Self {
            n_dim,
            k,
            points: set.points,
            images: emb.images,
            norm: emb.norm,
            c_d: emb.constants.c_d,
            c_a: emb.constants.c_a,
        })
    }

    pub fn constants(&self) -> CoarseConstants {
        CoarseConstants {
            c_d: self.c_d,
            c_a: self.c_a,
            epsilon: f64::NAN,
        }
    }
}

/// `Phi_k(x) = Theta(k x) / k` on `grid_net(n_dim, k) / k ⊂ B_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledMap {
    pub n_dim: usize,
    pub k: u32,
    pub points: Vec<Vec<f64>>,
    pub images: Vec<BlockVector>,
    pub norm: NormSpec,
    pub c_d: f64,
    pub c_a: f64,
}

const GRID_MATCH_TOL: f64 = 1e-12;

/// Restricts and rescales `theta` to the unit ball. If `theta` satisfies the
/// coarse inequality with `(C_d, C_a)`, the result satisfies it with
/// `(C_d, C_a / k)`.
pub fn rescaled_restriction(theta: &GridMapping) -> Result<RescaledMap> {
    let expected = grid_net(theta.n_dim, theta.k, u128::MAX)?;
    if theta.points.len() != expected.len() || theta.images.len() != expected.len() {
        return Err(Error::DomainMismatch(format!(
            "expected {} grid points, got {} points and {} images",
            expected.len(),
            theta.points.len(),
            theta.images.len()
        )));
    }
    for (i, (x, y)) in theta.points.iter().zip(&expected).enumerate() {
        if x.len() != y.len() || x.iter().zip(y).any(|(a, b)| (a - b).abs() > GRID_MATCH_TOL) {
            return Err(Error::DomainMismatch(format!("grid point {i} differs")));
        }
    }
    let origin = expected.len() / 2;
    if !theta.images[origin].is_empty() {
        return Err(Error::DomainMismatch("mapping does not fix the origin".into()));
    }
    let k = theta.k as f64;
    Ok(RescaledMap {
        n_dim: theta.n_dim,
        k: theta.k,
        points: expected
            .iter()
            .map(|g| g.iter().map(|c| c / k).collect())
            .collect(),
        images: theta.images.iter().map(|v| v.scaled(1.0 / k)).collect(),
        norm: theta.norm,
        c_d: theta.c_d,
        c_a: theta.c_a / k,
    })
}

impl RescaledMap {
    /// `Psi_k`: nearest point of the step-`1/k` grid `(1/k) Z^n ∩ B_inf`,
    /// coordinatewise, ties toward minus infinity. `|x - Psi_k(x)|_inf <= 1/(2k)`.
    pub fn round(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_dim {
            return Err(Error::DomainMismatch(format!(
                "point has dimension {}, expected {}",
                x.len(),
                self.n_dim
            )));
        }
        if x.iter().any(|c| !(c.abs() <= 1.0 + GRID_MATCH_TOL)) {
            return Err(Error::DomainMismatch("point outside the unit sup-ball".into()));
        }
        let k = self.k as f64;
        Ok(x.iter()
            .map(|&c| ((c * k - 0.5).ceil().clamp(-k, k)) / k)
            .collect())
    }

    /// Index of a point of `(1/k) Z^n ∩ B_inf` in [`RescaledMap::points`].
    fn index_of_coarse_point(&self, y: &[f64]) -> usize {
        let k = self.k as i64;
        let side = 2 * k * k + 1;
        y.iter().fold(0usize, |acc, &c| {
            let step = (c * k as f64).round() as i64; // in [-k, k]
            let fine = step * k + k * k; // index along the 1/k^2 axis
            acc * side as usize + fine as usize
        })
    }

    /// `Phi_k(Psi_k(x))`.
    pub fn eval(&self, x: &[f64]) -> Result<&BlockVector> {
        let y = self.round(x)?;
        Ok(&self.images[self.index_of_coarse_point(&y)])
    }

    pub fn constants(&self) -> CoarseConstants {
        CoarseConstants {
            c_d: self.c_d,
            c_a: self.c_a,
            epsilon: f64::NAN,
        }
    }
}

fn verify_grid(points: &[Vec<f64>], images: &[BlockVector], norm: NormSpec, c: CoarseConstants) -> Result<BoundsReport> {
    let metric = crate::metric::FiniteMetricSpace::from_fn(points.len(), |a, b| {
        lp_distance(Exponent::INFINITY, &points[a], &points[b])
    })?;
    verify_bounds(
        &metric,
        images,
        |a, b| distance(a, b, norm),
        |d| c.lower(d),
        |d| c.upper(d),
        COARSE_TOLERANCE,
    )
}

/// Pairwise check of a grid mapping against its own constants (sup metric).
pub fn verify_grid_mapping(theta: &GridMapping) -> Result<BoundsReport> {
    Ok(verify_grid(&theta.points, &theta.images, theta.norm, theta.constants())?
        .with_constant("c_d", theta.c_d)
        .with_constant("c_a", theta.c_a))
}

/// Pairwise check of the rescaled map against `(C_d, C_a / k)`.
pub fn verify_rescaled(map: &RescaledMap) -> Result<BoundsReport> {
    Ok(verify_grid(&map.points, &map.images, map.norm, map.constants())?
        .with_constant("c_d", map.c_d)
        .with_constant("c_a", map.c_a)
        .with_constant("k", map.k as f64))
}
