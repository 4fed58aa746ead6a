//! Strong uniform embedding of a finite pointed metric space into the
//! sup-sum of sup-normed blocks.
//!
//! For each dyadic scale `n` the ball `B_n = B(t0, 2^(n+1))` carries a family
//! of greedy nets `M_n^k` of radius `2^(-k+n+3)`, `k = 1..=k_max(n)`, all
//! seeded at `t0`. A point `t` of `B_n` gets Fréchet coordinates
//! `(d(t, s) - |s|)_{s in M_n^k}` in each net; these are weighted by
//! `1 / ((n-k)^2 + 1)` and stored in block `pair_index(n, k)`. A point with
//! `2^n <= |t| < 2^(n+1)` is mapped to the convex combination
//! `lambda_t f_n(t) + (1 - lambda_t) f_(n+1)(t)` with
//! `lambda_t = (2^(n+1) - |t|) / 2^n`, and `t0` is mapped to zero.
//!
//! The resulting map satisfies `gamma(d) <= |f(a) - f(b)| <= 9 C d` for every
//! pair, with `gamma` from [`gamma_bound`] and `C` the weight sum.

use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{distance, pair_index, BlockId, BlockIsoModel, BlockVector, NormSpec};
use crate::error::{Error, Result};
use crate::metric::PointedSpace;
use crate::net::{greedy_maximal_net, Ball, Net};
use crate::verify::{verify_bounds, BoundsReport, Tolerance};

/// Extra net indices appended beyond the finest scale seen in each ball.
pub const DEFAULT_K_MAX_SLACK: u32 = 4;

/// Absolute tolerance used when certifying the two-sided bound.
pub const PROPER_TOLERANCE: Tolerance = Tolerance::absolute(1e-9);

#[inline]
pub(crate) fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Dyadic shell of a radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Annulus {
    Basepoint,
    /// `2^n <= r < 2^(n+1)` and `lambda = (2^(n+1) - r) / 2^n`, in `(0, 1]`.
    Shell { n: i32, lambda: f64 },
}

pub fn annulus_index(r: f64) -> Result<Annulus> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::NegativeRadius(r));
    }
    if r == 0.0 {
        return Ok(Annulus::Basepoint);
    }
    let mut n = r.log2().floor() as i32;
    while pow2(n) > r {
        n -= 1;
    }
    while pow2(n + 1) <= r {
        n += 1;
    }
    Ok(Annulus::Shell {
        n,
        lambda: gluing_weight(n, r),
    })
}

#[inline]
fn gluing_weight(n: i32, r: f64) -> f64 {
    (pow2(n + 1) - r) / pow2(n)
}

/// `alpha(t) = (log2 t)^2 + 1`.
pub fn alpha(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveArgument(t));
    }
    Ok(alpha_unchecked(t))
}

fn alpha_unchecked(t: f64) -> f64 {
    let l = t.log2();
    l * l + 1.0
}

/// Lower envelope `gamma(t) = t / (24 max(alpha(t), alpha(t / 2^7)))`.
pub fn gamma_bound(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveArgument(t));
    }
    Ok(gamma_unchecked(t))
}

fn gamma_unchecked(t: f64) -> f64 {
    t / (24.0 * alpha_unchecked(t).max(alpha_unchecked(t / 128.0)))
}

/// Weight of net `k` at scale `n`.
#[inline]
pub fn weight(n: i32, k: u32) -> f64 {
    let m = (n as i64 - k as i64) as f64;
    1.0 / (m * m + 1.0)
}

/// `C = sum over all integers m of 1 / (m^2 + 1)`, summed directly to
/// `|m| = 1000` with an Euler-Maclaurin tail.
pub fn series_constant() -> f64 {
    const N: u32 = 1000;
    let g = |x: f64| 1.0 / (x * x + 1.0);
    // sum_{m=1}^{N} g(m), smallest terms first
    let head: f64 = (1..=N).rev().map(|m| g(m as f64)).sum();
    let x = N as f64;
    let dg = -2.0 * x / (x * x + 1.0).powi(2);
    let d3g = 24.0 * x * (1.0 - x * x) / (x * x + 1.0).powi(4);
    // sum_{m>N} g(m) = integral_N^inf g - g(N)/2 - g'(N)/12 + g'''(N)/720 - ...
    let tail = (std::f64::consts::FRAC_PI_2 - x.atan()) - g(x) / 2.0 - dg / 12.0 + d3g / 720.0;
    1.0 + 2.0 * (head + tail)
}

/// Index ranges and slack model for the construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProperParams {
    pub n_min: i32,
    pub n_max: i32,
    /// `k_max[n - n_min]` is the largest net index at scale `n`.
    pub k_max: Vec<u32>,
    pub iso: BlockIsoModel,
    pub norm: NormSpec,
}

impl ProperParams {
    pub fn new(n_min: i32, n_max: i32, k_max: Vec<u32>, iso: BlockIsoModel) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::InvalidParameter {
                name: "n_range",
                reason: format!("n_min {n_min} exceeds n_max {n_max}"),
            });
        }
        if k_max.len() != (n_max - n_min + 1) as usize || k_max.iter().any(|&k| k < 1) {
            return Err(Error::InvalidParameter {
                name: "k_max",
                reason: "need one entry >= 1 per scale".into(),
            });
        }
        Ok(Self {
            n_min,
            n_max,
            k_max,
            iso,
            norm: NormSpec::SUP_SUM,
        })
    }

    /// Truncation derived from the data: scales from the annulus of the
    /// smallest positive `|t|` up to one past the annulus of the largest, and
    /// `k_max(n) = max(1, ceil(n + 3 - log2 dmin(B_n))) + slack`.
    pub fn for_space(domain: &PointedSpace, iso: BlockIsoModel, k_max_slack: u32) -> Result<Self> {
        if domain.len() < 2 {
            return Err(Error::TooFewPoints(domain.len()));
        }
        let norms: Vec<f64> = (0..domain.len())
            .map(|t| domain.norm(t))
            .filter(|&r| r > 0.0)
            .collect();
        let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = norms.iter().copied().fold(0.0, f64::max);
        let n_of = |r: f64| match annulus_index(r) {
            Ok(Annulus::Shell { n, .. }) => n,
            _ => unreachable!("positive radius"),
        };
        let n_min = n_of(lo);
        let n_max = n_of(hi) + 1;
        let k_max = (n_min..=n_max)
            .map(|n| {
                let ball = Ball::new(domain.basepoint(), pow2(n + 1));
                let pts = ball.points(domain.space());
                let mut dmin = f64::INFINITY;
                for (i, &a) in pts.iter().enumerate() {
                    for &b in &pts[i + 1..] {
                        dmin = dmin.min(domain.dist(a, b));
                    }
                }
                let finest = (n as f64 + 3.0 - dmin.log2()).ceil().max(1.0) as u32;
                finest + k_max_slack
            })
            .collect();
        Self::new(n_min, n_max, k_max, iso)
    }

    pub fn k_max_at(&self, n: i32) -> Option<u32> {
        if (self.n_min..=self.n_max).contains(&n) {
            Some(self.k_max[(n - self.n_min) as usize])
        } else {
            None
        }
    }

    pub fn net_radius(n: i32, k: u32) -> f64 {
        pow2(n + 3 - k as i32)
    }

    /// Weight sum over the distinct offsets `n - k` actually used. Never exceeds
    /// [`series_constant`].
    pub fn c_trunc(&self) -> f64 {
        let mut offsets: Vec<i64> = Vec::new();
        for (i, &km) in self.k_max.iter().enumerate() {
            let n = self.n_min as i64 + i as i64;
            offsets.extend((1..=km as i64).map(|k| n - k));
        }
        offsets.sort_unstable();
        offsets.dedup();
        // smallest terms first
        offsets.sort_by_key(|m| std::cmp::Reverse(m.unsigned_abs()));
        offsets
            .iter()
            .map(|&m| 1.0 / ((m * m) as f64 + 1.0))
            .sum()
    }
}

/// Nets of one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tier {
    pub n: i32,
    pub ball: Ball,
    /// `nets[k - 1]` is `M_n^k`.
    pub nets: Vec<Net>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetHierarchy {
    pub n_min: i32,
    pub tiers: Vec<Tier>,
}

impl NetHierarchy {
    pub fn tier(&self, n: i32) -> Option<&Tier> {
        let i = n.checked_sub(self.n_min)?;
        usize::try_from(i).ok().and_then(|i| self.tiers.get(i))
    }

    pub fn net(&self, n: i32, k: u32) -> Option<&Net> {
        self.tier(n)?.nets.get((k as usize).checked_sub(1)?)
    }
}

/// Builds every `M_n^k`, seeded at the basepoint, in fixed scan order.
pub fn build_hierarchy(domain: &PointedSpace, params: &ProperParams) -> Result<NetHierarchy> {
    if domain.len() < 2 {
        return Err(Error::TooFewPoints(domain.len()));
    }
    let t0 = domain.basepoint();
    let tiers = (params.n_min..=params.n_max)
        .map(|n| {
            let ball = Ball::new(t0, pow2(n + 1));
            let nets = (1..=params.k_max_at(n).unwrap())
                .map(|k| greedy_maximal_net(domain.space(), ball, ProperParams::net_radius(n, k), t0))
                .collect::<Result<Vec<_>>>()?;
            Ok(Tier { n, ball, nets })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NetHierarchy {
        n_min: params.n_min,
        tiers,
    })
}

/// `(d(t, s) - |s|)` for each net member `s`, in member order.
pub fn frechet_coords(t: usize, net: &Net, domain: &PointedSpace) -> Result<Vec<f64>> {
    domain.space().check_index(t)?;
    if !net.ball().contains(domain.space(), t) {
        return Err(Error::PointOutsideBall(t));
    }
    Ok(net
        .members()
        .iter()
        .map(|&s| domain.dist(t, s) - domain.norm(s))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProperEmbedding {
    domain: PointedSpace,
    params: ProperParams,
    hierarchy: NetHierarchy,
    images: Vec<BlockVector>,
}

impl ProperEmbedding {
    pub fn build(domain: PointedSpace, params: ProperParams) -> Result<Self> {
        let hierarchy = build_hierarchy(&domain, &params)?;
        let mut emb = Self {
            domain,
            params,
            hierarchy,
            images: Vec::new(),
        };
        let images = (0..emb.domain.len())
            .into_par_iter()
            .map(|t| emb.embed_point(t))
            .collect::<Result<Vec<_>>>()?;
        emb.images = images;
        Ok(emb)
    }

    /// Builds with the data-driven truncation of [`ProperParams::for_space`].
    pub fn with_defaults(domain: PointedSpace, iso: BlockIsoModel) -> Result<Self> {
        let params = ProperParams::for_space(&domain, iso, DEFAULT_K_MAX_SLACK)?;
        Self::build(domain, params)
    }

    pub fn domain(&self) -> &PointedSpace {
        &self.domain
    }

    pub fn params(&self) -> &ProperParams {
        &self.params
    }

    pub fn hierarchy(&self) -> &NetHierarchy {
        &self.hierarchy
    }

    pub fn images(&self) -> &[BlockVector] {
        &self.images
    }

    pub fn image(&self, t: usize) -> &BlockVector {
        &self.images[t]
    }

    pub fn block_id(n: i32, k: u32) -> BlockId {
        pair_index(n as i64, k as i64).expect("k >= 1")
    }

    /// `theta_j * w(n, k)`: the factor applied to coefficient times coordinates
    /// in block `(n, k)`.
    pub fn block_scale(&self, n: i32, k: u32) -> f64 {
        self.params.iso.factor(Self::block_id(n, k)) * weight(n, k)
    }

    /// Image of `t` using its own annulus.
    pub fn embed_point(&self, t: usize) -> Result<BlockVector> {
        self.domain.space().check_index(t)?;
        match annulus_index(self.domain.norm(t))? {
            Annulus::Basepoint => Ok(BlockVector::new()),
            Annulus::Shell { n, .. } => self.embed_point_in_annulus(t, n),
        }
    }

    /// Image of `t` computed with the gluing formula of annulus `n`, which must
    /// satisfy `2^n <= |t| <= 2^(n+1)`. At an exact dyadic radius both adjacent
    /// annuli give the same vector.
    pub fn embed_point_in_annulus(&self, t: usize, n: i32) -> Result<BlockVector> {
        let r = self.domain.norm(t);
        if !(pow2(n) <= r && r <= pow2(n + 1)) {
            return Err(Error::InvalidParameter {
                name: "annulus",
                reason: format!("|t| = {r} is not in [2^{n}, 2^{}]", n + 1),
            });
        }
        let lambda = gluing_weight(n, r);
        let mut out = BlockVector::new();
        for (tier, coefficient) in [(n, lambda), (n + 1, 1.0 - lambda)] {
            if coefficient == 0.0 {
                continue;
            }
            self.add_tier(&mut out, t, tier, coefficient)?;
        }
        Ok(out)
    }

    fn add_tier(&self, out: &mut BlockVector, t: usize, n: i32, coefficient: f64) -> Result<()> {
        let tier = self.hierarchy.tier(n).ok_or(Error::AnnulusOutOfRange {
            needed: n,
            min: self.params.n_min,
            max: self.params.n_max,
        })?;
        for (i, net) in tier.nets.iter().enumerate() {
            let k = i as u32 + 1;
            let scale = self.block_scale(n, k) * coefficient;
            let coords = frechet_coords(t, net, &self.domain)?;
            out.insert(Self::block_id(n, k), coords.into_iter().map(|c| c * scale).collect());
        }
        Ok(())
    }

    /// `|f(a) - f(b)|` in the sup-sum norm.
    pub fn image_distance(&self, a: usize, b: usize) -> f64 {
        distance(&self.images[a], &self.images[b], self.params.norm)
    }
}

/// Certifies `gamma(d) <= |f(a) - f(b)| <= 9 C_trunc d` on every pair.
pub fn verify_proper(embedding: &ProperEmbedding) -> Result<BoundsReport> {
    let c_trunc = embedding.params.c_trunc();
    let norm = embedding.params.norm;
    let report = verify_bounds(
        embedding.domain.space(),
        &embedding.images,
        |a, b| distance(a, b, norm),
        gamma_unchecked,
        |d| 9.0 * c_trunc * d,
        PROPER_TOLERANCE,
    )?;
    Ok(report
        .with_constant("c_trunc", c_trunc)
        .with_constant("c_series", series_constant())
        .with_constant("upper_factor", 9.0 * c_trunc)
        .with_constant("gamma_denominator", 24.0)
        .with_constant("gamma_shift", 128.0)
        .with_constant("n_min", embedding.params.n_min as f64)
        .with_constant("n_max", embedding.params.n_max as f64))
}
