//! Compression/expansion moduli, distortion, and pairwise envelope checks.
//!
//! Every routine here visits unordered pairs `(a, b)` with `a < b` in
//! lexicographic order. Pair work runs on the rayon pool but results are
//! collected in that fixed order, so outputs do not depend on thread count.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Value of an infimum that may range over an empty set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Finite(f64),
    Unbounded,
}

impl Extent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extent::Finite(v) => Some(v),
            Extent::Unbounded => None,
        }
    }

    fn le(self, other: Extent) -> bool {
        match (self, other) {
            (_, Extent::Unbounded) => true,
            (Extent::Unbounded, Extent::Finite(_)) => false,
            (Extent::Finite(a), Extent::Finite(b)) => a <= b,
        }
    }
}

impl Serialize for Extent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extent::Finite(v) => s.serialize_f64(*v),
            Extent::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// Distortion of a map; infinite when two distinct points share an image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distortion {
    Finite(f64),
    Infinite,
}

impl Distortion {
    pub fn finite(self) -> Option<f64> {
        match self {
            Distortion::Finite(v) => Some(v),
            Distortion::Infinite => None,
        }
    }
}

impl Serialize for Distortion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distortion::Finite(v) => s.serialize_f64(*v),
            Distortion::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuliProfile {
    pub thresholds: Vec<f64>,
    /// `rho(t)`: least image distance over pairs at distance `>= t`.
    pub rho: Vec<Extent>,
    /// `omega(t)`: greatest image distance over pairs at distance `<= t`.
    pub omega: Vec<f64>,
}

impl ModuliProfile {
    pub fn is_monotone(&self) -> bool {
        self.rho.windows(2).all(|w| w[0].le(w[1])) && self.omega.windows(2).all(|w| w[0] <= w[1])
    }
}

fn check_lengths<T>(domain: &FiniteMetricSpace, images: &[T]) -> Result<()> {
    if domain.len() != images.len() {
        return Err(Error::LengthMismatch {
            points: domain.len(),
            images: images.len(),
        });
    }
    Ok(())
}

/// `(a, b, d(a,b), image distance)` for every pair `a < b`, in lexicographic order.
pub fn pair_distances<T, D>(
    domain: &FiniteMetricSpace,
    images: &[T],
    image_dist: D,
) -> Result<Vec<(usize, usize, f64, f64)>>
where
    T: Sync,
    D: Fn(&T, &T) -> f64 + Sync,
{
    check_lengths(domain, images)?;
    let n = domain.len();
    Ok((0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let image_dist = &image_dist;
            ((a + 1)..n).map(move |b| (a, b, domain.dist(a, b), image_dist(&images[a], &images[b])))
        })
        .collect())
}

/// Samples `rho_f` and `omega_f` at each threshold (sorted ascending in the output).
pub fn moduli_profile<T, D>(
    domain: &FiniteMetricSpace,
    images: &[T],
    image_dist: D,
    thresholds: &[f64],
) -> Result<ModuliProfile>
where
    T: Sync,
    D: Fn(&T, &T) -> f64 + Sync,
{
    if let Some(&t) = thresholds.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "thresholds",
            reason: format!("threshold {t} is not a non-negative number"),
        });
    }
    let mut pairs: Vec<(f64, f64)> = pair_distances(domain, images, image_dist)?
        .into_iter()
        .map(|(_, _, d, img)| (d, img))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    // prefix_max[i] = max image distance among the first i pairs by d
    let mut prefix_max = Vec::with_capacity(pairs.len() + 1);
    prefix_max.push(0.0f64);
    for &(_, img) in &pairs {
        let last = *prefix_max.last().unwrap();
        prefix_max.push(last.max(img));
    }
    // suffix_min[i] = min image distance among pairs i.. by d
    let mut suffix_min = vec![f64::INFINITY; pairs.len() + 1];
    for i in (0..pairs.len()).rev() {
        suffix_min[i] = suffix_min[i + 1].min(pairs[i].1);
    }

    let mut sorted = thresholds.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rho = Vec::with_capacity(sorted.len());
    let mut omega = Vec::with_capacity(sorted.len());
    for &t in &sorted {
        let first_ge = pairs.partition_point(|&(d, _)| d < t);
        rho.push(if first_ge == pairs.len() {
            Extent::Unbounded
        } else {
            Extent::Finite(suffix_min[first_ge])
        });
        let count_le = pairs.partition_point(|&(d, _)| d <= t);
        omega.push(prefix_max[count_le]);
    }
    Ok(ModuliProfile {
        thresholds: sorted,
        rho,
        omega,
    })
}

/// `Lip(f) * Lip(f^-1)` over all pairs of distinct points.
///
/// A domain with fewer than two points has distortion 1.
pub fn distortion<T, D>(domain: &FiniteMetricSpace, images: &[T], image_dist: D) -> Result<Distortion>
where
    T: Sync,
    D: Fn(&T, &T) -> f64 + Sync,
{
    let pairs = pair_distances(domain, images, image_dist)?;
    Ok(distortion_of_pairs(pairs.iter().map(|&(_, _, d, img)| (d, img))))
}

fn distortion_of_pairs(pairs: impl Iterator<Item = (f64, f64)>) -> Distortion {
    let mut expansion = 0.0f64;
    let mut contraction = 0.0f64;
    let mut any = false;
    for (d, img) in pairs {
        any = true;
        if img == 0.0 {
            return Distortion::Infinite;
        }
        expansion = expansion.max(img / d);
        contraction = contraction.max(d / img);
    }
    if any {
        Distortion::Finite(expansion * contraction)
    } else {
        Distortion::Finite(1.0)
    }
}

/// Allowed violation of an envelope value `v`: `absolute + relative * |v|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Tolerance {
    pub const fn absolute(v: f64) -> Self {
        Self {
            absolute: v,
            relative: 0.0,
        }
    }

    pub const fn relative(v: f64) -> Self {
        Self {
            absolute: 0.0,
            relative: v,
        }
    }

    pub fn allowance(&self, bound: f64) -> f64 {
        self.absolute + self.relative * bound.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::relative(1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub image_distance: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

impl PairRecord {
    pub fn lower_slack(&self) -> f64 {
        self.image_distance - self.lower
    }

    pub fn upper_slack(&self) -> f64 {
        self.upper - self.image_distance
    }
}

/// Extreme slack over all recorded pairs with the pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slack {
    pub value: f64,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub records: Vec<PairRecord>,
    pub worst_lower_slack: Option<Slack>,
    pub worst_upper_slack: Option<Slack>,
    pub distortion: Distortion,
    pub tolerance: Tolerance,
    pub constants: Vec<(String, f64)>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn pair_count(&self) -> usize {
        self.records.len()
    }

    pub fn failed_count(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constants.push((name.to_string(), value));
        self
    }
}

/// Checks `lower(d) - tol <= |f(a) - f(b)| <= upper(d) + tol` on every pair.
/// Violations are recorded in the report, never raised.
pub fn verify_bounds<T, D, L, U>(
    domain: &FiniteMetricSpace,
    images: &[T],
    image_dist: D,
    lower: L,
    upper: U,
    tolerance: Tolerance,
) -> Result<BoundsReport>
where
    T: Sync,
    D: Fn(&T, &T) -> f64 + Sync,
    L: Fn(f64) -> f64 + Sync,
    U: Fn(f64) -> f64 + Sync,
{
    let pairs = pair_distances(domain, images, image_dist)?;
    let records: Vec<PairRecord> = pairs
        .par_iter()
        .map(|&(a, b, d, img)| {
            let lo = lower(d);
            let hi = upper(d);
            let pass = lo - tolerance.allowance(lo) <= img && img <= hi + tolerance.allowance(hi);
            PairRecord {
                a,
                b,
                distance: d,
                image_distance: img,
                lower: lo,
                upper: hi,
                pass,
            }
        })
        .collect();
    let worst = |slack: fn(&PairRecord) -> f64| {
        records.iter().fold(None, |best: Option<Slack>, r| {
            let v = slack(r);
            match best {
                Some(s) if s.value <= v => Some(s),
                _ => Some(Slack {
                    value: v,
                    a: r.a,
                    b: r.b,
                }),
            }
        })
    };
    let worst_lower_slack = worst(PairRecord::lower_slack);
    let worst_upper_slack = worst(PairRecord::upper_slack);
    let distortion = distortion_of_pairs(records.iter().map(|r| (r.distance, r.image_distance)));
    Ok(BoundsReport {
        records,
        worst_lower_slack,
        worst_upper_slack,
        distortion,
        tolerance,
        constants: Vec::new(),
    })
}

/// `count` log-spaced values spanning `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Default moduli thresholds: 32 log-spaced values over `[d_min / 2, 2 * diameter]`.
pub fn default_thresholds(space: &FiniteMetricSpace) -> Vec<f64> {
    match crate::metric::min_positive_distance(space) {
        Ok(dmin) => log_grid(dmin / 2.0, 2.0 * space.diameter(), 32),
        Err(_) => vec![0.0],
    }
}
