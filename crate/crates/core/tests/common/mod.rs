//! Brute-force reference computations and fixture families shared by the
//! integration tests. Nothing here calls into the library's own checkers.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use metric_embed::fixtures::{random_graph_metric, random_lp_cloud};
use metric_embed::{BlockVector, Exponent, FiniteMetricSpace, LpPointSet};

/// Connected random graph metrics with 8..=64 points.
pub fn graph_family(count: usize) -> Vec<FiniteMetricSpace> {
    (0..count)
        .map(|i| {
            let n = 8 + (i * 7) % 57;
            let p = (2.5 * (n as f64).ln() / n as f64).clamp(0.08, 0.9);
            let w = 1 + (i % 6) as u32;
            random_graph_metric(n, p, w, 1000 + i as u64).expect("connected fixture")
        })
        .collect()
}

/// Random clouds with up to `max_n` points in dimension up to `max_dim`,
/// spread over several orders of magnitude.
pub fn cloud_family(count: usize, p: Exponent, max_n: usize, max_dim: usize, salt: u64) -> Vec<LpPointSet> {
    let sides = [0.05, 1.0, 7.5, 100.0, 3000.0];
    (0..count)
        .map(|i| {
            let n = 4 + (i * 13) % (max_n - 3);
            let dim = 1 + i % max_dim;
            let side = sides[i % sides.len()];
            random_lp_cloud(n, dim, p, side, salt * 7919 + i as u64).expect("cloud fixture")
        })
        .collect()
}

pub fn lp_norm(p: f64, xs: impl Iterator<Item = f64>) -> f64 {
    if p.is_infinite() {
        xs.fold(0.0, |m, x| m.max(x.abs()))
    } else {
        xs.map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Per-block differences over the union of stored blocks.
fn block_diffs(a: &BlockVector, b: &BlockVector) -> Vec<Vec<f64>> {
    let ids: BTreeSet<u64> = a.block_ids().chain(b.block_ids()).collect();
    ids.into_iter()
        .map(|id| {
            let x = a.get(id).unwrap_or(&[]);
            let y = b.get(id).unwrap_or(&[]);
            let len = x.len().max(y.len());
            (0..len)
                .map(|i| x.get(i).copied().unwrap_or(0.0) - y.get(i).copied().unwrap_or(0.0))
                .collect()
        })
        .collect()
}

/// `sup_j |a_j - b_j|_inf`.
pub fn sup_sum_distance(a: &BlockVector, b: &BlockVector) -> f64 {
    block_diffs(a, b)
        .iter()
        .map(|d| lp_norm(f64::INFINITY, d.iter().copied()))
        .fold(0.0, f64::max)
}

/// `(sum_j |a_j - b_j|_p^p)^(1/p)`.
pub fn lp_sum_distance(p: f64, a: &BlockVector, b: &BlockVector) -> f64 {
    let norms: Vec<f64> = block_diffs(a, b)
        .iter()
        .map(|d| lp_norm(p, d.iter().copied()))
        .collect();
    lp_norm(p, norms.into_iter())
}

pub fn gamma(t: f64) -> f64 {
    let l = t.log2();
    let a = (l * l + 1.0).max((l - 7.0) * (l - 7.0) + 1.0);
    t / (24.0 * a)
}

pub fn brute_rho(space: &FiniteMetricSpace, img: &dyn Fn(usize, usize) -> f64, t: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for a in 0..space.len() {
        for b in 0..space.len() {
            if a != b && space.dist(a, b) >= t {
                let v = img(a, b);
                best = Some(best.map_or(v, |x| x.min(v)));
            }
        }
    }
    best
}

pub fn brute_omega(space: &FiniteMetricSpace, img: &dyn Fn(usize, usize) -> f64, t: f64) -> f64 {
    let mut best = 0.0f64;
    for a in 0..space.len() {
        for b in 0..space.len() {
            if a != b && space.dist(a, b) <= t {
                best = best.max(img(a, b));
            }
        }
    }
    best
}

/// `None` stands for an infinite distortion.
pub fn brute_distortion(space: &FiniteMetricSpace, img: &dyn Fn(usize, usize) -> f64) -> Option<f64> {
    let (mut lip, mut inv) = (0.0f64, 0.0f64);
    for a in 0..space.len() {
        for b in 0..space.len() {
            if a == b {
                continue;
            }
            let (d, e) = (space.dist(a, b), img(a, b));
            if e == 0.0 {
                return None;
            }
            lip = lip.max(e / d);
            inv = inv.max(d / e);
        }
    }
    Some(if space.len() < 2 { 1.0 } else { lip * inv })
}

/// Every pairwise separation and covering condition of a net, checked directly.
pub fn net_is_separated_and_maximal(space: &FiniteMetricSpace, center: usize, ball_radius: f64, radius: f64, members: &[usize]) -> bool {
    let host: Vec<usize> = (0..space.len())
        .filter(|&t| space.dist(center, t) <= ball_radius)
        .collect();
    let inside = members.iter().all(|m| host.contains(m));
    let separated = members
        .iter()
        .all(|&a| members.iter().all(|&b| a == b || space.dist(a, b) >= radius));
    let maximal = host
        .iter()
        .all(|&t| members.iter().any(|&s| space.dist(s, t) < radius));
    inside && separated && maximal
}

/// Plain triple-loop metric check with the same relative triangle slack.
pub fn is_metric(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            let v = m[i][j];
            if !v.is_finite() || v < 0.0 || v != m[j][i] || ((i == j) != (v == 0.0)) {
                return false;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if m[i][k] > (m[i][j] + m[j][k]) * (1.0 + 1e-12) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
