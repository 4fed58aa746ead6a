//! Seed-deterministic fixture spaces.

use petgraph::algo::{connected_components, dijkstra};
use petgraph::graph::{NodeIndex, UnGraph};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::Exponent;
use crate::coarse::grid_net;
use crate::error::{Error, Result};
use crate::lp::LpPointSet;
use crate::metric::FiniteMetricSpace;

/// Regeneration attempts before a sparse random graph is reported disconnected.
pub const GRAPH_RETRIES: usize = 16;

/// Default cap on fixture point counts.
pub const DEFAULT_POINT_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fixture {
    /// Shortest-path metric of a `G(n, edge_prob)` graph with integer edge
    /// weights uniform in `1..=max_weight`.
    RandomGraphMetric {
        n: usize,
        edge_prob: f64,
        max_weight: u32,
        seed: u64,
    },
    /// Points uniform in `[0, side]^dim` with the `lp` distance.
    RandomLpCloud {
        n: usize,
        dim: usize,
        p: f64,
        side: f64,
        seed: u64,
    },
    /// `(1/k) Z^n ∩ [-k, k]^n` with the sup distance, origin as basepoint.
    GridNet { n_dim: usize, k: u32 },
    /// Path graph with unit edges.
    Path { n: usize },
    /// Star with `leaves` unit edges; the center is point 0.
    Star { leaves: usize },
}

/// A generated or parsed space.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceData {
    Matrix(FiniteMetricSpace),
    Cloud(LpPointSet),
}

impl SpaceData {
    pub fn metric(&self) -> Result<FiniteMetricSpace> {
        match self {
            SpaceData::Matrix(m) => Ok(m.clone()),
            SpaceData::Cloud(c) => c.metric(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SpaceData::Matrix(m) => m.len(),
            SpaceData::Cloud(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::SizeCapExceeded {
            requested: n as u128,
            cap: cap as u128,
        });
    }
    Ok(())
}

pub fn gen_fixture(fixture: &Fixture, cap: usize) -> Result<SpaceData> {
    match *fixture {
        Fixture::RandomGraphMetric {
            n,
            edge_prob,
            max_weight,
            seed,
        } => {
            check_cap(n, cap)?;
            random_graph_metric(n, edge_prob, max_weight, seed).map(SpaceData::Matrix)
        }
        Fixture::RandomLpCloud {
            n,
            dim,
            p,
            side,
            seed,
        } => {
            check_cap(n, cap)?;
            random_lp_cloud(n, dim, Exponent::new(p)?, side, seed).map(SpaceData::Cloud)
        }
        Fixture::GridNet { n_dim, k } => {
            let points = grid_net(n_dim, k, cap as u128)?;
            let origin = points.len() / 2;
            LpPointSet::new(Exponent::INFINITY, points, origin).map(SpaceData::Cloud)
        }
        Fixture::Path { n } => {
            check_cap(n, cap)?;
            FiniteMetricSpace::from_fn(n, |i, j| (j - i) as f64).map(SpaceData::Matrix)
        }
        Fixture::Star { leaves } => {
            check_cap(leaves + 1, cap)?;
            FiniteMetricSpace::from_fn(leaves + 1, |i, _| if i == 0 { 1.0 } else { 2.0 })
                .map(SpaceData::Matrix)
        }
    }
}

pub fn random_graph_metric(n: usize, edge_prob: f64, max_weight: u32, seed: u64) -> Result<FiniteMetricSpace> {
    if n == 0 || max_weight == 0 || !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter {
            name: "random-graph-metric",
            reason: format!("n = {n}, edge_prob = {edge_prob}, max_weight = {max_weight}"),
        });
    }
    for attempt in 0..GRAPH_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let mut g = UnGraph::<(), f64>::with_capacity(n, n * 4);
        let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < edge_prob {
                    let w = rng.random_range(1..=max_weight) as f64;
                    g.add_edge(nodes[i], nodes[j], w);
                }
            }
        }
        if connected_components(&g) != 1 {
            continue;
        }
        let rows: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&src| {
                let reach = dijkstra(&g, src, None, |e| *e.weight());
                nodes.iter().map(|v| reach[v]).collect()
            })
            .collect();
        return FiniteMetricSpace::new(&rows);
    }
    Err(Error::DisconnectedGraph(GRAPH_RETRIES))
}

pub fn random_lp_cloud(n: usize, dim: usize, p: Exponent, side: f64, seed: u64) -> Result<LpPointSet> {
    if n == 0 || dim == 0 || !(side > 0.0) {
        return Err(Error::InvalidParameter {
            name: "random-lp-cloud",
            reason: format!("n = {n}, dim = {dim}, side = {side}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| (0..dim).map(|_| side * rng.random::<f64>()).collect())
        .collect();
    LpPointSet::new(p, points, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_star() {
        let p = gen_fixture(&Fixture::Path { n: 4 }, DEFAULT_POINT_CAP).unwrap().metric().unwrap();
        assert_eq!(p.dist(0, 3), 3.0);
        let s = gen_fixture(&Fixture::Star { leaves: 3 }, DEFAULT_POINT_CAP).unwrap().metric().unwrap();
        assert_eq!(s.dist(1, 3), 2.0);
        assert_eq!(s.dist(0, 2), 1.0);
    }

    #[test]
    fn grid_fixture() {
        let g = gen_fixture(&Fixture::GridNet { n_dim: 1, k: 2 }, DEFAULT_POINT_CAP).unwrap();
        let SpaceData::Cloud(c) = g else { panic!("grid is a cloud") };
        assert_eq!(c.len(), 9);
        assert_eq!(c.points[c.basepoint], vec![0.0]);
    }

    #[test]
    fn graph_is_deterministic_and_metric() {
        let a = random_graph_metric(30, 0.15, 5, 11).unwrap();
        let b = random_graph_metric(30, 0.15, 5, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_graph_metric(30, 0.15, 5, 12).unwrap());
    }

    #[test]
    fn disconnected_graph_errors() {
        assert_eq!(
            random_graph_metric(10, 0.0, 1, 1).unwrap_err(),
            Error::DisconnectedGraph(GRAPH_RETRIES)
        );
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            gen_fixture(&Fixture::Path { n: 10 }, 5),
            Err(Error::SizeCapExceeded { .. })
        ));
    }
}
