//! Greedy maximal nets inside closed balls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Closed ball `{t : d(center, t) <= radius}` of a host space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: usize, radius: f64) -> Self {
        Self { center, radius }
    }

    /// The ball that contains every point of any finite space.
    pub fn everything(center: usize) -> Self {
        Self {
            center,
            radius: f64::INFINITY,
        }
    }

    pub fn contains(&self, space: &FiniteMetricSpace, t: usize) -> bool {
        space.dist(self.center, t) <= self.radius
    }

    /// Members of the ball in index order.
    pub fn points(&self, space: &FiniteMetricSpace) -> Vec<usize> {
        (0..space.len()).filter(|&t| self.contains(space, t)).collect()
    }
}

/// An `r`-separated, `r`-covering subset of a ball.
///
/// Members are stored in admission order, so `members()[0]` is the seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Net {
    members: Vec<usize>,
    radius: f64,
    ball: Ball,
}

impl Net {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ball(&self) -> Ball {
        self.ball
    }

    pub fn seed(&self) -> usize {
        self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.members.contains(&t)
    }

    /// First member (admission order) strictly closer than the radius to `t`.
    pub fn nearest_in_scan_order(&self, space: &FiniteMetricSpace, t: usize) -> Option<usize> {
        self.members
            .iter()
            .copied()
            .find(|&s| space.dist(s, t) < self.radius)
    }
}

/// Greedy maximal `net_radius`-net of `ball`, scanning the seed first and then
/// the remaining ball points in index order. A candidate joins iff its
/// distance to every current member is at least `net_radius`.
pub fn greedy_maximal_net(
    space: &FiniteMetricSpace,
    ball: Ball,
    net_radius: f64,
    seed: usize,
) -> Result<Net> {
    if !(net_radius > 0.0 && net_radius.is_finite()) {
        return Err(Error::InvalidRadius(net_radius));
    }
    space.check_index(ball.center)?;
    space.check_index(seed)?;
    if !ball.contains(space, seed) {
        return Err(Error::SeedOutsideBall(seed));
    }
    let mut members = vec![seed];
    for t in 0..space.len() {
        if t == seed || !ball.contains(space, t) {
            continue;
        }
        if members.iter().all(|&s| space.dist(s, t) >= net_radius) {
            members.push(t);
        }
    }
    Ok(Net {
        members,
        radius: net_radius,
        ball,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs()).unwrap()
    }

    #[test]
    fn five_points_radius_one_and_a_half() {
        let s = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let net = greedy_maximal_net(&s, Ball::everything(0), 1.5, 0).unwrap();
        assert_eq!(net.members(), &[0, 2, 4]);
    }

    #[test]
    fn exact_radius_is_admitted() {
        let s = line(&[0.0, 1.0, 2.0]);
        let net = greedy_maximal_net(&s, Ball::everything(0), 1.0, 0).unwrap();
        assert_eq!(net.members(), &[0, 1, 2]);
    }

    #[test]
    fn huge_radius_gives_seed_only() {
        let s = line(&[0.0, 1.0, 2.0, 7.0]);
        let net = greedy_maximal_net(&s, Ball::everything(2), 100.0, 2).unwrap();
        assert_eq!(net.members(), &[2]);
    }

    #[test]
    fn single_point_ball() {
        let s = line(&[0.0, 5.0, 9.0]);
        let net = greedy_maximal_net(&s, Ball::new(1, 0.5), 0.1, 1).unwrap();
        assert_eq!(net.members(), &[1]);
    }

    #[test]
    fn seed_is_forced_first() {
        let s = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let net = greedy_maximal_net(&s, Ball::everything(0), 1.5, 3).unwrap();
        assert_eq!(net.members(), &[3, 0]);
    }

    #[test]
    fn seed_outside_ball() {
        let s = line(&[0.0, 1.0, 5.0]);
        let err = greedy_maximal_net(&s, Ball::new(0, 2.0), 1.0, 2).unwrap_err();
        assert_eq!(err, Error::SeedOutsideBall(2));
    }
}
