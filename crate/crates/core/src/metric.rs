//! Finite metric spaces and their validation.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack allowed in the triangle inequality check.
///
/// Distances produced by floating-point arithmetic (lp clouds, grids) can
/// miss exact additivity on collinear triples by an ulp or two.
pub const TRIANGLE_RTOL: f64 = 1e-12;

/// A validated finite metric space stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    #[serde(skip)]
    dist: Vec<f64>,
    #[serde(skip)]
    n: usize,
}

impl FiniteMetricSpace {
    /// Validates `matrix` with default labels `"0"`, `"1"`, ...
    pub fn new(matrix: &[Vec<f64>]) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| i.to_string()).collect();
        Self::with_labels(labels, matrix)
    }

    pub fn with_labels(labels: Vec<String>, matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        if labels.len() != n {
            return Err(Error::LabelCount {
                labels: labels.len(),
                size: n,
            });
        }
        validate_matrix(matrix)?;
        let dist = matrix.iter().flat_map(|row| row.iter().copied()).collect();
        Ok(Self { labels, dist, n })
    }

    /// Builds a space from a symmetric distance function evaluated on `i < j`.
    pub fn from_fn(n: usize, mut d: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d(i, j);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Self::new(&m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.n })
        }
    }

    /// Restriction to `indices`, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> FiniteMetricSpace {
        let n = indices.len();
        let mut dist = Vec::with_capacity(n * n);
        for &i in indices {
            for &j in indices {
                dist.push(self.dist(i, j));
            }
        }
        FiniteMetricSpace {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            dist,
            n,
        }
    }
}

/// Validates a square matrix as a metric and wraps it. Never repairs input.
pub fn validate_metric(matrix: &[Vec<f64>]) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::new(matrix)
}

fn validate_matrix(m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotSquare {
                row: i,
                len: row.len(),
                expected: n,
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = m[i][j];
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry(i, j));
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry(i, j));
            }
        }
    }
    for i in 0..n {
        if m[i][i] != 0.0 {
            return Err(Error::NonzeroDiagonal(i));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[i][j] != m[j][i] {
                return Err(Error::AsymmetricMatrix(i, j));
            }
            if m[i][j] == 0.0 {
                return Err(Error::CoincidentPoints(i, j));
            }
        }
    }
    for i in 0..n {
        for k in 0..n {
            let direct = m[i][k];
            for j in 0..n {
                if direct > (m[i][j] + m[j][k]) * (1.0 + TRIANGLE_RTOL) {
                    return Err(Error::TriangleViolation(i, k, j));
                }
            }
        }
    }
    Ok(())
}

/// Least distance between two distinct points.
pub fn min_positive_distance(space: &FiniteMetricSpace) -> Result<f64> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            best = best.min(space.dist(i, j));
        }
    }
    Ok(best)
}

/// A metric space with a distinguished basepoint `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointedSpace {
    space: FiniteMetricSpace,
    basepoint: usize,
}

impl PointedSpace {
    pub fn new(space: FiniteMetricSpace, basepoint: usize) -> Result<Self> {
        space.check_index(basepoint)?;
        Ok(Self { space, basepoint })
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// `|t| = d(t, t0)`.
    #[inline]
    pub fn norm(&self, t: usize) -> f64 {
        self.space.dist(t, self.basepoint)
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.space.dist(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_space() {
        let s = validate_metric(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dist(0, 1), 1.0);
    }

    #[test]
    fn asymmetric_rejected() {
        let e = validate_metric(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert_eq!(e, Error::AsymmetricMatrix(0, 1));
    }

    #[test]
    fn triangle_violation_names_triple() {
        let m = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        assert_eq!(
            validate_metric(&m).unwrap_err(),
            Error::TriangleViolation(0, 2, 1)
        );
    }

    #[test]
    fn other_violations() {
        assert_eq!(
            validate_metric(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap_err(),
            Error::NonzeroDiagonal(0)
        );
        assert_eq!(
            validate_metric(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap_err(),
            Error::NegativeEntry(0, 1)
        );
        assert_eq!(
            validate_metric(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap_err(),
            Error::CoincidentPoints(0, 1)
        );
        assert!(matches!(
            validate_metric(&[vec![0.0, 1.0], vec![1.0]]).unwrap_err(),
            Error::NotSquare { row: 1, .. }
        ));
        assert_eq!(
            validate_metric(&[vec![0.0, f64::NAN], vec![f64::NAN, 0.0]]).unwrap_err(),
            Error::NonFiniteEntry(0, 1)
        );
    }

    #[test]
    fn min_distance_examples() {
        let line = FiniteMetricSpace::from_fn(3, |i, j| {
            let x = [0.0f64, 1.0, 3.0];
            (x[i] - x[j]).abs()
        })
        .unwrap();
        assert_eq!(min_positive_distance(&line).unwrap(), 1.0);
        let pair = validate_metric(&[vec![0.0, 4.0], vec![4.0, 0.0]]).unwrap();
        assert_eq!(min_positive_distance(&pair).unwrap(), 4.0);
        let tri = FiniteMetricSpace::from_fn(3, |_, _| 1.0).unwrap();
        assert_eq!(min_positive_distance(&tri).unwrap(), 1.0);
        let one = validate_metric(&[vec![0.0]]).unwrap();
        assert_eq!(min_positive_distance(&one).unwrap_err(), Error::TooFewPoints(1));
    }

    #[test]
    fn pointed_norm() {
        let s = validate_metric(&[vec![0.0, 4.0], vec![4.0, 0.0]]).unwrap();
        let p = PointedSpace::new(s.clone(), 1).unwrap();
        assert_eq!(p.norm(1), 0.0);
        assert_eq!(p.norm(0), 4.0);
        assert!(PointedSpace::new(s, 2).is_err());
    }
}
