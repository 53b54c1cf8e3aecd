//! Finite metric spaces and requests.

use serde::{Deserialize, Serialize};

use crate::cost::TOL;
use crate::delay::ConcaveFn;
use crate::error::ModelError;

/// Discrete timestep.
pub type Time = u32;

/// Named metric used to materialize a distance matrix from coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Euclidean,
    Uniform,
}

/// A finite metric space over labelled points.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    labels: Vec<String>,
    n: usize,
    dist: Vec<f64>,
}

impl MetricSpace {
    /// Builds a space from a full matrix, validating symmetry, the diagonal,
    /// positivity off the diagonal (unless `allow_zero`) and the triangle
    /// inequality on every triple.
    pub fn from_matrix(
        labels: Vec<String>,
        rows: Vec<Vec<f64>>,
        allow_zero: bool,
    ) -> Result<Self, ModelError> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(ModelError::MatrixShape { rows: rows.len(), points: n });
        }
        check_labels(&labels)?;
        let dist: Vec<f64> = rows.into_iter().flatten().collect();
        let space = MetricSpace { labels, n, dist };
        space.validate(allow_zero)?;
        Ok(space)
    }

    /// Builds a space from coordinates under a named metric.
    pub fn from_coords(
        labels: Vec<String>,
        coords: &[Vec<f64>],
        kind: MetricKind,
        allow_zero: bool,
    ) -> Result<Self, ModelError> {
        let n = labels.len();
        if coords.len() != n {
            return Err(ModelError::MatrixShape { rows: coords.len(), points: n });
        }
        let dim = coords.first().map_or(0, Vec::len);
        if coords.iter().any(|c| c.len() != dim || c.iter().any(|x| !x.is_finite())) {
            return Err(ModelError::CoordinateShape);
        }
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match kind {
                        MetricKind::Uniform => f64::from(u8::from(i != j)),
                        MetricKind::Euclidean => coords[i]
                            .iter()
                            .zip(&coords[j])
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt(),
                    })
                    .collect()
            })
            .collect();
        Self::from_matrix(labels, rows, allow_zero)
    }

    /// Uniform metric on `n` points labelled `p0..p{n-1}`.
    pub fn uniform(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        let dist = (0..n * n).map(|k| f64::from(u8::from(k / n != k % n))).collect();
        MetricSpace { labels, n, dist }
    }

    fn validate(&self, allow_zero: bool) -> Result<(), ModelError> {
        let n = self.n;
        for p in 0..n {
            for q in 0..n {
                let v = self.distance(p, q);
                if !v.is_finite() || v < 0.0 {
                    return Err(ModelError::BadDistance { p, q, value: v });
                }
            }
            if self.distance(p, p) != 0.0 {
                return Err(ModelError::NonzeroDiagonal(p));
            }
        }
        for p in 0..n {
            for q in p + 1..n {
                if (self.distance(p, q) - self.distance(q, p)).abs() > TOL {
                    return Err(ModelError::NotSymmetric { p, q });
                }
                if !allow_zero && self.distance(p, q) == 0.0 {
                    return Err(ModelError::ZeroDistance { p, q });
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    let direct = self.distance(p, r);
                    let via = self.distance(p, q) + self.distance(q, r);
                    if direct > via + TOL {
                        return Err(ModelError::TriangleViolation { p, q, r, direct, via });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn distance(&self, p: usize, q: usize) -> f64 {
        self.dist[p * self.n + q]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Largest distance over smallest positive distance.
    pub fn aspect_ratio(&self) -> Result<f64, ModelError> {
        let positive = self.dist.iter().copied().filter(|&d| d > 0.0);
        let min = positive.clone().fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return Err(ModelError::AspectRatioUndefined);
        }
        Ok(self.diameter() / min)
    }
}

fn check_labels(labels: &[String]) -> Result<(), ModelError> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(ModelError::DuplicatePoint(l.clone()));
        }
    }
    Ok(())
}

/// A request: a point occurrence with an arrival timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: usize,
    pub point: usize,
    pub arrival: Time,
}

/// Concave time-augmented distance `d(u,v) + f(|a_u - a_v|)`.
pub fn concave_time_dist(metric: &MetricSpace, u: &Request, v: &Request, f: &ConcaveFn) -> f64 {
    let gap = u.arrival.abs_diff(v.arrival);
    metric.distance(u.point, v.point) + f.eval(f64::from(gap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    pub(crate) fn four_point(eps: f64, d: f64) -> MetricSpace {
        let rows = vec![
            vec![0.0, eps, eps, d],
            vec![eps, 0.0, eps, d],
            vec![eps, eps, 0.0, d],
            vec![d, d, d, 0.0],
        ];
        MetricSpace::from_matrix(labels(4), rows, false).unwrap()
    }

    #[test]
    fn four_point_distances_and_aspect() {
        let m = four_point(1.0, 100.0);
        assert_eq!(m.distance(0, 1), 1.0);
        assert_eq!(m.distance(0, 3), 100.0);
        assert_eq!(m.aspect_ratio().unwrap(), 100.0);
    }

    #[test]
    fn aspect_ratio_examples() {
        assert_eq!(MetricSpace::uniform(5).aspect_ratio().unwrap(), 1.0);
        let rows = vec![vec![0.0, 2.0, 3.0], vec![2.0, 0.0, 4.0], vec![3.0, 4.0, 0.0]];
        let m = MetricSpace::from_matrix(labels(3), rows, false).unwrap();
        assert_eq!(m.aspect_ratio().unwrap(), 2.0);
        assert_eq!(
            MetricSpace::uniform(1).aspect_ratio(),
            Err(ModelError::AspectRatioUndefined)
        );
    }

    #[test]
    fn rejects_triangle_violation() {
        let rows = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        let err = MetricSpace::from_matrix(labels(3), rows, false).unwrap_err();
        assert!(matches!(err, ModelError::TriangleViolation { p: 0, q: 1, r: 2, .. }));
    }

    #[test]
    fn zero_distance_needs_flag() {
        let rows = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(MetricSpace::from_matrix(labels(2), rows.clone(), false).is_err());
        assert!(MetricSpace::from_matrix(labels(2), rows, true).is_ok());
    }

    #[test]
    fn euclidean_coords() {
        let m = MetricSpace::from_coords(
            labels(3),
            &[vec![0.0, 0.0], vec![3.0, 4.0], vec![0.0, 4.0]],
            MetricKind::Euclidean,
            false,
        )
        .unwrap();
        assert!((m.distance(0, 1) - 5.0).abs() < TOL);
        let u = MetricSpace::from_coords(labels(2), &[vec![0.0], vec![9.0]], MetricKind::Uniform, false)
            .unwrap();
        assert_eq!(u.distance(0, 1), 1.0);
    }

    #[test]
    fn concave_distance_examples() {
        let m = MetricSpace::uniform(2);
        let sqrt = ConcaveFn::sqrt();
        let a = Request { id: 0, point: 0, arrival: 0 };
        let b = Request { id: 1, point: 0, arrival: 4 };
        assert_eq!(concave_time_dist(&m, &a, &a, &sqrt), 0.0);
        assert!((concave_time_dist(&m, &a, &b, &sqrt) - 2.0).abs() < TOL);
        let c = Request { id: 2, point: 1, arrival: 1 };
        let id = ConcaveFn::identity();
        assert!((concave_time_dist(&m, &a, &c, &id) - 2.0).abs() < TOL);
    }
}
