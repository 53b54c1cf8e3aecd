//! Finite MTS state spaces.

use crate::cost::TOL;

/// A finite metric state space; index 0 is the start state.
pub trait MtsSpace {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn cost(&self, i: usize, j: usize) -> f64;
    /// Tie-break key; smaller keys win ties.
    fn key(&self, i: usize) -> u64 {
        i as u64
    }
}

/// Explicit transition-cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSpace {
    n: usize,
    c: Vec<f64>,
    keys: Vec<u64>,
}

impl MatrixSpace {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                c[i * n + j] = v;
                c[j * n + i] = v;
            }
        }
        MatrixSpace { n, c, keys: (0..n as u64).collect() }
    }

    pub fn with_keys(mut self, keys: Vec<u64>) -> Self {
        assert_eq!(keys.len(), self.n);
        self.keys = keys;
        self
    }

    pub fn diameter(&self) -> f64 {
        self.c.iter().copied().fold(0.0, f64::max)
    }

    /// Whether the matrix is a metric.
    pub fn is_metric(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| self.cost(i, i) == 0.0)
            && (0..n).all(|i| (0..n).all(|j| self.cost(i, j) == self.cost(j, i)))
            && (0..n).all(|i| {
                (0..n).all(|j| (0..n).all(|k| self.cost(i, k) <= self.cost(i, j) + self.cost(j, k) + TOL))
            })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.c[i * self.n..(i + 1) * self.n]
    }
}

impl MtsSpace for MatrixSpace {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn cost(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }

    fn key(&self, i: usize) -> u64 {
        self.keys[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_space_is_metric() {
        let s = MatrixSpace::from_fn(4, |i, j| (i as f64 - j as f64).abs());
        assert!(s.is_metric());
        assert_eq!(s.diameter(), 3.0);
        assert_eq!(s.row(1), &[1.0, 0.0, 1.0, 2.0]);
    }
}
