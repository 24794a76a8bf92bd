use num_complex::Complex64;
use rayon::prelude::*;

use crate::measures::EmpiricalTorus;

/// Dense n × m cost matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_fn<F: Fn(usize, usize) -> f64 + Sync>(rows: usize, cols: usize, f: F) -> Self {
        let data = (0..rows * cols)
            .into_par_iter()
            .map(|k| f(k / cols, k % cols))
            .collect();
        CostMatrix { rows, cols, data }
    }

    pub fn euclidean(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| (a[i] - b[j]).norm())
    }

    pub fn line(a: &[f64], b: &[f64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| (a[i] - b[j]).abs())
    }

    pub fn torus(a: &[Vec<f64>], b: &[Vec<f64>]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| EmpiricalTorus::distance(&a[i], &b[j]))
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn mean(&self) -> f64 {
        crate::numeric::pairwise_sum(&self.data) / self.data.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}
