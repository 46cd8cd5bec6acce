//! Principal component analysis of word vectors.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, symmetric_eigen};

/// Number of principal components kept for word vectors.
pub const DEFAULT_COMPONENTS: usize = 7;

/// Eigenvalues at or below this fraction of the largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` unit vectors, or zero vectors past the rank of the data.
    pub components: Vec<Vec<f64>>,
    /// Population variance along each component, non-increasing.
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    /// A model that projects everything to zero.
    pub fn zeros(dim: usize, k: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            components: vec![vec![0.0; dim]; k],
            explained_variance: vec![0.0; k],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// `(v - mean) . component` for every component.
    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.mean.len() {
            return Err(Error::WidthMismatch {
                expected: self.mean.len(),
                found: v.len(),
            });
        }
        let centered: Vec<f64> = v.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        Ok(self.components.iter().map(|c| dot(&centered, c)).collect())
    }
}

/// Fits `k` components to the rows of `vectors`.
///
/// The covariance uses 1/n normalization. Each component is sign-fixed so
/// its largest-magnitude coordinate is positive.
pub fn fit_pca<R: AsRef<[f64]>>(vectors: &[R], k: usize) -> Result<PcaModel> {
    let first = vectors.first().ok_or(Error::EmptyInput("fit_pca"))?;
    let dim = first.as_ref().len();
    for (row, v) in vectors.iter().enumerate() {
        let v = v.as_ref();
        if v.len() != dim {
            return Err(Error::WidthMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if let Some(col) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }

    let n = vectors.len() as f64;
    let mut mean = vec![0.0; dim];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v.as_ref()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut cov = vec![vec![0.0; dim]; dim];
    let mut centered = vec![0.0; dim];
    for v in vectors {
        for ((c, x), m) in centered.iter_mut().zip(v.as_ref()).zip(&mean) {
            *c = x - m;
        }
        for i in 0..dim {
            let ci = centered[i];
            if ci == 0.0 {
                continue;
            }
            for j in 0..=i {
                cov[i][j] += ci * centered[j];
            }
        }
    }
    for i in 0..dim {
        for j in 0..=i {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }

    let eig = symmetric_eigen(&cov)?;
    let largest = eig.values.first().copied().unwrap_or(0.0);
    let mut model = PcaModel::zeros(dim, k);
    model.mean = mean;
    for (i, (value, vector)) in eig.values.iter().zip(eig.vectors).take(k).enumerate() {
        if largest <= 0.0 || *value <= RANK_TOLERANCE * largest {
            break;
        }
        model.components[i] = sign_fixed(vector);
        model.explained_variance[i] = *value;
    }
    Ok(model)
}

fn sign_fixed(mut v: Vec<f64>) -> Vec<f64> {
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, x)| {
            if x.abs() > bv {
                (i, x.abs())
            } else {
                (bi, bv)
            }
        })
        .0;
    if v.get(pivot).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}
