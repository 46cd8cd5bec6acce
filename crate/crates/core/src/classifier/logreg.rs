use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Standard deviations below this are replaced by a scale of 1.
const MIN_SCALE: f64 = 1e-12;
/// Probabilities are kept this far from 0 and 1.
const PROBA_EPS: f64 = 1e-15;
/// Armijo sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;

/// Per-feature z-scoring fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Strictly positive.
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

fn check_matrix<R: AsRef<[f64]>>(x: &[R]) -> Result<usize> {
    let width = x.first().ok_or(Error::EmptyInput("training matrix"))?.as_ref().len();
    for (row, r) in x.iter().enumerate() {
        let r = r.as_ref();
        if r.len() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: r.len(),
            });
        }
        if let Some(col) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }
    Ok(width)
}

/// Mean and population standard deviation of each column.
pub fn fit_standardizer<R: AsRef<[f64]>>(x: &[R]) -> Result<Standardizer> {
    let width = check_matrix(x)?;
    let n = x.len() as f64;
    let mut mean = vec![0.0; width];
    for r in x {
        for (m, v) in mean.iter_mut().zip(r.as_ref()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; width];
    for r in x {
        for ((s, v), m) in var.iter_mut().zip(r.as_ref()).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let scale = var
        .into_iter()
        .map(|s| {
            let sd = libm::sqrt(s / n);
            if sd < MIN_SCALE {
                1.0
            } else {
                sd
            }
        })
        .collect();
    Ok(Standardizer { mean, scale })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// L2 strength on the weights; the bias is not penalized.
    pub lambda: f64,
    pub max_iter: usize,
    /// Stop once the gradient's infinity norm drops below this.
    pub tol: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    /// Weights in standardized feature space.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub scaler: Standardizer,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each accepted step, starting from the zero model.
    pub loss_history: Vec<f64>,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-z.abs()))
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// Mean logistic loss plus `lambda / 2 * |w|^2`, and its gradient with
/// respect to `(w, b)`.
pub fn logistic_loss_and_gradient<R: AsRef<[f64]>>(
    x: &[R],
    y: &[bool],
    weights: &[f64],
    bias: f64,
    lambda: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let row = row.as_ref();
        let z = dot(row, weights) + bias;
        let target = if label { 1.0 } else { 0.0 };
        loss += softplus(z) - target * z;
        let residual = sigmoid(z) - target;
        for (g, v) in grad.iter_mut().zip(row) {
            *g += residual * v;
        }
        grad_b += residual;
    }
    loss /= n;
    grad_b /= n;
    for (g, w) in grad.iter_mut().zip(weights) {
        *g = *g / n + lambda * w;
    }
    loss += 0.5 * lambda * dot(weights, weights);
    (loss, grad, grad_b)
}

/// Full-batch gradient descent with backtracking line search on
/// standardized features. `y[i]` is true for the positive (AD) class.
pub fn train_logreg<R: AsRef<[f64]>>(x: &[R], y: &[bool], config: &TrainConfig) -> Result<LogRegModel> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if !(config.lambda.is_finite() && config.lambda >= 0.0) {
        return Err(Error::validation(alloc::format!(
            "lambda must be finite and >= 0, got {}",
            config.lambda
        )));
    }
    let scaler = fit_standardizer(x)?;
    let z: Vec<Vec<f64>> = x.iter().map(|r| scaler.transform(r.as_ref())).collect();
    let width = scaler.width();

    let mut weights = vec![0.0; width];
    let mut bias = 0.0;
    let (mut loss, mut grad, mut grad_b) =
        logistic_loss_and_gradient(&z, y, &weights, bias, config.lambda);
    let mut loss_history = vec![loss];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iter {
        let grad_inf = grad.iter().fold(grad_b.abs(), |m, g| m.max(g.abs()));
        if grad_inf < config.tol {
            converged = true;
            break;
        }
        let grad_sq = dot(&grad, &grad) + grad_b * grad_b;
        let mut t = step;
        let accepted = loop {
            let cand_w: Vec<f64> = weights.iter().zip(&grad).map(|(w, g)| w - t * g).collect();
            let cand_b = bias - t * grad_b;
            let (cand_loss, cand_grad, cand_grad_b) =
                logistic_loss_and_gradient(&z, y, &cand_w, cand_b, config.lambda);
            if cand_loss <= loss - ARMIJO_C * t * grad_sq {
                break Some((cand_w, cand_b, cand_loss, cand_grad, cand_grad_b));
            }
            t *= 0.5;
            if t < 1e-16 {
                break None;
            }
        };
        let Some((w, b, l, g, gb)) = accepted else {
            // No decrease is representable any more.
            break;
        };
        weights = w;
        bias = b;
        loss = l;
        grad = g;
        grad_b = gb;
        loss_history.push(loss);
        step = (2.0 * t).min(1e6);
        iterations += 1;
    }
    if !converged {
        let grad_inf = grad.iter().fold(grad_b.abs(), |m, g| m.max(g.abs()));
        converged = grad_inf < config.tol;
    }

    Ok(LogRegModel {
        weights,
        bias,
        scaler,
        lambda: config.lambda,
        iterations,
        converged,
        loss_history,
    })
}

impl LogRegModel {
    pub fn width(&self) -> usize {
        self.weights.len()
    }

    /// Probability of the positive class, strictly inside (0, 1).
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: x.len(),
            });
        }
        if let Some(col) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        let z = dot(&self.scaler.transform(x), &self.weights) + self.bias;
        Ok(sigmoid(z).clamp(PROBA_EPS, 1.0 - PROBA_EPS))
    }

    pub fn predict(&self, x: &[f64], threshold: f64) -> Result<bool> {
        Ok(self.predict_proba(x)? >= threshold)
    }
}
