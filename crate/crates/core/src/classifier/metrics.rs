use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::token::Label;

/// How per-class precision/recall/F1 are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    /// Unweighted mean over AD and HC.
    #[default]
    Macro,
    /// Mean weighted by each class's support in the truth labels.
    Weighted,
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Averaging::Macro => "macro",
            Averaging::Weighted => "weighted",
        })
    }
}

impl FromStr for Averaging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(Averaging::Macro),
            "weighted" => Ok(Averaging::Weighted),
            other => Err(Error::validation(alloc::format!(
                "unknown averaging {other:?} (expected macro or weighted)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics {
    pub accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Accuracy plus class-averaged precision, recall and F1. Undefined
/// per-class ratios (zero denominators) count as 0.
pub fn evaluate_metrics(predicted: &[Label], truth: &[Label], averaging: Averaging) -> Result<Metrics> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("evaluate_metrics"));
    }
    let n = truth.len();
    let correct = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    let mut out = Metrics {
        accuracy: ratio(correct, n),
        ..Metrics::default()
    };
    for class in Label::ALL {
        let tp = predicted
            .iter()
            .zip(truth)
            .filter(|&(&p, &t)| p == class && t == class)
            .count();
        let predicted_pos = predicted.iter().filter(|&&p| p == class).count();
        let support = truth.iter().filter(|&&t| t == class).count();
        let precision = ratio(tp, predicted_pos);
        let recall = ratio(tp, support);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let weight = match averaging {
            Averaging::Macro => 0.5,
            Averaging::Weighted => ratio(support, n),
        };
        out.precision += weight * precision;
        out.recall += weight * recall;
        out.f1 += weight * f1;
    }
    Ok(out)
}
