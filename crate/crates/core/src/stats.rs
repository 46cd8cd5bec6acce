//! Per-column mean, population standard deviation, minimum and maximum.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StatsSummary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl StatsSummary {
    pub fn as_array(&self) -> [f64; 4] {
        [self.mean, self.std, self.min, self.max]
    }
}

/// Summarizes each of the `width` columns of `rows`.
///
/// Uses the population (1/n) standard deviation. With no rows every
/// statistic is 0. The mean is clamped into `[min, max]` so constant
/// columns report `std == 0` exactly.
pub fn summarize_stats<R: AsRef<[f64]>>(rows: &[R], width: usize) -> Vec<StatsSummary> {
    if rows.is_empty() {
        return alloc::vec![StatsSummary::default(); width];
    }
    let n = rows.len() as f64;
    (0..width)
        .map(|c| {
            let col = rows.iter().map(|r| r.as_ref()[c]);
            let (min, max) = col
                .clone()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            let mean = (col.clone().sum::<f64>() / n).clamp(min, max);
            let var = col.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            StatsSummary {
                mean,
                std: libm::sqrt(var),
                min,
                max,
            }
        })
        .collect()
}

/// Flattens summaries into `[mean, std, min, max]` per column.
pub fn flatten(summaries: &[StatsSummary]) -> Vec<f64> {
    summaries.iter().flat_map(|s| s.as_array()).collect()
}
