use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Assignment of every speaker to exactly one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, speaker: &str) -> Option<usize> {
        self.assignments.get(speaker).copied()
    }

    /// Speakers of each fold, sorted.
    pub fn folds(&self) -> Vec<BTreeSet<&str>> {
        let mut out = vec![BTreeSet::new(); self.k];
        for (s, &f) in &self.assignments {
            out[f].insert(s.as_str());
        }
        out
    }
}

/// Splits speakers into `k` folds balanced by session count.
///
/// Speakers are shuffled with the seeded RNG, stably sorted by descending
/// session count, then each is placed in the fold with the fewest sessions
/// so far (ties: fewer speakers, then lower index).
pub fn grouped_kfold(speakers: &[(String, usize)], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::validation(alloc::format!("k must be >= 2, got {k}")));
    }
    let distinct: BTreeSet<&str> = speakers.iter().map(|(s, _)| s.as_str()).collect();
    if distinct.len() != speakers.len() {
        return Err(Error::validation("speaker list contains duplicates"));
    }
    if speakers.len() < k {
        return Err(Error::TooFewSpeakers {
            k,
            speakers: speakers.len(),
        });
    }

    let mut order: Vec<&(String, usize)> = speakers.iter().collect();
    // Name order, seeded shuffle, then largest speakers first (stable).
    order.sort_by(|a, b| a.0.cmp(&b.0));
    SplitMix64::new(seed).shuffle(&mut order);
    order.sort_by_key(|s| core::cmp::Reverse(s.1));

    let mut load = vec![(0usize, 0usize); k];
    let mut assignments = BTreeMap::new();
    for (speaker, sessions) in order {
        let fold = (0..k).min_by_key(|&f| (load[f], f)).unwrap_or(0);
        load[fold].0 += sessions;
        load[fold].1 += 1;
        assignments.insert(speaker.clone(), fold);
    }
    Ok(FoldPlan { k, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn speakers(counts: &[usize]) -> Vec<(String, usize)> {
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (alloc::format!("spk{i}"), c))
            .collect()
    }

    #[test]
    fn two_folds_of_two() {
        let plan = grouped_kfold(&speakers(&[1, 1, 1, 1]), 2, 1).unwrap();
        let folds = plan.folds();
        assert_eq!(folds[0].len(), 2);
        assert_eq!(folds[1].len(), 2);
        assert!(folds[0].is_disjoint(&folds[1]));
    }

    #[test]
    fn balances_sessions_not_speakers() {
        for seed in 0..20 {
            let plan = grouped_kfold(&speakers(&[3, 1, 1, 1]), 2, seed).unwrap();
            let big = plan.fold_of("spk0").unwrap();
            let folds = plan.folds();
            assert_eq!(folds[big].len(), 1);
            assert_eq!(folds[1 - big].len(), 3);
        }
    }

    #[test]
    fn deterministic_and_order_independent() {
        let s = speakers(&[2, 1, 3, 1, 1, 2, 2]);
        let a = grouped_kfold(&s, 3, 42).unwrap();
        assert_eq!(a, grouped_kfold(&s, 3, 42).unwrap());
        let mut rev = s.clone();
        rev.reverse();
        assert_eq!(a, grouped_kfold(&rev, 3, 42).unwrap());
    }

    #[test]
    fn every_fold_non_empty() {
        let s = speakers(&[5, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
        for k in 2..=12 {
            let plan = grouped_kfold(&s, k, 9).unwrap();
            assert!(plan.folds().iter().all(|f| !f.is_empty()), "k={k}");
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            grouped_kfold(&speakers(&[1, 1]), 3, 0),
            Err(Error::TooFewSpeakers { k: 3, speakers: 2 })
        );
        assert!(grouped_kfold(&speakers(&[1, 1]), 1, 0).is_err());
        let dup = vec![("a".to_string(), 1), ("a".to_string(), 2)];
        assert!(grouped_kfold(&dup, 2, 0).is_err());
    }
}
