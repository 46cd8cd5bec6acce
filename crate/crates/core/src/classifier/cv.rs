use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::folds::{grouped_kfold, FoldPlan};
use super::logreg::{train_logreg, TrainConfig};
use super::metrics::{evaluate_metrics, Averaging, Metrics};
use crate::error::{Error, Result};
use crate::features::{
    assemble_feature_vector, fit_vocabulary_pca, AoaTable, FeatureContext, FeatureMask,
    FeatureVector, WordVectorTable,
};
use crate::registry::AoiRegistry;
use crate::token::{Label, SessionRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub k: usize,
    pub seed: u64,
    pub train: TrainConfig,
    /// Probability at or above which a session is called AD.
    pub threshold: f64,
    pub mask: FeatureMask,
    pub averaging: Averaging,
    /// Only sessions from these corpora are used for training (all if `None`).
    pub train_corpora: Option<BTreeSet<String>>,
    /// Only sessions from this corpus are scored (all if `None`).
    pub test_corpus: Option<String>,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k: 10,
            seed: 42,
            train: TrainConfig::default(),
            threshold: 0.5,
            mask: FeatureMask::ALL,
            averaging: Averaging::Macro,
            train_corpora: None,
            test_corpus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionPrediction {
    pub session_id: String,
    pub speaker_id: String,
    pub fold: usize,
    pub truth: Label,
    pub predicted: Label,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldReport {
    pub fold: usize,
    pub train_sessions: usize,
    pub test_sessions: usize,
    pub test_speakers: Vec<String>,
    /// AOIs left after filtering the registry to the fold's training words.
    pub aois_after_filter: usize,
    pub converged: bool,
    pub iterations: usize,
    /// `None` when the fold has nothing to score.
    pub metrics: Option<Metrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub report: FoldReport,
    /// Pairs of (index into the session list, prediction).
    pub predictions: Vec<(usize, SessionPrediction)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Computed once over the pooled predictions of every fold.
    pub metrics: Metrics,
    pub per_fold: Vec<FoldReport>,
    /// In session-list order.
    pub predictions: Vec<SessionPrediction>,
    pub plan: FoldPlan,
}

impl CvReport {
    /// Pools fold outcomes (in fold order) into one report.
    pub fn from_outcomes(
        plan: FoldPlan,
        session_count: usize,
        outcomes: Vec<FoldOutcome>,
        averaging: Averaging,
    ) -> Result<Self> {
        let mut slots: Vec<Option<SessionPrediction>> = alloc::vec![None; session_count];
        let mut per_fold = Vec::with_capacity(outcomes.len());
        for outcome in outcomes {
            for (idx, pred) in outcome.predictions {
                if slots[idx].is_some() {
                    return Err(Error::validation(alloc::format!(
                        "session {} was scored by more than one fold",
                        pred.session_id
                    )));
                }
                slots[idx] = Some(pred);
            }
            per_fold.push(outcome.report);
        }
        let predictions: Vec<SessionPrediction> = slots.into_iter().flatten().collect();
        let truth: Vec<Label> = predictions.iter().map(|p| p.truth).collect();
        let predicted: Vec<Label> = predictions.iter().map(|p| p.predicted).collect();
        let metrics = evaluate_metrics(&predicted, &truth, averaging)?;
        Ok(Self {
            metrics,
            per_fold,
            predictions,
            plan,
        })
    }
}

/// Features for `targets`, with the registry filter and the word-vector PCA
/// both derived from the words of `train` only.
pub fn extract_fold_features(
    train: &[&SessionRecord],
    targets: &[&SessionRecord],
    registry: &AoiRegistry,
    aoa: &AoaTable,
    vectors: &WordVectorTable,
    mask: FeatureMask,
) -> Result<(Vec<FeatureVector>, usize)> {
    let vocab: BTreeSet<String> = train
        .iter()
        .flat_map(|s| s.tokens.iter().map(|t| t.word.clone()))
        .collect();
    let filtered = registry.filter(&vocab);
    let pca = fit_vocabulary_pca(vocab.iter().map(String::as_str), vectors)?;
    let ctx = FeatureContext {
        registry: &filtered,
        aoa,
        vectors,
        pca: &pca,
        mask,
    };
    let features = targets
        .iter()
        .map(|s| assemble_feature_vector(s, &ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok((features, filtered.len()))
}

/// Speaker fold plan over every session in the list.
pub fn plan_folds(sessions: &[SessionRecord], k: usize, seed: u64) -> Result<FoldPlan> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for s in sessions {
        *counts.entry(s.speaker_id.as_str()).or_insert(0) += 1;
    }
    let speakers: Vec<(String, usize)> = counts
        .into_iter()
        .map(|(s, c)| (String::from(s), c))
        .collect();
    grouped_kfold(&speakers, k, seed)
}

/// Trains on every fold except `fold` and scores `fold`.
pub fn run_fold(
    sessions: &[SessionRecord],
    plan: &FoldPlan,
    fold: usize,
    registry: &AoiRegistry,
    aoa: &AoaTable,
    vectors: &WordVectorTable,
    config: &CvConfig,
) -> Result<FoldOutcome> {
    let in_fold = |s: &SessionRecord| plan.fold_of(&s.speaker_id) == Some(fold);
    let train: Vec<&SessionRecord> = sessions
        .iter()
        .filter(|s| !in_fold(s))
        .filter(|s| {
            config
                .train_corpora
                .as_ref()
                .is_none_or(|c| c.contains(&s.corpus))
        })
        .collect();
    let test_idx: Vec<usize> = sessions
        .iter()
        .enumerate()
        .filter(|(_, s)| in_fold(s))
        .filter(|(_, s)| config.test_corpus.as_ref().is_none_or(|c| *c == s.corpus))
        .map(|(i, _)| i)
        .collect();

    let labels: Vec<bool> = train.iter().map(|s| s.label.is_positive()).collect();
    if !(labels.contains(&true) && labels.contains(&false)) {
        return Err(Error::FoldMissingClass { fold });
    }

    let mut targets = train.clone();
    targets.extend(test_idx.iter().map(|&i| &sessions[i]));
    let (features, aois_after_filter) =
        extract_fold_features(&train, &targets, registry, aoa, vectors, config.mask)?;
    let (train_x, test_x) = features.split_at(train.len());
    let train_rows: Vec<&[f64]> = train_x.iter().map(|f| f.values.as_slice()).collect();
    let model = train_logreg(&train_rows, &labels, &config.train)?;

    let mut predictions = Vec::with_capacity(test_idx.len());
    for (&idx, fv) in test_idx.iter().zip(test_x) {
        let probability = model.predict_proba(&fv.values)?;
        let s = &sessions[idx];
        predictions.push((
            idx,
            SessionPrediction {
                session_id: s.session_id.clone(),
                speaker_id: s.speaker_id.clone(),
                fold,
                truth: s.label,
                predicted: Label::from_positive(probability >= config.threshold),
                probability,
            },
        ));
    }
    let metrics = if predictions.is_empty() {
        None
    } else {
        let truth: Vec<Label> = predictions.iter().map(|(_, p)| p.truth).collect();
        let pred: Vec<Label> = predictions.iter().map(|(_, p)| p.predicted).collect();
        Some(evaluate_metrics(&pred, &truth, config.averaging)?)
    };
    let test_speakers: BTreeSet<String> = test_idx
        .iter()
        .map(|&i| sessions[i].speaker_id.clone())
        .collect();

    Ok(FoldOutcome {
        report: FoldReport {
            fold,
            train_sessions: train.len(),
            test_sessions: test_idx.len(),
            test_speakers: test_speakers.into_iter().collect(),
            aois_after_filter,
            converged: model.converged,
            iterations: model.iterations,
            metrics,
        },
        predictions,
    })
}

fn check_sessions(sessions: &[SessionRecord]) -> Result<()> {
    let mut ids = BTreeSet::new();
    for s in sessions {
        if !ids.insert(s.session_id.as_str()) {
            return Err(Error::validation(alloc::format!(
                "duplicate session id {:?}",
                s.session_id
            )));
        }
    }
    Ok(())
}

/// Speaker-independent k-fold cross-validation, evaluated on the pooled
/// predictions of all folds.
pub fn run_cross_validation(
    sessions: &[SessionRecord],
    registry: &AoiRegistry,
    aoa: &AoaTable,
    vectors: &WordVectorTable,
    config: &CvConfig,
) -> Result<CvReport> {
    check_sessions(sessions)?;
    let plan = plan_folds(sessions, config.k, config.seed)?;
    let outcomes = (0..config.k)
        .map(|fold| run_fold(sessions, &plan, fold, registry, aoa, vectors, config))
        .collect::<Result<Vec<_>>>()?;
    CvReport::from_outcomes(plan, sessions.len(), outcomes, config.averaging)
}
