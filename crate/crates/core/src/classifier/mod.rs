//! Speaker-independent cross-validation around L2-regularized logistic
//! regression.

mod cv;
mod folds;
mod logreg;
mod metrics;

pub use cv::{
    extract_fold_features, plan_folds, run_cross_validation, run_fold, CvConfig, CvReport, FoldOutcome,
    FoldReport, SessionPrediction,
};
pub use folds::{grouped_kfold, FoldPlan};
pub use logreg::{
    fit_standardizer, logistic_loss_and_gradient, train_logreg, LogRegModel, Standardizer,
    TrainConfig,
};
pub use metrics::{evaluate_metrics, Averaging, Metrics};
