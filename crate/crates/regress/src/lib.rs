//! Binary classification for boom–bust phases: maximum-likelihood logistic
//! regression, elastic-net regularization by majorized coordinate descent,
//! expanding-window tuning, backward stepwise selection, model diagnostics,
//! and confusion-matrix scoring.

mod cv;
mod design;
mod enet;
mod error;
mod logit;
mod score;
mod stepwise;

pub mod diag;

pub use cv::{cv_tune, log_loss, CvCell, CvOutcome, CvPlan, CvTable};
pub use design::{Design, Scaler};
pub use enet::{
    enet_objective, enet_path, fit_enet, fit_enet_from, kkt_violation, lambda_max, nll_gradient,
    EnetFit,
};
pub use error::{RegressError, Result};
pub use logit::{fit_logit, LogitFit, SEPARATION_BOUND};
pub use score::{classify_and_score, ConfusionMatrix, Predictor};
pub use stepwise::{backward_stepwise, StepRecord, StepwiseFit};

pub use diag::{diagnostics, link_test, vif, Diagnostics};
