//! Vector-autoregression toolkit: VAR(p) estimation with constants and
//! centered seasonal dummies, information-criterion lag selection, Granger
//! causality Wald tests, Cholesky-orthogonalized impulse responses, the
//! Johansen trace test with embedded simulated critical values, and VECM
//! estimation with level forecasts.

pub mod error;
pub mod granger;
pub mod irf;
pub mod johansen;
pub mod model;
pub mod tablegen;
pub mod tables;
pub mod vecm;

pub use error::{Result, VarError};
pub use granger::{granger_wald, GrangerResult};
pub use irf::{irf_cholesky, IrfResult};
pub use johansen::{johansen_trace, JohansenResult, TraceRow};
pub use model::{
    fit_var, select_lag, CoefRow, EquationTable, InfoCriteria, LagCriterion, VarFit, VarSpec,
    SEASON_LENGTH,
};
pub use tables::{builtin_trace_cv, TraceCvRow, TraceCvTable, MAX_DIMENSION};
pub use vecm::{fit_vecm, forecast_vecm, VecmFit};
