//! Parameter estimation, fit diagnostics, traces, sweeps and budgets.

mod budget;
mod fit;
mod sweep;
mod trace;
mod zero_rate;

pub use budget::{fl_budget, surp_budget, FlBudget, SurpBudget};
pub use fit::{density_fit, ks_statistic, param_est, FitReport, FitWinner};
pub use sweep::{beta_sweep, table8_betas, SweepRow};
pub use trace::{Trace, TraceRow};
pub use zero_rate::{empirical_slope, implicit_step_rate, zero_rate_check, ZeroRate};
