//! Experiment driver: random problems, RMSE sweeps, shrink-error tables.
//!
//! Everything emitted is a deterministic function of the configuration and
//! the master seed. Trials run in parallel, each with its own generators,
//! and are reduced in trial order, so results do not depend on the thread
//! count.

pub mod config;
mod problem_gen;
pub mod sweep;
pub mod table;

pub use config::{ExperimentConfig, ShrinkSweepConfig};
pub use problem_gen::{gen_problem, rmse, squared_error};
pub use sweep::{
    calibrate_lambda_prime, lambda_prime_grid, run_rmse_sweep, run_shrink_error_sweep, trial_seed, RmseReport, RmseRow,
    ShrinkTables,
};
pub use table::Table;
