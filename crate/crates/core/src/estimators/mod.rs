//! Sparse Kaczmarz (linearized Bregman Kaczmarz) in three backends.
//!
//! All backends share the same control flow: for `k = 1..=N`,
//! `x = shrink(v, lambda)`, pick row `i = (k - 1) mod m`, and update
//! `v += a_i (y_i - a_i^T x) / |a_i|^2`. The estimate returned is
//! `shrink(v, lambda)` after the last update.

mod fixed;
mod float;
pub mod io;
mod problem;
mod stochastic;

pub use fixed::{sparse_kaczmarz_fixed, FixedPointFormat};
pub use float::{sparse_kaczmarz_float, FloatKaczmarz};
pub use problem::{
    apply_lambda_scaling, build_convolution_problem, row_normalize, LambdaScaling, LinearProblem,
    INTERNAL_LAMBDA,
};
pub use stochastic::sparse_kaczmarz_stochastic;

use crate::bitstream::SngConfig;
use crate::circuits::{DEFAULT_CARRY_DEPTH, DEFAULT_DELAY, DEFAULT_MAX_CAPACITY};
use crate::error::{Error, Result};

/// Soft threshold `max(|v| - lambda, 0) * sign(v)`.
pub fn shrink_scalar(v: f64, lambda: f64) -> Result<f64> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(Error::Domain(format!("shrink threshold {lambda} is negative")));
    }
    Ok(shrink_unchecked(v, lambda))
}

#[inline]
pub(crate) fn shrink_unchecked(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// Bitstream-level parameters of the stochastic datapath.
#[derive(Clone, Debug, PartialEq)]
pub struct ScParams {
    /// Bitstream length L.
    pub len: usize,
    /// Register length M of the stochastic maximum blocks.
    pub max_capacity: u32,
    /// Carry store depth D of adders and the scalar product.
    pub carry_depth: u32,
    /// Decorrelation delay applied to the second use of the row streams.
    pub delay: usize,
    pub sng: SngConfig,
}

impl Default for ScParams {
    fn default() -> Self {
        Self {
            len: (1 << 16) - 2,
            max_capacity: DEFAULT_MAX_CAPACITY,
            carry_depth: DEFAULT_CARRY_DEPTH,
            delay: DEFAULT_DELAY,
            sng: SngConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Float,
    Fixed(FixedPointFormat),
    Stochastic,
}

impl Backend {
    pub fn label(&self) -> String {
        match self {
            Backend::Float => "float".into(),
            Backend::Fixed(f) => format!("fixed{}", f.width()),
            Backend::Stochastic => "sc".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub lambda: f64,
    pub iterations: usize,
    pub backend: Backend,
    pub sc: ScParams,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(lambda: f64, iterations: usize, backend: Backend) -> Self {
        Self {
            lambda,
            iterations,
            backend,
            sc: ScParams::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda {} outside [0, 1)", self.lambda)));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iteration count must be >= 1".into()));
        }
        if self.sc.len == 0 {
            return Err(Error::Config("bitstream length must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Fixed point: saturated arithmetic results.
    pub saturations: u64,
    /// Stochastic: stored v values that reached the boundary of [-1, 1].
    pub range_exits: u64,
    /// Stochastic: carry units dropped by full stores.
    pub carry_overflow: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorOutput {
    pub x_hat: Vec<f64>,
    /// `y_i - a_i^T x^(k)` per iteration, as seen by the backend.
    pub residuals: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// Runs the configured backend on `p` as given.
pub fn solve(p: &LinearProblem, cfg: &SolverConfig) -> Result<EstimatorOutput> {
    match cfg.backend {
        Backend::Float => sparse_kaczmarz_float(p, cfg),
        Backend::Fixed(fmt) => sparse_kaczmarz_fixed(p, cfg, fmt),
        Backend::Stochastic => sparse_kaczmarz_stochastic(p, cfg),
    }
}

/// Solves at threshold `lambda_prime` through the internal-threshold
/// rescaling: rows are normalised, `y` is scaled by `0.5 / lambda_prime`,
/// the backend runs with `lambda = 0.5` and the estimate is scaled back.
/// `cfg.lambda` is ignored.
pub fn solve_with_lambda_prime(
    p: &LinearProblem,
    lambda_prime: f64,
    cfg: &SolverConfig,
) -> Result<EstimatorOutput> {
    let normalized = row_normalize(p)?;
    let (scaled, scaling) = apply_lambda_scaling(&normalized, lambda_prime)?;
    let inner = SolverConfig {
        lambda: INTERNAL_LAMBDA,
        ..cfg.clone()
    };
    let mut out = solve(&scaled, &inner)?;
    out.x_hat = scaling.unscale(&out.x_hat);
    Ok(out)
}
