//! Error characterisation of the stochastic shrink block.
//!
//! When the magnitude of the shrink input is below the threshold, the ideal
//! output is exactly zero. The maximum block fed with the all-zero line
//! reproduces the threshold stream exactly; the block fed with the nonzero
//! line leaks excess ones with the stationary probability of a birth-death
//! chain on the credit counter. After cancellation those leaked ones are the
//! only ones left at the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bitstream::sng::mix64;
use crate::bitstream::{SngConfig, StreamFactory, TlbStream};
use crate::circuits::{max_stream, shrink_stream};
use crate::error::{Error, Result};

/// Inputs of the closed-form error probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShrinkErrorQuery {
    pub p_a: f64,
    pub p_b: f64,
    pub capacity: u32,
}

impl ShrinkErrorQuery {
    pub fn new(p_a: f64, p_b: f64, capacity: u32) -> Result<Self> {
        if !(p_b > 0.0 && p_b < 1.0) {
            return Err(Error::Domain(format!("P_B = {p_b} must lie strictly inside (0, 1)")));
        }
        if !(0.0..=1.0).contains(&p_a) {
            return Err(Error::Domain(format!("P_A = {p_a} outside [0, 1]")));
        }
        if capacity == 0 {
            return Err(Error::Domain("register length must be >= 1".into()));
        }
        Ok(Self { p_a, p_b, capacity })
    }

    /// Birth/death ratio `P_A (1 - P_B) / (P_B (1 - P_A))`.
    pub fn ratio(&self) -> f64 {
        self.p_a * (1.0 - self.p_b) / (self.p_b * (1.0 - self.p_a))
    }
}

/// Per-bit probability that the maximum block emits a one of `A` that `B`
/// does not cover:
/// `r^M / (sum_{j=0..M} r^j) * P_A (1 - P_B)`.
///
/// The geometric sum is accumulated term by term, so `r = 1` needs no
/// special casing and yields `P_A (1 - P_B) / (M + 1)`.
pub fn p_error_closed_form(q: &ShrinkErrorQuery) -> f64 {
    let up = q.p_a * (1.0 - q.p_b);
    if up == 0.0 {
        return 0.0;
    }
    if q.p_a >= 1.0 {
        // every cycle is (1, b): the register fills and stays full
        return 1.0 - q.p_b;
    }
    let r = q.ratio();
    // normalise by the largest power to stay finite for r > 1
    let (mut sum, mut term) = (0.0, 1.0);
    if r <= 1.0 {
        for _ in 0..=q.capacity {
            sum += term;
            term *= r;
        }
        r.powi(q.capacity as i32) / sum * up
    } else {
        let inv = 1.0 / r;
        for _ in 0..=q.capacity {
            sum += term;
            term *= inv;
        }
        up / sum
    }
}

pub fn p_error(p_a: f64, p_b: f64, capacity: u32) -> Result<f64> {
    Ok(p_error_closed_form(&ShrinkErrorQuery::new(p_a, p_b, capacity)?))
}

/// Upper bound `0.25 / M` on the zero-output error for a threshold of 0.5.
pub fn p_error_max(capacity: u32) -> Result<f64> {
    if capacity == 0 {
        return Err(Error::Domain("register length must be >= 1".into()));
    }
    Ok(0.25 / capacity as f64)
}

/// Closed form evaluated at `P_A = P_B = 0.5`: `0.25 / (M + 1)`.
pub fn p_error_at_threshold(capacity: u32) -> Result<f64> {
    p_error(0.5, 0.5, capacity)
}

pub const DEFAULT_RESOLUTION: usize = 10_000;

/// Mean of the zero-output error over `P_A` uniform on `[0, 0.5]`, threshold
/// 0.5, by composite Simpson with `resolution` intervals (rounded up to even).
pub fn expected_p_error(capacity: u32, resolution: usize) -> Result<f64> {
    if capacity == 0 {
        return Err(Error::Domain("register length must be >= 1".into()));
    }
    if resolution < 100 {
        return Err(Error::Domain(format!(
            "quadrature resolution {resolution} below 100 intervals"
        )));
    }
    let intervals = resolution + resolution % 2;
    let (lo, hi) = (0.0, 0.5);
    let h = (hi - lo) / intervals as f64;
    let f = |pa: f64| {
        p_error_closed_form(&ShrinkErrorQuery {
            p_a: pa,
            p_b: 0.5,
            capacity,
        })
    };
    let mut acc = f(lo) + f(hi);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    let integral = acc * h / 3.0;
    Ok(integral / (hi - lo))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalError {
    pub mean: f64,
    pub std_err: f64,
}

/// Register shape used by the Monte Carlo routines here: 32 bits, so that
/// streams far longer than 2^16 do not wrap around.
pub fn monte_carlo_sng() -> SngConfig {
    SngConfig::with_width(32).expect("32-bit taps are tabulated")
}

/// Mean absolute output of the SC shrink block for inputs that should map
/// to zero: magnitude `a < 0.5` against a threshold stream of 0.5.
///
/// Trial `t` draws `a` uniformly from the stratum
/// `[t, t + 1) * 0.5 / trials`, so the trials together cover `[0, 0.5]`
/// evenly. Trials run in parallel and are reduced in index order.
pub fn empirical_shrink_error(capacity: u32, len: usize, trials: usize, seed: u64) -> Result<EmpiricalError> {
    empirical_shrink_error_with(&monte_carlo_sng(), capacity, len, trials, seed)
}

pub fn empirical_shrink_error_with(
    sng: &SngConfig,
    capacity: u32,
    len: usize,
    trials: usize,
    seed: u64,
) -> Result<EmpiricalError> {
    if trials == 0 || len == 0 {
        return Err(Error::Domain("need at least one trial and a nonempty stream".into()));
    }
    crate::circuits::MaxCircuitState::new(capacity)?;
    let errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let trial_seed = mix64(seed ^ mix64(t as u64 ^ 0x5348_524b));
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            let a = 0.5 * (t as f64 + rng.random::<f64>()) / trials as f64;
            let mut streams = StreamFactory::new(sng, trial_seed)?;
            let v = TlbStream::new(streams.unipolar(a, len)?, crate::BitStream::zeros(len))?;
            let lambda = streams.unipolar(0.5, len)?;
            Ok(shrink_stream(&v, &lambda, capacity)?.decode().abs())
        })
        .collect::<Result<_>>()?;

    let mean = errors.iter().sum::<f64>() / trials as f64;
    let std_err = if trials > 1 {
        let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(EmpiricalError { mean, std_err })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxErrorEstimate {
    /// Positions where the output is one but `B` is zero, divided by L.
    pub rate: f64,
    /// Closed-form prediction for the same inputs.
    pub theory: f64,
    /// Binomial standard error `sqrt(p (1 - p) / L)` at the predicted rate.
    pub binomial_se: f64,
    /// Standard error of the rate from [`MAX_ERROR_BATCHES`] contiguous
    /// batch means; unlike `binomial_se` it accounts for clustered errors.
    pub batch_se: f64,
}

pub const MAX_ERROR_BATCHES: usize = 100;

impl MaxErrorEstimate {
    pub fn z_score(&self) -> f64 {
        if self.binomial_se == 0.0 {
            if self.rate == self.theory {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.rate - self.theory) / self.binomial_se
        }
    }

    pub fn batch_z_score(&self) -> f64 {
        (self.rate - self.theory) / self.batch_se
    }
}

/// Runs the maximum circuit on independent streams of values `p_a` and
/// `p_b` and measures its excess-one rate.
pub fn empirical_max_error(p_a: f64, p_b: f64, capacity: u32, len: usize, seed: u64) -> Result<MaxErrorEstimate> {
    let theory = p_error(p_a, p_b, capacity)?;
    let mut streams = StreamFactory::new(&monte_carlo_sng(), seed)?;
    let a = streams.unipolar(p_a, len)?;
    let b = streams.unipolar(p_b, len)?;
    let out = max_stream(&a, &b, capacity)?;
    let excess = out.and_not(&b)?;
    let rate = excess.count_ones() as f64 / len as f64;
    Ok(MaxErrorEstimate {
        rate,
        theory,
        binomial_se: (theory * (1.0 - theory) / len as f64).sqrt(),
        batch_se: batch_standard_error(&excess, rate),
    })
}

fn batch_standard_error(s: &crate::BitStream, mean: f64) -> f64 {
    let batches = MAX_ERROR_BATCHES.min(s.len());
    if batches < 2 {
        return 0.0;
    }
    let mut counts = vec![0usize; batches];
    let mut sizes = vec![0usize; batches];
    for (i, bit) in s.iter().enumerate() {
        let k = i * batches / s.len();
        sizes[k] += 1;
        counts[k] += bit as usize;
    }
    let var = counts
        .iter()
        .zip(&sizes)
        .map(|(&c, &n)| (c as f64 / n as f64 - mean).powi(2))
        .sum::<f64>()
        / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_reference_value() {
        // r = 2/3: (2/3)^10 / sum_{j=0}^{10} (2/3)^j * 0.2
        let r: f64 = 2.0 / 3.0;
        let sum: f64 = (0..=10).map(|j| r.powi(j)).sum();
        let oracle = r.powi(10) / sum * 0.2;
        let got = p_error(0.4, 0.5, 10).unwrap();
        assert!((got - oracle).abs() < 1e-15);
        assert!((got - 1.1697e-3).abs() < 1e-6);
    }

    #[test]
    fn zero_input_has_no_error() {
        assert_eq!(p_error(0.0, 0.5, 10).unwrap(), 0.0);
    }

    #[test]
    fn domain_checks() {
        assert!(p_error(0.2, 0.0, 10).is_err());
        assert!(p_error(0.2, 1.0, 10).is_err());
        assert!(p_error(0.2, 0.5, 0).is_err());
        assert!(p_error_max(0).is_err());
        assert!(expected_p_error(10, 50).is_err());
    }

    #[test]
    fn equal_probabilities_limit() {
        for m in [1, 5, 10, 30] {
            let at = p_error_at_threshold(m).unwrap();
            assert!((at - 0.25 / (m as f64 + 1.0)).abs() < 1e-15);
            let near = p_error(0.5 - 1e-9, 0.5, m).unwrap();
            assert!((near - at).abs() < 1e-7);
        }
    }

    #[test]
    fn ratio_above_one_is_finite() {
        let p = p_error(0.9, 0.1, 200).unwrap();
        assert!(p.is_finite() && p > 0.0 && p <= 0.9 * 0.9);
        assert_eq!(p_error(1.0, 0.5, 3).unwrap(), 0.5);
    }

    #[test]
    fn bound_values() {
        assert_eq!(p_error_max(10).unwrap(), 0.025);
        assert_eq!(p_error_max(5).unwrap(), 0.05);
        assert!((p_error_max(30).unwrap() - 0.008_333_333_333_333_333).abs() < 1e-18);
    }

    #[test]
    fn monotone_in_pa_and_capacity() {
        for m in [5, 10, 15, 20, 30] {
            let mut prev = -1.0;
            for k in 0..=50 {
                let pa = 0.5 * k as f64 / 50.0;
                let v = p_error(pa, 0.5, m).unwrap();
                assert!(v >= prev);
                prev = v;
                assert!(v <= p_error_max(m).unwrap());
            }
        }
        for pa in [0.2, 0.35, 0.49] {
            let vals: Vec<f64> = [5, 10, 15, 20, 30].iter().map(|&m| p_error(pa, 0.5, m).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn quadrature_converged() {
        for m in [2, 5, 10, 30] {
            let a = expected_p_error(m, DEFAULT_RESOLUTION).unwrap();
            let b = expected_p_error(m, 2 * DEFAULT_RESOLUTION).unwrap();
            assert!((a - b).abs() < 1e-8, "M={m}: {a} vs {b}");
            assert!(a < p_error_max(m).unwrap());
        }
    }

    #[test]
    fn quadrature_matches_midpoint_oracle() {
        // independent midpoint rule with many more points
        let m = 10;
        let k = 400_000;
        let mid: f64 = (0..k)
            .map(|i| p_error(0.5 * (i as f64 + 0.5) / k as f64, 0.5, m).unwrap())
            .sum::<f64>()
            / k as f64;
        let simpson = expected_p_error(m, DEFAULT_RESOLUTION).unwrap();
        assert!(((simpson - mid) / mid).abs() < 1e-6);
    }

    #[test]
    fn single_trial_is_reproducible() {
        let a = empirical_shrink_error(10, 2000, 1, 5).unwrap();
        let b = empirical_shrink_error(10, 2000, 1, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.std_err, 0.0);
    }
}
