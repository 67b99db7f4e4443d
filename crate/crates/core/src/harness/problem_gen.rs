use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_len, Error, Result};
use crate::estimators::LinearProblem;

/// Random compressive-sensing instance.
///
/// `x` has `z` nonzeros at uniform positions with values uniform on
/// `[-1, 1]`, `A` is uniform on `[-1, 1]^{m x n}` and `w` is white Gaussian
/// noise whose variance is `mean((Ax)^2) / 10^(snr_db / 10)`. `None` means
/// noiseless.
pub fn gen_problem<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    z: usize,
    snr_db: Option<f64>,
    rng: &mut R,
) -> Result<LinearProblem> {
    if z > n {
        return Err(Error::Domain(format!("sparsity {z} exceeds dimension {n}")));
    }
    if m == 0 || n == 0 {
        return Err(Error::Domain("problem dimensions must be positive".into()));
    }
    let a: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut x = vec![0.0; n];
    for idx in sample(rng, n, z) {
        x[idx] = rng.random_range(-1.0..=1.0);
    }
    let signal: Vec<f64> = (0..m)
        .map(|i| a[i * n..(i + 1) * n].iter().zip(&x).map(|(a, x)| a * x).sum())
        .collect();
    let noise_std = match snr_db {
        None => 0.0,
        Some(db) => {
            let power = signal.iter().map(|s| s * s).sum::<f64>() / m as f64;
            (power / 10f64.powf(db / 10.0)).sqrt()
        }
    };
    let y = signal
        .iter()
        .map(|s| {
            let w: f64 = StandardNormal.sample(rng);
            s + noise_std * w
        })
        .collect();
    let mut p = LinearProblem::new(m, n, a, y)?.with_truth(x)?;
    p.snr_db = snr_db;
    p.sparsity = Some(z);
    Ok(p)
}

/// `sqrt(mean_t |x_hat_t - x_t|^2)`.
pub fn rmse(estimates: &[(&[f64], &[f64])]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::Domain("rmse of an empty set".into()));
    }
    let mut total = 0.0;
    for (x_hat, x) in estimates {
        check_len(x.len(), x_hat.len())?;
        total += squared_error(x_hat, x);
    }
    Ok((total / estimates.len() as f64).sqrt())
}

pub fn squared_error(x_hat: &[f64], x: &[f64]) -> f64 {
    x_hat.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum()
}
