//! Bit-true fractional fixed point in `[-1, 1)`.
//!
//! Every stored value and every arithmetic result is truncated toward
//! negative infinity and saturated to `[-1, 1 - 2^-(W-1)]`.

use super::problem::{row_normalize, LinearProblem};
use super::{Diagnostics, EstimatorOutput, SolverConfig};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FixedPointFormat {
    width: u32,
}

impl FixedPointFormat {
    pub fn new(width: u32) -> Result<Self> {
        if !(2..=32).contains(&width) {
            return Err(Error::Config(format!("fixed-point width {width} outside [2, 32]")));
        }
        Ok(Self { width })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn frac_bits(&self) -> u32 {
        self.width - 1
    }

    /// Quantization step `2^-(W-1)`.
    pub fn step(&self) -> f64 {
        (-(self.frac_bits() as f64)).exp2()
    }

    pub fn min_raw(&self) -> i64 {
        -(1i64 << self.frac_bits())
    }

    pub fn max_raw(&self) -> i64 {
        (1i64 << self.frac_bits()) - 1
    }

    fn saturate(&self, raw: i64, sat: &mut u64) -> i64 {
        if raw > self.max_raw() {
            *sat += 1;
            self.max_raw()
        } else if raw < self.min_raw() {
            *sat += 1;
            self.min_raw()
        } else {
            raw
        }
    }

    /// Floor quantization with saturation.
    pub fn quantize(&self, v: f64, sat: &mut u64) -> i64 {
        let scaled = (v * (1i64 << self.frac_bits()) as f64).floor();
        if scaled > self.max_raw() as f64 {
            *sat += 1;
            self.max_raw()
        } else if scaled < self.min_raw() as f64 {
            *sat += 1;
            self.min_raw()
        } else {
            scaled as i64
        }
    }

    pub fn to_f64(&self, raw: i64) -> f64 {
        raw as f64 * self.step()
    }

    pub fn add(&self, a: i64, b: i64, sat: &mut u64) -> i64 {
        self.saturate(a + b, sat)
    }

    pub fn sub(&self, a: i64, b: i64, sat: &mut u64) -> i64 {
        self.saturate(a - b, sat)
    }

    /// Product truncated to `W - 1` fraction bits (arithmetic shift floors).
    pub fn mul(&self, a: i64, b: i64, sat: &mut u64) -> i64 {
        self.saturate((a * b) >> self.frac_bits(), sat)
    }

    pub fn shrink(&self, v: i64, lambda: i64) -> i64 {
        if v > lambda {
            v - lambda
        } else if v < -lambda {
            v + lambda
        } else {
            0
        }
    }
}

pub fn sparse_kaczmarz_fixed(
    p: &LinearProblem,
    cfg: &SolverConfig,
    fmt: FixedPointFormat,
) -> Result<EstimatorOutput> {
    cfg.validate()?;
    let p = row_normalize(p)?;
    let (m, n) = (p.rows(), p.cols());
    let mut sat = 0u64;
    let a: Vec<i64> = p.matrix().iter().map(|&v| fmt.quantize(v, &mut sat)).collect();
    let y: Vec<i64> = p.y().iter().map(|&v| fmt.quantize(v, &mut sat)).collect();
    let lambda = fmt.quantize(cfg.lambda, &mut sat);

    let mut v = vec![0i64; n];
    let mut x = vec![0i64; n];
    let mut residuals = Vec::with_capacity(cfg.iterations);
    for k in 0..cfg.iterations {
        for (xj, &vj) in x.iter_mut().zip(&v) {
            *xj = fmt.shrink(vj, lambda);
        }
        let i = k % m;
        let row = &a[i * n..(i + 1) * n];
        let mut acc = 0i64;
        for (&aij, &xj) in row.iter().zip(&x) {
            let prod = fmt.mul(aij, xj, &mut sat);
            acc = fmt.add(acc, prod, &mut sat);
        }
        let e = fmt.sub(y[i], acc, &mut sat);
        residuals.push(fmt.to_f64(e));
        for (vj, &aij) in v.iter_mut().zip(row) {
            let upd = fmt.mul(aij, e, &mut sat);
            *vj = fmt.add(*vj, upd, &mut sat);
        }
    }
    let x_hat = v
        .iter()
        .map(|&vj| fmt.to_f64(fmt.shrink(vj, lambda)))
        .collect();
    Ok(EstimatorOutput {
        x_hat,
        residuals,
        diagnostics: Diagnostics {
            saturations: sat,
            ..Diagnostics::default()
        },
    })
}
