//! Sparse Kaczmarz on the stochastic computing datapath.
//!
//! One iteration on row `i`:
//!
//! 1. regenerate canonical two-line streams for the stored `v`;
//! 2. shrink each of them against one shared `lambda` stream (bypassed
//!    when `lambda == 0`), which includes cancellation;
//! 3. scalar product of the shrink outputs with the streams of `a_i`;
//! 4. subtract the product from the `y_i` stream (line swap plus adder);
//! 5. multiply the residual with the `a_i` streams delayed by `delay`
//!    cycles, which decorrelates the second use of those streams;
//! 6. add each product to the corresponding `v` stream;
//! 7. decode the sums back to storage.
//!
//! Storage between iterations is an exact count decode followed by a fresh
//! re-encode, so the only approximation is the bitstream arithmetic.

use super::problem::{row_normalize, LinearProblem};
use super::{Diagnostics, EstimatorOutput, SolverConfig};
use crate::bitstream::{BitStream, StreamFactory, TlbStream};
use crate::circuits::{nonscaled_add, scalar_product, shrink_stream, tlb_multiply, CarryAdderState};
use crate::error::Result;

struct Datapath<'a> {
    cfg: &'a SolverConfig,
    streams: StreamFactory,
    diag: Diagnostics,
}

impl Datapath<'_> {
    fn adder(&self) -> CarryAdderState {
        CarryAdderState::new(self.cfg.sc.carry_depth).expect("validated carry depth")
    }

    fn absorb(&mut self, st: &CarryAdderState) {
        self.diag.carry_overflow += st.stats().overflow();
    }

    fn encode_all(&mut self, values: &[f64]) -> Result<Vec<TlbStream>> {
        let len = self.cfg.sc.len;
        values.iter().map(|&v| self.streams.tlb(v, len)).collect()
    }

    /// Shrink-and-cancel stage; identity when the threshold is zero.
    fn shrink_all(&mut self, v: &[TlbStream]) -> Result<Vec<TlbStream>> {
        if self.cfg.lambda == 0.0 {
            return Ok(v.to_vec());
        }
        let lambda: BitStream = self.streams.unipolar(self.cfg.lambda, self.cfg.sc.len)?;
        v.iter()
            .map(|s| shrink_stream(s, &lambda, self.cfg.sc.max_capacity))
            .collect()
    }

    fn iterate(&mut self, p: &LinearProblem, i: usize, v: &mut [f64]) -> Result<f64> {
        let len = self.cfg.sc.len;
        let v_streams = self.encode_all(v)?;
        let x_streams = self.shrink_all(&v_streams)?;
        let a_streams = self.encode_all(p.row(i))?;

        let mut st = self.adder();
        let prod = scalar_product(&x_streams, &a_streams, &mut st)?;
        self.absorb(&st);

        let y_stream = self.streams.tlb(p.y()[i], len)?;
        let mut st = self.adder();
        let residual = nonscaled_add(&[&y_stream, &prod.negated()], &mut st)?;
        self.absorb(&st);

        for (j, (vs, aj)) in v_streams.iter().zip(&a_streams).enumerate() {
            let delayed = aj.delayed(self.cfg.sc.delay);
            let mut st = self.adder();
            let update = tlb_multiply(&residual, &delayed, &mut st)?;
            self.absorb(&st);

            let mut st = self.adder();
            let sum = nonscaled_add(&[vs, &update], &mut st)?;
            self.absorb(&st);

            let value = sum.decode();
            if value.abs() >= 1.0 {
                self.diag.range_exits += 1;
            }
            v[j] = value.clamp(-1.0, 1.0);
        }
        Ok(residual.decode())
    }
}

pub fn sparse_kaczmarz_stochastic(p: &LinearProblem, cfg: &SolverConfig) -> Result<EstimatorOutput> {
    cfg.validate()?;
    let p = row_normalize(p)?;
    for (index, &value) in p.y().iter().enumerate() {
        if value.abs() > 1.0 {
            return Err(crate::error::Error::Range { index, value });
        }
    }
    let mut dp = Datapath {
        cfg,
        streams: StreamFactory::new(&cfg.sc.sng, cfg.seed)?,
        diag: Diagnostics::default(),
    };
    // fail early on bad circuit parameters
    CarryAdderState::new(cfg.sc.carry_depth)?;
    crate::circuits::MaxCircuitState::new(cfg.sc.max_capacity)?;

    let mut v = vec![0.0; p.cols()];
    let mut residuals = Vec::with_capacity(cfg.iterations);
    for k in 0..cfg.iterations {
        let i = k % p.rows();
        residuals.push(dp.iterate(&p, i, &mut v)?);
    }

    let v_streams = dp.encode_all(&v)?;
    let x_hat = dp
        .shrink_all(&v_streams)?
        .iter()
        .map(TlbStream::decode)
        .collect();
    Ok(EstimatorOutput {
        x_hat,
        residuals,
        diagnostics: dp.diag,
    })
}
