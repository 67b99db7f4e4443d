use super::problem::{dot, LinearProblem};
use super::{shrink_unchecked, Diagnostics, EstimatorOutput, SolverConfig};
use crate::error::Result;

/// Double-precision Sparse Kaczmarz, advanced one iteration at a time.
#[derive(Clone, Debug)]
pub struct FloatKaczmarz<'a> {
    problem: &'a LinearProblem,
    lambda: f64,
    v: Vec<f64>,
    x: Vec<f64>,
    k: usize,
}

impl<'a> FloatKaczmarz<'a> {
    pub fn new(problem: &'a LinearProblem, lambda: f64) -> Result<Self> {
        problem.check_rows_nonzero()?;
        let n = problem.cols();
        Ok(Self {
            problem,
            lambda,
            v: vec![0.0; n],
            x: vec![0.0; n],
            k: 0,
        })
    }

    /// Iterations performed so far.
    pub fn iteration(&self) -> usize {
        self.k
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// `shrink(v, lambda)` for the current `v`.
    pub fn x(&self) -> Vec<f64> {
        self.v.iter().map(|&v| shrink_unchecked(v, self.lambda)).collect()
    }

    /// Runs one iteration; returns the zero-based row index used and the
    /// residual `y_i - a_i^T x`.
    pub fn step(&mut self) -> (usize, f64) {
        for (x, &v) in self.x.iter_mut().zip(&self.v) {
            *x = shrink_unchecked(v, self.lambda);
        }
        let i = self.k % self.problem.rows();
        let row = self.problem.row(i);
        let r = self.problem.y()[i] - dot(row, &self.x);
        let gain = r / self.problem.row_norm_sq(i);
        for (v, a) in self.v.iter_mut().zip(row) {
            *v += gain * a;
        }
        self.k += 1;
        (i, r)
    }
}

pub fn sparse_kaczmarz_float(p: &LinearProblem, cfg: &SolverConfig) -> Result<EstimatorOutput> {
    cfg.validate()?;
    let mut sk = FloatKaczmarz::new(p, cfg.lambda)?;
    let residuals = (0..cfg.iterations).map(|_| sk.step().1).collect();
    Ok(EstimatorOutput {
        x_hat: sk.x(),
        residuals,
        diagnostics: Diagnostics::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Backend;

    #[test]
    fn one_by_one_hand_computation() {
        let p = LinearProblem::new(1, 1, vec![1.0], vec![0.5]).unwrap();
        let out = sparse_kaczmarz_float(&p, &SolverConfig::new(0.0, 1, Backend::Float)).unwrap();
        assert_eq!(out.x_hat, vec![0.5]);
        assert_eq!(out.residuals, vec![0.5]);
    }

    #[test]
    fn rows_are_used_cyclically() {
        let p = LinearProblem::from_rows(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]],
            vec![0.1, 0.2, 0.3],
        )
        .unwrap();
        let mut sk = FloatKaczmarz::new(&p, 0.1).unwrap();
        let rows: Vec<usize> = (0..7).map(|_| sk.step().0).collect();
        assert_eq!(rows, vec![0, 1, 2, 0, 1, 2, 0]);
    }

    #[test]
    fn zero_row_is_degenerate() {
        let p = LinearProblem::from_rows(&[vec![0.0, 0.0]], vec![0.0]).unwrap();
        assert!(FloatKaczmarz::new(&p, 0.0).is_err());
    }
}
