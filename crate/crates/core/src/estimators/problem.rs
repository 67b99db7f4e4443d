use crate::error::{check_len, Error, Result};

/// Measurement model `y = A x + w` with `A` stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProblem {
    m: usize,
    n: usize,
    a: Vec<f64>,
    y: Vec<f64>,
    x_true: Option<Vec<f64>>,
    pub snr_db: Option<f64>,
    pub sparsity: Option<usize>,
}

impl LinearProblem {
    /// `a` is row-major `m x n`; every entry must lie in `[-1, 1]`.
    pub fn new(m: usize, n: usize, a: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Degenerate(format!("empty {m}x{n} system")));
        }
        check_len(m * n, a.len())?;
        check_len(m, y.len())?;
        if let Some((idx, v)) = a.iter().enumerate().find(|(_, v)| !(v.abs() <= 1.0)) {
            return Err(Error::Domain(format!(
                "matrix entry ({}, {}) = {v} outside [-1, 1]",
                idx / n,
                idx % n
            )));
        }
        if let Some(v) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite measurement {v}")));
        }
        Ok(Self {
            m,
            n,
            a,
            y,
            x_true: None,
            snr_db: None,
            sparsity: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut a = Vec::with_capacity(m * n);
        for r in rows {
            check_len(n, r.len())?;
            a.extend_from_slice(r);
        }
        Self::new(m, n, a, y)
    }

    pub fn with_truth(mut self, x: Vec<f64>) -> Result<Self> {
        check_len(self.n, x.len())?;
        self.x_true = Some(x);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_true(&self) -> Option<&[f64]> {
        self.x_true.as_deref()
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.row(i).iter().map(|v| v * v).sum()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn residual_norm(&self, x: &[f64]) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.y)
            .map(|(ax, y)| (y - ax).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn check_rows_nonzero(&self) -> Result<()> {
        match (0..self.m).find(|&i| self.row_norm_sq(i) == 0.0) {
            Some(i) => Err(Error::Degenerate(format!("row {i} is all-zero"))),
            None => Ok(()),
        }
    }

    fn with_y(&self, y: Vec<f64>) -> Self {
        Self { y, ..self.clone() }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Replaces every `(a_i, y_i)` by `(a_i / |a_i|, y_i / |a_i|)`, which turns
/// the Kaczmarz update coefficient `1 / |a_i|^2` into 1 without changing the
/// iterates.
pub fn row_normalize(p: &LinearProblem) -> Result<LinearProblem> {
    p.check_rows_nonzero()?;
    let mut a = p.a.clone();
    let mut y = p.y.clone();
    for i in 0..p.m {
        let norm = p.row_norm_sq(i).sqrt();
        for v in &mut a[i * p.n..(i + 1) * p.n] {
            *v /= norm;
        }
        y[i] /= norm;
    }
    Ok(LinearProblem {
        a,
        y,
        ..p.clone()
    })
}

/// Measurement scale that maps a solve at `lambda_prime` onto a solve at the
/// fixed internal threshold of 0.5.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaScaling {
    factor: f64,
}

pub const INTERNAL_LAMBDA: f64 = 0.5;

impl LambdaScaling {
    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn unscale(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| v / self.factor).collect()
    }
}

/// Scales `y` by `0.5 / lambda_prime`. Fails with the first index whose
/// scaled measurement is not inside `(-1, 1)`.
pub fn apply_lambda_scaling(
    p: &LinearProblem,
    lambda_prime: f64,
) -> Result<(LinearProblem, LambdaScaling)> {
    if !(lambda_prime > 0.0) || !lambda_prime.is_finite() {
        return Err(Error::Domain(format!(
            "lambda' must be positive and finite, got {lambda_prime}"
        )));
    }
    let factor = INTERNAL_LAMBDA / lambda_prime;
    let y: Vec<f64> = p.y.iter().map(|v| v * factor).collect();
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, v)| v.abs() >= 1.0) {
        return Err(Error::Range { index, value });
    }
    Ok((p.with_y(y), LambdaScaling { factor }))
}

/// Adaptive-filter problem: row `i` is the regressor
/// `(u[i], u[i-1], ..., u[i-n+1])` (zeros before the signal starts) and the
/// measurement is the desired sample `d[i]`. `h` gives the tap count and is
/// stored as the ground truth.
pub fn build_convolution_problem(h: &[f64], u: &[f64], d: &[f64]) -> Result<LinearProblem> {
    if h.is_empty() || u.is_empty() {
        return Err(Error::Degenerate("empty filter or input signal".into()));
    }
    check_len(u.len(), d.len())?;
    let n = h.len();
    let m = u.len();
    let mut a = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n.min(i + 1) {
            a[i * n + j] = u[i - j];
        }
    }
    LinearProblem::new(m, n, a, d.to_vec())?.with_truth(h.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_entries() {
        assert!(matches!(
            LinearProblem::new(1, 1, vec![2.0], vec![1.0]),
            Err(Error::Domain(_))
        ));
        assert!(LinearProblem::new(1, 2, vec![0.1], vec![1.0]).is_err());
    }

    #[test]
    fn unit_rows_unchanged() {
        let p = LinearProblem::from_rows(&[vec![1.0, 0.0], vec![0.6, -0.8]], vec![0.3, 0.1]).unwrap();
        let q = row_normalize(&p).unwrap();
        for (a, b) in p.matrix().iter().zip(q.matrix()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(p.y(), q.y());
    }

    #[test]
    fn normalize_rejects_zero_row() {
        let p = LinearProblem::from_rows(&[vec![0.0, 0.0]], vec![0.0]).unwrap();
        assert!(matches!(row_normalize(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn scaling_identity_and_range() {
        let p = LinearProblem::from_rows(&[vec![0.5], vec![1.0]], vec![0.4, -0.3]).unwrap();
        let (q, s) = apply_lambda_scaling(&p, 0.5).unwrap();
        assert_eq!(s.factor(), 1.0);
        assert_eq!(q.y(), p.y());
        match apply_lambda_scaling(&p, 0.1) {
            Err(Error::Range { index, .. }) => assert_eq!(index, 0),
            other => panic!("expected range error, got {other:?}"),
        }
        assert!(apply_lambda_scaling(&p, 0.0).is_err());
    }

    #[test]
    fn convolution_rows_are_shifted_windows() {
        let p = build_convolution_problem(&[0.0; 3], &[0.1, 0.2, 0.3, 0.4], &[0.0; 4]).unwrap();
        assert_eq!(p.row(0), &[0.1, 0.0, 0.0]);
        assert_eq!(p.row(2), &[0.3, 0.2, 0.1]);
        assert_eq!(p.row(3), &[0.4, 0.3, 0.2]);
        assert!(build_convolution_problem(&[], &[0.1], &[0.1]).is_err());
        assert!(build_convolution_problem(&[0.1], &[0.1], &[]).is_err());
    }
}
