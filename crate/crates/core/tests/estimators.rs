mod common;

use rand::Rng;
use scsk::estimators::io::{read_problem, write_estimate, write_problem};
use scsk::estimators::{
    apply_lambda_scaling, build_convolution_problem, row_normalize, shrink_scalar, solve, solve_with_lambda_prime,
    sparse_kaczmarz_fixed, sparse_kaczmarz_stochastic, FloatKaczmarz,
};
use scsk::harness::gen_problem;
use scsk::{Backend, Error, FixedPointFormat, LinearProblem, ScParams, SolverConfig};

use common::*;

fn float_cfg(lambda: f64, iterations: usize) -> SolverConfig {
    SolverConfig::new(lambda, iterations, Backend::Float)
}

#[test]
fn shrink_with_zero_threshold_is_identity() {
    for v in [-1.0, -0.3, 0.0, 0.2, 5.0] {
        assert_eq!(shrink_scalar(v, 0.0).unwrap(), v);
    }
}

#[test]
fn oversized_entries_rejected() {
    assert!(matches!(LinearProblem::new(1, 1, vec![2.0], vec![1.0]), Err(Error::Domain(_))));
}

#[test]
fn zero_rows_rejected() {
    let p = LinearProblem::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]], vec![0.0, 1.0]).unwrap();
    assert!(matches!(row_normalize(&p), Err(Error::Degenerate(_))));
    assert!(matches!(solve(&p, &float_cfg(0.0, 3)), Err(Error::Degenerate(_))));
}

#[test]
fn unit_rows_are_unchanged_by_normalization() {
    let s = 0.5f64.sqrt();
    let p = LinearProblem::from_rows(&[vec![s, s], vec![1.0, 0.0]], vec![0.3, -0.1]).unwrap();
    let q = row_normalize(&p).unwrap();
    assert!(max_abs_diff(q.matrix(), p.matrix()) < 1e-15);
    assert!(max_abs_diff(q.y(), p.y()) < 1e-15);
}

#[test]
fn normalization_preserves_the_iterates() {
    let mut r = rng(1);
    let p = gen_problem(16, 10, 3, Some(30.0), &mut r).unwrap();
    let q = row_normalize(&p).unwrap();
    for i in 0..q.rows() {
        assert!((q.row_norm_sq(i) - 1.0).abs() < 1e-12);
    }
    let mut a = FloatKaczmarz::new(&p, 0.1).unwrap();
    let mut b = FloatKaczmarz::new(&q, 0.1).unwrap();
    for _ in 0..200 {
        a.step();
        b.step();
        assert!(max_abs_diff(a.v(), b.v()) < 1e-12);
    }
}

#[test]
fn lambda_scaling_examples() {
    let mut r = rng(2);
    let p = row_normalize(&gen_problem(16, 10, 2, Some(30.0), &mut r).unwrap()).unwrap();
    let (same, s) = apply_lambda_scaling(&p, 0.5).unwrap();
    assert_eq!(s.factor(), 1.0);
    assert_eq!(same.y(), p.y());

    let via = solve_with_lambda_prime(&p, 0.25, &float_cfg(0.0, 150)).unwrap();
    let direct = solve(&p, &float_cfg(0.25, 150)).unwrap();
    assert!(max_abs_diff(&via.x_hat, &direct.x_hat) < 1e-12);

    let big = LinearProblem::from_rows(&[vec![1.0]], vec![0.6]).unwrap();
    match apply_lambda_scaling(&big, 0.25) {
        Err(Error::Range { index, value }) => {
            assert_eq!(index, 0);
            assert!((value - 1.2).abs() < 1e-12);
        }
        other => panic!("expected a range error, got {other:?}"),
    }
}

#[test]
fn one_by_one_hand_computation() {
    let p = LinearProblem::new(1, 1, vec![1.0], vec![0.5]).unwrap();
    assert_eq!(solve(&p, &float_cfg(0.0, 1)).unwrap().x_hat, vec![0.5]);
    let fmt = FixedPointFormat::new(24).unwrap();
    let fixed = sparse_kaczmarz_fixed(&p, &float_cfg(0.0, 1), fmt).unwrap();
    assert!((fixed.x_hat[0] - 0.5).abs() <= 2f64.powi(-20));
}

#[test]
fn square_system_converges_to_direct_solution() {
    let rows = vec![
        vec![0.9, 0.1, 0.0, 0.2],
        vec![0.1, 0.8, 0.3, 0.0],
        vec![0.0, 0.2, 0.7, 0.1],
        vec![0.3, 0.0, 0.1, 0.9],
    ];
    let x = [0.4, -0.2, 0.1, 0.3];
    let y: Vec<f64> = rows.iter().map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
    let p = LinearProblem::from_rows(&rows, y).unwrap();
    let out = solve(&p, &float_cfg(0.0, 400)).unwrap();
    assert!(max_abs_diff(&out.x_hat, &x) < 1e-9);
    assert!(p.residual_norm(&out.x_hat) < 1e-9);
}

/// Brute-force support search: the unique pair of columns that explains `y`.
fn oracle_support(p: &LinearProblem) -> Vec<usize> {
    let col = |j: usize| (0..p.rows()).map(move |i| p.row(i)[j]);
    let mut hits = Vec::new();
    for j in 0..p.cols() {
        for k in j + 1..p.cols() {
            let (sjj, skk) = (col(j).map(|a| a * a).sum::<f64>(), col(k).map(|a| a * a).sum::<f64>());
            let sjk: f64 = col(j).zip(col(k)).map(|(a, b)| a * b).sum();
            let bj: f64 = col(j).zip(p.y()).map(|(a, y)| a * y).sum();
            let bk: f64 = col(k).zip(p.y()).map(|(a, y)| a * y).sum();
            let det = sjj * skk - sjk * sjk;
            let (xj, xk) = ((bj * skk - bk * sjk) / det, (bk * sjj - bj * sjk) / det);
            let fit: Vec<f64> = col(j).zip(col(k)).map(|(a, b)| a * xj + b * xk).collect();
            if max_abs_diff(&fit, p.y()) < 1e-9 {
                hits.push(vec![j, k]);
            }
        }
    }
    assert_eq!(hits.len(), 1, "support is not unique");
    hits.pop().unwrap()
}

fn largest(v: &[f64], z: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|a, b| v[*b].abs().total_cmp(&v[*a].abs()));
    idx.truncate(z);
    idx.sort();
    idx
}

#[test]
fn noiseless_sparse_support_is_recovered() {
    let mut r = rng(3);
    let mut checked = 0;
    while checked < 20 {
        let p = gen_problem(16, 10, 2, None, &mut r).unwrap();
        // coefficients near zero are not identifiable at a finite threshold
        if p.x_true().unwrap().iter().any(|v| *v != 0.0 && v.abs() < 0.1) {
            continue;
        }
        checked += 1;
        let support = oracle_support(&p);
        let tuned = [0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .filter_map(|&lp| solve_with_lambda_prime(&p, lp, &float_cfg(0.0, 2000)).ok())
            .min_by(|a, b| p.residual_norm(&a.x_hat).total_cmp(&p.residual_norm(&b.x_hat)))
            .unwrap();
        assert_eq!(largest(&tuned.x_hat, 2), support, "{:?} vs {:?}", tuned.x_hat, p.x_true());
    }
}

#[test]
fn cyclic_row_schedule() {
    let mut r = rng(4);
    let p = gen_problem(5, 3, 1, None, &mut r).unwrap();
    let mut sk = FloatKaczmarz::new(&p, 0.2).unwrap();
    let rows: Vec<usize> = (0..7).map(|_| sk.step().0).collect();
    assert_eq!(rows, [0, 1, 2, 0, 1, 2, 0]);
    assert_eq!(sk.iteration(), 7);
}

#[test]
fn sparsity_is_monotone_in_the_threshold() {
    let mut r = rng(5);
    for _ in 0..5 {
        let p = gen_problem(16, 10, 3, Some(30.0), &mut r).unwrap();
        let mut last = usize::MAX;
        for k in 1..=40 {
            let lp = k as f64 / 20.0;
            let Ok(out) = solve_with_lambda_prime(&p, lp, &float_cfg(0.0, 100)) else {
                continue;
            };
            let nnz = out.x_hat.iter().filter(|v| **v != 0.0).count();
            assert!(nnz <= last, "nnz rose to {nnz} at lambda' = {lp}");
            last = nnz;
        }
    }
}

#[test]
fn fixed_point_zero_measurements() {
    let mut r = rng(6);
    let mut p = gen_problem(16, 10, 0, None, &mut r).unwrap();
    p = LinearProblem::new(p.rows(), p.cols(), p.matrix().to_vec(), vec![0.0; p.rows()]).unwrap();
    for w in [2, 8, 12, 32] {
        let out = sparse_kaczmarz_fixed(&p, &float_cfg(0.5, 30), FixedPointFormat::new(w).unwrap()).unwrap();
        assert!(out.x_hat.iter().all(|&v| v == 0.0));
    }
    assert!(FixedPointFormat::new(1).is_err());
    assert!(FixedPointFormat::new(33).is_err());
}

fn sc_cfg(lambda: f64, iterations: usize, len: usize, seed: u64) -> SolverConfig {
    SolverConfig {
        sc: ScParams {
            len,
            ..ScParams::default()
        },
        seed,
        ..SolverConfig::new(lambda, iterations, Backend::Stochastic)
    }
}

#[test]
fn stochastic_identity_system() {
    let p = LinearProblem::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.5, -0.25]).unwrap();
    let out = sparse_kaczmarz_stochastic(&p, &sc_cfg(0.0, 20, (1 << 16) - 2, 7)).unwrap();
    assert!(max_abs_diff(&out.x_hat, &[0.5, -0.25]) <= 0.02, "{:?}", out.x_hat);
    assert_eq!(out.residuals.len(), 20);
}

#[test]
fn stochastic_zero_measurements() {
    let p = LinearProblem::from_rows(&[vec![0.3, -0.7], vec![0.9, 0.1]], vec![0.0, 0.0]).unwrap();
    let out = sparse_kaczmarz_stochastic(&p, &sc_cfg(0.5, 12, 2048, 1)).unwrap();
    assert!(out.x_hat.iter().all(|&v| v == 0.0));
}

#[test]
fn stochastic_is_deterministic() {
    let mut r = rng(8);
    let p = gen_problem(16, 10, 2, Some(30.0), &mut r).unwrap();
    let cfg = sc_cfg(0.0, 10, 4096, 3);
    let a = solve_with_lambda_prime(&p, 0.85, &cfg).unwrap();
    let b = solve_with_lambda_prime(&p, 0.85, &cfg).unwrap();
    assert_eq!(a, b);
    let c = solve_with_lambda_prime(&p, 0.85, &SolverConfig { seed: 4, ..cfg }).unwrap();
    assert_ne!(a.residuals, c.residuals);
}

#[test]
fn convolution_mode_is_nlms() {
    let mut r = rng(9);
    let taps = 4;
    let h: Vec<f64> = (0..taps).map(|_| r.random_range(-1.0..1.0)).collect();
    let u: Vec<f64> = (0..25).map(|_| r.random_range(-1.0..1.0)).collect();
    let d: Vec<f64> = (0..u.len())
        .map(|i| (0..taps).filter(|&k| i >= k).map(|k| h[k] * u[i - k]).sum())
        .collect();
    let p = build_convolution_problem(&h, &u, &d).unwrap();
    assert_eq!(p.rows(), u.len());
    assert_eq!(p.row(1), &[u[1], u[0], 0.0, 0.0]);
    let oracle = nlms_iterates(taps, &u, &d);
    let mut sk = FloatKaczmarz::new(&p, 0.0).unwrap();
    for w in &oracle {
        sk.step();
        assert!(max_abs_diff(&sk.x(), w) < 1e-12);
    }
    assert!(build_convolution_problem(&h, &[], &[]).is_err());
}

#[test]
fn single_tap_converges_in_one_pass() {
    let u = [0.6, -0.3, 0.9];
    let d: Vec<f64> = u.iter().map(|v| 0.7 * v).collect();
    let p = build_convolution_problem(&[0.0], &u, &d).unwrap();
    let out = solve(&p, &float_cfg(0.0, u.len())).unwrap();
    assert!((out.x_hat[0] - 0.7).abs() < 1e-15);
}

#[test]
fn sparse_lms_keeps_small_taps_at_zero() {
    let mut r = rng(10);
    let h = [0.8, 0.0, 0.0, -0.5, 0.0];
    let u: Vec<f64> = (0..60).map(|_| r.random_range(-1.0..1.0)).collect();
    let d: Vec<f64> = (0..u.len())
        .map(|i| (0..h.len()).filter(|&k| i >= k).map(|k| h[k] * u[i - k]).sum())
        .collect();
    let p = build_convolution_problem(&h, &u, &d).unwrap();
    let lambda = 0.3;
    let mut sk = FloatKaczmarz::new(&p, lambda).unwrap();
    let mut peak = vec![0.0f64; h.len()];
    for _ in 0..u.len() {
        sk.step();
        for (pk, v) in peak.iter_mut().zip(sk.v()) {
            *pk = pk.max(v.abs());
        }
    }
    let x = sk.x();
    for j in 0..h.len() {
        if peak[j] <= lambda {
            assert_eq!(x[j], 0.0);
        }
    }
}

#[test]
fn problem_files_round_trip() {
    let mut r = rng(11);
    let p = gen_problem(6, 4, 2, Some(20.0), &mut r).unwrap();
    let mut buf = Vec::new();
    write_problem(&mut buf, &p).unwrap();
    let back = read_problem(buf.as_slice()).unwrap();
    assert_eq!(back.matrix(), p.matrix());
    assert_eq!(back.y(), p.y());
    assert_eq!(back.x_true(), p.x_true());

    assert!(read_problem("2 2\n0.1 0.2\n0.3\n".as_bytes()).is_err());
    assert!(read_problem("".as_bytes()).is_err());

    let mut est = Vec::new();
    write_estimate(&mut est, &[0.5, -0.25]).unwrap();
    assert_eq!(String::from_utf8(est).unwrap(), "# j x_hat_j\n0 5e-1\n1 -2.5e-1\n");
}
