mod common;

use scsk::analysis::{p_error, p_error_max};
use scsk::harness::{
    calibrate_lambda_prime, gen_problem, lambda_prime_grid, rmse, run_rmse_sweep, run_shrink_error_sweep,
    ExperimentConfig, ShrinkSweepConfig, Table,
};
use scsk::harness::config::DEFAULT_LAMBDA_PRIME;

use common::*;

fn quick(z: Vec<usize>, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        z_values: z,
        trials,
        stochastic: false,
        ..Default::default()
    }
}

#[test]
fn generated_noise_matches_the_requested_snr() {
    let mut r = rng(1);
    let (mut signal, mut noise) = (0.0, 0.0);
    for _ in 0..1000 {
        let p = gen_problem(16, 10, 3, Some(20.0), &mut r).unwrap();
        let clean = p.apply(p.x_true().unwrap());
        signal += clean.iter().map(|s| s * s).sum::<f64>();
        noise += clean.iter().zip(p.y()).map(|(s, y)| (y - s).powi(2)).sum::<f64>();
    }
    let snr = 10.0 * (signal / noise).log10();
    assert!((snr - 20.0).abs() <= 0.5, "{snr}");
}

#[test]
fn generated_problem_shape() {
    let mut r = rng(2);
    let p = gen_problem(16, 10, 4, None, &mut r).unwrap();
    assert_eq!((p.rows(), p.cols()), (10, 16));
    assert!(p.matrix().iter().all(|a| a.abs() <= 1.0));
    let x = p.x_true().unwrap();
    assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 4);
    assert!(max_abs_diff(&p.apply(x), p.y()) < 1e-15);

    let zero = gen_problem(16, 10, 0, Some(30.0), &mut r).unwrap();
    assert!(zero.x_true().unwrap().iter().all(|v| *v == 0.0));
    assert!(zero.y().iter().all(|v| *v == 0.0));
    assert!(gen_problem(4, 3, 5, None, &mut r).is_err());
}

fn refs(v: &[(Vec<f64>, Vec<f64>)]) -> Vec<(&[f64], &[f64])> {
    v.iter().map(|(x, y)| (x.as_slice(), y.as_slice())).collect()
}

#[test]
fn rmse_of_a_union() {
    let a: Vec<(Vec<f64>, Vec<f64>)> = vec![(vec![0.1, 0.0], vec![0.0, 0.0]), (vec![0.5, -0.2], vec![0.4, 0.0])];
    let b: Vec<(Vec<f64>, Vec<f64>)> = vec![(vec![1.0, 1.0], vec![0.0, 0.5])];
    let (ra, rb) = (rmse(&refs(&a)).unwrap(), rmse(&refs(&b)).unwrap());
    let all: Vec<_> = a.iter().chain(&b).cloned().collect();
    let ru = rmse(&refs(&all)).unwrap();
    assert!((ru - ((2.0 * ra * ra + rb * rb) / 3.0).sqrt()).abs() < 1e-15);
    assert!(rmse(&[]).is_err());
    assert_eq!(rmse(&[(&[0.5][..], &[0.5][..])]).unwrap(), 0.0);
}

#[test]
fn single_trial_gives_one_row_per_sparsity() {
    let report = run_rmse_sweep(&quick(vec![2], 1)).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].used + report.rows[0].excluded, 1);
    assert!(report.rows[0].stochastic.is_none());
}

#[test]
fn fixed_point_improves_with_width() {
    let cfg = quick(vec![1, 2, 3], 50);
    let report = run_rmse_sweep(&cfg).unwrap();
    for row in &report.rows {
        let first = row.fixed.first().unwrap();
        let last = row.fixed.last().unwrap();
        assert_eq!((first.0, last.0), (8, 12));
        assert!(first.1 >= last.1, "z={} {:?}", row.z, row.fixed);
    }
}

#[test]
fn sweeps_are_reproducible() {
    let cfg = quick(vec![1, 3], 20);
    let write = |cfg: &ExperimentConfig| {
        let mut buf = Vec::new();
        run_rmse_sweep(cfg).unwrap().table(cfg).write(&mut buf).unwrap();
        buf
    };
    let a = write(&cfg);
    assert_eq!(a, write(&cfg));
    assert_ne!(a, write(&ExperimentConfig { seed: 9, ..cfg }));
}

#[test]
fn sweep_table_layout() {
    let mut cfg = quick(vec![2], 3);
    let t = run_rmse_sweep(&cfg).unwrap().table(&cfg);
    assert_eq!(t.columns, ["z", "float", "fixed8", "fixed9", "fixed10", "fixed11", "fixed12"]);
    cfg.stochastic = true;
    cfg.widths = vec![10];
    cfg.len = 1024;
    cfg.trials = 1;
    let t = run_rmse_sweep(&cfg).unwrap().table(&cfg);
    assert_eq!(t.columns, ["z", "float", "sc", "fixed10"]);
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(run_rmse_sweep(&quick(vec![17], 1)).is_err());
    assert!(run_rmse_sweep(&quick(vec![2], 0)).is_err());
    let mut cfg = ExperimentConfig::default();
    assert!(cfg.apply_kv("lambda-prime = 0.3 # comment\nN=40\n").is_ok());
    assert_eq!((cfg.lambda_prime, cfg.iterations()), (0.3, 40));
    assert!(cfg.apply_kv("bogus=1").is_err());
    assert!(cfg.apply_kv("trials").is_err());
}

#[test]
fn iteration_count_defaults_to_rows() {
    let cfg = ExperimentConfig::default();
    assert_eq!(cfg.iterations(), 10 * cfg.m);
}

#[test]
fn shrink_tables_match_the_closed_form() {
    let cfg = ShrinkSweepConfig::default();
    let t = run_shrink_error_sweep(&cfg).unwrap();
    assert_eq!(t.over_pa.rows.len(), cfg.pa_points);
    let pa = t.over_pa.column("P_A").unwrap();
    assert_eq!((pa[0], *pa.last().unwrap()), (0.2, 0.5));
    let k = pa.iter().position(|v| (v - 0.4).abs() < 1e-12).unwrap();
    assert_eq!(t.over_pa.column("M=10").unwrap()[k], p_error(0.4, 0.5, 10).unwrap());
    for &m in &cfg.capacities {
        let col = t.over_pa.column(&format!("M={m}")).unwrap();
        let bound = p_error_max(m).unwrap();
        assert!(col.iter().all(|&v| (0.0..=bound).contains(&v)));
        assert!(col.windows(2).all(|w| w[0] <= w[1]));
    }
    assert_eq!(t.summary.columns, ["M", "expected", "max"]);
    let (e, mx) = (t.summary.column("expected").unwrap(), t.summary.column("max").unwrap());
    assert!(e.iter().zip(&mx).all(|(e, m)| e <= m));
    assert!(e.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn shrink_tables_with_a_seed_add_empirical_columns() {
    let cfg = ShrinkSweepConfig {
        summary_capacities: vec![5],
        trials: 4,
        len: 10_000,
        seed: Some(3),
        ..Default::default()
    };
    let t = run_shrink_error_sweep(&cfg).unwrap();
    assert_eq!(t.summary.columns, ["M", "expected", "max", "empirical", "empirical_se"]);
    assert_eq!(t, run_shrink_error_sweep(&cfg).unwrap());
    let bad = ShrinkSweepConfig {
        pa_points: 1,
        ..Default::default()
    };
    assert!(run_shrink_error_sweep(&bad).is_err());
}

#[test]
fn tables_round_trip_exactly() {
    let mut t = Table::new(vec!["a".into(), "b".into()]).comment("note");
    t.push(vec![0.1, -1.0 / 3.0]).unwrap();
    t.push(vec![f64::MIN_POSITIVE, 1e300]).unwrap();
    assert!(t.push(vec![1.0]).is_err());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.dat");
    t.write_file(&path).unwrap();
    assert_eq!(Table::read_file(&path).unwrap(), t);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# note\n# columns: a b\n"));
}

#[test]
fn default_threshold_is_the_calibrated_one() {
    let cfg = ExperimentConfig::default();
    let (best, curve) = calibrate_lambda_prime(&cfg, 2, &lambda_prime_grid()).unwrap();
    assert_eq!(best, DEFAULT_LAMBDA_PRIME, "{curve:?}");
}
