use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ShrinkSweepConfig};
use super::problem_gen::{gen_problem, squared_error};
use super::table::Table;
use crate::analysis::{empirical_shrink_error, expected_p_error, p_error, p_error_max};
use crate::bitstream::sng::mix64;
use crate::bitstream::SngConfig;
use crate::error::{Error, Result};
use crate::estimators::{solve_with_lambda_prime, Backend, FixedPointFormat, ScParams, SolverConfig};

const PROBLEM_STREAM: u64 = 0x5052_4f42;
const SC_STREAM: u64 = 0x5343_5354;

/// Seed of sub-stream `tag` for trial `t` at sparsity `z`.
pub fn trial_seed(master: u64, tag: u64, z: usize, t: usize) -> u64 {
    mix64(master ^ mix64(tag ^ mix64(((z as u64) << 32) | t as u64)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RmseRow {
    pub z: usize,
    pub float: f64,
    pub stochastic: Option<f64>,
    /// `(width, rmse)` in configuration order.
    pub fixed: Vec<(u32, f64)>,
    pub used: usize,
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RmseReport {
    pub rows: Vec<RmseRow>,
    /// One message per excluded instance.
    pub exclusions: Vec<String>,
}

impl RmseReport {
    /// Columns `z float sc fixed<W>...`; the `sc` column is omitted when the
    /// stochastic backend was not run.
    pub fn table(&self, cfg: &ExperimentConfig) -> Table {
        let mut cols = vec!["z".to_string(), "float".to_string()];
        if cfg.stochastic {
            cols.push("sc".into());
        }
        cols.extend(cfg.widths.iter().map(|w| format!("fixed{w}")));
        let mut t = Table::new(cols)
            .comment("RMSE sqrt(mean |x_hat - x|^2) per sparsity level")
            .comment(format!(
                "n={} m={} trials={} snr_db={} N={} lambda_prime={} L={} M={} D={} seed={}",
                cfg.n,
                cfg.m,
                cfg.trials,
                cfg.snr_db.map_or("inf".into(), |v| v.to_string()),
                cfg.iterations(),
                cfg.lambda_prime,
                cfg.len,
                cfg.max_capacity,
                cfg.carry_depth,
                cfg.seed
            ));
        for r in &self.rows {
            let mut row = vec![r.z as f64, r.float];
            if cfg.stochastic {
                row.push(r.stochastic.unwrap_or(f64::NAN));
            }
            row.extend(r.fixed.iter().map(|&(_, v)| v));
            t.push(row).expect("row matches header");
        }
        t
    }
}

fn backends(cfg: &ExperimentConfig) -> Result<Vec<Backend>> {
    let mut b = vec![Backend::Float];
    for &w in &cfg.widths {
        b.push(Backend::Fixed(FixedPointFormat::new(w)?));
    }
    if cfg.stochastic {
        b.push(Backend::Stochastic);
    }
    Ok(b)
}

fn solver_config(cfg: &ExperimentConfig, backend: Backend, seed: u64) -> Result<SolverConfig> {
    Ok(SolverConfig {
        lambda: 0.5,
        iterations: cfg.iterations(),
        backend,
        sc: ScParams {
            len: cfg.len,
            max_capacity: cfg.max_capacity,
            carry_depth: cfg.carry_depth,
            delay: cfg.delay,
            sng: SngConfig::with_width(cfg.sng_width)?,
        },
        seed,
    })
}

/// Squared error of every backend on one instance, in [`backends`] order.
fn run_trial(cfg: &ExperimentConfig, backends: &[Backend], z: usize, t: usize) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, PROBLEM_STREAM, z, t));
    let p = gen_problem(cfg.n, cfg.m, z, cfg.snr_db, &mut rng)?;
    let x = p.x_true().expect("generated problems carry truth").to_vec();
    let sc_seed = trial_seed(cfg.seed, SC_STREAM, z, t);
    backends
        .iter()
        .map(|&b| {
            let out = solve_with_lambda_prime(&p, cfg.lambda_prime, &solver_config(cfg, b, sc_seed)?)?;
            Ok(squared_error(&out.x_hat, &x))
        })
        .collect()
}

/// Paired RMSE comparison: every backend sees the same instances. An
/// instance on which any backend fails is dropped for all of them.
pub fn run_rmse_sweep(cfg: &ExperimentConfig) -> Result<RmseReport> {
    cfg.validate()?;
    let backends = backends(cfg)?;
    let jobs: Vec<(usize, usize)> = cfg
        .z_values
        .iter()
        .flat_map(|&z| (0..cfg.trials).map(move |t| (z, t)))
        .collect();
    let results: Vec<Result<Vec<f64>>> = jobs
        .par_iter()
        .map(|&(z, t)| run_trial(cfg, &backends, z, t))
        .collect();

    let mut rows = Vec::new();
    let mut exclusions = Vec::new();
    for (zi, &z) in cfg.z_values.iter().enumerate() {
        let mut sums = vec![0.0; backends.len()];
        let mut used = 0;
        let mut excluded = 0;
        for t in 0..cfg.trials {
            match &results[zi * cfg.trials + t] {
                Ok(errs) => {
                    used += 1;
                    for (s, e) in sums.iter_mut().zip(errs) {
                        *s += e;
                    }
                }
                Err(e) => {
                    excluded += 1;
                    exclusions.push(format!("z={z} trial={t}: {e}"));
                }
            }
        }
        if used == 0 {
            return Err(Error::Degenerate(format!("every instance at z={z} was excluded")));
        }
        let rmse: Vec<f64> = sums.iter().map(|s| (s / used as f64).sqrt()).collect();
        let mut fixed = Vec::new();
        let mut stochastic = None;
        for (b, &v) in backends.iter().zip(&rmse) {
            match b {
                Backend::Fixed(f) => fixed.push((f.width(), v)),
                Backend::Stochastic => stochastic = Some(v),
                Backend::Float => {}
            }
        }
        rows.push(RmseRow {
            z,
            float: rmse[0],
            stochastic,
            fixed,
            used,
            excluded,
        });
    }
    Ok(RmseReport { rows, exclusions })
}

/// Threshold grid searched by [`calibrate_lambda_prime`]: 0.05 to 2 in
/// steps of 0.05.
pub fn lambda_prime_grid() -> Vec<f64> {
    (1..=40).map(|k| k as f64 / 20.0).collect()
}

/// Float-backend RMSE at sparsity `z` for every `lambda_prime` in `grid`;
/// values that exclude any instance are skipped. Returns the grid point
/// with the lowest RMSE together with all `(lambda_prime, rmse)` pairs.
pub fn calibrate_lambda_prime(cfg: &ExperimentConfig, z: usize, grid: &[f64]) -> Result<(f64, Vec<(f64, f64)>)> {
    let mut curve = Vec::new();
    for &lp in grid {
        let probe = ExperimentConfig {
            z_values: vec![z],
            widths: Vec::new(),
            stochastic: false,
            lambda_prime: lp,
            ..cfg.clone()
        };
        let report = run_rmse_sweep(&probe)?;
        if report.exclusions.is_empty() {
            curve.push((lp, report.rows[0].float));
        }
    }
    let best = curve
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Degenerate("no threshold on the grid ran without exclusions".into()))?
        .0;
    Ok((best, curve))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkTables {
    /// `P_A P_B M=<c>...`: closed-form error over the `P_A` grid.
    pub over_pa: Table,
    /// `M expected max [empirical empirical_se]`.
    pub summary: Table,
}

pub fn run_shrink_error_sweep(cfg: &ShrinkSweepConfig) -> Result<ShrinkTables> {
    if cfg.pa_points < 2 || !(cfg.pa_min < cfg.pa_max) {
        return Err(Error::Config("P_A grid needs at least two increasing points".into()));
    }
    let mut cols = vec!["P_A".to_string(), "P_B".to_string()];
    cols.extend(cfg.capacities.iter().map(|m| format!("M={m}")));
    let mut over_pa = Table::new(cols).comment("zero-output error probability of SC shrink, P_B = 0.5");
    for k in 0..cfg.pa_points {
        let pa = cfg.pa_min + (cfg.pa_max - cfg.pa_min) * k as f64 / (cfg.pa_points - 1) as f64;
        let mut row = vec![pa, 0.5];
        for &m in &cfg.capacities {
            row.push(p_error(pa, 0.5, m)?);
        }
        over_pa.push(row)?;
    }

    let mut cols = vec!["M".to_string(), "expected".to_string(), "max".to_string()];
    if cfg.seed.is_some() {
        cols.push("empirical".into());
        cols.push("empirical_se".into());
    }
    let mut summary = Table::new(cols).comment(format!(
        "expected (quadrature, {} intervals) and maximum zero-output error; empirical: trials={} L={}",
        cfg.resolution, cfg.trials, cfg.len
    ));
    for &m in &cfg.summary_capacities {
        let mut row = vec![m as f64, expected_p_error(m, cfg.resolution)?, p_error_max(m)?];
        if let Some(seed) = cfg.seed {
            let e = empirical_shrink_error(m, cfg.len, cfg.trials, mix64(seed ^ m as u64))?;
            row.push(e.mean);
            row.push(e.std_err);
        }
        summary.push(row)?;
    }
    Ok(ShrinkTables { over_pa, summary })
}
