//! Experiment configuration with `key=value` file support.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Parameters of the RMSE comparison across backends.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub z_values: Vec<usize>,
    /// `None` for noiseless measurements.
    pub snr_db: Option<f64>,
    pub trials: usize,
    pub len: usize,
    pub max_capacity: u32,
    pub carry_depth: u32,
    pub delay: usize,
    pub sng_width: u32,
    pub widths: Vec<u32>,
    /// `None` means `ITERATIONS_PER_ROW * m`.
    pub iterations: Option<usize>,
    pub lambda_prime: f64,
    pub seed: u64,
    pub stochastic: bool,
    pub output: PathBuf,
}

/// Float-RMSE minimiser at `z = 2` on [`super::lambda_prime_grid`] for the
/// default configuration.
pub const DEFAULT_LAMBDA_PRIME: f64 = 0.85;
pub const ITERATIONS_PER_ROW: usize = 10;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 16,
            m: 10,
            z_values: vec![1, 2, 3],
            snr_db: Some(30.0),
            trials: 100,
            len: (1 << 16) - 2,
            max_capacity: 10,
            carry_depth: 20,
            delay: 10,
            sng_width: 16,
            widths: vec![8, 9, 10, 11, 12],
            iterations: None,
            lambda_prime: DEFAULT_LAMBDA_PRIME,
            seed: 0,
            stochastic: true,
            output: PathBuf::from("error_diagram.dat"),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{key}={value}: {e}")))
}

pub fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(Error::Parse(format!("{key}={other}: expected a boolean"))),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub fn iterations(&self) -> usize {
        self.iterations.unwrap_or(ITERATIONS_PER_ROW * self.m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.z_values.iter().any(|&z| z > self.n) {
            return Err(Error::Config(format!("sparsity above n = {}", self.n)));
        }
        if self.trials == 0 || self.iterations() == 0 || self.n == 0 || self.m == 0 {
            return Err(Error::Config("n, m, trials and N must be positive".into()));
        }
        if self.len == 0 || self.max_capacity == 0 || self.carry_depth == 0 {
            return Err(Error::Config("circuit parameters L, M, D must be positive".into()));
        }
        if !(self.lambda_prime > 0.0) {
            return Err(Error::Config("lambda-prime must be positive".into()));
        }
        Ok(())
    }

    /// Sets one field from its `key=value` spelling (the CLI flag name).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "z" => self.z_values = parse_list(key, value)?,
            "snr-db" => {
                self.snr_db = match value.trim() {
                    "inf" | "none" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "trials" => self.trials = parse(key, value)?,
            "L" => self.len = parse(key, value)?,
            "M" => self.max_capacity = parse(key, value)?,
            "D" => self.carry_depth = parse(key, value)?,
            "delay" => self.delay = parse(key, value)?,
            "sng-width" => self.sng_width = parse(key, value)?,
            "widths" => self.widths = parse_list(key, value)?,
            "N" => {
                self.iterations = match value.trim() {
                    "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "lambda-prime" => self.lambda_prime = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "stochastic" => self.stochastic = parse_bool(key, value)?,
            "output" => self.output = PathBuf::from(value.trim()),
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text`; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", no + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Every field as `key=value`, parseable by [`Self::apply_kv`].
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let snr = self.snr_db.map_or("inf".to_string(), |v| v.to_string());
        writeln!(s, "n={}", self.n).unwrap();
        writeln!(s, "m={}", self.m).unwrap();
        writeln!(s, "z={}", join(&self.z_values)).unwrap();
        writeln!(s, "snr-db={snr}").unwrap();
        writeln!(s, "trials={}", self.trials).unwrap();
        writeln!(s, "L={}", self.len).unwrap();
        writeln!(s, "M={}", self.max_capacity).unwrap();
        writeln!(s, "D={}", self.carry_depth).unwrap();
        writeln!(s, "delay={}", self.delay).unwrap();
        writeln!(s, "sng-width={}", self.sng_width).unwrap();
        writeln!(s, "widths={}", join(&self.widths)).unwrap();
        let n = self.iterations.map_or("auto".to_string(), |v| v.to_string());
        writeln!(s, "N={n}").unwrap();
        writeln!(s, "lambda-prime={}", self.lambda_prime).unwrap();
        writeln!(s, "seed={}", self.seed).unwrap();
        writeln!(s, "stochastic={}", self.stochastic).unwrap();
        writeln!(s, "output={}", self.output.display()).unwrap();
        s
    }
}

/// Parameters of the shrink-error tables.
#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkSweepConfig {
    /// Register lengths tabulated against `P_A`.
    pub capacities: Vec<u32>,
    pub pa_min: f64,
    pub pa_max: f64,
    pub pa_points: usize,
    /// Register lengths of the expected/maximum/empirical table.
    pub summary_capacities: Vec<u32>,
    pub trials: usize,
    pub len: usize,
    /// Empirical columns are produced only with a seed.
    pub seed: Option<u64>,
    pub resolution: usize,
}

impl Default for ShrinkSweepConfig {
    fn default() -> Self {
        Self {
            capacities: vec![5, 10, 15, 20, 30],
            pa_min: 0.2,
            pa_max: 0.5,
            pa_points: 61,
            summary_capacities: (2..=30).collect(),
            trials: 100,
            len: 100_000,
            seed: None,
            resolution: crate::analysis::DEFAULT_RESOLUTION,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let mut c = ExperimentConfig {
            snr_db: None,
            z_values: vec![2],
            seed: 77,
            iterations: Some(40),
            ..Default::default()
        };
        c.widths = vec![8, 12];
        let mut back = ExperimentConfig::default();
        back.apply_kv(&c.to_kv()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_keys_and_values() {
        let mut c = ExperimentConfig::default();
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("trials", "x").is_err());
        assert!(c.apply_kv("trials 4").is_err());
        c.apply_kv("# comment\ntrials = 4 # trailing\n").unwrap();
        assert_eq!(c.trials, 4);
        c.z_values = vec![20];
        assert!(c.validate().is_err());
    }
}
