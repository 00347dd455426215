//! Monte-Carlo comparison of the wideband estimators on frequency-selective
//! subband amplitudes.
//!
//! Each trial draws `S` Gaussian amplitudes and shifts them so the smallest
//! equals the configured minimum. Every trial seeds its own ChaCha stream from
//! `(seed, min index, variance index, trial index)`, and aggregation happens
//! in trial order, so output is identical for any worker count.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::amplitude::SubbandAmplitudeVector;
use crate::error::{invalid, Error, Result};
use crate::estimators::{brute_force_oracle_with, evaluate_estimator, Method, MIN_ORACLE_POINTS};
use crate::exec::Execution;

pub const DEFAULT_SUBBANDS: usize = 10;
pub const DEFAULT_VARIANCES: [f64; 8] = [0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0];
pub const DEFAULT_MIN_AMPLITUDES: [f64; 3] = [1.0, 2.0, 4.0];
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_ORACLE_POINTS: usize = 10_000;

/// Absolute slack allowed between the optimal error and the oracle's.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

pub const CSV_HEADER: &str = "min_amplitude,variance,method,rms_nsqe,mean_nsqe,trials,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub subbands: usize,
    pub variances: Vec<f64>,
    pub min_amplitudes: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Cross-check every optimal trial against the brute-force oracle.
    pub oracle_check: bool,
    pub oracle_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            subbands: DEFAULT_SUBBANDS,
            variances: DEFAULT_VARIANCES.to_vec(),
            min_amplitudes: DEFAULT_MIN_AMPLITUDES.to_vec(),
            trials: DEFAULT_TRIALS,
            seed: 0,
            methods: Method::ALL.to_vec(),
            oracle_check: false,
            oracle_points: DEFAULT_ORACLE_POINTS,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subbands < 2 {
            return invalid(format!("need at least 2 subbands, got {}", self.subbands));
        }
        if self.variances.is_empty() || self.min_amplitudes.is_empty() {
            return invalid("variance and minimum-amplitude lists must be non-empty");
        }
        if let Some(v) = self
            .variances
            .iter()
            .find(|v| !(v.is_finite() && **v > 0.0))
        {
            return invalid(format!("variance {v} must be positive and finite"));
        }
        if let Some(m) = self
            .min_amplitudes
            .iter()
            .find(|m| !(m.is_finite() && **m > 0.0))
        {
            return invalid(format!("minimum amplitude {m} must be positive and finite"));
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.methods.is_empty() {
            return invalid("no estimator methods selected");
        }
        if self.oracle_check && self.oracle_points < MIN_ORACLE_POINTS {
            return invalid(format!(
                "oracle needs at least {MIN_ORACLE_POINTS} grid points"
            ));
        }
        Ok(())
    }
}

/// Aggregate error of one method at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub min_amplitude: f64,
    pub variance: f64,
    pub method: Method,
    /// `sqrt(mean(rnsqe²))` over trials.
    pub rms_nsqe: f64,
    /// `mean(rnsqe)` over trials.
    pub mean_nsqe: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Gaussian draws shifted so their minimum is exactly `min_amplitude`.
pub fn generate_sb_amplitudes<R: Rng + ?Sized>(
    subbands: usize,
    variance: f64,
    min_amplitude: f64,
    rng: &mut R,
) -> Result<SubbandAmplitudeVector> {
    if subbands < 2 {
        return invalid(format!("need at least 2 subbands, got {subbands}"));
    }
    if !(variance.is_finite() && variance > 0.0) {
        return invalid(format!("variance {variance} must be positive and finite"));
    }
    if !(min_amplitude.is_finite() && min_amplitude > 0.0) {
        return invalid(format!(
            "minimum amplitude {min_amplitude} must be positive and finite"
        ));
    }
    let normal = Normal::new(0.0, variance.sqrt())
        .map_err(|e| Error::InvalidInput(format!("bad gaussian: {e}")))?;
    let draws: Vec<f64> = (0..subbands).map(|_| normal.sample(rng)).collect();
    let (argmin, &lowest) = draws
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least two draws");
    let shift = min_amplitude - lowest;
    // rounding in the shift may leave values a hair under the minimum
    let mut values: Vec<f64> = draws
        .iter()
        .map(|d| (d + shift).max(min_amplitude))
        .collect();
    values[argmin] = min_amplitude;
    SubbandAmplitudeVector::new(values)
}

/// Random stream of one trial.
pub fn trial_rng(seed: u64, min_index: usize, variance_index: usize, trial: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in
        key.chunks_exact_mut(8)
            .zip([seed, min_index as u64, variance_index as u64, trial as u64])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    run_sweep_with(config, Execution::default())
}

pub fn run_sweep_with(config: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();

    let mut rows =
        Vec::with_capacity(config.min_amplitudes.len() * config.variances.len() * methods.len());
    for (mi, &min_amplitude) in config.min_amplitudes.iter().enumerate() {
        for (vi, &variance) in config.variances.iter().enumerate() {
            let per_trial = exec.map_indexed(config.trials, |t| {
                run_trial(config, &methods, mi, vi, t, min_amplitude, variance)
            });
            let mut sum = vec![0.0; methods.len()];
            let mut sum_sq = vec![0.0; methods.len()];
            for trial in per_trial {
                for (k, e) in trial?.into_iter().enumerate() {
                    sum[k] += e;
                    sum_sq[k] += e * e;
                }
            }
            let n = config.trials as f64;
            for (k, &method) in methods.iter().enumerate() {
                rows.push(SweepRow {
                    min_amplitude,
                    variance,
                    method,
                    rms_nsqe: (sum_sq[k] / n).sqrt(),
                    mean_nsqe: sum[k] / n,
                    trials: config.trials,
                    seed: config.seed,
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.min_amplitude
            .total_cmp(&b.min_amplitude)
            .then(a.variance.total_cmp(&b.variance))
            .then(a.method.name().cmp(b.method.name()))
    });
    Ok(rows)
}

fn run_trial(
    config: &SweepConfig,
    methods: &[Method],
    mi: usize,
    vi: usize,
    t: usize,
    min_amplitude: f64,
    variance: f64,
) -> Result<Vec<f64>> {
    let mut rng = trial_rng(config.seed, mi, vi, t);
    let p_sb = generate_sb_amplitudes(config.subbands, variance, min_amplitude, &mut rng)?;
    methods
        .iter()
        .map(|&m| {
            let result = evaluate_estimator(&p_sb, m)?;
            if m == Method::Optimal && config.oracle_check {
                // the outer sweep already spreads trials over the pool
                let oracle =
                    brute_force_oracle_with(&p_sb, config.oracle_points, Execution::Sequential)?;
                if result.total_sq_error > oracle.total_sq_error + ORACLE_TOLERANCE {
                    return Err(Error::OracleMismatch {
                        optimal: result.total_sq_error,
                        oracle: oracle.total_sq_error,
                    });
                }
            }
            Ok(result.rnsqe)
        })
        .collect()
}

/// `printf("%.*g")`-style rendering with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exponent.abs())
    } else {
        let decimals = (digits as i32 - 1 - exponent) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv_to<W: Write>(rows: &[SweepRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_significant(r.min_amplitude, 9),
            format_significant(r.variance, 9),
            r.method.name(),
            format_significant(r.rms_nsqe, 9),
            format_significant(r.mean_nsqe, 9),
            r.trials,
            r.seed
        )?;
    }
    out.flush()
}

pub fn write_csv(rows: &[SweepRow], destination: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: destination.to_path_buf(),
        source,
    };
    let file = File::create(destination).map_err(io_err)?;
    write_csv_to(rows, &mut BufWriter::new(file)).map_err(io_err)
}
