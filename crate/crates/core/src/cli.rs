//! Command-line front end. [`run`] returns the process exit code: 0 on
//! success, 1 for usage errors, 2 for runtime failures.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::amplitude::SubbandAmplitudeVector;
use crate::estimators::{brute_force_oracle, evaluate_estimator, region_search, Method};
use crate::exec::with_threads;
use crate::harness::{
    run_sweep, write_csv, SweepConfig, DEFAULT_ORACLE_POINTS, DEFAULT_SUBBANDS, DEFAULT_TRIALS,
};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "type2amp",
    version,
    about = "Wideband/subband amplitude quantization for Type-2 CSI feedback"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantize one beam's subband amplitudes with the chosen estimator.
    Quantize {
        /// Comma-separated linear subband amplitudes.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        amplitudes: Vec<f64>,
        #[arg(long, value_parser = parse_method)]
        method: Method,
        /// Also report the brute-force grid search.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1_000_000)]
        oracle_points: usize,
    },
    /// Run the Monte-Carlo estimator comparison and write a CSV.
    Sweep {
        #[arg(long, default_value_t = DEFAULT_SUBBANDS)]
        subbands: usize,
        /// Comma-separated Gaussian variances.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.01,0.05,0.1,0.5,1,2,4,8"
        )]
        variances: Vec<f64>,
        /// Comma-separated minimum subband amplitudes.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        min_amplitudes: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Decimal or 0x-prefixed hexadecimal.
        #[arg(long, value_parser = parse_seed, default_value = "0")]
        seed: u64,
        #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "linear,optimal,suboptimal")]
        methods: Vec<Method>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        oracle_check: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_POINTS)]
        oracle_points: usize,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the two-subband (0.5, 1) example through all estimators.
    Example,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = match cli.command {
        Command::Quantize {
            amplitudes,
            method,
            oracle,
            oracle_points,
        } => quantize(out, amplitudes, method, oracle.then_some(oracle_points)),
        Command::Sweep {
            subbands,
            variances,
            min_amplitudes,
            trials,
            seed,
            methods,
            out: path,
            oracle_check,
            oracle_points,
            threads,
        } => {
            let config = SweepConfig {
                subbands,
                variances,
                min_amplitudes,
                trials,
                seed,
                methods,
                oracle_check,
                oracle_points,
            };
            sweep(out, &config, &path, threads)
        }
        Command::Example => example(out),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

enum Failure {
    Usage(Error),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => Failure::Usage(e),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn join_fixed(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn quantize(
    out: &mut dyn Write,
    amplitudes: Vec<f64>,
    method: Method,
    oracle_points: Option<usize>,
) -> Result<(), Failure> {
    let p_sb = SubbandAmplitudeVector::new(amplitudes)?;
    let result = evaluate_estimator(&p_sb, method)?;
    writeln!(out, "method: {method}")?;
    writeln!(out, "wb_amplitude: {}", result.wb_amplitude)?;
    writeln!(out, "r_vector: {}", join(&result.r_vector))?;
    writeln!(
        out,
        "sb_reconstruction: {}",
        join(&result.sb_reconstruction)
    )?;
    writeln!(out, "total_sq_error: {}", result.total_sq_error)?;
    writeln!(out, "rnsqe: {}", result.rnsqe)?;
    if let Some(points) = oracle_points {
        let oracle = brute_force_oracle(&p_sb, points)?;
        writeln!(out, "oracle_wb_amplitude: {}", oracle.wb)?;
        writeln!(out, "oracle_total_sq_error: {}", oracle.total_sq_error)?;
    }
    Ok(())
}

fn sweep(
    out: &mut dyn Write,
    config: &SweepConfig,
    path: &std::path::Path,
    threads: Option<usize>,
) -> Result<(), Failure> {
    config.validate()?;
    let rows = with_threads(threads, || run_sweep(config))??;
    write_csv(&rows, path)?;
    writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
    Ok(())
}

fn example(out: &mut dyn Write) -> Result<(), Failure> {
    let p_sb = SubbandAmplitudeVector::new(vec![0.5, 1.0])?;
    writeln!(out, "subband amplitudes: {}", join(p_sb.values()))?;
    writeln!(out)?;
    writeln!(
        out,
        "{:<11} {:>10} {:>22} {:>10}",
        "method", "wb", "reconstruction", "rnsqe"
    )?;
    for method in Method::ALL {
        let r = evaluate_estimator(&p_sb, method)?;
        writeln!(
            out,
            "{:<11} {:>10.6} {:>22} {:>10.6}",
            method.name(),
            r.wb_amplitude,
            format!("({})", join_fixed(&r.sb_reconstruction)),
            r.rnsqe
        )?;
    }
    writeln!(out)?;
    writeln!(out, "optimal region search:")?;
    writeln!(
        out,
        "{:>3} {:>22} {:>10} {:>10} {:>10}",
        "n", "region", "vertex", "clamped", "error"
    )?;
    let search = region_search(&p_sb);
    for c in &search.candidates {
        writeln!(
            out,
            "{:>3} {:>22} {:>10.6} {:>10.6} {:>10.6}{}",
            c.n,
            format!("[{:.6}, {:.6}]", c.lower, c.upper),
            c.unconstrained_min,
            c.clamped_min,
            c.objective,
            if c.n == search.candidates[search.best].n {
                "  *"
            } else {
                ""
            }
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("type2amp").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn seeds_parse_decimal_and_hex() {
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert_eq!(parse_seed("0x2A").unwrap(), 42);
        assert_eq!(parse_seed("0XfF").unwrap(), 255);
        assert!(parse_seed("0xzz").is_err());
        assert!(parse_seed("-1").is_err());
    }

    #[test]
    fn quantize_linear() {
        let (code, out, _) = call(&["quantize", "--amplitudes", "0.5,1", "--method", "linear"]);
        assert_eq!(code, 0);
        assert!(out.contains("wb_amplitude: 0.75\n"), "{out}");
        assert!(out.contains("rnsqe: 0.25\n"), "{out}");
    }

    #[test]
    fn quantize_optimal_with_oracle() {
        let (code, out, _) = call(&[
            "quantize",
            "--amplitudes",
            "0.5,1",
            "--method",
            "optimal",
            "--oracle",
            "--oracle-points",
            "1000",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("wb_amplitude: 1\n"), "{out}");
        assert!(out.contains("rnsqe: 0\n"), "{out}");
        assert!(out.contains("oracle_total_sq_error: 0\n"), "{out}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(
            call(&["quantize", "--amplitudes", "0.5,1", "--method", "median"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            call(&["quantize", "--amplitudes", "0,0", "--method", "linear"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            call(&["quantize", "--amplitudes", "1,-2", "--method", "linear"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            call(&["sweep", "--out", "/tmp/x.csv", "--trials", "0"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            call(&["sweep", "--out", "/tmp/x.csv", "--seed", "nope"]).0,
            EXIT_USAGE
        );
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn unwritable_output_is_runtime_error() {
        let (code, _, err) = call(&[
            "sweep",
            "--out",
            "/nonexistent-dir/x.csv",
            "--trials",
            "2",
            "--variances",
            "1",
            "--min-amplitudes",
            "1",
        ]);
        assert_eq!(code, EXIT_RUNTIME);
        assert!(err.contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn example_prints_table() {
        let (code, out, _) = call(&["example"]);
        assert_eq!(code, 0);
        assert!(out.contains("linear"));
        assert!(out.contains("0.250000"));
        assert!(out.contains("0.100000"));
        assert!(out.contains("(0.375000, 0.750000)"));
        assert!(out.contains("(0.450000, 0.900000)"));
    }
}
