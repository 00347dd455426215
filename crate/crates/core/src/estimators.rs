//! Wideband amplitude estimators for joint wideband/subband feedback.
//!
//! Given a beam's subband amplitudes `x`, each estimator picks a wideband
//! amplitude `w`; the 1-bit subband quantizer then reconstructs subband `s` as
//! `w·r_s` with `r_s = 1` when `x_s ≥ 0.75·w` and `r_s = 1/2` otherwise.
//!
//! * [`linear_average_wb`] uses the plain mean.
//! * [`suboptimal_wb`] scales the mean by 6/5, which minimizes the expected
//!   error when each `r_s` is modelled as a fair coin independent of `w`.
//! * [`optimal_wb`] minimizes the actual error `Σ (w·r_s − x_s)²`. Sorting `x`
//!   ascending splits the `w` axis at `(4/3)·x_s` into `S + 1` regions with a
//!   fixed pattern `r` (the first `n` sorted subbands halved in region `n`).
//!   On each region the error is a parabola in `w`; its vertex is clamped into
//!   the region and the best region wins.
//!
//! [`brute_force_oracle`] scans a dense grid of `w` with the quantizer applied
//! directly and exists to cross-check the region search.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::amplitude::{sb_factor, EstimatorResult, SubbandAmplitudeVector, SB_HIGH, SB_LOW};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;

/// Ratio between a region boundary and the subband amplitude that defines it.
const BOUNDARY_SCALE: f64 = 4.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Linear,
    Optimal,
    Suboptimal,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Linear, Method::Optimal, Method::Suboptimal];

    pub fn name(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Optimal => "optimal",
            Method::Suboptimal => "suboptimal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Method::Linear),
            "optimal" => Ok(Method::Optimal),
            "suboptimal" => Ok(Method::Suboptimal),
            other => invalid(format!(
                "unknown method '{other}' (expected linear, optimal or suboptimal)"
            )),
        }
    }
}

/// Sum taken smallest first. Independent of input order, and the same value
/// the region search accumulates over its sorted copy.
fn ascending_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum()
}

pub fn linear_average_wb(p_sb: &SubbandAmplitudeVector) -> f64 {
    ascending_sum(p_sb.values()) / p_sb.len() as f64
}

pub fn suboptimal_wb(p_sb: &SubbandAmplitudeVector) -> f64 {
    1.2 * linear_average_wb(p_sb)
}

/// One region of the optimal search, in ascending-sorted subband order.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCandidate {
    /// Number of halved subbands (the region index).
    pub n: usize,
    pub r_pattern: Vec<f64>,
    /// Closed region bounds; `-inf` / `+inf` for the outer regions.
    pub lower: f64,
    pub upper: f64,
    /// Vertex of the region's parabola.
    pub unconstrained_min: f64,
    /// Minimizer restricted to the region.
    pub clamped_min: f64,
    /// Error at `clamped_min` under `r_pattern`.
    pub objective: f64,
}

impl RegionCandidate {
    pub fn contains(&self, w: f64) -> bool {
        self.lower <= w && w <= self.upper
    }
}

/// Full trace of the region search for one beam.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSearch {
    /// `sorted[k] = p_sb[permutation[k]]`.
    pub permutation: Vec<usize>,
    pub sorted: Vec<f64>,
    pub candidates: Vec<RegionCandidate>,
    /// Index into `candidates` of the global minimum.
    pub best: usize,
}

impl RegionSearch {
    pub fn wb(&self) -> f64 {
        self.candidates[self.best].clamped_min
    }

    /// The winning pattern mapped back to the caller's subband order.
    pub fn r_vector(&self) -> Vec<f64> {
        let pattern = &self.candidates[self.best].r_pattern;
        let mut r = vec![0.0; pattern.len()];
        for (k, &orig) in self.permutation.iter().enumerate() {
            r[orig] = pattern[k];
        }
        r
    }
}

fn pattern_error(w: f64, pattern: &[f64], sorted: &[f64]) -> f64 {
    pattern
        .iter()
        .zip(sorted)
        .map(|(r, x)| {
            let d = w * r - x;
            d * d
        })
        .sum()
}

/// Enumerates all `S + 1` regions and picks the smallest error. On exact ties
/// the region with fewer halved subbands wins.
pub fn region_search(p_sb: &SubbandAmplitudeVector) -> RegionSearch {
    let values = p_sb.values();
    let s_count = values.len();
    let mut permutation: Vec<usize> = (0..s_count).collect();
    permutation.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted: Vec<f64> = permutation.iter().map(|&i| values[i]).collect();

    // region 0's vertex is then bit-identical to linear_average_wb
    let total: f64 = sorted.iter().sum();
    let mut halved_sum = 0.0;
    let mut candidates = Vec::with_capacity(s_count + 1);

    for n in 0..=s_count {
        if n > 0 {
            halved_sum += sorted[n - 1];
        }
        let lower = if n == 0 {
            f64::NEG_INFINITY
        } else {
            BOUNDARY_SCALE * sorted[n - 1]
        };
        let upper = if n == s_count {
            f64::INFINITY
        } else {
            BOUNDARY_SCALE * sorted[n]
        };
        let r_pattern: Vec<f64> = (0..s_count)
            .map(|k| if k < n { SB_LOW } else { SB_HIGH })
            .collect();

        // Σ x r / Σ r², with r = 1/2 on the first n and 1 elsewhere
        let numerator = SB_LOW * halved_sum + (total - halved_sum);
        let denominator = SB_LOW * SB_LOW * n as f64 + (s_count - n) as f64;
        let unconstrained_min = numerator / denominator;

        let clamped_min = if lower <= unconstrained_min && unconstrained_min <= upper {
            unconstrained_min
        } else if n == 0 {
            upper
        } else if n == s_count {
            lower
        } else {
            let g_lo = pattern_error(lower, &r_pattern, &sorted);
            let g_hi = pattern_error(upper, &r_pattern, &sorted);
            if g_hi < g_lo {
                upper
            } else {
                lower
            }
        };
        let objective = pattern_error(clamped_min, &r_pattern, &sorted);
        candidates.push(RegionCandidate {
            n,
            r_pattern,
            lower,
            upper,
            unconstrained_min,
            clamped_min,
            objective,
        });
    }

    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if c.objective < candidates[best].objective {
            best = i;
        }
    }

    RegionSearch {
        permutation,
        sorted,
        candidates,
        best,
    }
}

/// Wideband amplitude minimizing the total squared subband error.
///
/// The returned result is scored with the real 1-bit quantizer at the chosen
/// amplitude, so `r_vector` always matches [`quantize_sb_linear`]. At a
/// region boundary both neighbouring patterns give the same error, so this
/// never changes the objective beyond rounding.
///
/// [`quantize_sb_linear`]: crate::amplitude::quantize_sb_linear
pub fn optimal_wb(p_sb: &SubbandAmplitudeVector) -> Result<(f64, EstimatorResult)> {
    let wb = region_search(p_sb).wb();
    let result = EstimatorResult::at(p_sb, wb)?;
    Ok((wb, result))
}

/// Minimizer found by [`brute_force_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub wb: f64,
    pub total_sq_error: f64,
}

pub const MIN_ORACLE_POINTS: usize = 1_000;

const ORACLE_CHUNK: usize = 1 << 14;

fn direct_error(w: f64, values: &[f64]) -> f64 {
    values
        .iter()
        .map(|&x| {
            let d = w * sb_factor(x, w) - x;
            d * d
        })
        .sum()
}

fn better(a: OracleResult, b: OracleResult) -> OracleResult {
    match a.total_sq_error.total_cmp(&b.total_sq_error) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => {
            if b.wb < a.wb {
                b
            } else {
                a
            }
        }
    }
}

/// Grid-search reference for the optimal wideband amplitude.
///
/// Scores `grid_points` evenly spaced amplitudes on `[0, (4/3)·max + ε]`, every
/// region boundary `(4/3)·x_s`, and each sorted-prefix least-squares point,
/// all with the quantizer applied directly. Ties resolve to the smaller
/// amplitude, so the answer does not depend on how the grid is split.
pub fn brute_force_oracle(
    p_sb: &SubbandAmplitudeVector,
    grid_points: usize,
) -> Result<OracleResult> {
    brute_force_oracle_with(p_sb, grid_points, Execution::default())
}

pub fn brute_force_oracle_with(
    p_sb: &SubbandAmplitudeVector,
    grid_points: usize,
    exec: Execution,
) -> Result<OracleResult> {
    if grid_points < MIN_ORACLE_POINTS {
        return invalid(format!(
            "oracle needs at least {MIN_ORACLE_POINTS} grid points, got {grid_points}"
        ));
    }
    let values = p_sb.values();
    let max = p_sb.max();
    let top = BOUNDARY_SCALE * max + 1e-6 * max;
    let step = top / (grid_points - 1) as f64;

    let mut extra: Vec<f64> = values.iter().map(|&x| BOUNDARY_SCALE * x).collect();
    let mut ascending = values.to_vec();
    ascending.sort_by(f64::total_cmp);
    for n in 0..=ascending.len() {
        let (mut num, mut den) = (0.0, 0.0);
        for (k, &x) in ascending.iter().enumerate() {
            let r = if k < n { 0.5 } else { 1.0 };
            num += x * r;
            den += r * r;
        }
        extra.push(num / den);
    }

    let eval = |w: f64| OracleResult {
        wb: w,
        total_sq_error: direct_error(w, values),
    };

    let chunks = grid_points.div_ceil(ORACLE_CHUNK);
    let per_chunk = exec.map_indexed(chunks, |c| {
        let start = c * ORACLE_CHUNK;
        let end = (start + ORACLE_CHUNK).min(grid_points);
        (start..end)
            .map(|k| eval(k as f64 * step))
            .reduce(better)
            .expect("chunk is non-empty")
    });

    let best = per_chunk
        .into_iter()
        .chain(extra.into_iter().filter(|w| *w >= 0.0).map(eval))
        .reduce(better)
        .expect("grid is non-empty");
    Ok(best)
}

/// Picks the wideband amplitude by `method` and scores it.
pub fn evaluate_estimator(
    p_sb: &SubbandAmplitudeVector,
    method: Method,
) -> Result<EstimatorResult> {
    match method {
        Method::Linear => EstimatorResult::at(p_sb, linear_average_wb(p_sb)),
        Method::Suboptimal => EstimatorResult::at(p_sb, suboptimal_wb(p_sb)),
        Method::Optimal => optimal_wb(p_sb).map(|(_, r)| r),
    }
}
