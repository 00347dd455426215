//! Amplitude-domain types and the standard quantizers.
//!
//! Amplitudes are carried on a linear scale everywhere. The decibel domain only
//! appears at the 3-bit wideband grid and the dB form of the 1-bit subband rule.

use std::f64::consts::LOG10_2;

use crate::error::{invalid, Result};

/// Spacing of the wideband grid and the gap between the two subband levels.
pub const STEP_DB: f64 = 10.0 * LOG10_2;

/// Number of wideband amplitude levels (3-bit index).
pub const WB_LEVELS: usize = 8;

/// Subband reconstruction factor for index 0.
pub const SB_LOW: f64 = 0.5;
/// Subband reconstruction factor for index 1.
pub const SB_HIGH: f64 = 1.0;

/// Linear threshold of the 1-bit subband quantizer, relative to the wideband
/// amplitude. This is the midpoint of the two reconstruction levels.
pub const SB_THRESHOLD: f64 = 0.75;

/// How linear amplitudes map to decibels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DbConvention {
    /// `20·log10(a)`: the value is an amplitude.
    #[default]
    Amplitude,
    /// `10·log10(a)`: the value is a power.
    Power,
}

impl DbConvention {
    fn factor(self) -> f64 {
        match self {
            DbConvention::Amplitude => 20.0,
            DbConvention::Power => 10.0,
        }
    }

    pub fn to_db(self, linear: f64) -> f64 {
        self.factor() * linear.log10()
    }

    pub fn from_db(self, db: f64) -> f64 {
        10f64.powf(db / self.factor())
    }
}

/// Observed per-subband linear amplitudes of one logical beam.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandAmplitudeVector {
    values: Vec<f64>,
}

impl SubbandAmplitudeVector {
    /// Rejects empty vectors, negative or non-finite entries, and all-zero
    /// vectors (the error metric needs positive energy).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("subband amplitude vector is empty");
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return invalid(format!("subband amplitude {v} is negative or not finite"));
        }
        if values.iter().all(|&v| v == 0.0) {
            return invalid("subband amplitude vector has zero energy");
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of subbands.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * alpha).collect())
    }
}

impl TryFrom<Vec<f64>> for SubbandAmplitudeVector {
    type Error = crate::Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// The eight wideband amplitude levels in dB, anchored at the strongest beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WbLevelGrid {
    anchor_db: f64,
    levels_db: [f64; WB_LEVELS],
}

impl WbLevelGrid {
    pub fn from_anchor(anchor_db: f64) -> Result<Self> {
        if !anchor_db.is_finite() {
            return invalid(format!("grid anchor {anchor_db} dB is not finite"));
        }
        let mut levels_db = [0.0; WB_LEVELS];
        for (i, level) in levels_db.iter_mut().enumerate() {
            *level = anchor_db - (WB_LEVELS - 1 - i) as f64 * STEP_DB;
        }
        Ok(Self {
            anchor_db,
            levels_db,
        })
    }

    pub fn anchor_db(&self) -> f64 {
        self.anchor_db
    }

    pub fn levels_db(&self) -> &[f64; WB_LEVELS] {
        &self.levels_db
    }

    pub fn step_db(&self) -> f64 {
        STEP_DB
    }
}

/// Builds the grid whose top level is the largest per-beam wideband amplitude.
pub fn build_wb_grid(wb_amplitudes_db: &[f64]) -> Result<WbLevelGrid> {
    if wb_amplitudes_db.is_empty() {
        return invalid("no wideband amplitudes to anchor the grid");
    }
    if let Some(v) = wb_amplitudes_db.iter().find(|v| !v.is_finite()) {
        return invalid(format!("wideband amplitude {v} dB is not finite"));
    }
    let anchor = wb_amplitudes_db
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    WbLevelGrid::from_anchor(anchor)
}

/// Nearest grid level; equidistant inputs take the larger index.
pub fn quantize_wb_index(p_wb_db: f64, grid: &WbLevelGrid) -> Result<u8> {
    if !p_wb_db.is_finite() {
        return invalid(format!("wideband amplitude {p_wb_db} dB is not finite"));
    }
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (m, level) in grid.levels_db.iter().enumerate() {
        let dist = (p_wb_db - level).abs();
        if dist <= best_dist {
            best = m;
            best_dist = dist;
        }
    }
    Ok(best as u8)
}

/// Linear wideband amplitude signalled by a 3-bit index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WbDequantizer {
    pub db: DbConvention,
    /// Index 0 reconstructs to zero amplitude instead of its grid level.
    pub k0_is_zero: bool,
}

impl Default for WbDequantizer {
    fn default() -> Self {
        Self {
            db: DbConvention::Amplitude,
            k0_is_zero: true,
        }
    }
}

impl WbDequantizer {
    pub fn amplitude(&self, grid: &WbLevelGrid, k1: u8) -> Result<f64> {
        let level = level_at(grid, k1)?;
        if k1 == 0 && self.k0_is_zero {
            return Ok(0.0);
        }
        Ok(self.db.from_db(level))
    }
}

fn level_at(grid: &WbLevelGrid, k1: u8) -> Result<f64> {
    match grid.levels_db.get(k1 as usize) {
        Some(&level) => Ok(level),
        None => invalid(format!("wideband index {k1} outside 0..=7")),
    }
}

/// The two subband levels of one beam in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbLevelPair {
    pub high_db: f64,
    pub low_db: f64,
}

pub fn sb_levels_for_beam(grid: &WbLevelGrid, k1: u8) -> Result<SbLevelPair> {
    let high_db = level_at(grid, k1)?;
    Ok(SbLevelPair {
        high_db,
        low_db: high_db - STEP_DB,
    })
}

/// Nearest-level subband index in the dB domain. Ties go to 1.
pub fn quantize_sb_index_db(p_sb_db: f64, pair: &SbLevelPair) -> u8 {
    if (p_sb_db - pair.high_db).abs() <= (p_sb_db - pair.low_db).abs() {
        1
    } else {
        0
    }
}

/// Per-subband factor for one subband amplitude.
#[inline]
pub fn sb_factor(p_sb: f64, p_wb: f64) -> f64 {
    if p_sb >= SB_THRESHOLD * p_wb {
        SB_HIGH
    } else {
        SB_LOW
    }
}

/// Linear 1-bit subband quantizer: factor 1 at or above `0.75·p_wb`, else 1/2.
pub fn quantize_sb_linear(p_sb: &SubbandAmplitudeVector, p_wb: f64) -> Result<Vec<f64>> {
    if !(p_wb.is_finite() && p_wb > 0.0) {
        return invalid(format!(
            "wideband amplitude {p_wb} must be positive and finite"
        ));
    }
    Ok(p_sb.values().iter().map(|&v| sb_factor(v, p_wb)).collect())
}

/// Subband index (0 or 1) for a reconstruction factor.
pub fn sb_index(factor: f64) -> u8 {
    u8::from(factor == SB_HIGH)
}

/// Root normalized squared quantization error.
pub fn rnsqe(observed: &SubbandAmplitudeVector, reconstructed: &[f64]) -> Result<f64> {
    if observed.len() != reconstructed.len() {
        return invalid(format!(
            "length mismatch: {} observed vs {} reconstructed",
            observed.len(),
            reconstructed.len()
        ));
    }
    let energy = observed.energy();
    if !(energy.is_finite() && energy > 0.0) {
        return invalid("observed vector has zero energy");
    }
    Ok((squared_error(observed.values(), reconstructed) / energy).sqrt())
}

pub(crate) fn squared_error(observed: &[f64], reconstructed: &[f64]) -> f64 {
    observed
        .iter()
        .zip(reconstructed)
        .map(|(o, r)| (o - r) * (o - r))
        .sum()
}

/// Outcome of quantizing one beam's subbands against a chosen wideband amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    pub wb_amplitude: f64,
    pub sb_reconstruction: Vec<f64>,
    /// Per-subband factors, each 1/2 or 1.
    pub r_vector: Vec<f64>,
    pub total_sq_error: f64,
    pub rnsqe: f64,
}

impl EstimatorResult {
    /// Quantizes `p_sb` with the linear 1-bit rule around `wb` and scores it.
    pub fn at(p_sb: &SubbandAmplitudeVector, wb: f64) -> Result<Self> {
        let r_vector = quantize_sb_linear(p_sb, wb)?;
        let sb_reconstruction: Vec<f64> = r_vector.iter().map(|r| wb * r).collect();
        let total_sq_error = squared_error(p_sb.values(), &sb_reconstruction);
        let rnsqe = rnsqe(p_sb, &sb_reconstruction)?;
        Ok(Self {
            wb_amplitude: wb,
            sb_reconstruction,
            r_vector,
            total_sq_error,
            rnsqe,
        })
    }

    pub fn sb_indices(&self) -> Vec<u8> {
        self.r_vector.iter().map(|&r| sb_index(r)).collect()
    }
}
