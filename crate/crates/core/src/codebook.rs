//! Type-2 codebook precoder assembly and amplitude feedback.
//!
//! A layer combines `L` oversampled 2D-DFT beams on each of two polarizations.
//! Each of the `2L` logical beams carries a wideband amplitude, a per-subband
//! amplitude and a per-subband PSK co-phasing coefficient. Logical beam `i`
//! is polarization `i / L`, physical beam `i % L`.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::amplitude::{
    build_wb_grid, quantize_wb_index, sb_index, DbConvention, SubbandAmplitudeVector,
    WbDequantizer, WbLevelGrid, SB_HIGH, SB_LOW,
};
use crate::error::{invalid, Result};
use crate::estimators::{evaluate_estimator, Method};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AntennaDims {
    pub n1: usize,
    pub n2: usize,
}

impl AntennaDims {
    pub fn ports(&self) -> usize {
        self.n1 * self.n2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oversampling {
    pub o1: usize,
    pub o2: usize,
}

/// Kronecker product of two oversampled DFT columns, unit norm.
/// Element `n1·N2 + n2` has phase `2π(n1·θ1/(N1·O1) + n2·θ2/(N2·O2))`.
pub fn generate_dft_beam(
    dims: AntennaDims,
    oversampling: Oversampling,
    theta1: usize,
    theta2: usize,
) -> Result<Vec<Complex64>> {
    if dims.n1 == 0 || dims.n2 == 0 || oversampling.o1 == 0 || oversampling.o2 == 0 {
        return invalid("antenna dimensions and oversampling factors must be positive");
    }
    let span1 = dims.n1 * oversampling.o1;
    let span2 = dims.n2 * oversampling.o2;
    if theta1 >= span1 || theta2 >= span2 {
        return invalid(format!(
            "beam index ({theta1}, {theta2}) outside {span1}x{span2} grid"
        ));
    }
    let scale = 1.0 / (dims.ports() as f64).sqrt();
    let mut beam = Vec::with_capacity(dims.ports());
    for a in 0..dims.n1 {
        for b in 0..dims.n2 {
            let phase = 2.0
                * PI
                * ((a * theta1) as f64 / span1 as f64 + (b * theta2) as f64 / span2 as f64);
            beam.push(Complex64::from_polar(scale, phase));
        }
    }
    Ok(beam)
}

/// The `L` beams selected for a layer.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSet {
    dims: AntennaDims,
    oversampling: Oversampling,
    beam_indices: Vec<(usize, usize)>,
    beams: Vec<Vec<Complex64>>,
}

impl BeamSet {
    pub fn new(
        dims: AntennaDims,
        oversampling: Oversampling,
        beam_indices: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if !(2..=4).contains(&beam_indices.len()) {
            return invalid(format!(
                "beam count {} outside {{2, 3, 4}}",
                beam_indices.len()
            ));
        }
        let distinct: HashSet<_> = beam_indices.iter().collect();
        if distinct.len() != beam_indices.len() {
            return invalid("beam indices must be distinct");
        }
        let beams = beam_indices
            .iter()
            .map(|&(t1, t2)| generate_dft_beam(dims, oversampling, t1, t2))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dims,
            oversampling,
            beam_indices,
            beams,
        })
    }

    /// Beams per polarization.
    pub fn l(&self) -> usize {
        self.beams.len()
    }

    pub fn dims(&self) -> AntennaDims {
        self.dims
    }

    pub fn oversampling(&self) -> Oversampling {
        self.oversampling
    }

    pub fn beam_indices(&self) -> &[(usize, usize)] {
        &self.beam_indices
    }

    pub fn beams(&self) -> &[Vec<Complex64>] {
        &self.beams
    }
}

/// Co-phasing alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PskConstellation {
    Qpsk,
    Psk8,
}

impl PskConstellation {
    pub fn order(self) -> usize {
        match self {
            PskConstellation::Qpsk => 4,
            PskConstellation::Psk8 => 8,
        }
    }

    pub fn symbol(self, index: usize) -> Complex64 {
        let m = self.order();
        Complex64::from_polar(1.0, 2.0 * PI * (index % m) as f64 / m as f64)
    }

    /// Whether `c` is (to 1e-12) a point of this constellation.
    pub fn contains(self, c: Complex64) -> bool {
        (0..self.order()).any(|k| (c - self.symbol(k)).norm() <= UNIT_TOL)
    }
}

/// `(polarization, physical beam)` of logical beam `i` in a layer with `l`
/// beams per polarization.
pub fn logical_to_physical(i: usize, l: usize) -> (usize, usize) {
    (i / l, i % l)
}

/// Amplitude and phase coefficients of one layer, in logical-beam order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerCoefficients {
    l: usize,
    constellation: PskConstellation,
    wb_amp: Vec<f64>,
    sb_amp: Vec<Vec<f64>>,
    phases: Vec<Vec<Complex64>>,
}

impl LayerCoefficients {
    /// `sb_amp[s]` and `phases[s]` hold the `2L` values for subband `s`.
    pub fn new(
        l: usize,
        constellation: PskConstellation,
        wb_amp: Vec<f64>,
        sb_amp: Vec<Vec<f64>>,
        phases: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let logical = 2 * l;
        if wb_amp.len() != logical {
            return invalid(format!(
                "expected {logical} wideband amplitudes, got {}",
                wb_amp.len()
            ));
        }
        if sb_amp.len() != phases.len() {
            return invalid("subband amplitude and phase counts differ");
        }
        if sb_amp.is_empty() {
            return invalid("no subbands");
        }
        let amplitudes_ok = wb_amp
            .iter()
            .chain(sb_amp.iter().flatten())
            .all(|a| a.is_finite() && *a >= 0.0);
        if !amplitudes_ok {
            return invalid("amplitudes must be finite and non-negative");
        }
        for (s, (a, p)) in sb_amp.iter().zip(&phases).enumerate() {
            if a.len() != logical || p.len() != logical {
                return invalid(format!("subband {s} does not carry {logical} coefficients"));
            }
            if let Some(c) = p.iter().find(|c| !constellation.contains(**c)) {
                return invalid(format!("phase {c} is not a {constellation:?} symbol"));
            }
        }
        Ok(Self {
            l,
            constellation,
            wb_amp,
            sb_amp,
            phases,
        })
    }

    /// Same as [`LayerCoefficients::new`] with phases given as symbol indices.
    pub fn from_phase_indices(
        l: usize,
        constellation: PskConstellation,
        wb_amp: Vec<f64>,
        sb_amp: Vec<Vec<f64>>,
        phase_indices: &[Vec<usize>],
    ) -> Result<Self> {
        let phases = phase_indices
            .iter()
            .map(|row| row.iter().map(|&k| constellation.symbol(k)).collect())
            .collect();
        Self::new(l, constellation, wb_amp, sb_amp, phases)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn constellation(&self) -> PskConstellation {
        self.constellation
    }

    pub fn subbands(&self) -> usize {
        self.sb_amp.len()
    }

    pub fn wb_amp(&self) -> &[f64] {
        &self.wb_amp
    }

    pub fn sb_amp(&self) -> &[Vec<f64>] {
        &self.sb_amp
    }

    pub fn phases(&self) -> &[Vec<Complex64>] {
        &self.phases
    }
}

/// Unnormalized layer vector `[w_0; w_1]` for one subband, where
/// `w_r = Σ_i beam_i · wb[rL+i] · sb[rL+i] · phase[rL+i]`.
pub fn assemble_layer(
    beams: &BeamSet,
    coeffs: &LayerCoefficients,
    subband: usize,
) -> Result<Vec<Complex64>> {
    let l = beams.l();
    if coeffs.l() != l {
        return invalid(format!(
            "coefficients are for L = {}, beams have L = {l}",
            coeffs.l()
        ));
    }
    if subband >= coeffs.subbands() {
        return invalid(format!(
            "subband {subband} out of range 0..{}",
            coeffs.subbands()
        ));
    }
    let ports = beams.dims().ports();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * ports];
    for i in 0..2 * l {
        let (pol, b) = logical_to_physical(i, l);
        let weight = coeffs.phases[subband][i] * (coeffs.wb_amp[i] * coeffs.sb_amp[subband][i]);
        let block = &mut out[pol * ports..(pol + 1) * ports];
        for (dst, src) in block.iter_mut().zip(&beams.beams()[b]) {
            *dst += src * weight;
        }
    }
    Ok(out)
}

/// Normalized precoder of rank 1 or 2.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderMatrix {
    columns: Vec<Vec<Complex64>>,
}

impl PrecoderMatrix {
    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.columns
    }

    /// Target norm of every column for this rank.
    pub fn column_norm(rank: usize) -> f64 {
        1.0 / (rank as f64).sqrt()
    }
}

pub fn column_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Scales each layer vector to norm 1 (rank 1) or 1/√2 (rank 2).
pub fn assemble_precoder(layers: Vec<Vec<Complex64>>, rank: usize) -> Result<PrecoderMatrix> {
    if !(1..=2).contains(&rank) {
        return invalid(format!("rank {rank} not supported (1 or 2 layers)"));
    }
    if layers.len() != rank {
        return invalid(format!(
            "rank {rank} needs {rank} layer vectors, got {}",
            layers.len()
        ));
    }
    if layers.iter().any(|c| c.len() != layers[0].len()) {
        return invalid("layer vectors differ in length");
    }
    let target = PrecoderMatrix::column_norm(rank);
    let columns = layers
        .into_iter()
        .map(|col| {
            let norm = column_norm(&col);
            if !(norm.is_finite() && norm > 0.0) {
                return invalid("cannot normalize a zero layer vector");
            }
            let scale = target / norm;
            Ok(col.into_iter().map(|c| c * scale).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PrecoderMatrix { columns })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackMode {
    WbOnly,
    JointWbAndSb,
}

/// Amplitude indicators of one layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedFeedback {
    /// 3-bit wideband index per logical beam.
    pub k1: Vec<u8>,
    /// `k2[i][s]`: 1-bit subband index of logical beam `i` at subband `s`.
    /// Empty in wideband-only mode.
    pub k2: Vec<Vec<u8>>,
    pub mode: FeedbackMode,
}

impl QuantizedFeedback {
    pub fn new(k1: Vec<u8>, k2: Vec<Vec<u8>>, mode: FeedbackMode) -> Result<Self> {
        if k1.iter().any(|&k| k > 7) {
            return invalid("wideband index outside 0..=7");
        }
        if k2.iter().flatten().any(|&k| k > 1) {
            return invalid("subband index outside {0, 1}");
        }
        match mode {
            FeedbackMode::WbOnly if !k2.is_empty() => {
                invalid("wideband-only feedback carries no subband indices")
            }
            FeedbackMode::JointWbAndSb if k2.len() != k1.len() => {
                invalid("one subband index row is required per logical beam")
            }
            _ => Ok(Self { k1, k2, mode }),
        }
    }
}

/// Feedback settings besides the mode and estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FeedbackConfig {
    pub dequantizer: WbDequantizer,
}

impl FeedbackConfig {
    pub fn db(&self) -> DbConvention {
        self.dequantizer.db
    }
}

/// Feedback plus what the receiver needs to rebuild amplitudes from it.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackReport {
    pub feedback: QuantizedFeedback,
    pub grid: WbLevelGrid,
    /// Unquantized wideband amplitude chosen per logical beam.
    pub wb_amplitudes: Vec<f64>,
    pub config: FeedbackConfig,
}

impl FeedbackReport {
    /// Linear wideband amplitude signalled for each logical beam.
    pub fn reconstructed_wb(&self) -> Result<Vec<f64>> {
        self.feedback
            .k1
            .iter()
            .map(|&k| self.config.dequantizer.amplitude(&self.grid, k))
            .collect()
    }

    /// Subband factors laid out per subband (`[s][i]`), as consumed by
    /// [`LayerCoefficients`]. All ones in wideband-only mode.
    pub fn reconstructed_sb(&self, subbands: usize) -> Vec<Vec<f64>> {
        let beams = self.feedback.k1.len();
        (0..subbands)
            .map(|s| {
                (0..beams)
                    .map(|i| match self.feedback.mode {
                        FeedbackMode::WbOnly => SB_HIGH,
                        FeedbackMode::JointWbAndSb => {
                            if self.feedback.k2[i][s] == 1 {
                                SB_HIGH
                            } else {
                                SB_LOW
                            }
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Amplitude feedback for one layer from each logical beam's subband
/// amplitudes, with the default dB convention.
pub fn compute_feedback(
    per_beam: &[SubbandAmplitudeVector],
    mode: FeedbackMode,
    wb_method: Method,
) -> Result<QuantizedFeedback> {
    compute_feedback_with(per_beam, mode, wb_method, FeedbackConfig::default()).map(|r| r.feedback)
}

pub fn compute_feedback_with(
    per_beam: &[SubbandAmplitudeVector],
    mode: FeedbackMode,
    wb_method: Method,
    config: FeedbackConfig,
) -> Result<FeedbackReport> {
    let Some(first) = per_beam.first() else {
        return invalid("no logical beams");
    };
    if per_beam.iter().any(|v| v.len() != first.len()) {
        return invalid("logical beams report different subband counts");
    }

    let estimates = per_beam
        .iter()
        .map(|v| evaluate_estimator(v, wb_method))
        .collect::<Result<Vec<_>>>()?;
    let wb_amplitudes: Vec<f64> = estimates.iter().map(|e| e.wb_amplitude).collect();
    let wb_db: Vec<f64> = wb_amplitudes
        .iter()
        .map(|&w| config.db().to_db(w))
        .collect();
    let grid = build_wb_grid(&wb_db)?;
    let k1 = wb_db
        .iter()
        .map(|&p| quantize_wb_index(p, &grid))
        .collect::<Result<Vec<_>>>()?;
    let k2 = match mode {
        FeedbackMode::WbOnly => Vec::new(),
        FeedbackMode::JointWbAndSb => estimates
            .iter()
            .map(|e| e.r_vector.iter().map(|&r| sb_index(r)).collect())
            .collect(),
    };
    Ok(FeedbackReport {
        feedback: QuantizedFeedback::new(k1, k2, mode)?,
        grid,
        wb_amplitudes,
        config,
    })
}
