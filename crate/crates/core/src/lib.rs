//! Wideband and subband amplitude quantization for Type-2 codebook CSI
//! feedback.
//!
//! * [`amplitude`]: the 3-bit wideband grid, the 1-bit subband quantizer and
//!   the RNSQE error metric.
//! * [`estimators`]: linear-average, 6/5-scaled and error-optimal wideband
//!   amplitude estimators, plus a brute-force reference.
//! * [`codebook`]: DFT beams, layer/precoder assembly and the wideband-only or
//!   joint wideband/subband feedback pipeline.
//! * [`harness`]: Monte-Carlo sweeps over frequency selectivity with CSV
//!   output.
//!
//! ```
//! use type2_amp::{evaluate_estimator, Method, SubbandAmplitudeVector};
//!
//! let x = SubbandAmplitudeVector::new(vec![0.5, 1.0]).unwrap();
//! let linear = evaluate_estimator(&x, Method::Linear).unwrap();
//! let optimal = evaluate_estimator(&x, Method::Optimal).unwrap();
//! assert!((linear.rnsqe - 0.25).abs() < 1e-12);
//! assert_eq!(optimal.wb_amplitude, 1.0);
//! assert_eq!(optimal.rnsqe, 0.0);
//! ```

pub mod amplitude;
pub mod cli;
pub mod codebook;
mod error;
pub mod estimators;
pub mod exec;
pub mod harness;

pub use amplitude::{EstimatorResult, SubbandAmplitudeVector, WbLevelGrid};
pub use error::{Error, Result};
pub use estimators::{evaluate_estimator, Method};
pub use exec::Execution;
