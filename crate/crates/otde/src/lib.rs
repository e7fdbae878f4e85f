//! Ordinal temporal dictionary ensemble (O-TDE) for time series ordinal
//! classification.
//!
//! The pipeline turns each series into a sparse word-count histogram via
//! sliding windows, a truncated DFT and supervised Information Gain
//! Binning, classifies with 1-NN over histogram intersection, and builds
//! an ensemble whose members are chosen by a Gaussian-process surrogate
//! that predicts leave-one-out MAE for untried configurations.
//!
//! The crate also ships dataset ingestion (`.ts` and CSV formats, equal
//! width / threshold discretisation, financial return windows), ordinal
//! metrics (CCR, MAE, QWK, 1-OFF), and a multi-resample benchmark harness
//! with Wilcoxon signed-rank tests, Holm correction, average-rank tables
//! and critical-difference diagrams.

pub mod classifier;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod metrics;
pub mod sfa;

pub use error::{Error, Result};
