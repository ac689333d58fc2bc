//! Evaluation toolkit for models that estimate the probability of a binary
//! event.
//!
//! The crate covers five performance domains (discrimination, calibration,
//! overall, classification and clinical utility), the curves that go with
//! them, logistic recalibration, a percentile bootstrap engine, and a
//! simulation lab that checks which measures are proper.
//!
//! ```
//! use riskbench_core::{metrics, PredictionSample};
//!
//! let sample = PredictionSample::new(vec![0.2, 0.8, 0.6, 0.4], vec![false, true, true, false])?;
//! assert_eq!(metrics::auroc(&sample)?, 1.0);
//! # Ok::<(), riskbench_core::Error>(())
//! ```

pub mod calibration;
pub mod curves;
pub mod data;
pub mod error;
pub mod lab;
pub mod measures;
pub mod metrics;
pub mod report;
pub mod resampling;
pub mod rng;
mod util;

pub use data::{
    ingest_csv, read_csv, validate_for_measure, write_csv, ClampPolicy, CostSpec, CsvSchema,
    PartialAucBand, PredictionRecord, PredictionSample, Threshold, Verdict,
};
pub use error::{Error, Result};
pub use measures::{Domain, Focus, Guidance, MeasureId, Properness};
