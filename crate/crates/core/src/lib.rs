//! Prediction of a driver's upcoming stress class from physiological signals.
//!
//! The pipeline runs in five stages, each a module of this crate:
//!
//! 1. [`ingest`] — load converted drive records (CSV) and section
//!    annotations, validate, and pair them.
//! 2. [`preprocess`] — min-max normalize each channel, low-pass it with a
//!    5th-order Butterworth filter, and slice annotated sections into
//!    100 s windows with 50 s overlap.
//! 3. [`features`] — 42 per-window features: 7 per GSR site, 6
//!    respiration, 22 ECG (heart-rate / HRV time and frequency domain).
//! 4. [`dataset`] — expand the last `n` windows of every section into a
//!    252-value sample, attach the *next* section's stress class as the
//!    label, drop upcoming-rest samples, and build leave-one-subject-out
//!    folds.
//! 5. [`forest`] / [`eval`] — fit a 100-tree Gini random forest per fold
//!    and report accuracy, precision, recall, and F1 for each tested `n`.
//!
//! [`synth`] generates planted-separation synthetic drives for self-tests
//! and benchmarks; [`selftest`] bundles the built-in oracle suites.
//!
//! With the default `parallel` feature, tree training and per-drive
//! extraction fan out over rayon; the sequential fallback produces
//! bit-identical results.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod ingest;
pub mod preprocess;
pub mod selftest;
pub mod stats;
pub mod synth;

pub use error::PipelineError;
