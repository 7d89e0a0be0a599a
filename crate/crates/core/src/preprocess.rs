//! Normalization, low-pass filtering, and window slicing.
//!
//! Each channel is min-max normalized to [0, 1] over the whole drive, then
//! low-pass filtered with a 5th-order Butterworth at its per-signal cutoff
//! (GSR 1 Hz, respiration 10 Hz, ECG 40 Hz), and finally sliced per section
//! into 100 s windows starting every 50 s. The normalize-then-filter order
//! follows the pipeline's stage ordering.

pub mod butterworth;

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{ChannelKind, DrivingSituation, SectionAnnotation, SignalRecord};

/// How the Butterworth filter is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterPass {
    /// Forward-backward; squares the magnitude response, cancels phase.
    ZeroPhase,
    /// Single forward pass.
    Single,
}

impl FromStr for FilterPass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero-phase" => Ok(FilterPass::ZeroPhase),
            "single" => Ok(FilterPass::Single),
            other => Err(format!("unknown filter pass `{other}` (zero-phase|single)")),
        }
    }
}

impl FilterPass {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterPass::ZeroPhase => "zero-phase",
            FilterPass::Single => "single",
        }
    }
}

/// Butterworth specification for one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub order: usize,
    pub cutoff_hz: f64,
    pub sample_rate_hz: f64,
}

impl FilterSpec {
    /// A cutoff at or above Nyquist cannot be realized; the signal passes
    /// through unchanged (with a warning at the call site). Unavoidable on
    /// low-rate distributions of the dataset, e.g. a 40 Hz ECG cutoff on
    /// 15.5 Hz samples.
    pub fn is_passthrough(&self) -> bool {
        self.cutoff_hz >= self.sample_rate_hz / 2.0
    }
}

/// Preprocessing parameters with the pipeline defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub filter_order: usize,
    pub cutoff_ecg_hz: f64,
    pub cutoff_resp_hz: f64,
    pub cutoff_gsr_hz: f64,
    pub window_length_s: f64,
    pub window_hop_s: f64,
    pub filter_pass: FilterPass,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            filter_order: 5,
            cutoff_ecg_hz: 40.0,
            cutoff_resp_hz: 10.0,
            cutoff_gsr_hz: 1.0,
            window_length_s: 100.0,
            window_hop_s: 50.0,
            filter_pass: FilterPass::ZeroPhase,
        }
    }
}

impl PreprocessConfig {
    pub fn filter_spec(&self, kind: ChannelKind, sample_rate_hz: f64) -> FilterSpec {
        let cutoff_hz = match kind {
            ChannelKind::Ecg => self.cutoff_ecg_hz,
            ChannelKind::Respiration => self.cutoff_resp_hz,
            ChannelKind::HandGsr | ChannelKind::FootGsr => self.cutoff_gsr_hz,
        };
        FilterSpec {
            order: self.filter_order,
            cutoff_hz,
            sample_rate_hz,
        }
    }
}

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("constant signal (max equals min): dead sensor?")]
    ConstantSignal,
    #[error("signal of {len} samples is too short for an order-{order} filter (needs > {min})")]
    TooShortForFilter { len: usize, order: usize, min: usize },
}

/// Affinely map a signal onto [0, 1].
pub fn min_max_normalize(signal: &[f64]) -> Result<Vec<f64>, PreprocessError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in signal {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if signal.len() < 2 || !(hi > lo) {
        return Err(PreprocessError::ConstantSignal);
    }
    let span = hi - lo;
    Ok(signal.iter().map(|&v| (v - lo) / span).collect())
}

/// Result of filtering one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub samples: Vec<f64>,
    /// True when the cutoff was at or above Nyquist and the signal was
    /// returned unchanged.
    pub passed_through: bool,
}

/// Low-pass a signal per `spec`. Pass-through specs (cutoff at or above
/// Nyquist) return the input unchanged with the flag set.
pub fn butterworth_lowpass(
    signal: &[f64],
    spec: &FilterSpec,
    pass: FilterPass,
) -> Result<FilterOutcome, PreprocessError> {
    let min = 6 * spec.order;
    if signal.len() <= min {
        return Err(PreprocessError::TooShortForFilter {
            len: signal.len(),
            order: spec.order,
            min,
        });
    }
    if spec.is_passthrough() {
        return Ok(FilterOutcome {
            samples: signal.to_vec(),
            passed_through: true,
        });
    }
    let coeffs = butterworth::design_lowpass(spec.order, spec.cutoff_hz, spec.sample_rate_hz);
    let samples = match pass {
        FilterPass::ZeroPhase => butterworth::zero_phase(&coeffs, signal),
        FilterPass::Single => butterworth::forward(&coeffs, signal),
    };
    Ok(FilterOutcome {
        samples,
        passed_through: false,
    })
}

/// Normalize and filter every channel of a record.
///
/// Returns the processed record plus the channels whose filter was skipped
/// as pass-through (cutoff at or above Nyquist).
pub fn preprocess_record(
    record: &SignalRecord,
    config: &PreprocessConfig,
) -> Result<(SignalRecord, Vec<ChannelKind>), PreprocessError> {
    let mut channels = BTreeMap::new();
    let mut passthrough = Vec::new();
    for (&kind, samples) in &record.channels {
        let normalized = min_max_normalize(samples)?;
        let spec = config.filter_spec(kind, record.sample_rate_hz);
        let outcome = butterworth_lowpass(&normalized, &spec, config.filter_pass)?;
        if outcome.passed_through {
            log::warn!(
                "drive {}: {} cutoff {} Hz >= Nyquist ({} Hz); filter skipped",
                record.drive_id,
                kind,
                spec.cutoff_hz,
                record.sample_rate_hz / 2.0
            );
            passthrough.push(kind);
        }
        channels.insert(kind, outcome.samples);
    }
    Ok((
        SignalRecord {
            drive_id: record.drive_id.clone(),
            sample_rate_hz: record.sample_rate_hz,
            channels,
        },
        passthrough,
    ))
}

/// A 100 s slice of all channels, fully inside one section.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub drive_id: String,
    pub section_index: usize,
    pub situation: DrivingSituation,
    pub start_s: f64,
    pub end_s: f64,
    pub samples: BTreeMap<ChannelKind, Vec<f64>>,
}

impl Window {
    pub fn channel(&self, kind: ChannelKind) -> &[f64] {
        self.samples
            .get(&kind)
            .map(Vec::as_slice)
            .unwrap_or_default()
    }
}

/// Nearest sample index at or after the given time, tolerant of float fuzz
/// from second-to-sample conversion.
fn sample_index(time_s: f64, rate_hz: f64) -> usize {
    let exact = time_s * rate_hz;
    let rounded = exact.round();
    if (exact - rounded).abs() < 1e-6 {
        rounded as usize
    } else {
        exact.ceil() as usize
    }
}

/// Slice a preprocessed record into per-section sliding windows.
///
/// Windows are anchored to each section's start and advance by the hop
/// while the full window length still fits inside the section, so no
/// window ever straddles a boundary. A section of `L` seconds yields
/// `floor((L - window) / hop) + 1` windows.
pub fn slice_windows(
    record: &SignalRecord,
    annotation: &SectionAnnotation,
    config: &PreprocessConfig,
) -> Vec<Window> {
    let rate = record.sample_rate_hz;
    let window_len = (config.window_length_s * rate).floor() as usize;
    let record_len = record.len();
    let mut windows = Vec::new();

    for (section_index, section) in annotation.sections.iter().enumerate() {
        let mut offset = 0usize;
        loop {
            let start_s = section.start_s + offset as f64 * config.window_hop_s;
            if start_s + config.window_length_s > section.end_s + 1e-9 {
                break;
            }
            let start = sample_index(start_s, rate);
            if start + window_len > record_len {
                break;
            }
            let samples: BTreeMap<ChannelKind, Vec<f64>> = record
                .channels
                .iter()
                .map(|(&kind, data)| (kind, data[start..start + window_len].to_vec()))
                .collect();
            windows.push(Window {
                drive_id: record.drive_id.clone(),
                section_index,
                situation: section.situation,
                start_s,
                end_s: start_s + config.window_length_s,
                samples,
            });
            offset += 1;
        }
    }
    windows
}
