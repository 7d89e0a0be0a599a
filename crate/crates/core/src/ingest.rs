//! Drive-record and annotation ingest.
//!
//! A drive arrives as two files: a record CSV holding the uniformly sampled
//! waveforms (`time_s,ecg,hand_gsr,foot_gsr,resp`, extra columns ignored) and
//! a line-oriented annotation sidecar giving the section boundaries. Both are
//! validated here so the rest of the pipeline can assume clean inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum record duration in seconds (two full windows).
pub const MIN_RECORD_S: f64 = 200.0;

/// Minimum section duration in seconds (one full window).
pub const MIN_SECTION_S: f64 = 100.0;

/// Tolerance on the sample-time grid, in seconds.
pub const TIME_STEP_TOL_S: f64 = 1e-6;

/// The four channels the pipeline consumes. Any other column in a record
/// file (EMG, precomputed HR, markers) is dropped at load time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    Ecg,
    HandGsr,
    FootGsr,
    Respiration,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::Ecg,
        ChannelKind::HandGsr,
        ChannelKind::FootGsr,
        ChannelKind::Respiration,
    ];

    /// Column name of this channel in a record CSV.
    pub fn column_name(self) -> &'static str {
        match self {
            ChannelKind::Ecg => "ecg",
            ChannelKind::HandGsr => "hand_gsr",
            ChannelKind::FootGsr => "foot_gsr",
            ChannelKind::Respiration => "resp",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column_name())
    }
}

/// Driving situation a section was recorded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DrivingSituation {
    Rest,
    City,
    Highway,
}

impl DrivingSituation {
    pub fn as_str(self) -> &'static str {
        match self {
            DrivingSituation::Rest => "Rest",
            DrivingSituation::City => "City",
            DrivingSituation::Highway => "Highway",
        }
    }
}

impl fmt::Display for DrivingSituation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DrivingSituation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Rest" => Ok(DrivingSituation::Rest),
            "City" => Ok(DrivingSituation::City),
            "Highway" => Ok(DrivingSituation::Highway),
            other => Err(format!("unknown driving situation `{other}`")),
        }
    }
}

/// Stress class of a driving situation. The map is fixed: resting drivers
/// are under low stress, highway driving is medium, city driving is high.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StressLabel {
    Low,
    Medium,
    High,
}

impl From<DrivingSituation> for StressLabel {
    fn from(situation: DrivingSituation) -> Self {
        match situation {
            DrivingSituation::Rest => StressLabel::Low,
            DrivingSituation::Highway => StressLabel::Medium,
            DrivingSituation::City => StressLabel::High,
        }
    }
}

/// One drive's uniformly sampled multi-channel waveforms.
///
/// All four participating channels are present and equally long; samples are
/// finite. Both facts are established at load time and relied on downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRecord {
    pub drive_id: String,
    pub sample_rate_hz: f64,
    pub channels: BTreeMap<ChannelKind, Vec<f64>>,
}

impl SignalRecord {
    /// Number of samples per channel.
    pub fn len(&self) -> usize {
        self.channels
            .values()
            .next()
            .map(Vec::len)
            .unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Record duration in seconds.
    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }

    pub fn channel(&self, kind: ChannelKind) -> &[f64] {
        self.channels
            .get(&kind)
            .map(Vec::as_slice)
            .unwrap_or_default()
    }
}

/// One annotated driving section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub start_s: f64,
    pub end_s: f64,
    pub situation: DrivingSituation,
}

impl Section {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// Ordered, contiguous section boundaries for one drive.
///
/// The protocol shape is enforced: the drive begins and ends with a Rest
/// section, interior sections alternate between City and Highway, and every
/// section is at least [`MIN_SECTION_S`] long.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionAnnotation {
    pub drive_id: String,
    pub sections: Vec<Section>,
}

impl SectionAnnotation {
    pub fn duration_s(&self) -> f64 {
        self.sections.last().map(|s| s.end_s).unwrap_or_default()
    }
}

/// One line of a run manifest: `<drive_id>,<record_csv_path>,<annotation_path>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub drive_id: String,
    pub record_path: PathBuf,
    pub annotation_path: PathBuf,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("record is missing the `{0}` channel column")]
    MissingChannel(ChannelKind),
    #[error("record has no `time_s` column")]
    MissingTimeColumn,
    #[error("non-finite sample in column `{column}` at data row {row}")]
    NonFiniteSample { column: String, row: usize },
    #[error("time grid broken at data row {row}: step {step_s} s, expected {expected_s} s")]
    IrregularTimeGrid {
        row: usize,
        step_s: f64,
        expected_s: f64,
    },
    #[error("record too short: {samples} samples < {required} ({MIN_RECORD_S} s at {rate_hz} Hz)")]
    TooShort {
        samples: usize,
        required: usize,
        rate_hz: f64,
    },
    #[error("sample rate must be positive, got {0}")]
    BadSampleRate(f64),
    #[error("cannot parse `{text}` at line {line}: {reason}")]
    Parse {
        line: usize,
        text: String,
        reason: String,
    },
    #[error("sections not contiguous at index {index}: previous ends {prev_end_s} s, next starts {next_start_s} s")]
    NonContiguous {
        index: usize,
        prev_end_s: f64,
        next_start_s: f64,
    },
    #[error("section pattern broken at index {index}: expected Rest, alternating City/Highway, Rest")]
    BadAlternation { index: usize },
    #[error("section {index} lasts {length_s} s, below the {MIN_SECTION_S} s minimum")]
    SectionTooShort { index: usize, length_s: f64 },
    #[error("drive `{0}` has no matching counterpart")]
    UnmatchedDrive(String),
    #[error("drive `{drive_id}`: record covers {record_s} s but annotation ends at {annotation_s} s")]
    DurationMismatch {
        drive_id: String,
        record_s: f64,
        annotation_s: f64,
    },
}

fn read_to_string(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load and validate one record CSV.
///
/// The drive id is taken from the file stem; [`load_manifest`] callers
/// typically overwrite it with the manifest's id.
pub fn load_record(path: &Path, sample_rate_hz: f64) -> Result<SignalRecord, IngestError> {
    if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
        return Err(IngestError::BadSampleRate(sample_rate_hz));
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| IngestError::Csv {
            path: path.to_path_buf(),
            source,
        })?;

    let headers = reader
        .headers()
        .map_err(|source| IngestError::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let time_col = find("time_s").ok_or(IngestError::MissingTimeColumn)?;
    let mut channel_cols = Vec::with_capacity(4);
    for kind in ChannelKind::ALL {
        let col = find(kind.column_name()).ok_or(IngestError::MissingChannel(kind))?;
        channel_cols.push((kind, col));
    }

    let expected_step = 1.0 / sample_rate_hz;
    let mut channels: BTreeMap<ChannelKind, Vec<f64>> =
        ChannelKind::ALL.iter().map(|&k| (k, Vec::new())).collect();
    let mut prev_time: Option<f64> = None;

    for (row, result) in reader.records().enumerate() {
        let record = result.map_err(|source| IngestError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_field = |col: usize, name: &str| -> Result<f64, IngestError> {
            let raw = record.get(col).unwrap_or("");
            raw.parse::<f64>().map_err(|e| IngestError::Parse {
                line: row + 2,
                text: format!("{name}={raw}"),
                reason: e.to_string(),
            })
        };

        let t = parse_field(time_col, "time_s")?;
        if !t.is_finite() {
            return Err(IngestError::NonFiniteSample {
                column: "time_s".into(),
                row,
            });
        }
        if let Some(prev) = prev_time {
            let step = t - prev;
            if step <= 0.0 || (step - expected_step).abs() > TIME_STEP_TOL_S {
                return Err(IngestError::IrregularTimeGrid {
                    row,
                    step_s: step,
                    expected_s: expected_step,
                });
            }
        }
        prev_time = Some(t);

        for &(kind, col) in &channel_cols {
            let value = parse_field(col, kind.column_name())?;
            if !value.is_finite() {
                return Err(IngestError::NonFiniteSample {
                    column: kind.column_name().into(),
                    row,
                });
            }
            channels.get_mut(&kind).expect("channel present").push(value);
        }
    }

    let samples = channels[&ChannelKind::Ecg].len();
    let required = (MIN_RECORD_S * sample_rate_hz).ceil() as usize;
    if (samples as f64) + 1e-9 < MIN_RECORD_S * sample_rate_hz {
        return Err(IngestError::TooShort {
            samples,
            required,
            rate_hz: sample_rate_hz,
        });
    }

    let drive_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed".into());
    Ok(SignalRecord {
        drive_id,
        sample_rate_hz,
        channels,
    })
}

/// Write a record back out in the ingest CSV format.
///
/// Floats are printed in shortest round-trip form, so loading the output
/// reproduces every sample bit for bit.
pub fn write_record_csv(record: &SignalRecord, path: &Path) -> Result<(), IngestError> {
    let mut out = String::with_capacity(record.len() * 48);
    out.push_str("time_s,ecg,hand_gsr,foot_gsr,resp\n");
    let step = 1.0 / record.sample_rate_hz;
    for i in 0..record.len() {
        let t = i as f64 * step;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t,
            record.channel(ChannelKind::Ecg)[i],
            record.channel(ChannelKind::HandGsr)[i],
            record.channel(ChannelKind::FootGsr)[i],
            record.channel(ChannelKind::Respiration)[i],
        ));
    }
    fs::write(path, out).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load and validate a section annotation file.
///
/// Format: first line `drive <drive_id>`, then one section per line as
/// `<start_s> <end_s> <Rest|City|Highway>`, whitespace separated.
pub fn load_annotations(path: &Path) -> Result<SectionAnnotation, IngestError> {
    let text = read_to_string(path)?;
    parse_annotations(&text)
}

/// Parse annotation text; see [`load_annotations`] for the format.
pub fn parse_annotations(text: &str) -> Result<SectionAnnotation, IngestError> {
    let mut drive_id: Option<String> = None;
    let mut sections = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |reason: &str| IngestError::Parse {
            line: idx + 1,
            text: line.to_string(),
            reason: reason.to_string(),
        };
        if drive_id.is_none() {
            let rest = line
                .strip_prefix("drive")
                .ok_or_else(|| parse_err("expected header `drive <drive_id>`"))?
                .trim();
            if rest.is_empty() {
                return Err(parse_err("missing drive id"));
            }
            drive_id = Some(rest.to_string());
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = |what: &str| {
            fields
                .next()
                .ok_or_else(|| parse_err(&format!("missing {what}")))
        };
        let start_s: f64 = next("start_s")?
            .parse()
            .map_err(|_| parse_err("bad start_s"))?;
        let end_s: f64 = next("end_s")?.parse().map_err(|_| parse_err("bad end_s"))?;
        let situation: DrivingSituation = next("situation")?
            .parse()
            .map_err(|e: String| parse_err(&e))?;
        sections.push(Section {
            start_s,
            end_s,
            situation,
        });
    }

    let drive_id = drive_id.ok_or(IngestError::Parse {
        line: 0,
        text: String::new(),
        reason: "empty annotation file".into(),
    })?;
    let annotation = SectionAnnotation { drive_id, sections };
    validate_annotation(&annotation)?;
    Ok(annotation)
}

fn validate_annotation(ann: &SectionAnnotation) -> Result<(), IngestError> {
    let sections = &ann.sections;
    if sections.len() < 3 {
        return Err(IngestError::BadAlternation {
            index: sections.len().saturating_sub(1),
        });
    }
    if sections[0].start_s.abs() > TIME_STEP_TOL_S {
        return Err(IngestError::NonContiguous {
            index: 0,
            prev_end_s: 0.0,
            next_start_s: sections[0].start_s,
        });
    }
    for (i, pair) in sections.windows(2).enumerate() {
        if (pair[0].end_s - pair[1].start_s).abs() > TIME_STEP_TOL_S {
            return Err(IngestError::NonContiguous {
                index: i + 1,
                prev_end_s: pair[0].end_s,
                next_start_s: pair[1].start_s,
            });
        }
    }
    for (i, s) in sections.iter().enumerate() {
        if s.duration_s() + TIME_STEP_TOL_S < MIN_SECTION_S {
            return Err(IngestError::SectionTooShort {
                index: i,
                length_s: s.duration_s(),
            });
        }
    }
    // Rest, (City|Highway) alternating, Rest.
    let last = sections.len() - 1;
    for (i, s) in sections.iter().enumerate() {
        let ok = if i == 0 || i == last {
            s.situation == DrivingSituation::Rest
        } else if s.situation == DrivingSituation::Rest {
            false
        } else if i >= 2 && sections[i - 1].situation != DrivingSituation::Rest {
            s.situation != sections[i - 1].situation
        } else {
            true
        };
        if !ok {
            return Err(IngestError::BadAlternation { index: i });
        }
    }
    Ok(())
}

/// Serialize an annotation in the format accepted by [`load_annotations`].
pub fn write_annotations(ann: &SectionAnnotation, path: &Path) -> Result<(), IngestError> {
    let mut out = format!("drive {}\n", ann.drive_id);
    for s in &ann.sections {
        out.push_str(&format!("{} {} {}\n", s.start_s, s.end_s, s.situation));
    }
    fs::write(path, out).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Pair records with annotations by drive id and reject inconsistent drives.
///
/// A drive whose record length and annotation duration disagree by more than
/// one window (100 s) has a recording gap and is rejected.
pub fn validate_drive_set(
    records: Vec<SignalRecord>,
    annotations: Vec<SectionAnnotation>,
) -> Result<Vec<(SignalRecord, SectionAnnotation)>, IngestError> {
    let mut ann_by_id: BTreeMap<String, SectionAnnotation> = BTreeMap::new();
    for ann in annotations {
        ann_by_id.insert(ann.drive_id.clone(), ann);
    }
    let mut pairs = Vec::with_capacity(records.len());
    for record in records {
        let ann = ann_by_id
            .remove(&record.drive_id)
            .ok_or_else(|| IngestError::UnmatchedDrive(record.drive_id.clone()))?;
        let record_s = record.duration_s();
        let annotation_s = ann.duration_s();
        if (record_s - annotation_s).abs() > MIN_SECTION_S {
            return Err(IngestError::DurationMismatch {
                drive_id: record.drive_id.clone(),
                record_s,
                annotation_s,
            });
        }
        pairs.push((record, ann));
    }
    if let Some(orphan) = ann_by_id.into_keys().next() {
        return Err(IngestError::UnmatchedDrive(orphan));
    }
    Ok(pairs)
}

/// Read a run manifest: one `<drive_id>,<record_csv>,<annotation>` line per
/// drive. Relative paths are resolved against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
    let text = read_to_string(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 || parts.iter().any(|p| p.is_empty()) {
            return Err(IngestError::Parse {
                line: idx + 1,
                text: line.to_string(),
                reason: "expected `<drive_id>,<record_csv_path>,<annotation_path>`".into(),
            });
        }
        let resolve = |p: &str| {
            let pb = PathBuf::from(p);
            if pb.is_absolute() {
                pb
            } else {
                base.join(pb)
            }
        };
        entries.push(ManifestEntry {
            drive_id: parts[0].to_string(),
            record_path: resolve(parts[1]),
            annotation_path: resolve(parts[2]),
        });
    }
    Ok(entries)
}

/// Load every drive named by a manifest and validate the set as a whole.
pub fn load_drive_set(
    entries: &[ManifestEntry],
    sample_rate_hz: f64,
) -> Result<Vec<(SignalRecord, SectionAnnotation)>, IngestError> {
    let mut records = Vec::with_capacity(entries.len());
    let mut annotations = Vec::with_capacity(entries.len());
    for entry in entries {
        let mut record = load_record(&entry.record_path, sample_rate_hz)?;
        record.drive_id = entry.drive_id.clone();
        let mut ann = load_annotations(&entry.annotation_path)?;
        ann.drive_id = entry.drive_id.clone();
        records.push(record);
        annotations.push(ann);
    }
    validate_drive_set(records, annotations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn record_csv(rows: usize, rate: f64) -> String {
        let mut s = String::from("time_s,ecg,hand_gsr,foot_gsr,resp,emg\n");
        for i in 0..rows {
            let t = i as f64 / rate;
            s.push_str(&format!(
                "{t},{},{},{},{},0.0\n",
                (i as f64 * 0.01).sin(),
                5.0 + (i as f64 * 0.001).cos(),
                4.0 + (i as f64 * 0.002).cos(),
                0.5 + (i as f64 * 0.02).sin()
            ));
        }
        s
    }

    #[test]
    fn accepts_minimal_length_record() {
        // 3100 rows at 15.5 Hz is exactly 200 s.
        let f = write_temp(&record_csv(3100, 15.5));
        let record = load_record(f.path(), 15.5).unwrap();
        assert_eq!(record.len(), 3100);
        assert_eq!(record.channels.len(), 4);
        assert!(record.channels.values().all(|c| c.len() == 3100));
    }

    #[test]
    fn rejects_record_below_200s() {
        let f = write_temp(&record_csv(3099, 15.5));
        match load_record(f.path(), 15.5) {
            Err(IngestError::TooShort { samples, .. }) => assert_eq!(samples, 3099),
            other => panic!("expected TooShort, got {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_channel() {
        let mut s = String::from("time_s,ecg,hand_gsr,foot_gsr\n");
        for i in 0..3100 {
            s.push_str(&format!("{},0,0,0\n", i as f64 / 15.5));
        }
        let f = write_temp(&s);
        match load_record(f.path(), 15.5) {
            Err(IngestError::MissingChannel(kind)) => {
                assert_eq!(kind, ChannelKind::Respiration)
            }
            other => panic!("expected MissingChannel, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_finite_sample() {
        let mut s = record_csv(3100, 15.5);
        s.push_str("200.0,NaN,1.0,1.0,1.0,0\n");
        let f = write_temp(&s);
        match load_record(f.path(), 15.5) {
            Err(IngestError::NonFiniteSample { column, row }) => {
                assert_eq!(column, "ecg");
                assert_eq!(row, 3100);
            }
            other => panic!("expected NonFiniteSample, got {other:?}"),
        }
    }

    #[test]
    fn rejects_irregular_time_grid() {
        let mut s = String::from("time_s,ecg,hand_gsr,foot_gsr,resp\n");
        for i in 0..3100 {
            let t = if i == 1550 {
                i as f64 / 15.5 + 0.5
            } else {
                i as f64 / 15.5
            };
            s.push_str(&format!("{t},0.1,0.1,0.1,0.1\n"));
        }
        let f = write_temp(&s);
        assert!(matches!(
            load_record(f.path(), 15.5),
            Err(IngestError::IrregularTimeGrid { .. })
        ));
    }

    #[test]
    fn record_roundtrip_is_bit_exact() {
        let f = write_temp(&record_csv(3100, 15.5));
        let record = load_record(f.path(), 15.5).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_record_csv(&record, out.path()).unwrap();
        let mut again = load_record(out.path(), 15.5).unwrap();
        again.drive_id = record.drive_id.clone();
        for kind in ChannelKind::ALL {
            let a = record.channel(kind);
            let b = again.channel(kind);
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits(), "channel {kind}");
            }
        }
    }

    const VALID_ANN: &str = "drive drive05\n\
        0 900 Rest\n900 1800 City\n1800 2700 Highway\n2700 3600 City\n3600 4500 Rest\n";

    #[test]
    fn parses_valid_annotation() {
        let ann = parse_annotations(VALID_ANN).unwrap();
        assert_eq!(ann.drive_id, "drive05");
        assert_eq!(ann.sections.len(), 5);
        assert_eq!(ann.sections[2].situation, DrivingSituation::Highway);
        assert_eq!(ann.duration_s(), 4500.0);
    }

    #[test]
    fn annotation_roundtrip() {
        let ann = parse_annotations(VALID_ANN).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_annotations(&ann, f.path()).unwrap();
        let again = load_annotations(f.path()).unwrap();
        assert_eq!(ann, again);
    }

    #[test]
    fn rejects_short_section() {
        let text = "drive d\n0 900 Rest\n900 960 City\n960 1900 Rest\n";
        match parse_annotations(text) {
            Err(IngestError::SectionTooShort { index, length_s }) => {
                assert_eq!(index, 1);
                assert!((length_s - 60.0).abs() < 1e-9);
            }
            other => panic!("expected SectionTooShort, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_alternation() {
        let text = "drive d\n0 900 Rest\n900 1800 City\n1800 2700 City\n2700 3600 Rest\n";
        assert!(matches!(
            parse_annotations(text),
            Err(IngestError::BadAlternation { index: 2 })
        ));
    }

    #[test]
    fn rejects_interior_rest() {
        let text = "drive d\n0 900 Rest\n900 1800 City\n1800 2700 Rest\n2700 3600 City\n3600 4500 Rest\n";
        assert!(matches!(
            parse_annotations(text),
            Err(IngestError::BadAlternation { index: 2 })
        ));
    }

    #[test]
    fn rejects_non_contiguous() {
        let text = "drive d\n0 900 Rest\n950 1800 City\n1800 2700 Rest\n";
        assert!(matches!(
            parse_annotations(text),
            Err(IngestError::NonContiguous { index: 1, .. })
        ));
    }

    fn dummy_record(drive_id: &str, seconds: f64, rate: f64) -> SignalRecord {
        let n = (seconds * rate) as usize;
        let wave: Vec<f64> = (0..n).map(|i| (i as f64 * 0.01).sin()).collect();
        SignalRecord {
            drive_id: drive_id.into(),
            sample_rate_hz: rate,
            channels: ChannelKind::ALL.iter().map(|&k| (k, wave.clone())).collect(),
        }
    }

    fn dummy_annotation(drive_id: &str, total_s: f64) -> SectionAnnotation {
        let city_end = total_s - 200.0;
        SectionAnnotation {
            drive_id: drive_id.into(),
            sections: vec![
                Section {
                    start_s: 0.0,
                    end_s: 200.0,
                    situation: DrivingSituation::Rest,
                },
                Section {
                    start_s: 200.0,
                    end_s: city_end,
                    situation: DrivingSituation::City,
                },
                Section {
                    start_s: city_end,
                    end_s: total_s,
                    situation: DrivingSituation::Rest,
                },
            ],
        }
    }

    #[test]
    fn pairs_matching_drive_set() {
        let ids = ["d1", "d2", "d3", "d4", "d5", "d6", "d7"];
        let records: Vec<_> = ids.iter().map(|id| dummy_record(id, 700.0, 15.5)).collect();
        let anns: Vec<_> = ids.iter().map(|id| dummy_annotation(id, 700.0)).collect();
        let pairs = validate_drive_set(records, anns).unwrap();
        assert_eq!(pairs.len(), 7);
        for (record, ann) in &pairs {
            assert_eq!(record.drive_id, ann.drive_id);
        }
    }

    #[test]
    fn rejects_duration_mismatch() {
        let records = vec![dummy_record("d1", 2000.0, 15.5)];
        let anns = vec![dummy_annotation("d1", 4500.0)];
        assert!(matches!(
            validate_drive_set(records, anns),
            Err(IngestError::DurationMismatch { .. })
        ));
    }

    #[test]
    fn rejects_unmatched_drive() {
        let records = vec![
            dummy_record("d1", 700.0, 15.5),
            dummy_record("d2", 700.0, 15.5),
        ];
        let anns = vec![dummy_annotation("d1", 700.0)];
        match validate_drive_set(records, anns) {
            Err(IngestError::UnmatchedDrive(id)) => assert_eq!(id, "d2"),
            other => panic!("expected UnmatchedDrive, got {other:?}"),
        }
    }

    #[test]
    fn manifest_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("manifest.csv");
        fs::write(&manifest, "# comment\nd1,records/d1.csv,ann/d1.txt\n").unwrap();
        let entries = load_manifest(&manifest).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].record_path, dir.path().join("records/d1.csv"));
        assert_eq!(entries[0].annotation_path, dir.path().join("ann/d1.txt"));
    }
}
