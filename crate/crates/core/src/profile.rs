//! Reference learning: per-feature binning, the full-reference histogram,
//! and an empirical null sample of divergences between randomly placed
//! reference windows and the full reference.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{floor_to, format_timestamp, Dataset, Timestamp};
use crate::drift::stats::js_divergence_slices;
use crate::duration::IsoDuration;
use crate::error::{Error, Result};
use crate::histogram::{build_binning, BinningSpec, Histogram, HistogramData};
use crate::schema::FeatureSchema;

const DAY_MS: i64 = 86_400_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    pub bin_count: usize,
    pub window_length: IsoDuration,
    pub window_count: usize,
    pub seed: u64,
}

impl Default for ProfileParams {
    fn default() -> Self {
        Self {
            bin_count: 10,
            window_length: IsoDuration::ONE_DAY,
            window_count: 100,
            seed: 42,
        }
    }
}

/// Half-open `[start, end)` interval in epoch milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl Interval {
    /// Row range of `timestamps` (sorted) inside this interval.
    pub fn rows(&self, timestamps: &[Timestamp]) -> std::ops::Range<usize> {
        let lo = timestamps.partition_point(|&t| t < self.start);
        let hi = timestamps.partition_point(|&t| t < self.end);
        lo..hi
    }
}

/// Covered reference span. Its ends snap outward to a grid of
/// `min(window_length, 1 day)`, so one calendar day of rows spans one day.
pub fn reference_span(timestamps: &[Timestamp], window_length: IsoDuration) -> Option<Interval> {
    let (&first, &last) = (timestamps.first()?, timestamps.last()?);
    let grid = window_length.millis().min(DAY_MS);
    Some(Interval {
        start: floor_to(first, grid),
        end: floor_to(last, grid) + grid,
    })
}

/// Draws `count` window starts uniformly, with replacement, from
/// `[span_start, span_end - window_length]` and returns the windows sorted by
/// start.
pub fn sample_reference_windows(
    timestamps: &[Timestamp],
    window_length: IsoDuration,
    count: usize,
    seed: u64,
) -> Result<Vec<Interval>> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!(
            "window count must be at least 2, got {count}"
        )));
    }
    let span = reference_span(timestamps, window_length).ok_or(Error::EmptyDataset)?;
    let len = window_length.millis();
    if span.end - span.start < len {
        return Err(Error::ReferenceSpanTooShort {
            span: format!("{} .. {}", format_timestamp(span.start), format_timestamp(span.end)),
            window: window_length.to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last_start = span.end - len;
    let mut windows: Vec<Interval> = (0..count)
        .map(|_| {
            let start = rng.random_range(span.start..=last_start);
            Interval {
                start,
                end: start + len,
            }
        })
        .collect();
    windows.sort_by_key(|w| w.start);
    Ok(windows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureProfile {
    pub name: String,
    pub binning: Arc<BinningSpec>,
    pub reference_histogram: Histogram,
    pub null_sample: Vec<f64>,
}

/// Output of reference learning. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceProfile {
    pub schema: FeatureSchema,
    pub params: ProfileParams,
    pub features: Vec<FeatureProfile>,
}

impl ReferenceProfile {
    pub fn feature(&self, name: &str) -> Option<&FeatureProfile> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&ProfileDocument::from(self))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ProfileDocument>(text)?.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Learns binnings, reference histograms, and null samples for every schema
/// feature. Features are processed in parallel; output order follows the
/// schema.
pub fn learn_reference(dataset: &Dataset, schema: &FeatureSchema, params: ProfileParams) -> Result<ReferenceProfile> {
    schema.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let missing = dataset.missing_features(schema);
    if !missing.is_empty() {
        return Err(Error::MissingColumns(missing));
    }
    let windows = sample_reference_windows(
        dataset.timestamps(),
        params.window_length,
        params.window_count,
        params.seed,
    )?;
    let ranges: Vec<_> = windows.iter().map(|w| w.rows(dataset.timestamps())).collect();

    let features = schema
        .features
        .par_iter()
        .map(|f| {
            let column = dataset.column(&f.name).expect("checked above");
            let binning = Arc::new(build_binning(column, params.bin_count)?);
            let slots = binning.assign_slots(column)?;
            let reference_histogram = Histogram::from_slots(Arc::clone(&binning), &slots);
            let mut counts = vec![0u64; binning.slots() + 1];
            let null_sample = ranges
                .iter()
                .map(|r| {
                    if r.is_empty() {
                        return 0.0;
                    }
                    counts.iter_mut().for_each(|c| *c = 0);
                    for &s in &slots[r.clone()] {
                        counts[s as usize] += 1;
                    }
                    let n = r.len() as f64;
                    js_divergence_slices(counts.iter().map(|&c| c as f64 / n), reference_histogram.coordinates())
                })
                .collect();
            Ok(FeatureProfile {
                name: f.name.clone(),
                binning,
                reference_histogram,
                null_sample,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ReferenceProfile {
        schema: schema.clone(),
        params,
        features,
    })
}

#[derive(Serialize, Deserialize)]
struct ProfileDocument {
    schema: FeatureSchema,
    window_length: IsoDuration,
    window_count: usize,
    seed: u64,
    bin_count: usize,
    features: Vec<FeatureDocument>,
}

#[derive(Serialize, Deserialize)]
struct FeatureDocument {
    name: String,
    binning: BinningSpec,
    reference_histogram: HistogramData,
    null_sample: Vec<f64>,
}

impl From<&ReferenceProfile> for ProfileDocument {
    fn from(p: &ReferenceProfile) -> Self {
        Self {
            schema: p.schema.clone(),
            window_length: p.params.window_length,
            window_count: p.params.window_count,
            seed: p.params.seed,
            bin_count: p.params.bin_count,
            features: p
                .features
                .iter()
                .map(|f| FeatureDocument {
                    name: f.name.clone(),
                    binning: (*f.binning).clone(),
                    reference_histogram: f.reference_histogram.to_data(),
                    null_sample: f.null_sample.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ProfileDocument> for ReferenceProfile {
    type Error = Error;

    fn try_from(doc: ProfileDocument) -> Result<Self> {
        doc.schema.validate()?;
        let names: Vec<&str> = doc.features.iter().map(|f| f.name.as_str()).collect();
        if !names.iter().copied().eq(doc.schema.names()) {
            return Err(Error::InvalidSchema(
                "profile features do not match the embedded schema".into(),
            ));
        }
        let features = doc
            .features
            .into_iter()
            .zip(&doc.schema.features)
            .map(|(f, spec)| {
                if f.binning.kind() != spec.kind {
                    return Err(Error::InvalidSchema(format!("binning kind mismatch for {:?}", f.name)));
                }
                if f.null_sample.len() != doc.window_count {
                    return Err(Error::InvalidSchema(format!(
                        "null sample of {:?} has {} entries, expected {}",
                        f.name,
                        f.null_sample.len(),
                        doc.window_count
                    )));
                }
                let binning = Arc::new(f.binning);
                Ok(FeatureProfile {
                    name: f.name,
                    reference_histogram: Histogram::from_data(Arc::clone(&binning), f.reference_histogram)?,
                    binning,
                    null_sample: f.null_sample,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReferenceProfile {
            params: ProfileParams {
                bin_count: doc.bin_count,
                window_length: doc.window_length,
                window_count: doc.window_count,
                seed: doc.seed,
            },
            schema: doc.schema,
            features,
        })
    }
}
