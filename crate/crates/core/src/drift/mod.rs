//! Evaluation of an observation dataset against a reference profile.

pub mod stats;
pub mod view;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{window_iter, Dataset, Timestamp, Window};
use crate::duration::IsoDuration;
use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::profile::{FeatureProfile, ReferenceProfile};

pub use stats::{empirical_p_value, holm_normalize, js_divergence};
pub use view::{cell_color, group_features, sort_features, CellColor, SortMode};

/// Alert threshold (`alpha`) and the upper bound of the highlighted p-value
/// range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawThresholds")]
pub struct Thresholds {
    pub alpha: f64,
    pub analysis_threshold: f64,
}

#[derive(Deserialize)]
struct RawThresholds {
    alpha: f64,
    analysis_threshold: f64,
}

impl TryFrom<RawThresholds> for Thresholds {
    type Error = Error;

    fn try_from(raw: RawThresholds) -> Result<Self> {
        Thresholds::new(raw.alpha, raw.analysis_threshold)
    }
}

impl Thresholds {
    pub fn new(alpha: f64, analysis_threshold: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0 && analysis_threshold > alpha && analysis_threshold.is_finite()) {
            return Err(Error::InvalidThresholds {
                alpha,
                analysis_threshold,
            });
        }
        Ok(Self {
            alpha,
            analysis_threshold,
        })
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            analysis_threshold: 0.25,
        }
    }
}

/// Features × windows grid. Every per-cell array is indexed `[feature][date]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub features: Vec<String>,
    pub dates: Vec<Timestamp>,
    pub divergence: Vec<Vec<f64>>,
    pub raw_p: Vec<Vec<f64>>,
    pub norm_p: Vec<Vec<f64>>,
    pub alarm: Vec<Vec<bool>>,
    pub thresholds: Thresholds,
    pub granularity: IsoDuration,
}

impl DriftMatrix {
    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    pub fn date_index(&self, date: Timestamp) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    pub fn alarm_count(&self, feature: usize) -> usize {
        self.alarm[feature].iter().filter(|&&a| a).count()
    }

    pub fn norm_p_sum(&self, feature: usize) -> f64 {
        self.norm_p[feature].iter().sum()
    }
}

/// Histogram of one window of `dataset` under a feature's reference binning.
pub fn window_histogram(dataset: &Dataset, feature: &FeatureProfile, window: &Window) -> Result<Histogram> {
    let column = dataset
        .column(&feature.name)
        .ok_or_else(|| Error::SchemaMismatch(vec![feature.name.clone()]))?;
    let slots = feature.binning.assign_slots_in(column, window.rows.clone())?;
    Ok(Histogram::from_slots(Arc::clone(&feature.binning), &slots))
}

/// Scores every (feature, window) cell: divergence to the reference, the
/// empirical p-value against the feature's null sample, Holm normalization
/// across features within each window, and the alarm flag.
pub fn evaluate(
    dataset: &Dataset,
    profile: &ReferenceProfile,
    granularity: IsoDuration,
    thresholds: Thresholds,
) -> Result<DriftMatrix> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let missing = dataset.missing_features(&profile.schema);
    if !missing.is_empty() {
        return Err(Error::SchemaMismatch(missing));
    }
    let windows = window_iter(dataset, granularity);

    let per_feature: Vec<(Vec<f64>, Vec<f64>)> = profile
        .features
        .par_iter()
        .map(|f| {
            let column = dataset.column(&f.name).expect("checked above");
            let slots = f.binning.assign_slots(column)?;
            let mut divergence = Vec::with_capacity(windows.len());
            let mut raw_p = Vec::with_capacity(windows.len());
            for w in &windows {
                if w.rows.is_empty() {
                    divergence.push(0.0);
                    raw_p.push(1.0);
                    continue;
                }
                let h = Histogram::from_slots(Arc::clone(&f.binning), &slots[w.rows.clone()]);
                let d = js_divergence(&h, &f.reference_histogram)?;
                divergence.push(d);
                raw_p.push(empirical_p_value(d, &f.null_sample));
            }
            Ok((divergence, raw_p))
        })
        .collect::<Result<_>>()?;
    let (divergence, raw_p): (Vec<_>, Vec<_>) = per_feature.into_iter().unzip();

    let m = profile.features.len();
    let mut norm_p = vec![vec![0.0; windows.len()]; m];
    let mut column = vec![0.0; m];
    for t in 0..windows.len() {
        for f in 0..m {
            column[f] = raw_p[f][t];
        }
        for (f, v) in holm_normalize(&column).into_iter().enumerate() {
            norm_p[f][t] = v;
        }
    }
    let alarm = norm_p
        .iter()
        .map(|row| row.iter().map(|&p| p < thresholds.alpha).collect())
        .collect();

    Ok(DriftMatrix {
        features: profile.features.iter().map(|f| f.name.clone()).collect(),
        dates: windows.iter().map(|w| w.start).collect(),
        divergence,
        raw_p,
        norm_p,
        alarm,
        thresholds,
        granularity,
    })
}
