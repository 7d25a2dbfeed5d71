//! Orderings, groupings, and color classes for the heatmap overview.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{DriftMatrix, Thresholds};
use crate::error::{Error, Result};
use crate::schema::FeatureSchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortMode {
    Original,
    Alphabetical,
    MostAlarms,
    LeastSumP,
}

impl SortMode {
    pub const ALL: [SortMode; 4] = [
        SortMode::Original,
        SortMode::Alphabetical,
        SortMode::MostAlarms,
        SortMode::LeastSumP,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SortMode::Original => "original",
            SortMode::Alphabetical => "alphabetical",
            SortMode::MostAlarms => "most_alarms",
            SortMode::LeastSumP => "least_sum_p",
        }
    }
}

impl std::str::FromStr for SortMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SortMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sort mode {s:?}")))
    }
}

/// Feature names of `matrix` in the requested order.
///
/// `most_alarms` breaks ties by the smaller sum of normalized p-values, then
/// by original position; the other modes break ties by original position.
pub fn sort_features(matrix: &DriftMatrix, mode: SortMode) -> Vec<String> {
    let mut idx: Vec<usize> = (0..matrix.features.len()).collect();
    match mode {
        SortMode::Original => {}
        SortMode::Alphabetical => idx.sort_by(|&a, &b| matrix.features[a].cmp(&matrix.features[b])),
        SortMode::MostAlarms => {
            let keys: Vec<(usize, f64)> = (0..matrix.features.len())
                .map(|f| (matrix.alarm_count(f), matrix.norm_p_sum(f)))
                .collect();
            idx.sort_by(|&a, &b| keys[b].0.cmp(&keys[a].0).then_with(|| keys[a].1.total_cmp(&keys[b].1)));
        }
        SortMode::LeastSumP => {
            let sums: Vec<f64> = (0..matrix.features.len()).map(|f| matrix.norm_p_sum(f)).collect();
            idx.sort_by(|&a, &b| sums[a].total_cmp(&sums[b]));
        }
    }
    idx.into_iter().map(|i| matrix.features[i].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGroup {
    pub label: String,
    pub features: Vec<String>,
}

/// Stable partition of `ordering` by a schema attribute; groups appear in
/// first-appearance order of their labels.
pub fn group_features(ordering: &[String], schema: &FeatureSchema, attribute: &str) -> Result<Vec<FeatureGroup>> {
    let mut groups: Vec<FeatureGroup> = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for name in ordering {
        let spec = schema
            .feature(name)
            .ok_or_else(|| Error::UnknownFeature(name.clone()))?;
        let label = spec.attributes.get(attribute).ok_or_else(|| Error::UnknownAttribute {
            attribute: attribute.to_string(),
            feature: name.clone(),
        })?;
        let i = *slot.entry(label.as_str()).or_insert_with(|| {
            groups.push(FeatureGroup {
                label: label.clone(),
                features: Vec::new(),
            });
            groups.len() - 1
        });
        groups[i].features.push(name.clone());
    }
    Ok(groups)
}

/// Color class of a heatmap cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum CellColor {
    LightGray,
    Black,
    /// 0 at the analysis threshold, 1 at alpha.
    Gradient {
        position: f64,
    },
}

/// Tripartite rule: at or above the analysis threshold is light gray, below
/// alpha is black, and in between the position is interpolated in log10(p).
pub fn cell_color(norm_p: f64, thresholds: Thresholds) -> CellColor {
    if norm_p >= thresholds.analysis_threshold {
        CellColor::LightGray
    } else if norm_p < thresholds.alpha {
        CellColor::Black
    } else {
        let top = thresholds.analysis_threshold.log10();
        let position = (top - norm_p.log10()) / (top - thresholds.alpha.log10());
        CellColor::Gradient {
            position: position.clamp(0.0, 1.0),
        }
    }
}
