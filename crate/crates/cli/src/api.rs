//! Response payloads shared by the live service and the static export.
//!
//! Both front ends call the same functions, so an exported file and the
//! corresponding HTTP response body are the same bytes.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;
use shiftscope_core::dataset::{format_timestamp, parse_timestamp, window_iter, Timestamp, Window};
use shiftscope_core::drift::{group_features, sort_features, window_histogram, SortMode, Thresholds};
use shiftscope_core::histogram::Histogram;
use shiftscope_core::{Dataset, DriftMatrix, IsoDuration, LineageGraph, ReferenceProfile, ResultDocument};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub status: u16,
    pub message: String,
}

impl ApiError {
    pub fn not_found(message: impl Into<String>) -> Self {
        Self {
            status: 404,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: 400,
            message: message.into(),
        }
    }

    pub fn body(&self) -> Vec<u8> {
        to_body(&json!({ "error": self.message }))
    }
}

pub type ApiResult = Result<Vec<u8>, ApiError>;

fn to_body<T: Serialize>(value: &T) -> Vec<u8> {
    serde_json::to_vec(value).expect("payloads serialize")
}

/// Everything the read-only API serves. Immutable after construction.
pub struct AnalysisState {
    pub profile: ReferenceProfile,
    pub result: ResultDocument,
    matrix: DriftMatrix,
    lineage: LineageGraph,
    dataset: Dataset,
    windows: Vec<Window>,
}

#[derive(Debug, thiserror::Error)]
pub enum StateError {
    #[error("result feature {0:?} is not in the profile schema")]
    UnknownFeature(String),
    #[error(transparent)]
    Core(#[from] shiftscope_core::Error),
}

impl AnalysisState {
    pub fn new(profile: ReferenceProfile, result: ResultDocument, dataset: Dataset) -> Result<Self, StateError> {
        let matrix = result.matrix()?;
        if let Some(f) = matrix.features.iter().find(|f| profile.feature(f).is_none()) {
            return Err(StateError::UnknownFeature(f.clone()));
        }
        let missing = dataset.missing_features(&profile.schema);
        if !missing.is_empty() {
            return Err(shiftscope_core::Error::SchemaMismatch(missing).into());
        }
        let lineage = LineageGraph::from_schema(&profile.schema)?;
        let windows = window_iter(&dataset, matrix.granularity);
        if windows.iter().map(|w| w.start).ne(matrix.dates.iter().copied()) {
            tracing::warn!("evaluation data windows differ from the result dates; histograms use the data windows");
        }
        Ok(Self {
            profile,
            result,
            matrix,
            lineage,
            dataset,
            windows,
        })
    }

    pub fn matrix(&self) -> &DriftMatrix {
        &self.matrix
    }

    pub fn features(&self) -> &[String] {
        &self.matrix.features
    }

    /// Attributes defined on every feature, usable for grouping.
    pub fn group_attributes(&self) -> Vec<String> {
        let mut common: Option<Vec<String>> = None;
        for f in &self.profile.schema.features {
            let keys: Vec<String> = f.attributes.keys().cloned().collect();
            common = Some(match common {
                None => keys,
                Some(prev) => prev.into_iter().filter(|k| keys.contains(k)).collect(),
            });
        }
        common.unwrap_or_default()
    }

    /// Path-safe key of a window start, as used in URLs and export files.
    pub fn date_key(&self, date: Timestamp) -> String {
        date_key(date, self.matrix.granularity)
    }

    /// `GET /api/meta`
    pub fn meta(&self) -> ApiResult {
        #[derive(Serialize)]
        struct FeatureMeta<'a> {
            name: &'a str,
            origin: &'a str,
            kind: shiftscope_core::FeatureKind,
            attributes: &'a BTreeMap<String, String>,
        }
        #[derive(Serialize)]
        struct Meta<'a> {
            features: Vec<FeatureMeta<'a>>,
            dates: &'a [String],
            thresholds: Thresholds,
            granularity: IsoDuration,
        }
        let features = self
            .matrix
            .features
            .iter()
            .map(|name| {
                let spec = self.profile.schema.feature(name).expect("checked in new");
                FeatureMeta {
                    name,
                    origin: spec.origin(),
                    kind: spec.kind,
                    attributes: &spec.attributes,
                }
            })
            .collect();
        Ok(to_body(&Meta {
            features,
            dates: &self.result.dates,
            thresholds: self.matrix.thresholds,
            granularity: self.matrix.granularity,
        }))
    }

    /// `GET /api/matrix`
    pub fn matrix_payload(&self) -> ApiResult {
        #[derive(Serialize)]
        struct Matrix<'a> {
            features: &'a [String],
            dates: &'a [String],
            divergence: &'a [Vec<f64>],
            raw_p: &'a [Vec<f64>],
            norm_p: &'a [Vec<f64>],
            alarm: &'a [Vec<bool>],
            thresholds: Thresholds,
            granularity: IsoDuration,
            orderings: BTreeMap<&'static str, Vec<String>>,
        }
        let r = &self.result;
        Ok(to_body(&Matrix {
            features: &r.features,
            dates: &r.dates,
            divergence: &r.divergence,
            raw_p: &r.raw_p,
            norm_p: &r.norm_p,
            alarm: &r.alarm,
            thresholds: r.thresholds,
            granularity: r.granularity,
            orderings: SortMode::ALL
                .into_iter()
                .map(|m| (m.as_str(), sort_features(&self.matrix, m)))
                .collect(),
        }))
    }

    /// `GET /api/histogram/{feature}?date=...`
    pub fn histogram(&self, feature: &str, date: Option<&str>) -> ApiResult {
        let profile = self
            .profile
            .feature(feature)
            .filter(|_| self.matrix.feature_index(feature).is_some())
            .ok_or_else(|| ApiError::not_found(format!("unknown feature {feature:?}")))?;
        let date = date.ok_or_else(|| ApiError::bad_request("missing date parameter"))?;
        let ts = parse_timestamp(date).ok_or_else(|| ApiError::bad_request(format!("invalid date {date:?}")))?;
        let window = self
            .windows
            .iter()
            .find(|w| w.start == ts)
            .ok_or_else(|| ApiError::not_found(format!("no window starts at {date}")))?;
        let target =
            window_histogram(&self.dataset, profile, window).map_err(|e| ApiError::bad_request(e.to_string()))?;

        #[derive(Serialize)]
        struct HistogramPayload<'a> {
            feature: &'a str,
            date: String,
            labels: Vec<String>,
            special_label: &'static str,
            reference: &'a Histogram,
            target: Histogram,
        }
        Ok(to_body(&HistogramPayload {
            feature,
            date: format_timestamp(window.start),
            labels: profile.binning.slot_labels(),
            special_label: profile.binning.special_label(),
            reference: &profile.reference_histogram,
            target,
        }))
    }

    /// `GET /api/lineage/{feature}`
    pub fn lineage(&self, feature: &str) -> ApiResult {
        let unknown = |_| ApiError::not_found(format!("unknown feature {feature:?}"));
        let ancestors = self.lineage.ancestors(feature).map_err(unknown)?;
        let descendants = self.lineage.descendants(feature).map_err(unknown)?;
        Ok(to_body(&json!({ "ancestors": ancestors, "descendants": descendants })))
    }

    /// `GET /api/related?features=a,b&common=true|false`
    pub fn related(&self, features: Option<&str>, common: Option<&str>) -> ApiResult {
        let features: Vec<&str> = features
            .unwrap_or_default()
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if features.is_empty() {
            return Err(ApiError::bad_request("features parameter is empty"));
        }
        let common = match common.unwrap_or("false") {
            "true" => true,
            "false" => false,
            other => {
                return Err(ApiError::bad_request(format!(
                    "common must be true or false, got {other:?}"
                )))
            }
        };
        if let Some(f) = features.iter().find(|f| self.profile.feature(f).is_none()) {
            return Err(ApiError::not_found(format!("unknown feature {f:?}")));
        }
        let related = self
            .lineage
            .related(&features, common)
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        Ok(to_body(&related))
    }

    /// `GET /api/order?sort=most_alarms&group=origin`
    pub fn order(&self, sort: Option<&str>, group: Option<&str>) -> ApiResult {
        let mode: SortMode = sort
            .unwrap_or("original")
            .parse()
            .map_err(|e: shiftscope_core::Error| ApiError::bad_request(e.to_string()))?;
        let ordering = sort_features(&self.matrix, mode);
        let groups = match group {
            None | Some("") => vec![shiftscope_core::drift::view::FeatureGroup {
                label: String::new(),
                features: ordering,
            }],
            Some(attr) => group_features(&ordering, &self.profile.schema, attr)
                .map_err(|e| ApiError::bad_request(e.to_string()))?,
        };
        Ok(to_body(&json!({
            "sort": mode,
            "group": group.filter(|g| !g.is_empty()),
            "groups": groups,
        })))
    }
}

pub fn date_key(date: Timestamp, granularity: IsoDuration) -> String {
    let text = format_timestamp(date);
    if granularity.seconds() % 86_400 == 0 && text.ends_with("T00:00:00Z") {
        text[..10].to_string()
    } else {
        text
    }
}
