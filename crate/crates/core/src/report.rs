//! `result.json`: the evaluated matrix plus the schema context a viewer needs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{format_timestamp, parse_timestamp};
use crate::drift::{DriftMatrix, Thresholds};
use crate::duration::IsoDuration;
use crate::error::{Error, Result};
use crate::schema::FeatureSchema;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub features: Vec<String>,
    /// Window starts, RFC 3339 UTC.
    pub dates: Vec<String>,
    pub divergence: Vec<Vec<f64>>,
    pub raw_p: Vec<Vec<f64>>,
    pub norm_p: Vec<Vec<f64>>,
    pub alarm: Vec<Vec<bool>>,
    pub thresholds: Thresholds,
    pub granularity: IsoDuration,
    pub schema: FeatureSchema,
    /// SHA-256 of the profile file the matrix was evaluated against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_hash: Option<String>,
}

impl ResultDocument {
    pub fn new(matrix: &DriftMatrix, schema: &FeatureSchema, profile_hash: Option<String>) -> Self {
        Self {
            features: matrix.features.clone(),
            dates: matrix.dates.iter().map(|&d| format_timestamp(d)).collect(),
            divergence: matrix.divergence.clone(),
            raw_p: matrix.raw_p.clone(),
            norm_p: matrix.norm_p.clone(),
            alarm: matrix.alarm.clone(),
            thresholds: matrix.thresholds,
            granularity: matrix.granularity,
            schema: schema.clone(),
            profile_hash,
        }
    }

    pub fn matrix(&self) -> Result<DriftMatrix> {
        let dates = self
            .dates
            .iter()
            .enumerate()
            .map(|(i, d)| {
                parse_timestamp(d).ok_or(Error::BadTimestamp {
                    row: i,
                    value: d.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (f, t) = (self.features.len(), dates.len());
        fn shaped<T>(grid: &[Vec<T>], rows: usize, cols: usize) -> bool {
            grid.len() == rows && grid.iter().all(|r| r.len() == cols)
        }
        if !(shaped(&self.divergence, f, t)
            && shaped(&self.raw_p, f, t)
            && shaped(&self.norm_p, f, t)
            && shaped(&self.alarm, f, t))
        {
            return Err(Error::InvalidArgument(format!("result arrays are not {f} x {t}")));
        }
        Ok(DriftMatrix {
            features: self.features.clone(),
            dates,
            divergence: self.divergence.clone(),
            raw_p: self.raw_p.clone(),
            norm_p: self.norm_p.clone(),
            alarm: self.alarm.clone(),
            thresholds: self.thresholds,
            granularity: self.granularity,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: Self = serde_json::from_str(&text)?;
        doc.schema.validate()?;
        doc.matrix()?;
        Ok(doc)
    }
}
