//! Feature schema and lineage declaration, loaded from `schema.json`.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ORIGIN_ATTRIBUTE: &str = "origin";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
}

impl FeatureSpec {
    pub fn new(name: impl Into<String>, kind: FeatureKind, origin: &str) -> Self {
        let mut attributes = BTreeMap::new();
        attributes.insert(ORIGIN_ATTRIBUTE.to_string(), origin.to_string());
        Self {
            name: name.into(),
            kind,
            attributes,
        }
    }

    pub fn origin(&self) -> &str {
        self.attributes
            .get(ORIGIN_ATTRIBUTE)
            .map(String::as_str)
            .unwrap_or_default()
    }
}

/// Dataset-level schema: the timestamp column, the ordered feature list, and
/// `[parent, child]` lineage edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub timestamp_column: String,
    pub features: Vec<FeatureSpec>,
    #[serde(default)]
    pub lineage: Vec<(String, String)>,
}

/// Feature names double as URL path segments and file names in exported
/// bundles, so they are restricted to a conservative identifier alphabet.
fn is_identifier(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && name != "."
        && name != ".."
}

impl FeatureSchema {
    pub fn validate(&self) -> Result<()> {
        if self.timestamp_column.is_empty() {
            return Err(Error::InvalidSchema("empty timestamp_column".into()));
        }
        let mut seen = HashSet::new();
        for f in &self.features {
            if !is_identifier(&f.name) {
                return Err(Error::InvalidSchema(format!(
                    "feature name {:?} is not an identifier",
                    f.name
                )));
            }
            if f.name == self.timestamp_column {
                return Err(Error::InvalidSchema(format!(
                    "feature {:?} collides with the timestamp column",
                    f.name
                )));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate feature name {:?}", f.name)));
            }
            match f.attributes.get(ORIGIN_ATTRIBUTE).map(String::as_str) {
                Some("raw") | Some("engineered") => {}
                other => {
                    return Err(Error::InvalidSchema(format!(
                        "feature {:?} needs attribute origin = raw|engineered, got {:?}",
                        f.name, other
                    )))
                }
            }
        }
        for (parent, child) in &self.lineage {
            for node in [parent, child] {
                if !seen.contains(node.as_str()) {
                    return Err(Error::UnknownLineageNode(node.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureSpec> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema: FeatureSchema = serde_json::from_str(&text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
