//! Static bundle mirroring the API paths, for hosting the viewer without a
//! live service.
//!
//! Layout under the output directory:
//!
//! ```text
//! result.json
//! api/meta.json
//! api/matrix.json
//! api/histogram/{feature}/{date}.json
//! api/lineage/{feature}.json
//! api/order/{sort}.json
//! api/order/{sort}__{attribute}.json
//! ```

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use shiftscope_core::drift::SortMode;

use crate::api::{AnalysisState, ApiResult};

fn write(path: PathBuf, payload: ApiResult) -> Result<()> {
    let body = payload.map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e))?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

pub fn histogram_path(out: &Path, feature: &str, date_key: &str) -> PathBuf {
    out.join("api")
        .join("histogram")
        .join(feature)
        .join(format!("{date_key}.json"))
}

/// Writes the bundle and returns the number of files written.
pub fn export(state: &AnalysisState, out: &Path) -> Result<usize> {
    let api = out.join("api");
    let mut files = 0;

    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let result = state.result.to_json()?;
    std::fs::write(out.join("result.json"), result).context("writing result.json")?;
    files += 1;

    write(api.join("meta.json"), state.meta())?;
    write(api.join("matrix.json"), state.matrix_payload())?;
    files += 2;

    for feature in state.features() {
        write(
            api.join("lineage").join(format!("{feature}.json")),
            state.lineage(feature),
        )?;
        files += 1;
        for &date in &state.matrix().dates {
            let key = state.date_key(date);
            write(histogram_path(out, feature, &key), state.histogram(feature, Some(&key)))?;
            files += 1;
        }
    }

    let attributes: Vec<String> = state
        .group_attributes()
        .into_iter()
        .filter(|a| a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
        .collect();
    for mode in SortMode::ALL {
        let name = mode.as_str();
        write(
            api.join("order").join(format!("{name}.json")),
            state.order(Some(name), None),
        )?;
        files += 1;
        for attr in &attributes {
            write(
                api.join("order").join(format!("{name}__{attr}.json")),
                state.order(Some(name), Some(attr)),
            )?;
            files += 1;
        }
    }
    Ok(files)
}
