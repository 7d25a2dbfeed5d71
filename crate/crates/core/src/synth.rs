//! Seeded synthetic datasets with injected drift, for tests and demos.

use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{parse_timestamp, write_dataset, Column, Dataset, Timestamp};
use crate::error::{Error, Result};
use crate::schema::{FeatureKind, FeatureSchema, FeatureSpec};

const DAY_MS: i64 = 86_400_000;
pub const UNSEEN_CATEGORY: &str = "unseen";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftKind {
    SuddenShift,
    GradualShift,
    NanSpike,
    NewCategory,
}

impl std::str::FromStr for DriftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidScenario(format!("unknown drift kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub feature: String,
    /// Day index into the evaluation period.
    pub onset_day: usize,
    pub kind: DriftKind,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftScenario {
    /// Raw numeric features, `num_00`, `num_01`, ...
    pub numeric: usize,
    /// Raw categorical features, `cat_00`, ...
    pub categorical: usize,
    /// Engineered numeric features, `eng_00`, ...: `eng_00 = num_00 + num_01`
    /// and `eng_k = eng_{k-1} + num_{k+1}`.
    pub engineered: usize,
    pub reference_days: usize,
    /// Length of the evaluation period.
    pub days: usize,
    pub rows_per_day: usize,
    /// First reference day, `YYYY-MM-DD`; evaluation follows immediately.
    pub start: String,
    pub drifts: Vec<DriftSpec>,
    pub seed: u64,
}

impl Default for DriftScenario {
    fn default() -> Self {
        Self {
            numeric: 10,
            categorical: 8,
            engineered: 2,
            reference_days: 60,
            days: 60,
            rows_per_day: 1000,
            start: "2024-01-01".into(),
            drifts: Vec::new(),
            seed: 42,
        }
    }
}

pub struct Synthesized {
    pub reference: Dataset,
    pub evaluation: Dataset,
    pub schema: FeatureSchema,
}

impl Synthesized {
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_dataset(dir.join("reference.csv"), &self.reference, &self.schema)?;
        write_dataset(dir.join("evaluation.csv"), &self.evaluation, &self.schema)?;
        self.schema.save(dir.join("schema.json"))
    }
}

fn numeric_name(i: usize) -> String {
    format!("num_{i:02}")
}

fn categorical_name(i: usize) -> String {
    format!("cat_{i:02}")
}

fn engineered_name(i: usize) -> String {
    format!("eng_{i:02}")
}

impl DriftScenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn schema(&self) -> FeatureSchema {
        let mut features = Vec::new();
        features.extend((0..self.numeric).map(|i| FeatureSpec::new(numeric_name(i), FeatureKind::Numeric, "raw")));
        features.extend(
            (0..self.categorical).map(|i| FeatureSpec::new(categorical_name(i), FeatureKind::Categorical, "raw")),
        );
        features.extend(
            (0..self.engineered).map(|i| FeatureSpec::new(engineered_name(i), FeatureKind::Numeric, "engineered")),
        );
        let mut lineage = Vec::new();
        for k in 0..self.engineered {
            let child = engineered_name(k);
            if k == 0 {
                lineage.push((numeric_name(0), child.clone()));
                lineage.push((numeric_name(1), child));
            } else {
                lineage.push((engineered_name(k - 1), child.clone()));
                lineage.push((numeric_name(k + 1), child));
            }
        }
        FeatureSchema {
            timestamp_column: "timestamp".into(),
            features,
            lineage,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.numeric + self.categorical + self.engineered == 0 {
            return bad("scenario has no features".into());
        }
        if self.engineered > 0 && self.numeric < self.engineered + 1 {
            return bad(format!(
                "{} engineered features need at least {} raw numeric features",
                self.engineered,
                self.engineered + 1
            ));
        }
        if self.days == 0 || self.reference_days == 0 || self.rows_per_day == 0 {
            return bad("days, reference_days and rows_per_day must be positive".into());
        }
        if parse_timestamp(&self.start).is_none() {
            return bad(format!("bad start date {:?}", self.start));
        }
        let schema = self.schema();
        for d in &self.drifts {
            let Some(spec) = schema.feature(&d.feature) else {
                return bad(format!("drift targets unknown feature {:?}", d.feature));
            };
            if d.onset_day >= self.days {
                return bad(format!("onset_day {} outside [0, {})", d.onset_day, self.days));
            }
            if !(d.magnitude > 0.0 && d.magnitude.is_finite()) {
                return bad(format!("magnitude must be positive, got {}", d.magnitude));
            }
            let ok = match d.kind {
                DriftKind::SuddenShift | DriftKind::GradualShift => spec.kind == FeatureKind::Numeric,
                DriftKind::NewCategory => spec.kind == FeatureKind::Categorical,
                DriftKind::NanSpike => true,
            };
            if !ok {
                return bad(format!(
                    "{:?} does not apply to {:?} feature {:?}",
                    d.kind, spec.kind, d.feature
                ));
            }
        }
        Ok(())
    }
}

/// Category values of categorical feature `i` and their sampling weights.
fn categorical_levels(i: usize) -> (Vec<String>, WeightedIndex<f64>) {
    let n = 3 + i % 4;
    let values = (0..n).map(|k| format!("v{k}")).collect();
    let weights: Vec<f64> = (0..n).map(|k| 1.0 / (k + 1) as f64).collect();
    (values, WeightedIndex::new(weights).expect("positive weights"))
}

struct Generator<'a> {
    scenario: &'a DriftScenario,
    levels: Vec<(Vec<String>, WeightedIndex<f64>)>,
    feature_pos: std::collections::HashMap<String, usize>,
}

impl<'a> Generator<'a> {
    fn new(scenario: &'a DriftScenario, schema: &FeatureSchema) -> Self {
        Self {
            scenario,
            levels: (0..scenario.categorical).map(categorical_levels).collect(),
            feature_pos: schema.names().enumerate().map(|(i, n)| (n.to_string(), i)).collect(),
        }
    }

    /// Generates `days` days from `start`; drifts apply only when `with_drift`.
    fn is_engineered(&self, feature: &str) -> bool {
        self.feature_pos[feature] >= self.scenario.numeric + self.scenario.categorical
    }

    fn period(&self, rng: &mut ChaCha8Rng, start: Timestamp, days: usize, with_drift: bool) -> Result<Dataset> {
        let s = self.scenario;
        let n_features = s.numeric + s.categorical + s.engineered;
        let rows = days * s.rows_per_day;
        let mut timestamps = Vec::with_capacity(rows);
        let mut numeric: Vec<Vec<f64>> = vec![Vec::with_capacity(rows); s.numeric + s.engineered];
        let mut categorical: Vec<Vec<String>> = vec![Vec::with_capacity(rows); s.categorical];

        let mut offsets: Vec<i64> = Vec::with_capacity(s.rows_per_day);
        for day in 0..days {
            offsets.clear();
            offsets.extend((0..s.rows_per_day).map(|_| rng.random_range(0..86_400i64) * 1000));
            offsets.sort_unstable();
            let active: Vec<&DriftSpec> = if with_drift {
                s.drifts.iter().filter(|d| day >= d.onset_day).collect()
            } else {
                Vec::new()
            };
            let mut row_num = vec![0.0; s.numeric + s.engineered];
            for &off in &offsets {
                timestamps.push(start + day as i64 * DAY_MS + off);
                for v in row_num.iter_mut().take(s.numeric) {
                    *v = rng.sample(StandardNormal);
                }
                let mut row_cat: Vec<String> = self
                    .levels
                    .iter()
                    .map(|(values, dist)| values[dist.sample(rng)].clone())
                    .collect();

                // raw drifts first so engineered features inherit them
                for d in active.iter().filter(|d| !self.is_engineered(&d.feature)) {
                    self.apply(d, day, rng, &mut row_num, &mut row_cat);
                }
                for k in 0..s.engineered {
                    let base = if k == 0 { row_num[0] } else { row_num[s.numeric + k - 1] };
                    row_num[s.numeric + k] = base + row_num[k + 1];
                }
                for d in active.iter().filter(|d| self.is_engineered(&d.feature)) {
                    self.apply(d, day, rng, &mut row_num, &mut row_cat);
                }

                for (col, &v) in numeric.iter_mut().zip(&row_num) {
                    col.push(v);
                }
                for (col, v) in categorical.iter_mut().zip(row_cat) {
                    col.push(v);
                }
            }
        }

        let mut names = Vec::with_capacity(n_features);
        let mut columns = Vec::with_capacity(n_features);
        let mut numeric = numeric.into_iter();
        for i in 0..s.numeric {
            names.push(numeric_name(i));
            columns.push(Column::Numeric(numeric.next().unwrap()));
        }
        for (i, col) in categorical.into_iter().enumerate() {
            names.push(categorical_name(i));
            columns.push(Column::Categorical(col));
        }
        for (i, col) in numeric.enumerate() {
            names.push(engineered_name(i));
            columns.push(Column::Numeric(col));
        }
        Dataset::new(timestamps, names, columns)
    }

    fn apply(&self, d: &DriftSpec, day: usize, rng: &mut ChaCha8Rng, num: &mut [f64], cat: &mut [String]) {
        let s = self.scenario;
        let pos = self.feature_pos[&d.feature];
        // schema order is numeric raws, categorical raws, engineered
        let numeric_slot = if pos < s.numeric {
            Some(pos)
        } else if pos >= s.numeric + s.categorical {
            Some(pos - s.categorical)
        } else {
            None
        };
        match d.kind {
            DriftKind::SuddenShift => num[numeric_slot.unwrap()] += d.magnitude,
            DriftKind::GradualShift => {
                let span = (s.days - 1).saturating_sub(d.onset_day);
                let frac = if span == 0 {
                    1.0
                } else {
                    (day - d.onset_day) as f64 / span as f64
                };
                num[numeric_slot.unwrap()] += d.magnitude * frac;
            }
            DriftKind::NanSpike => {
                if rng.random::<f64>() < d.magnitude.min(1.0) {
                    match numeric_slot {
                        Some(i) => num[i] = f64::NAN,
                        None => cat[pos - s.numeric].clear(),
                    }
                }
            }
            DriftKind::NewCategory => {
                if rng.random::<f64>() < d.magnitude.min(1.0) {
                    cat[pos - s.numeric] = UNSEEN_CATEGORY.to_string();
                }
            }
        }
    }
}

/// Generates a drift-free reference period followed by an evaluation period
/// with the scenario's drifts applied from their onset days.
pub fn generate(scenario: &DriftScenario) -> Result<Synthesized> {
    scenario.validate()?;
    let schema = scenario.schema();
    let start = parse_timestamp(&scenario.start).expect("validated");
    let gen = Generator::new(scenario, &schema);

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(0);
    let reference = gen.period(&mut rng, start, scenario.reference_days, false)?;
    rng.set_stream(1);
    rng.set_word_pos(0);
    let eval_start = start + scenario.reference_days as i64 * DAY_MS;
    let evaluation = gen.period(&mut rng, eval_start, scenario.days, true)?;
    Ok(Synthesized {
        reference,
        evaluation,
        schema,
    })
}
