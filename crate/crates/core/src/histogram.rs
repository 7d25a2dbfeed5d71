//! Binning and normalized histograms.
//!
//! Numeric features use `bin_count` equal-width interior bins over the
//! reference range plus an underflow and an overflow slot. Categorical
//! features use one slot per reference category. Both carry a separate
//! special mass: NaN for numeric, missing or unseen values for categorical.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::Column;
use crate::error::{Error, Result};
use crate::schema::FeatureKind;

/// Reference categories in fixed order with a lookup index.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    items: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn get(&self, value: &str) -> Option<usize> {
        self.index.get(value).copied()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = Error;

    fn try_from(items: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            if item.is_empty() {
                return Err(Error::InvalidArgument("empty string in vocabulary".into()));
            }
            if index.insert(item.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate vocabulary entry {item:?}")));
            }
        }
        Ok(Self { items, index })
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.items
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BinningSpec {
    Numeric { bin_count: usize, lower: f64, upper: f64 },
    Categorical { vocabulary: Vocabulary },
}

impl BinningSpec {
    pub fn numeric(bin_count: usize, lower: f64, upper: f64) -> Result<Self> {
        if bin_count == 0 {
            return Err(Error::InvalidArgument("bin_count must be at least 1".into()));
        }
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidArgument(format!(
                "numeric range needs finite lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(BinningSpec::Numeric {
            bin_count,
            lower,
            upper,
        })
    }

    pub fn categorical(vocabulary: Vec<String>) -> Result<Self> {
        Ok(BinningSpec::Categorical {
            vocabulary: vocabulary.try_into()?,
        })
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            BinningSpec::Numeric { .. } => FeatureKind::Numeric,
            BinningSpec::Categorical { .. } => FeatureKind::Categorical,
        }
    }

    /// Number of regular slots, excluding the special slot.
    pub fn slots(&self) -> usize {
        match self {
            BinningSpec::Numeric { bin_count, .. } => bin_count + 2,
            BinningSpec::Categorical { vocabulary } => vocabulary.len(),
        }
    }

    /// Index used for the special slot in slot assignments.
    pub fn special_slot(&self) -> usize {
        self.slots()
    }

    /// Interior edges of a numeric binning, `bin_count + 1` values.
    pub fn edges(&self) -> Option<Vec<f64>> {
        match *self {
            BinningSpec::Numeric { bin_count, .. } => Some((0..=bin_count).map(|i| self.edge(i)).collect()),
            BinningSpec::Categorical { .. } => None,
        }
    }

    fn edge(&self, i: usize) -> f64 {
        match *self {
            BinningSpec::Numeric {
                bin_count,
                lower,
                upper,
            } => {
                if i == bin_count {
                    upper
                } else {
                    lower + (upper - lower) * (i as f64 / bin_count as f64)
                }
            }
            BinningSpec::Categorical { .. } => unreachable!("categorical binning has no edges"),
        }
    }

    /// Slot of a numeric value: 0 is underflow, `bin_count + 1` overflow,
    /// NaN maps to the special slot. Interior bins are `[e_i, e_{i+1})`, the
    /// last one closed on the right.
    pub fn numeric_slot(&self, v: f64) -> usize {
        let BinningSpec::Numeric {
            bin_count,
            lower,
            upper,
        } = *self
        else {
            return self.special_slot();
        };
        if v.is_nan() {
            return self.special_slot();
        }
        if v < lower {
            return 0;
        }
        if v > upper {
            return bin_count + 1;
        }
        let mut i = (((v - lower) / (upper - lower)) * bin_count as f64) as usize;
        i = i.min(bin_count - 1);
        while i > 0 && v < self.edge(i) {
            i -= 1;
        }
        while i + 1 < bin_count && v >= self.edge(i + 1) {
            i += 1;
        }
        i + 1
    }

    pub fn categorical_slot(&self, v: &str) -> usize {
        match self {
            BinningSpec::Categorical { vocabulary } => vocabulary.get(v).unwrap_or(self.special_slot()),
            BinningSpec::Numeric { .. } => self.special_slot(),
        }
    }

    /// Slot index for every row of `column`.
    pub fn assign_slots(&self, column: &Column) -> Result<Vec<u32>> {
        self.assign_slots_in(column, 0..column.len())
    }

    /// Slot index for the rows of `column` in `rows`.
    pub fn assign_slots_in(&self, column: &Column, rows: std::ops::Range<usize>) -> Result<Vec<u32>> {
        if column.kind() != self.kind() {
            return Err(Error::InvalidArgument(format!(
                "{:?} column binned with a {:?} spec",
                column.kind(),
                self.kind()
            )));
        }
        Ok(match column {
            Column::Numeric(v) => v[rows].iter().map(|&x| self.numeric_slot(x) as u32).collect(),
            Column::Categorical(v) => v[rows].iter().map(|x| self.categorical_slot(x) as u32).collect(),
        })
    }

    /// Human-readable slot labels, aligned with `Histogram::mass`.
    pub fn slot_labels(&self) -> Vec<String> {
        match self {
            BinningSpec::Numeric { bin_count, .. } => {
                let e = self.edges().unwrap();
                let mut labels = Vec::with_capacity(bin_count + 2);
                labels.push(format!("< {}", e[0]));
                for i in 0..*bin_count {
                    let close = if i + 1 == *bin_count { ']' } else { ')' };
                    labels.push(format!("[{}, {}{close}", e[i], e[i + 1]));
                }
                labels.push(format!("> {}", e[*bin_count]));
                labels
            }
            BinningSpec::Categorical { vocabulary } => vocabulary.items().to_vec(),
        }
    }

    pub fn special_label(&self) -> &'static str {
        match self {
            BinningSpec::Numeric { .. } => "NaN",
            BinningSpec::Categorical { .. } => "missing+new",
        }
    }
}

/// Relative frequencies over a binning's slots plus the special mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    spec: Arc<BinningSpec>,
    pub mass: Vec<f64>,
    pub special_mass: f64,
    pub sample_count: u64,
}

/// Wire form of a histogram; the binning travels separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub mass: Vec<f64>,
    pub special_mass: f64,
    pub sample_count: u64,
}

impl Histogram {
    /// Histogram of rows already mapped to slots by `spec.assign_slots`.
    pub fn from_slots(spec: Arc<BinningSpec>, slots: &[u32]) -> Self {
        let mut counts = vec![0u64; spec.slots() + 1];
        for &s in slots {
            counts[s as usize] += 1;
        }
        Self::from_counts(spec, &counts)
    }

    /// `counts` has one entry per slot followed by the special count.
    pub fn from_counts(spec: Arc<BinningSpec>, counts: &[u64]) -> Self {
        debug_assert_eq!(counts.len(), spec.slots() + 1);
        let n: u64 = counts.iter().sum();
        let (mass, special_mass) = if n == 0 {
            (vec![0.0; spec.slots()], 0.0)
        } else {
            let nf = n as f64;
            (
                counts[..spec.slots()].iter().map(|&c| c as f64 / nf).collect(),
                counts[spec.slots()] as f64 / nf,
            )
        };
        Self {
            spec,
            mass,
            special_mass,
            sample_count: n,
        }
    }

    pub fn from_data(spec: Arc<BinningSpec>, data: HistogramData) -> Result<Self> {
        if data.mass.len() != spec.slots() {
            return Err(Error::IncompatibleHistograms);
        }
        Ok(Self {
            spec,
            mass: data.mass,
            special_mass: data.special_mass,
            sample_count: data.sample_count,
        })
    }

    pub fn spec(&self) -> &Arc<BinningSpec> {
        &self.spec
    }

    pub fn is_compatible(&self, other: &Histogram) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec
    }

    /// All coordinates: regular slots then the special slot.
    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        self.mass.iter().copied().chain(std::iter::once(self.special_mass))
    }

    pub fn total(&self) -> f64 {
        self.coordinates().sum()
    }

    pub fn to_data(&self) -> HistogramData {
        HistogramData {
            mass: self.mass.clone(),
            special_mass: self.special_mass,
            sample_count: self.sample_count,
        }
    }
}

impl Serialize for Histogram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Histogram", 3)?;
        s.serialize_field("mass", &self.mass)?;
        s.serialize_field("special_mass", &self.special_mass)?;
        s.serialize_field("sample_count", &self.sample_count)?;
        s.end()
    }
}

/// Learns a binning from a reference column.
///
/// Numeric: equal-width over the finite min..max (NaN and infinities are
/// ignored); a degenerate range becomes `[v, v + 1]`, an all-NaN column
/// `[0, 1]`. Categorical: every non-missing value, by descending frequency
/// then lexicographically.
pub fn build_binning(values: &Column, bin_count: usize) -> Result<BinningSpec> {
    if values.is_empty() {
        return Err(Error::EmptyReferenceColumn);
    }
    match values {
        Column::Numeric(v) => {
            let (lo, hi) = v
                .iter()
                .copied()
                .filter(|x| x.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            let (lower, upper) = if lo > hi {
                (0.0, 1.0)
            } else if lo == hi {
                (lo, lo + 1.0)
            } else {
                (lo, hi)
            };
            BinningSpec::numeric(bin_count, lower, upper)
        }
        Column::Categorical(v) => {
            let mut freq: HashMap<&str, u64> = HashMap::new();
            for x in v.iter().filter(|x| !x.is_empty()) {
                *freq.entry(x.as_str()).or_default() += 1;
            }
            let mut entries: Vec<(&str, u64)> = freq.into_iter().collect();
            entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            BinningSpec::categorical(entries.into_iter().map(|(s, _)| s.to_string()).collect())
        }
    }
}

/// Relative-frequency histogram of `values` under `spec`.
pub fn build_histogram(values: &Column, spec: &Arc<BinningSpec>) -> Result<Histogram> {
    let slots = spec.assign_slots(values)?;
    Ok(Histogram::from_slots(Arc::clone(spec), &slots))
}
