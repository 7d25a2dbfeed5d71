//! Timestamped columnar datasets: CSV loading/writing and time windowing.

use std::ops::Range;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, Utc};

use crate::duration::IsoDuration;
use crate::error::{Error, Result};
use crate::schema::{FeatureKind, FeatureSchema};

/// Milliseconds since the Unix epoch, UTC.
pub type Timestamp = i64;

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    /// NaN marks a missing value.
    Numeric(Vec<f64>),
    /// The empty string marks a missing value.
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            Column::Numeric(_) => FeatureKind::Numeric,
            Column::Categorical(_) => FeatureKind::Categorical,
        }
    }

    fn permute(&mut self, order: &[usize]) {
        match self {
            Column::Numeric(v) => *v = order.iter().map(|&i| v[i]).collect(),
            Column::Categorical(v) => *v = order.iter().map(|&i| std::mem::take(&mut v[i])).collect(),
        }
    }
}

/// Rows sorted by timestamp, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    timestamps: Vec<Timestamp>,
    names: Vec<String>,
    columns: Vec<Column>,
}

impl Dataset {
    /// Builds a dataset, sorting rows by timestamp (stable for ties).
    pub fn new(timestamps: Vec<Timestamp>, names: Vec<String>, mut columns: Vec<Column>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidArgument(
                "column names and columns differ in length".into(),
            ));
        }
        if let Some(bad) = columns.iter().zip(&names).find(|(c, _)| c.len() != timestamps.len()) {
            return Err(Error::InvalidArgument(format!(
                "column {:?} has {} rows, expected {}",
                bad.1,
                bad.0.len(),
                timestamps.len()
            )));
        }
        let mut timestamps = timestamps;
        if !timestamps.windows(2).all(|w| w[0] <= w[1]) {
            let mut order: Vec<usize> = (0..timestamps.len()).collect();
            order.sort_by_key(|&i| timestamps[i]);
            timestamps = order.iter().map(|&i| timestamps[i]).collect();
            for c in &mut columns {
                c.permute(&order);
            }
        }
        Ok(Self {
            timestamps,
            names,
            columns,
        })
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.names.iter().position(|n| n == name).map(|i| &self.columns[i])
    }

    /// Names of schema features absent from this dataset or present with the
    /// wrong kind.
    pub fn missing_features(&self, schema: &FeatureSchema) -> Vec<String> {
        schema
            .features
            .iter()
            .filter(|f| self.column(&f.name).map(Column::kind) != Some(f.kind))
            .map(|f| f.name.clone())
            .collect()
    }
}

/// Parses RFC 3339 timestamps, naive `YYYY-MM-DD[T ]HH:MM:SS[.f]` (read as
/// UTC), and bare dates.
pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp_millis());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp_millis())
}

pub fn format_timestamp(ts: Timestamp) -> String {
    DateTime::<Utc>::from_timestamp_millis(ts)
        .expect("timestamp within chrono range")
        .to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Loads a CSV file with a header row. Unparseable numeric cells become NaN;
/// an unparseable timestamp is a hard error.
pub fn load_dataset(path: impl AsRef<Path>, schema: &FeatureSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(file, schema)
}

pub fn read_dataset<R: std::io::Read>(reader: R, schema: &FeatureSchema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);

    let mut missing = Vec::new();
    let ts_idx = find(&schema.timestamp_column);
    if ts_idx.is_none() {
        missing.push(schema.timestamp_column.clone());
    }
    let feature_idx: Vec<Option<usize>> = schema.features.iter().map(|f| find(&f.name)).collect();
    for (f, idx) in schema.features.iter().zip(&feature_idx) {
        if idx.is_none() {
            missing.push(f.name.clone());
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingColumns(missing));
    }
    let ts_idx = ts_idx.unwrap();
    let feature_idx: Vec<usize> = feature_idx.into_iter().map(Option::unwrap).collect();

    let mut timestamps = Vec::new();
    let mut columns: Vec<Column> = schema
        .features
        .iter()
        .map(|f| match f.kind {
            FeatureKind::Numeric => Column::Numeric(Vec::new()),
            FeatureKind::Categorical => Column::Categorical(Vec::new()),
        })
        .collect();
    let mut bad_numeric = 0usize;

    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        // row numbers are 1-based and count the header line
        let line = row + 2;
        let raw_ts = record.get(ts_idx).unwrap_or_default();
        let ts = parse_timestamp(raw_ts).ok_or_else(|| Error::BadTimestamp {
            row: line,
            value: raw_ts.to_string(),
        })?;
        timestamps.push(ts);
        for (col, &idx) in columns.iter_mut().zip(&feature_idx) {
            let cell = record.get(idx).unwrap_or_default();
            match col {
                Column::Numeric(v) => v.push(parse_numeric(cell).unwrap_or_else(|| {
                    bad_numeric += 1;
                    f64::NAN
                })),
                Column::Categorical(v) => v.push(cell.to_string()),
            }
        }
    }
    if bad_numeric > 0 {
        tracing::warn!(count = bad_numeric, "unparseable numeric cells read as NaN");
    }
    Dataset::new(timestamps, schema.names().map(str::to_string).collect(), columns)
}

/// `Some(NaN)` for the documented missing markers, `None` for garbage.
fn parse_numeric(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Some(f64::NAN);
    }
    cell.parse::<f64>().ok()
}

pub fn write_dataset(path: impl AsRef<Path>, dataset: &Dataset, schema: &FeatureSchema) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header = vec![schema.timestamp_column.as_str()];
    header.extend(schema.names());
    wtr.write_record(&header)?;

    let columns: Vec<&Column> = schema
        .features
        .iter()
        .map(|f| {
            dataset
                .column(&f.name)
                .ok_or_else(|| Error::MissingColumns(vec![f.name.clone()]))
        })
        .collect::<Result<_>>()?;
    let mut record = Vec::with_capacity(header.len());
    for (row, &ts) in dataset.timestamps().iter().enumerate() {
        record.clear();
        record.push(format_timestamp(ts));
        for col in &columns {
            record.push(match col {
                Column::Numeric(v) if v[row].is_nan() => "NaN".to_string(),
                Column::Numeric(v) => v[row].to_string(),
                Column::Categorical(v) => v[row].clone(),
            });
        }
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

/// One half-open time window `[start, start + granularity)` and the rows in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub start: Timestamp,
    pub rows: Range<usize>,
}

pub fn floor_to(ts: Timestamp, step_ms: i64) -> Timestamp {
    ts.div_euclid(step_ms) * step_ms
}

/// Consecutive windows from the epoch-aligned floor of the first row through
/// the window holding the last row. Empty windows are included.
pub fn window_iter(dataset: &Dataset, granularity: IsoDuration) -> Vec<Window> {
    let ts = dataset.timestamps();
    let (Some(&first), Some(&last)) = (ts.first(), ts.last()) else {
        return Vec::new();
    };
    let step = granularity.millis();
    let mut windows = Vec::new();
    let mut start = floor_to(first, step);
    let mut lo = 0;
    while start <= last {
        let end = start + step;
        let hi = lo + ts[lo..].partition_point(|&t| t < end);
        windows.push(Window { start, rows: lo..hi });
        lo = hi;
        start = end;
    }
    windows
}
