//! ISO-8601 durations restricted to fixed-length units (weeks, days, hours,
//! minutes, seconds). Calendar units (years, months) have no fixed length and
//! are rejected.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

const MINUTE: i64 = 60;
const HOUR: i64 = 60 * MINUTE;
const DAY: i64 = 24 * HOUR;
const WEEK: i64 = 7 * DAY;

/// A positive, whole-second time span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsoDuration {
    seconds: i64,
}

impl IsoDuration {
    pub const ONE_DAY: IsoDuration = IsoDuration { seconds: DAY };

    pub fn from_seconds(seconds: i64) -> Result<Self, Error> {
        if seconds <= 0 {
            return Err(Error::InvalidDuration(format!("{seconds}s")));
        }
        Ok(Self { seconds })
    }

    pub fn days(days: i64) -> Self {
        Self { seconds: days * DAY }
    }

    pub fn seconds(self) -> i64 {
        self.seconds
    }

    pub fn millis(self) -> i64 {
        self.seconds * 1000
    }
}

impl Default for IsoDuration {
    fn default() -> Self {
        Self::ONE_DAY
    }
}

impl FromStr for IsoDuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidDuration(s.to_string());
        let body = s.strip_prefix('P').ok_or_else(bad)?;
        let (date_part, time_part) = match body.split_once('T') {
            Some((d, t)) if !t.is_empty() => (d, Some(t)),
            Some(_) => return Err(bad()),
            None => (body, None),
        };

        let mut total: i64 = 0;
        let mut accumulate = |part: &str, units: &[(char, i64)]| -> Result<(), Error> {
            let mut digits = String::new();
            let mut next_unit = 0;
            for c in part.chars() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    continue;
                }
                let pos = units[next_unit..].iter().position(|(u, _)| *u == c).ok_or_else(bad)?;
                let (_, scale) = units[next_unit + pos];
                let n: i64 = digits.parse().map_err(|_| bad())?;
                total = n
                    .checked_mul(scale)
                    .and_then(|v| total.checked_add(v))
                    .ok_or_else(bad)?;
                digits.clear();
                next_unit += pos + 1;
            }
            if digits.is_empty() {
                Ok(())
            } else {
                Err(bad())
            }
        };

        accumulate(date_part, &[('W', WEEK), ('D', DAY)])?;
        if let Some(t) = time_part {
            accumulate(t, &[('H', HOUR), ('M', MINUTE), ('S', 1)])?;
        }
        if body.is_empty() || total <= 0 {
            return Err(bad());
        }
        Ok(Self { seconds: total })
    }
}

impl fmt::Display for IsoDuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let days = self.seconds / DAY;
        let rem = self.seconds % DAY;
        write!(f, "P")?;
        if days > 0 {
            write!(f, "{days}D")?;
        }
        if rem > 0 {
            write!(f, "T")?;
            let (h, m, s) = (rem / HOUR, rem % HOUR / MINUTE, rem % MINUTE);
            if h > 0 {
                write!(f, "{h}H")?;
            }
            if m > 0 {
                write!(f, "{m}M")?;
            }
            if s > 0 {
                write!(f, "{s}S")?;
            }
        }
        Ok(())
    }
}

impl Serialize for IsoDuration {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IsoDuration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
