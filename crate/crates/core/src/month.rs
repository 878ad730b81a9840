use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// A calendar month (fixed monthly frequency), ordered chronologically.
///
/// Serialized and displayed as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Month {
    year: i32,
    month: u8,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self, CoreError> {
        if !(1..=12).contains(&month) {
            return Err(CoreError::MalformedDate(format!("{year}-{month:02}")));
        }
        Ok(Self {
            year,
            month: month as u8,
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u32 {
        u32::from(self.month)
    }

    /// Months since year 0, used for arithmetic and ordering.
    fn ordinal(&self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    fn from_ordinal(ord: i64) -> Self {
        let year = ord.div_euclid(12);
        let month = ord.rem_euclid(12) + 1;
        Self {
            year: year as i32,
            month: month as u8,
        }
    }

    /// The month `k` steps after `self` (negative `k` steps back).
    pub fn plus(&self, k: i64) -> Self {
        Self::from_ordinal(self.ordinal() + k)
    }

    /// Signed number of months from `other` to `self`.
    pub fn diff(&self, other: &Month) -> i64 {
        self.ordinal() - other.ordinal()
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CoreError::MalformedDate(s.to_string());
        let (y, m) = s.split_once('-').ok_or_else(err)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(err());
        }
        let year: i32 = y.parse().map_err(|_| err())?;
        let month: u32 = m.parse().map_err(|_| err())?;
        Month::new(year, month)
    }
}

impl TryFrom<String> for Month {
    type Error = CoreError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Month> for String {
    fn from(m: Month) -> String {
        m.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let m: Month = "2005-01".parse().unwrap();
        assert_eq!(m.year(), 2005);
        assert_eq!(m.month(), 1);
        assert_eq!(m.to_string(), "2005-01");
    }

    #[test]
    fn arithmetic_crosses_year_boundaries() {
        let m: Month = "2005-11".parse().unwrap();
        assert_eq!(m.plus(2).to_string(), "2006-01");
        assert_eq!(m.plus(-11).to_string(), "2004-12");
        let end: Month = "2022-12".parse().unwrap();
        let start: Month = "2005-01".parse().unwrap();
        assert_eq!(end.diff(&start), 215);
    }

    #[test]
    fn rejects_malformed_dates() {
        for bad in ["2005-13", "2005-00", "2005/01", "200501", "05-01", "2005-1"] {
            assert!(bad.parse::<Month>().is_err(), "accepted {bad}");
        }
    }
}
