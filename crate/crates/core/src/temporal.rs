//! Temporal keys and calendar-aligned bins.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::Deserialize;

use crate::error::{Error, Result};

/// A document or observation timestamp: a bare year or a calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemporalKey {
    Year(i32),
    Date(NaiveDate),
}

impl TemporalKey {
    pub fn year(self) -> i32 {
        match self {
            TemporalKey::Year(y) => y,
            TemporalKey::Date(d) => d.year(),
        }
    }

    /// Parses `YYYY` or ISO `YYYY-MM-DD`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) {
            return s.parse().ok().map(TemporalKey::Year);
        }
        NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().map(TemporalKey::Date)
    }
}

impl fmt::Display for TemporalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemporalKey::Year(y) => write!(f, "{y:04}"),
            TemporalKey::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

impl FromStr for TemporalKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TemporalKey::parse(s)
            .ok_or_else(|| Error::format("temporal key", format!("`{s}` is neither YYYY nor YYYY-MM-DD")))
    }
}

/// Native date resolution of a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Day,
    Year,
}

/// Inclusive range of admissible temporal keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    pub start: TemporalKey,
    pub end: TemporalKey,
}

impl DateRange {
    pub fn contains(&self, key: TemporalKey) -> bool {
        let (lo, hi) = (self.start.year(), self.end.year());
        match (key, self.start, self.end) {
            (TemporalKey::Date(d), TemporalKey::Date(a), TemporalKey::Date(b)) => a <= d && d <= b,
            _ => lo <= key.year() && key.year() <= hi,
        }
    }
}

/// Origin for multi-year bins: 20-year bins run 1700-1719, 1720-1739, ...
pub const MULTI_YEAR_ORIGIN: i32 = 1700;

/// Bin width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinScheme {
    Day,
    Month,
    Year,
    /// `k` calendar years aligned to [`MULTI_YEAR_ORIGIN`].
    Years(u32),
}

impl BinScheme {
    pub fn width_label(self) -> String {
        match self {
            BinScheme::Day => "1d".into(),
            BinScheme::Month => "1m".into(),
            BinScheme::Year => "1y".into(),
            BinScheme::Years(k) => format!("{k}y"),
        }
    }

    /// Bin containing `key`.
    pub fn bin_of(self, key: TemporalKey) -> Result<Bin> {
        let index = match (self, key) {
            (BinScheme::Day, TemporalKey::Date(d)) => i64::from(d.num_days_from_ce()),
            (BinScheme::Month, TemporalKey::Date(d)) => i64::from(d.year()) * 12 + i64::from(d.month0()),
            (BinScheme::Day | BinScheme::Month, TemporalKey::Year(y)) => {
                return Err(Error::InvalidBin(format!(
                    "{} bins need calendar dates, got year {y}",
                    self.width_label()
                )))
            }
            (BinScheme::Year, k) => i64::from(k.year()),
            (BinScheme::Years(w), k) => i64::from(k.year() - MULTI_YEAR_ORIGIN).div_euclid(i64::from(w)),
        };
        Ok(Bin { scheme: self, index })
    }
}

impl FromStr for BinScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let scheme = match s.trim() {
            "day" | "1d" => BinScheme::Day,
            "month" | "1m" => BinScheme::Month,
            "year" | "1y" => BinScheme::Year,
            other => {
                let k = other
                    .strip_suffix('y')
                    .and_then(|k| k.parse::<i64>().ok())
                    .ok_or_else(|| Error::InvalidBin(format!("unrecognized bin `{other}`")))?;
                if k <= 0 {
                    return Err(Error::InvalidBin(format!("bin width must be positive, got {k}")));
                }
                if k == 1 {
                    BinScheme::Year
                } else {
                    BinScheme::Years(k as u32)
                }
            }
        };
        Ok(scheme)
    }
}

/// One bin: a linear index under a scheme. Consecutive indices are adjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bin {
    pub scheme: BinScheme,
    pub index: i64,
}

impl PartialOrd for BinScheme {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BinScheme {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let rank = |s: &BinScheme| match s {
            BinScheme::Day => (0, 0),
            BinScheme::Month => (1, 0),
            BinScheme::Year => (2, 1),
            BinScheme::Years(k) => (2, *k),
        };
        rank(self).cmp(&rank(other))
    }
}

impl Bin {
    pub fn next(self) -> Bin {
        Bin {
            index: self.index + 1,
            ..self
        }
    }

    /// First year covered by the bin.
    pub fn start_year(self) -> i32 {
        match self.scheme {
            BinScheme::Day => self.start_date().map(|d| d.year()).unwrap_or_default(),
            BinScheme::Month => self.index.div_euclid(12) as i32,
            BinScheme::Year => self.index as i32,
            BinScheme::Years(k) => MULTI_YEAR_ORIGIN + (self.index * i64::from(k)) as i32,
        }
    }

    fn start_date(self) -> Option<NaiveDate> {
        match self.scheme {
            BinScheme::Day => NaiveDate::from_num_days_from_ce_opt(self.index as i32),
            BinScheme::Month => NaiveDate::from_ymd_opt(
                self.index.div_euclid(12) as i32,
                self.index.rem_euclid(12) as u32 + 1,
                1,
            ),
            _ => NaiveDate::from_ymd_opt(self.start_year(), 1, 1),
        }
    }

    /// Label of the first instant of the bin: `YYYY-MM-DD`, `YYYY-MM` or `YYYY`.
    pub fn start_label(self) -> String {
        match self.scheme {
            BinScheme::Day => self
                .start_date()
                .map(|d| d.format("%Y-%m-%d").to_string())
                .unwrap_or_else(|| format!("day{}", self.index)),
            BinScheme::Month => format!("{:04}-{:02}", self.index.div_euclid(12), self.index.rem_euclid(12) + 1),
            _ => format!("{:04}", self.start_year()),
        }
    }

    /// Enumerates `first..=last`.
    pub fn span(first: Bin, last: Bin) -> impl Iterator<Item = Bin> {
        (first.index..=last.index).map(move |index| Bin {
            scheme: first.scheme,
            index,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> TemporalKey {
        TemporalKey::Date(NaiveDate::from_ymd_opt(y, m, d).unwrap())
    }

    #[test]
    fn parses_keys() {
        assert_eq!(TemporalKey::parse("1995"), Some(TemporalKey::Year(1995)));
        assert_eq!(TemporalKey::parse("2010-06-08"), Some(date(2010, 6, 8)));
        assert_eq!(TemporalKey::parse("2010-13-08"), None);
        assert_eq!(TemporalKey::parse("95"), None);
        assert_eq!(date(1992, 11, 15).to_string(), "1992-11-15");
    }

    #[test]
    fn twenty_year_alignment() {
        let s = BinScheme::Years(20);
        let b = s.bin_of(TemporalKey::Year(1819)).unwrap();
        assert_eq!(b.start_label(), "1800");
        assert_eq!(s.bin_of(TemporalKey::Year(1820)).unwrap().start_label(), "1820");
        assert_eq!(s.bin_of(TemporalKey::Year(1699)).unwrap().start_label(), "1680");
        assert_eq!(b.next().start_label(), "1820");
    }

    #[test]
    fn month_and_day_bins() {
        let m = BinScheme::Month.bin_of(date(1992, 12, 31)).unwrap();
        assert_eq!(m.start_label(), "1992-12");
        assert_eq!(m.next().start_label(), "1993-01");
        let d = BinScheme::Day.bin_of(date(2012, 2, 28)).unwrap();
        assert_eq!(d.next().start_label(), "2012-02-29");
        assert!(BinScheme::Month.bin_of(TemporalKey::Year(1900)).is_err());
        assert_eq!(BinScheme::Year.bin_of(date(1992, 3, 1)).unwrap().start_label(), "1992");
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("20y".parse::<BinScheme>().unwrap(), BinScheme::Years(20));
        assert_eq!("month".parse::<BinScheme>().unwrap(), BinScheme::Month);
        assert!(matches!("0y".parse::<BinScheme>(), Err(Error::InvalidBin(_))));
        assert!(matches!("-5y".parse::<BinScheme>(), Err(Error::InvalidBin(_))));
        assert!("fortnight".parse::<BinScheme>().is_err());
    }

    #[test]
    fn range_membership() {
        let r = DateRange {
            start: TemporalKey::Year(1700),
            end: TemporalKey::Year(1950),
        };
        assert!(r.contains(TemporalKey::Year(1800)));
        assert!(!r.contains(TemporalKey::Year(1990)));
        assert!(r.contains(date(1950, 12, 31)));
    }
}
