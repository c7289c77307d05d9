//! Binned, normalized and smoothed per-proverb frequency series.
//!
//! The relative frequency of a bin is `count / total`, where `total` is the
//! number of dated documents in the bin (document corpora) or the supplied
//! per-period denominator (n-gram corpora). Bins with no denominator are
//! kept as explicit undefined points.

use std::collections::BTreeMap;

use crate::corpus::PeriodTotals;
use crate::error::{Error, Result};
use crate::lexicon::ProverbId;
use crate::matcher::{MatchTable, TableKind, Unit};
use crate::temporal::{Bin, BinScheme, TemporalKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CountingMode {
    /// Every occurrence counts.
    #[default]
    Occurrences,
    /// A document (or volume) counts at most once.
    DocumentPresence,
}

impl std::str::FromStr for CountingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "occurrences" => Ok(CountingMode::Occurrences),
            "presence" | "document_presence" => Ok(CountingMode::DocumentPresence),
            other => Err(Error::Unsupported(format!("unknown counting mode `{other}`"))),
        }
    }
}

/// Bin scheme plus an optional explicit range the bins must cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinSpec {
    pub scheme: BinScheme,
    pub range: Option<(TemporalKey, TemporalKey)>,
}

impl BinSpec {
    pub fn new(scheme: BinScheme) -> Self {
        BinSpec { scheme, range: None }
    }

    pub fn with_range(mut self, from: TemporalKey, to: TemporalKey) -> Self {
        self.range = Some((from, to));
        self
    }

    /// First and last bin: the explicit range, or the extent of `bins`.
    fn extent(&self, bins: impl Iterator<Item = Bin>) -> Result<Option<(Bin, Bin)>> {
        let mut lo: Option<Bin> = None;
        let mut hi: Option<Bin> = None;
        for b in bins {
            lo = Some(lo.map_or(b, |l| l.min(b)));
            hi = Some(hi.map_or(b, |h| h.max(b)));
        }
        let Some((from, to)) = self.range else {
            return Ok(lo.zip(hi));
        };
        let (first, last) = (self.scheme.bin_of(from)?, self.scheme.bin_of(to)?);
        if last < first {
            return Err(Error::InvalidBin(format!("range end {to} precedes start {from}")));
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            if l < first || h > last {
                return Err(Error::InvalidBin(format!(
                    "range {from}..{to} does not cover the corpus ({} to {})",
                    l.start_label(),
                    h.start_label()
                )));
            }
        }
        Ok(Some((first, last)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub bin: Bin,
    pub count: u64,
    pub total: Option<u64>,
    pub f_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySeries {
    pub proverb_id: ProverbId,
    pub mode: CountingMode,
    pub points: Vec<SeriesPoint>,
}

/// Fills `f_rel = count / total`; points without a positive total are undefined.
pub fn relative_frequency(series: &FrequencySeries) -> FrequencySeries {
    let points = series
        .points
        .iter()
        .map(|p| SeriesPoint {
            f_rel: match p.total {
                Some(t) if t > 0 => Some(p.count as f64 / t as f64),
                _ => None,
            },
            ..*p
        })
        .collect();
    FrequencySeries {
        points,
        ..series.clone()
    }
}

/// Bins a document table. Documents without a temporal key contribute to
/// neither counts nor totals.
pub fn bin_counts(table: &MatchTable, spec: &BinSpec, mode: CountingMode) -> Result<Vec<FrequencySeries>> {
    if table.kind() != TableKind::Documents {
        return Err(Error::Unsupported(
            "bin_counts needs a document table; use ngram_series".into(),
        ));
    }
    let mut doc_bins: BTreeMap<&str, Bin> = BTreeMap::new();
    let mut totals: BTreeMap<Bin, u64> = BTreeMap::new();
    for (doc_id, meta) in table.documents() {
        if let Some(key) = meta.temporal_key {
            let bin = spec.scheme.bin_of(key)?;
            doc_bins.insert(doc_id, bin);
            *totals.entry(bin).or_default() += 1;
        }
    }
    let Some((first, last)) = spec.extent(totals.keys().copied())? else {
        return Ok(Vec::new());
    };

    let mut out = Vec::new();
    for id in table.proverbs() {
        let mut counts: BTreeMap<Bin, u64> = BTreeMap::new();
        for (unit, cell) in table.cells_of(id).into_iter().flatten() {
            let Unit::Document(doc_id) = unit else { continue };
            if let Some(bin) = doc_bins.get(doc_id.as_str()) {
                let add = match mode {
                    CountingMode::Occurrences => cell.occurrences,
                    CountingMode::DocumentPresence => u64::from(cell.occurrences > 0),
                };
                *counts.entry(*bin).or_default() += add;
            }
        }
        let points = Bin::span(first, last)
            .map(|bin| SeriesPoint {
                bin,
                count: counts.get(&bin).copied().unwrap_or(0),
                total: Some(totals.get(&bin).copied().unwrap_or(0)),
                f_rel: None,
            })
            .collect();
        out.push(relative_frequency(&FrequencySeries {
            proverb_id: id,
            mode,
            points,
        }));
    }
    Ok(out)
}

/// Series for a period table. `Occurrences` divides by the period's total
/// n-gram count; `DocumentPresence` sums reported volume counts and divides
/// by the period's volume total.
pub fn ngram_series(
    table: &MatchTable,
    denominators: &PeriodTotals,
    scheme: BinScheme,
    mode: CountingMode,
) -> Result<Vec<FrequencySeries>> {
    if table.kind() != TableKind::Periods {
        return Err(Error::Unsupported(
            "ngram_series needs a period table; use bin_counts".into(),
        ));
    }
    // Per-bin denominators; None once any period in the bin lacks one.
    let mut totals: BTreeMap<Bin, Option<u64>> = BTreeMap::new();
    for (key, t) in &denominators.periods {
        let bin = scheme.bin_of(*key)?;
        let v = match mode {
            CountingMode::Occurrences => t.occurrences,
            CountingMode::DocumentPresence => t.documents,
        };
        let slot = totals.entry(bin).or_insert(Some(0));
        *slot = slot.zip(v).map(|(a, b)| a + b);
    }
    let mut cell_bins = Vec::new();
    for (_, unit, _) in table.cells() {
        if let Unit::Period(k) = unit {
            cell_bins.push(scheme.bin_of(*k)?);
        }
    }
    let spec = BinSpec::new(scheme);
    let Some((first, last)) = spec.extent(totals.keys().copied().chain(cell_bins))? else {
        return Ok(Vec::new());
    };

    let mut out = Vec::new();
    for id in table.proverbs() {
        let mut counts: BTreeMap<Bin, u64> = BTreeMap::new();
        for (unit, cell) in table.cells_of(id).into_iter().flatten() {
            let Unit::Period(k) = unit else { continue };
            let add = match mode {
                CountingMode::Occurrences => cell.occurrences,
                CountingMode::DocumentPresence => cell
                    .documents
                    .ok_or_else(|| Error::Unsupported(format!("period {k} has no volume counts for presence mode")))?,
            };
            *counts.entry(scheme.bin_of(*k)?).or_default() += add;
        }
        let points = Bin::span(first, last)
            .map(|bin| SeriesPoint {
                bin,
                count: counts.get(&bin).copied().unwrap_or(0),
                total: totals.get(&bin).copied().flatten(),
                f_rel: None,
            })
            .collect();
        out.push(relative_frequency(&FrequencySeries {
            proverb_id: id,
            mode,
            points,
        }));
    }
    Ok(out)
}

/// Centered moving average of `f_rel`. The window covers `(window - 1) / 2`
/// bins before and `window / 2` after each point, truncated at the edges;
/// undefined points are left out of the mean. Counts are untouched.
pub fn rolling_average(series: &FrequencySeries, window: usize) -> Result<FrequencySeries> {
    if window == 0 {
        return Err(Error::InvalidWindow);
    }
    let values: Vec<Option<f64>> = series.points.iter().map(|p| p.f_rel).collect();
    let smoothed = centered_mean(&values, window);
    let points = series
        .points
        .iter()
        .zip(smoothed)
        .map(|(p, f_rel)| SeriesPoint { f_rel, ..*p })
        .collect();
    Ok(FrequencySeries {
        points,
        ..series.clone()
    })
}

/// Mean of the defined values in each window, summed left to right.
fn centered_mean(values: &[Option<f64>], window: usize) -> Vec<Option<f64>> {
    if window == 1 {
        return values.to_vec();
    }
    let before = (window - 1) / 2;
    let after = window / 2;
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(before);
        let hi = (i + after).min(n.saturating_sub(1));
        let mut sum = 0.0;
        let mut k = 0usize;
        for v in values[lo..=hi].iter().flatten() {
            sum += v;
            k += 1;
        }
        out.push((k > 0).then(|| sum / k as f64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::DocumentMeta;
    use proptest::prelude::*;

    fn series(values: &[f64]) -> FrequencySeries {
        FrequencySeries {
            proverb_id: 0,
            mode: CountingMode::Occurrences,
            points: values
                .iter()
                .enumerate()
                .map(|(i, &v)| SeriesPoint {
                    bin: Bin {
                        scheme: BinScheme::Year,
                        index: 2000 + i as i64,
                    },
                    count: 0,
                    total: Some(1),
                    f_rel: Some(v),
                })
                .collect(),
        }
    }

    fn f_rels(s: &FrequencySeries) -> Vec<Option<f64>> {
        s.points.iter().map(|p| p.f_rel).collect()
    }

    #[test]
    fn truncated_edges() {
        let s = rolling_average(&series(&[1.0, 2.0, 3.0]), 3).unwrap();
        assert_eq!(f_rels(&s), vec![Some(1.5), Some(2.0), Some(2.5)]);
    }

    #[test]
    fn window_zero_rejected() {
        assert!(matches!(rolling_average(&series(&[1.0]), 0), Err(Error::InvalidWindow)));
    }

    #[test]
    fn undefined_points_skip_the_mean() {
        let mut s = series(&[1.0, 0.0, 3.0]);
        s.points[1].f_rel = None;
        let r = rolling_average(&s, 3).unwrap();
        assert_eq!(f_rels(&r), vec![Some(1.0), Some(2.0), Some(3.0)]);
        let mut all_none = series(&[0.0]);
        all_none.points[0].f_rel = None;
        assert_eq!(f_rels(&rolling_average(&all_none, 5).unwrap()), vec![None]);
    }

    #[test]
    fn relative_frequency_cases() {
        let mut s = series(&[0.0, 0.0, 0.0]);
        s.points[0].count = 5;
        s.points[0].total = Some(100);
        s.points[1].count = 0;
        s.points[1].total = Some(100);
        s.points[2].count = 3;
        s.points[2].total = Some(0);
        let r = relative_frequency(&s);
        assert_eq!(f_rels(&r), vec![Some(0.05), Some(0.0), None]);
    }

    fn table_with(docs: &[(&str, Option<i32>, u64)]) -> MatchTable {
        let mut t = MatchTable::new("c", TableKind::Documents);
        for (id, year, n) in docs {
            t.add_document(
                id,
                DocumentMeta {
                    temporal_key: year.map(TemporalKey::Year),
                    ..Default::default()
                },
                [(0, *n)],
            )
            .unwrap();
        }
        t
    }

    #[test]
    fn one_in_ten_documents() {
        let mut docs: Vec<(String, Option<i32>, u64)> = (0..9).map(|i| (format!("d{i}"), Some(1805), 0)).collect();
        docs.push(("hit".into(), Some(1810), 3));
        let borrowed: Vec<_> = docs.iter().map(|(a, b, c)| (a.as_str(), *b, *c)).collect();
        let t = table_with(&borrowed);
        let s = bin_counts(&t, &BinSpec::new(BinScheme::Years(20)), CountingMode::DocumentPresence).unwrap();
        assert_eq!(s[0].points.len(), 1);
        assert_eq!(s[0].points[0].f_rel, Some(0.1));
        let s = bin_counts(&t, &BinSpec::new(BinScheme::Years(20)), CountingMode::Occurrences).unwrap();
        assert_eq!(s[0].points[0].count, 3);
    }

    #[test]
    fn undated_documents_are_excluded() {
        let t = table_with(&[("a", Some(1800), 1), ("b", None, 5)]);
        let s = bin_counts(&t, &BinSpec::new(BinScheme::Year), CountingMode::Occurrences).unwrap();
        assert_eq!(s[0].points.len(), 1);
        assert_eq!(s[0].points[0].count, 1);
        assert_eq!(s[0].points[0].total, Some(1));
    }

    #[test]
    fn gaps_are_explicit_and_range_checked() {
        let t = table_with(&[("a", Some(1800), 1), ("b", Some(1803), 0)]);
        let s = bin_counts(&t, &BinSpec::new(BinScheme::Year), CountingMode::Occurrences).unwrap();
        assert_eq!(s[0].points.len(), 4);
        assert_eq!(s[0].points[1].total, Some(0));
        assert_eq!(s[0].points[1].f_rel, None);
        let narrow = BinSpec::new(BinScheme::Year).with_range(TemporalKey::Year(1801), TemporalKey::Year(1810));
        assert!(matches!(
            bin_counts(&t, &narrow, CountingMode::Occurrences),
            Err(Error::InvalidBin(_))
        ));
        let wide = BinSpec::new(BinScheme::Year).with_range(TemporalKey::Year(1799), TemporalKey::Year(1805));
        assert_eq!(
            bin_counts(&t, &wide, CountingMode::Occurrences).unwrap()[0]
                .points
                .len(),
            7
        );
    }

    #[test]
    fn empty_corpus_gives_empty_series() {
        let t = MatchTable::new("c", TableKind::Documents);
        assert!(
            bin_counts(&t, &BinSpec::new(BinScheme::Year), CountingMode::Occurrences)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn ngram_series_denominators() {
        use crate::corpus::PeriodTotal;
        use crate::matcher::Cell;
        let day = |s: &str| TemporalKey::parse(s).unwrap();
        let mut t = MatchTable::new("tw", TableKind::Periods);
        t.add_period(
            0,
            day("2012-01-01"),
            Cell {
                occurrences: 150,
                documents: None,
            },
        )
        .unwrap();
        t.add_period(
            0,
            day("2012-01-02"),
            Cell {
                occurrences: 7,
                documents: None,
            },
        )
        .unwrap();
        let mut totals = PeriodTotals::default();
        totals.observe(
            day("2012-01-01"),
            PeriodTotal {
                occurrences: Some(150_000_000),
                documents: None,
            },
        );
        totals.observe(
            day("2012-01-02"),
            PeriodTotal {
                occurrences: Some(0),
                documents: None,
            },
        );
        let s = ngram_series(&t, &totals, BinScheme::Day, CountingMode::Occurrences).unwrap();
        assert_eq!(s[0].points[0].f_rel, Some(1e-6));
        assert_eq!(s[0].points[1].f_rel, None);
        assert!(ngram_series(&t, &totals, BinScheme::Day, CountingMode::DocumentPresence).is_err());
    }

    proptest! {
        #[test]
        fn window_one_is_identity(values in proptest::collection::vec(0.0f64..1.0, 0..60)) {
            let s = series(&values);
            prop_assert_eq!(rolling_average(&s, 1).unwrap(), s);
        }

        #[test]
        fn constant_stays_constant(c in 0.0f64..1.0, n in 1usize..50, w in 1usize..12) {
            let s = rolling_average(&series(&vec![c; n]), w).unwrap();
            prop_assert_eq!(s.points.len(), n);
            for p in &s.points {
                prop_assert!((p.f_rel.unwrap() - c).abs() <= 1e-15);
            }
        }

        #[test]
        fn ratio_reconstructs_count(counts in proptest::collection::vec((0u64..1000, 1u64..1000), 1..30)) {
            let mut s = series(&vec![0.0; counts.len()]);
            for (p, (c, t)) in s.points.iter_mut().zip(&counts) {
                p.count = *c;
                p.total = Some(*t);
            }
            for (p, (c, t)) in relative_frequency(&s).points.iter().zip(&counts) {
                prop_assert_eq!((p.f_rel.unwrap() * *t as f64).round() as u64, *c);
            }
        }
    }
}
