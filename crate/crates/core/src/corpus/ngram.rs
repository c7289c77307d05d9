//! Book n-gram counts: one `ngram \t year \t occurrences \t volumes` line
//! per observation, plus per-period denominator tables.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use log::warn;

use super::{NgramObservation, SkippedLine};
use crate::error::{Error, Result};
use crate::normalize::Normalizer;
use crate::temporal::TemporalKey;

/// Streams observations from a flattened n-gram TSV.
///
/// Lines that cannot be used (bad numbers, negative counts, more volumes
/// than occurrences, n-grams that normalize to nothing) are skipped and
/// recorded in [`NgramTsvReader::skipped`].
pub struct NgramTsvReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    name: PathBuf,
    normalizer: Normalizer,
    skipped: Vec<SkippedLine>,
    error: Option<Error>,
}

impl<R: BufRead> NgramTsvReader<R> {
    pub fn new(reader: R, name: &Path, normalizer: Normalizer) -> Self {
        NgramTsvReader {
            lines: reader.lines(),
            line_no: 0,
            name: name.to_owned(),
            normalizer,
            skipped: Vec::new(),
            error: None,
        }
    }

    pub fn skipped(&self) -> &[SkippedLine] {
        &self.skipped
    }

    /// I/O failure that ended the stream early, if any.
    pub fn take_error(&mut self) -> Option<Error> {
        self.error.take()
    }

    fn skip(&mut self, reason: String) {
        warn!("{}:{}: {reason}; line skipped", self.name.display(), self.line_no);
        self.skipped.push(SkippedLine {
            line: self.line_no,
            reason,
        });
    }

    fn parse(&mut self, line: &str) -> std::result::Result<Option<NgramObservation>, String> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(format!("expected 3 or 4 tab-separated fields, found {}", fields.len()));
        }
        let tokens = self.normalizer.tokens(fields[0]);
        if tokens.is_empty() {
            return Ok(None);
        }
        let year = parse_int(fields[1], "year")?;
        let year = i32::try_from(year).map_err(|_| format!("year {year} out of range"))?;
        let occurrence_count = parse_count(fields[2], "occurrence_count")?;
        let document_count = match fields.get(3) {
            Some(f) if !f.trim().is_empty() => Some(parse_count(f, "document_count")?),
            _ => None,
        };
        if let Some(d) = document_count {
            if d > occurrence_count {
                return Err(format!(
                    "document_count {d} exceeds occurrence_count {occurrence_count}"
                ));
            }
        }
        Ok(Some(NgramObservation {
            tokens,
            temporal_key: TemporalKey::Year(year),
            occurrence_count,
            document_count,
            rank: None,
            total_in_period: None,
        }))
    }
}

fn parse_int(field: &str, what: &str) -> std::result::Result<i64, String> {
    field
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("{what} `{}` is not an integer", field.trim()))
}

pub(super) fn parse_count(field: &str, what: &str) -> std::result::Result<u64, String> {
    let v = parse_int(field, what)?;
    u64::try_from(v).map_err(|_| format!("{what} {v} is negative"))
}

impl<R: BufRead> Iterator for NgramTsvReader<R> {
    type Item = NgramObservation;

    fn next(&mut self) -> Option<NgramObservation> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => {
                    self.error = Some(Error::Ingest {
                        path: self.name.clone(),
                        line: self.line_no + 1,
                        message: e.to_string(),
                    });
                    return None;
                }
            };
            self.line_no += 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            match self.parse(line) {
                Ok(Some(obs)) => return Some(obs),
                Ok(None) => self.skip("n-gram is empty after normalization".into()),
                Err(reason) => self.skip(reason),
            }
        }
    }
}

pub fn ingest_ngram_tsv<R: BufRead>(reader: R, name: &Path, normalizer: Normalizer) -> NgramTsvReader<R> {
    NgramTsvReader::new(reader, name, normalizer)
}

/// Converts the year-tuple layout (`ngram \t year,occ,vols \t year,occ,vols ...`)
/// into one flattened line per year. Returns the number of lines written.
pub fn flatten_year_tuples(input: impl BufRead, mut out: impl Write) -> Result<usize> {
    let mut written = 0;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let ngram = fields.next().unwrap_or_default();
        for tuple in fields {
            let parts: Vec<&str> = tuple.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Ingest {
                    path: PathBuf::from("<input>"),
                    line: i + 1,
                    message: format!("tuple `{tuple}` is not year,occurrences,volumes"),
                });
            }
            writeln!(out, "{ngram}\t{}\t{}\t{}", parts[0], parts[1], parts[2])?;
            written += 1;
        }
    }
    Ok(written)
}

/// Denominators for one period.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PeriodTotal {
    /// All n-grams observed.
    pub occurrences: Option<u64>,
    /// Volumes or documents.
    pub documents: Option<u64>,
}

/// Per-period denominators for pre-aggregated corpora.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PeriodTotals {
    pub periods: BTreeMap<TemporalKey, PeriodTotal>,
}

impl PeriodTotals {
    pub fn get(&self, key: &TemporalKey) -> Option<&PeriodTotal> {
        self.periods.get(key)
    }

    /// Records a period total; repeated values keep the maximum.
    pub fn observe(&mut self, key: TemporalKey, total: PeriodTotal) {
        let slot = self.periods.entry(key).or_default();
        slot.occurrences = max_opt(slot.occurrences, total.occurrences);
        slot.documents = max_opt(slot.documents, total.documents);
    }

    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "period\toccurrences\tdocuments")?;
        for (k, t) in &self.periods {
            let f = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{k}\t{}\t{}", f(t.occurrences), f(t.documents))?;
        }
        Ok(())
    }
}

fn max_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

/// Reads `period \t occurrences [\t documents]` lines. A leading header line
/// starting with `period` is ignored; empty cells mean "unknown".
pub fn read_period_totals(text: &str, name: &Path) -> Result<PeriodTotals> {
    let mut totals = PeriodTotals::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || (i == 0 && line.starts_with("period")) {
            continue;
        }
        let err = |message: String| Error::Ingest {
            path: name.to_owned(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(err(format!("expected 2 or 3 fields, found {}", fields.len())));
        }
        let key = TemporalKey::parse(fields[0]).ok_or_else(|| err(format!("bad period `{}`", fields[0])))?;
        let cell = |f: Option<&&str>, what: &str| -> Result<Option<u64>> {
            match f {
                Some(s) if !s.trim().is_empty() => parse_count(s, what).map(Some).map_err(err),
                _ => Ok(None),
            }
        };
        let total = PeriodTotal {
            occurrences: cell(fields.get(1), "occurrences")?,
            documents: cell(fields.get(2), "documents")?,
        };
        totals.observe(key, total);
    }
    Ok(totals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(src: &str) -> (Vec<NgramObservation>, Vec<SkippedLine>) {
        let mut r = ingest_ngram_tsv(src.as_bytes(), Path::new("t.tsv"), Normalizer::default());
        let obs: Vec<_> = r.by_ref().collect();
        (obs, r.skipped().to_vec())
    }

    #[test]
    fn parses_line() {
        let (obs, skipped) = read("never say never\t1995\t412\t300\n");
        assert!(skipped.is_empty());
        assert_eq!(
            obs,
            vec![NgramObservation {
                tokens: vec!["never".into(), "say".into(), "never".into()],
                temporal_key: TemporalKey::Year(1995),
                occurrence_count: 412,
                document_count: Some(300),
                rank: None,
                total_in_period: None,
            }]
        );
    }

    #[test]
    fn case_variants_stay_separate() {
        let (obs, _) = read("never say never\t1995\t412\t300\nNever say never\t1995\t5\t5\n");
        assert_eq!(obs.len(), 2);
        assert_eq!(obs[0].tokens, obs[1].tokens);
        assert_eq!(obs[1].occurrence_count, 5);
    }

    #[test]
    fn bad_lines_are_skipped() {
        let (obs, skipped) =
            read("a b\tyear\t1\t1\n...\t1990\t1\t1\nc d\t1990\t-4\t1\ne f\t1990\t3\t9\ng h\t1990\t3\n");
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].document_count, None);
        assert_eq!(skipped.iter().map(|s| s.line).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn flattens_tuples() {
        let mut out = Vec::new();
        let n = flatten_year_tuples("time flies\t1900,3,2\t1901,5,4\n".as_bytes(), &mut out).unwrap();
        assert_eq!(n, 2);
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "time flies\t1900\t3\t2\ntime flies\t1901\t5\t4\n"
        );
        assert!(flatten_year_tuples("x\t1900,3\n".as_bytes(), Vec::new()).is_err());
    }

    #[test]
    fn totals_table() {
        let t = read_period_totals(
            "period\toccurrences\tdocuments\n1900\t1000\t10\n1901\t\t12\n",
            Path::new("t"),
        )
        .unwrap();
        assert_eq!(t.get(&TemporalKey::Year(1900)).unwrap().occurrences, Some(1000));
        assert_eq!(t.get(&TemporalKey::Year(1901)).unwrap().occurrences, None);
        assert!(read_period_totals("1900\tmany\n", Path::new("t")).is_err());
    }
}
