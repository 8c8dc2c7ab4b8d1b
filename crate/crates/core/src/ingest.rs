//! Citation record parsing and aggregation.
//!
//! Input is a plain comma-separated file with the header
//! `year,citing,cited,count`. Quoting is not supported, so journal names
//! may not contain commas. Names are canonicalized by
//! [`normalize_journal_name`]; no abbreviation dictionary is applied, so
//! `J DOC` and `J DOCUMENTATION` remain distinct journals.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "year,citing,cited,count";

/// One aggregated journal-to-journal citation count for a year.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CitationRecord {
    pub year: i32,
    pub citing: String,
    pub cited: String,
    pub count: u64,
}

impl CitationRecord {
    pub fn new(year: i32, citing: &str, cited: &str, count: u64) -> Result<Self> {
        Ok(Self { year, citing: normalize_journal_name(citing)?, cited: normalize_journal_name(cited)?, count })
    }
}

/// Uppercases, removes periods, trims and collapses whitespace runs.
pub fn normalize_journal_name(raw: &str) -> Result<String> {
    let without_periods: String = raw.chars().filter(|&c| c != '.').collect();
    let joined = without_periods.split_whitespace().collect::<Vec<_>>().join(" ");
    if joined.is_empty() {
        return Err(Error::InvalidName(raw.to_string()));
    }
    Ok(joined.to_uppercase())
}

/// Parses the citation CSV. Line numbers in errors are 1-based and count the
/// header as line 1.
pub fn parse_citation_csv<R: BufRead>(reader: R) -> Result<Vec<CitationRecord>> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::Format(format!("missing header, expected `{CSV_HEADER}`"))),
    };
    let header = header.strip_prefix('\u{feff}').unwrap_or(&header);
    if header.trim_end_matches('\r') != CSV_HEADER {
        return Err(Error::Format(format!("bad header {:?}, expected `{CSV_HEADER}`", header.trim_end_matches('\r'))));
    }

    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        records.push(parse_line(line.trim_end_matches('\r'), line_no)?);
    }
    Ok(records)
}

fn parse_line(line: &str, line_no: usize) -> Result<CitationRecord> {
    let err = |message: String| Error::Parse { line: line_no, message };
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 4 {
        return Err(err(format!("expected 4 fields, found {}", fields.len())));
    }
    let year: i32 = fields[0].trim().parse().map_err(|_| err(format!("year {:?} is not an integer", fields[0])))?;
    let count_field = fields[3].trim();
    if count_field.starts_with('-') {
        return Err(err(format!("negative count {count_field:?}")));
    }
    let count: u64 =
        count_field.parse().map_err(|_| err(format!("count {count_field:?} is not a non-negative integer")))?;
    let citing = normalize_journal_name(fields[1]).map_err(|e| err(e.to_string()))?;
    let cited = normalize_journal_name(fields[2]).map_err(|e| err(e.to_string()))?;
    Ok(CitationRecord { year, citing, cited, count })
}

/// Counts indexed year → citing → cited. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CitationTensor {
    entries: BTreeMap<i32, BTreeMap<String, BTreeMap<String, u64>>>,
    journals: BTreeSet<String>,
}

impl CitationTensor {
    pub fn count(&self, year: i32, citing: &str, cited: &str) -> u64 {
        self.entries.get(&year).and_then(|y| y.get(citing)).and_then(|row| row.get(cited)).copied().unwrap_or(0)
    }

    /// Sorted years present in the data.
    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.entries.keys().copied()
    }

    pub fn journals(&self) -> &BTreeSet<String> {
        &self.journals
    }

    pub fn contains_journal(&self, name: &str) -> bool {
        self.journals.contains(name)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct (year, citing, cited) keys.
    pub fn len(&self) -> usize {
        self.entries.values().flat_map(|y| y.values()).map(|row| row.len()).sum()
    }

    pub fn total(&self) -> u64 {
        self.iter().map(|(_, _, _, c)| c).sum()
    }

    /// Outgoing references of `citing` in `year`, in cited-name order.
    pub fn row(&self, year: i32, citing: &str) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.entries
            .get(&year)
            .and_then(|y| y.get(citing))
            .into_iter()
            .flat_map(|row| row.iter().map(|(k, &v)| (k.as_str(), v)))
    }

    /// Incoming citations to `cited` in `year`, in citing-name order.
    pub fn column<'a>(&'a self, year: i32, cited: &'a str) -> impl Iterator<Item = (&'a str, u64)> + 'a {
        self.entries
            .get(&year)
            .into_iter()
            .flat_map(move |y| y.iter().filter_map(move |(citing, row)| row.get(cited).map(|&c| (citing.as_str(), c))))
    }

    /// All entries in (year, citing, cited) order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &str, &str, u64)> + '_ {
        self.entries.iter().flat_map(|(&year, y)| {
            y.iter().flat_map(move |(citing, row)| {
                row.iter().map(move |(cited, &c)| (year, citing.as_str(), cited.as_str(), c))
            })
        })
    }

    pub fn records(&self) -> Vec<CitationRecord> {
        self.iter()
            .map(|(year, citing, cited, count)| CitationRecord {
                year,
                citing: citing.to_string(),
                cited: cited.to_string(),
                count,
            })
            .collect()
    }

    /// Writes the tensor in the ingest CSV format, keys in sorted order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for (year, citing, cited, count) in self.iter() {
            writeln!(out, "{year},{citing},{cited},{count}")?;
        }
        Ok(())
    }

    fn add(&mut self, record: CitationRecord) {
        self.journals.insert(record.citing.clone());
        self.journals.insert(record.cited.clone());
        *self
            .entries
            .entry(record.year)
            .or_default()
            .entry(record.citing)
            .or_default()
            .entry(record.cited)
            .or_insert(0) += record.count;
    }
}

impl FromIterator<CitationRecord> for CitationTensor {
    fn from_iter<I: IntoIterator<Item = CitationRecord>>(iter: I) -> Self {
        let mut tensor = CitationTensor::default();
        for r in iter {
            tensor.add(r);
        }
        tensor
    }
}

/// Sums duplicate (year, citing, cited) keys. Self-citations are kept.
pub fn aggregate<I: IntoIterator<Item = CitationRecord>>(records: I) -> CitationTensor {
    records.into_iter().collect()
}
