//! Pairwise citation traffic over time and centered moving averages.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::CitationTensor;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSeries {
    pub citing: String,
    pub cited: String,
    /// Strictly ascending years.
    pub points: Vec<(i32, f64)>,
    /// Centered window means; only full windows.
    pub smoothed: Vec<(i32, f64)>,
}

/// Counts `a → b` and `b → a` for each listed year, absent keys as zero.
/// `years` must be strictly ascending. The returned series are not smoothed.
pub fn pair_series(tensor: &CitationTensor, a: &str, b: &str, years: &[i32]) -> Result<(TrendSeries, TrendSeries)> {
    if years.is_empty() {
        return Err(Error::Parameter("year range is empty".into()));
    }
    if years.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("years must be strictly ascending".into()));
    }
    let series = |from: &str, to: &str| TrendSeries {
        citing: from.to_string(),
        cited: to.to_string(),
        points: years.iter().map(|&y| (y, tensor.count(y, from, to) as f64)).collect(),
        smoothed: Vec::new(),
    };
    Ok((series(a, b), series(b, a)))
}

/// Every calendar year from `first` to `last` inclusive.
pub fn calendar_years(first: i32, last: i32) -> Vec<i32> {
    (first..=last).collect()
}

/// Years present in the data within `[first, last]`. A biennial dataset
/// yields every other year, so windows then span consecutive sampled years.
pub fn available_years(tensor: &CitationTensor, first: i32, last: i32) -> Vec<i32> {
    tensor.years().filter(|y| (first..=last).contains(y)).collect()
}

/// Divides each count by the citing journal's total references that year
/// (zero when the journal cites nothing).
pub fn as_shares(tensor: &CitationTensor, series: &mut TrendSeries) {
    for (year, value) in series.points.iter_mut() {
        let total: u64 = tensor.row(*year, &series.citing).map(|(_, c)| c).sum();
        *value = if total == 0 { 0.0 } else { *value / total as f64 };
    }
}

/// Centered mean over `window` consecutive points, emitted only for full
/// windows and dated at the window's center.
pub fn moving_average(points: &[(i32, f64)], window: usize) -> Result<Vec<(i32, f64)>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::Parameter(format!("window must be a positive odd number, got {window}")));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Parameter("points must be sorted by year".into()));
    }
    let half = window / 2;
    Ok(points.windows(window).map(|w| (w[half].0, w.iter().map(|p| p.1).sum::<f64>() / window as f64)).collect())
}

impl TrendSeries {
    pub fn smooth(&mut self, window: usize) -> Result<()> {
        self.smoothed = moving_average(&self.points, window)?;
        Ok(())
    }

    pub fn smoothed_at(&self, year: i32) -> Option<f64> {
        self.smoothed.iter().find(|p| p.0 == year).map(|p| p.1)
    }
}
