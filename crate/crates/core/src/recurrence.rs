//! Waiting times between successive threshold exceedances.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Source, VolatilitySeries};

/// Threshold in units of the volatility standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q.is_finite() {
            Ok(Self(q))
        } else {
            Err(Error::InvalidParameter(format!(
                "threshold must be positive, got {q}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

/// Recurrence intervals above one threshold.
///
/// With fewer than two exceedances the interval list is empty and
/// [`RecurrenceSeries::is_empty`] is true; fitting refuses such series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSeries {
    pub q: Threshold,
    pub intervals: Vec<u32>,
    pub exceedance_times: Vec<usize>,
    pub source: Source,
}

impl RecurrenceSeries {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Arithmetic mean of the intervals, `None` when empty.
    pub fn mean_interval(&self) -> Option<f64> {
        if self.is_empty() {
            None
        } else {
            Some(self.intervals.iter().map(|&t| f64::from(t)).sum::<f64>() / self.len() as f64)
        }
    }

    pub fn intervals_f64(&self) -> Vec<f64> {
        self.intervals.iter().map(|&t| f64::from(t)).collect()
    }

    /// Intervals divided by their mean.
    pub fn scaled(&self) -> Result<Vec<f64>> {
        let mean = self
            .mean_interval()
            .ok_or(Error::EmptyRecurrence { q: self.q.value() })?;
        Ok(self
            .intervals
            .iter()
            .map(|&t| f64::from(t) / mean)
            .collect())
    }

    /// One-column CSV (`tau`) of the intervals.
    pub fn csv_text(&self) -> String {
        let mut body = String::from("tau\n");
        for t in &self.intervals {
            body.push_str(&t.to_string());
            body.push('\n');
        }
        body
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out =
            std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
        out.write_all(self.csv_text().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

/// Exceedances are indices with `v > q` strictly; intervals are their
/// successive differences.
pub fn extract(v: &VolatilitySeries, q: Threshold) -> RecurrenceSeries {
    let exceedance_times: Vec<usize> = v
        .values
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > q.value())
        .map(|(i, _)| i)
        .collect();
    let intervals = exceedance_times
        .windows(2)
        .map(|w| (w[1] - w[0]) as u32)
        .collect();
    RecurrenceSeries {
        q,
        intervals,
        exceedance_times,
        source: v.source,
    }
}

/// Recurrence series for several strictly increasing thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweep {
    pub series: Vec<RecurrenceSeries>,
}

impl ThresholdSweep {
    pub fn get(&self, q: f64) -> Option<&RecurrenceSeries> {
        self.series.iter().find(|r| r.q.value() == q)
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.series.iter().map(|r| r.q.value()).collect()
    }
}

pub fn threshold_sweep(v: &VolatilitySeries, qs: &[Threshold]) -> Result<ThresholdSweep> {
    if let Some(w) = qs.windows(2).find(|w| w[0].value() >= w[1].value()) {
        return Err(Error::InvalidParameter(format!(
            "thresholds must be strictly increasing ({} then {})",
            w[0].value(),
            w[1].value()
        )));
    }
    Ok(ThresholdSweep {
        series: qs.iter().map(|&q| extract(v, q)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vol(values: Vec<f64>) -> VolatilitySeries {
        VolatilitySeries {
            values,
            source: Source::Original,
        }
    }

    fn q(x: f64) -> Threshold {
        Threshold::new(x).unwrap()
    }

    #[test]
    fn hand_enumerated_example() {
        let r = extract(&vol(vec![0.5, 2.5, 0.3, 0.4, 2.6, 2.7]), q(2.0));
        assert_eq!(r.exceedance_times, vec![1, 4, 5]);
        assert_eq!(r.intervals, vec![3, 1]);
        assert_eq!(r.mean_interval(), Some(2.0));
        assert_eq!(r.scaled().unwrap(), vec![1.5, 0.5]);
    }

    #[test]
    fn threshold_above_max_is_empty() {
        let r = extract(&vol(vec![0.5, 1.0, 0.2]), q(3.0));
        assert!(r.is_empty());
        assert!(r.exceedance_times.is_empty());
        assert!(r.mean_interval().is_none());
        assert!(matches!(r.scaled(), Err(Error::EmptyRecurrence { .. })));
    }

    #[test]
    fn ties_at_threshold_are_excluded() {
        let r = extract(&vol(vec![2.0, 2.1, 2.0, 2.2]), q(2.0));
        assert_eq!(r.exceedance_times, vec![1, 3]);
    }

    #[test]
    fn constant_intervals_scale_to_ones() {
        let r = extract(&vol(vec![3.0, 0.0, 3.0, 0.0, 3.0, 0.0, 3.0]), q(1.0));
        assert_eq!(r.scaled().unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn sweep_rejects_unsorted_or_duplicate_thresholds() {
        let v = vol(vec![1.0, 2.0, 3.0]);
        assert!(threshold_sweep(&v, &[q(1.0), q(1.0)]).is_err());
        assert!(threshold_sweep(&v, &[q(2.0), q(1.0)]).is_err());
        assert!(Threshold::new(0.0).is_err());
    }

    proptest! {
        #[test]
        fn interval_invariants(values in prop::collection::vec(0.0f64..4.0, 0..400), qv in 0.1f64..3.0) {
            let r = extract(&vol(values), q(qv));
            if r.exceedance_times.len() >= 2 {
                prop_assert_eq!(r.intervals.len(), r.exceedance_times.len() - 1);
                prop_assert!(r.intervals.iter().all(|&t| t >= 1));
                let total: u64 = r.intervals.iter().map(|&t| u64::from(t)).sum();
                prop_assert_eq!(total as usize, r.exceedance_times.last().unwrap() - r.exceedance_times[0]);
                let s = r.scaled().unwrap();
                let m = s.iter().sum::<f64>() / s.len() as f64;
                prop_assert!((m - 1.0).abs() < 1e-12);
            } else {
                prop_assert!(r.is_empty());
            }
        }

        #[test]
        fn exceedance_sets_nest(values in prop::collection::vec(0.0f64..4.0, 0..400)) {
            let sweep = threshold_sweep(&vol(values), &[q(1.0), q(1.5), q(2.0)]).unwrap();
            for pair in sweep.series.windows(2) {
                let lower: std::collections::HashSet<_> = pair[0].exceedance_times.iter().collect();
                prop_assert!(pair[1].exceedance_times.iter().all(|t| lower.contains(t)));
                prop_assert!(pair[1].exceedance_times.len() <= pair[0].exceedance_times.len());
            }
        }
    }
}
