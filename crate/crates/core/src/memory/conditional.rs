use serde::{Deserialize, Serialize};

use super::fluctuation::{fit_loglog, ScalingFit};
use crate::error::{Error, Result};
use crate::recurrence::{RecurrenceSeries, ThresholdSweep};

/// Logarithmic histogram resolution for conditional densities.
pub const BINS_PER_DECADE: f64 = 8.0;

/// Rank-based split of the intervals that have a predecessor.
///
/// `assignment[j]` is the subset of interval `j + 1`, decided by the rank
/// of interval `j` (its predecessor). Ties keep time order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub k: usize,
    pub assignment: Vec<usize>,
}

impl Partition {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &s in &self.assignment {
            sizes[s] += 1;
        }
        sizes
    }
}

pub fn partition_by_preceding(r: &RecurrenceSeries, k: usize) -> Result<Partition> {
    partition_values(&r.intervals_f64(), k)
}

pub fn partition_values(intervals: &[f64], k: usize) -> Result<Partition> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let m = intervals.len().saturating_sub(1);
    if m < k {
        return Err(Error::TooFewIntervals {
            needed: k + 1,
            got: intervals.len(),
        });
    }
    let mut order: Vec<usize> = (0..m).collect();
    // Stable sort: equal predecessors stay in time order.
    order.sort_by(|&a, &b| intervals[a].total_cmp(&intervals[b]));
    let mut assignment = vec![0; m];
    for (rank, &j) in order.iter().enumerate() {
        assignment[j] = rank * k / m;
    }
    Ok(Partition { k, assignment })
}

/// Intervals whose predecessor falls in subset `i`.
pub fn subset_values(intervals: &[f64], partition: &Partition, i: usize) -> Vec<f64> {
    partition
        .assignment
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == i)
        .map(|(j, _)| intervals[j + 1])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdfBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPdf {
    pub subset: usize,
    pub n: usize,
    pub bins: Vec<PdfBin>,
}

/// Density of the intervals following a predecessor in subset `i`, on
/// logarithmic bins.
pub fn conditional_pdf(
    r: &RecurrenceSeries,
    partition: &Partition,
    i: usize,
) -> Result<ConditionalPdf> {
    if i >= partition.k {
        return Err(Error::InvalidParameter(format!(
            "subset {i} out of range for k = {}",
            partition.k
        )));
    }
    let values = subset_values(&r.intervals_f64(), partition, i);
    if values.is_empty() {
        return Err(Error::InvalidParameter(format!("subset {i} is empty")));
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = (lo.log10() * BINS_PER_DECADE).floor() as i64;
    let last = (hi.log10() * BINS_PER_DECADE).floor() as i64 + 1;
    let edge = |k: i64| 10f64.powf(k as f64 / BINS_PER_DECADE);
    let mut counts = vec![0usize; (last - first) as usize];
    for &v in &values {
        let mut k = ((v.log10() * BINS_PER_DECADE).floor() as i64 - first) as usize;
        // Guard against log10 rounding across an edge.
        while k > 0 && v < edge(first + k as i64) {
            k -= 1;
        }
        while k + 1 < counts.len() && v >= edge(first + k as i64 + 1) {
            k += 1;
        }
        counts[k] += 1;
    }
    let n = values.len();
    let bins = counts
        .iter()
        .enumerate()
        .map(|(k, &count)| {
            let (lo, hi) = (edge(first + k as i64), edge(first + k as i64 + 1));
            PdfBin {
                lo,
                hi,
                count,
                density: count as f64 / (n as f64 * (hi - lo)),
            }
        })
        .collect();
    Ok(ConditionalPdf { subset: i, n, bins })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalMeanPoint {
    pub q: f64,
    pub subset: usize,
    /// Mean preceding interval of the subset over the overall mean.
    pub tau0_scaled: f64,
    /// Mean following interval of the subset over the overall mean.
    pub mean_scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalMeans {
    pub points: Vec<ConditionalMeanPoint>,
    /// Exponent of `mean_scaled ~ tau0_scaled^beta`, pooled over thresholds.
    pub beta: ScalingFit,
}

pub fn conditional_means(sweep: &ThresholdSweep, k: usize) -> Result<ConditionalMeans> {
    let mut points = Vec::with_capacity(k * sweep.series.len());
    for r in &sweep.series {
        let values = r.intervals_f64();
        let partition = partition_values(&values, k)?;
        let tbar = r
            .mean_interval()
            .ok_or(Error::EmptyRecurrence { q: r.q.value() })?;
        let mut sum0 = vec![0.0; k];
        let mut sum1 = vec![0.0; k];
        for (j, &s) in partition.assignment.iter().enumerate() {
            sum0[s] += values[j];
            sum1[s] += values[j + 1];
        }
        for (s, size) in partition.sizes().into_iter().enumerate() {
            points.push(ConditionalMeanPoint {
                q: r.q.value(),
                subset: s,
                tau0_scaled: sum0[s] / size as f64 / tbar,
                mean_scaled: sum1[s] / size as f64 / tbar,
            });
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.tau0_scaled).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_scaled).collect();
    let beta = fit_loglog(&xs, &ys, 3)?;
    Ok(ConditionalMeans { points, beta })
}
