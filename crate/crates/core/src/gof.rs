//! Kolmogorov-Smirnov and Cramer-von Mises tests.
//!
//! Two-sample KS compares scaled interval distributions across thresholds.
//! The one-sample statistics measure a truncated stretched-exponential fit;
//! their p-values come from a parametric bootstrap against the same fitted
//! distribution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::recurrence::ThresholdSweep;
use crate::seed;
use crate::sefit::{self, cdf_fn, Likelihood, StretchedExpParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTwoSampleResult {
    pub ks: f64,
    pub cv: f64,
    pub m: usize,
    pub n: usize,
    pub reject: bool,
    /// False when the sample ranges were disjoint and the statistic was
    /// taken over their union instead of the overlap.
    pub overlap: bool,
}

/// Coefficient `c(alpha)` of the large-sample two-sample KS critical value.
///
/// Tabulated values are used at the usual significance levels (1.36 at 5%),
/// otherwise `sqrt(-ln(alpha / 2) / 2)`.
pub fn critical_coefficient(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    const TABLE: [(f64, f64); 8] = [
        (0.20, 1.07),
        (0.15, 1.14),
        (0.10, 1.22),
        (0.05, 1.36),
        (0.025, 1.48),
        (0.01, 1.63),
        (0.005, 1.73),
        (0.001, 1.95),
    ];
    Ok(TABLE
        .iter()
        .find(|(a, _)| (a - alpha).abs() < 1e-12)
        .map(|(_, c)| *c)
        .unwrap_or_else(|| (-(alpha / 2.0).ln() / 2.0).sqrt()))
}

/// Two-sample KS on the overlap of the two sample ranges.
pub fn ks_two_sample(x: &[f64], y: &[f64], alpha: f64) -> Result<KsTwoSampleResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidParameter(
            "two-sample KS needs two nonempty samples".into(),
        ));
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (m, n) = (xs.len(), ys.len());
    let lo = xs[0].max(ys[0]);
    let hi = xs[m - 1].min(ys[n - 1]);
    let overlap = lo <= hi;
    if !overlap {
        log::warn!("two-sample KS: sample ranges are disjoint, using their union");
    }

    let (mut i, mut j) = (0, 0);
    let mut ks: f64 = 0.0;
    while i < m || j < n {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < m && xs[i] <= v {
            i += 1;
        }
        while j < n && ys[j] <= v {
            j += 1;
        }
        if !overlap || (v >= lo && v <= hi) {
            ks = ks.max((i as f64 / m as f64 - j as f64 / n as f64).abs());
        }
    }
    let cv = critical_coefficient(alpha)? * ((m + n) as f64 / (m as f64 * n as f64)).sqrt();
    Ok(KsTwoSampleResult {
        ks,
        cv,
        m,
        n,
        reject: ks > cv,
        overlap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPair {
    pub q_i: f64,
    pub q_j: f64,
    #[serde(flatten)]
    pub result: KsTwoSampleResult,
}

/// Two-sample KS of the mean-scaled intervals for every threshold pair.
pub fn scaling_matrix(sweep: &ThresholdSweep, alpha: f64) -> Result<Vec<ScalingPair>> {
    if sweep.series.len() < 2 {
        return Err(Error::InvalidParameter(
            "scaling test needs at least two thresholds".into(),
        ));
    }
    let scaled = sweep
        .series
        .iter()
        .map(|r| r.scaled())
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for i in 0..scaled.len() {
        for j in i + 1..scaled.len() {
            pairs.push(ScalingPair {
                q_i: sweep.series[i].q.value(),
                q_j: sweep.series[j].q.value(),
                result: ks_two_sample(&scaled[i], &scaled[j], alpha)?,
            });
        }
    }
    Ok(pairs)
}

fn sorted_checked(data: &[f64], fit: &StretchedExpParams) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::InvalidParameter("empty truncated sample".into()));
    }
    if let Some(x) = data.iter().find(|&&x| !(x >= fit.tau_min)) {
        return Err(Error::InvalidParameter(format!(
            "value {x} lies below tau_min = {}",
            fit.tau_min
        )));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Largest gap between the (right-continuous) empirical CDF and `cdf`,
/// evaluated at the distinct sample values. Ties form a single step, so
/// integer-valued samples are compared at their support points.
pub fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        d = d.max((j as f64 / n - cdf(v)).abs());
        i = j;
    }
    d
}

/// `W^2 = 1/(12N) + sum_i (F(x_(i)) - (2i-1)/(2N))^2`.
pub fn cvm_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    1.0 / (12.0 * n)
        + sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| (cdf(x) - (2 * i + 1) as f64 / (2.0 * n)).powi(2))
            .sum::<f64>()
}

pub fn ks_one_sample(truncated: &[f64], fit: &StretchedExpParams) -> Result<f64> {
    let sorted = sorted_checked(truncated, fit)?;
    Ok(ks_sorted(&sorted, cdf_fn(fit)))
}

pub fn cvm_statistic(truncated: &[f64], fit: &StretchedExpParams) -> Result<f64> {
    let sorted = sorted_checked(truncated, fit)?;
    Ok(cvm_sorted(&sorted, cdf_fn(fit)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Ks,
    Cvm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub n_boot: usize,
    pub seed: u64,
    /// Refit `(a, gamma)` at the fixed cutoff for every replicate.
    pub refit: bool,
    /// Round replicate draws up to integers, mirroring integer intervals.
    pub round: bool,
    pub execution: Execution,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            n_boot: 10_000,
            seed: 0,
            refit: false,
            round: false,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    const BINS: usize = 40;

    fn of(sorted: &[f64]) -> Self {
        let lo = sorted[0];
        let hi = sorted[sorted.len() - 1];
        let width = if hi > lo {
            (hi - lo) / Self::BINS as f64
        } else {
            1.0
        };
        let edges = (0..=Self::BINS).map(|k| lo + k as f64 * width).collect();
        let mut counts = vec![0; Self::BINS];
        for &x in sorted {
            let k = (((x - lo) / width) as usize).min(Self::BINS - 1);
            counts[k] += 1;
        }
        Self { edges, counts }
    }

    /// Density per bin (integrates to one).
    pub fn densities(&self) -> Vec<f64> {
        let total: usize = self.counts.iter().sum();
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, w)| c as f64 / (total as f64 * (w[1] - w[0])))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: Statistic,
    pub observed: f64,
    /// Fraction of replicates whose statistic exceeds `observed`.
    pub p_value: f64,
    pub mc_stderr: f64,
    pub n_boot: usize,
    pub replicate_quantiles: Quantiles,
    pub histogram: Histogram,
    pub refit_failures: usize,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let k = h.floor() as usize;
    let frac = h - k as f64;
    match sorted.get(k + 1) {
        Some(&next) => sorted[k] + frac * (next - sorted[k]),
        None => sorted[k],
    }
}

/// Summarizes replicate statistics against an observed value.
pub fn summarize(
    statistic: Statistic,
    observed: f64,
    mut replicates: Vec<f64>,
    refit_failures: usize,
) -> GofResult {
    let n_boot = replicates.len();
    let exceed = replicates.iter().filter(|&&r| r > observed).count();
    let p = exceed as f64 / n_boot as f64;
    replicates.sort_by(f64::total_cmp);
    GofResult {
        statistic,
        observed,
        p_value: p,
        mc_stderr: (p * (1.0 - p) / n_boot as f64).sqrt(),
        n_boot,
        replicate_quantiles: Quantiles {
            q05: quantile(&replicates, 0.05),
            q25: quantile(&replicates, 0.25),
            q50: quantile(&replicates, 0.50),
            q75: quantile(&replicates, 0.75),
            q95: quantile(&replicates, 0.95),
        },
        histogram: Histogram::of(&replicates),
        refit_failures,
    }
}

/// KS and CvM replicate statistics for replicate `index`.
fn replicate(
    fit: &StretchedExpParams,
    n: usize,
    opts: &BootstrapOptions,
    index: usize,
) -> (f64, f64, bool) {
    let mut rng = seed::stream(opts.seed, index as u64);
    let mut draws = sefit::sample_with_rng(fit, n, &mut rng);
    if opts.round {
        for x in &mut draws {
            *x = x.ceil();
        }
    }
    let mut reference = *fit;
    let mut failed = false;
    if opts.refit {
        match sefit::fit_truncated(&draws, fit.tau_min, Likelihood::Continuous) {
            Ok(f) => reference = f.params,
            Err(_) => failed = true,
        }
    }
    draws.sort_by(f64::total_cmp);
    let cdf = cdf_fn(&reference);
    (ks_sorted(&draws, &cdf), cvm_sorted(&draws, &cdf), failed)
}

/// Bootstrap p-values of both statistics from one shared set of replicates.
///
/// Each replicate draws `truncated.len()` values from `fit` with its own
/// generator derived from `(seed, replicate index)`.
pub fn bootstrap_pvalues(
    truncated: &[f64],
    fit: &StretchedExpParams,
    opts: &BootstrapOptions,
) -> Result<(GofResult, GofResult)> {
    if opts.n_boot < 100 {
        return Err(Error::InvalidParameter(format!(
            "n_boot must be at least 100, got {}",
            opts.n_boot
        )));
    }
    let sorted = sorted_checked(truncated, fit)?;
    let cdf = cdf_fn(fit);
    let observed_ks = ks_sorted(&sorted, &cdf);
    let observed_cvm = cvm_sorted(&sorted, &cdf);
    let n = sorted.len();
    let reps = opts
        .execution
        .map_range(opts.n_boot, |i| replicate(fit, n, opts, i));
    let failures = reps.iter().filter(|r| r.2).count();
    if failures > 0 {
        log::warn!(
            "{failures} of {} replicate refits failed; the original fit was used for them",
            opts.n_boot
        );
    }
    let ks = summarize(
        Statistic::Ks,
        observed_ks,
        reps.iter().map(|r| r.0).collect(),
        failures,
    );
    let cvm = summarize(
        Statistic::Cvm,
        observed_cvm,
        reps.iter().map(|r| r.1).collect(),
        failures,
    );
    Ok((ks, cvm))
}

pub fn bootstrap_pvalue(
    statistic: Statistic,
    truncated: &[f64],
    fit: &StretchedExpParams,
    opts: &BootstrapOptions,
) -> Result<GofResult> {
    let (ks, cvm) = bootstrap_pvalues(truncated, fit, opts)?;
    Ok(match statistic {
        Statistic::Ks => ks,
        Statistic::Cvm => cvm,
    })
}
