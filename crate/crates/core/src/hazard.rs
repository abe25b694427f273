//! Probability that the next exceedance arrives within `dt` days after `t`
//! quiet days: `W(dt | t) = P(t < tau <= t + dt) / P(tau > t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::RecurrenceSeries;
use crate::sefit::StretchedExpParams;

/// Empirical points with fewer intervals at risk are flagged.
pub const DEFAULT_RISK_FLOOR: usize = 10;
pub const DEFAULT_DTS: [u32; 3] = [1, 5, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFlag {
    /// No interval exceeds `t`; `w` is undefined.
    Undefined,
    /// Fewer intervals at risk than the configured floor.
    LowConfidence,
    /// Model evaluated below the fitted cutoff.
    Extrapolated,
    /// Survival underflowed; `w` reported as zero.
    Underflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardPoint {
    pub t: f64,
    pub w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_at_risk: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flag: Option<PointFlag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardCurve {
    pub q: f64,
    pub dt: u32,
    pub points: Vec<HazardPoint>,
}

/// Integers `0..=floor(5 tbar)`.
pub fn default_t_grid(mean_interval: f64) -> Vec<f64> {
    (0..=(5.0 * mean_interval).floor() as u64)
        .map(|t| t as f64)
        .collect()
}

fn check_dt(dt: u32) -> Result<()> {
    if dt == 0 {
        Err(Error::InvalidParameter("dt must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `#(t < tau <= t + dt) / #(tau > t)` over the grid.
pub fn hazard_empirical(
    r: &RecurrenceSeries,
    dt: u32,
    t_grid: &[f64],
    risk_floor: usize,
) -> Result<HazardCurve> {
    if r.is_empty() {
        return Err(Error::EmptyRecurrence { q: r.q.value() });
    }
    hazard_empirical_values(&r.intervals_f64(), r.q.value(), dt, t_grid, risk_floor)
}

pub fn hazard_empirical_values(
    intervals: &[f64],
    q: f64,
    dt: u32,
    t_grid: &[f64],
    risk_floor: usize,
) -> Result<HazardCurve> {
    check_dt(dt)?;
    if intervals.is_empty() {
        return Err(Error::InvalidParameter("no intervals".into()));
    }
    let mut sorted = intervals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let above = |x: f64| sorted.len() - sorted.partition_point(|&v| v <= x);
    let points = t_grid
        .iter()
        .map(|&t| {
            let at_risk = above(t);
            if at_risk == 0 {
                return HazardPoint {
                    t,
                    w: None,
                    n_at_risk: Some(0),
                    flag: Some(PointFlag::Undefined),
                };
            }
            let hits = at_risk - above(t + f64::from(dt));
            HazardPoint {
                t,
                w: Some(hits as f64 / at_risk as f64),
                n_at_risk: Some(at_risk),
                flag: (at_risk < risk_floor).then_some(PointFlag::LowConfidence),
            }
        })
        .collect();
    Ok(HazardCurve { q, dt, points })
}

/// Hazard of the fitted density integrated over the untruncated support:
/// `1 - Q(1/gamma, (a (t + dt))^gamma) / Q(1/gamma, (a t)^gamma)`.
pub fn hazard_model(
    fit: &StretchedExpParams,
    q: f64,
    dt: u32,
    t_grid: &[f64],
) -> Result<HazardCurve> {
    check_dt(dt)?;
    if let Some(t) = t_grid.iter().find(|&&t| !(t >= 0.0)) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let points = t_grid
        .iter()
        .map(|&t| {
            let ln_ratio = fit.ln_survival(t + f64::from(dt)) - fit.ln_survival(t);
            let w = -ln_ratio.exp_m1();
            let (w, flag) = if w.is_finite() {
                (
                    w.clamp(0.0, 1.0),
                    (t < fit.tau_min).then_some(PointFlag::Extrapolated),
                )
            } else {
                (0.0, Some(PointFlag::Underflow))
            };
            HazardPoint {
                t,
                w: Some(w),
                n_at_risk: None,
                flag,
            }
        })
        .collect();
    Ok(HazardCurve { q, dt, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Source;
    use crate::recurrence::Threshold;

    fn series(intervals: Vec<u32>) -> RecurrenceSeries {
        RecurrenceSeries {
            q: Threshold::new(1.0).unwrap(),
            intervals,
            exceedance_times: vec![],
            source: Source::Original,
        }
    }

    #[test]
    fn hand_enumerated_point() {
        let r = series(vec![1, 1, 2, 3, 5, 8]);
        let c = hazard_empirical(&r, 1, &[2.0], 1).unwrap();
        assert_eq!(c.points[0].n_at_risk, Some(3));
        assert!((c.points[0].w.unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn wide_window_is_certain() {
        let r = series(vec![1, 1, 2, 3, 5, 8]);
        let c = hazard_empirical(&r, 1000, &[0.0, 1.0, 2.0, 4.0, 7.0], 1).unwrap();
        assert!(c.points.iter().all(|p| p.w == Some(1.0)));
        let c = hazard_empirical(&r, 8, &[0.0], 1).unwrap();
        assert_eq!(c.points[0].w, Some(1.0));
    }

    #[test]
    fn undefined_and_low_confidence_points() {
        let r = series(vec![1, 2, 3]);
        let c = hazard_empirical(&r, 1, &[0.0, 3.0], 10).unwrap();
        assert_eq!(c.points[0].flag, Some(PointFlag::LowConfidence));
        assert_eq!(c.points[1].w, None);
        assert_eq!(c.points[1].flag, Some(PointFlag::Undefined));
        assert!(hazard_empirical(&r, 0, &[0.0], 10).is_err());
        assert!(hazard_empirical(&series(vec![]), 1, &[0.0], 10).is_err());
    }

    #[test]
    fn at_risk_counts_decrease() {
        let r = series(vec![4, 1, 9, 2, 2, 7, 3, 1, 12]);
        let c = hazard_empirical(&r, 2, &default_t_grid(5.0), 1).unwrap();
        let risk: Vec<usize> = c.points.iter().map(|p| p.n_at_risk.unwrap()).collect();
        assert!(risk.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn exponential_is_memoryless() {
        let p = StretchedExpParams::new(0.3, 0.3, 1.0, 0.0).unwrap();
        let grid: Vec<f64> = (0..100).map(f64::from).collect();
        let c = hazard_model(&p, 1.0, 2, &grid).unwrap();
        let expect = 1.0 - (-0.6f64).exp();
        for pt in &c.points {
            assert!((pt.w.unwrap() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn model_monotone_in_t_and_dt() {
        let p = StretchedExpParams::truncated(0.5, 0.35, 1.0).unwrap();
        let grid: Vec<f64> = (0..200).map(|t| f64::from(t) * 0.5).collect();
        let w1 = hazard_model(&p, 1.0, 1, &grid).unwrap();
        let w5 = hazard_model(&p, 1.0, 5, &grid).unwrap();
        for pair in w1.points.windows(2) {
            assert!(pair[1].w.unwrap() < pair[0].w.unwrap());
        }
        for (a, b) in w1.points.iter().zip(&w5.points) {
            assert!(a.w.unwrap() <= b.w.unwrap());
        }
        assert_eq!(w1.points[0].flag, Some(PointFlag::Extrapolated));
        assert_eq!(w1.points[2].flag, None);
    }

    #[test]
    fn model_survives_far_tail() {
        let p = StretchedExpParams::truncated(1.0, 0.5, 1.0).unwrap();
        let c = hazard_model(&p, 1.0, 1, &[1e8]).unwrap();
        let w = c.points[0].w.unwrap();
        assert!(w > 0.0 && w < 1e-3);
    }
}
