use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest box size considered; grids span `[MIN_BOX, N/4]`.
pub const MIN_BOX: usize = 20;

/// `y_i = sum_{j <= i} (x_j - mean(x))`.
pub fn profile(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    Ok(x.iter()
        .scan(0.0, |acc, v| {
            *acc += v - mean;
            Some(*acc)
        })
        .collect())
}

/// Up to `n_points` log-spaced integer box sizes in `[20, N/4]`.
pub fn box_size_grid(n: usize, n_points: usize) -> Result<Vec<usize>> {
    if n < 4 * MIN_BOX {
        return Err(Error::TooShort {
            needed: 4 * MIN_BOX,
            got: n,
        });
    }
    let hi = n / 4;
    if n_points <= 1 || hi == MIN_BOX {
        return Ok(vec![MIN_BOX]);
    }
    let (l0, l1) = ((MIN_BOX as f64).ln(), (hi as f64).ln());
    let mut grid: Vec<usize> = (0..n_points)
        .map(|k| {
            (l0 + (l1 - l0) * k as f64 / (n_points - 1) as f64)
                .exp()
                .round() as usize
        })
        .map(|s| s.clamp(MIN_BOX, hi))
        .collect();
    grid.dedup();
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    Dfa { order: usize },
    Dma { theta: f64 },
}

impl Method {
    /// Short name: `dfa1`, `bdma`, `cdma`, `fdma`, or `dma0.25` style.
    pub fn name(&self) -> String {
        match *self {
            Method::Dfa { order } => format!("dfa{order}"),
            Method::Dma { theta } if theta == 0.0 => "bdma".into(),
            Method::Dma { theta } if theta == 0.5 => "cdma".into(),
            Method::Dma { theta } if theta == 1.0 => "fdma".into(),
            Method::Dma { theta } => format!("dma{theta}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationPoint {
    pub s: usize,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationFunction {
    pub method: Method,
    pub points: Vec<FluctuationPoint>,
}

fn usable_grid(n: usize, s_grid: &[usize]) -> Result<Vec<usize>> {
    let smallest = s_grid
        .iter()
        .copied()
        .min()
        .ok_or_else(|| Error::InvalidParameter("empty box-size grid".into()))?;
    if smallest == 0 || n < 4 * smallest {
        return Err(Error::TooShort {
            needed: 4 * smallest.max(1),
            got: n,
        });
    }
    if s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "box sizes must be strictly increasing".into(),
        ));
    }
    Ok(s_grid.iter().copied().filter(|&s| s <= n / 4).collect())
}

/// Orthonormal basis of polynomials of degree `<= order` on `0..s`.
fn poly_basis(s: usize, order: usize) -> Vec<Vec<f64>> {
    let half = (s as f64 - 1.0) / 2.0;
    let scale = half.max(1.0);
    let xs: Vec<f64> = (0..s).map(|i| (i as f64 - half) / scale).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    for d in 0..=order.min(s - 1) {
        let mut v: Vec<f64> = xs.iter().map(|x| x.powi(d as i32)).collect();
        for _ in 0..2 {
            for q in &basis {
                let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        basis.push(v);
    }
    basis
}

fn residual_mean_square(segment: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut r = segment.to_vec();
    for q in basis {
        let dot: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
        r.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
    }
    r.iter().map(|e| e * e).sum::<f64>() / segment.len() as f64
}

/// DFA of a profile: polynomial detrending in `floor(N/s)` boxes laid from
/// the start and as many from the end.
pub fn dfa_fluctuation(y: &[f64], s_grid: &[usize], order: usize) -> Result<FluctuationFunction> {
    let n = y.len();
    let grid = usable_grid(n, s_grid)?;
    let points = grid
        .into_iter()
        .map(|s| {
            let basis = poly_basis(s, order);
            let boxes = n / s;
            let total: f64 = (0..boxes)
                .map(|b| {
                    let head = &y[b * s..(b + 1) * s];
                    let tail = &y[n - (b + 1) * s..n - b * s];
                    residual_mean_square(head, &basis) + residual_mean_square(tail, &basis)
                })
                .sum();
            FluctuationPoint {
                s,
                f: (total / (2 * boxes) as f64).sqrt(),
            }
        })
        .collect();
    Ok(FluctuationFunction {
        method: Method::Dfa { order },
        points,
    })
}

/// `(k_B, k_F) = (floor((s-1) theta), ceil((s-1)(1-theta)))`.
pub fn dma_offsets(s: usize, theta: f64) -> (usize, usize) {
    let span = (s - 1) as f64;
    let kb = (span * theta).floor() as usize;
    let kf = (span * (1.0 - theta)).ceil() as usize;
    (kb, kf)
}

/// DMA of a profile. The trend at `i` averages `y_{i-k}` for
/// `k = -k_B..=k_F`, i.e. `k_F` past and `k_B` future points; residuals are
/// taken only where that window fits inside the series.
pub fn dma_fluctuation(y: &[f64], s_grid: &[usize], theta: f64) -> Result<FluctuationFunction> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, 1], got {theta}"
        )));
    }
    let n = y.len();
    let grid = usable_grid(n, s_grid)?;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in y {
        acc += v;
        prefix.push(acc);
    }
    let mut points = Vec::with_capacity(grid.len());
    for s in grid {
        let (kb, kf) = dma_offsets(s, theta);
        if kb + kf + 1 > n {
            return Err(Error::TooShort {
                needed: kb + kf + 1,
                got: n,
            });
        }
        let valid = kf..n - kb;
        let count = valid.len();
        let sum_sq: f64 = valid
            .map(|i| {
                let trend = (prefix[i + kb + 1] - prefix[i - kf]) / s as f64;
                (y[i] - trend).powi(2)
            })
            .sum();
        points.push(FluctuationPoint {
            s,
            f: (sum_sq / count as f64).sqrt(),
        });
    }
    Ok(FluctuationFunction {
        method: Method::Dma { theta },
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub n_points: usize,
    pub x_lo: f64,
    pub x_hi: f64,
}

/// Ordinary least squares of `ln y` on `ln x`, skipping non-positive pairs.
pub fn fit_loglog(xs: &[f64], ys: &[f64], min_points: usize) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < xs.len() {
        log::warn!(
            "log-log fit: dropped {} non-positive points",
            xs.len() - pts.len()
        );
    }
    if pts.len() < min_points.max(2) {
        return Err(Error::TooFewIntervals {
            needed: min_points.max(2),
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter(
            "log-log fit needs at least two distinct x values".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = if pts.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    Ok(ScalingFit {
        exponent: slope,
        intercept,
        stderr,
        n_points: pts.len(),
        x_lo: lo.exp(),
        x_hi: hi.exp(),
    })
}

/// Slope of `ln F` against `ln s` over the whole grid.
pub fn fit_scaling(f: &FluctuationFunction) -> Result<ScalingFit> {
    fit_scaling_range(f, 0, usize::MAX)
}

/// Slope restricted to box sizes in `[s_lo, s_hi]`.
pub fn fit_scaling_range(f: &FluctuationFunction, s_lo: usize, s_hi: usize) -> Result<ScalingFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = f
        .points
        .iter()
        .filter(|p| p.s >= s_lo && p.s <= s_hi)
        .map(|p| (p.s as f64, p.f))
        .unzip();
    fit_loglog(&xs, &ys, 5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_examples() {
        assert_eq!(profile(&[1.0, 2.0, 3.0]).unwrap(), vec![-1.0, -1.0, 0.0]);
        assert!(profile(&[4.0; 10]).unwrap().iter().all(|&v| v == 0.0));
        assert!(profile(&[]).is_err());
        let y = profile(&[0.3, 7.0, 1.1, 2.9, 13.0, 1.0]).unwrap();
        assert!(y.last().unwrap().abs() < 1e-9);
    }

    #[test]
    fn grid_bounds() {
        assert_eq!(box_size_grid(80, 20).unwrap(), vec![20]);
        let g = box_size_grid(2446, 20).unwrap();
        assert_eq!(*g.last().unwrap(), 611);
        assert_eq!(g[0], 20);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(box_size_grid(79, 20).is_err());
    }

    #[test]
    fn dma_window_arithmetic() {
        assert_eq!(dma_offsets(5, 0.5), (2, 2));
        assert_eq!(dma_offsets(5, 0.0), (0, 4));
        assert_eq!(dma_offsets(5, 1.0), (4, 0));
        for s in [20, 21, 57] {
            for theta in [0.0, 0.3, 0.5, 1.0] {
                let (kb, kf) = dma_offsets(s, theta);
                assert_eq!(kb + kf + 1, s);
            }
        }
    }

    #[test]
    fn polynomial_profile_detrends_exactly() {
        let y: Vec<f64> = (0..400)
            .map(|i| 3.0 + 0.5 * i as f64 - 1e-3 * (i as f64).powi(2))
            .collect();
        let f = dfa_fluctuation(&y, &[20, 40, 100], 2).unwrap();
        assert!(f.points.iter().all(|p| p.f < 1e-8), "{:?}", f.points);
        let lin: Vec<f64> = (0..400).map(|i| 2.0 - 0.25 * i as f64).collect();
        let f = dfa_fluctuation(&lin, &[20, 40, 100], 1).unwrap();
        assert!(f.points.iter().all(|p| p.f < 1e-9));
    }

    #[test]
    fn dfa_ignores_constant_shift_and_linear_drift() {
        let x: Vec<f64> = (0..500).map(|i| ((i * 7919) % 101) as f64).collect();
        let shifted: Vec<f64> = x.iter().map(|v| v + 17.0).collect();
        let grid = [20, 50, 120];
        let a = dfa_fluctuation(&profile(&x).unwrap(), &grid, 1).unwrap();
        let b = dfa_fluctuation(&profile(&shifted).unwrap(), &grid, 1).unwrap();
        let drift: Vec<f64> = profile(&x)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, v)| v + 0.7 * i as f64)
            .collect();
        let c = dfa_fluctuation(&drift, &grid, 1).unwrap();
        for ((p, q), r) in a.points.iter().zip(&b.points).zip(&c.points) {
            assert!((p.f - q.f).abs() < 1e-9 * p.f);
            assert!((p.f - r.f).abs() < 1e-8 * p.f);
        }
    }

    #[test]
    fn grid_above_quarter_is_dropped() {
        let y: Vec<f64> = (0..100).map(|i| ((i * 31) % 7) as f64).collect();
        let f = dfa_fluctuation(&y, &[20, 25, 30], 1).unwrap();
        assert_eq!(f.points.len(), 2);
        assert!(dfa_fluctuation(&y, &[30], 1).is_err());
        assert!(dma_fluctuation(&y, &[20], 1.5).is_err());
    }

    #[test]
    fn exact_power_law_recovered() {
        let f = FluctuationFunction {
            method: Method::Dfa { order: 1 },
            points: [20, 35, 60, 110, 200, 400]
                .iter()
                .map(|&s| FluctuationPoint {
                    s,
                    f: (s as f64).powf(0.8),
                })
                .collect(),
        };
        let fit = fit_scaling(&f).unwrap();
        assert!((fit.exponent - 0.8).abs() < 1e-9);
        assert!(fit.stderr < 1e-9);
        let narrow = fit_scaling_range(&f, 30, 500).unwrap();
        assert_eq!(narrow.n_points, 5);
    }

    #[test]
    fn zero_fluctuations_are_excluded() {
        let mut points: Vec<FluctuationPoint> = [20, 30, 40, 50, 60]
            .iter()
            .map(|&s| FluctuationPoint { s, f: s as f64 })
            .collect();
        points.push(FluctuationPoint { s: 70, f: 0.0 });
        let f = FluctuationFunction {
            method: Method::Dma { theta: 0.5 },
            points,
        };
        assert_eq!(fit_scaling(&f).unwrap().n_points, 5);
        assert_eq!(f.method.name(), "cdma");
    }
}
