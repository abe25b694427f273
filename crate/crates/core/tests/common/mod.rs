//! Synthetic inputs shared by the integration tests.
#![allow(dead_code)]

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use revol_core::seed;

pub fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::stream(seed, 0);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Fourier-filtered noise whose profile scales with exponent `h`:
/// white noise shaped to a `|f|^(1 - 2h)` spectrum, zero mean, unit variance.
pub fn fourier_filtered(n: usize, h: f64, seed: u64) -> Vec<f64> {
    let m = 2 * n;
    let mut buf: Vec<Complex<f64>> = gaussian(m, seed)
        .into_iter()
        .map(|x| Complex::new(x, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    let beta = (2.0 * h - 1.0) / 2.0;
    buf[0] = Complex::new(0.0, 0.0);
    for k in 1..m {
        let f = k.min(m - k) as f64;
        buf[k] *= f.powf(-beta);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    let x: Vec<f64> = buf[..n].iter().map(|c| c.re).collect();
    let mean = x.iter().sum::<f64>() / n as f64;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    x.iter().map(|v| (v - mean) / sd).collect()
}

/// Prices whose log-returns have long-memory volatility: the log of the
/// return scale is a Fourier-filtered series with exponent 0.9.
pub fn clustered_prices(n: usize, seed: u64) -> Vec<f64> {
    let log_scale = fourier_filtered(n, 0.9, seed::derive(seed, &[1]));
    let shocks = gaussian(n, seed::derive(seed, &[2]));
    let mut p = 50.0;
    let mut out = Vec::with_capacity(n);
    out.push(p);
    for t in 1..n {
        p *= (0.01 * (0.8 * log_scale[t]).exp() * shocks[t]).exp();
        out.push(p);
    }
    out
}

pub fn write_price_csv(path: &Path, prices: &[f64]) {
    let start = chrono::NaiveDate::from_ymd_opt(1983, 4, 4).unwrap();
    let mut body = String::from("date,price\n");
    for (i, p) in prices.iter().enumerate() {
        let d = start + chrono::Days::new(i as u64);
        body.push_str(&format!("{},{p}\n", d.format("%Y-%m-%d")));
    }
    std::fs::write(path, body).unwrap();
}
