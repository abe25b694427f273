//! Stretched-exponential interval distribution `P(tau) = c exp(-(a tau)^gamma)`.
//!
//! Above a cutoff `tau_min` the density is left-truncated and normalized on
//! `(tau_min, inf)`. With `z = (a tau)^gamma` the variable `z` is Gamma
//! distributed with shape `1/gamma`, so survival probabilities reduce to
//! regularized upper incomplete gamma values `Q(1/gamma, z)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gof::{ks_one_sample, ks_sorted};
use crate::optimize::NelderMead;
use crate::recurrence::RecurrenceSeries;
use crate::seed;
use crate::special::{inv_ln_gamma_q, ln_gamma, ln_gamma_q, ln_upper_gamma, MAX_GAMMA_ARG};

/// Search box for the fit: `a` in `(0, A_MAX]`, `gamma` in `[GAMMA_MIN, GAMMA_MAX]`.
pub const A_MAX: f64 = 40.0;
pub const A_MIN: f64 = 1e-6;
pub const GAMMA_MIN: f64 = 0.05;
pub const GAMMA_MAX: f64 = 2.0;
/// Smallest truncated sample a cutoff candidate may leave.
pub const MIN_TRUNCATED: usize = 50;
/// KS values closer than this count as tied; the smaller cutoff wins.
pub const KS_TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchedExpParams {
    pub a: f64,
    pub c: f64,
    pub gamma: f64,
    pub tau_min: f64,
}

impl StretchedExpParams {
    pub fn new(a: f64, c: f64, gamma: f64, tau_min: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "a must be positive, got {a}"
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "c must be positive, got {c}"
            )));
        }
        if !(gamma > 0.0 && gamma <= GAMMA_MAX) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0, 2], got {gamma}"
            )));
        }
        if !(tau_min >= 0.0 && tau_min.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau_min must be >= 0, got {tau_min}"
            )));
        }
        Ok(Self {
            a,
            c,
            gamma,
            tau_min,
        })
    }

    /// Parameters whose prefactor normalizes the density on `(tau_min, inf)`:
    /// `c = a gamma / Gamma(1/gamma, (a tau_min)^gamma)`.
    pub fn truncated(a: f64, gamma: f64, tau_min: f64) -> Result<Self> {
        let c = (a * gamma).ln() - ln_upper_gamma(1.0 / gamma, (a * tau_min).powf(gamma));
        Self::new(a, c.exp(), gamma, tau_min)
    }

    fn shape(&self) -> f64 {
        1.0 / self.gamma
    }

    fn z(&self, tau: f64) -> f64 {
        (self.a * tau).powf(self.gamma)
    }

    /// `ln Q(1/gamma, (a tau)^gamma)`: log of the untruncated survival.
    pub fn ln_survival(&self, tau: f64) -> f64 {
        ln_gamma_q(self.shape(), self.z(tau.max(0.0)))
    }

    fn ln_survival_at_cutoff(&self) -> f64 {
        self.ln_survival(self.tau_min)
    }
}

/// `(a, c)` that make `c tbar exp(-(a tbar x)^gamma)` a density of mean one
/// in `x = tau / tbar` (with `tbar = 1`).
///
/// Fails once `Gamma(2/gamma)` overflows, i.e. for `gamma` below
/// `2 / 171.62 ~ 0.01165`.
pub fn constrained_params(gamma: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let floor = 2.0 / MAX_GAMMA_ARG;
    if 2.0 / gamma > MAX_GAMMA_ARG {
        return Err(Error::GammaRange { gamma, floor });
    }
    let lg1 = ln_gamma(1.0 / gamma);
    let lg2 = ln_gamma(2.0 / gamma);
    let a = (lg2 - lg1).exp();
    let c = (gamma.ln() + lg2 - 2.0 * lg1).exp();
    Ok((a, c))
}

pub fn pdf(params: &StretchedExpParams, tau: f64) -> f64 {
    params.c * (-params.z(tau)).exp()
}

/// `P(T <= tau | T > tau_min)`.
pub fn truncated_cdf(params: &StretchedExpParams, tau: f64) -> Result<f64> {
    if tau < params.tau_min {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} is below tau_min = {}",
            params.tau_min
        )));
    }
    Ok(cdf_unchecked(params, params.ln_survival_at_cutoff(), tau))
}

fn cdf_unchecked(params: &StretchedExpParams, ln_s0: f64, tau: f64) -> f64 {
    let ratio = params.ln_survival(tau) - ln_s0;
    (-ratio.exp_m1()).clamp(0.0, 1.0)
}

/// Truncated CDF as a reusable closure (caches the cutoff survival).
pub fn cdf_fn(params: &StretchedExpParams) -> impl Fn(f64) -> f64 + '_ {
    let ln_s0 = params.ln_survival_at_cutoff();
    move |tau| {
        if tau <= params.tau_min {
            0.0
        } else {
            cdf_unchecked(params, ln_s0, tau)
        }
    }
}

/// `n` iid draws from the truncated distribution by inverting the CDF.
pub fn sample_from_fit(params: &StretchedExpParams, n: usize, seed: u64) -> Vec<f64> {
    sample_with_rng(params, n, &mut seed::stream(seed, 0))
}

pub fn sample_with_rng<R: Rng + ?Sized>(
    params: &StretchedExpParams,
    n: usize,
    rng: &mut R,
) -> Vec<f64> {
    let s = params.shape();
    let ln_s0 = params.ln_survival_at_cutoff();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            // Solve ln Q(s, z) = ln(1 - u) + ln Q(s, z_min).
            let z = inv_ln_gamma_q(s, (-u).ln_1p() + ln_s0);
            (z.powf(1.0 / params.gamma) / params.a).max(params.tau_min)
        })
        .collect()
}

/// How the truncated density is normalized during fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Likelihood {
    /// Integral over `(tau_min, inf)`.
    #[default]
    Continuous,
    /// Sum over the integers above `tau_min`; for integer-valued data.
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub likelihood: Likelihood,
    pub execution: Execution,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            likelihood: Likelihood::Continuous,
            execution: Execution::Parallel,
        }
    }
}

/// Outcome of a maximum-likelihood fit at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffFit {
    pub params: StretchedExpParams,
    pub loglik: f64,
    pub n_truncated: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ScanStatus {
    Fitted { ks: f64, gamma: f64, a: f64 },
    TooFew,
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub tau_min: u32,
    pub n_truncated: usize,
    #[serde(flatten)]
    pub status: ScanStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: StretchedExpParams,
    pub ks_stat: f64,
    pub n_truncated: usize,
    pub n_total: usize,
    pub loglik: f64,
    pub likelihood: Likelihood,
    pub scan: Vec<ScanEntry>,
}

/// Log-likelihood of `data` (all above the cutoff) under the truncated model.
pub fn log_likelihood(
    data: &[f64],
    a: f64,
    gamma: f64,
    tau_min: f64,
    likelihood: Likelihood,
) -> f64 {
    let ln_x: Vec<f64> = data.iter().map(|x| x.ln()).collect();
    -neg_log_likelihood(&ln_x, a, gamma, tau_min, likelihood)
}

fn neg_log_likelihood(
    ln_x: &[f64],
    a: f64,
    gamma: f64,
    tau_min: f64,
    likelihood: Likelihood,
) -> f64 {
    let n = ln_x.len() as f64;
    let sum_pow: f64 = ln_x.iter().map(|l| (gamma * l).exp()).sum::<f64>() * a.powf(gamma);
    let ln_norm = match likelihood {
        Likelihood::Continuous => {
            ln_upper_gamma(1.0 / gamma, (a * tau_min).powf(gamma)) - (a * gamma).ln()
        }
        Likelihood::Discrete => ln_discrete_norm(a, gamma, tau_min),
    };
    sum_pow + n * ln_norm
}

/// `ln sum_{j > tau_min} exp(-(a j)^gamma)`; the tail past a few thousand
/// terms is closed with the midpoint integral.
fn ln_discrete_norm(a: f64, gamma: f64, tau_min: f64) -> f64 {
    const MAX_TERMS: usize = 5000;
    let j0 = tau_min.floor() + 1.0;
    let offset = (a * j0).powf(gamma);
    let mut sum = 0.0;
    let mut j = j0;
    for _ in 0..MAX_TERMS {
        let term = (offset - (a * j).powf(gamma)).exp();
        sum += term;
        if term < 1e-17 * sum {
            return sum.ln() - offset;
        }
        j += 1.0;
    }
    let ln_tail =
        ln_upper_gamma(1.0 / gamma, (a * (j - 0.5)).powf(gamma)) - (a * gamma).ln() + offset;
    (sum + ln_tail.exp()).ln() - offset
}

/// `P(T <= x | T > tau_min)` for the integer-supported model with mass
/// proportional to `exp(-(a j)^gamma)` at `j = floor(tau_min) + 1, ...`.
pub fn discrete_cdf_fn(params: &StretchedExpParams) -> impl Fn(f64) -> f64 + '_ {
    let ln_z = ln_discrete_norm(params.a, params.gamma, params.tau_min);
    let j0 = params.tau_min.floor() + 1.0;
    move |x: f64| {
        let mut total = 0.0;
        let mut j = j0;
        while j <= x {
            total += (-(params.a * j).powf(params.gamma) - ln_z).exp();
            j += 1.0;
        }
        total.min(1.0)
    }
}

/// Maximum-likelihood `(a, gamma)` for the data strictly above `tau_min`.
pub fn fit_truncated(data: &[f64], tau_min: f64, likelihood: Likelihood) -> Result<CutoffFit> {
    let ln_x: Vec<f64> = data
        .iter()
        .filter(|&&x| x > tau_min)
        .map(|x| x.ln())
        .collect();
    if ln_x.len() < 2 {
        return Err(Error::TooFewIntervals {
            needed: 2,
            got: ln_x.len(),
        });
    }
    // Search in (gamma, gamma ln a): the likelihood depends on a mostly via
    // a^gamma, which makes these coordinates far better conditioned.
    let ln_a_lo = A_MIN.ln();
    let ln_a_hi = A_MAX.ln();
    let objective =
        |gamma: f64, ln_a: f64| neg_log_likelihood(&ln_x, ln_a.exp(), gamma, tau_min, likelihood);

    let mut best = (f64::INFINITY, 1.0, 0.0);
    const GAMMA_STEPS: usize = 40;
    const LN_A_STEPS: usize = 48;
    for i in 0..GAMMA_STEPS {
        let gamma = GAMMA_MIN + (GAMMA_MAX - GAMMA_MIN) * i as f64 / (GAMMA_STEPS - 1) as f64;
        for j in 0..LN_A_STEPS {
            let ln_a = ln_a_lo + (ln_a_hi - ln_a_lo) * j as f64 / (LN_A_STEPS - 1) as f64;
            let v = objective(gamma, ln_a);
            if v < best.0 {
                best = (v, gamma, ln_a);
            }
        }
    }

    let to_params = |x: &[f64]| {
        let gamma = x[0].clamp(GAMMA_MIN, GAMMA_MAX);
        let ln_a = (x[1] / gamma).clamp(ln_a_lo, ln_a_hi);
        (gamma, ln_a)
    };
    let f = |x: &[f64]| {
        let (gamma, ln_a) = to_params(x);
        objective(gamma, ln_a)
    };
    let (g0, ln_a0) = (best.1, best.2);
    let upper_u = GAMMA_MAX * ln_a_hi.max(0.0);
    let lower_u = GAMMA_MAX * ln_a_lo.min(0.0);
    let nm = NelderMead::default();
    let mut x0 = vec![g0, g0 * ln_a0];
    let mut minimum = nm.minimize(
        f,
        &x0,
        &[0.05, 0.3],
        &[GAMMA_MIN, lower_u],
        &[GAMMA_MAX, upper_u],
    )?;
    // One restart from the converged point guards against simplex collapse.
    x0.clone_from(&minimum.x);
    let restart = nm.minimize(
        f,
        &x0,
        &[0.01, 0.05],
        &[GAMMA_MIN, lower_u],
        &[GAMMA_MAX, upper_u],
    )?;
    if restart.value <= minimum.value {
        minimum = restart;
    }
    let (gamma, ln_a) = to_params(&minimum.x);
    let a = ln_a.exp();
    let params = match likelihood {
        Likelihood::Continuous => StretchedExpParams::truncated(a, gamma, tau_min)?,
        Likelihood::Discrete => StretchedExpParams::new(
            a,
            (-ln_discrete_norm(a, gamma, tau_min)).exp(),
            gamma,
            tau_min,
        )?,
    };
    Ok(CutoffFit {
        params,
        loglik: -minimum.value,
        n_truncated: ln_x.len(),
        iterations: minimum.iterations,
    })
}

/// Scans integer cutoffs `1..=tau_min_max`, fitting each truncated sample
/// and keeping the fit with the smallest one-sample KS statistic.
pub fn fit_mle(r: &RecurrenceSeries, tau_min_max: u32, options: FitOptions) -> Result<FitResult> {
    if r.is_empty() {
        return Err(Error::EmptyRecurrence { q: r.q.value() });
    }
    fit_mle_values(&r.intervals_f64(), tau_min_max, options)
}

pub fn fit_mle_values(data: &[f64], tau_min_max: u32, options: FitOptions) -> Result<FitResult> {
    if tau_min_max == 0 {
        return Err(Error::InvalidParameter(
            "tau_min_max must be at least 1".into(),
        ));
    }
    let candidates: Vec<u32> = (1..=tau_min_max).collect();
    let outcomes = options.execution.map(&candidates, |&tm| {
        let tau_min = f64::from(tm);
        let truncated: Vec<f64> = data.iter().copied().filter(|&x| x > tau_min).collect();
        let n = truncated.len();
        if n < MIN_TRUNCATED {
            return (
                ScanEntry {
                    tau_min: tm,
                    n_truncated: n,
                    status: ScanStatus::TooFew,
                },
                None,
            );
        }
        match fit_truncated(&truncated, tau_min, options.likelihood) {
            Ok(fit) => {
                let ks = match options.likelihood {
                    Likelihood::Continuous => {
                        ks_one_sample(&truncated, &fit.params).unwrap_or(f64::INFINITY)
                    }
                    Likelihood::Discrete => {
                        let mut sorted = truncated.clone();
                        sorted.sort_by(f64::total_cmp);
                        ks_sorted(&sorted, discrete_cdf_fn(&fit.params))
                    }
                };
                let status = ScanStatus::Fitted {
                    ks,
                    gamma: fit.params.gamma,
                    a: fit.params.a,
                };
                (
                    ScanEntry {
                        tau_min: tm,
                        n_truncated: n,
                        status,
                    },
                    Some((fit, ks)),
                )
            }
            Err(e) => {
                log::warn!("fit at tau_min = {tm} failed: {e}");
                let status = ScanStatus::Failed {
                    message: e.to_string(),
                };
                (
                    ScanEntry {
                        tau_min: tm,
                        n_truncated: n,
                        status,
                    },
                    None,
                )
            }
        }
    });

    let mut best: Option<(CutoffFit, f64)> = None;
    let mut scan = Vec::with_capacity(outcomes.len());
    let mut first_error = None;
    for (entry, fit) in outcomes {
        if let ScanStatus::Failed { message } = &entry.status {
            first_error.get_or_insert_with(|| message.clone());
        }
        if let Some((fit, ks)) = fit {
            if best.as_ref().is_none_or(|(_, b)| ks < b - KS_TIE) {
                best = Some((fit, ks));
            }
        }
        scan.push(entry);
    }
    match best {
        Some((fit, ks)) => Ok(FitResult {
            params: fit.params,
            ks_stat: ks,
            n_truncated: fit.n_truncated,
            n_total: data.len(),
            loglik: fit.loglik,
            likelihood: options.likelihood,
            scan,
        }),
        None => match first_error {
            Some(message) => Err(Error::InvalidParameter(format!(
                "every cutoff failed to fit: {message}"
            ))),
            None => Err(Error::TooFewIntervals {
                needed: MIN_TRUNCATED,
                got: data.iter().filter(|&&x| x > 1.0).count(),
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let x = lo + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn constrained_closed_forms() {
        let (a, c) = constrained_params(1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14);
        let (a, c) = constrained_params(0.5).unwrap();
        assert!((a - 6.0).abs() < 1e-12 && (c - 3.0).abs() < 1e-12);
        let (a, c) = constrained_params(2.0).unwrap();
        assert!((a - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((c - 2.0 / std::f64::consts::PI).abs() < 1e-12);
        assert!(matches!(
            constrained_params(0.011),
            Err(Error::GammaRange { .. })
        ));
        assert!(constrained_params(0.02).is_ok());
        assert!(constrained_params(0.0).is_err());
    }

    #[test]
    fn pdf_matches_direct_evaluation() {
        let p = StretchedExpParams::new(37.04, 37.24, 0.35, 2.0).unwrap();
        let expect = 37.24 * (-(74.08f64).powf(0.35)).exp();
        assert!((pdf(&p, 2.0) - expect).abs() < 1e-12);
        assert!((pdf(&p, 2.0) - 0.409).abs() < 5e-4);
        assert!((pdf(&p, 1e-12) - 37.24).abs() < 1e-2);
        assert!(pdf(&p, 3.0) < pdf(&p, 2.0));
    }

    #[test]
    fn truncated_cdf_limits() {
        let p = StretchedExpParams::truncated(37.04, 0.35, 2.0).unwrap();
        assert_eq!(truncated_cdf(&p, 2.0).unwrap(), 0.0);
        assert!((truncated_cdf(&p, 1e9).unwrap() - 1.0).abs() < 1e-9);
        assert!(truncated_cdf(&p, 1.5).is_err());
        let e = StretchedExpParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!((truncated_cdf(&e, std::f64::consts::LN_2).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn truncated_prefactor_normalizes_density() {
        let p = StretchedExpParams::truncated(2.0, 0.6, 1.5).unwrap();
        // Integrate over u = ln tau to cover the heavy tail.
        let mass = simpson(
            |u: f64| pdf(&p, u.exp()) * u.exp(),
            1.5f64.ln(),
            12.0,
            200_000,
        );
        assert!((mass - 1.0).abs() < 1e-8, "{mass}");
    }

    #[test]
    fn truncated_cdf_matches_quadrature() {
        let p = StretchedExpParams::truncated(0.8, 0.45, 2.0).unwrap();
        for &t in &[2.5, 4.0, 10.0, 40.0] {
            let q = simpson(|x| pdf(&p, x), 2.0, t, 20_000);
            assert!((truncated_cdf(&p, t).unwrap() - q).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn discrete_norm_matches_brute_sum() {
        for &(a, g, tm) in &[(0.5, 0.4, 2.0), (3.0, 1.0, 1.0), (40.0, 0.3, 3.0)] {
            let brute: f64 = (tm as u32 + 1..2_000_000)
                .map(|j| (-(a * j as f64).powf(g)).exp())
                .sum();
            let ours = ln_discrete_norm(a, g, tm).exp();
            assert!(
                ((ours - brute) / brute).abs() < 1e-6,
                "{a} {g}: {ours} vs {brute}"
            );
        }
    }

    #[test]
    fn samples_respect_cutoff_and_are_reproducible() {
        let p = StretchedExpParams::truncated(14.0, 0.3, 2.0).unwrap();
        let s = sample_from_fit(&p, 2000, 9);
        assert!(s.iter().all(|&x| x >= 2.0));
        assert_eq!(s, sample_from_fit(&p, 2000, 9));
        assert_ne!(s, sample_from_fit(&p, 2000, 10));
    }

    #[test]
    fn exponential_sample_mean() {
        let p = StretchedExpParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let s = sample_from_fit(&p, 100_000, 1);
        let m = s.iter().sum::<f64>() / s.len() as f64;
        assert!((0.99..=1.01).contains(&m), "{m}");
    }

    #[test]
    fn sampler_inverts_cdf() {
        let p = StretchedExpParams::truncated(5.0, 0.35, 2.0).unwrap();
        let cdf = cdf_fn(&p);
        let mut rng = seed::stream(3, 0);
        let mut rng2 = seed::stream(3, 0);
        let draws = sample_with_rng(&p, 500, &mut rng);
        for x in draws {
            let u: f64 = rng2.random();
            assert!((cdf(x) - u).abs() < 1e-10, "{x}");
        }
    }

    #[test]
    fn fit_refuses_thin_samples() {
        let data: Vec<f64> = (1..40).map(f64::from).collect();
        assert!(matches!(
            fit_mle_values(&data, 10, FitOptions::default()),
            Err(Error::TooFewIntervals { .. })
        ));
    }

    #[test]
    fn fit_is_scale_consistent() {
        let p = StretchedExpParams::truncated(0.5, 0.6, 2.0).unwrap();
        let data = sample_from_fit(&p, 3000, 4);
        let base = fit_truncated(&data, 2.0, Likelihood::Continuous).unwrap();
        let k = 3.0;
        let scaled: Vec<f64> = data.iter().map(|x| x * k).collect();
        let fit = fit_truncated(&scaled, 2.0 * k, Likelihood::Continuous).unwrap();
        assert!((fit.params.gamma - base.params.gamma).abs() < 1e-5);
        let ratio = (1.0 / fit.params.a) / (1.0 / base.params.a);
        assert!((ratio - k).abs() < 1e-4 * k, "{ratio}");
    }

    #[test]
    fn optimum_beats_random_feasible_points() {
        let p = StretchedExpParams::truncated(10.0, 0.35, 2.0).unwrap();
        let data = sample_from_fit(&p, 2000, 11);
        let fit = fit_truncated(&data, 2.0, Likelihood::Continuous).unwrap();
        let best = log_likelihood(
            &data,
            fit.params.a,
            fit.params.gamma,
            2.0,
            Likelihood::Continuous,
        );
        assert!((best - fit.loglik).abs() < 1e-6 * best.abs());
        let mut rng = seed::stream(99, 0);
        for _ in 0..25 {
            let a = (rng.random_range(A_MIN.ln()..A_MAX.ln())).exp();
            let g = rng.random_range(GAMMA_MIN..GAMMA_MAX);
            assert!(best >= log_likelihood(&data, a, g, 2.0, Likelihood::Continuous));
        }
    }

    #[test]
    fn discrete_cdf_is_a_cumulative_pmf() {
        let p = StretchedExpParams::new(0.4, 1.0, 0.6, 2.0).unwrap();
        let cdf = discrete_cdf_fn(&p);
        let w: Vec<f64> = (3..4000)
            .map(|j| (-(0.4 * j as f64).powf(0.6)).exp())
            .collect();
        let z: f64 = w.iter().sum();
        assert_eq!(cdf(2.5), 0.0);
        assert!((cdf(3.0) - w[0] / z).abs() < 1e-12);
        assert!((cdf(7.9) - w[..5].iter().sum::<f64>() / z).abs() < 1e-12);
        assert!((cdf(1e4) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn geometric_intervals_are_exponential_in_discrete_mode() {
        // ceil of an exponential is geometric, the gamma = 1 discrete model.
        let p = StretchedExpParams::new(0.2, 0.2, 1.0, 0.0).unwrap();
        let data: Vec<f64> = sample_from_fit(&p, 5000, 21)
            .into_iter()
            .map(f64::ceil)
            .collect();
        let opts = FitOptions {
            likelihood: Likelihood::Discrete,
            ..Default::default()
        };
        let fit = fit_mle_values(&data, 5, opts).unwrap();
        assert!(
            (fit.params.gamma - 1.0).abs() < 0.07,
            "{}",
            fit.params.gamma
        );
    }

    #[test]
    fn discrete_mode_fits_integer_data() {
        let p = StretchedExpParams::truncated(0.3, 0.7, 1.0).unwrap();
        let data: Vec<f64> = sample_from_fit(&p, 3000, 5)
            .into_iter()
            .map(f64::ceil)
            .collect();
        let opts = FitOptions {
            likelihood: Likelihood::Discrete,
            ..Default::default()
        };
        let fit = fit_mle_values(&data, 3, opts).unwrap();
        assert_eq!(fit.likelihood, Likelihood::Discrete);
        assert!(
            fit.params.gamma > 0.4 && fit.params.gamma < 1.0,
            "{}",
            fit.params.gamma
        );
    }
}
