//! End-to-end orchestration: configuration, per-instrument analysis of
//! originals and shuffled surrogates, and the serializable report.
//!
//! Every stage records why it was skipped instead of failing the run, and
//! every random stream is derived from the configured seed plus a task path
//! so results do not depend on scheduling.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gof::{self, BootstrapOptions, GofResult, KsTwoSampleResult, ScalingPair};
use crate::hazard::{self, HazardCurve, DEFAULT_RISK_FLOOR};
use crate::ingest::{self, ColumnSpec, Source, VolatilitySeries};
use crate::memory::{self, ConditionalMeans, FluctuationFunction, Method, ScalingFit};
use crate::recurrence::{self, RecurrenceSeries, Threshold, ThresholdSweep};
use crate::seed;
use crate::sefit::{self, FitOptions, FitResult, Likelihood};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub path: PathBuf,
    pub label: String,
    #[serde(default)]
    pub columns: ColumnSpec,
}

impl InputSpec {
    /// Parses `path[:label]`; the label defaults to the file stem.
    pub fn parse(spec: &str, columns: ColumnSpec) -> Self {
        let (path, label) = match spec.rsplit_once(':') {
            Some((p, l)) if !p.is_empty() && !l.is_empty() && !l.contains(['/', '\\']) => {
                (p, Some(l))
            }
            _ => (spec, None),
        };
        let path = PathBuf::from(path);
        let label = label
            .map(str::to_owned)
            .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .unwrap_or_else(|| path.display().to_string());
        InputSpec {
            path,
            label,
            columns,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub inputs: Vec<InputSpec>,
    pub thresholds: Vec<f64>,
    pub dts: Vec<u32>,
    pub n_boot: usize,
    pub seed: u64,
    pub n_surrogates: usize,
    pub tau_min_max: u32,
    pub dfa_order: usize,
    pub dma_thetas: Vec<f64>,
    pub box_points: usize,
    /// Significance level of the two-sample KS tests.
    pub alpha: f64,
    pub likelihood: Likelihood,
    pub refit: bool,
    pub risk_floor: usize,
    /// Scheduling only; excluded from the report so it cannot change output.
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            inputs: Vec::new(),
            thresholds: vec![1.0, 1.2, 1.4, 1.6, 1.8, 2.0],
            dts: hazard::DEFAULT_DTS.to_vec(),
            n_boot: 10_000,
            seed: 0,
            n_surrogates: 1,
            tau_min_max: 10,
            dfa_order: 1,
            dma_thetas: vec![0.0, 0.5, 1.0],
            box_points: 20,
            alpha: 0.05,
            likelihood: Likelihood::Continuous,
            refit: false,
            risk_floor: DEFAULT_RISK_FLOOR,
            execution: Execution::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.thresholds.is_empty() {
            return bad("at least one threshold is required".into());
        }
        if self.thresholds.iter().any(|&q| !(q > 0.0 && q.is_finite())) {
            return bad("thresholds must be positive".into());
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return bad("thresholds must be strictly increasing".into());
        }
        if self.n_boot < 100 {
            return bad(format!("n_boot must be at least 100, got {}", self.n_boot));
        }
        if self.dts.is_empty() || self.dts.contains(&0) {
            return bad("dts must be a nonempty list of positive integers".into());
        }
        if self.tau_min_max == 0 {
            return bad("tau_min_max must be at least 1".into());
        }
        if self.dma_thetas.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return bad("theta values must lie in [0, 1]".into());
        }
        if self.box_points < 2 {
            return bad("box_points must be at least 2".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        Ok(())
    }

    fn threshold_specs(&self) -> Result<Vec<Threshold>> {
        self.thresholds.iter().map(|&q| Threshold::new(q)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Fit,
    Gof,
    Hazard,
    Memory,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Fit, Stage::Gof, Stage::Hazard, Stage::Memory];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    pub stage: Stage,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofPair {
    pub ks: GofResult,
    pub cvm: GofResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardPair {
    pub dt: u32,
    pub empirical: HazardCurve,
    pub model: Option<HazardCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fluctuation {
    pub method: String,
    pub function: FluctuationFunction,
    pub fit: Option<ScalingFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryReport {
    pub box_sizes: Vec<usize>,
    pub fluctuations: Vec<Fluctuation>,
    /// Two-sample KS between intervals following the smallest and the
    /// largest quarter of predecessors.
    pub conditional_ks: Option<KsTwoSampleResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub q: f64,
    pub n_intervals: usize,
    pub mean_interval: Option<f64>,
    pub intervals: Vec<u32>,
    pub fit: Option<FitResult>,
    pub gof: Option<GofPair>,
    pub hazard: Vec<HazardPair>,
    pub memory: Option<MemoryReport>,
    pub skipped: Vec<Skip>,
}

impl ThresholdReport {
    fn new(r: &RecurrenceSeries) -> Self {
        ThresholdReport {
            q: r.q.value(),
            n_intervals: r.len(),
            mean_interval: r.mean_interval(),
            intervals: r.intervals.clone(),
            fit: None,
            gof: None,
            hazard: Vec::new(),
            memory: None,
            skipped: Vec::new(),
        }
    }

    pub fn series(&self, source: Source) -> Result<RecurrenceSeries> {
        Ok(RecurrenceSeries {
            q: Threshold::new(self.q)?,
            intervals: self.intervals.clone(),
            exceedance_times: Vec::new(),
            source,
        })
    }

    fn skip(&mut self, stage: Stage, reason: impl ToString) {
        self.skipped.retain(|s| s.stage != stage);
        self.skipped.push(Skip {
            stage,
            reason: reason.to_string(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub source: Source,
    pub n_volatility: usize,
    pub thresholds: Vec<ThresholdReport>,
    pub scaling_matrix: Option<Vec<ScalingPair>>,
    pub conditional_means: Option<ConditionalMeans>,
    pub skipped: Vec<Skip>,
}

impl SeriesReport {
    pub fn sweep(&self) -> Result<ThresholdSweep> {
        let series = self
            .thresholds
            .iter()
            .map(|t| t.series(self.source))
            .collect::<Result<_>>()?;
        Ok(ThresholdSweep { series })
    }

    fn skip(&mut self, stage: Stage, reason: impl ToString) {
        self.skipped.retain(|s| s.stage != stage);
        self.skipped.push(Skip {
            stage,
            reason: reason.to_string(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstrumentReport {
    pub label: String,
    pub n_prices: Option<usize>,
    pub error: Option<String>,
    pub original: Option<SeriesReport>,
    pub surrogates: Vec<SeriesReport>,
}

impl InstrumentReport {
    pub fn series(&self) -> impl Iterator<Item = &SeriesReport> {
        self.original.iter().chain(&self.surrogates)
    }

    fn series_mut(&mut self) -> impl Iterator<Item = &mut SeriesReport> {
        self.original.iter_mut().chain(self.surrogates.iter_mut())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub config: AnalysisConfig,
    pub instruments: Vec<InstrumentReport>,
}

impl Report {
    pub fn new(config: AnalysisConfig) -> Self {
        Report {
            schema: SCHEMA,
            tool: "revol".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            instruments: Vec::new(),
        }
    }

    /// True when there were inputs and none of them could be analyzed.
    pub fn all_failed(&self) -> bool {
        !self.instruments.is_empty() && self.instruments.iter().all(|i| i.error.is_some())
    }
}

/// Runs every stage on every configured input.
pub fn run(config: &AnalysisConfig) -> Result<Report> {
    run_stages(config, &Stage::ALL)
}

/// Ingests each input, extracts intervals for originals and surrogates and
/// runs the requested stages.
pub fn run_stages(config: &AnalysisConfig, stages: &[Stage]) -> Result<Report> {
    config.validate()?;
    let mut report = Report::new(config.clone());
    for input in &config.inputs {
        let instrument = match analyze_input(input, config, stages) {
            Ok(i) => i,
            Err(e) => {
                log::error!("{}: {e}", input.label);
                InstrumentReport {
                    label: input.label.clone(),
                    n_prices: None,
                    error: Some(e.to_string()),
                    original: None,
                    surrogates: Vec::new(),
                }
            }
        };
        report.instruments.push(instrument);
    }
    Ok(report)
}

fn analyze_input(
    input: &InputSpec,
    config: &AnalysisConfig,
    stages: &[Stage],
) -> Result<InstrumentReport> {
    let prices = ingest::load_price_csv(&input.path, &input.columns, &input.label)?;
    let v = ingest::compute_volatility(&prices)?;
    let mut instrument = analyze_volatility(&input.label, &v, config, stages)?;
    instrument.n_prices = Some(prices.len());
    Ok(instrument)
}

/// Seed of the `index`-th surrogate of an instrument.
pub fn surrogate_seed(base: u64, label: &str, index: usize) -> u64 {
    seed::derive(
        base,
        &[seed::tag(label), seed::tag("shuffle"), index as u64],
    )
}

/// Analysis of an already-computed volatility series and its surrogates.
pub fn analyze_volatility(
    label: &str,
    v: &VolatilitySeries,
    config: &AnalysisConfig,
    stages: &[Stage],
) -> Result<InstrumentReport> {
    config.validate()?;
    let qs = config.threshold_specs()?;
    let mut original = series_report(v, &qs)?;
    run_series(label, &mut original, config, stages)?;
    let mut surrogates = Vec::with_capacity(config.n_surrogates);
    for i in 0..config.n_surrogates {
        let shuffled = ingest::shuffle(v, surrogate_seed(config.seed, label, i));
        let mut s = series_report(&shuffled, &qs)?;
        run_series(label, &mut s, config, stages)?;
        surrogates.push(s);
    }
    Ok(InstrumentReport {
        label: label.to_owned(),
        n_prices: None,
        error: None,
        original: Some(original),
        surrogates,
    })
}

/// Reruns `stages` on a report produced earlier, reusing its intervals.
pub fn rerun(report: &mut Report, config: &AnalysisConfig, stages: &[Stage]) -> Result<()> {
    config.validate()?;
    report.config = AnalysisConfig {
        inputs: report.config.inputs.clone(),
        ..config.clone()
    };
    for instrument in &mut report.instruments {
        let label = instrument.label.clone();
        for s in instrument.series_mut() {
            run_series(&label, s, config, stages)?;
        }
    }
    Ok(())
}

fn series_report(v: &VolatilitySeries, qs: &[Threshold]) -> Result<SeriesReport> {
    let sweep = recurrence::threshold_sweep(v, qs)?;
    Ok(SeriesReport {
        source: v.source,
        n_volatility: v.len(),
        thresholds: sweep.series.iter().map(ThresholdReport::new).collect(),
        scaling_matrix: None,
        conditional_means: None,
        skipped: Vec::new(),
    })
}

fn source_index(source: Source) -> u64 {
    match source {
        Source::Original => 0,
        Source::Shuffled { seed } => seed::derive(seed, &[1]),
    }
}

fn run_series(
    label: &str,
    s: &mut SeriesReport,
    config: &AnalysisConfig,
    stages: &[Stage],
) -> Result<()> {
    let source = s.source;
    let task = [seed::tag(label), source_index(source)];
    let exec = config.execution;
    let updated = exec.map(&s.thresholds, |t| {
        let mut t = t.clone();
        for &stage in stages {
            let path = [
                task[0],
                task[1],
                seed::tag(&format!("{}", t.q)),
                stage as u64,
            ];
            run_threshold_stage(
                &mut t,
                source,
                stage,
                config,
                seed::derive(config.seed, &path),
            );
        }
        t
    });
    s.thresholds = updated;

    let sweep = s.sweep()?;
    if stages.contains(&Stage::Gof) {
        match gof::scaling_matrix(&sweep, config.alpha) {
            Ok(m) => {
                s.scaling_matrix = Some(m);
                s.skipped.retain(|k| k.stage != Stage::Gof);
            }
            Err(e) => {
                s.scaling_matrix = None;
                s.skip(Stage::Gof, e);
            }
        }
    }
    if stages.contains(&Stage::Memory) {
        match memory::conditional_means(&sweep, 8) {
            Ok(m) => {
                s.conditional_means = Some(m);
                s.skipped.retain(|k| k.stage != Stage::Memory);
            }
            Err(e) => {
                s.conditional_means = None;
                s.skip(Stage::Memory, e);
            }
        }
    }
    Ok(())
}

fn run_threshold_stage(
    t: &mut ThresholdReport,
    source: Source,
    stage: Stage,
    config: &AnalysisConfig,
    task_seed: u64,
) {
    let outcome = match stage {
        Stage::Fit => fit_stage(t, source, config),
        Stage::Gof => gof_stage(t, config, task_seed),
        Stage::Hazard => hazard_stage(t, source, config),
        Stage::Memory => memory_stage(t, config),
    };
    match outcome {
        Ok(()) => t.skipped.retain(|s| s.stage != stage),
        Err(e) => t.skip(stage, e),
    }
}

fn fit_stage(t: &mut ThresholdReport, source: Source, config: &AnalysisConfig) -> Result<()> {
    t.fit = None;
    let r = t.series(source)?;
    let opts = FitOptions {
        likelihood: config.likelihood,
        execution: config.execution,
    };
    t.fit = Some(sefit::fit_mle(&r, config.tau_min_max, opts)?);
    Ok(())
}

fn gof_stage(t: &mut ThresholdReport, config: &AnalysisConfig, task_seed: u64) -> Result<()> {
    t.gof = None;
    let fit = t
        .fit
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("no fit available for goodness-of-fit".into()))?;
    let truncated: Vec<f64> = t
        .intervals
        .iter()
        .map(|&x| f64::from(x))
        .filter(|&x| x > fit.params.tau_min)
        .collect();
    let opts = BootstrapOptions {
        n_boot: config.n_boot,
        seed: task_seed,
        refit: config.refit,
        round: false,
        execution: config.execution,
    };
    let (ks, cvm) = gof::bootstrap_pvalues(&truncated, &fit.params, &opts)?;
    t.gof = Some(GofPair { ks, cvm });
    Ok(())
}

fn hazard_stage(t: &mut ThresholdReport, source: Source, config: &AnalysisConfig) -> Result<()> {
    t.hazard.clear();
    let r = t.series(source)?;
    let mean = r.mean_interval().ok_or(Error::EmptyRecurrence { q: t.q })?;
    let grid = hazard::default_t_grid(mean);
    for &dt in &config.dts {
        let empirical = hazard::hazard_empirical(&r, dt, &grid, config.risk_floor)?;
        let model = match &t.fit {
            Some(f) => Some(hazard::hazard_model(&f.params, t.q, dt, &grid)?),
            None => None,
        };
        t.hazard.push(HazardPair {
            dt,
            empirical,
            model,
        });
    }
    if t.fit.is_none() {
        return Err(Error::InvalidParameter(
            "model hazard needs a fit; only empirical curves computed".into(),
        ));
    }
    Ok(())
}

fn memory_stage(t: &mut ThresholdReport, config: &AnalysisConfig) -> Result<()> {
    t.memory = None;
    let values: Vec<f64> = t.intervals.iter().map(|&x| f64::from(x)).collect();
    let partition = memory::partition_values(&values, 4);
    let conditional_ks = match partition {
        Ok(p) => {
            let first = memory::subset_values(&values, &p, 0);
            let last = memory::subset_values(&values, &p, 3);
            gof::ks_two_sample(&first, &last, config.alpha).ok()
        }
        Err(_) => None,
    };
    let box_sizes = memory::box_size_grid(values.len(), config.box_points)?;
    let y = memory::profile(&values)?;
    let mut methods = vec![Method::Dfa {
        order: config.dfa_order,
    }];
    methods.extend(config.dma_thetas.iter().map(|&theta| Method::Dma { theta }));
    let fluctuations = config.execution.map(&methods, |&m| {
        let function = match m {
            Method::Dfa { order } => memory::dfa_fluctuation(&y, &box_sizes, order),
            Method::Dma { theta } => memory::dma_fluctuation(&y, &box_sizes, theta),
        };
        function.map(|function| Fluctuation {
            method: m.name(),
            fit: memory::fit_scaling(&function).ok(),
            function,
        })
    });
    let fluctuations = fluctuations.into_iter().collect::<Result<Vec<_>>>()?;
    t.memory = Some(MemoryReport {
        box_sizes,
        fluctuations,
        conditional_ks,
    });
    Ok(())
}
