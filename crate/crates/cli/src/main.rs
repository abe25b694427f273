mod args;

use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;

use revol_core::emit::{self, EmitOptions};
use revol_core::ingest::{self, ColumnSpec, DateFormat};
use revol_core::pipeline::{self, AnalysisConfig, InputSpec, Report, Stage};
use revol_core::sefit::Likelihood;
use revol_core::Execution;

use args::{AnalysisArgs, Cli, Command, InputArgs, OutputArgs, StageArgs};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Analyze { analysis, output } => {
            let config = build_config(&analysis)?;
            let report = pipeline::run(&config)?;
            finish(&report, &output)
        }
        Command::Fit(args) => stage(args, Stage::Fit, &[Stage::Fit]),
        Command::Gof(args) => stage(args, Stage::Gof, &[Stage::Fit, Stage::Gof]),
        Command::Hazard(args) => stage(args, Stage::Hazard, &[Stage::Fit, Stage::Hazard]),
        Command::Memory(args) => stage(args, Stage::Memory, &[Stage::Memory]),
        Command::Surrogate {
            input,
            seed,
            count,
            out,
        } => surrogates(&input, seed, count, &out),
    }
}

/// Reruns `stage` on a saved report, or runs `fresh` on the inputs.
fn stage(args: StageArgs, stage: Stage, fresh: &[Stage]) -> anyhow::Result<ExitCode> {
    let report = match &args.report {
        Some(path) => {
            let mut report = emit::read_report(path)?;
            let config = apply_flags(report.config.clone(), &args.analysis)?;
            pipeline::rerun(&mut report, &config, &[stage])?;
            report
        }
        None => pipeline::run_stages(&build_config(&args.analysis)?, fresh)?,
    };
    finish(&report, &args.output)
}

fn build_config(args: &AnalysisArgs) -> anyhow::Result<AnalysisConfig> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => AnalysisConfig::default(),
    };
    let mut config = apply_flags(base, args)?;
    if !args.input.inputs.is_empty() {
        config.inputs = input_specs(&args.input);
    }
    if config.inputs.is_empty() {
        bail!("no inputs: pass --input PATH[:LABEL] or list inputs in the config file");
    }
    if let Some(q) = &args.thresholds {
        config.thresholds = q.clone();
    }
    config.validate()?;
    Ok(config)
}

/// Overrides everything except inputs and thresholds.
fn apply_flags(mut config: AnalysisConfig, args: &AnalysisArgs) -> anyhow::Result<AnalysisConfig> {
    if let Some(v) = &args.dts {
        config.dts = v.clone();
    }
    if let Some(v) = args.n_boot {
        config.n_boot = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.n_surrogates {
        config.n_surrogates = v;
    }
    if let Some(v) = args.tau_min_max {
        config.tau_min_max = v;
    }
    if let Some(v) = &args.thetas {
        config.dma_thetas = v.clone();
    }
    if let Some(v) = args.dfa_order {
        config.dfa_order = v;
    }
    if let Some(v) = args.box_points {
        config.box_points = v;
    }
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if let Some(v) = args.risk_floor {
        config.risk_floor = v;
    }
    if args.discrete {
        config.likelihood = Likelihood::Discrete;
    }
    if args.refit {
        config.refit = true;
    }
    config.execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    config.validate()?;
    Ok(config)
}

fn input_specs(args: &InputArgs) -> Vec<InputSpec> {
    let columns = ColumnSpec {
        date: args.date_col.clone(),
        price: args.price_col.clone(),
        date_format: if args.us_dates {
            DateFormat::Us
        } else {
            DateFormat::Iso
        },
    };
    args.inputs
        .iter()
        .map(|s| InputSpec::parse(s, columns.clone()))
        .collect()
}

fn finish(report: &Report, output: &OutputArgs) -> anyhow::Result<ExitCode> {
    let written = emit::emit(
        report,
        &output.out,
        EmitOptions {
            intervals: output.intervals,
        },
    )?;
    for instrument in &report.instruments {
        match &instrument.error {
            Some(e) => eprintln!("{}: failed: {e}", instrument.label),
            None => eprintln!(
                "{}: {} prices, {} surrogate(s)",
                instrument.label,
                instrument.n_prices.unwrap_or_default(),
                instrument.surrogates.len()
            ),
        }
    }
    eprintln!("wrote {} files to {}", written.len(), output.out.display());
    Ok(if report.all_failed() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn surrogates(input: &InputArgs, seed: u64, count: usize, out: &Path) -> anyhow::Result<ExitCode> {
    if input.inputs.is_empty() {
        bail!("no inputs: pass --input PATH[:LABEL]");
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut failures = 0;
    let specs = input_specs(input);
    for spec in &specs {
        let result = (|| -> anyhow::Result<()> {
            let prices = ingest::load_price_csv(&spec.path, &spec.columns, &spec.label)?;
            let v = ingest::compute_volatility(&prices)?;
            for i in 0..count {
                let shuffled = ingest::shuffle(&v, pipeline::surrogate_seed(seed, &spec.label, i));
                let mut body = String::from("v\n");
                for x in &shuffled.values {
                    body.push_str(&emit::fmt_real(*x));
                    body.push('\n');
                }
                let path = out.join(format!("{}_shuffled_{i}.csv", spec.label));
                std::fs::write(&path, body)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        })();
        match result {
            Ok(()) => eprintln!("{}: wrote {count} surrogate(s)", spec.label),
            Err(e) => {
                failures += 1;
                eprintln!("{}: failed: {e:#}", spec.label);
            }
        }
    }
    Ok(if failures == specs.len() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}
