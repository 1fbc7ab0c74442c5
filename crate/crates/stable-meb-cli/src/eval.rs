//! `eval`: aggregate report lines into success frequencies, compare against
//! thresholds with a binomial confidence margin, and gate via exit code.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use stable_meb::TrialReport;

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub reports: PathBuf,
    /// Required success frequency before the confidence margin.
    #[arg(long)]
    pub min_frequency: f64,
    /// Success additionally requires ratio_vs_reference <= this bound.
    #[arg(long)]
    pub ratio_bound: Option<f64>,
    /// Coverage floor as a fraction of n; default uses each line's own
    /// target_coverage.
    #[arg(long)]
    pub min_coverage_fraction: Option<f64>,
    /// Additionally require this minimum non-fallback frequency.
    #[arg(long)]
    pub min_non_fallback_frequency: Option<f64>,
    /// Two-sided confidence for the binomial margin: 0.9, 0.95 or 0.99.
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// Write the summary as JSON here as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Carries the process exit code through the anyhow chain.
#[derive(Debug)]
pub struct EvalFailure {
    pub exit_code: i32,
    pub message: String,
}

impl std::fmt::Display for EvalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for EvalFailure {}

#[derive(Serialize)]
struct Summary {
    trials: usize,
    malformed_lines: usize,
    successes: usize,
    success_frequency: f64,
    fallbacks: usize,
    min_frequency: f64,
    margin: f64,
    threshold_after_margin: f64,
    pass: bool,
}

fn z_value(confidence: f64) -> Result<f64> {
    // Standard normal quantiles for the supported two-sided confidences.
    let table = [(0.9, 1.6449), (0.95, 1.96), (0.99, 2.5758)];
    for (c, z) in table {
        if (confidence - c).abs() < 1e-9 {
            return Ok(z);
        }
    }
    bail!("unsupported confidence {confidence}; use 0.9, 0.95 or 0.99");
}

fn line_succeeds(report: &TrialReport, args: &EvalArgs) -> bool {
    let coverage_ok = match args.min_coverage_fraction {
        Some(f) => report.coverage_count as f64 >= f * report.n as f64 - 1e-9,
        None => report.coverage_count >= report.target_coverage,
    };
    let ratio_ok = match args.ratio_bound {
        Some(bound) => report.ratio_vs_reference.is_some_and(|r| r <= bound),
        None => true,
    };
    coverage_ok && ratio_ok
}

pub fn main(args: EvalArgs) -> Result<()> {
    let z = z_value(args.confidence)?;
    let text = std::fs::read_to_string(&args.reports)
        .with_context(|| format!("reading {}", args.reports.display()))?;
    let mut reports = Vec::new();
    let mut malformed = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match TrialReport::from_json_line(line) {
            Ok(r) => reports.push(r),
            Err(e) => {
                malformed += 1;
                eprintln!("malformed line {}: {e}", lineno + 1);
            }
        }
    }
    if reports.is_empty() && malformed == 0 {
        return Err(EvalFailure { exit_code: 2, message: "no trials in report file".into() }.into());
    }

    let trials = reports.len();
    let successes = reports.iter().filter(|r| line_succeeds(r, &args)).count();
    let fallbacks = reports.iter().filter(|r| r.fallback).count();
    let freq = if trials > 0 { successes as f64 / trials as f64 } else { 0.0 };
    let p0 = args.min_frequency;
    let margin = z * (p0 * (1.0 - p0) / trials.max(1) as f64).sqrt();
    let threshold = p0 - margin;
    let mut pass = freq >= threshold;
    if let Some(nf) = args.min_non_fallback_frequency {
        let nf_freq = (trials - fallbacks) as f64 / trials.max(1) as f64;
        if nf_freq < nf {
            pass = false;
        }
    }

    let summary = Summary {
        trials,
        malformed_lines: malformed,
        successes,
        success_frequency: freq,
        fallbacks,
        min_frequency: p0,
        margin,
        threshold_after_margin: threshold,
        pass,
    };
    println!("trials            {trials}");
    println!("malformed lines   {malformed}");
    println!("successes         {successes}");
    println!("success frequency {freq:.4}");
    println!("fallbacks         {fallbacks}");
    println!("threshold         {p0:.4} - {margin:.4} = {threshold:.4}");
    println!("verdict           {}", if pass && malformed == 0 { "PASS" } else { "FAIL" });
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string_pretty(&summary)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if malformed > 0 {
        return Err(EvalFailure {
            exit_code: 2,
            message: format!("{malformed} malformed report lines"),
        }
        .into());
    }
    if !pass {
        return Err(EvalFailure {
            exit_code: 1,
            message: format!("success frequency {freq:.4} below threshold {threshold:.4}"),
        }
        .into());
    }
    Ok(())
}
