//! Experiment configuration and the CSV/JSON emitters.
//!
//! CSV numbers use `{:.16e}` (17 significant digits) and `NaN` for an
//! absent value; lines end in `\n`. JSON documents have the shape
//! `{"config": .., "records": [..], "summary": {..}}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp_geometry::{LpSpace, PrimalVec};
use crate::solvers::{
    DivergenceEvent, IterTrace, ScheduleKind, SolverOptions, StabilityReport, StepSchedule,
    TraceRecord,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub p: f64,
    pub dim: usize,
    pub seed: u64,
    pub num_samples: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub alpha0: f64,
    pub schedule_kind: ScheduleKind,
    pub output_format: OutputFormat,
    /// Empty means standard output.
    pub output_path: String,
    /// Subcommand-specific choices (set count, method, scheme, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            dim: 2,
            seed: 0,
            num_samples: 1000,
            max_iter: 1000,
            tol: 1e-10,
            alpha0: 1.0,
            schedule_kind: ScheduleKind::Constant,
            output_format: OutputFormat::Csv,
            output_path: String::new(),
            options: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        LpSpace::new(self.p, self.dim)?;
        if self.num_samples == 0 {
            return Err(Error::Precondition("num_samples must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Precondition(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<LpSpace> {
        LpSpace::new(self.p, self.dim)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions::new(self.max_iter, self.tol)
    }

    pub fn schedule(&self) -> Result<StepSchedule> {
        StepSchedule::new(self.schedule_kind, self.alpha0)
    }
}

/// Outcome of one check of an inequality sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub check_label: String,
    pub samples: usize,
    pub worst_margin: f64,
    /// The input that produced `worst_margin`, replayable with
    /// [`crate::harness::sweep::replay`].
    pub worst_case_seed_state: serde_json::Value,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub converged: bool,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceEvent>,
    pub solution: PrimalVec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elementary_gaps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub config: ExperimentConfig,
    pub records: Vec<TraceRecord>,
    pub summary: TraceSummary,
}

impl TraceDocument {
    pub fn new(trace: &IterTrace, cfg: &ExperimentConfig) -> Self {
        Self {
            config: cfg.clone(),
            records: trace.records.clone(),
            summary: TraceSummary {
                converged: trace.converged,
                iterations: trace.iterations,
                divergence: trace.divergence,
                solution: trace.solution.clone(),
                elementary_gaps: trace.elementary_gaps.clone(),
            },
        }
    }

    pub fn into_trace(self) -> IterTrace {
        IterTrace {
            records: self.records,
            converged: self.summary.converged,
            divergence: self.summary.divergence,
            iterations: self.summary.iterations,
            solution: self.summary.solution,
            elementary_gaps: self.summary.elementary_gaps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub passed: bool,
    pub checks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub config: ExperimentConfig,
    pub records: Vec<ReportRecord>,
    pub summary: SweepSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub passed: bool,
    /// Whether `||x̂₁ - x̂₂||` is nonincreasing as `σ` decreases.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityDocument {
    pub config: ExperimentConfig,
    pub records: Vec<StabilityReport>,
    pub summary: StabilitySummary,
}

pub const TRACE_CSV_HEADER: &str = "n,step_norm,v2_to_ref,fixed_point_residual,vi_residual";

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), fmt_num)
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

pub fn trace_csv(trace: &IterTrace) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            fmt_num(r.step_norm),
            fmt_opt(r.v2_to_ref),
            fmt_opt(r.fixed_point_residual),
            fmt_opt(r.vi_residual)
        );
    }
    out
}

pub fn render_trace(trace: &IterTrace, cfg: &ExperimentConfig) -> Result<String> {
    if trace.records.is_empty() {
        return Err(Error::Precondition("trace has no records".into()));
    }
    match cfg.output_format {
        OutputFormat::Csv => Ok(trace_csv(trace)),
        OutputFormat::Json => to_json(&TraceDocument::new(trace, cfg)),
    }
}

pub fn parse_trace_json(text: &str) -> Result<TraceDocument> {
    Ok(serde_json::from_str(text)?)
}

pub fn render_sweep(records: &[ReportRecord], cfg: &ExperimentConfig) -> Result<String> {
    match cfg.output_format {
        OutputFormat::Csv => {
            let mut out =
                String::from("check_label,samples,worst_margin,passed,worst_case_seed_state\n");
            for r in records {
                let state = serde_json::to_string(&r.worst_case_seed_state)?;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.check_label,
                    r.samples,
                    fmt_num(r.worst_margin),
                    r.passed,
                    csv_quote(&state)
                );
            }
            Ok(out)
        }
        OutputFormat::Json => to_json(&SweepDocument {
            config: cfg.clone(),
            records: records.to_vec(),
            summary: SweepSummary {
                passed: records.iter().all(|r| r.passed),
                checks: records.len(),
            },
        }),
    }
}

/// `passed` when every margin is nonnegative; `monotone` when the
/// distances do not increase as `σ` shrinks.
pub fn stability_summary(reports: &[StabilityReport]) -> StabilitySummary {
    let mut by_sigma: Vec<&StabilityReport> = reports.iter().collect();
    by_sigma.sort_by(|a, b| b.sigma.total_cmp(&a.sigma));
    StabilitySummary {
        passed: reports.iter().all(|r| r.margin >= 0.0),
        monotone: by_sigma
            .windows(2)
            .all(|w| w[1].distance <= w[0].distance),
    }
}

pub fn render_stability(reports: &[StabilityReport], cfg: &ExperimentConfig) -> Result<String> {
    match cfg.output_format {
        OutputFormat::Csv => {
            let mut out = String::from("sigma,distance,bound,margin,ratio\n");
            for r in reports {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_num(r.sigma),
                    fmt_num(r.distance),
                    fmt_num(r.bound),
                    fmt_num(r.margin),
                    fmt_opt(r.ratio)
                );
            }
            Ok(out)
        }
        OutputFormat::Json => to_json(&StabilityDocument {
            config: cfg.clone(),
            records: reports.to_vec(),
            summary: stability_summary(reports),
        }),
    }
}

/// Writes `content` to `cfg.output_path`, or to standard output when the
/// path is empty.
pub fn write_output(cfg: &ExperimentConfig, content: &str) -> Result<()> {
    if cfg.output_path.is_empty() {
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        out.write_all(content.as_bytes())?;
        out.flush()?;
    } else {
        std::fs::write(Path::new(&cfg.output_path), content)?;
    }
    Ok(())
}

pub fn emit_trace(trace: &IterTrace, cfg: &ExperimentConfig) -> Result<()> {
    write_output(cfg, &render_trace(trace, cfg)?)
}
