//! Report records and their JSON / CSV forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::fit::ExponentFit;
use crate::error::Result;

/// One verified property with its pinned tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl CheckRecord {
    /// Passes when `residual ≤ tolerance`; a NaN residual fails.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            seconds: None,
        }
    }

    /// Passes when `residual ≥ tolerance` (a lower bound, e.g. a fitted exponent).
    pub fn at_least(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            residual,
            tolerance,
            pass: residual >= tolerance,
            seconds: None,
        }
    }

    /// Boolean outcome recorded as residual 0 (held) or 1 (violated) against tolerance 0.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        CheckRecord::at_most(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

/// Residual of one check at one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: u32,
    pub nodes: usize,
    pub h: f64,
    pub residual: f64,
}

/// A named regression result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedExponent {
    pub name: String,
    #[serde(flatten)]
    pub fit: ExponentFit,
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportParameters {
    pub m: usize,
    pub mu: f64,
    pub lambda: f64,
    pub level: u32,
    pub alpha: f64,
    pub seed: u64,
    /// The sign σ in `[a DuD + b DDu] + σ[μΔu + (μ+λ)∇(∇·u)] = 0`.
    pub lame_sign: i32,
}

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub parameters: ReportParameters,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<ConvergenceRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<FittedExponent>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
    pub pass: bool,
}

impl SuiteReport {
    pub(crate) fn new(suite: &str, parameters: ReportParameters) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            parameters,
            checks: Vec::new(),
            convergence: Vec::new(),
            exponents: Vec::new(),
            diagnostics: BTreeMap::new(),
            pass: true,
        }
    }

    pub(crate) fn push(&mut self, check: CheckRecord) {
        log::debug!(
            "{}: residual {:.3e} (tolerance {:.3e})",
            check.name,
            check.residual,
            check.tolerance
        );
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub(crate) fn diagnostic(&mut self, name: impl Into<String>, value: f64) {
        self.diagnostics.insert(name.into(), value);
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// `level,nodes,h,residual,observed_order`, one row per convergence entry.
    pub fn convergence_csv(&self) -> String {
        convergence_csv(&self.convergence)
    }
}

/// CSV table with the observed order `log(r_{k-1}/r_k) / log(h_{k-1}/h_k)` between rows.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("level,nodes,h,residual,observed_order\n");
    for (i, row) in rows.iter().enumerate() {
        let order = if i == 0 {
            String::new()
        } else {
            let prev = &rows[i - 1];
            format!(
                "{:.4}",
                (prev.residual / row.residual).ln() / (prev.h / row.h).ln()
            )
        };
        let _ = writeln!(
            out,
            "{},{},{:.6e},{:.6e},{}",
            row.level, row.nodes, row.h, row.residual, order
        );
    }
    out
}

/// Strictly decreasing residuals down the table.
pub fn is_monotone_decreasing(rows: &[ConvergenceRow]) -> bool {
    rows.windows(2).all(|w| w[1].residual < w[0].residual)
}
