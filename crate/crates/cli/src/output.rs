//! Suite outcomes and their CSV, JSON and SVG files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use herzlab::{ConstantReport, Error, Result};

use crate::svg::{scatter, Series};

/// One per-sample row of a suite CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case: String,
    pub label: String,
    /// Horizontal coordinate of the scatter plot.
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub flagged: bool,
}

impl Row {
    pub fn new(
        case: impl Into<String>,
        label: impl Into<String>,
        x: f64,
        lhs: f64,
        rhs: f64,
    ) -> Self {
        let ratio = if lhs == 0.0 && rhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        };
        Self {
            case: case.into(),
            label: label.into(),
            x,
            lhs,
            rhs,
            ratio,
            flagged: false,
        }
    }

    pub fn flagged(mut self, flag: bool) -> Self {
        self.flagged = flag;
        self
    }

    /// Rows of a report, plotted against the sample index.
    pub fn from_report(case: &str, report: &ConstantReport) -> Vec<Self> {
        report
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| Row {
                case: case.to_string(),
                label: s.label.clone(),
                x: i as f64,
                lhs: s.lhs,
                rhs: s.rhs,
                ratio: s.ratio,
                flagged: s.flagged,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

/// A measured quantity against its threshold. Ungated checks are reported
/// but never fail the suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub gated: bool,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::AtMost,
            gated: true,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::AtLeast,
            gated: true,
            passed: value >= threshold,
        }
    }

    pub fn ungated(mut self) -> Self {
        self.gated = false;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub checks: Vec<Check>,
    pub rows: Vec<Row>,
    /// Set when some case ran outside the hypotheses of its result; such
    /// cases carry ungated checks.
    pub hypothesis_violated: bool,
    pub warnings: Vec<String>,
    pub reports: Vec<ConstantReport>,
}

impl SuiteOutcome {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.gated)
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.gated && !c.passed)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    suite: &'a str,
    passed: bool,
    hypothesis_violated: bool,
    checks: &'a [Check],
    warnings: &'a [String],
    reports: Vec<ReportSummary<'a>>,
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    name: &'a str,
    max_ratio: f64,
    min_ratio: f64,
    argmax: &'a Option<String>,
    argmin: &'a Option<String>,
    spread: f64,
    skipped: usize,
    samples: usize,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        input: path.display().to_string(),
        reason: e.to_string(),
    }
}

/// Writes the rows as RFC 4180 CSV.
pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn summary_json(outcome: &SuiteOutcome) -> Result<String> {
    let summary = Summary {
        suite: &outcome.suite,
        passed: outcome.passed(),
        hypothesis_violated: outcome.hypothesis_violated,
        checks: &outcome.checks,
        warnings: &outcome.warnings,
        reports: outcome
            .reports
            .iter()
            .map(|r| ReportSummary {
                name: &r.name,
                max_ratio: r.max_ratio,
                min_ratio: r.min_ratio,
                argmax: &r.argmax,
                argmin: &r.argmin,
                spread: r.spread,
                skipped: r.skipped,
                samples: r.samples.len(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&summary).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Writes `<name>.csv`, `<name>.json` and `<name>.svg` into `dir` and
/// returns their paths.
pub fn write_outputs(
    dir: &Path,
    name: &str,
    outcome: &SuiteOutcome,
    x_label: &str,
) -> Result<[PathBuf; 3]> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let csv_path = dir.join(format!("{name}.csv"));
    let json_path = dir.join(format!("{name}.json"));
    let svg_path = dir.join(format!("{name}.svg"));
    write_csv(&csv_path, &outcome.rows)?;
    fs::write(&json_path, summary_json(outcome)? + "\n").map_err(|e| io_error(&json_path, e))?;

    let mut series: Vec<Series> = Vec::new();
    for row in &outcome.rows {
        if !(row.ratio.is_finite() && row.ratio > 0.0) {
            continue;
        }
        match series.iter_mut().find(|s| s.name == row.case) {
            Some(s) => s.points.push((row.x, row.ratio)),
            None => series.push(Series {
                name: row.case.clone(),
                points: vec![(row.x, row.ratio)],
            }),
        }
    }
    let title = format!("{name}: ratio per sample");
    fs::write(&svg_path, scatter(&title, x_label, "ratio", &series))
        .map_err(|e| io_error(&svg_path, e))?;
    Ok([csv_path, json_path, svg_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_fields_with_commas() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        write_csv(
            &path,
            &[Row::new("q=log-perturbed:2,2.5,0.1", "f\"0", 0.0, 1.0, 2.0)],
        )
        .unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "case,label,x,lhs,rhs,ratio,flagged\n\"q=log-perturbed:2,2.5,0.1\",\"f\"\"0\",0.0,1.0,2.0,0.5,false\n"
        );
    }

    #[test]
    fn ungated_checks_do_not_fail() {
        let mut o = SuiteOutcome::new("x");
        o.checks.push(Check::at_most("a", 2.0, 1.0).ungated());
        o.checks.push(Check::at_least("b", 2.0, 1.0));
        assert!(o.passed());
        o.checks.push(Check::at_most("c", 2.0, 1.0));
        assert!(!o.passed());
    }
}
