//! Empirical constants of inequalities `lhs <= C rhs` over a corpus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRatio {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `0` when both sides vanish.
    pub ratio: f64,
    /// Set by the caller when the sample violates a threshold or an
    /// assumption.
    pub flagged: bool,
    /// Why the sample could not be evaluated; its sides are then NaN.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl SampleRatio {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 && rhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        };
        Self {
            label: label.into(),
            lhs,
            rhs,
            ratio,
            flagged: false,
            failure: None,
        }
    }

    /// A flagged placeholder for a sample whose evaluation failed.
    pub fn failed(label: impl Into<String>, error: &Error) -> Self {
        Self {
            label: label.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            flagged: true,
            failure: Some(error.to_string()),
        }
    }

    /// Numerical failures become flagged placeholders; any other error is
    /// returned.
    pub fn from_sides(label: impl Into<String>, sides: Result<(f64, f64)>) -> Result<Self> {
        match sides {
            Ok((lhs, rhs)) => Ok(Self::new(label, lhs, rhs)),
            Err(e) if e.is_numerical() => Ok(Self::failed(label, &e)),
            Err(e) => Err(e),
        }
    }

    pub fn flagged(mut self, flag: bool) -> Self {
        self.flagged = flag;
        self
    }
}

/// Worst and best ratios over a corpus. Samples with both sides zero are
/// counted in `skipped`, failed samples in `failed`; neither enters the
/// extremes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub name: String,
    pub samples: Vec<SampleRatio>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub argmax: Option<String>,
    pub argmin: Option<String>,
    /// `max_ratio / min_ratio`.
    pub spread: f64,
    pub skipped: usize,
    pub failed: usize,
}

impl ConstantReport {
    pub fn from_samples(name: impl Into<String>, samples: Vec<SampleRatio>) -> Self {
        let mut max_ratio = f64::NEG_INFINITY;
        let mut min_ratio = f64::INFINITY;
        let mut argmax = None;
        let mut argmin = None;
        let mut skipped = 0;
        let mut failed = 0;
        for s in &samples {
            if s.failure.is_some() {
                failed += 1;
                continue;
            }
            if s.lhs == 0.0 && s.rhs == 0.0 {
                skipped += 1;
                continue;
            }
            if s.ratio > max_ratio || s.ratio.is_nan() {
                max_ratio = s.ratio;
                argmax = Some(s.label.clone());
            }
            if s.ratio < min_ratio {
                min_ratio = s.ratio;
                argmin = Some(s.label.clone());
            }
        }
        if argmax.is_none() {
            max_ratio = 0.0;
            min_ratio = 0.0;
        }
        let spread = if min_ratio > 0.0 {
            max_ratio / min_ratio
        } else if max_ratio == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        Self {
            name: name.into(),
            samples,
            max_ratio,
            min_ratio,
            argmax,
            argmin,
            spread,
            skipped,
            failed,
        }
    }

    pub fn flagged_count(&self) -> usize {
        self.samples.iter().filter(|s| s.flagged).count()
    }
}
