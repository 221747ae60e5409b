//! Empirical equivalence constants between two norms over a corpus.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::SampledFunction;
use crate::report::{ConstantReport, SampleRatio};

/// Ratios `norm_a(f) / norm_b(f)` for every member. Members where both norms
/// vanish are skipped and counted; a member where exactly one vanishes is
/// kept and drives the spread to `0` or infinity.
pub fn equivalence_experiment<A, B>(
    name: &str,
    corpus: &[SampledFunction],
    norm_a: A,
    norm_b: B,
) -> Result<ConstantReport>
where
    A: Fn(&SampledFunction) -> Result<f64> + Sync,
    B: Fn(&SampledFunction) -> Result<f64> + Sync,
{
    if corpus.is_empty() {
        return Err(invalid("corpus is empty"));
    }
    let samples = corpus
        .par_iter()
        .map(|f| SampleRatio::from_sides(f.label(), norm_a(f).and_then(|a| Ok((a, norm_b(f)?)))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantReport::from_samples(name, samples))
}
