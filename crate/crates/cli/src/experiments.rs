//! Ratio experiments shared by `run` and `estimate`. Samples follow corpus
//! order and each carries a complexity proxy (the spectral centroid of the
//! sample) used as the horizontal axis of `estimate` plots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use herzlab::corpus::build_corpus;
use herzlab::fft;
use herzlab::herz::{grand_herz_morrey_norm, split_norm, HerzParams};
use herzlab::lebesgue::weighted_norm;
use herzlab::operators::{
    bump_domination, discrete_convolution_bound, maximal, size_condition_operator, vector_ell_r,
    SizeKernel, VectorFunction, WindowFamily,
};
use herzlab::weight::{
    check_alpha_window, muckenhoupt_constant, BallFamily, HypothesisCheck, WeightClassReport,
};
use herzlab::{
    ConstantReport, ExponentFunction, GridSpec, Result, SampleRatio, SampledFunction, Weight,
};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug)]
pub struct Experiment {
    pub report: ConstantReport,
    pub proxies: Vec<f64>,
}

/// `sum |xi| |f^|^2 / sum |f^|^2`, or `0` for `f = 0`.
pub fn spectral_centroid(f: &SampledFunction) -> f64 {
    let spec = f.spec();
    let spectrum = fft::forward(spec, f.values());
    let (mut num, mut den) = (0.0, 0.0);
    for (v, r) in spectrum.iter().zip(fft::frequency_radii(spec)) {
        let e = v.norm_sqr();
        num += r * e;
        den += e;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VectorOperator {
    Size(SizeKernel),
    Maximal,
}

impl VectorOperator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Size(k) => k.name(),
            Self::Maximal => "maximal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Herz,
    Lebesgue,
}

/// One `(q, w)` configuration with its Herz parameters.
#[derive(Clone, Debug)]
pub struct Case {
    pub label: String,
    pub q: ExponentFunction,
    pub w: Weight,
    pub herz: HerzParams,
}

impl Case {
    pub fn new(cfg: &ExperimentConfig, spec: &GridSpec, q: &str, w: &str) -> Result<Self> {
        let herz = cfg.herz_params_with(spec, &cfg.herz.alpha, q, w)?;
        Ok(Self {
            label: format!("q={q}|w={w}"),
            q: herz.q.clone(),
            w: herz.w.clone(),
            herz,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Hypotheses {
    pub weight: WeightClassReport,
    pub window: HypothesisCheck,
}

impl Hypotheses {
    pub fn violated(&self) -> bool {
        self.weight.diverging || !self.window.satisfied
    }

    pub fn describe(&self) -> String {
        format!(
            "A constant {:.4e}{}, delta1 = {:.4}, delta2 = {:.4}, window ({:.4}, {:.4}) vs alpha(0) = {:.4}, alpha_inf = {:.4}",
            self.weight.constant,
            if self.weight.diverging { " (diverging)" } else { "" },
            self.weight.delta1,
            self.weight.delta2,
            self.window.lower,
            self.window.upper,
            self.window.alpha_origin,
            self.window.alpha_infinity
        )
    }
}

/// Muckenhoupt constant, decay exponents and the `alpha` window of a case.
pub fn hypotheses(case: &Case) -> Result<Hypotheses> {
    let spec = case.q.spec();
    let weight = muckenhoupt_constant(&case.w, &case.q, &BallFamily::default_for(spec))?;
    let window = check_alpha_window(&case.herz.alpha, weight.delta1, weight.delta2);
    Ok(Hypotheses { weight, window })
}

/// `samples` vector-valued samples; sample `i` holds corpus members
/// `i m..(i + 1) m` with `m = operators.members`, so a larger count extends
/// a smaller one.
pub fn vector_corpus(
    cfg: &ExperimentConfig,
    spec: &GridSpec,
    samples: usize,
) -> Result<Vec<VectorFunction>> {
    let m = cfg.operators.members;
    let mut corpus_spec = cfg.corpus_spec()?;
    corpus_spec.size = samples * m;
    build_corpus(spec, &corpus_spec)?
        .chunks(m)
        .map(|chunk| VectorFunction::new(chunk.to_vec(), cfg.operators.r))
        .collect()
}

fn target_norm(target: Target, f: &SampledFunction, case: &Case) -> Result<f64> {
    match target {
        Target::Herz => Ok(grand_herz_morrey_norm(f, &case.herz)?.value),
        Target::Lebesgue => weighted_norm(f, &case.q, &case.w),
    }
}

/// `(sum |T f_j|^r)^(1/r)` and `(sum |f_j|^r)^(1/r)` of one vector sample.
/// Both are independent of the case, so they are computed once and shared.
#[derive(Clone, Debug)]
pub struct VectorImage {
    pub label: String,
    pub image: SampledFunction,
    pub base: SampledFunction,
    pub proxy: f64,
}

pub fn vector_images(
    op: VectorOperator,
    vectors: &[VectorFunction],
    windows: &WindowFamily,
) -> Result<Vec<VectorImage>> {
    vectors
        .par_iter()
        .enumerate()
        .map(|(i, vf)| {
            vf.require_theorem_range()?;
            let image = vector_ell_r(vf, |f| match op {
                VectorOperator::Size(kind) => Ok(size_condition_operator(kind, f)),
                VectorOperator::Maximal => Ok(maximal(f, windows)),
            })?;
            let base = vector_ell_r(vf, |f| Ok(f.clone()))?;
            let proxy =
                vf.members().iter().map(spectral_centroid).sum::<f64>() / vf.members().len() as f64;
            Ok(VectorImage {
                label: format!("v{i:03}"),
                image,
                base,
                proxy,
            })
        })
        .collect()
}

/// Ratios `||(sum |T f_j|^r)^(1/r)|| / ||(sum |f_j|^r)^(1/r)||`.
pub fn vector_operator_experiment(
    op: VectorOperator,
    target: Target,
    case: &Case,
    images: &[VectorImage],
) -> Result<Experiment> {
    let rows = images
        .par_iter()
        .map(|v| {
            let sides = target_norm(target, &v.image, case)
                .and_then(|lhs| Ok((lhs, target_norm(target, &v.base, case)?)));
            Ok((SampleRatio::from_sides(v.label.clone(), sides)?, v.proxy))
        })
        .collect::<Result<Vec<_>>>()?;
    let (samples, proxies) = rows.into_iter().unzip();
    let name = format!(
        "{}:{}:{}",
        op.name(),
        match target {
            Target::Herz => "herz",
            Target::Lebesgue => "lebesgue",
        },
        case.label
    );
    Ok(Experiment {
        report: ConstantReport::from_samples(name, samples),
        proxies,
    })
}

/// `split_norm / grand_herz_morrey_norm` over the corpus.
pub fn split_experiment(corpus: &[SampledFunction], params: &HerzParams) -> Result<Experiment> {
    let rows = corpus
        .par_iter()
        .map(|f| {
            let sides = split_norm(f, params)
                .and_then(|split| Ok((split, grand_herz_morrey_norm(f, params)?.value)));
            Ok((
                SampleRatio::from_sides(f.label(), sides)?,
                spectral_centroid(f),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (samples, proxies) = rows.into_iter().unzip();
    Ok(Experiment {
        report: ConstantReport::from_samples(format!("split:{}", params.alpha.profile()), samples),
        proxies,
    })
}

/// Levels `N = 2^0..2^10` of the bump domination.
pub const BUMP_LEVELS: std::ops::RangeInclusive<i32> = 0..=10;

/// Worst `|omega_N * f| / Mf` per member and level.
pub fn bump_experiment(corpus: &[SampledFunction], windows: &WindowFamily) -> Result<Experiment> {
    let levels: Vec<i32> = BUMP_LEVELS.collect();
    let rows: Vec<(Vec<SampleRatio>, f64)> = corpus
        .par_iter()
        .map(|f| (bump_domination(f, windows, &levels), spectral_centroid(f)))
        .collect();
    let mut samples = Vec::new();
    let mut proxies = Vec::new();
    for (s, p) in rows {
        proxies.extend(std::iter::repeat_n(p, s.len()));
        samples.extend(s);
    }
    Ok(Experiment {
        report: ConstantReport::from_samples("bump_domination", samples),
        proxies,
    })
}

/// `(sum_(j>=0) 2^(-|j - k0| delta beta))^(1/beta)`, the exact ratio for a
/// sequence supported on the single index `k0`.
pub fn geometric_ratio(k0: usize, delta: f64, beta: f64) -> f64 {
    if beta.is_infinite() {
        return 1.0;
    }
    let rho = 2f64.powf(-delta * beta);
    let below: f64 = (1..=k0).map(|m| rho.powi(m as i32)).sum();
    (below + 1.0 / (1.0 - rho)).powf(1.0 / beta)
}

fn nonnegative(f: &SampledFunction, scale: f64) -> Result<SampledFunction> {
    SampledFunction::from_real(
        *f.spec(),
        f.abs().into_iter().map(|v| v * scale).collect(),
        f.label(),
    )
}

/// Sequences supported on one index `k0`, one per listed `k0`, built from
/// `|f|` of the first corpus member.
pub fn single_shell_experiment(
    cfg: &ExperimentConfig,
    f: &SampledFunction,
    params: &HerzParams,
    k0s: &[usize],
) -> Result<Vec<(usize, f64, f64)>> {
    let c = &cfg.convolution;
    let g = nonnegative(f, 1.0)?;
    k0s.iter()
        .map(|&k0| {
            let seq: Vec<SampledFunction> = (0..c.levels.max(k0 + 1))
                .map(|k| if k == k0 { g.clone() } else { g.scaled(0.0) })
                .collect();
            let r = discrete_convolution_bound(&seq, c.delta, c.beta, params)?;
            Ok((k0, r.max_ratio, geometric_ratio(k0, c.delta, c.beta)))
        })
        .collect()
}

/// Random nonnegative sequences: member `k` of sample `i` is corpus member
/// `i L + k` in absolute value, scaled by a log-uniform factor in
/// `[1e-2, 1e2]` drawn from stream `i` of the corpus seed.
pub fn random_convolution_experiment(
    cfg: &ExperimentConfig,
    spec: &GridSpec,
    samples: usize,
    params: &HerzParams,
) -> Result<Experiment> {
    let c = &cfg.convolution;
    let mut corpus_spec = cfg.corpus_spec()?;
    corpus_spec.size = samples * c.levels;
    let corpus = build_corpus(spec, &corpus_spec)?;
    let rows = corpus
        .par_chunks(c.levels)
        .enumerate()
        .map(|(i, chunk)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.corpus.seed ^ 0x5eed_c0de);
            rng.set_stream(i as u64);
            let seq = chunk
                .iter()
                .map(|f| nonnegative(f, 10f64.powf(rng.gen_range(-2.0..=2.0))))
                .collect::<Result<Vec<_>>>()?;
            let label = format!("g{i:03}");
            let sample = match discrete_convolution_bound(&seq, c.delta, c.beta, params) {
                Ok(r) => SampleRatio {
                    label,
                    ..r.samples[0].clone()
                },
                Err(e) if e.is_numerical() => SampleRatio::failed(label, &e),
                Err(e) => return Err(e),
            };
            let proxy = chunk.iter().map(spectral_centroid).sum::<f64>() / chunk.len() as f64;
            Ok((sample, proxy))
        })
        .collect::<Result<Vec<_>>>()?;
    let (samples, proxies) = rows.into_iter().unzip();
    Ok(Experiment {
        report: ConstantReport::from_samples("discrete_convolution", samples),
        proxies,
    })
}

/// Relative change of the largest ratio when the sample set is extended:
/// `max(all) / max(first half) - 1`.
pub fn doubling_growth(report: &ConstantReport, base: usize) -> f64 {
    let max_of = |s: &[SampleRatio]| s.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let small = max_of(&report.samples[..base.min(report.samples.len())]);
    let all = max_of(&report.samples);
    (all / small - 1.0).abs()
}
