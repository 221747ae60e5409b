//! The verification suites. Each builds its corpus from the configuration,
//! runs its experiments and compares the measured constants with the
//! configured thresholds.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use herzlab::corpus::{band_limited_corpus, build_corpus};
use herzlab::grid::integrate_field;
use herzlab::lebesgue::{holder_check, luxemburg_norm, DEFAULT_HOLDER_CONSTANT};
use herzlab::littlewood_paley::{
    build_admissible_dual, build_admissible_pair, build_resolution_of_unity_with,
    calderon_reconstruct, calderon_reconstruct_sampled, eta_majorization_check, max_level,
    peetre_of_field, relative_l2_error, BumpProfile,
};
use herzlab::operators::{SizeKernel, WindowFamily};
use herzlab::spaces::{
    equivalence_experiment, kernel_norms, summarize_corpus, tl_norm, tl_norm_admissible,
    tl_norm_peetre, NORM_NAMES,
};
use herzlab::weight::estimate_delta_exponents;
use herzlab::weight::NestedFamily;
use herzlab::{
    ConstantReport, Error, ExponentFunction, ExponentProfile, GridSpec, Result, SampledFunction,
    Weight,
};

use crate::config::ExperimentConfig;
use crate::experiments::{
    bump_experiment, doubling_growth, hypotheses, random_convolution_experiment,
    single_shell_experiment, split_experiment, vector_corpus, vector_images,
    vector_operator_experiment, Case, Target, VectorImage, VectorOperator,
};
use crate::output::{Check, Row, SuiteOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lebesgue,
    Weights,
    Herz,
    Sublinear,
    MaximalVector,
    Calderon,
    Peetre,
    FiveNorms,
    ConvolutionLemma,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Lebesgue,
        Suite::Weights,
        Suite::Herz,
        Suite::Sublinear,
        Suite::MaximalVector,
        Suite::Calderon,
        Suite::Peetre,
        Suite::FiveNorms,
        Suite::ConvolutionLemma,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lebesgue => "lebesgue",
            Suite::Weights => "weights",
            Suite::Herz => "herz",
            Suite::Sublinear => "sublinear",
            Suite::MaximalVector => "maximal_vector",
            Suite::Calderon => "calderon",
            Suite::Peetre => "peetre",
            Suite::FiveNorms => "five_norms",
            Suite::ConvolutionLemma => "convolution_lemma",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::Parse {
                input: name.to_string(),
                reason: format!(
                    "unknown suite; expected one of {}",
                    Self::ALL.map(|s| s.name()).join(", ")
                ),
            })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn run_suite(suite: Suite, cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    cfg.validate()?;
    let spec = cfg.grid()?;
    let mut out = SuiteOutcome::new(suite.name());
    match suite {
        Suite::Lebesgue => lebesgue(cfg, &spec, &mut out)?,
        Suite::Weights => weights(cfg, &spec, &mut out)?,
        Suite::Herz => herz(cfg, &spec, &mut out)?,
        Suite::Sublinear => vector_suite(cfg, &spec, &mut out, false)?,
        Suite::MaximalVector => vector_suite(cfg, &spec, &mut out, true)?,
        Suite::Calderon => calderon(cfg, &spec, &mut out)?,
        Suite::Peetre => peetre(cfg, &spec, &mut out)?,
        Suite::FiveNorms => five_norms(cfg, &spec, &mut out)?,
        Suite::ConvolutionLemma => convolution_lemma(cfg, &spec, &mut out)?,
    }
    Ok(out)
}

fn corpus(cfg: &ExperimentConfig, spec: &GridSpec) -> Result<Vec<SampledFunction>> {
    build_corpus(spec, &cfg.corpus_spec()?)
}

fn max_deviation_from_one(rows: &[Row]) -> f64 {
    rows.iter()
        .map(|r| (r.ratio - 1.0).abs())
        .fold(0.0, f64::max)
}

fn push_report(out: &mut SuiteOutcome, case: &str, report: ConstantReport) {
    warn_failures(out, case, &report);
    out.rows.extend(Row::from_report(case, &report));
    out.reports.push(report);
}

pub(crate) fn warn_failures(out: &mut SuiteOutcome, case: &str, report: &ConstantReport) {
    for s in &report.samples {
        if let Some(why) = &s.failure {
            out.warn(format!("{case}: {} flagged, {why}", s.label));
        }
    }
}

/// Number of randomized `(f, q, c)` triples of the invariant checks.
pub const INVARIANT_TRIPLES: usize = 100;
const ORACLE_EXPONENTS: [f64; 4] = [1.0, 1.5, 2.0, 4.0];

fn random_exponent(spec: &GridSpec, rng: &mut ChaCha8Rng) -> Result<ExponentFunction> {
    let profile = ExponentProfile::LogPerturbed {
        a0: rng.gen_range(1.2..4.0),
        a_inf: rng.gen_range(1.2..4.0),
        c: rng.gen_range(0.0..0.1),
    };
    ExponentFunction::new(spec, profile)
}

fn lebesgue(cfg: &ExperimentConfig, spec: &GridSpec, out: &mut SuiteOutcome) -> Result<()> {
    let th = &cfg.thresholds;
    let corpus = corpus(cfg, spec)?;
    for p in ORACLE_EXPONENTS {
        let q = ExponentFunction::constant(spec, p)?;
        let case = format!("oracle p={p}");
        let start = out.rows.len();
        for (i, f) in corpus.iter().enumerate() {
            let norm = luxemburg_norm(f, &q)?.norm;
            let powered: Vec<f64> = f.abs().iter().map(|v| v.powf(p)).collect();
            let oracle = integrate_field(spec, &powered).powf(1.0 / p);
            out.rows
                .push(Row::new(&case, f.label(), i as f64, norm, oracle));
        }
        let err = max_deviation_from_one(&out.rows[start..]);
        out.checks.push(Check::at_most(
            format!("{case}: max relative error"),
            err,
            th.lebesgue_oracle,
        ));
    }

    let (mut homogeneity, mut unit, mut holder) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..INVARIANT_TRIPLES {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.corpus.seed);
        rng.set_stream(1_000 + i as u64);
        let f = &corpus[i % corpus.len()];
        let g = &corpus[(i + 1) % corpus.len()];
        let q = random_exponent(spec, &mut rng)?;
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let c = sign * 10f64.powf(rng.gen_range(-3.0..=3.0));
        let base = luxemburg_norm(f, &q)?;
        let scaled = luxemburg_norm(&f.scaled(c), &q)?.norm;
        let label = format!("{}|{}|c={c:.6e}", f.label(), q.profile());
        let row = Row::new("homogeneity", &label, i as f64, scaled, c.abs() * base.norm);
        homogeneity = homogeneity.max((row.ratio - 1.0).abs());
        out.rows.push(row);
        if base.norm > 0.0 {
            let row = Row::new("unit_modular", &label, i as f64, base.modular_at_norm, 1.0);
            unit = unit.max((row.ratio - 1.0).abs());
            out.rows.push(row);
        }
        let h = holder_check(f, g, &q, DEFAULT_HOLDER_CONSTANT)?;
        holder = holder.max(h.ratio);
        out.rows
            .push(Row::new("holder", label, i as f64, h.lhs, h.rhs));
    }
    out.checks.push(Check::at_most(
        "homogeneity: max relative error",
        homogeneity,
        th.homogeneity,
    ));
    out.checks.push(Check::at_most(
        "unit modular: max |rho(f/||f||) - 1|",
        unit,
        th.unit_modular,
    ));
    out.checks
        .push(Check::at_most("holder: max ratio", holder, th.holder));
    Ok(())
}

const FIT_EXPONENTS: [f64; 2] = [2.0, 4.0];

fn weights(cfg: &ExperimentConfig, spec: &GridSpec, out: &mut SuiteOutcome) -> Result<()> {
    let th = &cfg.thresholds;
    let unit = Weight::unit(spec);
    let nested = NestedFamily::default_for(spec);
    for (i, p) in FIT_EXPONENTS.into_iter().enumerate() {
        let q = ExponentFunction::constant(spec, p)?;
        let fit = estimate_delta_exponents(&unit, &q, &nested)?;
        let (e1, e2) = (1.0 / p, 1.0 - 1.0 / p);
        let case = format!("fit p={p}");
        out.rows
            .push(Row::new(&case, "delta1", i as f64, fit.delta1, e1));
        out.rows
            .push(Row::new(&case, "delta2", i as f64, fit.delta2, e2));
        out.checks.push(Check::at_most(
            format!("{case}: |delta1 - 1/p|"),
            (fit.delta1 - e1).abs(),
            th.delta_fit,
        ));
        out.checks.push(Check::at_most(
            format!("{case}: |delta2 - 1/p'|"),
            (fit.delta2 - e2).abs(),
            th.delta_fit,
        ));
    }
    for (q, w) in &cfg.operators.cases {
        let case = Case::new(cfg, spec, q, w)?;
        let h = hypotheses(&case)?;
        for (j, b) in h.weight.witnesses.iter().enumerate() {
            out.rows.push(Row::new(
                &case.label,
                format!("ball c={:?} r={}", b.center, b.radius),
                j as f64,
                b.value,
                1.0,
            ));
        }
        if h.violated() {
            out.hypothesis_violated = true;
            out.warn(format!("{}: hypotheses fail: {}", case.label, h.describe()));
        }
        out.checks.push(
            Check::at_most(
                format!("{}: A constant", case.label),
                h.weight.constant,
                f64::MAX,
            )
            .ungated(),
        );
    }
    Ok(())
}

fn herz(cfg: &ExperimentConfig, spec: &GridSpec, out: &mut SuiteOutcome) -> Result<()> {
    let th = &cfg.thresholds;
    let corpus = corpus(cfg, spec)?;
    let variable = cfg.herz_params_with(
        spec,
        &cfg.herz.alpha_variable,
        &cfg.herz.q,
        &cfg.herz.weight,
    )?;
    let e = split_experiment(&corpus, &variable)?;
    out.checks.push(Check::at_most(
        "split/full spread, variable alpha",
        e.report.spread,
        th.split_spread,
    ));
    push_report(out, "variable_alpha", e.report);

    let params = cfg.herz_params(spec)?;
    if params.alpha.as_constant().is_some() {
        let e = split_experiment(&corpus, &params)?;
        let start = out.rows.len();
        push_report(out, "constant_alpha", e.report);
        let dev = max_deviation_from_one(&out.rows[start..]);
        out.checks.push(Check::at_most(
            "split/full - 1, constant alpha",
            dev,
            th.constant_alpha,
        ));
    } else {
        out.warn("herz.alpha is not constant; the constant-alpha identity is not checked");
    }
    Ok(())
}

fn vector_suite(
    cfg: &ExperimentConfig,
    spec: &GridSpec,
    out: &mut SuiteOutcome,
    maximal: bool,
) -> Result<()> {
    let th = &cfg.thresholds;
    let base = cfg.corpus.size;
    let vectors = vector_corpus(cfg, spec, 2 * base)?;
    let windows = WindowFamily::default_for(spec);
    let runs: Vec<(VectorOperator, Target)> = if maximal {
        vec![
            (VectorOperator::Maximal, Target::Herz),
            (VectorOperator::Maximal, Target::Lebesgue),
        ]
    } else {
        cfg.operators
            .kinds
            .iter()
            .map(|k| Ok((VectorOperator::Size(SizeKernel::parse(k)?), Target::Herz)))
            .collect::<Result<_>>()?
    };
    let mut images: Vec<(VectorOperator, Vec<VectorImage>)> = Vec::new();
    for &(op, _) in &runs {
        if !images.iter().any(|(o, _)| *o == op) {
            images.push((op, vector_images(op, &vectors, &windows)?));
        }
    }
    let images_of = |op: VectorOperator| {
        &images
            .iter()
            .find(|(o, _)| *o == op)
            .expect("computed above")
            .1
    };
    for (q, w) in &cfg.operators.cases {
        let case = Case::new(cfg, spec, q, w)?;
        let h = hypotheses(&case)?;
        let violated = h.violated();
        if violated {
            out.hypothesis_violated = true;
            out.warn(format!(
                "{}: hypotheses fail, excluded from gating: {}",
                case.label,
                h.describe()
            ));
        }
        for &(op, target) in &runs {
            let e = vector_operator_experiment(op, target, &case, images_of(op))?;
            let name = e.report.name.clone();
            let growth = doubling_growth(&e.report, base);
            let mut finite =
                Check::at_most(format!("{name}: max ratio"), e.report.max_ratio, f64::MAX);
            let mut stable = Check::at_most(
                format!("{name}: growth {base}->{}", 2 * base),
                growth,
                th.stability,
            );
            if violated {
                finite = finite.ungated();
                stable = stable.ungated();
            }
            out.checks.push(finite);
            out.checks.push(stable);
            push_report(out, &name, e.report);
        }
    }
    if maximal {
        let corpus = corpus(cfg, spec)?;
        let e = bump_experiment(&corpus, &windows)?;
        out.checks.push(Check::at_most(
            "bump domination: C",
            e.report.max_ratio,
            f64::MAX,
        ));
        push_report(out, "bump_domination", e.report);
    }
    Ok(())
}

/// Number of band-limited functions of the reconstruction check.
pub const CALDERON_SAMPLES: usize = 32;

fn calderon(cfg: &ExperimentConfig, spec: &GridSpec, out: &mut SuiteOutcome) -> Result<()> {
    let th = &cfg.thresholds;
    let bank = build_admissible_dual(&build_admissible_pair(spec)?)?;
    let functions = band_limited_corpus(spec, CALDERON_SAMPLES, cfg.corpus.seed)?;
    let (mut conv, mut sampled) = (0.0f64, 0.0f64);
    for (i, f) in functions.iter().enumerate() {
        let a = relative_l2_error(&calderon_reconstruct(f, &bank)?.function, f);
        let b = relative_l2_error(&calderon_reconstruct_sampled(f, &bank)?.function, f);
        conv = conv.max(a);
        sampled = sampled.max(b);
        out.rows
            .push(Row::new("convolution_form", f.label(), i as f64, a, 1.0));
        out.rows
            .push(Row::new("sampled_form", f.label(), i as f64, b, 1.0));
    }
    out.checks.push(Check::at_most(
        "reconstruction error, convolution form",
        conv,
        th.calderon,
    ));
    out.checks.push(Check::at_most(
        "reconstruction error, sampled form",
        sampled,
        th.calderon_sampled,
    ));

    let corpus = corpus(cfg, spec)?;
    let p1 = cfg.tl_params(spec)?;
    let p2 = p1.clone().with_bank(build_resolution_of_unity_with(
        spec,
        BumpProfile::alternate(),
    )?)?;
    let pa = cfg.admissible_params(spec)?;
    let r = equivalence_experiment(
        "tl_alternate/tl",
        &corpus,
        |f| tl_norm(f, &p2),
        |f| tl_norm(f, &p1),
    )?;
    out.checks.push(Check::at_most(
        "spread, two resolutions of unity",
        r.spread,
        th.equivalence_spread,
    ));
    push_report(out, "two_resolutions", r);
    let r = equivalence_experiment(
        "tl_admissible/tl",
        &corpus,
        |f| tl_norm_admissible(f, &pa),
        |f| tl_norm(f, &p1),
    )?;
    out.checks.push(Check::at_most(
        "spread, admissible pair vs resolution",
        r.spread,
        th.equivalence_spread,
    ));
    push_report(out, "admissible", r);
    Ok(())
}

fn peetre(cfg: &ExperimentConfig, spec: &GridSpec, out: &mut SuiteOutcome) -> Result<()> {
    let th = &cfg.thresholds;
    let corpus = corpus(cfg, spec)?;
    let params = cfg.tl_params(spec)?;
    let pa = cfg.admissible_params(spec)?;
    let a = cfg.spaces.a;

    let mut excess = f64::NEG_INFINITY;
    for (i, f) in corpus.iter().enumerate() {
        let conv = params.bank.apply_all(f)?;
        let mut worst = f64::NEG_INFINITY;
        for (j, c) in conv.iter().enumerate() {
            let sup = peetre_of_field(spec, c, j as i32, a)?;
            for (v, s) in c.iter().zip(&sup) {
                worst = worst.max(v.norm() - s);
            }
        }
        excess = excess.max(worst);
        out.rows.push(Row::new(
            "pointwise_excess",
            f.label(),
            i as f64,
            worst.max(0.0),
            1.0,
        ));
    }
    out.checks
        .push(Check::at_most("max |phi_j * f| - phi*_j f", excess, 0.0));

    let holds = params.peetre_hypothesis_holds();
    let r = equivalence_experiment(
        "tl_peetre/tl_admissible",
        &corpus,
        |f| Ok(tl_norm_peetre(f, &params)?.value),
        |f| tl_norm_admissible(f, &pa),
    )?;
    let mut check = Check::at_most(
        format!("spread, Peetre vs admissible (a = {a})"),
        r.spread,
        th.equivalence_spread,
    );
    if !holds {
        check = check.ungated();
        out.hypothesis_violated = true;
        out.warn(format!(
            "a t > n fails for a = {a}, t = {}; spread not gated",
            cfg.spaces.t
        ));
    }
    out.checks.push(check);
    push_report(out, "peetre", r);

    // The same comparison outside the hypothesis, recorded only.
    let weak = cfg.peetre();
    let n = spec.dimension() as f64;
    let weak_a = 0.5 * n / weak.t_integrability;
    let mut weak_params = params.clone();
    weak_params.peetre.a = weak_a;
    let r = equivalence_experiment(
        "tl_peetre_weak/tl_admissible",
        &corpus,
        |f| Ok(tl_norm_peetre(f, &weak_params)?.value),
        |f| tl_norm_admissible(f, &pa),
    )?;
    out.checks.push(
        Check::at_most(
            format!("spread, Peetre with a t = n/2 (a = {weak_a})"),
            r.spread,
            th.equivalence_spread,
        )
        .ungated(),
    );
    push_report(out, "peetre_weak", r);

    let j_max = max_level(spec);
    let j = (j_max / 2).max(1);
    let j_primes: Vec<i32> = (0..=j_max).collect();
    let mut samples = Vec::new();
    for f in corpus.iter().take(16) {
        let rep = eta_majorization_check(
            f,
            &params.bank,
            j,
            &j_primes,
            weak.t_integrability,
            weak.m.max(n + 1.0),
        )?;
        samples.extend(rep.samples);
    }
    let r = ConstantReport::from_samples("eta_majorization", samples);
    out.checks
        .push(Check::at_most("eta majorization: C", r.max_ratio, f64::MAX).ungated());
    push_report(out, "eta_majorization", r);
    Ok(())
}

fn five_norms(cfg: &ExperimentConfig, spec: &GridSpec, out: &mut SuiteOutcome) -> Result<()> {
    let th = &cfg.thresholds;
    let corpus = corpus(cfg, spec)?;
    let params = cfg.kernel_params(spec)?;
    let mut members = Vec::new();
    let mut comparisons = Vec::new();
    for (i, f) in corpus.iter().enumerate() {
        match kernel_norms(f, &params) {
            Ok(c) => {
                members.push((i, f));
                comparisons.push(c);
            }
            Err(e) if e.is_numerical() => {
                out.warn(format!("{}: flagged and skipped, {e}", f.label()))
            }
            Err(e) => return Err(e),
        }
    }
    let mut zero_values = 0usize;
    let mut gap = f64::NEG_INFINITY;
    for ((i, f), c) in members.iter().copied().zip(&comparisons) {
        if !f.is_zero() {
            zero_values += c.values.values().filter(|v| **v == 0.0).count();
        }
        gap = gap
            .max(c.pointwise_ordering_gap[0])
            .max(c.pointwise_ordering_gap[1]);
        for (a, name_a) in NORM_NAMES.iter().enumerate() {
            for name_b in NORM_NAMES.iter().skip(a + 1) {
                out.rows.push(Row::new(
                    format!("{name_a}/{name_b}"),
                    f.label(),
                    i as f64,
                    c.values[*name_a],
                    c.values[*name_b],
                ));
            }
        }
        for flag in &c.flags {
            if flag != herzlab::spaces::kernel_norms::FLAG_K0_PEETRE {
                out.warn(format!("{}: {flag}", f.label()));
            }
        }
    }
    out.warn("the k0 Peetre term is the weighted sup of |k0 * f| at scale 1");
    if !params.peetre.hypothesis_holds(spec.dimension()) {
        out.hypothesis_violated = true;
    }
    out.checks.push(Check::at_most(
        "zero norms on nonzero members",
        zero_values as f64,
        0.0,
    ));
    out.checks.push(Check::at_most(
        "pointwise ordering excess",
        gap,
        th.ordering,
    ));
    for s in summarize_corpus(&comparisons) {
        out.checks.push(Check::at_most(
            format!("spread {}/{}", s.a, s.b),
            s.spread,
            th.five_norm_spread,
        ));
    }
    Ok(())
}

/// Indices of the single-shell checks.
const SHELL_INDICES: [usize; 3] = [0, 2, 5];

fn convolution_lemma(
    cfg: &ExperimentConfig,
    spec: &GridSpec,
    out: &mut SuiteOutcome,
) -> Result<()> {
    let th = &cfg.thresholds;
    let params = cfg.herz_params(spec)?;
    let corpus = corpus(cfg, spec)?;
    let mut worst = 0.0f64;
    for (k0, ratio, expected) in single_shell_experiment(cfg, &corpus[0], &params, &SHELL_INDICES)?
    {
        let row = Row::new(
            "single_shell",
            format!("k0={k0}"),
            k0 as f64,
            ratio,
            expected,
        );
        worst = worst.max((row.ratio - 1.0).abs());
        out.rows.push(row);
    }
    out.checks.push(Check::at_most(
        "single shell vs geometric ratio",
        worst,
        th.geometric,
    ));
    let e = random_convolution_experiment(cfg, spec, cfg.corpus.size, &params)?;
    out.checks.push(Check::at_most(
        "random sequences: max ratio",
        e.report.max_ratio,
        th.young,
    ));
    push_report(out, "random", e.report);
    Ok(())
}

/// Labels of a report's samples, for witnesses in messages.
pub fn describe_report(r: &ConstantReport) -> String {
    format!(
        "max {:.6e} ({}), min {:.6e} ({}), spread {:.4}",
        r.max_ratio,
        r.argmax.as_deref().unwrap_or("-"),
        r.min_ratio,
        r.argmin.as_deref().unwrap_or("-"),
        r.spread
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert!(Suite::parse("nope").is_err());
    }
}
