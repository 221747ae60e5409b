//! Empirical constants of single inequalities, plotted against the
//! spectral centroid of each sample.

use herzlab::corpus::build_corpus;
use herzlab::operators::{SizeKernel, WindowFamily};
use herzlab::spaces::{
    equivalence_experiment, kernel_norms, tl_norm, tl_norm_admissible, tl_norm_peetre, NORM_NAMES,
};
use herzlab::{ConstantReport, Error, Result, SampleRatio};

use crate::config::ExperimentConfig;
use crate::experiments::{
    bump_experiment, random_convolution_experiment, spectral_centroid, split_experiment,
    vector_corpus, vector_images, vector_operator_experiment, Case, Experiment, Target,
    VectorOperator,
};
use crate::output::{Check, Row, SuiteOutcome};

/// Identifiers accepted by [`estimate`], besides `five_norms:<a>/<b>`.
pub const ESTIMATE_IDS: [&str; 8] = [
    "vT1", "vC1", "vL13", "tt-L1", "tt-L3", "ghm-L1", "vT2", "peetre",
];

pub const X_LABEL: &str = "spectral centroid";

fn unknown(id: &str) -> Error {
    Error::Parse {
        input: id.to_string(),
        reason: format!(
            "unknown estimate id; expected one of {} or five_norms:normA/normB",
            ESTIMATE_IDS.join(", ")
        ),
    }
}

fn push(out: &mut SuiteOutcome, case: &str, e: Experiment) {
    crate::suites::warn_failures(out, case, &e.report);
    for (s, x) in e.report.samples.iter().zip(&e.proxies) {
        out.rows
            .push(Row::new(case, &s.label, *x, s.lhs, s.rhs).flagged(s.flagged));
    }
    out.checks.push(
        Check::at_most(
            format!("{}: C", e.report.name),
            e.report.max_ratio,
            f64::MAX,
        )
        .ungated(),
    );
    out.reports.push(e.report);
}

fn with_proxies(report: ConstantReport, proxies: Vec<f64>) -> Experiment {
    Experiment { report, proxies }
}

fn parse_pair(id: &str) -> Option<(&'static str, &'static str)> {
    let rest = id.strip_prefix("five_norms:")?;
    let (a, b) = rest.split_once('/')?;
    let find = |n: &str| NORM_NAMES.iter().copied().find(|m| *m == n);
    let (a, b) = (find(a)?, find(b)?);
    (a != b).then_some((a, b))
}

/// Runs the estimate `id`. Every check is ungated: estimates report
/// constants and never fail on their size.
pub fn estimate(id: &str, cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let pair = parse_pair(id);
    if !ESTIMATE_IDS.contains(&id) && pair.is_none() {
        return Err(unknown(id));
    }
    cfg.validate()?;
    let spec = cfg.grid()?;
    let corpus = build_corpus(&spec, &cfg.corpus_spec()?)?;
    let centroids: Vec<f64> = corpus.iter().map(spectral_centroid).collect();
    let windows = WindowFamily::default_for(&spec);
    let mut out = SuiteOutcome::new(id);

    let vector_runs = |out: &mut SuiteOutcome, ops: &[(VectorOperator, Target)]| -> Result<()> {
        let vectors = vector_corpus(cfg, &spec, cfg.corpus.size)?;
        let mut images = Vec::new();
        for &(op, _) in ops {
            images.push(vector_images(op, &vectors, &windows)?);
        }
        for (q, w) in &cfg.operators.cases {
            let case = Case::new(cfg, &spec, q, w)?;
            if crate::experiments::hypotheses(&case)?.violated() {
                out.hypothesis_violated = true;
                out.warn(format!("{}: outside the hypotheses", case.label));
            }
            for (&(op, target), images) in ops.iter().zip(&images) {
                let e = vector_operator_experiment(op, target, &case, images)?;
                let name = e.report.name.clone();
                push(out, &name, e);
            }
        }
        Ok(())
    };

    match id {
        "vT1" => {
            let ops = cfg
                .operators
                .kinds
                .iter()
                .map(|k| Ok((VectorOperator::Size(SizeKernel::parse(k)?), Target::Herz)))
                .collect::<Result<Vec<_>>>()?;
            vector_runs(&mut out, &ops)?;
        }
        "vC1" => vector_runs(&mut out, &[(VectorOperator::Maximal, Target::Herz)])?,
        "vL13" => vector_runs(&mut out, &[(VectorOperator::Maximal, Target::Lebesgue)])?,
        "tt-L1" => {
            let params = cfg.herz_params(&spec)?;
            let e = random_convolution_experiment(cfg, &spec, cfg.corpus.size, &params)?;
            push(&mut out, "discrete_convolution", e);
        }
        "tt-L3" => {
            let e = bump_experiment(&corpus, &windows)?;
            push(&mut out, "bump_domination", e);
        }
        "ghm-L1" => {
            let params = cfg.herz_params_with(
                &spec,
                &cfg.herz.alpha_variable,
                &cfg.herz.q,
                &cfg.herz.weight,
            )?;
            let e = split_experiment(&corpus, &params)?;
            push(&mut out, "split", e);
        }
        "vT2" => {
            let p1 = cfg.tl_params(&spec)?;
            let pa = cfg.admissible_params(&spec)?;
            let r = equivalence_experiment(
                "tl_admissible/tl",
                &corpus,
                |f| tl_norm_admissible(f, &pa),
                |f| tl_norm(f, &p1),
            )?;
            push(&mut out, "admissible", with_proxies(r, centroids));
        }
        "peetre" => {
            let p1 = cfg.tl_params(&spec)?;
            let pa = cfg.admissible_params(&spec)?;
            if !p1.peetre_hypothesis_holds() {
                out.hypothesis_violated = true;
                out.warn("Peetre hypothesis fails for the configured a and t");
            }
            let r = equivalence_experiment(
                "tl_peetre/tl_admissible",
                &corpus,
                |f| Ok(tl_norm_peetre(f, &p1)?.value),
                |f| tl_norm_admissible(f, &pa),
            )?;
            push(&mut out, "peetre", with_proxies(r, centroids));
        }
        _ => {
            let (a, b) = pair.ok_or_else(|| unknown(id))?;
            let params = cfg.kernel_params(&spec)?;
            let samples = corpus
                .iter()
                .map(|f| {
                    let sides = kernel_norms(f, &params).map(|c| (c.values[a], c.values[b]));
                    SampleRatio::from_sides(f.label(), sides)
                })
                .collect::<Result<Vec<_>>>()?;
            let r = ConstantReport::from_samples(format!("{a}/{b}"), samples);
            push(&mut out, &format!("{a}/{b}"), with_proxies(r, centroids));
        }
    }
    Ok(out)
}
