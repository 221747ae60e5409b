//! Experiment configuration: a TOML document with one table per concern.
//! Every key has a default, so an empty file is a valid configuration.
//!
//! ```toml
//! [grid]
//! dimension = 1
//! halfwidth_log2 = 6
//! samples = 16384
//! k_min = -20
//! k_max = 6
//!
//! [herz]
//! alpha = "const:0.25"
//! alpha_variable = "log-perturbed:0.2,-0.1,0.05"
//! p = 2.0
//! q = "const:2"
//! lambda = 0.0
//! theta = 1.0
//! weight = "const:1"
//!
//! [corpus]
//! size = 64
//! seed = 20240601
//! families = ["packet", "mixture", "annulus"]
//!
//! [operators]
//! kinds = ["kernel_power", "riesz_truncated"]
//! r = 2.0
//! members = 3
//! cases = [["const:2", "const:1"], ["log-perturbed:2,2.5,0.1", "power:0.25"], ["const:2", "power:2"]]
//!
//! [spaces]
//! s = 0.5
//! beta = 2.0          # "inf" is accepted
//! a = 4.0
//! t = 0.5
//! epsilon = 0.5
//! moment_order = 1
//!
//! [convolution]
//! delta = 1.0
//! beta = 2.0
//! levels = 8
//!
//! [thresholds]
//! stability = 0.10
//! ```

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use herzlab::corpus::{CorpusSpec, Family, DEFAULT_CORPUS_SIZE, DEFAULT_SEED};
use herzlab::grid::make_grid;
use herzlab::herz::HerzParams;
use herzlab::littlewood_paley::{
    build_admissible_pair, build_kernel_family, build_resolution_of_unity, PeetreParams,
};
use herzlab::spaces::TLParams;
use herzlab::{Error, ExponentFunction, GridSpec, Result, Weight};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dimension: usize,
    pub halfwidth_log2: i32,
    pub samples: usize,
    pub k_min: i32,
    pub k_max: i32,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            dimension: 1,
            halfwidth_log2: 6,
            samples: 16384,
            k_min: -20,
            k_max: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HerzConfig {
    /// Exponent used by the operator and space suites.
    pub alpha: String,
    /// Non-constant exponent for the split-form comparison.
    pub alpha_variable: String,
    pub p: f64,
    pub q: String,
    pub lambda: f64,
    pub theta: f64,
    pub weight: String,
}

impl Default for HerzConfig {
    fn default() -> Self {
        Self {
            alpha: "const:0.25".into(),
            alpha_variable: "log-perturbed:0.2,-0.1,0.05".into(),
            p: 2.0,
            q: "const:2".into(),
            lambda: 0.0,
            theta: 1.0,
            weight: "const:1".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub size: usize,
    pub seed: u64,
    pub families: Vec<String>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            size: DEFAULT_CORPUS_SIZE,
            seed: DEFAULT_SEED,
            families: vec!["packet".into(), "mixture".into(), "annulus".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    pub kinds: Vec<String>,
    pub r: f64,
    /// Members per vector-valued sample.
    pub members: usize,
    /// `(q, weight)` presets.
    pub cases: Vec<(String, String)>,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            kinds: vec!["kernel_power".into(), "riesz_truncated".into()],
            r: 2.0,
            members: 3,
            cases: vec![
                ("const:2".into(), "const:1".into()),
                ("log-perturbed:2,2.5,0.1".into(), "power:0.25".into()),
                ("const:2".into(), "power:2".into()),
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpacesConfig {
    pub s: f64,
    #[serde(deserialize_with = "real_or_inf")]
    pub beta: f64,
    pub a: f64,
    /// Integrability index paired with `a` in the Peetre hypothesis.
    pub t: f64,
    pub epsilon: f64,
    pub moment_order: i32,
}

impl Default for SpacesConfig {
    fn default() -> Self {
        Self {
            s: 0.5,
            beta: 2.0,
            a: 4.0,
            t: 0.5,
            epsilon: 0.5,
            moment_order: 1,
        }
    }
}

fn real_or_inf<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Value {
        Num(f64),
        Int(i64),
        Text(String),
    }
    match Value::deserialize(d)? {
        Value::Num(v) => Ok(v),
        Value::Int(v) => Ok(v as f64),
        Value::Text(t) if t.trim() == "inf" => Ok(f64::INFINITY),
        Value::Text(t) => Err(serde::de::Error::custom(format!(
            "expected a number or \"inf\", got {t:?}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvolutionConfig {
    pub delta: f64,
    #[serde(deserialize_with = "real_or_inf")]
    pub beta: f64,
    /// Number of sequence members `g_0..g_(levels-1)`.
    pub levels: usize,
}

impl Default for ConvolutionConfig {
    fn default() -> Self {
        Self {
            delta: 1.0,
            beta: 2.0,
            levels: 8,
        }
    }
}

/// Gates of the acceptance checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub lebesgue_oracle: f64,
    pub homogeneity: f64,
    pub unit_modular: f64,
    pub holder: f64,
    pub delta_fit: f64,
    pub split_spread: f64,
    pub constant_alpha: f64,
    /// Largest relative change of the max ratio under corpus doubling.
    pub stability: f64,
    pub calderon: f64,
    /// Reconstruction from sampled coefficients, which carries a
    /// quadrature error the convolution form does not.
    pub calderon_sampled: f64,
    pub equivalence_spread: f64,
    pub five_norm_spread: f64,
    pub ordering: f64,
    pub geometric: f64,
    pub young: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            lebesgue_oracle: 1e-8,
            homogeneity: 1e-9,
            unit_modular: 1e-10,
            holder: 1.0,
            delta_fit: 0.02,
            split_spread: 16.0,
            constant_alpha: 1e-9,
            stability: 0.10,
            calderon: 1e-8,
            calderon_sampled: 1e-6,
            equivalence_spread: 16.0,
            five_norm_spread: 64.0,
            ordering: 1e-12,
            geometric: 1e-9,
            young: 6.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub herz: HerzConfig,
    pub corpus: CorpusConfig,
    pub operators: OperatorConfig,
    pub spaces: SpacesConfig,
    pub convolution: ConvolutionConfig,
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            input: "config".into(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            input: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Applies the command-line overrides.
    pub fn with_overrides(
        mut self,
        seed: Option<u64>,
        samples: Option<usize>,
        grid_n: Option<usize>,
    ) -> Self {
        if let Some(seed) = seed {
            self.corpus.seed = seed;
        }
        if let Some(samples) = samples {
            self.corpus.size = samples;
        }
        if let Some(n) = grid_n {
            self.grid.samples = n;
        }
        self
    }

    /// Checks everything that can be checked without running a suite.
    pub fn validate(&self) -> Result<()> {
        let spec = self.grid()?;
        self.herz_params(&spec)?;
        self.corpus_spec()?;
        if self.corpus.size == 0 {
            return Err(Error::InvalidParameter(
                "corpus size must be positive".into(),
            ));
        }
        if self.operators.members == 0 || !(self.operators.r > 1.0) {
            return Err(Error::InvalidParameter(
                "operators need members >= 1 and r > 1".into(),
            ));
        }
        for kind in &self.operators.kinds {
            herzlab::operators::SizeKernel::parse(kind)?;
        }
        for (q, w) in &self.operators.cases {
            ExponentFunction::parse(&spec, q)?;
            Weight::parse(&spec, w)?;
        }
        let c = &self.convolution;
        if !(c.delta > 0.0) || !(c.beta > 0.0) || c.levels == 0 {
            return Err(Error::InvalidParameter(
                "convolution needs delta > 0, beta > 0, levels >= 1".into(),
            ));
        }
        let t = &self.thresholds;
        let all = [
            t.lebesgue_oracle,
            t.homogeneity,
            t.unit_modular,
            t.holder,
            t.delta_fit,
            t.split_spread,
            t.constant_alpha,
            t.stability,
            t.calderon,
            t.calderon_sampled,
            t.equivalence_spread,
            t.five_norm_spread,
            t.ordering,
            t.geometric,
            t.young,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "thresholds must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let g = &self.grid;
        make_grid(g.dimension, g.halfwidth_log2, g.samples, g.k_min, g.k_max)
    }

    pub fn corpus_spec(&self) -> Result<CorpusSpec> {
        let families = self
            .corpus
            .families
            .iter()
            .map(|f| Family::parse(f))
            .collect::<Result<Vec<_>>>()?;
        Ok(CorpusSpec::new(self.corpus.size, self.corpus.seed).with_families(families))
    }

    /// Parameters with the configured `alpha`, `q` and weight.
    pub fn herz_params(&self, spec: &GridSpec) -> Result<HerzParams> {
        self.herz_params_with(spec, &self.herz.alpha, &self.herz.q, &self.herz.weight)
    }

    pub fn herz_params_with(
        &self,
        spec: &GridSpec,
        alpha: &str,
        q: &str,
        weight: &str,
    ) -> Result<HerzParams> {
        HerzParams::new(
            ExponentFunction::parse(spec, alpha)?,
            self.herz.p,
            ExponentFunction::parse(spec, q)?,
            self.herz.lambda,
            self.herz.theta,
            Weight::parse(spec, weight)?,
        )
    }

    pub fn peetre(&self) -> PeetreParams {
        PeetreParams {
            a: self.spaces.a,
            t_integrability: self.spaces.t,
            m: self.spaces.a,
        }
    }

    /// Space parameters on the default resolution of unity.
    pub fn tl_params(&self, spec: &GridSpec) -> Result<TLParams> {
        TLParams::new(
            self.herz_params(spec)?,
            self.spaces.s,
            self.spaces.beta,
            build_resolution_of_unity(spec)?,
            self.peetre(),
        )
    }

    pub fn admissible_params(&self, spec: &GridSpec) -> Result<TLParams> {
        self.tl_params(spec)?
            .with_bank(build_admissible_pair(spec)?)
    }

    pub fn kernel_params(&self, spec: &GridSpec) -> Result<TLParams> {
        self.tl_params(spec)?.with_bank(build_kernel_family(
            spec,
            self.spaces.moment_order,
            self.spaces.epsilon,
        )?)
    }
}
