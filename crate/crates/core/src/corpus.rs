//! Deterministic test-function corpora.
//!
//! Member `i` draws from its own ChaCha stream `(seed, i)`, so a corpus of
//! size `2m` extends the corpus of size `m` and parallel construction is
//! reproducible. Every member decays below `1e-12` at the domain boundary.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{GridSpec, SampledFunction};
use crate::littlewood_paley::max_level;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Gaussian-windowed cosine concentrated in one frequency octave.
    WavePacket,
    /// One to three Gaussians with random signs.
    GaussianMixture,
    /// Radial bump concentrated near `|x| = 0.75 * 2^k`.
    Annulus,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::WavePacket, Family::GaussianMixture, Family::Annulus];

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "wave_packet" | "packet" => Ok(Self::WavePacket),
            "gaussian_mixture" | "mixture" => Ok(Self::GaussianMixture),
            "annulus" => Ok(Self::Annulus),
            other => Err(invalid(format!("unknown corpus family `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub size: usize,
    pub seed: u64,
    /// Cycled by member index.
    pub families: Vec<Family>,
}

impl CorpusSpec {
    pub fn new(size: usize, seed: u64) -> Self {
        Self {
            size,
            seed,
            families: Family::ALL.to_vec(),
        }
    }

    pub fn with_families(mut self, families: Vec<Family>) -> Self {
        self.families = families;
        self
    }
}

pub const DEFAULT_CORPUS_SIZE: usize = 64;
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Parameters of `A exp(-|x - c|^2 / (2 sigma^2)) cos(xi0 (x_1 - c_1) + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    pub amplitude: f64,
    pub center: f64,
    pub sigma: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl WavePacket {
    pub fn sample(&self, spec: &GridSpec, label: impl Into<String>) -> Result<SampledFunction> {
        let p = *self;
        SampledFunction::from_real_fn(*spec, label, move |x| {
            let dx = x[0] - p.center;
            let r2 = dx * dx + x.get(1).map_or(0.0, |y| y * y);
            p.amplitude
                * (-r2 / (2.0 * p.sigma * p.sigma)).exp()
                * (p.frequency * dx + p.phase).cos()
        })
    }
}

/// Scale factor relative to the default half-width `2^6`.
fn domain_scale(spec: &GridSpec) -> f64 {
    2f64.powi(spec.halfwidth_log2() - 6)
}

/// Packet with carrier `2^level * u`, `u` in `[0.8, 1.25]`.
pub fn random_packet<R: Rng>(spec: &GridSpec, level: i32, rng: &mut R) -> WavePacket {
    let a = spec.halfwidth();
    let u = rng.gen_range(0.8..=1.25);
    let width = rng.gen_range(1.0..=2.0);
    WavePacket {
        amplitude: rng.gen_range(0.5..=2.0),
        center: rng.gen_range(-0.1875..=0.1875) * a,
        sigma: (4.0 * width * 2f64.powi(-level)).min(a / 10.0),
        frequency: 2f64.powi(level) * u,
        phase: rng.gen_range(0.0..std::f64::consts::TAU),
    }
}

fn packet_member<R: Rng>(spec: &GridSpec, rng: &mut R, label: String) -> Result<SampledFunction> {
    let top = (max_level(spec) - 2).max(1);
    let level = rng.gen_range(1..=top);
    random_packet(spec, level, rng).sample(spec, format!("{label}:packet{level}"))
}

fn mixture_member<R: Rng>(spec: &GridSpec, rng: &mut R, label: String) -> Result<SampledFunction> {
    let s = domain_scale(spec);
    let a = spec.halfwidth();
    let count = rng.gen_range(1..=3);
    let comps: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let amp = sign * rng.gen_range(0.5..=2.0);
            let center = rng.gen_range(-0.1875..=0.1875) * a;
            let sigma = rng.gen_range(0.3 * s..=3.0 * s).max(4.0 * spec.step());
            (amp, center, sigma)
        })
        .collect();
    SampledFunction::from_real_fn(*spec, format!("{label}:mixture{count}"), move |x| {
        comps
            .iter()
            .map(|&(amp, c, sigma)| {
                let dx = x[0] - c;
                let r2 = dx * dx + x.get(1).map_or(0.0, |y| y * y);
                amp * (-r2 / (2.0 * sigma * sigma)).exp()
            })
            .sum()
    })
}

fn annulus_member<R: Rng>(spec: &GridSpec, rng: &mut R, label: String) -> Result<SampledFunction> {
    let hi = spec.halfwidth_log2() - 2;
    let lo = (-2).max((16.0 * spec.step()).log2().ceil() as i32).min(hi);
    let k = rng.gen_range(lo..=hi);
    let amp = rng.gen_range(0.5..=2.0);
    let radius = 0.75 * 2f64.powi(k);
    let width = 2f64.powi(k) / 8.0;
    SampledFunction::from_real_fn(*spec, format!("{label}:annulus{k}"), move |x| {
        let r = x[0].hypot(x.get(1).copied().unwrap_or(0.0));
        amp * (-((r - radius) / width).powi(2)).exp()
    })
}

fn member(spec: &GridSpec, corpus: &CorpusSpec, index: usize) -> Result<SampledFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(corpus.seed);
    rng.set_stream(index as u64);
    let label = format!("f{index:03}");
    match corpus.families[index % corpus.families.len()] {
        Family::WavePacket => packet_member(spec, &mut rng, label),
        Family::GaussianMixture => mixture_member(spec, &mut rng, label),
        Family::Annulus => annulus_member(spec, &mut rng, label),
    }
}

pub fn build_corpus(spec: &GridSpec, corpus: &CorpusSpec) -> Result<Vec<SampledFunction>> {
    if corpus.families.is_empty() {
        return Err(invalid("corpus needs at least one family"));
    }
    (0..corpus.size)
        .into_par_iter()
        .map(|i| member(spec, corpus, i))
        .collect()
}

/// Wave packets only; band-limited well inside the resolved levels.
pub fn band_limited_corpus(
    spec: &GridSpec,
    size: usize,
    seed: u64,
) -> Result<Vec<SampledFunction>> {
    build_corpus(
        spec,
        &CorpusSpec::new(size, seed).with_families(vec![Family::WavePacket]),
    )
}
