//! Test functions named on the command line.
//!
//! ```text
//! gaussian:sigma[,center]   exp(-|x - c e_1|^2 / (2 sigma^2))
//! packet:level[,seed]       random wave packet with carrier near 2^level
//! annulus:k                 indicator of the dyadic annulus D_k
//! corpus:index              member of the configured corpus
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use herzlab::corpus::{build_corpus, random_packet};
use herzlab::grid::annulus_mask;
use herzlab::{Error, GridSpec, Result, SampledFunction};

use crate::config::ExperimentConfig;

fn bad(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn number<T: std::str::FromStr>(input: &str, field: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| bad(input, format!("`{field}` is not a valid number")))
}

pub fn parse_function(
    input: &str,
    spec: &GridSpec,
    cfg: &ExperimentConfig,
) -> Result<SampledFunction> {
    let (kind, args) = input
        .split_once(':')
        .ok_or_else(|| bad(input, "expected kind:arguments"))?;
    let args: Vec<&str> = args.split(',').collect();
    let arity = |lo: usize, hi: usize| {
        if args.len() < lo || args.len() > hi {
            Err(bad(input, format!("`{kind}` takes {lo} to {hi} arguments")))
        } else {
            Ok(())
        }
    };
    match kind {
        "gaussian" => {
            arity(1, 2)?;
            let sigma: f64 = number(input, args[0])?;
            let center: f64 = args.get(1).map_or(Ok(0.0), |a| number(input, a))?;
            if !(sigma > 0.0) {
                return Err(bad(input, "sigma must be positive"));
            }
            SampledFunction::from_real_fn(*spec, input, move |x| {
                let dx = x[0] - center;
                let r2 = dx * dx + x.get(1).map_or(0.0, |y| y * y);
                (-r2 / (2.0 * sigma * sigma)).exp()
            })
        }
        "packet" => {
            arity(1, 2)?;
            let level: i32 = number(input, args[0])?;
            let seed: u64 = args
                .get(1)
                .map_or(Ok(cfg.corpus.seed), |a| number(input, a))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_packet(spec, level, &mut rng).sample(spec, input)
        }
        "annulus" => {
            arity(1, 1)?;
            Ok(annulus_mask(spec, number(input, args[0])?)?.with_label(input))
        }
        "corpus" => {
            arity(1, 1)?;
            let index: usize = number(input, args[0])?;
            let mut corpus = cfg.corpus_spec()?;
            corpus.size = index + 1;
            build_corpus(spec, &corpus)?
                .pop()
                .ok_or_else(|| bad(input, "empty corpus"))
        }
        _ => Err(bad(
            input,
            "unknown kind; expected gaussian, packet, annulus or corpus",
        )),
    }
}
