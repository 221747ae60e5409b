use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use herzlab::spaces::{kernel_norms, tl_norm, tl_norm_admissible, tl_norm_peetre};
use herzlab::Result;
use herzlab_cli::config::ExperimentConfig;
use herzlab_cli::estimate::{estimate, X_LABEL};
use herzlab_cli::input::parse_function;
use herzlab_cli::output::{write_outputs, SuiteOutcome};
use herzlab_cli::suites::{run_suite, Suite};

#[derive(Parser)]
#[command(
    name = "herzlab",
    version,
    about = "Numerical experiments on weighted grand Herz-Morrey spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and gate it against the thresholds.
    Run {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the constant of one inequality.
    Estimate {
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print every norm of one function.
    Norms {
        #[arg(long)]
        input: String,
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
}

const EXIT_THRESHOLD: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn load(path: Option<&PathBuf>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let cfg = load(self.config.as_ref())?.with_overrides(self.seed, self.samples, self.grid_n);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(outcome: &SuiteOutcome, files: &[PathBuf]) -> ExitCode {
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for c in &outcome.checks {
        let status = match (c.gated, c.passed) {
            (false, _) => "info",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        println!(
            "{status:>4}  {}: {:.6e} (threshold {:.3e})",
            c.name, c.value, c.threshold
        );
    }
    if outcome.hypothesis_violated {
        println!("note: some cases ran outside their hypotheses");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_THRESHOLD)
    }
}

fn norms(input: &str, params: Option<&PathBuf>) -> Result<()> {
    let cfg = load(params)?;
    cfg.validate()?;
    let spec = cfg.grid()?;
    let f = parse_function(input, &spec, &cfg)?;
    let tl = cfg.tl_params(&spec)?;
    let adm = cfg.admissible_params(&spec)?;
    let peetre = tl_norm_peetre(&f, &tl)?;
    let comparison = kernel_norms(&f, &cfg.kernel_params(&spec)?)?;
    println!("function  {}", f.label());
    println!("{:<16}{:>16}", "norm", "value");
    println!("{:<16}{:>16.9e}", "tl", tl_norm(&f, &tl)?);
    println!(
        "{:<16}{:>16.9e}",
        "tl_admissible",
        tl_norm_admissible(&f, &adm)?
    );
    println!("{:<16}{:>16.9e}", "tl_peetre", peetre.value);
    for (name, value) in &comparison.values {
        println!("{name:<16}{value:>16.9e}");
    }
    if !peetre.hypothesis_holds {
        println!("note: Peetre hypothesis fails for these parameters");
    }
    for flag in &comparison.flags {
        println!("flag: {flag}");
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { suite, common } => {
            let suite = Suite::parse(&suite)?;
            let cfg = common.config()?;
            let outcome = run_suite(suite, &cfg)?;
            let files = write_outputs(&common.out, suite.name(), &outcome, "sample index")?;
            Ok(report(&outcome, &files))
        }
        Command::Estimate { id, common } => {
            let cfg = common.config()?;
            let outcome = estimate(&id, &cfg)?;
            let name = id.replace([':', '/'], "_");
            let files = write_outputs(&common.out, &name, &outcome, X_LABEL)?;
            for r in &outcome.reports {
                println!(
                    "{}: max {:.6e} at {}, spread {:.4}",
                    r.name,
                    r.max_ratio,
                    r.argmax.as_deref().unwrap_or("-"),
                    r.spread
                );
            }
            report(&outcome, &files);
            Ok(ExitCode::SUCCESS)
        }
        Command::Norms { input, params } => {
            norms(&input, params.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
