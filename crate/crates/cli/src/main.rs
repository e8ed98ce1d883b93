//! Command-line driver: generate sample spaces, run the full pipeline, run
//! the verification checks alone, and export posets and complexes.
//!
//! Exit codes: 0 when every enabled check passes, 1 when a check fails and 2
//! for usage, configuration, I/O and stage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use finiteshape::config::RunConfig;
use finiteshape::metric::{write_coords_csv, SpaceRegistry, SpaceSpec};
use finiteshape::pipeline::{self, ComplexKind, RunOutcome};

#[derive(Debug, Parser)]
#[command(
    name = "finiteshape",
    version,
    about = "Finite hyperspace approximations and shape invariants"
)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "FINITESHAPE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a named space and write its coordinates as CSV.
    Generate {
        /// Space name (circle, warsaw_circle, interval, two_points, cantor).
        #[arg(long)]
        space: String,
        /// Number of sample points.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra generator parameters as KEY=VALUE (radius, length,
        /// cantor_depth, separation, jitter).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Destination CSV file.
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Build everything, run all checks, compute homology and write reports.
    Run {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Directory for the report bundle.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run only the verification checks and print one verdict line per check.
    Verify {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Adjusted sequence file to check instead of building one.
        #[arg(long)]
        sequence: Option<PathBuf>,
        /// Directory for the check report.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write the hyperlevel posets as DOT and CSV.
    ExportPoset {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Single level to export; all levels when omitted.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Write order or Rips complexes as OFF and CSV.
    ExportComplex {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long)]
        level: Option<usize>,
        /// `order` or `rips`.
        #[arg(long, default_value = "order")]
        kind: ComplexKind,
        #[arg(long, short)]
        output: PathBuf,
    },
}

/// Settings shared by the pipeline commands. Flags override the config
/// file.
#[derive(Debug, Args)]
struct PipelineArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generated space name.
    #[arg(long)]
    space: Option<String>,
    /// Sample count of the generated space.
    #[arg(long)]
    n: Option<usize>,
    /// Coordinates CSV to load instead of generating a space.
    #[arg(long)]
    input: Option<PathBuf>,
    /// `coords_csv` or `distmatrix_csv`.
    #[arg(long)]
    input_format: Option<String>,
    /// Root seed of every random choice.
    #[arg(long)]
    seed: Option<u64>,
    /// First radius; defaults to half the ground diameter.
    #[arg(long)]
    epsilon1: Option<f64>,
    /// Number of levels to build.
    #[arg(long)]
    depth: Option<usize>,
    /// Factor in (0, 1) applied to each halved radius gap.
    #[arg(long)]
    safety: Option<f64>,
    /// Tie tolerance relative to the ground diameter.
    #[arg(long)]
    tie_tolerance: Option<f64>,
    /// Highest homology degree (1 or 2).
    #[arg(long)]
    max_degree: Option<usize>,
    /// Largest enumerated subset size; defaults to the degree plus two.
    #[arg(long)]
    cardinality_cap: Option<usize>,
    /// Stabilization window.
    #[arg(long)]
    window: Option<usize>,
    /// Comma-separated check names.
    #[arg(long)]
    checks: Option<String>,
    /// Comma-separated extra bounds for the identity check.
    #[arg(long)]
    extra_bounds: Option<String>,
    /// Any config key as KEY=VALUE; applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn split_pair(pair: &str) -> Result<(&str, &str)> {
    pair.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .with_context(|| format!("expected KEY=VALUE, got `{pair}`"))
}

impl PipelineArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags: [(&str, Option<String>); 14] = [
            ("space", self.space),
            ("samples", self.n.map(|v| v.to_string())),
            ("input", self.input.map(|p| p.display().to_string())),
            ("input_format", self.input_format),
            ("seed", self.seed.map(|v| v.to_string())),
            ("epsilon1", self.epsilon1.map(|v| v.to_string())),
            ("depth", self.depth.map(|v| v.to_string())),
            ("safety", self.safety.map(|v| v.to_string())),
            ("tie_tolerance", self.tie_tolerance.map(|v| v.to_string())),
            ("max_degree", self.max_degree.map(|v| v.to_string())),
            (
                "cardinality_cap",
                self.cardinality_cap.map(|v| v.to_string()),
            ),
            ("window", self.window.map(|v| v.to_string())),
            ("checks", self.checks),
            ("extra_bounds", self.extra_bounds),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                config.set(key, &value)?;
            }
        }
        for pair in &self.sets {
            let (key, value) = split_pair(pair)?;
            config.set(key, value)?;
        }
        Ok(config)
    }
}

fn generate(space: &str, n: u64, seed: u64, params: &[String], output: &PathBuf) -> Result<()> {
    let mut spec = SpaceSpec::new(space).samples(n as usize).seed(seed);
    for pair in params {
        let (key, value) = split_pair(pair)?;
        let number = || -> Result<f64> {
            value
                .parse()
                .with_context(|| format!("invalid value `{value}` for `{key}`"))
        };
        match key {
            "radius" => spec.params.radius = number()?,
            "length" => spec.params.length = number()?,
            "separation" => spec.params.separation = number()?,
            "jitter" => spec.params.jitter = number()?,
            "cantor_depth" => {
                spec.params.depth = value
                    .parse()
                    .with_context(|| format!("invalid value `{value}` for `{key}`"))?
            }
            _ => anyhow::bail!("unknown generator parameter `{key}`"),
        }
    }
    let ground = SpaceRegistry::with_builtins().generate(&spec)?;
    write_coords_csv(&ground, output)?;
    println!("wrote {} points to {}", ground.len(), output.display());
    Ok(())
}

fn print_outcome(outcome: &RunOutcome, table: bool) {
    if table {
        print!("{}", outcome.summary_table());
    }
    for line in outcome.verdict_lines() {
        println!("{line}");
    }
    for path in &outcome.written {
        println!("wrote {}", path.display());
    }
}

fn verdict(outcome: &RunOutcome) -> ExitCode {
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn set_threads(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("threads")
}

/// Reads the pipeline config and applies its thread count unless one came
/// from the command line or environment.
fn pipeline_config(args: PipelineArgs, threads_set: bool) -> Result<RunConfig> {
    let config = args.into_config()?;
    if let (false, Some(threads)) = (threads_set, config.threads) {
        set_threads(threads)?;
    }
    Ok(config)
}

fn execute(command: Command, threads_set: bool) -> Result<ExitCode> {
    match command {
        Command::Generate {
            space,
            n,
            seed,
            params,
            output,
        } => {
            generate(&space, n, seed, &params, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { pipeline, output } => {
            let mut config = pipeline_config(pipeline, threads_set)?;
            if output.is_some() {
                config.output = output;
            }
            let outcome = pipeline::run(&config)?;
            print_outcome(&outcome, true);
            Ok(verdict(&outcome))
        }
        Command::Verify {
            pipeline,
            sequence,
            output,
        } => {
            let mut config = pipeline_config(pipeline, threads_set)?;
            if sequence.is_some() {
                config.sequence_file = sequence;
            }
            if output.is_some() {
                config.output = output;
            }
            let outcome = pipeline::verify(&config)?;
            print_outcome(&outcome, false);
            Ok(verdict(&outcome))
        }
        Command::ExportPoset {
            pipeline,
            level,
            output,
        } => {
            let config = pipeline_config(pipeline, threads_set)?;
            for path in pipeline::export_posets(&config, level, &output)? {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportComplex {
            pipeline,
            level,
            kind,
            output,
        } => {
            let config = pipeline_config(pipeline, threads_set)?;
            for path in pipeline::export_complexes(&config, level, kind, &output)? {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = set_threads(threads) {
            eprintln!("error: cli: {e:#}");
            return ExitCode::from(2);
        }
    }
    match execute(cli.command, cli.threads.is_some()) {
        Ok(code) => code,
        Err(e) => {
            match e.downcast_ref::<finiteshape::Error>() {
                // the message already starts with the stage name
                Some(_) => eprintln!("error: {e:#}"),
                None => eprintln!("error: cli: {e:#}"),
            }
            ExitCode::from(2)
        }
    }
}
