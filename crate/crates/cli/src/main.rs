use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use corr_ldpc::ensemble::{Ensemble, Preset};
use corr_ldpc::formats;
use corr_ldpc::parallel::{configure_threads, monte_carlo_parallel, ParallelEvaluator};
use corr_ldpc_core::construct::rng_from_seed;
use corr_ldpc_core::de::{threshold, Convergence, DensityEvolution, ThresholdOptions};
use corr_ldpc_core::opt::{optimize_joint_with, sweep_q_with, OptimizerSettings};
use corr_ldpc_core::sim::SimConfig;

/// Correlated-degree LDPC ensembles on the binary erasure channel.
#[derive(Debug, Parser)]
#[command(name = "corr-ldpc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density-evolution threshold report (JSON).
    Analyze {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        de: DeFlags,
        /// Evaluate the joint with these free-cell values (same marginals).
        #[arg(long, value_delimiter = ',')]
        free: Option<Vec<f64>>,
    },
    /// Monte-Carlo peeling-decoder simulation (CSV).
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
        /// `start:stop:step` (inclusive) or a single value.
        #[arg(long)]
        deltas: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reuse one graph for every trial.
        #[arg(long)]
        fixed_graph: bool,
    },
    /// Threshold as a function of q for a block ensemble (CSV).
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0.01)]
        q_step: f64,
        #[command(flatten)]
        de: DeFlags,
    },
    /// Search for the joint with the largest threshold at fixed marginals (JSON).
    Optimize {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Sample a Tanner graph.
    Construct {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GraphFormat::Alist)]
        format: GraphFormat,
    },
    /// Per-iteration density-evolution state (CSV).
    Trajectory {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        de: DeFlags,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphFormat {
    Alist,
    Json,
}

#[derive(Debug, Args)]
struct Source {
    #[arg(
        long,
        value_enum,
        conflicts_with = "ensemble",
        required_unless_present = "ensemble"
    )]
    preset: Option<Preset>,
    /// Ensemble JSON file.
    #[arg(long, alias = "marginals")]
    ensemble: Option<PathBuf>,
    /// Block mixing fraction (block ensembles only).
    #[arg(long)]
    q: Option<f64>,
    /// Block permutation, 1-based, e.g. `2,1`.
    #[arg(long, value_delimiter = ',')]
    pi: Option<Vec<usize>>,
}

impl Source {
    fn load(&self) -> Result<Ensemble> {
        let base = match (&self.preset, &self.ensemble) {
            (Some(p), _) => p.ensemble()?,
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ensemble::from_json_str(&text)?
            }
            (None, None) => bail!("one of --preset or --ensemble is required"),
        };
        base.override_block(self.q, self.pi.clone())
    }
}

#[derive(Debug, Args)]
struct DeFlags {
    /// Bisection bracket width.
    #[arg(long, default_value_t = 1e-4)]
    precision: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,
    /// Convergence once max alpha falls below this.
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
}

impl DeFlags {
    fn options(&self) -> Result<ThresholdOptions> {
        let convergence = Convergence::new(self.epsilon, self.max_iter)?;
        Ok(ThresholdOptions {
            precision: self.precision,
            convergence,
            ..ThresholdOptions::default()
        })
    }
}

/// `start:stop:step`, inclusive of `stop` within half a step, or one value.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {p:?} in {spec:?}"))
        })
        .collect::<Result<_>>()?;
    match parts[..] {
        [v] => Ok(vec![v]),
        [start, stop, step] => {
            if step.is_nan() || step <= 0.0 || stop.is_nan() || start.is_nan() || stop < start {
                bail!("grid {spec:?} needs step > 0 and stop >= start");
            }
            let count = ((stop - start) / step + 0.5).floor() as usize;
            Ok((0..=count).map(|k| snap(start + k as f64 * step)).collect())
        }
        _ => bail!("grid {spec:?} is neither a value nor start:stop:step"),
    }
}

/// Removes accumulated binary noise such as 0.30000000000000004.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match cli.command {
        Command::Analyze { source, de, free } => {
            let ensemble = source.load()?;
            let joint = match free {
                Some(values) => ensemble.constraint()?.joint_from_free_cells(&values)?,
                None => ensemble.joint()?,
            };
            let r = threshold(&joint, &de.options()?)?;
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&formats::threshold_json(&r))?
            )?;
        }
        Command::Simulate {
            source,
            n,
            deltas,
            trials,
            seed,
            fixed_graph,
        } => {
            let sampler = source.load()?.sampler(n)?;
            let config = SimConfig {
                deltas: parse_grid(&deltas)?,
                trials,
                seed,
                resample_graph_per_trial: !fixed_graph,
            };
            let results = monte_carlo_parallel(sampler.as_ref(), &config)?;
            formats::write_sim_csv(&results, &mut out)?;
        }
        Command::Sweep { source, q_step, de } => {
            let ensemble = source.load()?;
            let Ensemble::Block { p_x, p_y, spec } = &ensemble else {
                bail!("sweep needs a block ensemble");
            };
            if !(q_step > 0.0 && q_step <= 1.0) {
                bail!("--q-step must lie in (0, 1]");
            }
            let grid = parse_grid(&format!("0:1:{q_step}"))?
                .into_iter()
                .map(|q| q.min(1.0))
                .collect::<Vec<_>>();
            let sweep = sweep_q_with(p_x, p_y, spec, &grid, &de.options()?, &ParallelEvaluator)?;
            formats::write_sweep_csv(&sweep, &mut out)?;
        }
        Command::Optimize {
            source,
            budget,
            seed,
        } => {
            let constraint = source.load()?.constraint()?;
            let outcome = optimize_joint_with(
                &constraint,
                budget,
                seed,
                &OptimizerSettings::default(),
                &ParallelEvaluator,
            )?;
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&formats::optimizer_json(&outcome))?
            )?;
        }
        Command::Construct {
            source,
            n,
            seed,
            format,
        } => {
            let graph = source
                .load()?
                .sampler(n)?
                .sample(&mut rng_from_seed(seed))?;
            match format {
                GraphFormat::Alist => formats::write_alist(&graph, &mut out)?,
                GraphFormat::Json => writeln!(out, "{}", formats::graph_to_json(&graph))?,
            }
        }
        Command::Trajectory { source, delta, de } => {
            if !(0.0..=1.0).contains(&delta) {
                bail!("--delta must lie in [0, 1]");
            }
            let joint = source.load()?.joint()?;
            let rule = de.options()?.convergence;
            let de = DensityEvolution::new(&joint);
            writeln!(
                out,
                "{}",
                formats::trajectory_header(de.x_degrees(), de.y_degrees())
            )?;
            let mut failed = None;
            de.run_observed(delta, &rule, |s| {
                if failed.is_none() {
                    failed = writeln!(out, "{}", formats::trajectory_row(s)).err();
                }
            });
            if let Some(e) = failed {
                return Err(e.into());
            }
        }
    }
    out.flush().map_err(|e| anyhow!(e))
}

/// 3 for constructions that cannot be realized, 2 for any other bad input.
fn exit_code(err: &anyhow::Error) -> u8 {
    use corr_ldpc_core::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::InfeasibleRounding(_) | Error::InfeasiblePoint { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
