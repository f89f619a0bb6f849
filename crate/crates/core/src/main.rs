use clap::{Args, Parser, Subcommand};
use soilnet::config::{parse_config, RunConfig, DEFAULT_CONFIG_TEXT};
use soilnet::pipeline::{cmd_fit, cmd_metrics, cmd_networks, cmd_pipeline, cmd_simulate, RunContext};
use std::path::PathBuf;
use std::process::ExitCode;

/// Two-phase soil-column simulation and similarity-network analysis.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the flow simulation and write snapshot grids.
    Simulate(Common),
    /// Build profile networks and temporal blocks from the snapshots.
    Networks(Common),
    /// Summarize the networks (degree, clustering, path length, small world).
    Metrics(Common),
    /// Fit the velocity, k-c and inverse-clustering models.
    Fit(Common),
    /// All stages in order.
    Pipeline(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration; the built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random-field seed (overrides `field.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Overwrite existing outputs of the stage.
    #[arg(long)]
    force: bool,
}

fn context(c: &Common) -> Result<RunContext, soilnet::Error> {
    let mut config = match &c.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::from_toml_str(DEFAULT_CONFIG_TEXT)?,
    };
    if let Some(seed) = c.seed {
        config.field.seed = seed;
    }
    if let Some(out) = &c.out {
        config.output.dir = out.clone();
    }
    let mut ctx = RunContext::new(config);
    ctx.force = c.force;
    ctx.verbose = true;
    Ok(ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&RunContext) -> Result<(), soilnet::pipeline::PipelineError>) = match &cli.command {
        Command::Simulate(c) => (c, cmd_simulate),
        Command::Networks(c) => (c, cmd_networks),
        Command::Metrics(c) => (c, cmd_metrics),
        Command::Fit(c) => (c, cmd_fit),
        Command::Pipeline(c) => (c, cmd_pipeline),
    };
    let result = context(common).and_then(|ctx| {
        println!("run directory {} ({})", ctx.out.display(), ctx.config.header_line().trim_start_matches("# "));
        run(&ctx).map_err(soilnet::Error::from)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
