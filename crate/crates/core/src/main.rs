use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use nrdyn::graph::write_graph;
use nrdyn::harness::config::{GraphSource, RunConfig};
use nrdyn::harness::grid::{generate_grid, parse_dims, AmenitySpec};
use nrdyn::harness::runner::run_matrix;
use nrdyn::harness::verify::run_property_suite;
use nrdyn::Error;

#[derive(Parser)]
#[command(name = "nrdyn", version, about = "No-regret dynamics of neighborhood change on road graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the (rho, lambda) experiment matrix and write snapshots.
    Run(RunArgs),
    /// Write a synthetic grid graph file.
    Grid(GridArgs),
}

#[derive(clap::Args)]
#[command(group(ArgGroup::new("source").required(true).args(["graph", "grid"])))]
struct RunArgs {
    /// Graph file (JSON nodes and arcs).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Synthetic grid as ROWSxCOLS.
    #[arg(long, value_name = "RxC")]
    grid: Option<String>,
    /// Amenity cells of the grid: `center` or `r,c;r,c;...`.
    #[arg(long, default_value = "center", requires = "grid")]
    amenities: String,
    /// Number of residents (default: one per housing site).
    #[arg(long)]
    residents: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    rho: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    lambda: Vec<f64>,
    #[arg(long)]
    horizon: u64,
    /// Comma-separated checkpoint step counts (default: the horizon).
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<u64>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Equilibrium-gap samples drawn per step.
    #[arg(long, default_value_t = 1)]
    cce_samples: u32,
    /// Also write an SVG map per checkpoint.
    #[arg(long)]
    render: bool,
    /// Run each checkpoint as its own horizon.
    #[arg(long)]
    independent_runs_per_checkpoint: bool,
    /// Save the final engine state of each run.
    #[arg(long)]
    save_state: bool,
    /// Run the built-in property checks before the experiments.
    #[arg(long)]
    verify: bool,
}

#[derive(clap::Args)]
struct GridArgs {
    #[arg(value_name = "RxC")]
    dims: String,
    #[arg(long, default_value = "center")]
    amenities: String,
    #[arg(long, short)]
    out: PathBuf,
}

fn run_config(args: &RunArgs) -> Result<RunConfig, Error> {
    let source = match (&args.graph, &args.grid) {
        (Some(path), _) => {
            if !path.is_file() {
                return Err(Error::InvalidConfig(format!("graph file {} not found", path.display())));
            }
            GraphSource::File(path.clone())
        }
        (None, Some(dims)) => {
            let (rows, cols) = parse_dims(dims)?;
            GraphSource::Grid {
                rows,
                cols,
                amenities: args.amenities.parse::<AmenitySpec>()?,
            }
        }
        (None, None) => return Err(Error::InvalidConfig("no graph source".into())),
    };
    let checkpoints = if args.checkpoints.is_empty() {
        vec![args.horizon]
    } else {
        args.checkpoints.clone()
    };
    let config = RunConfig {
        source,
        residents: args.residents,
        rhos: args.rho.clone(),
        lambdas: args.lambda.clone(),
        horizon: args.horizon,
        checkpoints,
        seed: args.seed,
        out_dir: args.out.clone(),
        cce_samples_per_step: args.cce_samples,
        render: args.render,
        independent_runs: args.independent_runs_per_checkpoint,
        save_state: args.save_state,
    };
    config.validate()?;
    Ok(config)
}

fn run(args: RunArgs) -> Result<(), Error> {
    let config = run_config(&args)?;
    if args.verify {
        let checks = run_property_suite()?;
        let mut failed = Vec::new();
        for c in &checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            eprintln!("{status} {} {}", c.name, c.detail);
            if !c.passed {
                failed.push(c.name);
            }
        }
        if !failed.is_empty() {
            return Err(Error::Verification(failed.join(", ")));
        }
    }
    for outcome in run_matrix(&config)? {
        let m = &outcome.manifest;
        println!(
            "rho={} lambda={} max_regret={:.6} cce_gap={:.6} dir={}",
            outcome.rho,
            outcome.lambda,
            m.max_regret,
            m.cce.gap,
            outcome.dir.display()
        );
    }
    Ok(())
}

fn grid(args: GridArgs) -> Result<(), Error> {
    let (rows, cols) = parse_dims(&args.dims)?;
    let spec: AmenitySpec = args.amenities.parse()?;
    let (graph, partition) = generate_grid(rows, cols, &spec)?;
    write_graph(&args.out, &graph, &partition)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Grid(args) => grid(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
