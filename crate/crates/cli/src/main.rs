use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nettopo::clustering::{EpsGrid, Linkage};
use nettopo::pipeline::{
    cluster_stage, distances_stage, generate_corpus, load_manifest, measures_stage, parse_eps_grid,
    parse_list, report_stage, run_pipeline, stats_stage, CorpusKind, OutputFormat, RunConfig,
};
use nettopo::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Topological characterization, comparison and clustering of networks.
#[derive(Debug, Parser)]
#[command(name = "nettopo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure every network of a manifest.
    Measures {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Normalize features and compute the distance matrix.
    Distances {
        #[command(flatten)]
        opts: Options,
    },
    /// Select and persist a partition per clustering method.
    Cluster {
        #[command(flatten)]
        opts: Options,
    },
    /// Write the statistical reports.
    Stats {
        #[command(flatten)]
        opts: Options,
    },
    /// Write the clustering reports.
    Report {
        #[command(flatten)]
        opts: Options,
    },
    /// Run every stage.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Write a synthetic corpus and its manifest.
    Generate {
        /// Target directory.
        #[arg(long)]
        out: PathBuf,
        /// `planted-vs-dense` or `models`.
        #[arg(long, default_value = "planted-vs-dense")]
        kind: String,
        #[arg(long, default_value_t = 20)]
        per_domain: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Run configuration. Flags override values read from `--config`.
/// Invalid values are usage errors.
#[derive(Debug, Args)]
struct Options {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, value_parser = ["single", "complete", "average"])]
    linkage: Option<String>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// `deciles` or a comma-separated list of radii.
    #[arg(long)]
    eps_grid: Option<String>,
    /// Comma-separated list of DBSCAN minimum neighbourhood sizes.
    #[arg(long)]
    min_pts: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Degree threshold of the power-law fit.
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    fail_fast: bool,
}

impl Options {
    fn resolve(&self) -> nettopo::Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.out {
            c.out_dir = v.clone();
        }
        if let Some(v) = self.bins {
            c.bins = v;
        }
        if let Some(v) = &self.linkage {
            c.linkage = v.parse::<Linkage>()?;
        }
        if let Some(v) = self.k_min {
            c.k_min = v;
        }
        if let Some(v) = self.k_max {
            c.k_max = v;
        }
        if let Some(v) = &self.eps_grid {
            c.eps_grid = parse_eps_grid(v)?;
        }
        if let Some(v) = &self.min_pts {
            c.min_pts = parse_list(v)?;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.format {
            c.format = v.parse::<OutputFormat>()?;
        }
        if let Some(v) = self.kmin {
            c.kmin = v;
        }
        c.fail_fast |= self.fail_fast;
        c.validate()?;
        Ok(c)
    }
}

fn describe_grid(grid: &EpsGrid) -> String {
    match grid {
        EpsGrid::Deciles => "deciles".into(),
        EpsGrid::List(v) => format!("{} radii", v.len()),
    }
}

/// Failure of a command: bad options, or an error while running.
enum Failure {
    Usage(Error),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn resolve(opts: &Options) -> Result<RunConfig, Failure> {
    opts.resolve().map_err(Failure::Usage)
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Measures { manifest, opts } => {
            let config = resolve(&opts)?;
            let stage = measures_stage(&load_manifest(&manifest)?, &config)?;
            println!(
                "measured {} networks, {} failed; output in {}",
                stage.records.len(),
                stage.failures.len(),
                config.out_dir.display()
            );
        }
        Command::Distances { opts } => {
            let config = resolve(&opts)?;
            let stage = distances_stage(&config)?;
            println!("distance matrix over {} networks", stage.matrix().len());
        }
        Command::Cluster { opts } => {
            let config = resolve(&opts)?;
            let stage = cluster_stage(&config)?;
            for (method, chosen) in &stage.chosen {
                match chosen {
                    Some(c) => println!(
                        "{method}: k = {}, silhouette = {:.4}",
                        c.partition.k(),
                        c.silhouette
                    ),
                    None => println!(
                        "{method}: no valid candidate ({})",
                        describe_grid(&config.eps_grid)
                    ),
                }
            }
        }
        Command::Stats { opts } => {
            let written = stats_stage(&resolve(&opts)?)?;
            println!("wrote {} statistics reports", written.len());
        }
        Command::Report { opts } => {
            let written = report_stage(&resolve(&opts)?)?;
            println!("wrote {} clustering reports", written.len());
        }
        Command::Run { manifest, opts } => {
            let config = resolve(&opts)?;
            let artifacts = run_pipeline(&load_manifest(&manifest)?, &config)?;
            fs::write(config.out_dir.join("config.toml"), config.to_toml()?)
                .map_err(Error::from)?;
            println!(
                "measured {} networks, {} failed; {} reports in {}",
                artifacts.measures.records.len(),
                artifacts.measures.failures.len(),
                artifacts.reports.len(),
                config.out_dir.join("reports").display()
            );
        }
        Command::Generate {
            out,
            kind,
            per_domain,
            seed,
        } => {
            let kind = kind.parse::<CorpusKind>().map_err(Failure::Usage)?;
            let manifest = generate_corpus(kind, per_domain, seed, &out)?;
            println!(
                "wrote {} networks and {}",
                manifest.len(),
                out.join("manifest.csv").display()
            );
        }
    }
    Ok(())
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
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() {
                EXIT_DATA
            } else {
                EXIT_INTERNAL
            })
        }
    }
}
