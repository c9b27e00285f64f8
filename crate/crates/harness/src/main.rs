use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use polyspline::mesh::{read_poly_off, write_poly_off};
use polyspline::preprocess::preprocess;
use polyspline_harness::config::{ExperimentConfig, ExperimentKind, MeshSource, PdeConfig};
use polyspline_harness::experiments::{self, preprocess::run_corpus};
use polyspline_harness::output::{write_corpus, write_outcome};

#[derive(Parser)]
#[command(name = "polyspline", version, about = "Poly-spline FEM experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star-shape repair and separation of a poly-off mesh, or of a generated corpus.
    Preprocess {
        #[arg(long = "in", conflicts_with = "corpus")]
        input: Option<PathBuf>,
        /// Output file (single mesh) or directory (corpus).
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        rings: usize,
        #[arg(long)]
        target_edge: Option<f64>,
        /// Number of generated meshes to process instead of `--in`.
        #[arg(long)]
        corpus: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    Convergence(Common),
    Ablation(Common),
    Conditioning(Common),
    Resilience(Common),
    Elasticity(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; the experiment kind is taken from the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Defaults per experiment when no config file is given.
fn default_config(kind: ExperimentKind) -> ExperimentConfig {
    let mut c = ExperimentConfig { experiment: kind, ..Default::default() };
    match kind {
        ExperimentKind::Convergence => c.levels = 5,
        ExperimentKind::Ablation => {
            c.mesh = MeshSource::Hybrid { n: 8, shear: 0.0 };
            c.modes = vec!["q2".into()];
            c.levels = 4;
        }
        ExperimentKind::Conditioning => {
            c.mesh = MeshSource::Grid { n: 6 };
            c.levels = 3;
        }
        ExperimentKind::Resilience => c.levels = 1,
        ExperimentKind::Elasticity => {
            let mut params = polyspline::registry::Params::new();
            params.insert("young".into(), 200.0);
            params.insert("poisson_ratio".into(), 0.35);
            c.pde = PdeConfig { name: "elasticity".into(), params };
        }
    }
    c
}

fn run_experiment(config: &ExperimentConfig, out: Option<&Path>) -> Result<()> {
    config.validate()?;
    let outcome = experiments::run(config)?;
    let dir = out.map(Path::to_path_buf).or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    for p in write_outcome(&dir, config, &outcome)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let c = ExperimentConfig::load(&config)?;
            run_experiment(&c, out.as_deref())
        }
        Command::Preprocess { input, out, rings, target_edge, corpus, seed } => {
            if let Some(count) = corpus {
                let records = run_corpus(seed, count, rings)?;
                for p in write_corpus(&out, seed, &records)? {
                    println!("wrote {}", p.display());
                }
                return Ok(());
            }
            let input = input.context("either --in or --corpus is required")?;
            let mesh = read_poly_off(&input)?;
            let (hm, report) = preprocess(&mesh, rings, target_edge).with_context(|| format!("preprocessing {}", input.display()))?;
            write_poly_off(&hm.mesh, &out)?;
            println!(
                "{} faces in, {} faces out ({} polygons), {} merge iterations at most",
                mesh.n_faces(),
                hm.mesh.n_faces(),
                hm.polygons().count(),
                report.max_iterations()
            );
            Ok(())
        }
        Command::Convergence(a) => common(ExperimentKind::Convergence, a),
        Command::Ablation(a) => common(ExperimentKind::Ablation, a),
        Command::Conditioning(a) => common(ExperimentKind::Conditioning, a),
        Command::Resilience(a) => common(ExperimentKind::Resilience, a),
        Command::Elasticity(a) => common(ExperimentKind::Elasticity, a),
    }
}

fn common(kind: ExperimentKind, a: Common) -> Result<()> {
    let mut c = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => default_config(kind),
    };
    c.experiment = kind;
    if let Some(s) = a.seed {
        c.seed = s;
    }
    run_experiment(&c, a.out.as_deref())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
