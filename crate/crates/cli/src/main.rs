//! `cantor`: reproducible experiment runner.
//!
//! Exit codes: 0 success, 2 bad input or precondition, 3 the experiment ran
//! but did not reach its goal (the report is still written).

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spec::{ExperimentSpec, Failure};

#[derive(Parser)]
#[command(name = "cantor", version, about = "Bounded-degree graph experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Args, Clone, Default)]
struct Params {
    /// Seed for random families and random labelings.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest radius compared by `converge`.
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Ball radius for `balls`, partition scale R elsewhere.
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Target isoperimetric constant, as `p/q` or a decimal.
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Number of rotated partitions reported by `partition`.
    #[arg(long, global = true)]
    q: Option<usize>,
    /// Size cap: canonicalization (`balls`), exact solver (`mis`),
    /// eigensolver (`spectrum`).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Output file for `gen`, output directory for everything else.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Gen {
        /// Family words, e.g. `torus 8` or `random-regular 4 128`.
        #[arg(required = true, num_args = 1..)]
        family: Vec<String>,
    },
    /// Rooted-ball profile at `--radius`.
    Balls { graph: String },
    /// Pairwise topological distances and Benjamini-Schramm curves.
    Converge {
        #[arg(required = true, num_args = 1..)]
        graphs: Vec<String>,
    },
    /// Local (d+1)-coloring with verifier report.
    Color { graph: String },
    /// Doubling partition at `--radius`, or the first scale reaching `--eps`.
    Partition { graph: String },
    /// Tile-wise independent set with verifier report and exact ratio.
    Mis { graph: String },
    /// Hausdorff distance from Laplacian spectra to a target set.
    Spectrum {
        /// Family words without the size, e.g. `cycle` or `random-regular:4`.
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        /// `line`, `plane`, `tree:d`, or a graph whose spectrum is the target.
        #[arg(long)]
        target: String,
    },
}

impl Cli {
    fn spec(&self) -> ExperimentSpec {
        let p = &self.params;
        let (command, graphs, ns, target) = match &self.command {
            Command::Gen { family } => ("gen", vec![family.join(" ")], None, None),
            Command::Balls { graph } => ("balls", vec![graph.clone()], None, None),
            Command::Converge { graphs } => ("converge", graphs.clone(), None, None),
            Command::Color { graph } => ("color", vec![graph.clone()], None, None),
            Command::Partition { graph } => ("partition", vec![graph.clone()], None, None),
            Command::Mis { graph } => ("mis", vec![graph.clone()], None, None),
            Command::Spectrum { family, ns, target } => (
                "spectrum",
                vec![family.clone()],
                Some(ns.clone()),
                Some(target.clone()),
            ),
        };
        ExperimentSpec {
            command: command.into(),
            graphs,
            seed: p.seed,
            radius: p.radius,
            eps: p.eps.clone(),
            k_max: p.k_max,
            q: p.q,
            cap: p.cap,
            ns,
            target,
            out: p.out.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = cli.spec();
    let outcome = match spec.command.as_str() {
        "gen" => commands::gen(&spec),
        "balls" => commands::balls(&spec),
        "converge" => commands::converge(&spec),
        "color" => commands::color(&spec),
        "partition" => commands::partition(&spec),
        "mis" => commands::mis(&spec),
        _ => commands::spectrum(&spec),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Unreached) => ExitCode::from(3),
    }
}
