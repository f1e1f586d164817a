use std::path::PathBuf;
use std::process::ExitCode;

use cdqaoa::harness::{self, Command, ExperimentConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cdqaoa", version, about = "Ground-state preparation by optimized unitary sequences")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for independent optimizations
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Symmetry-sector dimension of the configured model.
    Basis,
    /// Replay a protocol table.
    Evolve,
    /// Conventional QAOA over both alternation orders.
    Qaoa,
    /// Train the sequence policy.
    CdqaoaTrain,
    /// Variational counterdiabatic driving.
    CdDrive,
    /// Plain adiabatic driving.
    Adiabatic,
    /// Quantum speed limit of the LMG model versus field.
    LmgQsl,
    /// Overlap of the LMG initial state with the ground manifold.
    LmgOverlap,
    /// All four methods on a duration grid.
    Compare,
    /// Evaluate protocols across system sizes.
    Transfer,
    /// Sample local optima of the duration landscape.
    Landscape,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Basis => Command::Basis,
            Cmd::Evolve => Command::Evolve,
            Cmd::Qaoa => Command::Qaoa,
            Cmd::CdqaoaTrain => Command::CdqaoaTrain,
            Cmd::CdDrive => Command::CdDrive,
            Cmd::Adiabatic => Command::Adiabatic,
            Cmd::LmgQsl => Command::LmgQsl,
            Cmd::LmgOverlap => Command::LmgOverlap,
            Cmd::Compare => Command::Compare,
            Cmd::Transfer => Command::Transfer,
            Cmd::Landscape => Command::Landscape,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let mut cfg = match &cli.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = cli.seed {
            cfg.seed = s;
        }
        if let Some(w) = cli.workers {
            cfg.workers = Some(w);
        }
        if let Some(o) = &cli.out {
            cfg.out = o.clone();
        }
        harness::run(cli.cmd.into(), &cfg)
    })();
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
