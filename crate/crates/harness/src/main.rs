use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use kchase_harness::report::write_outputs;
use kchase_harness::run::LowerBoundKind;
use kchase_harness::{run, HarnessError, Subcommand};

#[derive(Parser)]
#[command(
    name = "kchase",
    version,
    about = "Online chasing, k-server and regret experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.json and artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Gadget,
    Interval,
    Cluster,
    Matrix,
    Bandit,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Chase convex functions on the line with k servers.
    ChaseLine(Common),
    /// Work function algorithm on finite metrics.
    KserverWfa(Common),
    /// Filtered online k-median on the standard model.
    KmedianFilter(Common),
    /// Well-sharpened chasing with the randomized work function algorithm.
    Wsrwfa(Common),
    /// Hedge over k-subsets of a candidate grid.
    RegretHedge(Common),
    /// Follow-the-leader over k-subsets.
    RegretFtl(Common),
    /// Hedge over k-subsets of experts.
    RegretSubsets(Common),
    /// Lower-bound constructions.
    Lowerbound {
        construction: Option<Construction>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact offline optimum of a single instance.
    Opt(Common),
    /// Power-law exponent of regret against horizon.
    Fit(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, common) = match cli.command {
        Command::ChaseLine(c) => (Subcommand::ChaseLine, c),
        Command::KserverWfa(c) => (Subcommand::KserverWfa, c),
        Command::KmedianFilter(c) => (Subcommand::KmedianFilter, c),
        Command::Wsrwfa(c) => (Subcommand::Wsrwfa, c),
        Command::RegretHedge(c) => (Subcommand::RegretHedge, c),
        Command::RegretFtl(c) => (Subcommand::RegretFtl, c),
        Command::RegretSubsets(c) => (Subcommand::RegretSubsets, c),
        Command::Lowerbound {
            construction,
            common,
        } => {
            let kind = construction.map(|c| match c {
                Construction::Gadget => LowerBoundKind::Gadget,
                Construction::Interval => LowerBoundKind::Interval,
                Construction::Cluster => LowerBoundKind::Cluster,
                Construction::Matrix => LowerBoundKind::Matrix,
                Construction::Bandit => LowerBoundKind::Bandit,
            });
            (Subcommand::Lowerbound(kind), common)
        }
        Command::Opt(c) => (Subcommand::Opt, c),
        Command::Fit(c) => (Subcommand::Fit, c),
    };
    match execute(sub, &common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(sub: Subcommand, common: &Common) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(&common.config).map_err(|source| {
        HarnessError::Config(format!("cannot read {}: {source}", common.config.display()))
    })?;
    let (report, artifacts) = run(sub, &text, common.seed)?;
    let written = write_outputs(&common.out, &report, &artifacts)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report.aggregate).expect("serializable")
    );
    eprintln!(
        "wrote {} files under {}",
        written.len(),
        common.out.display()
    );
    Ok(())
}
