//! Dispatch from a subcommand and config text to a finished report.

use serde::de::DeserializeOwned;
use serde::Serialize;

use kchase::SeedTree;

use crate::config::{parse, Parsed};
use crate::error::{config_error, HarnessError, Result};
use crate::experiments::{fit, kmedian, kserver, line, lowerbound, opt, regret, wsrwfa};
use crate::report::{Artifact, ExperimentReport, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    ChaseLine,
    KserverWfa,
    KmedianFilter,
    Wsrwfa,
    RegretHedge,
    RegretFtl,
    RegretSubsets,
    /// The optional construction name overrides or checks the config's
    /// `construction` key.
    Lowerbound(Option<LowerBoundKind>),
    Opt,
    Fit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundKind {
    Gadget,
    Interval,
    Cluster,
    Matrix,
    Bandit,
}

impl LowerBoundKind {
    pub fn name(self) -> &'static str {
        match self {
            LowerBoundKind::Gadget => "gadget",
            LowerBoundKind::Interval => "interval",
            LowerBoundKind::Cluster => "cluster",
            LowerBoundKind::Matrix => "matrix",
            LowerBoundKind::Bandit => "bandit",
        }
    }
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::ChaseLine => "chase-line",
            Subcommand::KserverWfa => "kserver-wfa",
            Subcommand::KmedianFilter => "kmedian-filter",
            Subcommand::Wsrwfa => "wsrwfa",
            Subcommand::RegretHedge => "regret-hedge",
            Subcommand::RegretFtl => "regret-ftl",
            Subcommand::RegretSubsets => "regret-subsets",
            Subcommand::Lowerbound(_) => "lowerbound",
            Subcommand::Opt => "opt",
            Subcommand::Fit => "fit",
        }
    }
}

/// Puts the command-line construction into the config table, refusing a
/// conflicting value.
fn with_construction(text: &str, kind: Option<LowerBoundKind>) -> Result<String> {
    let Some(kind) = kind else {
        return Ok(text.to_string());
    };
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
    match table.get("construction") {
        Some(toml::Value::String(s)) if s != kind.name() => {
            return config_error(format!(
                "command line asks for {} but the config says {s}",
                kind.name()
            ))
        }
        _ => {
            table.insert(
                "construction".into(),
                toml::Value::String(kind.name().into()),
            );
        }
    }
    Ok(toml::to_string(&table).expect("table serializes"))
}

fn execute<T, F>(
    kind: &str,
    text: &str,
    seed: Option<u64>,
    f: F,
) -> Result<(ExperimentReport, Vec<Artifact>)>
where
    T: DeserializeOwned + Serialize,
    F: FnOnce(&T, &SeedTree) -> Result<Outcome>,
{
    let Parsed {
        seed: file_seed,
        body,
        echo,
    } = parse::<T>(text)?;
    let master = seed.or(file_seed).unwrap_or(0);
    let outcome = f(&body, &SeedTree::new(master).child(kind))?;
    let report = ExperimentReport::new(kind, master, echo, &outcome);
    Ok((report, outcome.artifacts))
}

/// Runs one subcommand on TOML `text`. `seed` takes precedence over the
/// config's own `seed` key; without either the master seed is 0.
pub fn run(
    sub: Subcommand,
    text: &str,
    seed: Option<u64>,
) -> Result<(ExperimentReport, Vec<Artifact>)> {
    let kind = sub.name();
    match sub {
        Subcommand::ChaseLine => execute(kind, text, seed, line::chase_line_outcome),
        Subcommand::KserverWfa => execute(kind, text, seed, kserver::kserver_outcome),
        Subcommand::KmedianFilter => execute(kind, text, seed, kmedian::kmedian_outcome),
        Subcommand::Wsrwfa => execute(kind, text, seed, wsrwfa::wsrwfa_outcome),
        Subcommand::RegretHedge => execute(kind, text, seed, regret::regret_hedge_outcome),
        Subcommand::RegretFtl => execute(kind, text, seed, regret::regret_ftl_outcome),
        Subcommand::RegretSubsets => execute(kind, text, seed, regret::regret_subsets_outcome),
        Subcommand::Lowerbound(c) => {
            let text = with_construction(text, c)?;
            execute(kind, &text, seed, lowerbound::lowerbound_outcome)
        }
        Subcommand::Opt => execute(kind, text, seed, |cfg: &opt::OptConfig, _: &SeedTree| {
            opt::opt_outcome(cfg)
        }),
        Subcommand::Fit => execute(kind, text, seed, fit::fit_outcome),
    }
}
