//! One module per subcommand. Each exposes a typed entry point returning
//! summaries for tests and an `*_outcome` wrapper for the CLI.

pub mod fit;
pub mod kmedian;
pub mod kserver;
pub mod line;
pub mod lowerbound;
pub mod opt;
pub mod regret;
pub mod wsrwfa;
