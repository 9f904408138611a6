use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A state space or action space exceeded its enumeration budget.
    #[error("capacity exceeded for {what}: required {required}, limit {limit}")]
    Capacity {
        what: String,
        required: f64,
        limit: f64,
    },
    #[error("degenerate anchor: the anchor coincides with the request center")]
    DegenerateAnchor,
    #[error("infinite cost cannot be charged to a ledger")]
    InfiniteCost,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn check_capacity(what: &str, required: f64, limit: f64) -> Result<()> {
    if required > limit {
        Err(Error::Capacity {
            what: what.to_string(),
            required,
            limit,
        })
    } else {
        Ok(())
    }
}
