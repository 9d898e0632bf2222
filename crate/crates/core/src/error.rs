use thiserror::Error;

/// Errors raised by topology generation, the matching game and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown source id {0}")]
    UnknownSource(usize),

    #[error("unknown radio id {0}")]
    UnknownRadio(usize),

    #[error("strategy of source {source_id} violates its quota ({len} radios > {quota})")]
    QuotaViolation {
        source_id: usize,
        len: usize,
        quota: usize,
    },

    #[error("search space too large: {count} {what} exceeds the cap of {cap}")]
    TooLarge {
        what: &'static str,
        count: u128,
        cap: u128,
    },

    #[error("replication with seed {seed} failed: {source}")]
    Replication {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input or configuration rather than a
    /// failure while running.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidArgument(_) | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
