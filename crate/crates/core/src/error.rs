use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building instances, running dynamics, or writing outputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse graph file: {0}")]
    Parse(String),

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("arc {tail} -> {head} references unknown node `{missing}`")]
    UnknownNode {
        tail: String,
        head: String,
        missing: String,
    },

    #[error("arc {tail} -> {head} has non-positive length {length}")]
    NonPositiveLength {
        tail: String,
        head: String,
        length: f64,
    },

    #[error("graph has no amenity sites")]
    NoAmenities,

    #[error("graph has no housing sites")]
    NoHousing,

    #[error("node `{from}` cannot reach node `{to}`; restrict to a strongly connected component first")]
    Unreachable { from: String, to: String },

    #[error("lorenz curve argument {0} outside [0, 1]")]
    LorenzDomain(f64),

    #[error("resident count must be at least 1")]
    NoResidents,

    #[error("invalid endowments: {0}")]
    InvalidEndowments(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("community weights vanish at housing site {site} (every resident at normalized distance 1)")]
    DegenerateCommunity { site: usize },

    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),

    #[error("engine already ran its full horizon of {0} steps")]
    HorizonReached(u64),

    #[error("equilibrium gap requested but no samples were configured")]
    NoCceSamples,

    #[error("checkpoint {0} was never recorded")]
    UnknownCheckpoint(u64),

    #[error("bad checkpoint file: {0}")]
    Checkpoint(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("property checks failed: {0}")]
    Verification(String),

    #[error("incomplete run directory {}: missing {what}", dir.display())]
    IncompleteRun { dir: PathBuf, what: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error stems from bad user input rather than a failure mid-run.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::InvalidParams(_)
                | Error::Grid(_)
                | Error::NoResidents
                | Error::Parse(_)
                | Error::DuplicateNode(_)
                | Error::UnknownNode { .. }
                | Error::NonPositiveLength { .. }
                | Error::NoAmenities
                | Error::NoHousing
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
