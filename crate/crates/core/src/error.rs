use std::path::PathBuf;

use crate::num::Q;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: unknown endpoint `{id}`")]
    UnknownEndpoint { line: usize, id: String },

    #[error("line {line}: duplicate link {a}-{b}")]
    DuplicateLink { line: usize, a: String, b: String },

    #[error("line {line}: duplicate node `{id}`")]
    DuplicateNode { line: usize, id: String },

    #[error("line {line}: self-loop on `{id}`")]
    SelfLoop { line: usize, id: String },

    #[error("line {line}: non-positive bandwidth {bandwidth}")]
    NonPositiveBandwidth { line: usize, bandwidth: Q },

    #[error("unknown switch `{0}`")]
    UnknownSwitch(String),

    #[error("invalid flow: {0}")]
    InvalidFlow(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid utility interval [{u_min}, {u_max}]")]
    InvalidInterval { u_min: Q, u_max: Q },

    #[error("disconnected: no path from `{src}` to `{dst}`")]
    Disconnected { src: String, dst: String },

    #[error("nothing to scale: traffic matrix is empty")]
    NothingToScale,

    #[error("invalid traffic volume {0}: expected 0 < volume <= 1")]
    InvalidVolume(Q),

    #[error("empty topology")]
    EmptyTopology,

    #[error("no flows")]
    NoFlows,

    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    #[error("search budget exceeded: {combinations} combinations > budget {budget}")]
    BudgetExceeded { combinations: u128, budget: u128 },

    #[error("infeasible: none of the {combinations} path combinations satisfies the constraints")]
    Infeasible { combinations: u128 },

    #[error("unknown heuristic `{0}`")]
    UnknownHeuristic(String),

    #[error("unknown power profile `{0}`")]
    UnknownProfile(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("nothing to run")]
    NothingToRun,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
