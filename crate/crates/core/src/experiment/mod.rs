//! Task files, training matrices, summaries and the verification suite.

pub mod catalog;
pub mod presets;
pub mod runner;
pub mod task;
pub mod verify;

use thiserror::Error;

use crate::dfa::DfaError;
use crate::learn::LearnError;
use crate::ltlf::LtlfError;
use crate::ranking::RankError;

pub use runner::{matrix, read_runs, run_matrix, run_one, summarize, write_runs, RunOptions, RunSpec, Summary};
pub use task::{compile_task, CompiledTask, EnvSpec, TaskFile};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Formula(#[from] LtlfError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}
