//! Experience replay: the rank-classified buffer plus uniform and
//! prioritized baselines behind one interface.

mod classified;
mod prioritized;
mod uniform;

pub use classified::{category_probabilities, ClassifiedBuffer};
pub use prioritized::{PrioritizedBuffer, SumTree};
pub use uniform::UniformBuffer;

use thiserror::Error;

use crate::env::{Action, SimRng};
use crate::product::ProductObservation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error("every partition is empty")]
    AllEmpty,
    #[error("category {category} out of range for {partitions} partitions")]
    BadCategory { category: usize, partitions: usize },
    #[error("invalid replay configuration: {0}")]
    Config(String),
}

/// One stored transition; `category` is the rank of the successor's
/// automaton state.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub state: ProductObservation,
    pub action: Action,
    pub reward: f64,
    pub next_state: ProductObservation,
    pub terminated: bool,
    pub category: usize,
}

/// A drawn experience: an opaque handle valid until the next push, and an
/// importance weight (1 unless the buffer corrects its own bias).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampled {
    pub handle: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BufferStats {
    pub sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

pub trait Replay: Send {
    fn kind(&self) -> &'static str;
    /// Called before episode `episode` (0-based) starts.
    fn begin_episode(&mut self, episode: usize);
    fn push(&mut self, e: Experience) -> Result<(), ReplayError>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Draws `n` experiences with replacement.
    fn sample(&mut self, n: usize, rng: &mut SimRng) -> Result<Vec<Sampled>, ReplayError>;
    fn get(&self, handle: usize) -> &Experience;
    fn update_priorities(&mut self, _handles: &[usize], _td_errors: &[f64]) {}
    /// Fraction of the training budget used so far, in `[0, 1]`.
    fn set_progress(&mut self, _fraction: f64) {}
    fn stats(&self) -> BufferStats;
}
