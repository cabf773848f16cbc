//! The learner interface and the registry that builds learners by name.

use serde::{Deserialize, Serialize};

use super::{Dqn, LearnError, TabularQ, Td3, TrainConfig};
use crate::env::{Action, ActionSpace, SimRng};
use crate::product::ProductObservation;
use crate::replay::Experience;

pub trait Agent: Send {
    fn name(&self) -> &'static str;
    /// Chooses an action; `explore` enables the behaviour noise.
    fn act(&mut self, obs: &ProductObservation, explore: bool, rng: &mut SimRng) -> Action;
    /// One gradient (or table) update on `batch`; returns the TD errors.
    fn update(&mut self, batch: &[&Experience], weights: &[f64], rng: &mut SimRng) -> Vec<f64>;
    /// Fraction of the training budget used so far, in `[0, 1]`.
    fn set_progress(&mut self, _fraction: f64) {}
    /// Greedy action for every product index, for finite problems.
    fn greedy_tabular(&self) -> Option<Vec<usize>> {
        None
    }
    fn export(&self) -> PolicyArtifact;
}

/// Learned parameters with their shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyArtifact {
    pub learner: String,
    pub tensors: Vec<NamedTensor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

/// What a learner needs to know about the problem.
#[derive(Debug, Clone)]
pub struct LearnerContext<'a> {
    pub feature_dim: usize,
    pub action_space: ActionSpace,
    /// Number of product indices when the base environment is finite.
    pub tabular_states: Option<usize>,
    pub config: &'a TrainConfig,
}

type Builder = fn(&LearnerContext, &mut SimRng) -> Result<Box<dyn Agent>, LearnError>;

const LEARNERS: &[(&str, Builder)] = &[
    ("tabular-q", |c, _| Ok(Box::new(TabularQ::from_context(c)?))),
    ("dqn", |c, r| Ok(Box::new(Dqn::from_context(c, r)?))),
    ("td3", |c, r| Ok(Box::new(Td3::from_context(c, r)?))),
];

pub fn learner_names() -> Vec<&'static str> {
    LEARNERS.iter().map(|(n, _)| *n).collect()
}

pub fn build_learner(name: &str, ctx: &LearnerContext, rng: &mut SimRng) -> Result<Box<dyn Agent>, LearnError> {
    let (_, build) = LEARNERS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| LearnError::UnknownLearner(name.to_string()))?;
    build(ctx, rng)
}

/// Linear decay from `start` to `end` over the first `fraction` of training.
pub fn linear_schedule(start: f64, end: f64, fraction: f64, progress: f64) -> f64 {
    if fraction <= 0.0 {
        return end;
    }
    let t = (progress / fraction).clamp(0.0, 1.0);
    start + (end - start) * t
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
