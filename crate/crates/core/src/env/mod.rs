//! Base environments and the interface the product wrapper drives.

pub mod cartpole;
pub mod gridworld;
pub mod tabular;
pub mod waterworld;

use serde::{Deserialize, Serialize};

pub use cartpole::{CartpoleRegions, CartpoleRegionsConfig};
pub use gridworld::{Gridworld, GridworldConfig};
pub use tabular::{ProductMdp, TabularModel, ValueIteration};
pub use waterworld::{Waterworld, WaterworldConfig};

/// Random source used throughout simulation and training.
pub type SimRng = rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Action {
    Discrete(usize),
    Continuous(Vec<f64>),
}

impl Action {
    /// Stable 64-bit FNV-1a digest, for episode logs.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut feed = |bytes: &[u8]| {
            for b in bytes {
                h ^= *b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        match self {
            Action::Discrete(a) => {
                feed(&[0]);
                feed(&(*a as u64).to_le_bytes());
            }
            Action::Continuous(v) => {
                feed(&[1]);
                for x in v {
                    feed(&x.to_bits().to_le_bytes());
                }
            }
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ActionSpace {
    Discrete(usize),
    /// Symmetric box `[-high, high]^dim`.
    Continuous { dim: usize, high: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseStep {
    pub observation: Vec<f64>,
    /// Environment's own reward (e.g. a failure penalty).
    pub reward: f64,
    pub terminated: bool,
}

/// A simulator whose states carry a labelling over named propositions.
pub trait Environment: Send {
    fn name(&self) -> &str;
    fn observation_dim(&self) -> usize;
    fn action_space(&self) -> ActionSpace;
    /// Proposition names; bit `i` of [`Environment::label_bits`] is name `i`.
    fn propositions(&self) -> Vec<String>;
    fn reset(&mut self, rng: &mut SimRng) -> Vec<f64>;
    fn step(&mut self, action: &Action, rng: &mut SimRng) -> BaseStep;
    /// Propositions holding in the current state.
    fn label_bits(&self) -> u64;
    /// Index of the current state for finite environments.
    fn tabular_state(&self) -> Option<usize> {
        None
    }
    /// Exposes the transition model when the state space is finite.
    fn as_tabular(&self) -> Option<&dyn TabularModel> {
        None
    }
}
