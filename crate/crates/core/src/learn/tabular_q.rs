//! One-step Q-learning over product indices.

use rand::Rng;

use super::agent::{argmax, linear_schedule, Agent, LearnerContext, NamedTensor, PolicyArtifact};
use super::LearnError;
use crate::env::{Action, ActionSpace, SimRng};
use crate::product::ProductObservation;
use crate::replay::Experience;

/// `Q(s,a) += lr (r + gamma max_a' Q(s',a') [not terminated] - Q(s,a))`;
/// returns the TD error.
#[allow(clippy::too_many_arguments)]
pub fn q_learning_update(
    q: &mut [f64],
    num_actions: usize,
    s: usize,
    a: usize,
    r: f64,
    s_next: usize,
    terminated: bool,
    lr: f64,
    gamma: f64,
) -> f64 {
    let next = if terminated {
        0.0
    } else {
        q[s_next * num_actions..(s_next + 1) * num_actions]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let td = r + gamma * next - q[s * num_actions + a];
    q[s * num_actions + a] += lr * td;
    td
}

#[derive(Debug, Clone)]
pub struct TabularQ {
    q: Vec<f64>,
    num_actions: usize,
    lr: f64,
    gamma: f64,
    eps: (f64, f64, f64),
    epsilon: f64,
}

impl TabularQ {
    pub fn new(num_states: usize, num_actions: usize, lr: f64, gamma: f64, eps: (f64, f64, f64)) -> Self {
        TabularQ {
            q: vec![0.0; num_states * num_actions],
            num_actions,
            lr,
            gamma,
            eps,
            epsilon: eps.0,
        }
    }

    pub fn from_context(ctx: &LearnerContext) -> Result<Self, LearnError> {
        let n = ctx.tabular_states.ok_or(LearnError::Incompatible("tabular-q needs a finite environment"))?;
        let ActionSpace::Discrete(a) = ctx.action_space else {
            return Err(LearnError::Incompatible("tabular-q needs discrete actions"));
        };
        let c = ctx.config;
        Ok(TabularQ::new(n, a, c.q_learning_rate, c.gamma, (c.epsilon_start, c.epsilon_end, c.epsilon_fraction)))
    }

    pub fn table(&self) -> &[f64] {
        &self.q
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn row(&self, s: usize) -> &[f64] {
        &self.q[s * self.num_actions..(s + 1) * self.num_actions]
    }
}

fn index_of(obs: &ProductObservation) -> usize {
    obs.tabular_index().expect("tabular learner on a continuous environment")
}

impl Agent for TabularQ {
    fn name(&self) -> &'static str {
        "tabular-q"
    }

    fn act(&mut self, obs: &ProductObservation, explore: bool, rng: &mut SimRng) -> Action {
        if explore && rng.random::<f64>() < self.epsilon {
            return Action::Discrete(rng.random_range(0..self.num_actions));
        }
        let row = self.row(index_of(obs));
        if !explore {
            return Action::Discrete(argmax(row));
        }
        let best = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = (0..self.num_actions).filter(|&a| row[a] == best).collect();
        Action::Discrete(ties[rng.random_range(0..ties.len())])
    }

    fn update(&mut self, batch: &[&Experience], _weights: &[f64], _rng: &mut SimRng) -> Vec<f64> {
        batch
            .iter()
            .map(|e| {
                let Action::Discrete(a) = e.action else {
                    panic!("tabular-q stores discrete actions only")
                };
                q_learning_update(
                    &mut self.q,
                    self.num_actions,
                    index_of(&e.state),
                    a,
                    e.reward,
                    index_of(&e.next_state),
                    e.terminated,
                    self.lr,
                    self.gamma,
                )
            })
            .collect()
    }

    fn set_progress(&mut self, fraction: f64) {
        self.epsilon = linear_schedule(self.eps.0, self.eps.1, self.eps.2, fraction);
    }

    fn greedy_tabular(&self) -> Option<Vec<usize>> {
        Some((0..self.q.len() / self.num_actions).map(|s| argmax(self.row(s))).collect())
    }

    fn export(&self) -> PolicyArtifact {
        PolicyArtifact {
            learner: self.name().into(),
            tensors: vec![NamedTensor {
                name: "q".into(),
                shape: vec![self.q.len() / self.num_actions, self.num_actions],
                values: self.q.clone(),
            }],
        }
    }
}
